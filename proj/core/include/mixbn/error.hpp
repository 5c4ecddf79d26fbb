/*
Copyright 2026 The mixbn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace mixbn {

/// Failure category; doubles as the CLI exit code.
enum class ErrorCategory : int {
    kParameter = 3,
    kStructural = 4,
    kNumeric = 5,
    kIo = 6,
    kParse = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Invalid argument: out-of-range index, bad probability, dimension mismatch.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorCategory::kParameter, what) {}
};

/// Graph-structure violation (cycle, self-loop).
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& what) : Error(ErrorCategory::kStructural, what) {}
};

/// Non-finite intermediate or failed factorization.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

/// Malformed input file; message carries the location.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorCategory::kParse, what) {}
};

/// Throws an error of the same concrete type as `e` with `prefix` prepended.
[[noreturn]] inline void rethrow_with_prefix(const Error& e, const std::string& prefix) {
    const std::string what = prefix + e.what();
    switch (e.category()) {
        case ErrorCategory::kParameter: throw ParameterError(what);
        case ErrorCategory::kStructural: throw StructuralError(what);
        case ErrorCategory::kNumeric: throw NumericError(what);
        case ErrorCategory::kIo: throw IoError(what);
        case ErrorCategory::kParse: throw ParseError(what);
    }
    throw Error(e.category(), what);
}

}  // namespace mixbn
