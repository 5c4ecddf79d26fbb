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

#include <iosfwd>
#include <string>
#include <vector>

#include "mixbn/mixture.hpp"

namespace mixbn::cli {

/// Runs the `mixbn` command line. Returns the process exit code: 0 on
/// success, 2 for usage errors, the ErrorCategory value for library
/// failures and 1 for anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "1,2,5" or "1..5" or a mix ("1..3,6"); duplicates and order are kept.
std::vector<int> parse_k_values(const std::string& text);

/// Summary of a fitted chain as one JSON document: per-component move
/// acceptance statistics, the joint log-score series, M x M posterior edge
/// frequencies and modal graphs.
std::string format_summary(const ChainTrace& trace);

}  // namespace mixbn::cli
