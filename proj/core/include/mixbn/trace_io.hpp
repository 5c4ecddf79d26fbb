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

#include <string>
#include <vector>

#include "mixbn/gbn.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/mixture.hpp"

namespace mixbn {

inline constexpr int kTraceSchemaVersion = 1;

/// Node-major flat array: for each node, intercept, variance, then the
/// coefficients in parent-index order.
std::vector<double> flatten_params(const Dag& dag, const ComponentParams& params);
ComponentParams unflatten_params(const Dag& dag, const std::vector<double>& flat);

/// Line-delimited JSON: one header object, one object per kept record, one
/// footer with the full joint log-score series. Doubles round-trip exactly.
std::string format_trace(const ChainTrace& trace);
ChainTrace parse_trace(const std::string& text, const std::string& origin = "<memory>");

void write_trace(const std::string& path, const ChainTrace& trace);
ChainTrace read_trace(const std::string& path);

}  // namespace mixbn
