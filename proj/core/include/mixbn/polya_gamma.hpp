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

#include "mixbn/random.hpp"

namespace mixbn {

/// Exact draw from the Pólya-Gamma PG(1, c) distribution.
///
/// Devroye-style alternating-series rejection sampler: the proposal mixes a
/// truncated inverse Gaussian on (0, 0.64] with a shifted exponential tail.
double pg_sample(double c, Rng& rng);

/// E[PG(1, c)] = tanh(c/2) / (2c), with the c -> 0 limit 1/4.
double pg_mean(double c);
/// Var[PG(1, c)] = (sinh(c) - c) / (4 c^3 cosh^2(c/2)), with the c -> 0 limit 1/24.
double pg_variance(double c);

}  // namespace mixbn
