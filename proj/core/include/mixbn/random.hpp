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

#include <cmath>
#include <cstdint>
#include <random>

namespace mixbn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; maps (seed, stream) to a decorrelated child seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential1(Rng& rng) {
    return std::exponential_distribution<double>(1.0)(rng);
}

/// Gamma(shape, rate).
inline double gamma_rate(Rng& rng, double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

/// Inverse-gamma(shape, rate): 1 / Gamma(shape, rate).
inline double inverse_gamma(Rng& rng, double shape, double rate) {
    return 1.0 / gamma_rate(rng, shape, rate);
}

inline int uniform_index(Rng& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

}  // namespace mixbn
