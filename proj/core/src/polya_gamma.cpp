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

#include "mixbn/polya_gamma.hpp"

#include <cmath>
#include <numbers>

namespace mixbn {

namespace {

constexpr double kTrunc = 0.64;
constexpr double kPi = std::numbers::pi;

// log Phi(x) for the standard normal
double log_normal_cdf(double x) { return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2)); }

// n-th term of the alternating series for the J*(1, 0) density.
double series_term(int n, double x) {
    const double k = (n + 0.5) * kPi;
    if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
    if (x > 0.0) {
        const double e = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) -
                         2.0 * (n + 0.5) * (n + 0.5) / x;
        return std::exp(e);
    }
    return 0.0;
}

// Probability of drawing from the exponential tail piece.
double tail_mass(double z) {
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
    const double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);
    const double x0 = std::log(fz) + fz * kTrunc;
    const double xb = x0 - z + log_normal_cdf(b);
    const double xa = x0 + z + log_normal_cdf(a);
    const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
    return 1.0 / (1.0 + qdivp);
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, kTrunc].
double truncated_inverse_gaussian(double z, Rng& rng) {
    double x = kTrunc + 1.0;
    if (z < 1.0 / kTrunc) {
        // mean beyond the truncation point: chi-square proposal, accept by exp(-z^2 x / 2)
        double alpha = 0.0;
        do {
            double e1 = exponential1(rng);
            double e2 = exponential1(rng);
            while (e1 * e1 > 2.0 * e2 / kTrunc) {
                e1 = exponential1(rng);
                e2 = exponential1(rng);
            }
            x = 1.0 + e1 * kTrunc;
            x = kTrunc / (x * x);
            alpha = std::exp(-0.5 * z * z * x);
        } while (uniform01(rng) > alpha);
    } else {
        const double mu = 1.0 / z;
        while (x > kTrunc) {
            double y = standard_normal(rng);
            y *= y;
            const double half_mu = 0.5 * mu;
            const double mu_y = mu * y;
            x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
            if (uniform01(rng) > mu / (mu + x)) x = mu * mu / x;
        }
    }
    return x;
}

}  // namespace

double pg_sample(double c, Rng& rng) {
    // PG(1, c) = J*(1, |c|/2) / 4
    const double z = 0.5 * std::abs(c);
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double p_tail = tail_mass(z);
    for (;;) {
        double x;
        if (uniform01(rng) < p_tail) {
            x = kTrunc + exponential1(rng) / fz;
        } else {
            x = truncated_inverse_gaussian(z, rng);
        }
        double s = series_term(0, x);
        const double y = uniform01(rng) * s;
        for (int n = 1;; ++n) {
            if (n % 2 == 1) {
                s -= series_term(n, x);
                if (y <= s) return 0.25 * x;
            } else {
                s += series_term(n, x);
                if (y > s) break;
            }
        }
    }
}

double pg_mean(double c) {
    if (std::abs(c) < 1e-6) return 0.25 - c * c / 48.0;
    return std::tanh(0.5 * c) / (2.0 * c);
}

double pg_variance(double c) {
    const double a = std::abs(c);
    if (a < 1e-3) return 1.0 / 24.0 - a * a / 120.0;
    const double ch = std::cosh(0.5 * a);
    return (std::sinh(a) - a) / (4.0 * a * a * a * ch * ch);
}

}  // namespace mixbn
