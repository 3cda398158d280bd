// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "swan/channel.hpp"
#include "swan/rng.hpp"

namespace swan {

struct MseReport {
  double mse = 0.0;
  Complex r_opt{};
  double signal_term = 0.0;  // P |sum h_k|^2
  double denom = 0.0;        // P sum |h_k|^2 + sigma^2
};

/// r* = sqrt(P) (sum h_k)^* / (P sum |h_k|^2 + sigma^2).
inline Complex optimal_scaling(std::span<const Complex> h, double p_tx, double noise_var) {
  Complex sum{};
  double energy = 0.0;
  for (const Complex& v : h) {
    sum += v;
    energy += std::norm(v);
  }
  return std::sqrt(p_tx) * std::conj(sum) / (p_tx * energy + noise_var);
}

/// sum_k |r sqrt(P) h_k - 1|^2 + |r|^2 sigma^2 for an arbitrary scaling r.
inline double mse_given_scaling(std::span<const Complex> h, Complex r, double p_tx, double noise_var) {
  const double sp = std::sqrt(p_tx);
  const double rr = r.real() * sp;
  const double ri = r.imag() * sp;
  double acc = 0.0;
  for (const Complex& v : h) {
    const double re = rr * v.real() - ri * v.imag() - 1.0;
    const double im = rr * v.imag() + ri * v.real();
    acc += re * re + im * im;
  }
  return acc + std::norm(r) * noise_var;
}

/// Minimum MSE K - P|sum h|^2 / (P sum|h|^2 + sigma^2) without the report.
inline double mse_min_value(std::span<const Complex> h, double p_tx, double noise_var) {
  double sr = 0.0, si = 0.0, energy = 0.0;
  for (const Complex& v : h) {
    sr += v.real();
    si += v.imag();
    energy += v.real() * v.real() + v.imag() * v.imag();
  }
  const double k = static_cast<double>(h.size());
  return std::max(0.0, k - p_tx * (sr * sr + si * si) / (p_tx * energy + noise_var));
}

inline MseReport mse_min(std::span<const Complex> h, double p_tx, double noise_var) {
  if (h.empty()) throw std::invalid_argument("mse_min: empty channel vector");
  Complex sum{};
  double energy = 0.0;
  for (const Complex& v : h) {
    sum += v;
    energy += std::norm(v);
  }
  MseReport rep;
  rep.signal_term = p_tx * std::norm(sum);
  rep.denom = p_tx * energy + noise_var;
  rep.mse = std::max(0.0, static_cast<double>(h.size()) - rep.signal_term / rep.denom);
  rep.r_opt = std::sqrt(p_tx) * std::conj(sum) / rep.denom;
  return rep;
}

struct EmpiricalMse {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Symbol-level Monte-Carlo estimate of E|r y - sum x_k|^2 with
/// x_k ~ CN(0, 1) i.i.d. and n ~ CN(0, sigma^2).
inline EmpiricalMse empirical_mse_stats(std::span<const Complex> h, double p_tx, double noise_var, Complex r,
                                        std::size_t n_trials, std::uint64_t seed) {
  if (n_trials == 0) throw std::invalid_argument("empirical_mse: n_trials must be >= 1");
  CounterRng rng(seed);
  const double sp = std::sqrt(p_tx);
  const double sym_sd = std::sqrt(0.5);
  const double noise_sd = std::sqrt(0.5 * noise_var);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    Complex y{};
    Complex target{};
    for (const Complex& hk : h) {
      const Complex x{sym_sd * rng.normal(), sym_sd * rng.normal()};
      y += sp * hk * x;
      target += x;
    }
    y += Complex{noise_sd * rng.normal(), noise_sd * rng.normal()};
    const double err = std::norm(r * y - target);
    sum += err;
    sum_sq += err * err;
  }
  const double n = static_cast<double>(n_trials);
  EmpiricalMse out;
  out.trials = n_trials;
  out.mean = sum / n;
  if (n_trials > 1) {
    const double var = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

inline double empirical_mse(std::span<const Complex> h, double p_tx, double noise_var, Complex r,
                            std::size_t n_trials, std::uint64_t seed) {
  return empirical_mse_stats(h, p_tx, noise_var, r, n_trials, seed).mean;
}

}  // namespace swan
