// Copyright 2026 The cmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations for the tests. Plain loops over std::vector,
// sharing no code with the library.

#ifndef CMIX_TESTS_ORACLES_HPP_
#define CMIX_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

// Centroid k = mean of support rows k*(M-1) .. k*(M-1)+M-2.
inline Matrix centroids(const Matrix& support, std::size_t n, std::size_t m) {
  Matrix c(n, std::vector<double>(support[0].size(), 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < m - 1; ++i)
      for (std::size_t d = 0; d < c[k].size(); ++d)
        c[k][d] += support[k * (m - 1) + i][d] / static_cast<double>(m - 1);
  return c;
}

inline Matrix similarity(const Matrix& query, const Matrix& cent, double w,
                         double b) {
  Matrix s(query.size(), std::vector<double>(cent.size()));
  for (std::size_t j = 0; j < query.size(); ++j)
    for (std::size_t k = 0; k < cent.size(); ++k)
      s[j][k] = w * cosine(query[j], cent[k]) + b;
  return s;
}

// log of the softmax probability of column `k` in row `row`, computed with
// long double for headroom.
inline long double log_prob(const std::vector<double>& row, std::size_t k) {
  long double z = 0.0L;
  for (double v : row) z += std::exp(static_cast<long double>(v));
  return static_cast<long double>(row[k]) - std::log(z);
}

inline double ap_loss(const Matrix& s) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < s.size(); ++j) acc -= log_prob(s[j], j);
  return static_cast<double>(acc / s.size());
}

inline double ce_mixup_loss(const Matrix& s, const std::vector<std::size_t>& r,
                            double lambda) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < s.size(); ++j)
    acc -= lambda * log_prob(s[j], j) + (1.0 - lambda) * log_prob(s[j], r[j]);
  return static_cast<double>(acc / s.size());
}

// d[j][k] from the definition: lambda on k == j, 1 - lambda on k == r[j],
// and 1 where both coincide.
inline Matrix label_weights(std::size_t n, const std::vector<std::size_t>& r,
                            double lambda) {
  Matrix d(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j && k == r[j]) d[j][k] = 1.0;
      else if (k == j) d[j][k] = lambda;
      else if (k == r[j]) d[j][k] = 1.0 - lambda;
    }
  }
  return d;
}

inline double contrastive_mixup_loss(const Matrix& s, const Matrix& d) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < s.size(); ++j) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const long double e = std::exp(static_cast<long double>(s[j][k]));
      num += d[j][k] * e;
      den += e;
    }
    acc -= std::log(num / den);
  }
  return static_cast<double>(acc / s.size());
}

struct Eer {
  double eer;
  double threshold;
};

// Tries every candidate threshold: -inf, each distinct score, +inf.
inline Eer brute_force_eer(const std::vector<double>& scores,
                           const std::vector<bool>& labels) {
  std::vector<double> cand = scores;
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  cand.insert(cand.begin(), -std::numeric_limits<double>::infinity());
  cand.push_back(std::numeric_limits<double>::infinity());
  double nt = 0, nn = 0;
  for (bool l : labels) (l ? nt : nn) += 1;
  Eer best{0.0, 0.0};
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : cand) {
    double fa = 0, fr = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!labels[i] && scores[i] >= t) fa += 1;
      if (labels[i] && scores[i] < t) fr += 1;
    }
    const double far = fa / nn, frr = fr / nt;
    if (std::abs(far - frr) < best_gap) {
      best_gap = std::abs(far - frr);
      best = {(far + frr) / 2.0, t};
    }
  }
  return best;
}

// |X_k| by direct summation.
inline std::vector<double> dft_magnitude(const std::vector<double>& x,
                                         std::size_t n_fft) {
  std::vector<double> out(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size() && t < n_fft; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t) /
                         static_cast<double>(n_fft);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = std::abs(acc);
  }
  return out;
}

// Upper-tail chi-square critical value by the Wilson-Hilferty
// approximation; z is the standard-normal quantile.
inline double chi_square_critical(double dof, double z) {
  const double h = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
}

}  // namespace oracle

#endif  // CMIX_TESTS_ORACLES_HPP_
