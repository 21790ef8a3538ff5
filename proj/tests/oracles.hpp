#pragma once

// Slow, direct reimplementations used to cross-check the library. None of
// these call into mieeg numerics.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "mieeg/core.hpp"
#include "mieeg/features.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan with partial pivoting. Returns false for a singular matrix.
inline bool invert(Matrix a, Matrix& inv, double& det) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return false;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
      det = -det;
    }
    const double p = a[col][col];
    det *= p;
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return true;
}

// Dense Gaussian-class posterior: P(C_k | x) proportional to
// P(C_k) (2 pi)^(-d/2) |S_k|^(-1/2) exp(-(x - m_k)' S_k^-1 (x - m_k) / 2).
struct QdaClass {
  int code;
  double prior;
  std::vector<double> mean;
  Matrix cov;
};

inline std::vector<QdaClass> qda_fit(const std::vector<mieeg::FeatureVector>& data, double lambda) {
  std::map<int, std::vector<const mieeg::FeatureVector*>> groups;
  for (const auto& f : data) groups[mieeg::label_code(f.label)].push_back(&f);
  const std::size_t d = data.front().values.size();
  std::vector<QdaClass> out;
  for (const auto& [code, members] : groups) {
    QdaClass c{code, static_cast<double>(members.size()) / static_cast<double>(data.size()),
               std::vector<double>(d, 0.0), Matrix(d, std::vector<double>(d, 0.0))};
    for (const auto* f : members)
      for (std::size_t i = 0; i < d; ++i) c.mean[i] += f->values[i] / static_cast<double>(members.size());
    for (const auto* f : members)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          c.cov[i][j] += (f->values[i] - c.mean[i]) * (f->values[j] - c.mean[j]) / static_cast<double>(members.size());
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += c.cov[i][i];
    const double ridge = trace > 0.0 ? lambda * trace / static_cast<double>(d) : lambda;
    for (std::size_t i = 0; i < d; ++i) c.cov[i][i] += ridge;
    out.push_back(std::move(c));
  }
  return out;
}

inline std::array<double, mieeg::kNumClasses> qda_posteriors(const std::vector<QdaClass>& classes,
                                                             const std::vector<double>& x) {
  const std::size_t d = x.size();
  std::vector<double> joint;
  for (const auto& c : classes) {
    Matrix inv;
    double det = 0.0;
    invert(c.cov, inv, det);
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) q += (x[i] - c.mean[i]) * inv[i][j] * (x[j] - c.mean[j]);
    joint.push_back(c.prior * std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) / std::sqrt(det) *
                    std::exp(-0.5 * q));
  }
  double total = 0.0;
  for (double j : joint) total += j;
  std::array<double, mieeg::kNumClasses> post{};
  for (std::size_t k = 0; k < classes.size(); ++k) post[static_cast<std::size_t>(classes[k].code)] = joint[k] / total;
  return post;
}

// Exhaustive k-NN: sort every (distance, index) pair, vote, break ties.
inline int knn_label(const std::vector<mieeg::FeatureVector>& train, const std::vector<double>& x, std::size_t k,
                     bool cosine) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& p = train[i].values;
    double dist = 0.0;
    if (cosine) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        dot += x[j] * p[j];
        na += x[j] * x[j];
        nb += p[j] * p[j];
      }
      dist = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) dist += (x[j] - p[j]) * (x[j] - p[j]);
      dist = std::sqrt(dist);
    }
    all.emplace_back(dist, i);
  }
  std::sort(all.begin(), all.end());
  std::array<int, mieeg::kNumClasses> votes{};
  std::array<double, mieeg::kNumClasses> summed{};
  for (std::size_t n = 0; n < k; ++n) {
    const int c = mieeg::label_code(train[all[n].second].label);
    ++votes[static_cast<std::size_t>(c)];
    summed[static_cast<std::size_t>(c)] += all[n].first;
  }
  int best = -1;
  for (int c = 0; c < static_cast<int>(mieeg::kNumClasses); ++c) {
    const auto ci = static_cast<std::size_t>(c);
    if (votes[ci] == 0) continue;
    if (best < 0) {
      best = c;
      continue;
    }
    const auto bi = static_cast<std::size_t>(best);
    if (votes[ci] > votes[bi] || (votes[ci] == votes[bi] && summed[ci] < summed[bi])) best = c;
  }
  return best;
}

// O(n^2) one-sided DFT power.
inline std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n));
    out[k] = std::norm(acc);
  }
  return out;
}

// Magnitude of the digital Butterworth bandpass obtained by the bilinear
// transform of an order-n low-pass prototype, from the closed-form analog
// response at the pre-warped frequency.
inline double butterworth_bandpass_gain(double f, double lo, double hi, int n, double fs) {
  const auto warp = [fs](double hz) { return 2.0 * fs * std::tan(std::numbers::pi * hz / fs); };
  const double w = warp(f), wl = warp(lo), wh = warp(hi);
  if (w == 0.0) return 0.0;
  const double omega = (w * w - wl * wh) / (w * (wh - wl));
  return 1.0 / std::sqrt(1.0 + std::pow(omega * omega, n));
}

}  // namespace oracle
