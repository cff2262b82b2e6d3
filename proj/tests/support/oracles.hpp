#pragma once

// Reference implementations the library is checked against. Each one is
// written independently of the code under test: plain data structures, no
// shared helpers beyond the public types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hpcids/aes.hpp"
#include "hpcids/matrix.hpp"

namespace oracle {

// ---- LRU cache ----------------------------------------------------------

// One list per set, front = most recently used. Returns "H"/"M" per access.
class LruCache {
 public:
  LruCache(std::uint64_t capacity, std::uint64_t ways, std::uint64_t line)
      : ways_(ways), line_(line), sets_(capacity / (ways * line)), lists_(sets_) {}

  bool access(std::uint64_t addr) {
    const std::uint64_t tag = addr / line_;
    auto& set = lists_[tag % sets_];
    const auto it = std::find(set.begin(), set.end(), tag);
    if (it != set.end()) {
      set.erase(it);
      set.push_front(tag);
      return true;
    }
    set.push_front(tag);
    if (set.size() > ways_) set.pop_back();
    return false;
  }

  std::string trace(const std::vector<std::uint64_t>& addrs) {
    std::string out;
    for (auto a : addrs) out += access(a) ? 'H' : 'M';
    return out;
  }

 private:
  std::uint64_t ways_, line_, sets_;
  std::vector<std::list<std::uint64_t>> lists_;
};

// ---- AES-128 inverse cipher (test only) ----------------------------------

inline std::array<std::uint8_t, 256> inverse_sbox() {
  std::array<std::uint8_t, 256> inv{};
  for (int v = 0; v < 256; ++v) inv[hpcids::aes::kSbox[v]] = static_cast<std::uint8_t>(v);
  return inv;
}

inline hpcids::aes::Block decrypt(const hpcids::aes::AesState& aes, const hpcids::aes::Block& in) {
  using hpcids::aes::detail::gf_mul;
  static const auto inv_sbox = inverse_sbox();
  hpcids::aes::Block s = in;
  auto add_round_key = [&](int round) {
    for (int i = 0; i < 16; ++i) s[i] ^= aes.round_key(round, i);
  };
  auto inv_shift_rows = [&] {
    hpcids::aes::Block t = s;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
  };
  auto inv_sub_bytes = [&] {
    for (auto& b : s) b = inv_sbox[b];
  };
  auto inv_mix_columns = [&] {
    for (int c = 0; c < 4; ++c) {
      std::uint8_t a[4];
      for (int r = 0; r < 4; ++r) a[r] = s[4 * c + r];
      for (int r = 0; r < 4; ++r)
        s[4 * c + r] = static_cast<std::uint8_t>(gf_mul(a[r], 0x0E) ^ gf_mul(a[(r + 1) % 4], 0x0B) ^
                                                 gf_mul(a[(r + 2) % 4], 0x0D) ^ gf_mul(a[(r + 3) % 4], 0x09));
    }
  };
  add_round_key(hpcids::aes::kRounds);
  for (int round = hpcids::aes::kRounds - 1; round >= 1; --round) {
    inv_shift_rows();
    inv_sub_bytes();
    add_round_key(round);
    inv_mix_columns();
  }
  inv_shift_rows();
  inv_sub_bytes();
  add_round_key(0);
  return s;
}

// ---- One-class SVM dual by projected gradient ----------------------------

struct QpSolution {
  std::vector<double> alpha;
  std::vector<double> gradient;
  double objective = 0.0;
  double rho = 0.0;
};

inline std::vector<std::vector<double>> rbf_gram(const hpcids::Matrix& x, double gamma) {
  const std::size_t n = x.rows();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = x(i, k) - x(j, k);
        d2 += d * d;
      }
      q[i][j] = std::exp(-gamma * d2);
    }
  return q;
}

// Euclidean projection onto {0 <= a_i <= c, sum a_i = 1}: a_i = clamp(v_i - t)
// with t found by bisection on the monotone sum.
inline std::vector<double> project(const std::vector<double>& v, double c) {
  auto total = [&](double t) {
    double s = 0.0;
    for (double x : v) s += std::clamp(x - t, 0.0, c);
    return s;
  };
  double lo = *std::min_element(v.begin(), v.end()) - c - 1.0;
  double hi = *std::max_element(v.begin(), v.end()) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) > 1.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i] - t, 0.0, c);
  return out;
}

// FISTA with gradient-based restart on min 1/2 a'Qa over the capped simplex.
inline QpSolution solve_ocsvm_dual(const hpcids::Matrix& x, double nu, double gamma, int iterations = 20000) {
  const std::size_t n = x.rows();
  const auto q = rbf_gram(x, gamma);
  const double c = 1.0 / (nu * static_cast<double>(n));
  double lipschitz = 0.0;
  for (const auto& row : q) lipschitz = std::max(lipschitz, std::accumulate(row.begin(), row.end(), 0.0));
  const double step = 1.0 / lipschitz;

  auto grad = [&](const std::vector<double>& a) {
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] += q[i][j] * a[j];
    return g;
  };

  std::vector<double> a = project(std::vector<double>(n, 1.0 / n), c);
  std::vector<double> y = a;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const auto g = grad(y);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] - step * g[i];
    const auto next = project(v, c);
    double restart = 0.0;
    for (std::size_t i = 0; i < n; ++i) restart += g[i] * (next[i] - a[i]);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (restart > 0.0) {
      t = 1.0;
      y = next;
    } else {
      for (std::size_t i = 0; i < n; ++i) y[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - a[i]);
      t = t_next;
    }
    a = next;
  }

  QpSolution s;
  s.alpha = a;
  s.gradient = grad(a);
  for (std::size_t i = 0; i < n; ++i) s.objective += 0.5 * a[i] * s.gradient[i];
  // Offset: mean gradient over interior coefficients, else the midpoint of
  // the feasible interval.
  const double eps = 1e-7 * c;
  double sum = 0.0;
  std::size_t free = 0;
  double lb = -std::numeric_limits<double>::infinity(), ub = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > eps && a[i] < c - eps) {
      sum += s.gradient[i];
      ++free;
    } else if (a[i] >= c - eps) {
      lb = std::max(lb, s.gradient[i]);
    } else {
      ub = std::min(ub, s.gradient[i]);
    }
  }
  s.rho = free ? sum / free : (std::isfinite(lb) && std::isfinite(ub) ? 0.5 * (lb + ub) : std::isfinite(lb) ? lb : ub);
  return s;
}

inline double decision(const hpcids::Matrix& train, const QpSolution& s, double gamma, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    if (s.alpha[i] == 0.0) continue;
    double d2 = 0.0;
    for (std::size_t k = 0; k < train.cols(); ++k) {
      const double d = train(i, k) - p[k];
      d2 += d * d;
    }
    sum += s.alpha[i] * std::exp(-gamma * d2);
  }
  return sum - s.rho;
}

// ---- Data ------------------------------------------------------------------

inline hpcids::Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed, double mean = 0.0,
                               double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, sd);
  hpcids::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

}  // namespace oracle
