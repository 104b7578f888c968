#pragma once

// Reference computations used by the tests. None of them call into the
// library's numerical code.

#include "fkq/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace fkq::testing {

inline constexpr double kPhi = 1.6180339887498948482;

/// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  std::int64_t integer(std::int64_t a, std::int64_t b) {
    return std::uniform_int_distribution<std::int64_t>(a, b)(rng_);
  }
  Vec vec(int d, double a, double b) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = uniform(a, b);
    return v;
  }
  Vec unit(int d) {
    Vec v(d);
    std::normal_distribution<double> n;
    do {
      for (int k = 0; k < d; ++k) v[k] = n(rng_);
    } while (v.norm() < 1e-3);
    return v.normalized();
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Bisection root of f on [a, b]; f(a), f(b) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int k = 0; k < 200 && b - a > 0.0; ++k) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Maclaurin series, adequate for |x| <= 4.
inline double taylor_sin(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 40; ++k) {
    term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term;
  }
  return sum;
}

inline double taylor_cos(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -x * x / ((2.0 * k - 1.0) * (2.0 * k));
    sum += term;
  }
  return sum;
}

/// Central differences of a scalar field.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec a = x, b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central differences of a vector field, column k = d/dx_k.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  const Vec f0 = f(x);
  Mat j(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec a = x, b = x;
    a[k] += h;
    b[k] -= h;
    j.col(k) = (f(a) - f(b)) / (2.0 * h);
  }
  return j;
}

/// Fibonacci word by substitution L -> LS, S -> L, as gap lengths {phi, 1}.
inline std::vector<double> fibonacci_word_gaps(std::size_t count) {
  std::vector<char> w{'L'};
  while (w.size() < count) {
    std::vector<char> next;
    next.reserve(w.size() * 2);
    for (char c : w) {
      next.push_back('L');
      if (c == 'L') next.push_back('S');
    }
    w.swap(next);
  }
  std::vector<double> gaps;
  for (std::size_t k = 0; k < count; ++k) gaps.push_back(w[k] == 'L' ? kPhi : 1.0);
  return gaps;
}

/// Points x = phi n1 + n2 with n1 - phi n2 in (-phi, 1] and lo <= x <= hi,
/// by a direct double loop over a generous box.
inline std::vector<double> brute_fibonacci(double lo, double hi) {
  std::vector<double> xs;
  const auto reach = static_cast<std::int64_t>(std::ceil(std::max(std::abs(lo), std::abs(hi)))) + 4;
  for (std::int64_t n1 = -reach; n1 <= reach; ++n1)
    for (std::int64_t n2 = -reach; n2 <= reach; ++n2) {
      const double q = static_cast<double>(n1) - kPhi * static_cast<double>(n2);
      if (!(q > -kPhi && q <= 1.0)) continue;
      const double x = kPhi * static_cast<double>(n1) + static_cast<double>(n2);
      if (x >= lo && x <= hi) xs.push_back(x);
    }
  std::sort(xs.begin(), xs.end());
  return xs;
}

/// Integers (m, n) with |m + n phi - x| < tol, searching |n| <= reach.
inline std::optional<std::pair<std::int64_t, std::int64_t>> golden_decomposition(double x, std::int64_t reach,
                                                                                 double tol = 1e-9) {
  for (std::int64_t n = -reach; n <= reach; ++n) {
    const double m = std::round(x - kPhi * static_cast<double>(n));
    if (std::abs(m + kPhi * static_cast<double>(n) - x) < tol)
      return std::make_pair(static_cast<std::int64_t>(m), n);
  }
  return std::nullopt;
}

/// Damped Newton on the classical chain
///   u_{i+1} - 2 u_i + u_{i-1} - lambda sin u_i = 0
/// for the interior unknowns u_1..u_m, with u_0 = left and u_{m+1} = right
/// held fixed. Each linear step is a tridiagonal (Thomas) solve.
inline std::vector<double> fk_chain_newton(double lambda, std::vector<double> u, double left, double right,
                                           double tol = 1e-14, int max_iter = 200) {
  const std::size_t m = u.size();
  auto residual = [&](const std::vector<double>& v) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double a = i == 0 ? left : v[i - 1];
      const double b = i + 1 == m ? right : v[i + 1];
      f[i] = b - 2.0 * v[i] + a - lambda * std::sin(v[i]);
    }
    return f;
  };
  auto sup = [](const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::abs(v));
    return s;
  };
  std::vector<double> f = residual(u);
  for (int it = 0; it < max_iter && sup(f) > tol; ++it) {
    // J = tridiag(1, -2 - lambda cos u_i, 1); solve J d = -f.
    std::vector<double> c(m), d(m), diag(m);
    for (std::size_t i = 0; i < m; ++i) diag[i] = -2.0 - lambda * std::cos(u[i]);
    c[0] = 1.0 / diag[0];
    d[0] = -f[0] / diag[0];
    for (std::size_t i = 1; i < m; ++i) {
      const double den = diag[i] - c[i - 1];
      c[i] = 1.0 / den;
      d[i] = (-f[i] - d[i - 1]) / den;
    }
    for (std::size_t i = m - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    double t = 1.0;
    const double f0 = sup(f);
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      std::vector<double> trial(u);
      for (std::size_t i = 0; i < m; ++i) trial[i] += t * d[i];
      auto ft = residual(trial);
      if (sup(ft) < f0) {
        u.swap(trial);
        f.swap(ft);
        break;
      }
    }
    if (sup(f) >= f0) break;
  }
  return u;
}

}  // namespace fkq::testing
