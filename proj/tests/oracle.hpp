#pragma once

// Independent reference computations for the tests: tanh-sinh quadrature of
// piecewise functions and a brute-force BMO search over grid intervals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "frozen_values.hpp"
#include "jnb/piecewise.hpp"

namespace jnb::oracle {

/// Integral of g over [l, r] (endpoint singularities allowed).
inline double integrate(const std::function<double(double)>& g, double l, double r) {
  if (!(r > l)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(g, l, r, 1e-14);
}

/// Integral of h(phi(t)) over [l, r], split at the piece breakpoints and at
/// the zeros of phi (so kinks of h at 0 sit on an endpoint).
inline double integrate_of(const PiecewiseLogAffine& f, const std::function<double(double)>& h, double l = 0.0,
                           double r = 1.0) {
  double sum = 0.0;
  for (const auto& raw : f.pieces()) {
    double lo = std::max(l, raw.a), hi = std::min(r, raw.b);
    if (!(hi > lo)) continue;
    // Reflect reversed pieces so the log singularity sits at t = 0, not at 1 - t.
    const Piece p = raw.as_forward();
    if (raw.reversed) std::tie(lo, hi) = std::pair{1.0 - hi, 1.0 - lo};
    std::vector<double> cuts{lo};
    if (p.c1 != 0.0) {
      const double zero = std::exp(-p.c0 / p.c1);
      if (zero > lo && zero < hi) cuts.push_back(zero);
    }
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      sum += integrate([&](double t) { return h(p(t)); }, cuts[i], cuts[i + 1]);
    }
  }
  return sum;
}

inline double mean(const PiecewiseLogAffine& f) {
  return integrate_of(f, [](double v) { return v; });
}
inline double second(const PiecewiseLogAffine& f) {
  return integrate_of(f, [](double v) { return v * v; });
}
inline double exp_abs(const PiecewiseLogAffine& f) {
  return integrate_of(f, [](double v) { return std::exp(std::abs(v)); });
}

/// max over grid intervals [i/n, j/n] of the standard deviation, from cell integrals by quadrature.
inline double brute_bmo(const PiecewiseLogAffine& f, int n) {
  std::vector<long double> s1(n + 1, 0), s2(n + 1, 0);
  for (int k = 0; k < n; ++k) {
    const double l = static_cast<double>(k) / n, r = static_cast<double>(k + 1) / n;
    s1[k + 1] = s1[k] + integrate_of(f, [](double v) { return v; }, l, r);
    s2[k + 1] = s2[k] + integrate_of(f, [](double v) { return v * v; }, l, r);
  }
  long double best = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const long double len = static_cast<long double>(j - i) / n;
      const long double m = (s1[j] - s1[i]) / len;
      best = std::max(best, (s2[j] - s2[i]) / len - m * m);
    }
  }
  return std::sqrt(static_cast<double>(best));
}

/// Random single piece on a random subinterval of [0, 1], |c1| < 1.
inline Piece random_piece(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-3) b = std::min(1.0, a + 1e-3);
  const int kind = static_cast<int>(rng() % 3);
  if (kind == 0) a = 0.0;  // piece touching the log singularity
  const double c0 = 4.0 * u(rng) - 2.0;
  const double c1 = kind == 2 ? 0.0 : 1.9 * u(rng) - 0.95;
  return Piece{a, b, c0, c1, rng() % 2 == 0};
}

}  // namespace jnb::oracle
