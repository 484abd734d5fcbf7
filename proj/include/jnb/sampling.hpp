#pragma once

// Deterministic random and quasi-random points of the strip.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "jnb/errors.hpp"
#include "jnb/geometry.hpp"

namespace jnb {

/// Samples per independently seeded chunk.
inline constexpr std::size_t kChunkSize = 1024;

/// Generator for chunk `chunk` of a run seeded with `seed`.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Additive recurrence in [0,1)^2 with the plastic-number increments.
inline std::pair<double, double> r2_point(std::uint64_t n) {
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  const double k = static_cast<double>(n);
  return {std::fmod(0.5 + a1 * k, 1.0), std::fmod(0.5 + a2 * k, 1.0)};
}

/// Half-width of the x1 window that contains every region's interesting part.
inline double sampling_extent(Epsilon eps) {
  const double e = eps.value();
  switch (regime(eps)) {
    case Regime::SubHalf: return alpha_of(eps) + 2.0 * e;
    case Regime::MidRange: return 1.0 + 2.0 * e;
    default: return 2.0;
  }
}

/// Point with |x1| <= extent and height eps^2 * v above the parabola.
inline Point strip_point(Epsilon eps, double x1, double v) { return {x1, x1 * x1 + eps.squared() * v}; }

/// Range of |x1| over region `index`, clipped to the sampling window.
inline std::pair<double, double> region_x1_range(Epsilon eps, int index) {
  const double e = eps.value();
  const double ext = sampling_extent(eps);
  if (regime(eps) == Regime::SubHalf) {
    const double al = alpha_of(eps);
    switch (index) {
      case 1: return {0.0, e};
      case 2: return {0.0, al};
      case 3: return {al - e, al + e};
      case 4: return {al, ext};
    }
  } else if (regime(eps) == Regime::MidRange) {
    switch (index) {
      case 1: return {0.0, 1.0 - e};
      case 2: return {0.0, 1.0};
      case 3: return {1.0 - e, ext};
    }
  }
  throw DomainError("no region " + std::to_string(index) + " for eps = " + format_real(e));
}

/// n quasi-random points of region `index`; odd-numbered points are mirrored to x1 < 0.
inline std::vector<Point> region_points(Epsilon eps, int index, std::size_t n, std::uint64_t offset = 0) {
  const auto [lo, hi] = region_x1_range(eps, index);
  std::vector<Point> out;
  out.reserve(n);
  const std::uint64_t budget = 4096 + 1000 * static_cast<std::uint64_t>(n);
  for (std::uint64_t k = offset; out.size() < n; ++k) {
    if (k - offset > budget) throw InternalError("region sampler exhausted its budget for region " + std::to_string(index));
    const auto [u, v] = r2_point(k);
    Point p = strip_point(eps, lo + (hi - lo) * u, v);
    if (classify(eps, p) != index) continue;
    if (out.size() % 2 == 1) p = p.mirrored();
    out.push_back(p);
  }
  return out;
}

}  // namespace jnb
