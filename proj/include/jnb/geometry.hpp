#pragma once

// Parabolic strip Omega_eps = { x1^2 <= x2 <= x1^2 + eps^2 }, its eps-regimes,
// the region decompositions used by the Bellman candidate, and the auxiliary
// constants beta, alpha, c, b.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jnb/errors.hpp"
#include "jnb/format.hpp"

namespace jnb {

/// Domain membership slack.
inline constexpr double kGeomTol = 1e-9;
/// Slack for closed-form algebraic identities.
inline constexpr double kIdentityTol = 1e-10;
/// Allowed gap between adjacent closed forms on a shared boundary.
inline constexpr double kGluingTol = 1e-9;

/// Bound on the BMO norm. Always finite and nonnegative.
class Epsilon {
 public:
  constexpr Epsilon() = default;
  explicit Epsilon(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
      throw DomainError("eps must be a finite number >= 0, got " + format_real(value));
    }
  }
  constexpr double value() const noexcept { return value_; }
  constexpr double squared() const noexcept { return value_ * value_; }

 private:
  double value_ = 0.0;
};

enum class Regime {
  Zero,        // eps = 0: the strip is the parabola
  SubHalf,     // 0 < eps < 1/2: four regions
  MidRange,    // 1/2 <= eps < 1: three regions
  Degenerate,  // eps >= 1: infinite off the parabola
};

constexpr Regime regime(Epsilon eps) noexcept {
  const double e = eps.value();
  if (e == 0.0) return Regime::Zero;
  if (e < 0.5) return Regime::SubHalf;
  if (e < 1.0) return Regime::MidRange;
  return Regime::Degenerate;
}

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Zero: return "zero";
    case Regime::SubHalf: return "sub-half";
    case Regime::MidRange: return "mid-range";
    case Regime::Degenerate: return "degenerate";
  }
  return "?";
}

/// Number of regions in the decomposition of Omega_eps (0 when there is none).
constexpr int region_count(Regime r) noexcept {
  return r == Regime::SubHalf ? 4 : r == Regime::MidRange ? 3 : 0;
}

/// First and second moments (<phi>, <phi^2>).
struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  constexpr Point mirrored() const noexcept { return {-x1, x2}; }
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

inline std::string to_string(Point p) {
  return "(" + format_real(p.x1) + ", " + format_real(p.x2) + ")";
}

/// x2 - x1^2: height above the lower parabola.
constexpr double height_above_parabola(Point p) noexcept { return p.x2 - p.x1 * p.x1; }

/// eps^2 + x1^2 - x2, grouped so that points on the parabola give exactly eps^2.
constexpr double beta_squared_raw(Epsilon eps, Point p) noexcept {
  return eps.squared() - height_above_parabola(p);
}

inline bool in_strip(Epsilon eps, Point p, double tol = kGeomTol) noexcept {
  const double h = height_above_parabola(p);
  return std::isfinite(p.x1) && std::isfinite(p.x2) && h >= -tol && h <= eps.squared() + tol;
}

inline bool on_parabola(Point p, double tol = kGeomTol) noexcept {
  return std::abs(height_above_parabola(p)) <= tol;
}

/// Throws DomainError naming the violated inequality.
inline void require_in_strip(Epsilon eps, Point p, double tol = kGeomTol) {
  if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) {
    throw DomainError("point " + to_string(p) + " is not finite");
  }
  const double h = height_above_parabola(p);
  if (h < -tol) {
    throw DomainError("point " + to_string(p) + " violates x1^2 <= x2 (below the parabola)");
  }
  if (h > eps.squared() + tol) {
    throw DomainError("point " + to_string(p) + " violates x2 <= x1^2 + eps^2 (above the strip, eps = " +
                      format_real(eps.value()) + ")");
  }
}

/// beta = sqrt(eps^2 + x1^2 - x2), clamped into [0, eps].
inline double beta_of(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  const double q = beta_squared_raw(eps, p);
  if (q <= 0.0) return 0.0;
  return std::min(std::sqrt(q), eps.value());
}

/// alpha = eps + eps/(1+eps) * log((1-eps)/(2 eps^2)), defined for eps in (0, 1/2].
inline double alpha_of(Epsilon eps) {
  const double e = eps.value();
  if (!(e > 0.0 && e <= 0.5)) {
    throw DomainError("alpha is defined for eps in (0, 1/2], got " + format_real(e));
  }
  return e + e / (1.0 + e) * std::log((1.0 - e) / (2.0 * e * e));
}

struct LinearCoefficients {
  double c = 0.0;
  double b = 0.0;
};

/// Coefficients of the linear piece on the middle region for eps in (0, 1/2).
inline LinearCoefficients cb_of(Epsilon eps) {
  const double e = eps.value();
  if (!(e > 0.0 && e < 0.5)) {
    throw DomainError("c and b are defined for eps in (0, 1/2), got " + format_real(e));
  }
  const double a = alpha_of(eps);
  const double ea = std::exp(a);
  const double tail = std::exp(-(a - e) / e + e);
  LinearCoefficients out;
  out.c = (1.0 - a) / (1.0 - e * e) * ea - (e + a) / (2.0 * e * (1.0 + e)) * tail;
  out.b = ea / (2.0 * (1.0 - e * e)) + tail / (4.0 * e * (1.0 + e));
  return out;
}

/// Per-eps constants of the four-region decomposition.
struct AuxParams {
  double eps = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double b = 0.0;
};

inline AuxParams aux_params(Epsilon eps) {
  const auto [c, b] = cb_of(eps);
  return {eps.value(), alpha_of(eps), c, b};
}

// ---------------------------------------------------------------------------
// Regions. Predicates describe closed sets; `tol` widens each inequality.

/// Does `p` satisfy the defining inequalities of region `index` (1-based)?
/// Points must already lie in the strip; the strip itself is checked too.
inline bool in_region(Epsilon eps, Point p, int index, double tol = kGeomTol) {
  if (!in_strip(eps, p, tol)) return false;
  const double e = eps.value();
  const double e2 = eps.squared();
  const double a = std::abs(p.x1);
  const double x2 = p.x2;

  switch (regime(eps)) {
    case Regime::SubHalf: {
      const double al = alpha_of(eps);
      // Chords tangent to the upper parabola at alpha-eps (left) and alpha+eps (right).
      const double left_chord = 2.0 * al * a - al * al - 2.0 * e * (a - al);
      const double right_chord = 2.0 * (al + e) * a - al * al - 2.0 * e * al;
      switch (index) {
        case 1:
          return x2 <= e2 + tol;
        case 2:
          return x2 >= e2 - tol && x2 <= al * al + tol && (a <= al - e || x2 <= left_chord + tol);
        case 3:
          return a >= al - e - tol && a <= al + e + tol &&
                 x2 >= 2.0 * al * a - al * al + std::abs(2.0 * e * (a - al)) - tol;
        case 4:
          return a >= al - tol && (a >= al + e || x2 <= right_chord + tol);
        default:
          return false;
      }
    }
    case Regime::MidRange: {
      const double floor = (1.0 - e) * (1.0 - e);
      const double slant = (1.0 + x2 - e2) / 2.0;
      switch (index) {
        case 1:
          return x2 <= floor + tol;
        case 2:
          return x2 >= floor - tol && x2 <= 1.0 + e2 + tol && a <= slant + tol;
        case 3:
          return x2 >= floor - tol && (x2 >= 1.0 + e2 || a >= slant - tol);
        default:
          return false;
      }
    }
    default:
      return false;
  }
}

/// Index of the region containing `p`; shared boundaries go to the smaller index.
inline int classify(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  const Regime r = regime(eps);
  const int n = region_count(r);
  if (n == 0) {
    throw DomainError("no region decomposition in the " + std::string(to_string(r)) + " regime (eps = " +
                      format_real(eps.value()) + ")");
  }
  for (int j = 1; j <= n; ++j) {
    if (in_region(eps, p, j)) return j;
  }
  throw InternalError("point " + to_string(p) + " is in no region for eps = " + format_real(eps.value()));
}

// ---------------------------------------------------------------------------
// Boundaries and foliation leaves (all straight segments).

struct Segment {
  Point from;
  Point to;

  constexpr Point at(double t) const noexcept {
    return {from.x1 + t * (to.x1 - from.x1), from.x2 + t * (to.x2 - from.x2)};
  }
};

/// Segment of the line tangent to the upper parabola at abscissa `w`,
/// between the abscissas `lo` and `hi`.
inline Segment tangent_segment(Epsilon eps, double w, double lo, double hi) noexcept {
  auto on_line = [&](double x1) { return Point{x1, 2.0 * w * x1 - w * w + eps.squared()}; };
  return {on_line(lo), on_line(hi)};
}

/// Shared boundary of regions `lower` and `lower + 1`.
struct RegionBoundary {
  int lower = 0;
  Segment segment;
  /// |x1| of the tangency point when the boundary lies on a tangent to the upper parabola.
  std::optional<double> touch;
};

/// Every shared boundary between consecutive regions, including mirror images in x1 < 0.
inline std::vector<RegionBoundary> region_boundaries(Epsilon eps) {
  std::vector<RegionBoundary> out;
  const double e = eps.value();
  const double e2 = eps.squared();
  auto mirror = [](Segment s) { return Segment{s.from.mirrored(), s.to.mirrored()}; };
  switch (regime(eps)) {
    case Regime::SubHalf: {
      const double al = alpha_of(eps);
      out.push_back({1, {{-e, e2}, {e, e2}}, std::nullopt});
      const Segment left{{al - e, (al - e) * (al - e) + e2}, {al, al * al}};
      const Segment right{{al, al * al}, {al + e, (al + e) * (al + e) + e2}};
      out.push_back({2, left, al - e});
      out.push_back({2, mirror(left), al - e});
      out.push_back({3, right, al + e});
      out.push_back({3, mirror(right), al + e});
      break;
    }
    case Regime::MidRange: {
      const double f = 1.0 - e;
      out.push_back({1, {{-f, f * f}, {f, f * f}}, std::nullopt});
      const Segment slant{{f, f * f}, {1.0, 1.0 + e2}};
      out.push_back({2, slant, 1.0});
      out.push_back({2, mirror(slant), 1.0});
      break;
    }
    default:
      throw DomainError("region boundaries need eps in (0, 1), got " + format_real(e));
  }
  return out;
}

/// A straight leaf of the foliation, tagged with the region it rules.
struct Leaf {
  int region = 0;
  Segment segment;
};

/// Sample of the ruling segments along which the candidate is linear
/// (horizontal chords in region 1, tangent fans elsewhere), `per_region` per family and side.
inline std::vector<Leaf> foliation_leaves(Epsilon eps, int per_region) {
  std::vector<Leaf> out;
  if (per_region < 2) per_region = 2;
  const double e = eps.value();
  const double e2 = eps.squared();
  auto both_sides = [&](int region, Segment s) {
    out.push_back({region, s});
    out.push_back({region, {s.from.mirrored(), s.to.mirrored()}});
  };
  auto frac = [&](int k) { return static_cast<double>(k) / (per_region - 1); };

  switch (regime(eps)) {
    case Regime::SubHalf: {
      const double al = alpha_of(eps);
      for (int k = 1; k < per_region; ++k) {
        const double x2 = e2 * frac(k);
        out.push_back({1, {{-std::sqrt(x2), x2}, {std::sqrt(x2), x2}}});
      }
      // Left tangents [(u-eps, (u-eps)^2+eps^2), (u, u^2)] for u in [eps, alpha].
      for (int k = 0; k < per_region; ++k) {
        const double u = e + (al - e) * frac(k);
        both_sides(2, tangent_segment(eps, u - e, u - e, u));
      }
      // Right tangents [(u, u^2), (u+eps, (u+eps)^2+eps^2)] for u in [alpha, alpha + 2 eps].
      for (int k = 0; k < per_region; ++k) {
        const double u = al + 2.0 * e * frac(k);
        both_sides(4, tangent_segment(eps, u + e, u, u + e));
      }
      break;
    }
    case Regime::MidRange: {
      const double f = 1.0 - e;
      for (int k = 1; k < per_region; ++k) {
        const double x2 = f * f * frac(k);
        out.push_back({1, {{-std::sqrt(x2), x2}, {std::sqrt(x2), x2}}});
      }
      for (int k = 0; k < per_region; ++k) {
        const double u = f + 2.0 * e * frac(k);
        both_sides(3, tangent_segment(eps, u + e, u, u + e));
      }
      break;
    }
    default:
      throw DomainError("foliation needs eps in (0, 1), got " + format_real(e));
  }
  return out;
}

}  // namespace jnb
