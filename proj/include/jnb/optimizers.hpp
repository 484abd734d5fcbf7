#pragma once

// Extremal functions: for each point of the strip, a BMO_eps function on [0,1]
// with the prescribed moments whose <e^|phi|> equals B_eps at that point.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jnb/bellman.hpp"
#include "jnb/errors.hpp"
#include "jnb/format.hpp"
#include "jnb/geometry.hpp"
#include "jnb/piecewise.hpp"

namespace jnb {

enum class Construction { Constant, TwoValuedStep, LogRamp, CompositeRamp, Splice, SpliceRearranged };

constexpr std::string_view to_string(Construction c) noexcept {
  switch (c) {
    case Construction::Constant: return "constant";
    case Construction::TwoValuedStep: return "two-valued-step";
    case Construction::LogRamp: return "log-ramp";
    case Construction::CompositeRamp: return "composite-ramp";
    case Construction::Splice: return "splice";
    case Construction::SpliceRearranged: return "splice-rearranged";
  }
  return "?";
}

struct OptimizerSpec {
  Epsilon eps;
  Point target;
  int region = 0;  // 0 when the regime has no region decomposition
  Construction construction = Construction::Constant;
  bool mirrored = false;  // built at (-x1, x2) and negated
};

/// Which construction synthesize() uses at p. Throws UnattainableError for
/// eps >= 1 off the parabola, where B is +inf.
inline OptimizerSpec plan(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  OptimizerSpec s{eps, p, 0, Construction::Constant, p.x1 < 0.0};
  const Regime r = regime(eps);
  if (r == Regime::Zero) return s;
  if (r == Regime::Degenerate) {
    if (on_parabola(p)) return s;
    throw UnattainableError("B is +inf at " + to_string(p) + " for eps = " + format_real(eps.value()) +
                            " >= 1, so no BMO_eps function attains it");
  }
  s.region = classify(eps, p);
  if (height_above_parabola(p) <= 0.0) return s;
  if (r == Regime::SubHalf) {
    constexpr Construction kByRegion[] = {Construction::TwoValuedStep, Construction::CompositeRamp,
                                          Construction::Splice, Construction::LogRamp};
    s.construction = kByRegion[s.region - 1];
  } else {
    constexpr Construction kByRegion[] = {Construction::TwoValuedStep, Construction::SpliceRearranged,
                                          Construction::LogRamp};
    s.construction = kByRegion[s.region - 1];
  }
  return s;
}

namespace detail {

/// v on [0, theta), -v on [theta, 1) with theta = (x1 + v) / (2v).
inline PiecewiseLogAffine step_pieces(double x1, double v) {
  if (!(v > 0.0)) return PiecewiseLogAffine::constant(x1);
  const double theta = std::clamp((x1 + v) / (2.0 * v), 0.0, 1.0);
  if (theta <= 0.0) return PiecewiseLogAffine::constant(-v);
  if (theta >= 1.0) return PiecewiseLogAffine::constant(v);
  return PiecewiseLogAffine({Piece{0.0, theta, v, 0.0, false}, Piece{theta, 1.0, -v, 0.0, false}});
}

/// eps log(h/t) + s on [0, h), s on [h, 1) with h = 1 - beta/eps and, unless given, s = x1 - eps h.
inline PiecewiseLogAffine log_ramp_pieces(double e, double x1, double beta, std::optional<double> s_fixed = {}) {
  const double h = std::clamp(1.0 - beta / e, 0.0, 1.0);
  const double s = s_fixed ? *s_fixed : x1 - e * h;
  if (h <= 0.0) return PiecewiseLogAffine::constant(s);
  const Piece ramp{0.0, h, s + e * std::log(h), -e, false};
  if (h >= 1.0) return PiecewiseLogAffine({ramp});
  return PiecewiseLogAffine({ramp, Piece{h, 1.0, s, 0.0, false}});
}

inline void require_nonnegative_x1(Point p, std::string_view who) {
  if (p.x1 < 0.0) throw DomainError(std::string(who) + " expects x1 >= 0, got " + to_string(p));
}

}  // namespace detail

/// Two-valued step +-sqrt(x2) with mean x1 (region 1).
inline PiecewiseLogAffine step_optimizer(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  const Regime r = regime(eps);
  if ((r == Regime::SubHalf || r == Regime::MidRange) && !in_region(eps, p, 1)) {
    throw DomainError("step optimizer needs a point of region 1, got " + to_string(p));
  }
  return detail::step_pieces(p.x1, std::sqrt(std::max(p.x2, 0.0)));
}

/// eps log(h/t) + s on [0, h), s after; non-increasing.
inline PiecewiseLogAffine log_ramp_optimizer(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  detail::require_nonnegative_x1(p, "log ramp optimizer");
  const Regime r = regime(eps);
  if (r == Regime::Zero) throw DomainError("log ramp optimizer needs eps > 0");
  if ((r == Regime::SubHalf && !in_region(eps, p, 4)) || (r == Regime::MidRange && !in_region(eps, p, 3))) {
    throw DomainError("log ramp optimizer needs a point of the outer region, got " + to_string(p));
  }
  return detail::log_ramp_pieces(eps.value(), p.x1, beta_of(eps, p));
}

/// Parameters of the four-piece function on region 2 (eps <= 1/2), with u1 = eps.
struct CompositeParams {
  double u1 = 0.0;
  double u = 0.0;
  double mu = 0.0;
  double nu = 1.0;
};

inline CompositeParams composite_params(Epsilon eps, Point p) {
  const double e = eps.value();
  const double beta = beta_of(eps, p);
  CompositeParams c;
  c.u1 = e;
  c.u = p.x1 + e - beta;
  c.mu = (e - beta) / e;
  if (c.u < c.u1 - kGeomTol) {
    throw DomainError("composite ramp needs u >= u1, got u = " + format_real(c.u) + " < " + format_real(c.u1));
  }
  c.u = std::max(c.u, c.u1);
  c.nu = std::exp((c.u1 - c.u) / e);
  return c;
}

/// u1-2eps on [0, mu nu/2), u1 on [mu nu/2, mu nu), u + eps log(t/mu) on [mu nu, mu), u on [mu, 1).
inline PiecewiseLogAffine composite_ramp_optimizer(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  detail::require_nonnegative_x1(p, "composite ramp optimizer");
  const double e = eps.value();
  if (!(e > 0.0 && e <= 0.5)) throw DomainError("composite ramp needs eps in (0, 1/2], got " + format_real(e));
  const bool inside = regime(eps) == Regime::SubHalf ? in_region(eps, p, 2)
                                                     : std::abs(p.x2 - eps.squared()) <= kGeomTol;
  if (!inside) throw DomainError("composite ramp needs a point of region 2, got " + to_string(p));

  const CompositeParams c = composite_params(eps, p);
  if (c.mu <= 0.0) return PiecewiseLogAffine::constant(c.u);
  const double t1 = c.mu * c.nu / 2.0;
  const double t2 = c.mu * c.nu;
  std::vector<Piece> pieces;
  auto add = [&](double a, double b, double c0, double c1) {
    if (a < b) pieces.push_back(Piece{a, b, c0, c1, false});
  };
  add(0.0, t1, c.u1 - 2.0 * e, 0.0);
  add(t1, t2, c.u1, 0.0);
  add(t2, c.mu, c.u - e * std::log(c.mu), e);
  add(c.mu, 1.0, c.u, 0.0);
  return PiecewiseLogAffine(std::move(pieces));
}

/// Cost f with derivative f' for the region-2 averaging formula.
struct CostFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  bool is_exp_abs = false;  // e^|t|: the kernel integral has a closed form

  static CostFunction exp_abs() {
    return {[](double t) { return std::exp(std::abs(t)); },
            [](double t) { return t > 0.0 ? std::exp(t) : t < 0.0 ? -std::exp(-t) : 0.0; }, true};
  }
  static CostFunction identity() {
    return {[](double t) { return t; }, [](double) { return 1.0; }, false};
  }
  static CostFunction constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, false};
  }
};

namespace detail {

/// int_{lo}^{hi} sign(s) e^{|s|} e^{(s-u)/eps} ds.
inline double exp_abs_kernel_integral(double e, double lo, double hi, double u) {
  double sum = 0.0;
  if (hi > 0.0) {
    const double a = std::max(lo, 0.0);
    const double k = (1.0 + e) / e;
    sum += (std::exp(k * hi - u / e) - std::exp(k * a - u / e)) / k;
  }
  if (lo < 0.0) {
    const double b = std::min(hi, 0.0);
    const double k = (1.0 - e) / e;
    if (std::abs(k) < 1e-12) {
      sum -= (b - lo) * std::exp(-u / e);
    } else {
      sum -= (std::exp(k * b - u / e) - std::exp(k * lo - u / e)) / k;
    }
  }
  return sum;
}

}  // namespace detail

/// <f(phi)> for the region-2 construction with parameters u1 <= u at mean x1:
/// (1/eps)[(f(u1) - f(u1-2eps))/2 e^{(u1-u)/eps} + int_{u1}^u f'(s) e^{(s-u)/eps} ds](x1 - u) + f(u).
inline double lemma75_functional(Epsilon eps, double u1, double u, double x1, const CostFunction& cost) {
  const double e = eps.value();
  if (!(e > 0.0)) throw DomainError("the averaging formula needs eps > 0");
  if (!(u >= u1)) {
    throw DomainError("precondition u >= u1 violated: u = " + format_real(u) + ", u1 = " + format_real(u1));
  }
  double integral = 0.0;
  if (u > u1) {
    if (cost.is_exp_abs) {
      integral = detail::exp_abs_kernel_integral(e, u1, u, u);
    } else {
      auto kernel = [&](double s) { return cost.df(s) * std::exp((s - u) / e); };
      integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(kernel, u1, u, 15, 1e-14);
    }
  }
  const double jump = (cost.f(u1) - cost.f(u1 - 2.0 * e)) / 2.0 * std::exp((u1 - u) / e);
  return (jump + integral) * (x1 - u) / e + cost.f(u);
}

/// Both halves of a splice and how they are combined: phi = concat(phi_y, phi_z, gamma).
struct SpliceParts {
  Point y;
  Point z;
  double gamma = 0.0;
  PiecewiseLogAffine phi_y;
  PiecewiseLogAffine phi_z;
};

namespace detail {

inline void require_terminal(const PiecewiseLogAffine& f, double expected, std::string_view which) {
  const double v = f(1.0);
  if (std::abs(v - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    throw InternalError(std::string(which) + "(1) = " + format_real(v) + " differs from " + format_real(expected));
  }
}

/// Region 3 for eps < 1/2: y on the right chord (log ramp), z on the left chord (composite ramp).
inline SpliceParts splice_sub_half(Epsilon eps, Point p) {
  const double e = eps.value();
  const double al = alpha_of(eps);
  const double beta = beta_of(eps, p);
  for (const double w : {p.x1 + beta, p.x1 - beta}) {
    if (w < al - e - kGeomTol || w > al + e + kGeomTol) continue;
    auto on_line = [&](double x) { return Point{x, 2.0 * w * x - w * w + eps.squared()}; };
    const Point z = on_line((w + al - e) / 2.0);
    const Point y = on_line((w + al + e) / 2.0);
    double gamma = (p.x1 - z.x1) / (y.x1 - z.x1);
    if (gamma < -kGeomTol || gamma > 1.0 + kGeomTol) continue;
    gamma = std::clamp(gamma, 0.0, 1.0);
    SpliceParts s{y, z, gamma, {}, {}};
    s.phi_y = log_ramp_pieces(e, y.x1, std::clamp(al + e - y.x1, 0.0, e));
    s.phi_z = composite_ramp_optimizer(eps, Point{z.x1, std::clamp(z.x2, z.x1 * z.x1, z.x1 * z.x1 + eps.squared())});
    require_terminal(s.phi_y, al, "phi_y");
    require_terminal(s.phi_z, al, "phi_z");
    return s;
  }
  throw InternalError("no tangent line through " + to_string(p) + " meets both chords of region 3");
}

/// Region 2 for 1/2 <= eps < 1: the tangent at w = x1 + beta cut by the region's boundary.
/// Endpoints on the floor x2 = (1-eps)^2 get a step; endpoints on the slanted sides a log ramp.
inline SpliceParts splice_mid_range(Epsilon eps, Point p) {
  const double e = eps.value();
  const double e2 = eps.squared();
  const double level = 1.0 - e;
  const double w = p.x1 + beta_of(eps, p);
  const double floor_x = (w * w - e2 + level * level) / (2.0 * w);

  SpliceParts s{};
  if (w >= 1.0 - 2.0 * e) {
    s.y = {(w + 1.0) / 2.0, w + e2};
    s.phi_y = log_ramp_pieces(e, s.y.x1, std::clamp(1.0 - s.y.x1, 0.0, e), level);
  } else {
    s.y = {floor_x, level * level};
    s.phi_y = step_pieces(floor_x, level);
  }
  if (w <= 2.0 * e - 1.0) {
    s.z = {(w - 1.0) / 2.0, e2 - w};
    s.phi_z = negate(log_ramp_pieces(e, -s.z.x1, std::clamp(1.0 + s.z.x1, 0.0, e), level));
  } else {
    s.z = {floor_x, level * level};
    s.phi_z = step_pieces(floor_x, level);
  }
  const double span = s.y.x1 - s.z.x1;
  s.gamma = span > 0.0 ? std::clamp((p.x1 - s.z.x1) / span, 0.0, 1.0) : 1.0;
  require_terminal(s.phi_y, s.phi_y(1.0) >= 0.0 ? level : -level, "|phi_y|");
  require_terminal(s.phi_z, s.phi_z(1.0) >= 0.0 ? level : -level, "|phi_z|");
  return s;
}

}  // namespace detail

/// Endpoints, weight and halves of the splice at p (x1 >= 0).
inline SpliceParts splice_parts(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  detail::require_nonnegative_x1(p, "splice optimizer");
  switch (regime(eps)) {
    case Regime::SubHalf:
      if (!in_region(eps, p, 3)) throw DomainError("splice needs a point of region 3, got " + to_string(p));
      return detail::splice_sub_half(eps, p);
    case Regime::MidRange:
      if (!in_region(eps, p, 2)) throw DomainError("splice needs a point of region 2, got " + to_string(p));
      return detail::splice_mid_range(eps, p);
    default:
      throw DomainError("splice needs eps in (0, 1), got " + format_real(eps.value()));
  }
}

/// Splice of the two halves; for 1/2 <= eps < 1 followed by the non-decreasing rearrangement.
inline PiecewiseLogAffine splice_optimizer(Epsilon eps, Point p) {
  const SpliceParts s = splice_parts(eps, p);
  PiecewiseLogAffine joined = concat(s.phi_y, s.phi_z, s.gamma);
  if (regime(eps) == Regime::SubHalf) return joined;
  if (auto exact = monotone_rearrange_exact(joined)) return *std::move(exact);
  return monotone_rearrange(joined);
}

struct SynthesisOptions {
  std::size_t bmo_grid = 256;
};

/// Tolerances of the attainment contract.
inline constexpr double kMomentTol = 1e-9;
inline constexpr double kAttainRelTol = 1e-6;
inline constexpr double kBmoSlack = 1e-4;

struct Synthesis {
  OptimizerSpec spec;
  PiecewiseLogAffine function;
  MomentReport report;
  double bellman = 0.0;
  double mean_error = 0.0;
  double second_error = 0.0;
  double exp_abs_rel_error = 0.0;
  double bmo_excess = 0.0;  // max(0, bmo_norm_lb - eps)

  bool verified() const noexcept {
    return mean_error <= kMomentTol && second_error <= kMomentTol && exp_abs_rel_error <= kAttainRelTol &&
           bmo_excess <= kBmoSlack;
  }
};

inline PiecewiseLogAffine build(const OptimizerSpec& spec) {
  const Point q = spec.mirrored ? spec.target.mirrored() : spec.target;
  PiecewiseLogAffine f;
  switch (spec.construction) {
    case Construction::Constant: f = PiecewiseLogAffine::constant(q.x1); break;
    case Construction::TwoValuedStep: f = step_optimizer(spec.eps, q); break;
    case Construction::LogRamp: f = log_ramp_optimizer(spec.eps, q); break;
    case Construction::CompositeRamp: f = composite_ramp_optimizer(spec.eps, q); break;
    case Construction::Splice:
    case Construction::SpliceRearranged: f = splice_optimizer(spec.eps, q); break;
  }
  return spec.mirrored ? negate(f) : f;
}

/// Extremal function at p together with its measured moments.
inline Synthesis synthesize(Epsilon eps, Point p, const SynthesisOptions& opt = {}) {
  Synthesis s{plan(eps, p), {}, {}, 0.0};
  s.function = build(s.spec);
  s.report = moment_report(s.function, opt.bmo_grid);
  s.bellman = eval(eps, p).value();
  s.mean_error = std::abs(s.report.mean - p.x1);
  s.second_error = std::abs(s.report.second - p.x2);
  s.exp_abs_rel_error = std::abs(s.report.exp_abs - s.bellman) / std::max(1.0, std::abs(s.bellman));
  s.bmo_excess = std::max(0.0, s.report.bmo_norm_lb - eps.value());
  return s;
}

}  // namespace jnb
