#pragma once

// Numerical certification: gluing continuity, C1 matching, local concavity,
// attainment by the synthesized optimizers, and a randomized upper-bound stress test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jnb/bellman.hpp"
#include "jnb/errors.hpp"
#include "jnb/geometry.hpp"
#include "jnb/optimizers.hpp"
#include "jnb/parallel.hpp"
#include "jnb/piecewise.hpp"
#include "jnb/sampling.hpp"

namespace jnb {

struct Offender {
  std::string label;
  Point p;
  double error = 0.0;
};

/// pass <=> worst <= tol. For checks with several components, each component's
/// error is rescaled by tol / (component tolerance) before taking the maximum;
/// the raw per-component maxima are listed in `metrics`.
struct CheckReport {
  std::string check;
  double eps = 0.0;
  std::size_t samples = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<Offender> offenders;
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const {
    for (const auto& [k, v] : metrics) {
      if (k == name) return v;
    }
    throw DomainError("report has no metric '" + name + "'");
  }
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // 0: hardware concurrency
};

inline constexpr double kC1Tol = 1e-6;
inline constexpr double kC1AnalyticTol = 1e-10;
inline constexpr double kC1InteriorTol = 1e-7;
inline constexpr double kStressTol = 1e-6;
/// Derivative checks skip points closer than this to (0, 0).
inline constexpr double kOriginExclusion = 1e-3;

namespace detail {

/// Running maximum plus the few largest offenders, merged in a fixed order.
class Worst {
 public:
  explicit Worst(std::size_t keep = 5) : keep_(keep) {}

  void add(double err, const std::string& label, Point p) {
    ++samples_;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    worst_ = std::max(worst_, err);
    if (err <= 0.0) return;
    if (top_.size() < keep_ || err > top_.back().error) {
      auto pos = std::upper_bound(top_.begin(), top_.end(), err,
                                  [](double e, const Offender& o) { return e > o.error; });
      top_.insert(pos, Offender{label, p, err});
      if (top_.size() > keep_) top_.pop_back();
    }
  }
  void add_component(double raw, double component_tol, double headline_tol, const std::string& label, Point p) {
    add(raw * headline_tol / component_tol, label, p);
  }
  void merge(const Worst& o) {
    samples_ += o.samples_;
    worst_ = std::max(worst_, o.worst_);
    for (const auto& off : o.top_) {
      if (top_.size() < keep_ || off.error > top_.back().error) {
        auto pos = std::upper_bound(top_.begin(), top_.end(), off.error,
                                    [](double e, const Offender& x) { return e > x.error; });
        top_.insert(pos, off);
        if (top_.size() > keep_) top_.pop_back();
      }
    }
  }
  void count_only(std::size_t n = 1) { samples_ += n; }

  double worst() const noexcept { return worst_; }
  std::size_t samples() const noexcept { return samples_; }

  CheckReport report(std::string name, Epsilon eps, double tol) const {
    CheckReport r;
    r.check = std::move(name);
    r.eps = eps.value();
    r.samples = samples_;
    r.worst = worst_;
    r.tol = tol;
    r.pass = worst_ <= tol;
    r.offenders = top_;
    return r;
  }

 private:
  std::size_t keep_;
  std::size_t samples_ = 0;
  double worst_ = 0.0;
  std::vector<Offender> top_;
};

inline void require_open_unit(Epsilon eps, const char* check) {
  const double e = eps.value();
  if (!(e > 0.0 && e < 1.0)) {
    throw DomainError(std::string(check) + " needs eps in (0, 1), got " + format_real(e));
  }
}

inline std::string pair_label(int lower) {
  return "g" + std::to_string(lower) + "|g" + std::to_string(lower + 1);
}

inline double scale_of(double v) { return std::max(1.0, std::abs(v)); }

// Finite differences in x2 ------------------------------------------------

template <class G>
double central_richardson(G&& g, double x, double h) {
  auto d = [&](double s) { return (g(x + s) - g(x - s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

/// One-sided, eliminating the h and h^2 error terms.
template <class G>
double one_sided_richardson(G&& g, double x, double h, int dir) {
  const double g0 = g(x);
  auto d = [&](double s) { return (g(x + dir * s) - g0) / (dir * s); };
  const double t0 = d(h), t1 = d(h / 2.0), t2 = d(h / 4.0);
  return (4.0 * (2.0 * t2 - t1) - (2.0 * t1 - t0)) / 3.0;
}

/// One-sided for expansions in powers of sqrt(h), as at the upper boundary
/// where the candidate depends on beta = sqrt(eps^2 + x1^2 - x2).
template <class G>
double half_power_richardson(G&& g, double x, double h, int dir) {
  const double g0 = g(x);
  double t[4][4];
  for (int k = 0; k < 4; ++k) {
    const double s = h / std::pow(4.0, k);
    t[k][0] = (g(x + dir * s) - g0) / (dir * s);
    for (int j = 1; j <= k; ++j) {
      const double f = std::pow(2.0, j);
      t[k][j] = (f * t[k][j - 1] - t[k - 1][j - 1]) / (f - 1.0);
    }
  }
  return t[3][3];
}

enum class Shape { Sqrt, Linear, BetaRoot };

inline Shape shape_of(const Candidate& c, int region) {
  if (region == 1) return Shape::Sqrt;
  const bool linear = (c.regime() == Regime::SubHalf && region == 3) || (c.regime() == Regime::MidRange && region == 2);
  return linear ? Shape::Linear : Shape::BetaRoot;
}

/// Numerical d g_region / d x2 at p. Stencils stay inside the strip. With
/// `interior_only`, only central stencils well away from the upper boundary
/// are accepted. nullopt when no reliable stencil exists.
inline std::optional<double> fd_dx2(const Candidate& c, int region, Point p, bool interior_only) {
  constexpr double h = 1e-6;
  auto g = [&](double x2) { return c.value(region, Point{p.x1, x2}); };
  const double up = c.eps().squared() - height_above_parabola(p);
  const double lo = height_above_parabola(p);
  switch (shape_of(c, region)) {
    case Shape::Sqrt:
      if (!(p.x2 > 0.0)) return std::nullopt;
      return central_richardson(g, p.x2, std::min(h, p.x2 / 64.0));
    case Shape::Linear:
      if (up >= h && lo >= h) return central_richardson(g, p.x2, h);
      if (interior_only) return std::nullopt;
      return one_sided_richardson(g, p.x2, h, up >= h ? 1 : -1);
    case Shape::BetaRoot:
      if (up >= 64.0 * h && lo >= h) return central_richardson(g, p.x2, h);
      if (interior_only) return std::nullopt;
      if (up >= 64.0 * h) return one_sided_richardson(g, p.x2, h, 1);
      if (up <= 1e-12 && lo >= 1e-4) return half_power_richardson(g, p.x2, 1e-4, -1);
      return std::nullopt;
  }
  return std::nullopt;
}

inline bool near_origin(Point p) { return std::hypot(p.x1, p.x2) < kOriginExclusion; }

}  // namespace detail

/// Adjacent closed forms agree on every shared boundary.
inline CheckReport check_gluing(Epsilon eps, std::size_t per_boundary = 1000) {
  detail::require_open_unit(eps, "check_gluing");
  const Candidate c(eps);
  detail::Worst w;
  const std::size_t n = std::max<std::size_t>(per_boundary, 2);
  std::vector<double> pair_max(static_cast<std::size_t>(c.regions()), 0.0);
  const auto boundaries = region_boundaries(eps);
  for (const auto& b : boundaries) {
    for (std::size_t k = 0; k < n; ++k) {
      const Point p = b.segment.at(static_cast<double>(k) / static_cast<double>(n - 1));
      const double gap = std::abs(c.value(b.lower, p) - c.value(b.lower + 1, p));
      pair_max[b.lower] = std::max(pair_max[b.lower], gap);
      w.add(gap, detail::pair_label(b.lower), p);
    }
  }
  CheckReport r = w.report("gluing", eps, kGluingTol);
  r.metrics.emplace_back("boundaries", static_cast<double>(boundaries.size()));
  for (int j = 1; j < c.regions(); ++j) r.metrics.emplace_back("max_gap_" + detail::pair_label(j), pair_max[j]);
  return r;
}

/// d/dx2 matching across boundaries, and analytic derivatives against finite differences.
inline CheckReport check_c1(Epsilon eps, std::size_t per_boundary = 1000, std::size_t interior = 10000,
                            const VerifyOptions& opt = {}) {
  detail::require_open_unit(eps, "check_c1");
  const Candidate c(eps);
  detail::Worst total;
  double raw_analytic = 0.0, raw_boundary_fd = 0.0, raw_interior = 0.0, raw_edge = 0.0;
  std::size_t skipped = 0;
  const std::size_t n = std::max<std::size_t>(per_boundary, 2);

  for (const auto& b : region_boundaries(eps)) {
    for (std::size_t k = 0; k < n; ++k) {
      const Point p = b.segment.at(static_cast<double>(k) / static_cast<double>(n - 1));
      if (detail::near_origin(p)) continue;
      const double beta = b.touch ? std::min(std::abs(std::abs(p.x1) - *b.touch), eps.value()) : c.beta_unchecked(p);
      const double da = c.d_dx2(b.lower, p, beta);
      const double db = c.d_dx2(b.lower + 1, p, beta);
      const double err_a = std::abs(da - db) / detail::scale_of(da);
      raw_analytic = std::max(raw_analytic, err_a);
      total.add_component(err_a, kC1AnalyticTol, kC1Tol, "analytic " + detail::pair_label(b.lower), p);

      const auto fa = detail::fd_dx2(c, b.lower, p, false);
      const auto fb = detail::fd_dx2(c, b.lower + 1, p, false);
      if (!fa || !fb) {
        ++skipped;
        continue;
      }
      const double err_fd =
          std::max({std::abs(*fa - *fb), std::abs(*fa - da), std::abs(*fb - db)}) / detail::scale_of(da);
      raw_boundary_fd = std::max(raw_boundary_fd, err_fd);
      total.add_component(err_fd, kC1Tol, kC1Tol, "fd " + detail::pair_label(b.lower), p);
    }
  }

  // Upper boundary x2 = x1^2 + eps^2, where the formulas depend on sqrt of the distance.
  const double ext = sampling_extent(eps);
  for (std::size_t k = 0; k < n; ++k) {
    const double x1 = -ext + 2.0 * ext * static_cast<double>(k) / static_cast<double>(n - 1);
    const Point p{x1, x1 * x1 + eps.squared()};
    if (detail::near_origin(p)) continue;
    const int j = classify(eps, p);
    const auto fd = detail::fd_dx2(c, j, p, false);
    if (!fd) {
      ++skipped;
      continue;
    }
    const double d = c.d_dx2(j, p);
    const double err = std::abs(*fd - d) / detail::scale_of(d);
    raw_edge = std::max(raw_edge, err);
    total.add_component(err, kC1Tol, kC1Tol, "edge g" + std::to_string(j), p);
  }

  // Interior points: analytic formula against central differences.
  struct Part {
    detail::Worst w;
    double raw = 0.0;
    std::size_t skipped = 0;
  };
  const std::size_t chunks = chunk_count(interior);
  auto parts = parallel_map(chunks, opt.jobs, [&](std::size_t ci) {
    Part part;
    auto rng = chunk_rng(opt.seed, ci);
    const std::size_t count = std::min(kChunkSize, interior - ci * kChunkSize);
    for (std::size_t i = 0; i < count; ++i) {
      const Point p = strip_point(eps, uniform(rng, -ext, ext), uniform(rng, 0.0, 1.0));
      if (detail::near_origin(p)) {
        ++part.skipped;
        continue;
      }
      const int j = classify(eps, p);
      const auto fd = detail::fd_dx2(c, j, p, true);
      if (!fd) {
        ++part.skipped;
        continue;
      }
      const double d = c.d_dx2(j, p);
      const double err = std::abs(*fd - d) / detail::scale_of(d);
      part.raw = std::max(part.raw, err);
      part.w.add_component(err, kC1InteriorTol, kC1Tol, "interior g" + std::to_string(j), p);
    }
    return part;
  });
  for (const auto& part : parts) {
    total.merge(part.w);
    raw_interior = std::max(raw_interior, part.raw);
    skipped += part.skipped;
  }

  CheckReport r = total.report("c1", eps, kC1Tol);
  r.metrics = {{"analytic_max", raw_analytic},         {"analytic_tol", kC1AnalyticTol},
               {"boundary_fd_max", raw_boundary_fd},    {"upper_edge_fd_max", raw_edge},
               {"interior_fd_max", raw_interior},       {"interior_fd_tol", kC1InteriorTol},
               {"skipped", static_cast<double>(skipped)}};
  return r;
}

/// Second-derivative sign conditions plus midpoint concavity on random segments inside the strip.
inline CheckReport check_concavity(Epsilon eps, std::size_t n_segments = 100000, const VerifyOptions& opt = {}) {
  detail::require_open_unit(eps, "check_concavity");
  const double e = eps.value();
  const Bellman bell(eps);
  detail::Worst total;
  double raw_hessian = 0.0, raw_g2 = 0.0;

  // g1'' <= 0 on region 1.
  const double x2_max = regime(eps) == Regime::SubHalf ? eps.squared() : (1.0 - e) * (1.0 - e);
  for (int k = 1; k <= 1000; ++k) {
    const double x2 = x2_max * k / 1000.0;
    const double v = std::max(0.0, g1_d2_dx2(x2));
    raw_hessian = std::max(raw_hessian, v);
    total.add(v, "g1''", Point{0.0, x2});
  }

  // exp{(x1 - beta)(1+eps)/eps} <= (1-eps)/(2 eps^2) on region 2, x1 >= 0.
  if (regime(eps) == Regime::SubHalf) {
    const double rhs = (1.0 - e) / (2.0 * e * e);
    for (Point p : region_points(eps, 2, 1000)) {
      p.x1 = std::abs(p.x1);
      const double lhs = std::exp((p.x1 - beta_of(eps, p)) * (1.0 + e) / e);
      const double v = std::max(0.0, lhs - rhs) / std::max(1.0, rhs);
      raw_g2 = std::max(raw_g2, v);
      total.add(v, "g2 condition", p);
    }
  }

  const double ext = sampling_extent(eps);
  struct Part {
    detail::Worst w;
    std::size_t attempts = 0;
  };
  auto parts = parallel_map(chunk_count(n_segments), opt.jobs, [&](std::size_t ci) {
    Part part;
    auto rng = chunk_rng(opt.seed, ci);
    const std::size_t want = std::min(kChunkSize, n_segments - ci * kChunkSize);
    std::size_t got = 0;
    while (got < want) {
      if (++part.attempts > 1000 * kChunkSize) throw InternalError("segment sampler made no progress");
      const Point p = strip_point(eps, uniform(rng, -ext, ext), uniform(rng, 0.0, 1.0));
      const double reach = 2.0 * e * std::pow(10.0, -uniform(rng, 0.0, 2.0));
      const Point q = strip_point(eps, p.x1 + uniform(rng, -reach, reach), uniform(rng, 0.0, 1.0));
      auto at = [&](double t) { return Point{p.x1 + t * (q.x1 - p.x1), p.x2 + t * (q.x2 - p.x2)}; };
      bool inside = in_strip(eps, at(0.5));
      for (int k = 1; k <= 64 && inside; ++k) inside = in_strip(eps, at(k / 65.0));
      if (!inside) continue;
      ++got;
      const double bp = bell(p).value(), bq = bell(q).value(), bm = bell(at(0.5)).value();
      const double v = std::max(0.0, (bp + bq) / 2.0 - bm) / std::max(1.0, std::abs(bp) + std::abs(bq));
      part.w.add(v, "midpoint", at(0.5));
    }
    return part;
  });
  std::size_t attempts = 0;
  detail::Worst mid;
  for (const auto& part : parts) {
    mid.merge(part.w);
    attempts += part.attempts;
  }
  total.merge(mid);

  CheckReport r = total.report("concavity", eps, kConcavityTol);
  r.metrics = {{"g1_hessian_max", raw_hessian},
               {"g2_condition_max", raw_g2},
               {"midpoint_max", mid.worst()},
               {"segments", static_cast<double>(mid.samples())},
               {"segment_attempts", static_cast<double>(attempts)}};
  return r;
}

struct AttainmentOptions {
  std::size_t points_per_region = 200;
  std::size_t bmo_grid = 64;
};

/// Synthesize at quasi-random points of every region and compare with B.
/// Headline: relative error of <e^|phi|>, tolerance 1e-6; moment errors are
/// weighted by 1e-6/1e-9 and BMO excess by 1e-6/1e-4.
inline CheckReport check_attainment(Epsilon eps, const AttainmentOptions& ao = {}, const VerifyOptions& opt = {}) {
  std::vector<Point> points;
  std::vector<std::string> labels;
  const Regime r = regime(eps);
  if (r == Regime::SubHalf || r == Regime::MidRange) {
    for (int j = 1; j <= region_count(r); ++j) {
      for (const Point& p : region_points(eps, j, ao.points_per_region)) {
        points.push_back(p);
        labels.push_back("region " + std::to_string(j));
      }
    }
    points.push_back({0.0, eps.squared()});
    labels.push_back("sharp point");
  }
  for (int k = 0; k <= 10; ++k) {
    const double x1 = -2.0 + 0.4 * k;
    points.push_back({x1, x1 * x1});
    labels.push_back("parabola");
  }
  std::size_t unattainable_expected = 0;
  if (r == Regime::Degenerate) {
    for (int k = 0; k < 10; ++k) {
      const double x1 = -1.0 + 0.2 * k;
      points.push_back(strip_point(eps, x1, 0.1 + 0.09 * k));
      labels.push_back("off-parabola");
      ++unattainable_expected;
    }
  }

  struct Result {
    double rel = 0.0, moment = 0.0, bmo = 0.0;
    bool threw_unattainable = false;
  };
  SynthesisOptions so;
  so.bmo_grid = ao.bmo_grid;
  auto results = parallel_map(points.size(), opt.jobs, [&](std::size_t i) {
    Result res;
    try {
      const Synthesis s = synthesize(eps, points[i], so);
      res.rel = s.exp_abs_rel_error;
      res.moment = std::max(s.mean_error, s.second_error);
      res.bmo = s.bmo_excess;
    } catch (const UnattainableError&) {
      res.threw_unattainable = true;
    }
    return res;
  });

  detail::Worst w;
  double max_rel = 0.0, max_moment = 0.0, max_bmo = 0.0;
  std::size_t unattainable = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Result& res = results[i];
    const bool expect_throw = labels[i] == "off-parabola";
    if (res.threw_unattainable || expect_throw) {
      const bool ok = res.threw_unattainable && expect_throw && !eval(eps, points[i]).is_finite();
      unattainable += res.threw_unattainable ? 1 : 0;
      w.add(ok ? 0.0 : std::numeric_limits<double>::infinity(), labels[i], points[i]);
      continue;
    }
    max_rel = std::max(max_rel, res.rel);
    max_moment = std::max(max_moment, res.moment);
    max_bmo = std::max(max_bmo, res.bmo);
    const double err = std::max({res.rel, res.moment * (kAttainRelTol / kMomentTol), res.bmo * (kAttainRelTol / kBmoSlack)});
    w.add(err, labels[i], points[i]);
  }
  CheckReport rep = w.report("attainment", eps, kAttainRelTol);
  rep.metrics = {{"max_rel_error", max_rel},
                 {"max_moment_error", max_moment},
                 {"max_bmo_excess", max_bmo},
                 {"unattainable", static_cast<double>(unattainable)},
                 {"unattainable_expected", static_cast<double>(unattainable_expected)},
                 {"bmo_grid", static_cast<double>(ao.bmo_grid)}};
  return rep;
}

struct StressOptions {
  std::size_t trials = 10000;
  int pieces_max = 6;
  std::size_t bmo_grid = 32;
};

/// Random step functions rescaled onto the BMO_eps sphere never beat the bounds.
inline CheckReport stress_upper_bound(Epsilon eps, const StressOptions& so = {}, const VerifyOptions& opt = {}) {
  detail::require_open_unit(eps, "stress_upper_bound");
  if (so.pieces_max < 1) throw DomainError("stress_upper_bound needs pieces_max >= 1");
  const double e = eps.value();
  const double sharp = sharp_constant(eps).value();
  const Bellman bell(eps);

  struct Part {
    detail::Worst w;
    double best_ratio = 0.0;
    std::size_t violations = 0;
  };
  auto parts = parallel_map(chunk_count(so.trials), opt.jobs, [&](std::size_t ci) {
    Part part;
    auto rng = chunk_rng(opt.seed, ci);
    const std::size_t count = std::min(kChunkSize, so.trials - ci * kChunkSize);
    std::uniform_int_distribution<int> n_pieces(1, so.pieces_max);
    for (std::size_t i = 0; i < count; ++i) {
      const int k = n_pieces(rng);
      std::vector<double> cuts(static_cast<std::size_t>(k - 1));
      for (auto& t : cuts) t = uniform(rng, 0.0, 1.0);
      std::sort(cuts.begin(), cuts.end());
      std::vector<Piece> pieces;
      double a = 0.0;
      for (int j = 0; j < k; ++j) {
        const double b = j + 1 < k ? cuts[static_cast<std::size_t>(j)] : 1.0;
        const double v = uniform(rng, -3.0, 3.0);
        if (b > a) pieces.push_back(Piece{a, b, v, 0.0, false});
        a = std::max(a, b);
      }
      const PiecewiseLogAffine raw(std::move(pieces));
      const double shift_by = uniform(rng, -2.0, 2.0);
      const double norm = bmo_norm_estimate(raw, so.bmo_grid);
      if (!(norm > 1e-12)) {
        part.w.add(0.0, "constant", Point{});
        continue;
      }
      const PiecewiseLogAffine f = scale(raw, e / norm);
      const double m = mean_on(f);
      const PiecewiseLogAffine centered = shift(f, -m);
      const double lhs_sharp = exp_abs_moment(centered);

      const PiecewiseLogAffine moved = shift(centered, shift_by);
      Point p{mean_on(moved), second_moment_on(moved)};
      p.x2 = std::clamp(p.x2, p.x1 * p.x1, p.x1 * p.x1 + eps.squared());
      const double bound = bell(p).value();
      const double lhs_point = exp_abs_moment(moved);

      const double excess = std::max(lhs_sharp - sharp, lhs_point - bound);
      part.best_ratio = std::max({part.best_ratio, lhs_sharp / sharp, lhs_point / bound});
      if (excess > kStressTol) ++part.violations;
      part.w.add(std::max(0.0, excess), lhs_sharp - sharp >= lhs_point - bound ? "sharp bound" : "pointwise bound", p);
    }
    return part;
  });

  detail::Worst w;
  double best_ratio = 0.0;
  std::size_t violations = 0;
  for (const auto& part : parts) {
    w.merge(part.w);
    best_ratio = std::max(best_ratio, part.best_ratio);
    violations += part.violations;
  }
  CheckReport r = w.report("stress", eps, kStressTol);
  r.metrics = {{"best_ratio", best_ratio},
               {"violations", static_cast<double>(violations)},
               {"pieces_max", static_cast<double>(so.pieces_max)},
               {"sharp_constant", sharp}};
  return r;
}

}  // namespace jnb
