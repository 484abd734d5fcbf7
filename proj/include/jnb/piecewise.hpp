#pragma once

// Piecewise log-affine functions on [0,1]: phi(t) = c0 + c1 log t on each piece,
// or c0 + c1 log(1-t) for reversed pieces. Moments and <e^|phi|> are exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jnb/errors.hpp"
#include "jnb/format.hpp"

namespace jnb {

/// Shortest interval the moment functions accept.
inline constexpr double kLengthTol = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  constexpr double length() const noexcept { return hi - lo; }
};

/// One piece on [a, b). A reversed piece is c0 + c1 log(1-t).
struct Piece {
  double a = 0.0;
  double b = 1.0;
  double c0 = 0.0;
  double c1 = 0.0;
  bool reversed = false;

  bool is_constant() const noexcept { return c1 == 0.0; }

  double operator()(double t) const noexcept {
    if (c1 == 0.0) return c0;
    return c0 + c1 * std::log(reversed ? 1.0 - t : t);
  }

  /// The same values as a forward piece, up to a measure-preserving reflection t -> 1-t.
  Piece as_forward() const noexcept {
    if (!reversed) return *this;
    return Piece{1.0 - b, 1.0 - a, c0, c1, false};
  }

  /// Limits of phi at the two ends of the piece (may be infinite).
  std::pair<double, double> end_values() const noexcept {
    if (c1 == 0.0) return {c0, c0};
    auto at = [&](double t) {
      const double arg = reversed ? 1.0 - t : t;
      if (arg <= 0.0) return c1 > 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
      return c0 + c1 * std::log(arg);
    };
    return {at(a), at(b)};
  }

  friend bool operator==(const Piece&, const Piece&) = default;
};

namespace detail {

using ld = long double;

inline ld xlogx_minus_x(ld t) { return t <= 0 ? ld(0) : t * std::log(t) - t; }
inline ld xlog2x(ld t) {
  if (t <= 0) return 0;
  const ld l = std::log(t);
  return t * l * l - 2 * t * l + 2 * t;
}

/// {int phi, int phi^2} of a forward piece over [l, r] with 0 <= l <= r.
inline std::array<ld, 2> forward_integrals(ld c0, ld c1, ld l, ld r) {
  const ld len = r - l;
  if (c1 == 0) return {c0 * len, c0 * c0 * len};
  const ld i_log = xlogx_minus_x(r) - xlogx_minus_x(l);
  const ld i_log2 = xlog2x(r) - xlog2x(l);
  return {c0 * len + c1 * i_log, c0 * c0 * len + 2 * c0 * c1 * i_log + c1 * c1 * i_log2};
}

/// {int phi, int phi^2} over [l, r] ⊆ [p.a, p.b].
inline std::array<ld, 2> piece_integrals(const Piece& p, double l, double r) {
  if (!(r > l)) return {0, 0};
  if (p.reversed && p.c1 != 0.0) return forward_integrals(p.c0, p.c1, ld(1) - r, ld(1) - l);
  return forward_integrals(p.c0, p.c1, l, r);
}

/// int e^{sigma (c0 + c1 log t)} dt over [l, r] in closed form.
inline ld signed_exp_integral(ld c0, ld c1, int sigma, ld l, ld r) {
  const ld k = 1 + sigma * c1;
  auto prim = [&](ld t) -> ld {
    if (t <= 0) return 0;
    return std::exp(sigma * c0 + k * std::log(t)) / k;
  };
  return prim(r) - prim(l);
}

/// int e^{|c0 + c1 log t|} over [l, r], split at the zero crossing.
inline ld forward_exp_abs(ld c0, ld c1, ld l, ld r) {
  if (!(r > l)) return 0;
  if (c1 == 0) return std::exp(std::abs(c0)) * (r - l);
  const ld t_star = std::exp(-c0 / c1);
  std::array<ld, 3> cuts{l, r, r};
  int n = 2;
  if (t_star > l && t_star < r) cuts = {l, t_star, r}, n = 3;
  ld sum = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const ld lo = cuts[i], hi = cuts[i + 1];
    const ld mid = lo > 0 ? std::sqrt(lo * hi) : hi / 2;  // log-midpoint keeps the sign test away from t*
    const int sigma = c0 + c1 * std::log(mid) >= 0 ? 1 : -1;
    sum += signed_exp_integral(c0, c1, sigma, lo, hi);
  }
  return sum;
}

}  // namespace detail

class PiecewiseLogAffine {
 public:
  /// The zero function.
  PiecewiseLogAffine() : pieces_{Piece{}} {}

  /// Pieces must tile [0,1) in order, each with a < b.
  explicit PiecewiseLogAffine(std::vector<Piece> pieces) : pieces_(std::move(pieces)) { validate(); }

  static PiecewiseLogAffine constant(double c) { return PiecewiseLogAffine({Piece{0.0, 1.0, c, 0.0, false}}); }

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }

  /// Index of the piece containing t; t = 1 belongs to the last piece.
  std::size_t piece_index(double t) const noexcept {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double v, const Piece& p) { return v < p.b; });
    if (it == pieces_.end()) return pieces_.size() - 1;
    return static_cast<std::size_t>(it - pieces_.begin());
  }

  double operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("phi is defined on [0, 1], got t = " + format_real(t));
    return pieces_[piece_index(t)](t);
  }

  /// Largest |c1| over all pieces.
  double max_abs_slope() const noexcept {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, std::abs(p.c1));
    return m;
  }

  friend bool operator==(const PiecewiseLogAffine&, const PiecewiseLogAffine&) = default;

 private:
  void validate() const {
    if (pieces_.empty()) throw DomainError("a piecewise function needs at least one piece");
    if (pieces_.front().a != 0.0) throw DomainError("the first piece must start at 0");
    if (pieces_.back().b != 1.0) throw DomainError("the last piece must end at 1");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Piece& p = pieces_[i];
      if (!(p.a < p.b)) throw DomainError("piece " + std::to_string(i) + " has a >= b");
      if (!std::isfinite(p.c0) || !std::isfinite(p.c1)) {
        throw DomainError("piece " + std::to_string(i) + " has non-finite coefficients");
      }
      if (i > 0 && pieces_[i - 1].b != p.a) {
        throw DomainError("pieces " + std::to_string(i - 1) + " and " + std::to_string(i) + " do not join");
      }
    }
  }

  std::vector<Piece> pieces_;
};

// ---------------------------------------------------------------------------
// Moments

namespace detail {

inline void require_interval(Interval j) {
  if (!(j.lo >= 0.0 && j.hi <= 1.0)) {
    throw DomainError("interval [" + format_real(j.lo) + ", " + format_real(j.hi) + "] is not inside [0, 1]");
  }
  if (!(j.length() > kLengthTol)) {
    throw DomainError("degenerate interval: length " + format_real(j.length()) + " <= " + format_real(kLengthTol));
  }
}

inline std::array<ld, 2> integrals_on(const PiecewiseLogAffine& f, Interval j) {
  std::array<ld, 2> s{0, 0};
  for (std::size_t i = f.piece_index(j.lo); i < f.size(); ++i) {
    const Piece& p = f.pieces()[i];
    if (p.a >= j.hi) break;
    const auto [i1, i2] = piece_integrals(p, std::max(p.a, j.lo), std::min(p.b, j.hi));
    s[0] += i1;
    s[1] += i2;
  }
  return s;
}

}  // namespace detail

inline double mean_on(const PiecewiseLogAffine& f, Interval j = {}) {
  detail::require_interval(j);
  return static_cast<double>(detail::integrals_on(f, j)[0] / j.length());
}

inline double second_moment_on(const PiecewiseLogAffine& f, Interval j = {}) {
  detail::require_interval(j);
  return static_cast<double>(detail::integrals_on(f, j)[1] / j.length());
}

/// <e^|phi|> over [0,1].
inline double exp_abs_moment(const PiecewiseLogAffine& f) {
  detail::ld sum = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Piece p = f.pieces()[i].as_forward();
    if (std::abs(p.c1) >= 1.0) {
      throw IntegrabilityError("piece " + std::to_string(i) + " has |c1| = " + format_real(std::abs(p.c1)) +
                               " >= 1, so e^|phi| is not integrable");
    }
    sum += detail::forward_exp_abs(p.c0, p.c1, p.a, p.b);
  }
  return static_cast<double>(sum);
}

/// Prefix integrals t -> (int_0^t psi, int_0^t psi^2) of psi = phi - shift(),
/// with O(log n) lookup. The shift is the mean of phi, which keeps the
/// variance free of cancellation for nearly constant functions.
class MomentPrimitive {
 public:
  explicit MomentPrimitive(const PiecewiseLogAffine& f) : f_(&f), shift_(mean_on(f)) {
    start_.reserve(f.size() + 1);
    start_.push_back({0, 0});
    for (const auto& p : f.pieces()) {
      const auto [i1, i2] = detail::piece_integrals(shifted(p), p.a, p.b);
      const auto& last = start_.back();
      start_.push_back({last[0] + i1, last[1] + i2});
    }
  }

  std::array<detail::ld, 2> at(double t) const {
    if (t <= 0.0) return {0, 0};
    if (t >= 1.0) return start_.back();
    const std::size_t i = f_->piece_index(t);
    const Piece& p = f_->pieces()[i];
    const auto [i1, i2] = detail::piece_integrals(shifted(p), p.a, t);
    return {start_[i][0] + i1, start_[i][1] + i2};
  }

  double shift() const noexcept { return shift_; }

  /// Variance of phi over [lo, hi] from two prefix values; clamped at 0.
  static double variance(const std::array<detail::ld, 2>& lo, const std::array<detail::ld, 2>& hi, double len) {
    const detail::ld m = (hi[0] - lo[0]) / len;
    const detail::ld v = (hi[1] - lo[1]) / len - m * m;
    return v > 0 ? static_cast<double>(v) : 0.0;
  }

  double variance_on(double lo, double hi) const { return variance(at(lo), at(hi), hi - lo); }

 private:
  Piece shifted(Piece p) const noexcept {
    p.c0 -= shift_;
    return p;
  }

  const PiecewiseLogAffine* f_;
  double shift_;
  std::vector<std::array<detail::ld, 2>> start_;
};

// ---------------------------------------------------------------------------
// BMO norm

struct BmoSearchOptions {
  int refine_candidates = 3;
  int refine_rounds = 3;
  int golden_iterations = 30;
  std::size_t max_breakpoint_nodes = 256;
  std::size_t max_reflected_pieces = 16;  // add nodes 2b - b' for breakpoints b, b' (and 0, 1)
};

namespace detail {

/// Golden-section maximization of g on [lo, hi]; returns the best argument seen (including `start`).
template <class G>
double golden_max(G&& g, double lo, double hi, double start, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double best_x = start;
  double best = g(start);
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < iterations; ++i) {
    if (gc > best) best = gc, best_x = c;
    if (gd > best) best = gd, best_x = d;
    if (gc >= gd) {
      b = d, d = c, gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c, c = d, gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  if (gc > best) best_x = c, best = gc;
  if (gd > best) best_x = d;
  return best_x;
}

inline double bmo_level(const PiecewiseLogAffine& f, const MomentPrimitive& prim, std::size_t n,
                        const BmoSearchOptions& opt) {
  std::vector<double> nodes;
  nodes.reserve(n + 1 + f.size());
  for (std::size_t i = 0; i <= n; ++i) nodes.push_back(static_cast<double>(i) / static_cast<double>(n));
  if (f.size() <= opt.max_breakpoint_nodes) {
    for (std::size_t i = 1; i < f.size(); ++i) nodes.push_back(f.pieces()[i].a);
  }
  if (f.size() <= opt.max_reflected_pieces) {
    std::vector<double> ends{0.0, 1.0};
    for (std::size_t i = 1; i < f.size(); ++i) ends.push_back(f.pieces()[i].a);
    for (double b : ends) {
      for (double c : ends) {
        const double t = 2.0 * b - c;
        if (t > 0.0 && t < 1.0) nodes.push_back(t);
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<std::array<ld, 2>> at;
  at.reserve(nodes.size());
  for (double t : nodes) at.push_back(prim.at(t));

  struct Cand {
    double var;
    double lo, hi;
  };
  const std::size_t k = static_cast<std::size_t>(std::max(1, opt.refine_candidates));
  std::vector<Cand> top;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double len = nodes[j] - nodes[i];
      if (len <= kLengthTol) continue;
      const double v = MomentPrimitive::variance(at[i], at[j], len);
      if (top.size() < k || v > top.back().var) {
        Cand c{v, nodes[i], nodes[j]};
        auto pos = std::upper_bound(top.begin(), top.end(), c, [](const Cand& x, const Cand& y) { return x.var > y.var; });
        top.insert(pos, c);
        if (top.size() > k) top.pop_back();
      }
    }
  }

  double best = top.empty() ? 0.0 : top.front().var;
  const double h = 1.0 / static_cast<double>(n);
  for (Cand c : top) {
    double lo = c.lo, hi = c.hi;
    for (int r = 0; r < opt.refine_rounds; ++r) {
      const double hi_fixed = hi;
      lo = golden_max([&](double x) { return prim.variance_on(x, hi_fixed); }, std::max(0.0, lo - h),
                      std::min(hi_fixed - 2 * kLengthTol, lo + h), lo, opt.golden_iterations);
      const double lo_fixed = lo;
      hi = golden_max([&](double x) { return prim.variance_on(lo_fixed, x); }, std::max(lo_fixed + 2 * kLengthTol, hi - h),
                      std::min(1.0, hi + h), hi, opt.golden_iterations);
    }
    best = std::max(best, prim.variance_on(lo, hi));
  }
  return best;
}

}  // namespace detail

/// Lower bound on sup_J sqrt(<(phi - <phi>_J)^2>_J) from dyadic grids 16, 32, ..., <= grid_n
/// plus the piece breakpoints and their reflections, with golden-section refinement around the best pairs.
inline double bmo_norm_estimate(const PiecewiseLogAffine& f, std::size_t grid_n = 256,
                                const BmoSearchOptions& opt = {}) {
  if (grid_n < 16) throw DomainError("bmo_norm_estimate needs grid_n >= 16, got " + std::to_string(grid_n));
  const MomentPrimitive prim(f);
  double best = 0.0;
  for (std::size_t n = 16; n <= grid_n; n *= 2) best = std::max(best, detail::bmo_level(f, prim, n, opt));
  return std::sqrt(best);
}

struct MomentReport {
  double mean = 0.0;
  double second = 0.0;
  double exp_abs = 0.0;
  double bmo_norm_lb = 0.0;
};

inline MomentReport moment_report(const PiecewiseLogAffine& f, std::size_t bmo_grid = 256) {
  return {mean_on(f), second_moment_on(f), exp_abs_moment(f), bmo_norm_estimate(f, bmo_grid)};
}

// ---------------------------------------------------------------------------
// Transformations

inline PiecewiseLogAffine scale(const PiecewiseLogAffine& f, double lambda) {
  auto pieces = f.pieces();
  for (auto& p : pieces) p.c0 = p.c0 * lambda + 0.0, p.c1 = p.c1 * lambda + 0.0;  // no -0
  return PiecewiseLogAffine(std::move(pieces));
}

inline PiecewiseLogAffine negate(const PiecewiseLogAffine& f) { return scale(f, -1.0); }

inline PiecewiseLogAffine shift(const PiecewiseLogAffine& f, double c) {
  auto pieces = f.pieces();
  for (auto& p : pieces) p.c0 += c;
  return PiecewiseLogAffine(std::move(pieces));
}

/// g(t/(1-gamma)) on [0, 1-gamma), then f((1-t)/gamma) on [1-gamma, 1).
///
/// Throws DomainError if a log piece would need a pivot other than 0 or 1,
/// which happens for reversed log pieces when 0 < gamma < 1.
inline PiecewiseLogAffine concat(const PiecewiseLogAffine& f, const PiecewiseLogAffine& g, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("concat needs gamma in [0, 1], got " + format_real(gamma));
  if (gamma == 0.0) return g;
  std::vector<Piece> out;
  const double left = 1.0 - gamma;
  if (left > 0.0) {
    for (const auto& p : g.pieces()) {
      Piece q{left * p.a, left * p.b, p.c0, p.c1, false};
      if (p.c1 != 0.0) {
        if (p.reversed) throw DomainError("concat: a reversed log piece of g cannot be rescaled onto [0, 1-gamma)");
        q.c0 = p.c0 - p.c1 * std::log(left);
      }
      if (q.a < q.b) out.push_back(q);
    }
  }
  for (auto it = f.pieces().rbegin(); it != f.pieces().rend(); ++it) {
    const Piece& p = *it;
    Piece q{1.0 - gamma * p.b, 1.0 - gamma * p.a, p.c0, p.c1, false};
    if (p.c1 != 0.0) {
      if (p.reversed) {
        if (gamma != 1.0) throw DomainError("concat: a reversed log piece of f cannot be mirrored onto (1-gamma, 1]");
        q.reversed = false;
      } else {
        q.c0 = p.c0 - p.c1 * std::log(gamma);
        q.reversed = true;
      }
    }
    if (q.a < q.b) out.push_back(q);
  }
  if (!out.empty()) out.front().a = 0.0, out.back().b = 1.0;
  return PiecewiseLogAffine(std::move(out));
}

/// Is phi monotone (non-decreasing when `increasing`) up to jumps of size tol?
inline bool is_monotone(const PiecewiseLogAffine& f, bool increasing, double tol = 1e-12) {
  const double sgn = increasing ? 1.0 : -1.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& p : f.pieces()) {
    const auto [va, vb] = p.end_values();
    const double a = sgn * va, b = sgn * vb;
    if (b < a) return false;
    if (a < prev - tol * std::max(1.0, std::abs(prev))) return false;
    prev = b;
  }
  return true;
}

inline bool is_non_decreasing(const PiecewiseLogAffine& f, double tol = 1e-12) { return is_monotone(f, true, tol); }
inline bool is_non_increasing(const PiecewiseLogAffine& f, double tol = 1e-12) { return is_monotone(f, false, tol); }

/// Step approximation of the non-decreasing rearrangement: cell averages on a
/// uniform grid of grid_n cells, sorted, with equal neighbours merged.
inline PiecewiseLogAffine monotone_rearrange(const PiecewiseLogAffine& f, std::size_t grid_n = std::size_t{1} << 20) {
  if (grid_n < 1024) throw DomainError("monotone_rearrange needs grid_n >= 1024, got " + std::to_string(grid_n));
  const MomentPrimitive prim(f);
  const double h = 1.0 / static_cast<double>(grid_n);
  std::vector<double> cells(grid_n);
  auto prev = prim.at(0.0);
  for (std::size_t i = 0; i < grid_n; ++i) {
    const auto next = prim.at(static_cast<double>(i + 1) * h);
    cells[i] = static_cast<double>((next[0] - prev[0]) / h + prim.shift());
    prev = next;
  }
  std::sort(cells.begin(), cells.end());
  std::vector<Piece> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= grid_n; ++i) {
    if (i == grid_n || cells[i] != cells[start]) {
      out.push_back(Piece{static_cast<double>(start) * h, i == grid_n ? 1.0 : static_cast<double>(i) * h, cells[start],
                          0.0, false});
      start = i;
    }
  }
  return PiecewiseLogAffine(std::move(out));
}

/// Exact non-decreasing rearrangement when the value ranges of the pieces do
/// not overlap and every log piece lands against the pivot it needs (an
/// increasing piece must keep its position, a decreasing one must end at 1).
/// Returns nullopt otherwise.
inline std::optional<PiecewiseLogAffine> monotone_rearrange_exact(const PiecewiseLogAffine& f, double tol = 1e-12) {
  struct Item {
    Piece p;  // forward form
    double lo, hi;
    double key;  // midpoint; ranges touching up to rounding still sort correctly
  };
  std::vector<Item> items;
  items.reserve(f.size());
  for (const auto& raw : f.pieces()) {
    const Piece p = raw.as_forward();
    const auto [va, vb] = p.end_values();
    const double lo = std::min(va, vb), hi = std::max(va, vb);
    const double key = std::isinf(lo) ? lo : std::isinf(hi) ? hi : lo + (hi - lo) / 2.0;
    items.push_back({p, lo, hi, key});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.key < y.key; });
  for (std::size_t i = 1; i < items.size(); ++i) {
    const double edge = items[i].lo;
    if (items[i - 1].hi > edge + tol * std::max(1.0, std::abs(edge))) return std::nullopt;
  }
  std::vector<Piece> out;
  double o = 0.0;
  for (const auto& it : items) {
    const Piece& p = it.p;
    const double len = p.b - p.a;
    Piece q{o, o + len, p.c0, p.c1, false};
    if (p.c1 > 0.0) {
      if (std::abs(o - p.a) > tol) return std::nullopt;
    } else if (p.c1 < 0.0) {
      if (std::abs(o + p.b - 1.0) > tol) return std::nullopt;
      q.reversed = true;
    }
    out.push_back(q);
    o += len;
  }
  for (std::size_t i = 1; i < out.size(); ++i) out[i].a = out[i - 1].b;
  out.back().b = 1.0;
  return PiecewiseLogAffine(std::move(out));
}

}  // namespace jnb
