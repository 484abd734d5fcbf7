#pragma once

// The Bellman function B_eps(x1, x2) = sup <e^|phi|> over BMO_eps functions
// with <phi> = x1 and <phi^2> = x2, its one-sided counterpart, and the sharp
// constants derived from them.

#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <string>

#include "jnb/errors.hpp"
#include "jnb/format.hpp"
#include "jnb/geometry.hpp"

namespace jnb {

/// Slack for midpoint concavity, relative to max(1, |B(p)| + |B(q)|).
inline constexpr double kConcavityTol = 1e-9;

/// Finite real or +inf. Orders +inf above every finite value.
class BellmanValue {
 public:
  constexpr BellmanValue() = default;
  static constexpr BellmanValue finite(double v) noexcept { return BellmanValue(v, false); }
  static constexpr BellmanValue infinity() noexcept { return BellmanValue(0.0, true); }

  constexpr bool is_finite() const noexcept { return !infinite_; }
  /// The value as a double; +inf maps to std::numeric_limits<double>::infinity().
  constexpr double as_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }
  double value() const {
    if (infinite_) throw DomainError("Bellman value is +inf");
    return value_;
  }
  std::string to_string(int digits = kMachineDigits) const {
    return infinite_ ? "inf" : format_real(value_, digits);
  }

  friend constexpr bool operator==(const BellmanValue& l, const BellmanValue& r) noexcept {
    return l.infinite_ == r.infinite_ && (l.infinite_ || l.value_ == r.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const BellmanValue& l, const BellmanValue& r) noexcept {
    return l.as_double() <=> r.as_double();
  }

 private:
  constexpr BellmanValue(double v, bool inf) noexcept : value_(v), infinite_(inf) {}
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Closed forms g_j of the candidate on each region for eps in (0, 1).
///
/// `value(j, p)` and `d_dx2(j, p)` evaluate the formula of region j at p without
/// checking membership, so adjacent formulas can be compared on shared
/// boundaries. Every formula uses |x1|.
class Candidate {
 public:
  explicit Candidate(Epsilon eps) : eps_(eps), regime_(jnb::regime(eps)) {
    if (regime_ == Regime::SubHalf) {
      aux_ = aux_params(eps);
    } else if (regime_ != Regime::MidRange) {
      throw DomainError("closed-form pieces exist for eps in (0, 1), got " + format_real(eps.value()));
    }
  }

  Epsilon eps() const noexcept { return eps_; }
  Regime regime() const noexcept { return regime_; }
  int regions() const noexcept { return region_count(regime_); }
  /// alpha, c, b; meaningful only in the sub-half regime.
  const AuxParams& aux() const noexcept { return aux_; }

  double value(int region, Point p) const {
    const double e = eps_.value();
    const double a = std::abs(p.x1);
    const double beta = beta_unchecked(p);
    if (region == 1) return std::exp(std::sqrt(std::max(p.x2, 0.0)));
    if (regime_ == Regime::SubHalf) {
      switch (region) {
        case 2:
          return (1.0 + beta) / (1.0 + e) * std::exp(a - beta + e) +
                 (e - beta) / (1.0 + e) * std::exp(-(a - beta) / e + e);
        case 3:
          return aux_.c * (a - aux_.alpha) + aux_.b * (p.x2 - aux_.alpha * aux_.alpha) + std::exp(aux_.alpha);
        case 4:
          return (1.0 - beta) / (1.0 - e) * std::exp(a + beta - e);
      }
    } else {
      switch (region) {
        case 2:
          return (1.0 - e * e + p.x2) / (2.0 - 2.0 * e) * std::exp(1.0 - e);
        case 3:
          return (1.0 - beta) / (1.0 - e) * std::exp(a + beta - e);
      }
    }
    throw DomainError("no region " + std::to_string(region) + " in this regime");
  }

  /// Analytic partial derivative in x2, in the simplified forms that stay finite at beta = 0.
  double d_dx2(int region, Point p) const { return d_dx2(region, p, beta_unchecked(p)); }

  /// Same, with beta supplied by the caller (exact on known tangent lines).
  double d_dx2(int region, Point p, double beta) const {
    const double e = eps_.value();
    const double a = std::abs(p.x1);
    if (region == 1) {
      const double s = std::sqrt(p.x2);
      return std::exp(s) / (2.0 * s);
    }
    if (regime_ == Regime::SubHalf) {
      switch (region) {
        case 2:
          return std::exp(a - beta + e) / (2.0 + 2.0 * e) + std::exp(-(a - beta) / e + e) / (2.0 * e * (1.0 + e));
        case 3:
          return aux_.b;
        case 4:
          return std::exp(a + beta - e) / (2.0 - 2.0 * e);
      }
    } else {
      switch (region) {
        case 2:
          return std::exp(1.0 - e) / (2.0 - 2.0 * e);
        case 3:
          return std::exp(a + beta - e) / (2.0 - 2.0 * e);
      }
    }
    throw DomainError("no region " + std::to_string(region) + " in this regime");
  }

  /// beta for points in (or within rounding of) the strip; never throws.
  double beta_unchecked(Point p) const noexcept {
    const double q = beta_squared_raw(eps_, p);
    return q <= 0.0 ? 0.0 : std::min(std::sqrt(q), eps_.value());
  }

 private:
  Epsilon eps_;
  Regime regime_;
  AuxParams aux_{};
};

/// Second x2-derivative of g_1 = e^sqrt(x2); nonpositive for x2 <= 1.
inline double g1_d2_dx2(double x2) {
  const double s = std::sqrt(x2);
  return std::exp(s) / (4.0 * x2) * (1.0 - 1.0 / s);
}

/// Evaluates B_eps by regime and region.
class Bellman {
 public:
  explicit Bellman(Epsilon eps) : eps_(eps), regime_(jnb::regime(eps)) {
    if (regime_ == Regime::SubHalf || regime_ == Regime::MidRange) candidate_.emplace(eps);
  }

  Epsilon eps() const noexcept { return eps_; }

  BellmanValue operator()(Point p) const {
    switch (regime_) {
      case Regime::Zero:
        // Omega_0 is the parabola itself.
        require_in_strip(eps_, p);
        return BellmanValue::finite(std::exp(std::abs(p.x1)));
      case Regime::Degenerate:
        require_in_strip(eps_, p);
        if (on_parabola(p)) return BellmanValue::finite(std::exp(std::abs(p.x1)));
        return BellmanValue::infinity();
      default:
        return BellmanValue::finite(candidate_->value(classify(eps_, p), p));
    }
  }

  /// Finite value as a double (+inf in the degenerate regime).
  double value(Point p) const { return (*this)(p).as_double(); }

  const Candidate& candidate() const {
    if (!candidate_) throw DomainError("no closed-form pieces in this regime");
    return *candidate_;
  }

 private:
  Epsilon eps_;
  Regime regime_;
  std::optional<Candidate> candidate_;
};

inline BellmanValue eval(Epsilon eps, Point p) { return Bellman(eps)(p); }

/// Bellman function of the one-sided problem sup <e^phi>.
inline BellmanValue eval_asym(Epsilon eps, Point p) {
  require_in_strip(eps, p);
  const double e = eps.value();
  if (e >= 1.0) {
    if (on_parabola(p)) return BellmanValue::finite(std::exp(p.x1));
    return BellmanValue::infinity();
  }
  const double q = beta_squared_raw(eps, p);
  const double beta = q <= 0.0 ? 0.0 : std::min(std::sqrt(q), e);
  return BellmanValue::finite((1.0 - beta) / (1.0 - e) * std::exp(p.x1 + beta - e));
}

/// Sharp constant C(eps) in <exp|phi - <phi>|> <= C(eps) over BMO_eps.
inline BellmanValue sharp_constant(Epsilon eps) {
  const double e = eps.value();
  if (e <= 0.5) return BellmanValue::finite(std::exp(e));
  if (e < 1.0) return BellmanValue::finite(std::exp(1.0 - e) / (2.0 - 2.0 * e));
  return BellmanValue::infinity();
}

enum class WeakForm {
  OneSided,   // |{phi - <phi> >= lambda}|
  Symmetric,  // |{|phi - <phi>| >= lambda}|
};

/// Number of branches of the weak-form constant.
constexpr int weak_branch_count(WeakForm form) noexcept { return form == WeakForm::OneSided ? 2 : 3; }

/// Branch (1-based) whose closed interval of lambda/eps contains `lambda`; boundaries go to the lower branch.
inline int weak_branch(Epsilon eps, double lambda, WeakForm form) {
  const double e = eps.value();
  if (!(e > 0.0)) throw DomainError("weak-form constants need eps > 0");
  if (!(lambda >= 0.0)) throw DomainError("weak-form constants need lambda >= 0, got " + format_real(lambda));
  if (lambda <= e) return 1;
  if (form == WeakForm::OneSided || lambda <= 2.0 * e) return 2;
  return 3;
}

/// Closed form of one branch, evaluated at any lambda >= 0.
inline double weak_constant_branch(Epsilon eps, double lambda, WeakForm form, int branch) {
  const double e = eps.value();
  if (!(e > 0.0)) throw DomainError("weak-form constants need eps > 0");
  const double t = lambda / e;
  if (form == WeakForm::OneSided) {
    switch (branch) {
      case 1: return 1.0 - t / 2.0;
      case 2: return 0.5 * std::exp(1.0 - t);
    }
  } else {
    switch (branch) {
      case 1: return 1.0;
      case 2: return (e / lambda) * (e / lambda);
      case 3: return 0.25 * std::exp(2.0 - t);
    }
  }
  throw DomainError("no weak-form branch " + std::to_string(branch));
}

/// Sharp weak-form constant C(eps, lambda) (one-sided) or C_sym(eps, lambda).
inline double weak_constant(Epsilon eps, double lambda, WeakForm form) {
  return weak_constant_branch(eps, lambda, form, weak_branch(eps, lambda, form));
}

}  // namespace jnb
