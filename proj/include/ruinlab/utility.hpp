#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "ruinlab/errors.hpp"

namespace ruinlab {

enum class UtilityKind { sqrt, log, isoelastic_shifted, isoelastic_unshifted };

inline std::string_view to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::sqrt: return "sqrt";
    case UtilityKind::log: return "log";
    case UtilityKind::isoelastic_shifted: return "isoelastic_shifted";
    case UtilityKind::isoelastic_unshifted: return "isoelastic_unshifted";
  }
  return "?";
}

inline UtilityKind utility_kind_from_string(std::string_view name) {
  if (name == "sqrt") return UtilityKind::sqrt;
  if (name == "log") return UtilityKind::log;
  if (name == "isoelastic_shifted") return UtilityKind::isoelastic_shifted;
  if (name == "isoelastic_unshifted") return UtilityKind::isoelastic_unshifted;
  throw ConfigError("unknown utility kind '" + std::string(name) + "'");
}

/// Concave period utility u(c).
///
/// The isoelastic kinds carry the curvature exponent lambda (lambda > 0,
/// lambda != 1):
///   shifted    u(c) = (c^(1-lambda) - 1) / (1 - lambda)
///   unshifted  u(c) =  c^(1-lambda)      / (1 - lambda)
/// The two differ by the constant 1 / (lambda - 1).
class UtilityFunction {
 public:
  static UtilityFunction sqrt() { return UtilityFunction(UtilityKind::sqrt, 0.5); }
  static UtilityFunction log() { return UtilityFunction(UtilityKind::log, 1.0); }
  static UtilityFunction isoelastic_shifted(double lambda) {
    return UtilityFunction(UtilityKind::isoelastic_shifted, checked_lambda(lambda));
  }
  static UtilityFunction isoelastic_unshifted(double lambda) {
    return UtilityFunction(UtilityKind::isoelastic_unshifted, checked_lambda(lambda));
  }
  static UtilityFunction make(UtilityKind kind, double lambda) {
    switch (kind) {
      case UtilityKind::sqrt: return sqrt();
      case UtilityKind::log: return log();
      case UtilityKind::isoelastic_shifted: return isoelastic_shifted(lambda);
      case UtilityKind::isoelastic_unshifted: return isoelastic_unshifted(lambda);
    }
    throw ConfigError("unknown utility kind");
  }

  UtilityKind kind() const noexcept { return kind_; }
  // Curvature exponent; 0.5 for sqrt and 1 for log by convention.
  double lambda() const noexcept { return lambda_; }
  bool is_isoelastic() const noexcept {
    return kind_ == UtilityKind::isoelastic_shifted || kind_ == UtilityKind::isoelastic_unshifted;
  }

  // True when u(0) is a finite number.
  bool finite_at_zero() const noexcept {
    switch (kind_) {
      case UtilityKind::sqrt: return true;
      case UtilityKind::log: return false;
      default: return lambda_ < 1.0;
    }
  }

  double operator()(double c) const {
    if (!(c >= 0.0)) throw DomainError("utility evaluated at negative consumption " + std::to_string(c));
    if (c == 0.0) {
      if (!finite_at_zero())
        throw DivergenceError("utility diverges to -infinity at zero consumption for kind " +
                              std::string(to_string(kind_)));
    }
    switch (kind_) {
      case UtilityKind::sqrt: return std::sqrt(c);
      case UtilityKind::log: return std::log(c);
      case UtilityKind::isoelastic_shifted: {
        const double k = 1.0 - lambda_;
        return std::expm1(k * std::log(c)) / k;
      }
      case UtilityKind::isoelastic_unshifted: {
        const double k = 1.0 - lambda_;
        return std::pow(c, k) / k;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  // u'(c) for c > 0.
  double derivative(double c) const {
    if (!(c > 0.0)) throw DomainError("utility derivative requires c > 0");
    switch (kind_) {
      case UtilityKind::sqrt: return 0.5 / std::sqrt(c);
      case UtilityKind::log: return 1.0 / c;
      default: return std::pow(c, -lambda_);
    }
  }

  // Greatest lower bound of the range (u(0) or -infinity).
  double range_infimum() const noexcept {
    if (finite_at_zero()) {
      if (kind_ == UtilityKind::isoelastic_shifted) return -1.0 / (1.0 - lambda_);
      return 0.0;
    }
    return -std::numeric_limits<double>::infinity();
  }

  // Least upper bound of the range (finite only for isoelastic with lambda > 1).
  double range_supremum() const noexcept {
    if (is_isoelastic() && lambda_ > 1.0) {
      return kind_ == UtilityKind::isoelastic_shifted ? 1.0 / (lambda_ - 1.0) : 0.0;
    }
    return std::numeric_limits<double>::infinity();
  }

  // u^{-1}(v); v must lie in [infimum, supremum).
  double inverse(double v) const {
    const double lo = range_infimum();
    const double hi = range_supremum();
    if (std::isnan(v) || v < lo) throw DomainError("value below the range of the utility function");
    if (v >= hi) throw DomainError("value at or above the supremum of the utility function");
    switch (kind_) {
      case UtilityKind::sqrt: return v * v;
      case UtilityKind::log: return std::exp(v);
      case UtilityKind::isoelastic_shifted: {
        const double k = 1.0 - lambda_;
        return std::exp(std::log1p(k * v) / k);
      }
      case UtilityKind::isoelastic_unshifted: {
        const double k = 1.0 - lambda_;
        return std::pow(k * v, 1.0 / k);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  friend bool operator==(const UtilityFunction&, const UtilityFunction&) = default;

 private:
  UtilityFunction(UtilityKind kind, double lambda) : kind_(kind), lambda_(lambda) {}

  static double checked_lambda(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("isoelastic exponent lambda must be > 0");
    if (lambda == 1.0) throw DomainError("isoelastic exponent lambda must differ from 1 (use log)");
    return lambda;
  }

  UtilityKind kind_;
  double lambda_;
};

inline double eval_utility(const UtilityFunction& u, double c) { return u(c); }
inline double invert_utility(const UtilityFunction& u, double v) { return u.inverse(v); }

}  // namespace ruinlab
