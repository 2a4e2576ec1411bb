#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "ruinlab/errors.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

// Discount factor, constant gross return and starting assets.
struct ModelParams {
  double beta = 0.95;
  double return_rate = 1.0;
  double initial_assets = 0.0;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in the open interval (0,1)");
    if (!(return_rate >= 0.0)) throw ConfigError("return_rate must be >= 0");
    if (!(initial_assets >= 0.0)) throw ConfigError("initial_assets must be >= 0");
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

namespace detail {

// Log-space parameters of a lognormal with the given level mean and std.
struct LogNormalParams {
  double mu = 0.0;
  double sigma = 0.0;
};

inline LogNormalParams lognormal_from_level(double mean, double std) {
  const double m2 = mean * mean;
  const double s2 = std * std;
  return {std::log(m2 / std::sqrt(m2 + s2)), std::sqrt(std::log1p(s2 / m2))};
}

// Equal-probability quantile nodes p_j = (j + 1/2) / n of a standard normal.
inline std::vector<double> normal_quantile_nodes(int n) {
  std::vector<double> z(static_cast<std::size_t>(n));
  if (n == 1) {
    z[0] = 0.0;
    return z;
  }
  const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
  for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = boost::math::quantile(std_normal, (j + 0.5) / n);
  return z;
}

}  // namespace detail

enum class IncomeKind { constant, lognormal, bounded_uniform, fixed_sequence, lookahead_instance };

inline std::string_view to_string(IncomeKind kind) {
  switch (kind) {
    case IncomeKind::constant: return "constant";
    case IncomeKind::lognormal: return "lognormal";
    case IncomeKind::bounded_uniform: return "bounded_uniform";
    case IncomeKind::fixed_sequence: return "fixed_sequence";
    case IncomeKind::lookahead_instance: return "lookahead_instance";
  }
  return "?";
}

inline IncomeKind income_kind_from_string(std::string_view name) {
  if (name == "constant") return IncomeKind::constant;
  if (name == "lognormal") return IncomeKind::lognormal;
  if (name == "bounded_uniform") return IncomeKind::bounded_uniform;
  if (name == "fixed_sequence") return IncomeKind::fixed_sequence;
  if (name == "lookahead_instance") return IncomeKind::lookahead_instance;
  throw ConfigError("unknown income kind '" + std::string(name) + "'");
}

/// Per-period income y_t.
///
/// lognormal is parameterized by the mean and standard deviation of the
/// income level; the log-space parameters are derived on construction.
/// lookahead_instance pays `mean` for the first k/2 periods and `x * mean`
/// afterwards, with x ~ U[0,1] fixed per stream.
class IncomeProcess {
 public:
  static IncomeProcess constant(double mean) {
    IncomeProcess p(IncomeKind::constant, mean);
    p.validate();
    return p;
  }
  static IncomeProcess lognormal(double mean, double std) {
    IncomeProcess p(IncomeKind::lognormal, mean);
    p.std_ = std;
    p.validate();
    p.log_ = detail::lognormal_from_level(mean, std);
    return p;
  }
  static IncomeProcess bounded_uniform(double mean, double half_width) {
    IncomeProcess p(IncomeKind::bounded_uniform, mean);
    p.half_width_ = half_width;
    p.validate();
    return p;
  }
  static IncomeProcess fixed_sequence(std::vector<double> sequence) {
    IncomeProcess p(IncomeKind::fixed_sequence, 0.0);
    if (sequence.empty()) throw ConfigError("fixed_sequence income needs at least one value");
    p.mean_ = std::accumulate(sequence.begin(), sequence.end(), 0.0) / static_cast<double>(sequence.size());
    p.sequence_ = std::move(sequence);
    p.validate();
    return p;
  }
  static IncomeProcess lookahead_instance(int k, double level = 1.0) {
    IncomeProcess p(IncomeKind::lookahead_instance, level);
    p.k_ = k;
    p.validate();
    return p;
  }

  IncomeKind kind() const noexcept { return kind_; }
  // Y. For lookahead_instance this is the income ceiling, not the mean.
  double mean() const noexcept { return mean_; }
  double std() const noexcept { return std_; }
  double half_width() const noexcept { return half_width_; }
  const std::vector<double>& sequence() const noexcept { return sequence_; }
  int k() const noexcept { return k_; }
  double log_mu() const noexcept { return log_.mu; }
  double log_sigma() const noexcept { return log_.sigma; }

  // Smallest value a draw can take.
  double lower_bound() const {
    switch (kind_) {
      case IncomeKind::constant: return mean_;
      case IncomeKind::lognormal: return std_ == 0.0 ? mean_ : 0.0;
      case IncomeKind::bounded_uniform: return mean_ - half_width_;
      case IncomeKind::fixed_sequence: return *std::min_element(sequence_.begin(), sequence_.end());
      case IncomeKind::lookahead_instance: return 0.0;
    }
    return 0.0;
  }

  /// One draw of y_t. `period` matters only for fixed_sequence (cycled) and
  /// lookahead_instance.
  double draw(RngStream& rng, std::size_t period = 0) const {
    switch (kind_) {
      case IncomeKind::constant: return mean_;
      case IncomeKind::lognormal:
        if (std_ == 0.0) return mean_;
        return std::exp(log_.mu + log_.sigma * rng.normal());
      case IncomeKind::bounded_uniform:
        if (half_width_ == 0.0) return mean_;
        return rng.uniform(mean_ - half_width_, mean_ + half_width_);
      case IncomeKind::fixed_sequence: return sequence_[period % sequence_.size()];
      case IncomeKind::lookahead_instance: {
        const auto half = static_cast<std::size_t>(k_ / 2);
        if (period % static_cast<std::size_t>(k_) < half) return mean_;
        return mean_ * rng.keyed_uniform(0x4C4B);
      }
    }
    return 0.0;
  }

  /// Equal-weight nodes approximating the income distribution for expectations.
  /// Nodes are the distribution's (j + 1/2)/n quantiles; time-indexed kinds
  /// use the quantiles of their per-period values.
  std::vector<double> quantile_nodes(int n) const {
    if (n < 1) throw ConfigError("n_income_nodes must be >= 1");
    std::vector<double> nodes(static_cast<std::size_t>(n));
    switch (kind_) {
      case IncomeKind::constant: std::fill(nodes.begin(), nodes.end(), mean_); break;
      case IncomeKind::lognormal: {
        if (std_ == 0.0) {
          std::fill(nodes.begin(), nodes.end(), mean_);
          break;
        }
        const auto z = detail::normal_quantile_nodes(n);
        for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = std::exp(log_.mu + log_.sigma * z[j]);
        break;
      }
      case IncomeKind::bounded_uniform:
        for (int j = 0; j < n; ++j)
          nodes[static_cast<std::size_t>(j)] = mean_ - half_width_ + 2.0 * half_width_ * (j + 0.5) / n;
        break;
      case IncomeKind::fixed_sequence: {
        auto sorted = sequence_;
        std::sort(sorted.begin(), sorted.end());
        for (int j = 0; j < n; ++j) {
          const auto idx = static_cast<std::size_t>((j + 0.5) / n * static_cast<double>(sorted.size()));
          nodes[static_cast<std::size_t>(j)] = sorted[std::min(idx, sorted.size() - 1)];
        }
        break;
      }
      case IncomeKind::lookahead_instance:
        // Half the periods pay the ceiling, half pay x * ceiling with x ~ U[0,1].
        for (int j = 0; j < n; ++j) {
          const double p = (j + 0.5) / n;
          nodes[static_cast<std::size_t>(j)] = p < 0.5 ? mean_ * 2.0 * p : mean_;
        }
        break;
    }
    return nodes;
  }

  friend bool operator==(const IncomeProcess& a, const IncomeProcess& b) {
    return a.kind_ == b.kind_ && a.mean_ == b.mean_ && a.std_ == b.std_ && a.half_width_ == b.half_width_ &&
           a.sequence_ == b.sequence_ && a.k_ == b.k_;
  }

 private:
  IncomeProcess(IncomeKind kind, double mean) : kind_(kind), mean_(mean) {}

  void validate() const {
    if (!std::isfinite(mean_) || mean_ < 0.0) throw ConfigError("income mean must be a finite value >= 0");
    switch (kind_) {
      case IncomeKind::lognormal:
        if (!(std_ >= 0.0)) throw ConfigError("lognormal income std must be >= 0");
        if (mean_ == 0.0 && std_ > 0.0) throw ConfigError("lognormal income with zero mean must have zero std");
        break;
      case IncomeKind::bounded_uniform:
        if (!(half_width_ >= 0.0)) throw ConfigError("income half_width must be >= 0");
        if (mean_ - half_width_ < 0.0) throw ConfigError("bounded_uniform income needs mean - half_width >= 0");
        break;
      case IncomeKind::fixed_sequence:
        for (double v : sequence_)
          if (!(v >= 0.0)) throw ConfigError("fixed_sequence income values must be >= 0");
        break;
      case IncomeKind::lookahead_instance:
        if (k_ < 2 || k_ % 2 != 0) throw ConfigError("lookahead_instance k must be an even integer >= 2");
        break;
      case IncomeKind::constant: break;
    }
  }

  IncomeKind kind_;
  double mean_ = 0.0;
  double std_ = 0.0;
  double half_width_ = 0.0;
  std::vector<double> sequence_;
  int k_ = 0;
  detail::LogNormalParams log_;
};

inline double draw_income(const IncomeProcess& p, RngStream& rng, std::size_t period = 0) {
  return p.draw(rng, period);
}

enum class SubsistenceKind { constant, bounded_uniform, lognormal };

inline std::string_view to_string(SubsistenceKind kind) {
  switch (kind) {
    case SubsistenceKind::constant: return "constant";
    case SubsistenceKind::bounded_uniform: return "bounded_uniform";
    case SubsistenceKind::lognormal: return "lognormal";
  }
  return "?";
}

inline SubsistenceKind subsistence_kind_from_string(std::string_view name) {
  if (name == "constant") return SubsistenceKind::constant;
  if (name == "bounded_uniform") return SubsistenceKind::bounded_uniform;
  if (name == "lognormal") return SubsistenceKind::lognormal;
  throw ConfigError("unknown subsistence kind '" + std::string(name) + "'");
}

/// Per-period subsistence floor b_t with mean B.
///
/// bounded_uniform draws lie in [B - delta, B + delta]. lognormal takes
/// `spread` as the level standard deviation and is used for expenditure
/// floors whose only calibrated moment is the mean.
class SubsistenceProcess {
 public:
  static SubsistenceProcess constant(double mean) {
    SubsistenceProcess p(SubsistenceKind::constant, mean, 0.0);
    p.validate();
    return p;
  }
  static SubsistenceProcess bounded_uniform(double mean, double half_width) {
    SubsistenceProcess p(SubsistenceKind::bounded_uniform, mean, half_width);
    p.validate();
    return p;
  }
  static SubsistenceProcess lognormal(double mean, double std) {
    SubsistenceProcess p(SubsistenceKind::lognormal, mean, std);
    p.validate();
    p.log_ = detail::lognormal_from_level(mean, std);
    return p;
  }

  SubsistenceKind kind() const noexcept { return kind_; }
  double mean() const noexcept { return mean_; }
  // delta for bounded_uniform, level std for lognormal, 0 for constant.
  double spread() const noexcept { return spread_; }

  double draw(RngStream& rng) const {
    switch (kind_) {
      case SubsistenceKind::constant: return mean_;
      case SubsistenceKind::bounded_uniform:
        if (spread_ == 0.0) return mean_;
        return rng.uniform(mean_ - spread_, mean_ + spread_);
      case SubsistenceKind::lognormal:
        if (spread_ == 0.0) return mean_;
        return std::exp(log_.mu + log_.sigma * rng.normal());
    }
    return mean_;
  }

  friend bool operator==(const SubsistenceProcess& a, const SubsistenceProcess& b) {
    return a.kind_ == b.kind_ && a.mean_ == b.mean_ && a.spread_ == b.spread_;
  }

 private:
  SubsistenceProcess(SubsistenceKind kind, double mean, double spread) : kind_(kind), mean_(mean), spread_(spread) {}

  void validate() const {
    if (!std::isfinite(mean_) || mean_ < 0.0) throw ConfigError("subsistence mean must be a finite value >= 0");
    if (!(spread_ >= 0.0)) throw ConfigError("subsistence spread must be >= 0");
    if (kind_ == SubsistenceKind::bounded_uniform && mean_ - spread_ < 0.0)
      throw ConfigError("bounded_uniform subsistence needs mean - delta >= 0");
    if (kind_ == SubsistenceKind::lognormal && mean_ == 0.0 && spread_ > 0.0)
      throw ConfigError("lognormal subsistence with zero mean must have zero spread");
  }

  SubsistenceKind kind_;
  double mean_;
  double spread_;
  detail::LogNormalParams log_;
};

}  // namespace ruinlab
