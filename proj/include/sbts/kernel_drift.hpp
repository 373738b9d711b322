#pragma once

#include "sbts/core.hpp"

#include <span>
#include <vector>

namespace sbts {

//! No reference sample carries kernel mass for a drift query.
class DegenerateWeights : public Error
{
public:
  using Error::Error;
};

//! Drift requested at or beyond the right end of its interval, where the
//! bridge weight blows up.
class SingularityError : public DomainError
{
public:
  using DomainError::DomainError;
};

//! Product quartic (biweight) kernel
//!   K_h(u) = prod_k (1/h_k) (1 - (u_k/h_k)^2)^2 1{|u_k| < h_k}.
double quartic_kernel(std::span<const double> u, std::span<const double> h);

//! log K_h(u); -inf outside the support.
double log_quartic_kernel(std::span<const double> u, std::span<const double> h);

//! log F_i(t, x_i, x, x_{i+1}) =
//!   -|x_{i+1} - x|^2 / (2 (t_{i+1} - t)) + |x_{i+1} - x_i|^2 / (2 (t_{i+1} - t_i)).
//! Returned in log form; callers stabilize before exponentiating.
double bridge_log_weight(double t,
                         std::span<const double> x_i_ref,
                         std::span<const double> x,
                         std::span<const double> x_next_ref,
                         double t_i,
                         double t_next);

//! Sum of log K_h(x_j - X_j) over the Markov window ending at the last
//! prefix point. `prefix` holds grid points 0..i (d values each) and
//! `reference_row` a full reference trajectory. -inf if any factor is 0.
double markov_log_kernel_weight(std::span<const double> prefix,
                                std::span<const double> reference_row,
                                std::size_t features,
                                MarkovOrder order,
                                std::span<const double> bandwidths);

//! Arguments of one drift evaluation. Indices are 0-based: `interval` i
//! covers [t_i, t_{i+1}) and `prefix` holds the path at grid points 0..i.
struct DriftQuery
{
  std::size_t interval = 0;
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> prefix;
};

//! Kernel estimate of the bridge drift:
//!
//!   a(t, x) = 1/(t_{i+1} - t) * sum_m (X^m_{i+1} - x) F_i^m K^m / sum_m F_i^m K^m
//!
//! with weights combined in log space and shifted by their maximum before
//! exponentiation. Throws DegenerateWeights if no sample has support.
std::vector<double> estimate_drift(const DriftQuery& query,
                                   const Panel& reference,
                                   const DriftConfig& cfg);

//! Drift on one grid interval with every per-sample term that does not
//! depend on (t, x) computed once: the conditioning kernel over the prefix
//! and the second exponent of F_i. Samples without kernel support are
//! dropped. `evaluate` reuses an internal buffer, so one instance must not
//! be evaluated from two threads at once.
class IntervalDrift
{
public:
  IntervalDrift(const Panel& reference,
                std::size_t interval,
                std::span<const double> prefix,
                MarkovOrder order,
                std::span<const double> bandwidths,
                double weight_floor = 1e-300);

  //! Every reference sample weighted by F_i alone (conditioning kernel = 1).
  static IntervalDrift unconditional(const Panel& reference,
                                     std::size_t interval,
                                     double weight_floor = 1e-300);

  bool degenerate() const { return support_ == 0; }
  std::size_t support() const { return support_; }
  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }

  //! Writes the drift at (t, x) into `out`. Returns false if the stabilized
  //! weight mass falls below the floor; `out` is untouched then.
  bool evaluate(double t, std::span<const double> x, std::span<double> out) const;

private:
  IntervalDrift(std::size_t features, double t_begin, double t_end, double floor);
  void add_sample(double log_weight, std::span<const double> next);

  std::size_t features_;
  double t_begin_, t_end_;
  double weight_floor_;
  std::size_t support_ = 0;
  std::vector<double> base_log_; // conditioning + |X_{i+1} - X_i|^2 / (2 dt_i)
  std::vector<double> next_;     // X_{i+1} of supported samples
  mutable std::vector<double> scratch_;
  mutable std::vector<double> accum_;
};

//! Interval drift after the degenerate-weights fallback: the bandwidths are
//! doubled up to `kMaxBandwidthDoublings` times, then the unconditional
//! estimator is used.
struct ResolvedDrift
{
  IntervalDrift drift;
  unsigned doublings = 0;
  bool fallback = false;      // original bandwidths had no support
  bool unconditional = false; // ladder reached the last rung
};

inline constexpr unsigned kMaxBandwidthDoublings = 3;

ResolvedDrift resolve_interval_drift(const Panel& reference,
                                     std::size_t interval,
                                     std::span<const double> prefix,
                                     const DriftConfig& cfg);

} // namespace sbts
