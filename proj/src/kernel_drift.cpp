#include "sbts/kernel_drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbts {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void
check_bandwidths(std::span<const double> h)
{
  for (double hk : h) {
    if (!(hk > 0.0))
      throw InvalidConfig("kernel bandwidths must be positive");
  }
}

double
squared_distance(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

// log K_h(u) without validation; bandwidths are checked by the callers.
double
log_kernel_unchecked(const double* u, std::span<const double> h)
{
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double z = u[k] / h[k];
    const double one_minus = 1.0 - z * z;
    if (!(one_minus > 0.0))
      return kNegInf;
    s += 2.0 * std::log(one_minus) - std::log(h[k]);
  }
  return s;
}

double
log_window_kernel(std::span<const double> prefix,
                  std::span<const double> reference_row,
                  std::size_t d,
                  MarkovOrder order,
                  std::span<const double> h)
{
  const std::size_t last = prefix.size() / d - 1;
  double s = 0.0;
  thread_local std::vector<double> diff;
  diff.resize(d);
  for (std::size_t j = order.window_start(last); j <= last; ++j) {
    for (std::size_t k = 0; k < d; ++k)
      diff[k] = prefix[j * d + k] - reference_row[j * d + k];
    const double lk = log_kernel_unchecked(diff.data(), h);
    if (lk == kNegInf)
      return kNegInf;
    s += lk;
  }
  return s;
}

} // namespace

double
quartic_kernel(std::span<const double> u, std::span<const double> h)
{
  if (u.size() != h.size())
    throw ShapeError("kernel argument and bandwidth sizes differ");
  check_bandwidths(h);
  double value = 1.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double z = u[k] / h[k];
    if (!(std::abs(z) < 1.0))
      return 0.0;
    const double one_minus = 1.0 - z * z;
    value *= one_minus * one_minus / h[k];
  }
  return value;
}

double
log_quartic_kernel(std::span<const double> u, std::span<const double> h)
{
  if (u.size() != h.size())
    throw ShapeError("kernel argument and bandwidth sizes differ");
  check_bandwidths(h);
  return log_kernel_unchecked(u.data(), h);
}

double
bridge_log_weight(double t,
                  std::span<const double> x_i_ref,
                  std::span<const double> x,
                  std::span<const double> x_next_ref,
                  double t_i,
                  double t_next)
{
  if (x_i_ref.size() != x.size() || x_next_ref.size() != x.size())
    throw ShapeError("bridge weight arguments differ in dimension");
  if (!(t < t_next)) {
    std::ostringstream msg;
    msg << "bridge weight requested at t=" << t
        << " which is not before the interval end " << t_next;
    throw SingularityError(msg.str());
  }
  return -squared_distance(x_next_ref, x) / (2.0 * (t_next - t)) +
         squared_distance(x_next_ref, x_i_ref) / (2.0 * (t_next - t_i));
}

double
markov_log_kernel_weight(std::span<const double> prefix,
                         std::span<const double> reference_row,
                         std::size_t features,
                         MarkovOrder order,
                         std::span<const double> bandwidths)
{
  if (features == 0 || bandwidths.size() != features)
    throw ShapeError("bandwidth count must equal the feature count");
  if (prefix.empty() || prefix.size() % features != 0)
    throw ShapeError("prefix must hold a whole number of grid points");
  if (reference_row.size() < prefix.size())
    throw ShapeError("prefix is longer than the reference trajectory");
  if (order.value() < 1)
    throw InvalidConfig("Markov order must be at least 1");
  check_bandwidths(bandwidths);
  return log_window_kernel(prefix, reference_row, features, order, bandwidths);
}

IntervalDrift::IntervalDrift(std::size_t features,
                             double t_begin,
                             double t_end,
                             double floor)
  : features_(features)
  , t_begin_(t_begin)
  , t_end_(t_end)
  , weight_floor_(floor)
  , accum_(features, 0.0)
{}

void
IntervalDrift::add_sample(double log_weight, std::span<const double> next)
{
  base_log_.push_back(log_weight);
  next_.insert(next_.end(), next.begin(), next.end());
  ++support_;
}

namespace {

void
check_interval(const Panel& reference, std::size_t interval)
{
  if (interval + 1 >= reference.length()) {
    std::ostringstream msg;
    msg << "interval " << interval << " out of range for a grid of "
        << reference.length() << " points";
    throw ShapeError(msg.str());
  }
}

} // namespace

IntervalDrift::IntervalDrift(const Panel& reference,
                             std::size_t interval,
                             std::span<const double> prefix,
                             MarkovOrder order,
                             std::span<const double> bandwidths,
                             double weight_floor)
  : IntervalDrift(reference.features(),
                  interval + 1 < reference.length() ? reference.grid()[interval] : 0.0,
                  interval + 1 < reference.length() ? reference.grid()[interval + 1] : 0.0,
                  weight_floor)
{
  check_interval(reference, interval);
  const std::size_t d = features_;
  if (prefix.size() != (interval + 1) * d)
    throw ShapeError("prefix must hold grid points 0..interval");
  if (bandwidths.size() != d)
    throw ShapeError("bandwidth count must equal the feature count");
  check_bandwidths(bandwidths);

  const double dt = t_end_ - t_begin_;
  base_log_.reserve(reference.samples());
  next_.reserve(reference.samples() * d);
  for (std::size_t m = 0; m < reference.samples(); ++m) {
    const double log_k =
      log_window_kernel(prefix, reference.row(m), d, order, bandwidths);
    if (log_k == kNegInf)
      continue;
    const auto cur = reference.point(m, interval);
    const auto next = reference.point(m, interval + 1);
    add_sample(log_k + squared_distance(next, cur) / (2.0 * dt), next);
  }
  scratch_.resize(support_);
}

IntervalDrift
IntervalDrift::unconditional(const Panel& reference,
                             std::size_t interval,
                             double weight_floor)
{
  check_interval(reference, interval);
  IntervalDrift out(reference.features(), reference.grid()[interval],
                    reference.grid()[interval + 1], weight_floor);
  const double dt = out.t_end_ - out.t_begin_;
  out.base_log_.reserve(reference.samples());
  out.next_.reserve(reference.samples() * reference.features());
  for (std::size_t m = 0; m < reference.samples(); ++m) {
    const auto cur = reference.point(m, interval);
    const auto next = reference.point(m, interval + 1);
    out.add_sample(squared_distance(next, cur) / (2.0 * dt), next);
  }
  out.scratch_.resize(out.support_);
  return out;
}

bool
IntervalDrift::evaluate(double t,
                        std::span<const double> x,
                        std::span<double> out) const
{
  const std::size_t d = features_;
  const double time_to_go = t_end_ - t;
  if (!(time_to_go > 0.0)) {
    std::ostringstream msg;
    msg << "drift requested at t=" << t << " which is not before the interval end "
        << t_end_;
    throw SingularityError(msg.str());
  }
  if (support_ == 0)
    return false;

  const double scale = 1.0 / (2.0 * time_to_go);
  double max_log = kNegInf;
  const double* next = next_.data();
  double* logw = scratch_.data();
  for (std::size_t m = 0; m < support_; ++m) {
    double dist = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = next[m * d + k] - x[k];
      dist += diff * diff;
    }
    logw[m] = base_log_[m] - dist * scale;
    max_log = std::max(max_log, logw[m]);
  }

  double mass = 0.0;
  double* acc = accum_.data();
  std::fill(accum_.begin(), accum_.end(), 0.0);
  for (std::size_t m = 0; m < support_; ++m) {
    const double w = std::exp(logw[m] - max_log);
    mass += w;
    for (std::size_t k = 0; k < d; ++k)
      acc[k] += w * (next[m * d + k] - x[k]);
  }
  if (!(mass >= weight_floor_))
    return false;
  for (std::size_t k = 0; k < d; ++k)
    out[k] = acc[k] / mass / time_to_go;
  return true;
}

std::vector<double>
estimate_drift(const DriftQuery& query, const Panel& reference, const DriftConfig& cfg)
{
  const std::size_t d = reference.features();
  cfg.validate(d);
  if (query.x.size() != d)
    throw ShapeError("query state has the wrong dimension");
  check_interval(reference, query.interval);
  const auto& grid = reference.grid();
  if (query.t < grid[query.interval])
    throw InvalidConfig("query time lies before its interval");

  IntervalDrift drift(reference, query.interval, query.prefix, cfg.markov_order,
                      cfg.bandwidths, cfg.weight_floor);
  std::vector<double> out(d);
  if (!drift.evaluate(query.t, query.x, out))
    throw DegenerateWeights("no reference sample has kernel support at interval " +
                            std::to_string(query.interval));
  return out;
}

ResolvedDrift
resolve_interval_drift(const Panel& reference,
                       std::size_t interval,
                       std::span<const double> prefix,
                       const DriftConfig& cfg)
{
  std::vector<double> h = cfg.bandwidths;
  for (unsigned doublings = 0; doublings <= kMaxBandwidthDoublings; ++doublings) {
    IntervalDrift drift(reference, interval, prefix, cfg.markov_order, h,
                        cfg.weight_floor);
    if (!drift.degenerate())
      return { std::move(drift), doublings, doublings > 0, false };
    for (double& hk : h)
      hk *= 2.0;
  }
  return { IntervalDrift::unconditional(reference, interval, cfg.weight_floor),
           kMaxBandwidthDoublings, true, true };
}

} // namespace sbts
