#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbts {

//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Bad configuration or input that fails validation before any computation.
class InvalidConfig : public Error
{
public:
  using Error::Error;
};

//! Array dimensions that do not line up.
class ShapeError : public InvalidConfig
{
public:
  using InvalidConfig::InvalidConfig;
};

//! Values outside the mathematical domain of an operation (log of a
//! nonpositive price, zero variance used as a divisor, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Strictly increasing model times t_1 < ... < t_N plus the number of Euler
//! sub-steps taken inside each interval.
class TimeGrid
{
public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times, std::size_t substeps = 200)
    : times_(std::move(times))
    , substeps_(substeps)
  {}

  //! n points t0, t0 + dt, ..., t0 + (n-1) dt.
  static TimeGrid uniform(std::size_t n,
                          double dt,
                          double t0 = 0.0,
                          std::size_t substeps = 200);

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  std::span<const double> times() const { return times_; }
  std::size_t substeps() const { return substeps_; }

  double spacing(std::size_t i) const { return times_[i + 1] - times_[i]; }
  bool is_uniform(double rel_tol = 1e-9) const;

  //! Grid with points [first, last) of this one.
  TimeGrid slice(std::size_t first, std::size_t last) const;

  bool operator==(const TimeGrid&) const = default;

private:
  std::vector<double> times_;
  std::size_t substeps_ = 200;
};

//! M samples x N grid times x d features, stored sample-major so that one
//! sample's whole trajectory is contiguous.
class Panel
{
public:
  Panel() = default;
  Panel(std::size_t samples, TimeGrid grid, std::size_t features);
  Panel(std::size_t samples,
        TimeGrid grid,
        std::size_t features,
        std::vector<double> data);

  std::size_t samples() const { return samples_; }
  std::size_t length() const { return grid_.size(); }
  std::size_t features() const { return features_; }
  const TimeGrid& grid() const { return grid_; }

  double& operator()(std::size_t m, std::size_t i, std::size_t j)
  {
    return data_[(m * length() + i) * features_ + j];
  }
  double operator()(std::size_t m, std::size_t i, std::size_t j) const
  {
    return data_[(m * length() + i) * features_ + j];
  }

  //! Whole trajectory of sample m: N*d values.
  std::span<const double> row(std::size_t m) const
  {
    return { data_.data() + m * length() * features_, length() * features_ };
  }
  std::span<double> row(std::size_t m)
  {
    return { data_.data() + m * length() * features_, length() * features_ };
  }

  //! State of sample m at grid index i: d values.
  std::span<const double> point(std::size_t m, std::size_t i) const
  {
    return { data_.data() + (m * length() + i) * features_, features_ };
  }
  std::span<double> point(std::size_t m, std::size_t i)
  {
    return { data_.data() + (m * length() + i) * features_, features_ };
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  //! Copy of samples [first, last).
  Panel select_samples(std::size_t first, std::size_t last) const;
  //! Copy of samples with the given indices, in order.
  Panel select_samples(std::span<const std::size_t> indices) const;
  //! Copy restricted to grid points [first, last).
  Panel slice_time(std::size_t first, std::size_t last) const;

  bool operator==(const Panel&) const = default;

private:
  std::size_t samples_ = 0;
  std::size_t features_ = 0;
  TimeGrid grid_;
  std::vector<double> data_;
};

//! Markov order k of the conditioning window; `full()` conditions on the
//! whole available prefix.
class MarkovOrder
{
public:
  constexpr MarkovOrder() = default;
  constexpr explicit MarkovOrder(std::size_t k)
    : k_(k)
  {}
  static constexpr MarkovOrder full() { return MarkovOrder(kFull); }

  constexpr bool is_full() const { return k_ == kFull; }
  constexpr std::size_t value() const { return k_; }

  //! First grid index of the window ending at `last` (inclusive).
  constexpr std::size_t window_start(std::size_t last) const
  {
    if (is_full() || k_ > last)
      return 0;
    return last + 1 - k_;
  }

  std::string str() const;
  static MarkovOrder parse(const std::string& text);

  constexpr bool operator==(const MarkovOrder&) const = default;

private:
  static constexpr std::size_t kFull = std::numeric_limits<std::size_t>::max();
  std::size_t k_ = 1;
};

struct DriftConfig
{
  std::vector<double> bandwidths; // one per feature
  MarkovOrder markov_order{ 1 };
  double weight_floor = 1e-300;

  //! Same bandwidth h for each of `features` features.
  static DriftConfig uniform(double h,
                             std::size_t features,
                             MarkovOrder k = MarkovOrder{ 1 });
  void validate(std::size_t features) const;
};

struct GenerationConfig
{
  std::size_t num_paths = 1;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;

  void validate() const;
};

//! Outcome of a validation pass: empty message means ok.
struct ValidationReport
{
  std::string message;
  std::optional<std::size_t> sample, time_index, feature;

  bool ok() const { return message.empty(); }
  explicit operator bool() const { return ok(); }
};

ValidationReport validate_grid(const TimeGrid& grid);
ValidationReport validate_panel(const Panel& panel);

//! Throws InvalidConfig carrying the report message if `panel` is invalid.
void require_valid(const Panel& panel, const char* what = "panel");

//! Same grid length and feature count.
void require_compatible(const Panel& a, const Panel& b, const char* what);

//! Prepends a grid point at `t0` where every sample sits at the zero vector.
//! Default t0 extrapolates the first grid spacing backwards.
Panel prepend_origin(const Panel& panel, std::optional<double> t0 = {});

//! FNV-1a digest over the grid and values, used to tag generated output.
std::uint64_t panel_digest(const Panel& panel);

} // namespace sbts
