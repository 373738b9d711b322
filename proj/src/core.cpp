#include "sbts/core.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace sbts {

TimeGrid
TimeGrid::uniform(std::size_t n, double dt, double t0, std::size_t substeps)
{
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i)
    times[i] = t0 + static_cast<double>(i) * dt;
  return TimeGrid(std::move(times), substeps);
}

bool
TimeGrid::is_uniform(double rel_tol) const
{
  if (times_.size() < 3)
    return true;
  const double h = spacing(0);
  for (std::size_t i = 1; i + 1 < times_.size(); ++i) {
    if (std::abs(spacing(i) - h) > rel_tol * std::abs(h))
      return false;
  }
  return true;
}

TimeGrid
TimeGrid::slice(std::size_t first, std::size_t last) const
{
  if (first > last || last > times_.size())
    throw ShapeError("grid slice out of range");
  return TimeGrid({ times_.begin() + static_cast<std::ptrdiff_t>(first),
                    times_.begin() + static_cast<std::ptrdiff_t>(last) },
                  substeps_);
}

Panel::Panel(std::size_t samples, TimeGrid grid, std::size_t features)
  : samples_(samples)
  , features_(features)
  , grid_(std::move(grid))
  , data_(samples * grid_.size() * features, 0.0)
{}

Panel::Panel(std::size_t samples,
             TimeGrid grid,
             std::size_t features,
             std::vector<double> data)
  : samples_(samples)
  , features_(features)
  , grid_(std::move(grid))
  , data_(std::move(data))
{
  if (data_.size() != samples_ * grid_.size() * features_) {
    std::ostringstream msg;
    msg << "panel buffer holds " << data_.size() << " values, expected "
        << samples_ << " x " << grid_.size() << " x " << features_;
    throw ShapeError(msg.str());
  }
}

Panel
Panel::select_samples(std::size_t first, std::size_t last) const
{
  if (first > last || last > samples_)
    throw ShapeError("sample range out of bounds");
  const std::size_t stride = length() * features_;
  std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(first * stride),
                          data_.begin() + static_cast<std::ptrdiff_t>(last * stride));
  return Panel(last - first, grid_, features_, std::move(out));
}

Panel
Panel::select_samples(std::span<const std::size_t> indices) const
{
  const std::size_t stride = length() * features_;
  std::vector<double> out;
  out.reserve(indices.size() * stride);
  for (auto m : indices) {
    if (m >= samples_)
      throw ShapeError("sample index out of bounds");
    auto r = row(m);
    out.insert(out.end(), r.begin(), r.end());
  }
  return Panel(indices.size(), grid_, features_, std::move(out));
}

Panel
Panel::slice_time(std::size_t first, std::size_t last) const
{
  Panel out(samples_, grid_.slice(first, last), features_);
  for (std::size_t m = 0; m < samples_; ++m)
    for (std::size_t i = first; i < last; ++i)
      for (std::size_t j = 0; j < features_; ++j)
        out(m, i - first, j) = (*this)(m, i, j);
  return out;
}

std::string
MarkovOrder::str() const
{
  return is_full() ? std::string("full") : std::to_string(k_);
}

MarkovOrder
MarkovOrder::parse(const std::string& text)
{
  if (text == "full")
    return full();
  std::size_t pos = 0;
  long long k = 0;
  try {
    k = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw InvalidConfig("invalid Markov order '" + text + "'");
  }
  if (pos != text.size() || k < 1)
    throw InvalidConfig("invalid Markov order '" + text + "'");
  return MarkovOrder(static_cast<std::size_t>(k));
}

DriftConfig
DriftConfig::uniform(double h, std::size_t features, MarkovOrder k)
{
  return DriftConfig{ std::vector<double>(features, h), k, 1e-300 };
}

void
DriftConfig::validate(std::size_t features) const
{
  if (bandwidths.size() != features)
    throw ShapeError("drift config has " + std::to_string(bandwidths.size()) +
                     " bandwidths for " + std::to_string(features) +
                     " features");
  for (double h : bandwidths) {
    if (!(h > 0.0) || !std::isfinite(h))
      throw InvalidConfig("bandwidths must be positive and finite");
  }
  if (markov_order.value() < 1)
    throw InvalidConfig("Markov order must be at least 1");
  if (!(weight_floor > 0.0))
    throw InvalidConfig("weight_floor must be positive");
}

void
GenerationConfig::validate() const
{
  if (num_paths < 1)
    throw InvalidConfig("num_paths must be at least 1");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
    throw InvalidConfig("noise_scale must be a nonnegative finite number");
}

ValidationReport
validate_grid(const TimeGrid& grid)
{
  if (grid.size() < 2)
    return { "grid needs at least 2 points", {}, {}, {} };
  if (grid.substeps() < 1)
    return { "substeps_per_interval must be at least 1", {}, {}, {} };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]))
      return { "non-finite grid time", {}, i, {} };
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i + 1] > grid[i]))
      return { "non-increasing grid", {}, i + 1, {} };
  }
  return {};
}

ValidationReport
validate_panel(const Panel& panel)
{
  if (panel.samples() < 1)
    return { "panel has no samples", {}, {}, {} };
  if (panel.features() < 1)
    return { "panel has no features", {}, {}, {} };
  if (auto g = validate_grid(panel.grid()); !g)
    return g;
  for (std::size_t m = 0; m < panel.samples(); ++m) {
    for (std::size_t i = 0; i < panel.length(); ++i) {
      for (std::size_t j = 0; j < panel.features(); ++j) {
        if (!std::isfinite(panel(m, i, j))) {
          std::ostringstream msg;
          msg << "non-finite entry at (" << m << "," << i << "," << j << ")";
          return { msg.str(), m, i, j };
        }
      }
    }
  }
  return {};
}

void
require_valid(const Panel& panel, const char* what)
{
  if (auto report = validate_panel(panel); !report)
    throw InvalidConfig(std::string(what) + ": " + report.message);
}

void
require_compatible(const Panel& a, const Panel& b, const char* what)
{
  if (a.length() != b.length() || a.features() != b.features()) {
    std::ostringstream msg;
    msg << what << ": panels differ in shape (" << a.length() << "x"
        << a.features() << " vs " << b.length() << "x" << b.features() << ")";
    throw ShapeError(msg.str());
  }
}

Panel
prepend_origin(const Panel& panel, std::optional<double> t0)
{
  const auto& grid = panel.grid();
  if (grid.size() < 2 && !t0)
    throw ShapeError("cannot extrapolate an origin time from fewer than 2 points");
  const double origin = t0 ? *t0 : grid[0] - grid.spacing(0);
  std::vector<double> times;
  times.reserve(grid.size() + 1);
  times.push_back(origin);
  times.insert(times.end(), grid.times().begin(), grid.times().end());

  Panel out(panel.samples(), TimeGrid(std::move(times), grid.substeps()),
            panel.features());
  for (std::size_t m = 0; m < panel.samples(); ++m)
    for (std::size_t i = 0; i < panel.length(); ++i)
      for (std::size_t j = 0; j < panel.features(); ++j)
        out(m, i + 1, j) = panel(m, i, j);
  return out;
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void
fnv_mix(std::uint64_t& h, std::span<const double> values)
{
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= kFnvPrime;
    }
  }
}

} // namespace

std::uint64_t
panel_digest(const Panel& panel)
{
  std::uint64_t h = kFnvOffset;
  const double shape[] = { static_cast<double>(panel.samples()),
                           static_cast<double>(panel.length()),
                           static_cast<double>(panel.features()) };
  fnv_mix(h, shape);
  fnv_mix(h, panel.grid().times());
  fnv_mix(h, panel.data());
  return h;
}

} // namespace sbts
