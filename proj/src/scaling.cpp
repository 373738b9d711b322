#include "sbts/scaling.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbts {

namespace {

struct Moments
{
  double mean = 0.0;
  double sd = 0.0;
};

// Pooled mean and unbiased standard deviation of one feature.
Moments
feature_moments(const Panel& p, std::size_t j)
{
  const std::size_t count = p.samples() * p.length();
  double sum = 0.0;
  for (std::size_t m = 0; m < p.samples(); ++m)
    for (std::size_t i = 0; i < p.length(); ++i)
      sum += p(m, i, j);
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t m = 0; m < p.samples(); ++m)
    for (std::size_t i = 0; i < p.length(); ++i) {
      const double diff = p(m, i, j) - mean;
      ss += diff * diff;
    }
  const double var = count > 1 ? ss / static_cast<double>(count - 1) : 0.0;
  return { mean, std::sqrt(var) };
}

void
require_nondegenerate(double statistic, std::size_t j, const char* what)
{
  if (!(statistic > 0.0) || !std::isfinite(statistic))
    throw DomainError(std::string("degenerate feature ") + std::to_string(j) +
                      ": " + what + " is zero");
}

void
require_dt(double dt)
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw InvalidConfig("dt must be positive");
}

} // namespace

std::string
to_string(ScalingMode mode)
{
  switch (mode) {
    case ScalingMode::identity:
      return "identity";
    case ScalingMode::log_return_rescale:
      return "log_return_rescale";
    case ScalingMode::increment_rescale:
      return "increment_rescale";
    case ScalingMode::standardize:
      return "standardize";
    case ScalingMode::min_max:
      return "min_max";
  }
  return "identity";
}

ScalingMode
parse_scaling_mode(const std::string& text)
{
  for (auto mode : { ScalingMode::identity, ScalingMode::log_return_rescale,
                     ScalingMode::increment_rescale, ScalingMode::standardize,
                     ScalingMode::min_max }) {
    if (to_string(mode) == text)
      return mode;
  }
  throw InvalidConfig("unknown scaling mode '" + text + "'");
}

double
ScalingTransform::factor(std::size_t feature) const
{
  switch (mode) {
    case ScalingMode::identity:
      return 1.0;
    case ScalingMode::log_return_rescale:
    case ScalingMode::increment_rescale:
      return std::sqrt(dt) / statistic[feature];
    case ScalingMode::standardize:
    case ScalingMode::min_max:
      return 1.0 / statistic[feature];
  }
  return 1.0;
}

namespace {

void
check_transform_shape(const ScalingTransform& t, const Panel& p)
{
  if (t.mode == ScalingMode::identity)
    return;
  if (t.statistic.size() != p.features() || t.offset.size() != p.features())
    throw ShapeError("transform was fitted to " +
                     std::to_string(t.statistic.size()) +
                     " features, panel has " + std::to_string(p.features()));
}

} // namespace

Panel
ScalingTransform::apply(const Panel& panel) const
{
  check_transform_shape(*this, panel);
  if (mode == ScalingMode::identity)
    return panel;
  Panel out = panel;
  for (std::size_t j = 0; j < panel.features(); ++j) {
    const double f = factor(j);
    for (std::size_t m = 0; m < panel.samples(); ++m)
      for (std::size_t i = 0; i < panel.length(); ++i)
        out(m, i, j) = (panel(m, i, j) - offset[j]) * f;
  }
  return out;
}

Panel
ScalingTransform::invert(const Panel& panel) const
{
  check_transform_shape(*this, panel);
  if (mode == ScalingMode::identity)
    return panel;
  Panel out = panel;
  for (std::size_t j = 0; j < panel.features(); ++j) {
    const double f = factor(j);
    for (std::size_t m = 0; m < panel.samples(); ++m)
      for (std::size_t i = 0; i < panel.length(); ++i)
        out(m, i, j) = panel(m, i, j) / f + offset[j];
  }
  return out;
}

std::string
ScalingTransform::to_json() const
{
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["dt"] = dt;
  j["statistic"] = statistic;
  j["offset"] = offset;
  return j.dump(2) + "\n";
}

ScalingTransform
ScalingTransform::from_json(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("transform JSON: ") + e.what());
  }
  ScalingTransform t;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k != "mode" && k != "dt" && k != "statistic" && k != "offset")
        throw InvalidConfig("transform JSON: unknown key '" + k + "'");
    }
    t.mode = parse_scaling_mode(j.at("mode").get<std::string>());
    t.dt = j.value("dt", 0.0);
    t.statistic = j.value("statistic", std::vector<double>{});
    t.offset = j.value("offset", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("transform JSON: ") + e.what());
  }
  if (t.statistic.size() != t.offset.size())
    throw InvalidConfig("transform JSON: statistic and offset differ in length");
  for (std::size_t k = 0; k < t.statistic.size(); ++k)
    if (t.mode != ScalingMode::identity)
      require_nondegenerate(t.statistic[k], k, "stored statistic");
  return t;
}

Panel
to_log_returns(const Panel& prices)
{
  require_valid(prices, "price panel");
  if (prices.length() < 3)
    throw ShapeError("log returns need at least 3 price points");
  for (std::size_t m = 0; m < prices.samples(); ++m)
    for (std::size_t i = 0; i < prices.length(); ++i)
      for (std::size_t j = 0; j < prices.features(); ++j) {
        if (!(prices(m, i, j) > 0.0)) {
          std::ostringstream msg;
          msg << "nonpositive price " << prices(m, i, j) << " at (" << m << ","
              << i << "," << j << ")";
          throw DomainError(msg.str());
        }
      }

  Panel out(prices.samples(), prices.grid().slice(1, prices.length()),
            prices.features());
  for (std::size_t m = 0; m < prices.samples(); ++m)
    for (std::size_t i = 0; i + 1 < prices.length(); ++i)
      for (std::size_t j = 0; j < prices.features(); ++j)
        out(m, i, j) = std::log(prices(m, i + 1, j) / prices(m, i, j));
  return out;
}

std::pair<Panel, ScalingTransform>
rescale_returns(const Panel& returns, double dt)
{
  auto t = fit_transform(ScalingMode::log_return_rescale, returns, dt);
  return { t.apply(returns), std::move(t) };
}

Panel
returns_to_base_one(const Panel& returns, const ScalingTransform& transform)
{
  require_valid(returns, "return panel");
  const Panel raw = transform.invert(returns);
  Panel out = prepend_origin(raw);
  for (std::size_t m = 0; m < raw.samples(); ++m) {
    for (std::size_t j = 0; j < raw.features(); ++j) {
      double level = 1.0;
      out(m, 0, j) = level;
      for (std::size_t i = 0; i < raw.length(); ++i) {
        level *= std::exp(raw(m, i, j));
        out(m, i + 1, j) = level;
      }
    }
  }
  return out;
}

std::pair<Panel, ScalingTransform>
rescale_increments(const Panel& levels, double dt)
{
  auto t = fit_transform(ScalingMode::increment_rescale, levels, dt);
  return { t.apply(levels), std::move(t) };
}

std::pair<Panel, ScalingTransform>
standardize(const Panel& panel)
{
  auto t = fit_transform(ScalingMode::standardize, panel, 0.0);
  return { t.apply(panel), std::move(t) };
}

std::pair<Panel, ScalingTransform>
min_max(const Panel& panel)
{
  auto t = fit_transform(ScalingMode::min_max, panel, 0.0);
  return { t.apply(panel), std::move(t) };
}

ScalingTransform
fit_transform(ScalingMode mode, const Panel& panel, double dt)
{
  require_valid(panel, "panel");
  const std::size_t d = panel.features();
  ScalingTransform t;
  t.mode = mode;
  if (mode == ScalingMode::identity)
    return t;
  t.statistic.assign(d, 0.0);
  t.offset.assign(d, 0.0);

  switch (mode) {
    case ScalingMode::log_return_rescale:
      require_dt(dt);
      t.dt = dt;
      for (std::size_t j = 0; j < d; ++j) {
        t.statistic[j] = feature_moments(panel, j).sd;
        require_nondegenerate(t.statistic[j], j, "standard deviation");
      }
      break;
    case ScalingMode::increment_rescale: {
      require_dt(dt);
      t.dt = dt;
      Panel diffs(panel.samples(), panel.grid().slice(1, panel.length()), d);
      for (std::size_t m = 0; m < panel.samples(); ++m)
        for (std::size_t i = 0; i + 1 < panel.length(); ++i)
          for (std::size_t j = 0; j < d; ++j)
            diffs(m, i, j) = panel(m, i + 1, j) - panel(m, i, j);
      for (std::size_t j = 0; j < d; ++j) {
        double start = 0.0;
        for (std::size_t m = 0; m < panel.samples(); ++m)
          start += panel(m, 0, j);
        t.offset[j] = start / static_cast<double>(panel.samples());
        t.statistic[j] = feature_moments(diffs, j).sd;
        require_nondegenerate(t.statistic[j], j, "increment standard deviation");
      }
      break;
    }
    case ScalingMode::standardize:
      for (std::size_t j = 0; j < d; ++j) {
        const auto mom = feature_moments(panel, j);
        t.offset[j] = mom.mean;
        t.statistic[j] = mom.sd;
        require_nondegenerate(t.statistic[j], j, "standard deviation");
      }
      break;
    case ScalingMode::min_max:
      for (std::size_t j = 0; j < d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t m = 0; m < panel.samples(); ++m)
          for (std::size_t i = 0; i < panel.length(); ++i) {
            lo = std::min(lo, panel(m, i, j));
            hi = std::max(hi, panel(m, i, j));
          }
        t.offset[j] = lo;
        t.statistic[j] = hi - lo;
        require_nondegenerate(t.statistic[j], j, "range");
      }
      break;
    case ScalingMode::identity:
      break;
  }
  return t;
}

} // namespace sbts
