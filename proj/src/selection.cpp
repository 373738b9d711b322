#include "sbts/selection.hpp"

#include "json.hpp"
#include "sbts/io.hpp"
#include "sbts/parallel.hpp"
#include "sbts/random.hpp"
#include "sbts/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace sbts {

SelectionConfig
SelectionConfig::scalar(std::vector<double> bandwidths,
                        std::vector<MarkovOrder> orders,
                        std::size_t realizations,
                        std::uint64_t seed)
{
  SelectionConfig cfg;
  for (double h : bandwidths)
    cfg.bandwidth_grid.push_back({ h });
  cfg.order_grid = std::move(orders);
  cfg.realizations = realizations;
  cfg.seed = seed;
  return cfg;
}

void
SelectionConfig::validate(std::size_t features) const
{
  if (bandwidth_grid.empty())
    throw InvalidConfig("bandwidth grid is empty");
  if (order_grid.empty())
    throw InvalidConfig("Markov order grid is empty");
  for (const auto& h : bandwidth_grid) {
    if (h.size() != 1 && h.size() != features)
      throw ShapeError("bandwidth candidates need 1 or " +
                       std::to_string(features) + " values");
    for (double v : h) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidConfig("bandwidth candidates must be positive");
    }
  }
  for (auto k : order_grid) {
    if (k.value() < 1)
      throw InvalidConfig("Markov order candidates must be at least 1");
  }
  if (realizations < 1)
    throw InvalidConfig("realizations_per_test must be at least 1");
}

const SelectionCell&
SelectionReport::cell(std::size_t bandwidth_index, std::size_t order_index) const
{
  for (const auto& c : cells) {
    if (c.bandwidth_index == bandwidth_index && c.order_index == order_index)
      return c;
  }
  throw InvalidConfig("no such selection cell");
}

DriftConfig
SelectionReport::chosen_config(double weight_floor) const
{
  return DriftConfig{ best().bandwidths, best().order, weight_floor };
}

namespace {

// Strict preference order used for tie-breaking.
bool
prefer(const SelectionCell& a, const SelectionCell& b)
{
  if (a.bandwidths != b.bandwidths)
    return std::lexicographical_compare(a.bandwidths.begin(), a.bandwidths.end(),
                                        b.bandwidths.begin(), b.bandwidths.end());
  return a.order.value() < b.order.value();
}

} // namespace

SelectionReport
select(const Panel& train, const Panel& test, const SelectionConfig& cfg)
{
  require_valid(train, "train panel");
  require_valid(test, "test panel");
  require_compatible(train, test, "selection");
  const std::size_t d = train.features();
  const std::size_t n = train.length();
  cfg.validate(d);

  SelectionReport report;
  for (std::size_t hi = 0; hi < cfg.bandwidth_grid.size(); ++hi) {
    for (std::size_t ki = 0; ki < cfg.order_grid.size(); ++ki) {
      SelectionCell c;
      c.bandwidth_index = hi;
      c.order_index = ki;
      const auto& h = cfg.bandwidth_grid[hi];
      c.bandwidths = h.size() == 1 ? std::vector<double>(d, h[0]) : h;
      c.order = cfg.order_grid[ki];
      report.cells.push_back(std::move(c));
    }
  }

  const std::size_t q_count = test.samples();
  const std::size_t jobs = report.cells.size() * q_count;
  std::vector<double> sq_error(jobs, 0.0);
  std::vector<std::size_t> fallbacks(jobs, 0);

  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t c = job / q_count;
    const std::size_t q = job % q_count;
    const auto& cell = report.cells[c];
    const DriftConfig drift{ cell.bandwidths, cell.order, cfg.weight_floor };
    const GenerationConfig gen{ cfg.realizations,
                                stream_seed(cfg.seed, { key(Stream::conditional), q }),
                                cfg.noise_scale };
    const auto row = test.row(q);
    const auto terminals =
      generate_conditional_terminals(row.first((n - 1) * d), train, drift, gen);
    const auto mean = terminals.mean();
    double err = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = mean[k] - row[(n - 1) * d + k];
      err += diff * diff;
    }
    sq_error[job] = err;
    fallbacks[job] = terminals.total_fallbacks();
  });

  const double draws = static_cast<double>(q_count * cfg.realizations);
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    double sum = 0.0;
    std::size_t fb = 0;
    for (std::size_t q = 0; q < q_count; ++q) {
      sum += sq_error[c * q_count + q];
      fb += fallbacks[c * q_count + q];
    }
    auto& cell = report.cells[c];
    cell.mse = sum / static_cast<double>(q_count);
    cell.fallback_rate = static_cast<double>(fb) / draws;
    cell.unreliable = cell.fallback_rate > 0.5;
  }

  double min_mse = report.cells.front().mse;
  for (const auto& c : report.cells)
    min_mse = std::min(min_mse, c.mse);
  bool found = false;
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const auto& cell = report.cells[c];
    if (cell.mse - min_mse > cfg.tie_tolerance)
      continue;
    if (!found || prefer(cell, report.cells[report.chosen])) {
      report.chosen = c;
      found = true;
    }
  }
  return report;
}

namespace {

std::string
join_bandwidths(const std::vector<double>& h)
{
  // Uniform vectors print as a single value.
  if (std::all_of(h.begin(), h.end(), [&](double v) { return v == h.front(); }))
    return io::format_double(h.front());
  std::string out;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k > 0)
      out += ';';
    out += io::format_double(h[k]);
  }
  return out;
}

} // namespace

void
write_selection_csv(std::ostream& out, const SelectionReport& report)
{
  out << "h,k,mse,fallback_rate\n";
  for (const auto& c : report.cells) {
    out << join_bandwidths(c.bandwidths) << ',' << c.order.str() << ','
        << io::format_double(c.mse) << ',' << io::format_double(c.fallback_rate)
        << '\n';
  }
}

std::string
selection_choice_json(const SelectionReport& report)
{
  const auto& best = report.best();
  nlohmann::ordered_json j;
  j["bandwidths"] = best.bandwidths;
  if (best.order.is_full())
    j["order"] = "full";
  else
    j["order"] = best.order.value();
  j["mse"] = best.mse;
  j["fallback_rate"] = best.fallback_rate;
  j["unreliable"] = best.unreliable;
  nlohmann::ordered_json unreliable = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    if (c.unreliable)
      unreliable.push_back({ { "h", join_bandwidths(c.bandwidths) },
                             { "k", c.order.str() } });
  }
  j["unreliable_cells"] = unreliable;
  return j.dump(2) + "\n";
}

} // namespace sbts
