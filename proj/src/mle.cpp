#include "sbts/mle.hpp"

#include "json.hpp"
#include "sbts/io.hpp"
#include "sbts/parallel.hpp"
#include "sbts/random.hpp"
#include "sbts/sampler.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>

namespace sbts {

namespace {

double
guard(double value)
{
  return std::isfinite(value) && value < kNllPenalty ? value : kNllPenalty;
}

} // namespace

double
ou_nll(const OUParams& p, std::span<const double> series, const TimeGrid& grid)
{
  if (series.size() != grid.size())
    throw ShapeError("OU series has " + std::to_string(series.size()) +
                     " values, grid has " + std::to_string(grid.size()));
  if (!(p.theta > 0.0) || !(p.sigma > 0.0))
    return kNllPenalty;

  double nll = 0.0;
  double last_dt = -1.0, decay = 0.0, var = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double dt = grid.spacing(i);
    if (dt != last_dt) {
      decay = std::exp(-p.theta * dt);
      var = p.sigma * p.sigma * (1.0 - decay * decay) / (2.0 * p.theta);
      last_dt = dt;
    }
    const double mean = series[i] * decay + p.mu * (1.0 - decay);
    const double r = series[i + 1] - mean;
    nll += 0.5 * std::log(2.0 * std::numbers::pi * var) + r * r / (2.0 * var);
  }
  return guard(nll);
}

double
heston_nll(const HestonParams& p, std::span<const double> series, const TimeGrid& grid)
{
  if (series.size() != 2 * grid.size())
    throw ShapeError("Heston series needs 2 values per grid point");
  constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  const double one_minus_rho2 = 1.0 - p.rho * p.rho;
  if (!(one_minus_rho2 > 0.0) || !(p.xi > 0.0))
    return kNllPenalty;

  double nll = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid.spacing(i);
    const double v = series[2 * i + 1];
    if (!(v > 0.0))
      return kNllPenalty;
    const double y1 = series[2 * (i + 1)] - series[2 * i];
    const double y2 = series[2 * (i + 1) + 1] - v;
    const double z1 = y1 - (p.r - 0.5 * v) * dt;
    const double z2 = y2 - p.kappa * (p.theta - v) * dt;

    const double s11 = v * dt;
    const double s12 = p.rho * p.xi * v * dt;
    const double s22 = p.xi * p.xi * v * dt;
    const double det = s11 * s22 - s12 * s12;
    if (!(det > 0.0))
      return kNllPenalty;
    const double quad = (s22 * z1 * z1 - 2.0 * s12 * z1 * z2 + s11 * z2 * z2) / det;
    nll += 0.5 * std::log(four_pi_sq * det) + 0.5 * quad;
  }
  return guard(nll);
}

std::vector<double>
ou_nll_gradient(const OUParams& p, std::span<const double> series, const TimeGrid& grid)
{
  if (series.size() != grid.size())
    throw ShapeError("OU series length does not match the grid");
  if (!(p.theta > 0.0) || !(p.sigma > 0.0))
    return {};
  std::vector<double> g(3, 0.0);
  const double s2 = p.sigma * p.sigma;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double dt = grid.spacing(i);
    const double a = std::exp(-p.theta * dt);
    const double one_a2 = 1.0 - a * a;
    const double v = s2 * one_a2 / (2.0 * p.theta);
    const double r = series[i + 1] - (series[i] * a + p.mu * (1.0 - a));

    const double dv = 0.5 / v - r * r / (2.0 * v * v); // d term / d v
    const double dm = -r / v;                            // d term / d mean
    const double v_theta =
      s2 * (2.0 * p.theta * dt * a * a - one_a2) / (2.0 * p.theta * p.theta);
    const double m_theta = -(series[i] - p.mu) * dt * a;
    g[0] += dv * v_theta + dm * m_theta;
    g[1] += dm * (1.0 - a);
    g[2] += dv * p.sigma * one_a2 / p.theta;
  }
  return g;
}

std::vector<double>
heston_nll_gradient(const HestonParams& p,
                    std::span<const double> series,
                    const TimeGrid& grid)
{
  if (series.size() != 2 * grid.size())
    throw ShapeError("Heston series needs 2 values per grid point");
  const double one_minus_rho2 = 1.0 - p.rho * p.rho;
  if (!(one_minus_rho2 > 0.0) || !(p.xi > 0.0))
    return {};
  std::vector<double> g(5, 0.0);
  const double xi = p.xi, rho = p.rho;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid.spacing(i);
    const double v = series[2 * i + 1];
    if (!(v > 0.0))
      return {};
    const double z1 = series[2 * (i + 1)] - series[2 * i] - (p.r - 0.5 * v) * dt;
    const double z2 = series[2 * (i + 1) + 1] - v - p.kappa * (p.theta - v) * dt;

    // q = A (z1^2 - 2 rho z1 z2 / xi + z2^2 / xi^2), A = 1 / (v dt (1 - rho^2))
    const double A = 1.0 / (v * dt * one_minus_rho2);
    const double B = z1 * z1 - 2.0 * rho * z1 * z2 / xi + z2 * z2 / (xi * xi);
    const double q_z1 = A * (2.0 * z1 - 2.0 * rho * z2 / xi);
    const double q_z2 = A * (-2.0 * rho * z1 / xi + 2.0 * z2 / (xi * xi));
    const double q_xi =
      A * (2.0 * rho * z1 * z2 / (xi * xi) - 2.0 * z2 * z2 / (xi * xi * xi));
    const double q_rho = A * 2.0 * rho / one_minus_rho2 * B - A * 2.0 * z1 * z2 / xi;

    g[0] += 0.5 * q_z2 * (-(p.theta - v) * dt);
    g[1] += 0.5 * q_z2 * (-p.kappa * dt);
    g[2] += 1.0 / xi + 0.5 * q_xi;
    g[3] += -rho / one_minus_rho2 + 0.5 * q_rho;
    g[4] += 0.5 * q_z1 * (-dt);
  }
  return g;
}

namespace {

const double kBelowOne = std::nextafter(1.0, 0.0);

double
to_native(double u, Constraint c)
{
  switch (c) {
    case Constraint::positive:
      // exp and tanh saturate in double precision; keep the image open
      return std::max(std::exp(u), std::numeric_limits<double>::min());
    case Constraint::symmetric:
      return std::clamp(std::tanh(u), -kBelowOne, kBelowOne);
    case Constraint::none:
      break;
  }
  return u;
}

double
to_free(double x, Constraint c)
{
  switch (c) {
    case Constraint::positive:
      if (!(x > 0.0))
        throw InvalidConfig("initial point violates a positivity constraint");
      return std::log(x);
    case Constraint::symmetric:
      if (!(std::abs(x) < 1.0))
        throw InvalidConfig("initial point violates |x| < 1");
      return std::atanh(x);
    case Constraint::none:
      break;
  }
  return x;
}

struct Problem
{
  const Objective* objective;
  const std::vector<Constraint>* constraints;
  std::vector<double> native;
};

double
evaluate_free(const gsl_vector* u, void* data)
{
  auto* pb = static_cast<Problem*>(data);
  for (std::size_t k = 0; k < pb->native.size(); ++k)
    pb->native[k] = to_native(gsl_vector_get(u, k), (*pb->constraints)[k]);
  return guard((*pb->objective)(pb->native));
}

struct VectorDeleter
{
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter
{
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

} // namespace

Minimum
minimize(const Objective& objective,
         std::vector<double> start,
         const std::vector<Constraint>& constraints,
         const MinimizeOptions& options)
{
  const std::size_t n = start.size();
  if (n == 0 || constraints.size() != n)
    throw ShapeError("minimize needs one constraint per coordinate");

  // GSL would abort on its own error handler; we check return codes instead.
  static const auto previous = gsl_set_error_handler_off();
  (void)previous;

  Problem pb{ &objective, &constraints, std::vector<double>(n) };
  std::unique_ptr<gsl_vector, VectorDeleter> u(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(u.get(), k, to_free(start[k], constraints[k]));
    gsl_vector_set(step.get(), k, options.initial_step);
  }

  gsl_multimin_function fn{ &evaluate_free, n, &pb };
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
    gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(solver.get(), &fn, u.get(), step.get());

  Minimum result;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    result.iterations = it + 1;
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS)
      break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, options.size_tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }

  const gsl_vector* best = gsl_multimin_fminimizer_x(solver.get());
  result.x.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    result.x[k] = to_native(gsl_vector_get(best, k), constraints[k]);
  result.value = gsl_multimin_fminimizer_minimum(solver.get());
  if (result.value >= kNllPenalty)
    result.converged = false;
  return result;
}

namespace {

template<class Params>
FitResult<Params>
multi_start(const Objective& nll,
            const std::vector<Constraint>& constraints,
            std::span<const Interval> ranges,
            const FitSettings& settings,
            std::uint64_t stream,
            Params (*unpack)(std::span<const double>))
{
  std::vector<std::vector<double>> starts;
  std::vector<double> mid;
  for (const auto& r : ranges)
    mid.push_back(r.mid());
  starts.push_back(mid);
  Rng rng = make_rng(settings.seed, { key(Stream::restarts), stream });
  for (std::size_t r = 0; r < settings.restarts; ++r) {
    std::vector<double> x;
    for (const auto& iv : ranges)
      x.push_back(iv.lo + (iv.hi - iv.lo) * std::generate_canonical<double, 64>(rng));
    starts.push_back(std::move(x));
  }

  FitResult<Params> best;
  std::vector<double> best_x = mid;
  bool have = false;
  for (auto& s : starts) {
    const auto m = minimize(nll, s, constraints, settings.minimize);
    best.iterations += m.iterations;
    // equal optima up to rounding: keep the start that converged
    const double tie = 1e-9 * (1.0 + std::abs(best.nll));
    const bool better = !have || m.value < best.nll - tie ||
                        (m.value < best.nll + tie && m.converged && !best.converged);
    if (better) {
      best.nll = m.value;
      best.converged = m.converged;
      best_x = m.x;
      have = true;
    }
  }
  best.params = unpack(best_x);
  return best;
}

OUParams
unpack_ou(std::span<const double> x)
{
  OUParams p;
  p.theta = x[0];
  p.mu = x[1];
  p.sigma = x[2];
  return p;
}

HestonParams
unpack_heston(std::span<const double> x)
{
  HestonParams p;
  p.kappa = x[0];
  p.theta = x[1];
  p.xi = x[2];
  p.rho = x[3];
  p.r = x[4];
  return p;
}

} // namespace

FitResult<OUParams>
fit_ou(std::span<const double> series,
       const TimeGrid& grid,
       const FitSettings& settings,
       std::uint64_t stream,
       const OURanges& ranges)
{
  if (series.size() != grid.size())
    throw ShapeError("OU series length does not match the grid");
  const Objective nll = [&](std::span<const double> x) {
    return ou_nll(unpack_ou(x), series, grid);
  };
  const Interval iv[] = { ranges.theta, ranges.mu, ranges.sigma };
  auto fit = multi_start<OUParams>(
    nll, { Constraint::positive, Constraint::none, Constraint::positive }, iv,
    settings, stream, &unpack_ou);
  fit.params.x0 = series[0];
  return fit;
}

FitResult<HestonParams>
fit_heston(std::span<const double> series,
           const TimeGrid& grid,
           const FitSettings& settings,
           std::uint64_t stream,
           const HestonRanges& ranges)
{
  if (series.size() != 2 * grid.size())
    throw ShapeError("Heston series length does not match the grid");
  const Objective nll = [&](std::span<const double> x) {
    return heston_nll(unpack_heston(x), series, grid);
  };
  const Interval iv[] = { ranges.kappa, ranges.theta, ranges.xi, ranges.rho,
                          ranges.r };
  auto fit = multi_start<HestonParams>(
    nll,
    { Constraint::positive, Constraint::positive, Constraint::positive,
      Constraint::symmetric, Constraint::none },
    iv, settings, stream, &unpack_heston);
  if (series[1] > 0.0)
    fit.params.v0 = series[1];
  return fit;
}

std::string
to_string(Process p)
{
  return p == Process::ou ? "ou" : "heston";
}

Process
parse_process(const std::string& text)
{
  if (text == "ou")
    return Process::ou;
  if (text == "heston")
    return Process::heston;
  throw InvalidConfig("unknown process '" + text + "' (expected ou or heston)");
}

std::vector<std::string>
parameter_names(Process p)
{
  if (p == Process::ou)
    return { "theta", "mu", "sigma" };
  return { "kappa", "theta", "xi", "rho", "r" };
}

void
RobustnessConfig::validate() const
{
  if (samples < 2)
    throw InvalidConfig("robustness needs at least 2 samples");
  if (auto r = validate_grid(grid); !r)
    throw InvalidConfig("grid: " + r.message);
  if (process == Process::ou)
    ou.validate();
  else
    heston.validate();
  if (selection) {
    if (test_samples < 1 || test_samples >= samples)
      throw InvalidConfig("test_samples must lie in [1, samples)");
  }
}

const ParameterSummary&
RobustnessReport::parameter(const std::string& name) const
{
  for (const auto& s : summary) {
    if (s.name == name)
      return s;
  }
  throw InvalidConfig("no parameter named '" + name + "'");
}

double
percentile(std::vector<double> values, double q)
{
  if (values.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

std::vector<double>
ou_vector(const OUParams& p)
{
  return { p.theta, p.mu, p.sigma };
}

std::vector<double>
heston_vector(const HestonParams& p)
{
  return { p.kappa, p.theta, p.xi, p.rho, p.r };
}

struct FitColumn
{
  std::vector<std::vector<double>> estimates; // [param][series]
  std::vector<double> nll;
  std::vector<bool> converged;
  std::size_t infeasible = 0;
};

FitColumn
fit_panel(const Panel& panel, const RobustnessConfig& cfg, std::uint64_t which)
{
  const std::size_t count = panel.samples();
  const std::size_t np = parameter_names(cfg.process).size();
  std::vector<std::vector<double>> rows(count);
  std::vector<double> nll(count);
  std::vector<char> conv(count);
  parallel_for(count, [&](std::size_t m) {
    const std::uint64_t stream = stream_seed(which, { m });
    if (cfg.process == Process::ou) {
      const auto f = fit_ou(panel.row(m), panel.grid(), cfg.fit, stream, cfg.ou_ranges);
      rows[m] = ou_vector(f.params);
      nll[m] = f.nll;
      conv[m] = f.converged;
    } else {
      const auto f =
        fit_heston(panel.row(m), panel.grid(), cfg.fit, stream, cfg.heston_ranges);
      rows[m] = heston_vector(f.params);
      nll[m] = f.nll;
      conv[m] = f.converged;
    }
  });
  FitColumn col;
  col.estimates.assign(np, std::vector<double>(count));
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t p = 0; p < np; ++p)
      col.estimates[p][m] = rows[m][p];
    col.nll.push_back(nll[m]);
    col.converged.push_back(conv[m] != 0);
    if (nll[m] >= kNllPenalty)
      ++col.infeasible;
  }
  return col;
}

// Estimates of series whose likelihood was finite somewhere.
std::vector<double>
feasible(const std::vector<double>& values, const std::vector<double>& nll)
{
  std::vector<double> out;
  for (std::size_t m = 0; m < values.size(); ++m) {
    if (nll[m] < kNllPenalty)
      out.push_back(values[m]);
  }
  return out;
}

} // namespace

RobustnessReport
run_robustness(const RobustnessConfig& cfg)
{
  cfg.validate();
  const bool ou = cfg.process == Process::ou;
  const std::size_t d = ou ? 1 : 2;
  const double dt = cfg.grid.spacing(0);

  RobustnessReport report;
  report.process = cfg.process;
  report.names = parameter_names(cfg.process);

  // (1) parameters and the real panel
  Panel real;
  if (ou) {
    auto params = cfg.ranged
                    ? sample_ou_params(cfg.ou_ranges, cfg.samples, cfg.seed, cfg.ou)
                    : std::vector<OUParams>(cfg.samples, cfg.ou);
    for (const auto& p : params)
      report.true_params.push_back(ou_vector(p));
    real = simulate_ou(params, cfg.grid, cfg.seed);
  } else {
    auto params =
      cfg.ranged
        ? sample_heston_params(cfg.heston_ranges, cfg.samples, cfg.seed, cfg.heston)
        : std::vector<HestonParams>(cfg.samples, cfg.heston);
    for (const auto& p : params)
      report.true_params.push_back(heston_vector(p));
    auto sim = simulate_heston(params, cfg.grid, cfg.seed, HestonOutput::log_return);
    real = std::move(sim.panel);
    report.floor_events = sim.floor_events;
  }

  // (2) scaling and hyperparameters
  const auto transform = fit_transform(cfg.scaling, real, dt);
  const Panel scaled = transform.apply(real);
  if (cfg.selection) {
    const std::size_t train_n = cfg.samples - cfg.test_samples;
    const auto sel = select(scaled.select_samples(0, train_n),
                            scaled.select_samples(train_n, cfg.samples),
                            *cfg.selection);
    report.drift = sel.chosen_config(cfg.drift.weight_floor);
  } else {
    report.drift = cfg.drift;
    if (report.drift.bandwidths.size() == 1 && d > 1)
      report.drift.bandwidths.assign(d, report.drift.bandwidths[0]);
  }
  report.drift.validate(d);

  // (3) synthetic panel of the same size
  GenerationConfig gen;
  gen.num_paths = cfg.samples;
  gen.seed = cfg.seed;
  auto generated = generate_paths(scaled, report.drift, gen);
  report.generation_fallbacks = generated.provenance.total_fallbacks();
  const Panel synthetic = transform.invert(generated.panel);

  // (4) per-series fits
  auto real_fit = fit_panel(real, cfg, 0);
  auto synth_fit = fit_panel(synthetic, cfg, 1);
  report.real = std::move(real_fit.estimates);
  report.real_nll = std::move(real_fit.nll);
  report.real_converged = std::move(real_fit.converged);
  report.real_infeasible = real_fit.infeasible;
  report.synthetic = std::move(synth_fit.estimates);
  report.synthetic_nll = std::move(synth_fit.nll);
  report.synthetic_converged = std::move(synth_fit.converged);
  report.synthetic_infeasible = synth_fit.infeasible;

  // (5) summaries
  for (std::size_t p = 0; p < report.names.size(); ++p) {
    const auto r = feasible(report.real[p], report.real_nll);
    const auto s = feasible(report.synthetic[p], report.synthetic_nll);
    ParameterSummary ps;
    ps.name = report.names[p];
    ps.real_median = percentile(r, 50);
    ps.synthetic_median = percentile(s, 50);
    ps.real_iqr = percentile(r, 75) - percentile(r, 25);
    ps.synthetic_iqr = percentile(s, 75) - percentile(s, 25);
    ps.real_p01 = percentile(r, 1);
    ps.real_p99 = percentile(r, 99);
    ps.synthetic_p01 = percentile(s, 1);
    ps.synthetic_p99 = percentile(s, 99);
    ps.median_difference = ps.synthetic_median - ps.real_median;
    ps.iqr_difference = ps.synthetic_iqr - ps.real_iqr;
    report.summary.push_back(ps);
  }
  return report;
}

namespace {

std::vector<double>
clipped(const std::vector<double>& values,
        const std::vector<double>& nll,
        double lo,
        double hi)
{
  std::vector<double> out;
  for (std::size_t m = 0; m < values.size(); ++m) {
    if (nll[m] < kNllPenalty && values[m] >= lo && values[m] <= hi)
      out.push_back(values[m]);
  }
  return out;
}

} // namespace

std::string
robustness_json(const RobustnessReport& report)
{
  nlohmann::ordered_json j;
  j["process"] = to_string(report.process);
  j["samples"] = report.real_nll.size();
  nlohmann::ordered_json drift;
  drift["bandwidths"] = report.drift.bandwidths;
  drift["order"] = report.drift.markov_order.str();
  j["drift"] = drift;
  j["generation_fallbacks"] = report.generation_fallbacks;
  j["floor_events"] = report.floor_events;
  j["real_infeasible"] = report.real_infeasible;
  j["synthetic_infeasible"] = report.synthetic_infeasible;
  const auto count_true = [](const std::vector<bool>& v) {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
  };
  j["real_converged"] = count_true(report.real_converged);
  j["synthetic_converged"] = count_true(report.synthetic_converged);

  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < report.names.size(); ++p) {
    const auto& s = report.summary[p];
    nlohmann::ordered_json e;
    e["real_median"] = s.real_median;
    e["synthetic_median"] = s.synthetic_median;
    e["median_difference"] = s.median_difference;
    e["real_iqr"] = s.real_iqr;
    e["synthetic_iqr"] = s.synthetic_iqr;
    e["iqr_difference"] = s.iqr_difference;
    e["real_p01"] = s.real_p01;
    e["real_p99"] = s.real_p99;
    e["synthetic_p01"] = s.synthetic_p01;
    e["synthetic_p99"] = s.synthetic_p99;
    e["real_clipped"] =
      clipped(report.real[p], report.real_nll, s.real_p01, s.real_p99);
    e["synthetic_clipped"] = clipped(report.synthetic[p], report.synthetic_nll,
                                     s.synthetic_p01, s.synthetic_p99);
    params[s.name] = e;
  }
  j["parameters"] = params;
  return j.dump(2) + "\n";
}

void
write_histogram_csv(std::ostream& out,
                    const RobustnessReport& report,
                    std::size_t parameter,
                    std::size_t bins)
{
  if (parameter >= report.summary.size())
    throw InvalidConfig("histogram parameter index out of range");
  if (bins < 1)
    throw InvalidConfig("histogram needs at least one bin");
  const auto& s = report.summary[parameter];
  const auto r =
    clipped(report.real[parameter], report.real_nll, s.real_p01, s.real_p99);
  const auto g = clipped(report.synthetic[parameter], report.synthetic_nll,
                         s.synthetic_p01, s.synthetic_p99);

  double lo = std::min(s.real_p01, s.synthetic_p01);
  double hi = std::max(s.real_p99, s.synthetic_p99);
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (!(hi > lo))
    hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> rc(bins, 0), gc(bins, 0);
  auto bin_of = [&](double v) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    return std::min(b, bins - 1);
  };
  for (double v : r)
    ++rc[bin_of(v)];
  for (double v : g)
    ++gc[bin_of(v)];

  out << "bin_lo,bin_hi,real,synthetic\n";
  for (std::size_t b = 0; b < bins; ++b) {
    out << io::format_double(lo + width * static_cast<double>(b)) << ','
        << io::format_double(lo + width * static_cast<double>(b + 1)) << ','
        << rc[b] << ',' << gc[b] << '\n';
  }
}

} // namespace sbts
