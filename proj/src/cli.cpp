#include "sbts/cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"
#include "sbts/io.hpp"
#include "sbts/metrics.hpp"
#include "sbts/mle.hpp"
#include "sbts/parallel.hpp"
#include "sbts/sampler.hpp"
#include "sbts/scaling.hpp"
#include "sbts/selection.hpp"
#include "sbts/simulators.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#ifndef SBTS_VERSION
#define SBTS_VERSION "0.0.0"
#endif

namespace sbts::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string
version()
{
  return SBTS_VERSION;
}

namespace {

// ---- config access -------------------------------------------------------

void
check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!obj.is_object())
    throw InvalidConfig(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known)
      throw InvalidConfig("unknown key '" + item.key() + "' in " + where);
  }
}

template<class T>
T
convert(const json& value, const std::string& what)
{
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw InvalidConfig(what + " has the wrong type");
  }
}

template<class T>
T
required(const json& obj, const char* key, const std::string& where)
{
  if (!obj.contains(key))
    throw InvalidConfig("missing key '" + std::string(key) + "' in " + where);
  return convert<T>(obj.at(key), "'" + std::string(key) + "' in " + where);
}

template<class T>
T
optional(const json& obj, const char* key, T fallback, const std::string& where)
{
  if (!obj.contains(key))
    return fallback;
  return convert<T>(obj.at(key), "'" + std::string(key) + "' in " + where);
}

double
positive(double v, const char* what)
{
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidConfig(std::string(what) + " must be positive");
  return v;
}

struct Context
{
  fs::path base;
  std::ostream& log;
  bool verbose = false;
  std::optional<std::uint64_t> seed_override;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;

  fs::path input(const json& cfg, const char* key, const std::string& where)
  {
    auto p = resolve(required<std::string>(cfg, key, where));
    inputs.push_back(p);
    return p;
  }
  fs::path output(const json& cfg, const char* key, const std::string& where)
  {
    auto p = resolve(required<std::string>(cfg, key, where));
    outputs.push_back(p);
    return p;
  }
  std::optional<fs::path> maybe_output(const json& cfg, const char* key)
  {
    if (!cfg.contains(key))
      return std::nullopt;
    return output(cfg, key, "config");
  }
  fs::path resolve(const std::string& p) const
  {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
  }
  std::uint64_t seed(const json& cfg) const
  {
    if (seed_override)
      return *seed_override;
    return optional<std::uint64_t>(cfg, "seed", 0, "config");
  }
  void note(const std::string& msg) const
  {
    if (verbose)
      log << "sbts: " << msg << '\n';
  }

  // Outputs must not overwrite inputs or each other.
  void check_paths() const
  {
    std::set<fs::path> seen;
    for (const auto& o : outputs) {
      const auto canon = fs::weakly_canonical(o);
      for (const auto& i : inputs) {
        if (fs::weakly_canonical(i) == canon)
          throw InvalidConfig("output " + o.string() + " would overwrite an input");
      }
      if (!seen.insert(canon).second)
        throw InvalidConfig("output " + o.string() + " is declared twice");
    }
  }
};

TimeGrid
parse_grid(const json& cfg)
{
  const std::string where = "grid";
  const json& g = cfg.contains("grid") ? cfg.at("grid") : json();
  if (g.is_null())
    throw InvalidConfig("missing key 'grid' in config");
  check_keys(g, { "N", "dt", "t0", "substeps", "times" }, where);
  const auto substeps = optional<std::size_t>(g, "substeps", 200, where);
  if (substeps < 1)
    throw InvalidConfig("grid substeps must be at least 1");
  TimeGrid grid;
  if (g.contains("times")) {
    if (g.contains("N") || g.contains("dt") || g.contains("t0"))
      throw InvalidConfig("grid takes either 'times' or N/dt/t0");
    grid = TimeGrid(required<std::vector<double>>(g, "times", where), substeps);
  } else {
    const auto n = required<std::size_t>(g, "N", where);
    const double dt = positive(required<double>(g, "dt", where), "grid dt");
    grid = TimeGrid::uniform(n, dt, optional<double>(g, "t0", 0.0, where), substeps);
  }
  if (auto r = validate_grid(grid); !r)
    throw InvalidConfig("grid: " + r.message);
  return grid;
}

std::vector<double>
number_or_array(const json& v, const std::string& what)
{
  if (v.is_number())
    return { v.get<double>() };
  return convert<std::vector<double>>(v, what);
}

MarkovOrder
parse_order(const json& v, const std::string& what)
{
  if (v.is_string())
    return MarkovOrder::parse(v.get<std::string>());
  const auto k = convert<std::size_t>(v, what);
  if (k < 1)
    throw InvalidConfig(what + " must be at least 1");
  return MarkovOrder(k);
}

std::string
hex(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string
panel_csv(const Panel& p)
{
  std::ostringstream s;
  io::write_panel_csv(s, p);
  return s.str();
}

void
write(const fs::path& path, const std::string& contents, const Context& ctx)
{
  ctx.note("writing " + path.string());
  io::write_file_atomic(path, contents);
}

Panel
read_panel(const fs::path& path, const TimeGrid& grid, const Context& ctx)
{
  ctx.note("reading " + path.string());
  return io::read_panel_csv(path, grid);
}

// ---- process parameters --------------------------------------------------

OUParams
parse_ou(const json& p)
{
  const std::string where = "OU params";
  check_keys(p, { "theta", "mu", "sigma", "x0" }, where);
  OUParams o;
  o.theta = optional(p, "theta", o.theta, where);
  o.mu = optional(p, "mu", o.mu, where);
  o.sigma = optional(p, "sigma", o.sigma, where);
  o.x0 = optional(p, "x0", o.x0, where);
  o.validate();
  return o;
}

HestonParams
parse_heston(const json& p)
{
  const std::string where = "Heston params";
  check_keys(p, { "kappa", "theta", "xi", "rho", "r", "v0", "x0" }, where);
  HestonParams h;
  h.kappa = optional(p, "kappa", h.kappa, where);
  h.theta = optional(p, "theta", h.theta, where);
  h.xi = optional(p, "xi", h.xi, where);
  h.rho = optional(p, "rho", h.rho, where);
  h.r = optional(p, "r", h.r, where);
  h.v0 = optional(p, "v0", h.v0, where);
  h.x0 = optional(p, "x0", h.x0, where);
  h.validate();
  return h;
}

Interval
parse_interval(const json& r, const char* key, Interval fallback, const std::string& where)
{
  if (!r.contains(key))
    return fallback;
  const auto v = convert<std::vector<double>>(r.at(key), std::string(key) + " range");
  if (v.size() != 2 || !(v[0] <= v[1]))
    throw InvalidConfig(std::string(key) + " range in " + where + " must be [lo, hi]");
  return { v[0], v[1] };
}

OURanges
parse_ou_ranges(const json& r)
{
  const std::string where = "OU ranges";
  check_keys(r, { "theta", "mu", "sigma" }, where);
  OURanges o;
  o.theta = parse_interval(r, "theta", o.theta, where);
  o.mu = parse_interval(r, "mu", o.mu, where);
  o.sigma = parse_interval(r, "sigma", o.sigma, where);
  return o;
}

HestonRanges
parse_heston_ranges(const json& r)
{
  const std::string where = "Heston ranges";
  check_keys(r, { "kappa", "theta", "xi", "rho", "r" }, where);
  HestonRanges h;
  h.kappa = parse_interval(r, "kappa", h.kappa, where);
  h.theta = parse_interval(r, "theta", h.theta, where);
  h.xi = parse_interval(r, "xi", h.xi, where);
  h.rho = parse_interval(r, "rho", h.rho, where);
  h.r = parse_interval(r, "r", h.r, where);
  return h;
}

json
params_or_empty(const json& cfg)
{
  return cfg.contains("params") ? cfg.at("params") : json::object();
}

// ---- subcommands ---------------------------------------------------------

ojson
cmd_simulate(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "process", "params", "ranges", "samples", "grid", "seed", "output",
               "params_output", "heston_output" },
             "simulate config");
  const auto process = required<std::string>(cfg, "process", "config");
  const auto samples = required<std::size_t>(cfg, "samples", "config");
  if (samples < 1)
    throw InvalidConfig("samples must be at least 1");
  const TimeGrid grid = parse_grid(cfg);
  const std::uint64_t seed = ctx.seed(cfg);
  const auto out_path = ctx.output(cfg, "output", "config");
  const auto params_path = ctx.maybe_output(cfg, "params_output");
  const json params = params_or_empty(cfg);
  const bool ranged = cfg.contains("ranges");
  if (ranged && process != "ou" && process != "heston")
    throw InvalidConfig("parameter ranges are only supported for ou and heston");
  if (cfg.contains("heston_output") && process != "heston")
    throw InvalidConfig("heston_output only applies to the heston process");
  if (params_path && !ranged)
    throw InvalidConfig("params_output needs parameter ranges");
  ctx.check_paths();

  ojson summary;
  Panel panel;
  std::ostringstream param_csv;
  if (process == "ou") {
    const auto base = parse_ou(params);
    std::vector<OUParams> per(samples, base);
    if (ranged)
      per = sample_ou_params(parse_ou_ranges(cfg.at("ranges")), samples, seed, base);
    param_csv << "sample,theta,mu,sigma\n";
    for (std::size_t m = 0; m < per.size(); ++m)
      param_csv << m << ',' << io::format_double(per[m].theta) << ','
                << io::format_double(per[m].mu) << ','
                << io::format_double(per[m].sigma) << '\n';
    panel = simulate_ou(per, grid, seed);
  } else if (process == "heston") {
    const auto base = parse_heston(params);
    const auto kind = optional<std::string>(cfg, "heston_output", "log_return", "config");
    HestonOutput output;
    if (kind == "log_return")
      output = HestonOutput::log_return;
    else if (kind == "price")
      output = HestonOutput::price;
    else
      throw InvalidConfig("heston_output must be log_return or price");
    std::vector<HestonParams> per(samples, base);
    if (ranged)
      per = sample_heston_params(parse_heston_ranges(cfg.at("ranges")), samples, seed, base);
    param_csv << "sample,kappa,theta,xi,rho,r\n";
    for (std::size_t m = 0; m < per.size(); ++m)
      param_csv << m << ',' << io::format_double(per[m].kappa) << ','
                << io::format_double(per[m].theta) << ','
                << io::format_double(per[m].xi) << ','
                << io::format_double(per[m].rho) << ','
                << io::format_double(per[m].r) << '\n';
    auto sim = simulate_heston(per, grid, seed, output);
    panel = std::move(sim.panel);
    summary["floor_events"] = sim.floor_events;
  } else if (process == "garch") {
    const std::string where = "GARCH params";
    check_keys(params,
               { "alpha0", "alpha1", "alpha2", "noise_variance", "burn_in", "zero_noise" },
               where);
    GarchOptions o;
    o.alpha0 = optional(params, "alpha0", o.alpha0, where);
    o.alpha1 = optional(params, "alpha1", o.alpha1, where);
    o.alpha2 = optional(params, "alpha2", o.alpha2, where);
    o.noise_variance = optional(params, "noise_variance", o.noise_variance, where);
    o.burn_in = optional(params, "burn_in", o.burn_in, where);
    o.zero_noise = optional(params, "zero_noise", o.zero_noise, where);
    panel = simulate_garch2(grid, samples, seed, o);
  } else if (process == "sine") {
    check_keys(params, { "features" }, "sine params");
    panel = simulate_sine(grid, samples, seed,
                          optional<std::size_t>(params, "features", 5, "sine params"));
  } else if (process == "ar") {
    const std::string where = "AR params";
    check_keys(params, { "features", "phi", "sigma" }, where);
    AROptions o;
    o.features = optional(params, "features", o.features, where);
    o.phi = optional(params, "phi", o.phi, where);
    o.sigma = optional(params, "sigma", o.sigma, where);
    panel = simulate_ar(grid, samples, seed, o);
  } else if (process == "fbm") {
    check_keys(params, { "hurst" }, "fBM params");
    panel = simulate_fbm(optional(params, "hurst", 0.5, "fBM params"), grid, samples, seed);
  } else {
    throw InvalidConfig("unknown process '" + process +
                        "' (expected ou, heston, garch, sine, ar or fbm)");
  }

  write(out_path, panel_csv(panel), ctx);
  if (params_path)
    write(*params_path, param_csv.str(), ctx);
  summary["command"] = "simulate";
  summary["process"] = process;
  summary["samples"] = panel.samples();
  summary["length"] = panel.length();
  summary["features"] = panel.features();
  summary["output"] = out_path.string();
  summary["digest"] = hex(panel_digest(panel));
  return summary;
}

ojson
cmd_scale(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "input", "grid", "direction", "mode", "dt", "log_returns",
               "prepend_origin", "transform", "output" },
             "scale config");
  const TimeGrid grid = parse_grid(cfg);
  const auto direction = optional<std::string>(cfg, "direction", "forward", "config");
  const bool log_returns = optional(cfg, "log_returns", false, "config");
  const bool origin = optional(cfg, "prepend_origin", false, "config");
  const auto in_path = ctx.input(cfg, "input", "config");
  const auto out_path = ctx.output(cfg, "output", "config");

  ojson summary;
  summary["command"] = "scale";
  summary["direction"] = direction;
  if (direction == "forward") {
    const auto mode = parse_scaling_mode(required<std::string>(cfg, "mode", "config"));
    const double dt = positive(optional(cfg, "dt", grid.spacing(0), "config"), "dt");
    const auto transform_path = ctx.output(cfg, "transform", "config");
    ctx.check_paths();
    Panel panel = read_panel(in_path, grid, ctx);
    if (log_returns)
      panel = to_log_returns(panel);
    const auto transform = fit_transform(mode, panel, dt);
    Panel scaled = transform.apply(panel);
    if (origin)
      scaled = prepend_origin(scaled);
    write(out_path, panel_csv(scaled), ctx);
    write(transform_path, transform.to_json(), ctx);
    summary["mode"] = to_string(mode);
    summary["length"] = scaled.length();
    summary["output"] = out_path.string();
    summary["transform"] = transform_path.string();
    summary["digest"] = hex(panel_digest(scaled));
  } else if (direction == "inverse") {
    if (cfg.contains("mode") || cfg.contains("dt"))
      throw InvalidConfig("inverse scaling reads mode and dt from the transform file");
    const auto transform_path = ctx.input(cfg, "transform", "config");
    ctx.check_paths();
    const auto transform = ScalingTransform::from_json(io::read_file(transform_path));
    Panel panel = read_panel(in_path, grid, ctx);
    if (origin) {
      if (panel.length() < 2)
        throw ShapeError("cannot drop the origin of a single-point panel");
      panel = panel.slice_time(1, panel.length());
    }
    const Panel out =
      log_returns ? returns_to_base_one(panel, transform) : transform.invert(panel);
    write(out_path, panel_csv(out), ctx);
    summary["mode"] = to_string(transform.mode);
    summary["length"] = out.length();
    summary["output"] = out_path.string();
    summary["digest"] = hex(panel_digest(out));
  } else {
    throw InvalidConfig("direction must be forward or inverse");
  }
  return summary;
}

std::vector<std::vector<double>>
parse_bandwidth_grid(const json& v)
{
  if (!v.is_array() || v.empty())
    throw InvalidConfig("'bandwidths' must be a non-empty array");
  std::vector<std::vector<double>> out;
  for (const auto& e : v)
    out.push_back(number_or_array(e, "bandwidth candidate"));
  return out;
}

std::vector<MarkovOrder>
parse_order_grid(const json& v)
{
  if (!v.is_array() || v.empty())
    throw InvalidConfig("'orders' must be a non-empty array");
  std::vector<MarkovOrder> out;
  for (const auto& e : v)
    out.push_back(parse_order(e, "order candidate"));
  return out;
}

ojson
cmd_select(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "input", "test_input", "test_samples", "grid", "bandwidths", "orders",
               "realizations", "seed", "noise_scale", "weight_floor", "output_csv",
               "output_json" },
             "select config");
  const TimeGrid grid = parse_grid(cfg);
  const auto in_path = ctx.input(cfg, "input", "config");
  std::optional<fs::path> test_path;
  if (cfg.contains("test_input")) {
    if (cfg.contains("test_samples"))
      throw InvalidConfig("give either test_input or test_samples");
    test_path = ctx.input(cfg, "test_input", "config");
  }
  SelectionConfig sel;
  sel.bandwidth_grid = parse_bandwidth_grid(cfg.contains("bandwidths") ? cfg.at("bandwidths")
                                                                       : json());
  sel.order_grid = parse_order_grid(cfg.contains("orders") ? cfg.at("orders") : json());
  sel.realizations = optional(cfg, "realizations", sel.realizations, "config");
  sel.seed = ctx.seed(cfg);
  sel.noise_scale = optional(cfg, "noise_scale", sel.noise_scale, "config");
  sel.weight_floor = optional(cfg, "weight_floor", sel.weight_floor, "config");
  const auto csv_path = ctx.output(cfg, "output_csv", "config");
  const auto json_path = ctx.output(cfg, "output_json", "config");
  ctx.check_paths();

  const Panel input = read_panel(in_path, grid, ctx);
  Panel train, test;
  if (test_path) {
    train = input;
    test = read_panel(*test_path, grid, ctx);
  } else {
    const auto q = optional<std::size_t>(cfg, "test_samples",
                                         std::max<std::size_t>(1, input.samples() / 10),
                                         "config");
    if (q < 1 || q >= input.samples())
      throw InvalidConfig("test_samples must lie in [1, samples)");
    train = input.select_samples(0, input.samples() - q);
    test = input.select_samples(input.samples() - q, input.samples());
  }
  sel.validate(input.features());
  ctx.note("grid search over " +
           std::to_string(sel.bandwidth_grid.size() * sel.order_grid.size()) + " cells");
  const auto report = select(train, test, sel);

  std::ostringstream csv;
  write_selection_csv(csv, report);
  write(csv_path, csv.str(), ctx);
  write(json_path, selection_choice_json(report), ctx);

  const auto& best = report.best();
  ojson summary;
  summary["command"] = "select";
  summary["bandwidths"] = best.bandwidths;
  summary["order"] = best.order.str();
  summary["mse"] = best.mse;
  summary["unreliable"] = best.unreliable;
  summary["output_csv"] = csv_path.string();
  summary["output_json"] = json_path.string();
  return summary;
}

DriftConfig
drift_from_selection(const fs::path& path)
{
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidConfig("selection file " + path.string() + ": " + e.what());
  }
  DriftConfig d;
  d.bandwidths = required<std::vector<double>>(j, "bandwidths", "selection file");
  if (!j.contains("order"))
    throw InvalidConfig("missing key 'order' in selection file");
  d.markov_order = parse_order(j.at("order"), "selection order");
  return d;
}

ojson
cmd_generate(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "input", "grid", "bandwidths", "order", "selection", "paths", "seed",
               "noise_scale", "weight_floor", "output", "provenance" },
             "generate config");
  const TimeGrid grid = parse_grid(cfg);
  const auto in_path = ctx.input(cfg, "input", "config");
  std::optional<fs::path> sel_path;
  if (cfg.contains("selection")) {
    if (cfg.contains("bandwidths") || cfg.contains("order"))
      throw InvalidConfig("give either a selection file or bandwidths/order");
    sel_path = ctx.input(cfg, "selection", "config");
  } else if (!cfg.contains("bandwidths")) {
    throw InvalidConfig("generate needs 'bandwidths' or a 'selection' file");
  }
  GenerationConfig gen;
  gen.num_paths = required<std::size_t>(cfg, "paths", "config");
  gen.seed = ctx.seed(cfg);
  gen.noise_scale = optional(cfg, "noise_scale", gen.noise_scale, "config");
  gen.validate();
  const auto out_path = ctx.output(cfg, "output", "config");
  const auto prov_path = ctx.maybe_output(cfg, "provenance");
  ctx.check_paths();

  const Panel reference = read_panel(in_path, grid, ctx);
  DriftConfig drift;
  if (sel_path) {
    drift = drift_from_selection(*sel_path);
  } else {
    drift.bandwidths = number_or_array(cfg.at("bandwidths"), "'bandwidths'");
    drift.markov_order =
      cfg.contains("order") ? parse_order(cfg.at("order"), "'order'") : MarkovOrder(1);
  }
  drift.weight_floor = optional(cfg, "weight_floor", drift.weight_floor, "config");
  if (drift.bandwidths.size() == 1)
    drift.bandwidths.assign(reference.features(), drift.bandwidths[0]);
  drift.validate(reference.features());

  ctx.note("generating " + std::to_string(gen.num_paths) + " paths");
  const auto result = generate_paths(reference, drift, gen);
  write(out_path, panel_csv(result.panel), ctx);
  if (prov_path) {
    std::ostringstream nd;
    write_provenance_ndjson(nd, result.provenance);
    write(*prov_path, nd.str(), ctx);
  }

  ojson summary;
  summary["command"] = "generate";
  summary["paths"] = result.panel.samples();
  summary["bandwidths"] = drift.bandwidths;
  summary["order"] = drift.markov_order.str();
  summary["fallbacks"] = result.provenance.total_fallbacks();
  summary["output"] = out_path.string();
  summary["digest"] = hex(panel_digest(result.panel));
  return summary;
}

ojson
cmd_evaluate(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "real", "generated", "grid", "max_lag", "runs", "ks_time", "ks_feature",
               "output_json", "output_csv" },
             "evaluate config");
  const TimeGrid grid = parse_grid(cfg);
  const auto real_path = ctx.input(cfg, "real", "config");
  const auto gen_path = ctx.input(cfg, "generated", "config");
  MetricOptions opt;
  if (cfg.contains("max_lag"))
    opt.max_lag = required<std::size_t>(cfg, "max_lag", "config");
  opt.runs = optional(cfg, "runs", opt.runs, "config");
  if (cfg.contains("ks_time"))
    opt.ks_time = required<std::size_t>(cfg, "ks_time", "config");
  opt.ks_feature = optional(cfg, "ks_feature", opt.ks_feature, "config");
  const auto json_path = ctx.output(cfg, "output_json", "config");
  const auto csv_path = ctx.maybe_output(cfg, "output_csv");
  ctx.check_paths();

  const Panel real = read_panel(real_path, grid, ctx);
  const Panel gen = read_panel(gen_path, grid, ctx);
  const auto report = evaluate(real, gen, opt);
  write(json_path, report.to_json(), ctx);
  if (csv_path) {
    std::ostringstream csv;
    write_lag_csv(csv, report);
    write(*csv_path, csv.str(), ctx);
  }

  ojson summary;
  summary["command"] = "evaluate";
  for (const auto& s : report.scores)
    summary[s.name] = s.value;
  summary["output_json"] = json_path.string();
  return summary;
}

ojson
cmd_robustness(const json& cfg, Context& ctx)
{
  check_keys(cfg,
             { "process", "ranged", "params", "ranges", "samples", "grid", "scaling",
               "bandwidth", "order", "selection", "seed", "restarts", "output_json",
               "histogram_prefix" },
             "robustness config");
  RobustnessConfig rc;
  rc.process = parse_process(required<std::string>(cfg, "process", "config"));
  rc.ranged = optional(cfg, "ranged", false, "config");
  const json params = params_or_empty(cfg);
  if (rc.process == Process::ou)
    rc.ou = parse_ou(params);
  else
    rc.heston = parse_heston(params);
  if (cfg.contains("ranges")) {
    if (rc.process == Process::ou)
      rc.ou_ranges = parse_ou_ranges(cfg.at("ranges"));
    else
      rc.heston_ranges = parse_heston_ranges(cfg.at("ranges"));
  }
  rc.samples = optional(cfg, "samples", rc.samples, "config");
  rc.grid = parse_grid(cfg);
  rc.scaling = parse_scaling_mode(
    optional<std::string>(cfg, "scaling", to_string(rc.scaling), "config"));
  const std::size_t d = rc.process == Process::ou ? 1 : 2;
  rc.drift = DriftConfig::uniform(
    positive(optional(cfg, "bandwidth", rc.process == Process::ou ? 0.6 : 0.4, "config"),
             "bandwidth"),
    d,
    cfg.contains("order") ? parse_order(cfg.at("order"), "'order'") : MarkovOrder(1));
  rc.seed = ctx.seed(cfg);
  rc.fit.seed = rc.seed;
  rc.fit.restarts = optional(cfg, "restarts", rc.fit.restarts, "config");
  if (cfg.contains("selection")) {
    const json& s = cfg.at("selection");
    check_keys(s, { "bandwidths", "orders", "realizations", "test_samples" }, "selection");
    SelectionConfig sel;
    sel.bandwidth_grid =
      parse_bandwidth_grid(s.contains("bandwidths") ? s.at("bandwidths") : json());
    sel.order_grid = parse_order_grid(s.contains("orders") ? s.at("orders") : json());
    sel.realizations = optional(s, "realizations", sel.realizations, "selection");
    sel.seed = rc.seed;
    sel.validate(d);
    rc.test_samples = optional(s, "test_samples", rc.test_samples, "selection");
    rc.selection = sel;
  }
  const auto json_path = ctx.output(cfg, "output_json", "config");
  std::optional<std::string> hist_prefix;
  if (cfg.contains("histogram_prefix")) {
    hist_prefix = ctx.resolve(required<std::string>(cfg, "histogram_prefix", "config"));
    for (const auto& name : parameter_names(rc.process))
      ctx.outputs.push_back(*hist_prefix + name + ".csv");
  }
  rc.validate();
  ctx.check_paths();

  ctx.note("robustness run on " + std::to_string(rc.samples) + " series");
  const auto report = run_robustness(rc);
  write(json_path, robustness_json(report), ctx);
  if (hist_prefix) {
    for (std::size_t p = 0; p < report.names.size(); ++p) {
      std::ostringstream csv;
      write_histogram_csv(csv, report, p);
      write(*hist_prefix + report.names[p] + ".csv", csv.str(), ctx);
    }
  }

  ojson summary;
  summary["command"] = "robustness";
  summary["process"] = to_string(rc.process);
  summary["samples"] = rc.samples;
  ojson diffs = ojson::object();
  for (const auto& s : report.summary)
    diffs[s.name] = s.median_difference;
  summary["median_difference"] = diffs;
  summary["output_json"] = json_path.string();
  return summary;
}

} // namespace

int
run_command(const std::string& command,
            const fs::path& config_path,
            std::ostream& out,
            std::ostream& err,
            std::optional<std::uint64_t> seed,
            bool verbose)
{
  try {
    json cfg;
    try {
      cfg = json::parse(io::read_file(config_path));
    } catch (const json::parse_error& e) {
      throw InvalidConfig("config " + config_path.string() + ": " + e.what());
    }
    Context ctx{ config_path.parent_path(), err, verbose, seed, {}, {} };
    ojson summary;
    if (command == "simulate")
      summary = cmd_simulate(cfg, ctx);
    else if (command == "scale")
      summary = cmd_scale(cfg, ctx);
    else if (command == "select")
      summary = cmd_select(cfg, ctx);
    else if (command == "generate")
      summary = cmd_generate(cfg, ctx);
    else if (command == "evaluate")
      summary = cmd_evaluate(cfg, ctx);
    else if (command == "robustness")
      summary = cmd_robustness(cfg, ctx);
    else
      throw InvalidConfig("unknown subcommand '" + command + "'");
    out << summary.dump() << std::endl;
    return ExitCode::ok;
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::failure;
  }
}

int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Schrodinger-bridge time series generation", "sbts" };
  app.set_version_flag("--version", "sbts " + version());
  app.require_subcommand(0, 1);

  std::string config;
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  const char* names[] = { "simulate", "scale", "select", "generate", "evaluate",
                          "robustness" };
  const char* help[] = { "simulate a parametric process",
                         "fit and apply (or invert) a scaling transform",
                         "grid search over bandwidth and Markov order",
                         "generate synthetic paths",
                         "score generated against real data",
                         "parameter recovery on real and synthetic data" };
  for (std::size_t c = 0; c < 6; ++c) {
    auto* sub = app.add_subcommand(names[c], help[c]);
    sub->add_option("-c,--config", config, "JSON config file")->required();
    sub->add_option("-t,--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("-s,--seed", seed, "override the config seed");
    sub->add_flag("-v,--verbose", verbose, "progress messages on stderr");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForVersion&) {
    out << "sbts " << version() << '\n';
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::invalid;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return ExitCode::invalid;
  }
  set_thread_count(threads);
  return run_command(app.get_subcommands().front()->get_name(), config, out, err,
                     seed, verbose);
}

} // namespace sbts::cli
