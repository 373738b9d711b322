#include "sbts/sampler.hpp"

#include "sbts/parallel.hpp"

#include <cmath>
#include "json.hpp"
#include <ostream>

namespace sbts {

std::size_t
GenerationProvenance::total_fallbacks() const
{
  std::size_t total = 0;
  for (const auto& p : paths)
    total += p.fallback_count;
  return total;
}

std::size_t
ConditionalTerminals::total_fallbacks() const
{
  std::size_t total = 0;
  for (auto c : fallback_counts)
    total += c;
  return total;
}

std::vector<double>
ConditionalTerminals::mean() const
{
  std::vector<double> out(features, 0.0);
  const std::size_t n = realizations();
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < features; ++k)
      out[k] += values[l * features + k];
  for (auto& v : out)
    v /= static_cast<double>(n);
  return out;
}

void
advance_interval(const IntervalDrift& drift,
                 std::size_t substeps,
                 std::span<double> x,
                 Rng& rng,
                 double noise_scale,
                 const SubstepObserver& observer)
{
  const std::size_t d = x.size();
  const double t0 = drift.t_begin();
  const double delta = (drift.t_end() - t0) / static_cast<double>(substeps);
  const double noise = noise_scale * std::sqrt(delta);
  std::normal_distribution<double> normal;
  std::vector<double> a(d);

  for (std::size_t s = 0; s < substeps; ++s) {
    const double t = t0 + static_cast<double>(s) * delta;
    if (!drift.evaluate(t, x, a))
      throw DegenerateWeights("stabilized weight mass fell below the floor");
    for (std::size_t k = 0; k < d; ++k)
      x[k] += a[k] * delta;
    if (noise != 0.0) {
      for (std::size_t k = 0; k < d; ++k)
        x[k] += noise * normal(rng);
    }
    if (observer)
      observer(t + delta, x);
  }
}

GeneratedPanel
generate_paths(const Panel& reference,
               const DriftConfig& drift_cfg,
               const GenerationConfig& gen)
{
  require_valid(reference, "reference panel");
  drift_cfg.validate(reference.features());
  gen.validate();

  const std::size_t n = reference.length();
  const std::size_t d = reference.features();
  const std::size_t substeps = reference.grid().substeps();

  GeneratedPanel out{ Panel(gen.num_paths, reference.grid(), d),
                      { gen.seed, drift_cfg, gen.noise_scale,
                        panel_digest(reference), {} } };
  out.provenance.paths.resize(gen.num_paths);

  parallel_for(gen.num_paths, [&](std::size_t p) {
    PathProvenance& prov = out.provenance.paths[p];
    prov.seed = stream_seed(gen.seed, { key(Stream::generate_path), p });
    Rng rng(prov.seed);

    auto path = out.panel.row(p);
    std::vector<double> x(d, 0.0);
    std::copy(x.begin(), x.end(), path.begin());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::span<const double> prefix(path.data(), (i + 1) * d);
      auto resolved = resolve_interval_drift(reference, i, prefix, drift_cfg);
      prov.fallback_count += resolved.fallback ? 1 : 0;
      prov.unconditional_count += resolved.unconditional ? 1 : 0;
      advance_interval(resolved.drift, substeps, x, rng, gen.noise_scale);
      std::copy(x.begin(), x.end(), path.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    }
  });
  return out;
}

ConditionalTerminals
generate_conditional_terminals(std::span<const double> prefix,
                               const Panel& reference,
                               const DriftConfig& drift_cfg,
                               const GenerationConfig& gen)
{
  require_valid(reference, "reference panel");
  drift_cfg.validate(reference.features());
  gen.validate();

  const std::size_t n = reference.length();
  const std::size_t d = reference.features();
  if (prefix.size() != (n - 1) * d)
    throw ShapeError("conditional prefix must cover the first N-1 grid points");

  const std::size_t interval = n - 2;
  const auto resolved = resolve_interval_drift(reference, interval, prefix, drift_cfg);
  const std::span<const double> start = prefix.subspan(interval * d, d);

  ConditionalTerminals out;
  out.features = d;
  out.values.assign(gen.num_paths * d, 0.0);
  out.fallback_counts.assign(gen.num_paths, resolved.fallback ? 1 : 0);

  parallel_for(gen.num_paths, [&](std::size_t l) {
    Rng rng = make_rng(gen.seed, { key(Stream::conditional), l });
    IntervalDrift drift = resolved.drift;
    std::vector<double> x(start.begin(), start.end());
    advance_interval(drift, reference.grid().substeps(), x, rng, gen.noise_scale);
    std::copy(x.begin(), x.end(), out.values.begin() + static_cast<std::ptrdiff_t>(l * d));
  });
  return out;
}

void
write_provenance_ndjson(std::ostream& out, const GenerationProvenance& prov)
{
  for (std::size_t p = 0; p < prov.paths.size(); ++p) {
    nlohmann::ordered_json line;
    line["path"] = p;
    line["run_seed"] = prov.seed;
    line["seed"] = prov.paths[p].seed;
    line["fallback_count"] = prov.paths[p].fallback_count;
    line["unconditional_count"] = prov.paths[p].unconditional_count;
    out << line.dump() << '\n';
  }
}

} // namespace sbts
