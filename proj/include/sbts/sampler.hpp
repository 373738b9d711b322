#pragma once

#include "sbts/core.hpp"
#include "sbts/kernel_drift.hpp"
#include "sbts/random.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace sbts {

struct PathProvenance
{
  std::uint64_t seed = 0;          // derived stream seed of this path
  std::size_t fallback_count = 0;  // intervals where the fallback ladder engaged
  std::size_t unconditional_count = 0; // ... and ended on the unconditional rung
};

struct GenerationProvenance
{
  std::uint64_t seed = 0;
  DriftConfig drift;
  double noise_scale = 1.0;
  std::uint64_t reference_digest = 0;
  std::vector<PathProvenance> paths;

  std::size_t total_fallbacks() const;
};

struct GeneratedPanel
{
  Panel panel;
  GenerationProvenance provenance;
};

//! Called after every Euler sub-step with the new time and state.
using SubstepObserver = std::function<void(double, std::span<const double>)>;

//! Euler-Maruyama integration of dX = a dt + noise_scale dW over the
//! interval of `drift`, in `substeps` equal steps, starting from `x`.
//! The drift is re-evaluated at every sub-step.
void advance_interval(const IntervalDrift& drift,
                      std::size_t substeps,
                      std::span<double> x,
                      Rng& rng,
                      double noise_scale,
                      const SubstepObserver& observer = {});

//! Generates gen.num_paths trajectories on the reference grid. Every path
//! starts at the zero vector; the conditioning prefix of each interval is
//! the path's own recorded grid values. Path p draws its noise from the
//! stream (gen.seed, p), so output does not depend on the thread count.
GeneratedPanel generate_paths(const Panel& reference,
                              const DriftConfig& drift_cfg,
                              const GenerationConfig& gen);

struct ConditionalTerminals
{
  std::size_t features = 0;
  std::vector<double> values;                // L x d, realization-major
  std::vector<std::size_t> fallback_counts;  // per realization

  std::size_t realizations() const { return fallback_counts.size(); }
  std::span<const double> terminal(std::size_t l) const
  {
    return { values.data() + l * features, features };
  }
  std::size_t total_fallbacks() const;
  std::vector<double> mean() const;
};

//! Samples gen.num_paths values of X_{t_N} given the real prefix at grid
//! points 0..N-2, integrating only over the last interval from the prefix's
//! final value.
ConditionalTerminals generate_conditional_terminals(std::span<const double> prefix,
                                                    const Panel& reference,
                                                    const DriftConfig& drift_cfg,
                                                    const GenerationConfig& gen);

//! One JSON object per path: {"path":..,"seed":..,"fallback_count":..}.
void write_provenance_ndjson(std::ostream& out, const GenerationProvenance& prov);

} // namespace sbts
