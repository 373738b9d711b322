#pragma once

#include "sbts/core.hpp"
#include "sbts/scaling.hpp"
#include "sbts/selection.hpp"
#include "sbts/simulators.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbts {

//! Returned by the likelihoods wherever they are undefined or overflow. Every
//! feasible value is strictly smaller.
inline constexpr double kNllPenalty = 1e300;

//! Exact-transition OU negative log-likelihood over the N-1 transitions of
//! `series` (one value per grid point).
double ou_nll(const OUParams& params, std::span<const double> series, const TimeGrid& grid);

//! Bivariate Gaussian NLL of the log-Euler Heston discretization. `series`
//! is sample-major N x 2 with features (log(X_t / x0), v_t); only differences
//! of the first feature enter, so any constant shift of it is harmless.
double heston_nll(const HestonParams& params,
                  std::span<const double> series,
                  const TimeGrid& grid);

//! Analytic gradients with respect to (theta, mu, sigma) and
//! (kappa, theta, xi, rho, r). Empty where the likelihood is undefined.
std::vector<double> ou_nll_gradient(const OUParams& params,
                                    std::span<const double> series,
                                    const TimeGrid& grid);
std::vector<double> heston_nll_gradient(const HestonParams& params,
                                        std::span<const double> series,
                                        const TimeGrid& grid);

enum class Constraint
{
  none,
  positive,  // x = exp(u)
  symmetric, // x = tanh(u), |x| < 1
};

struct MinimizeOptions
{
  std::size_t max_iterations = 2000;
  double size_tolerance = 1e-8; // simplex size in transformed coordinates
  double initial_step = 0.2;    // in transformed coordinates
};

struct Minimum
{
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

//! Nelder-Mead descent on transformed coordinates, so `objective` only ever
//! sees points that satisfy `constraints`. `start` must be feasible.
Minimum minimize(const Objective& objective,
                 std::vector<double> start,
                 const std::vector<Constraint>& constraints,
                 const MinimizeOptions& options = {});

template<class Params>
struct FitResult
{
  Params params;
  double nll = kNllPenalty;
  bool converged = false;
  std::size_t iterations = 0; // summed over restarts
};

struct FitSettings
{
  std::size_t restarts = 3; // random starts on top of the range midpoint
  std::uint64_t seed = 0;
  MinimizeOptions minimize;
};

//! Starts from the range midpoints plus `restarts` uniform draws from the
//! ranges and keeps the lowest NLL. `stream` keys the restart draws.
FitResult<OUParams> fit_ou(std::span<const double> series,
                           const TimeGrid& grid,
                           const FitSettings& settings = {},
                           std::uint64_t stream = 0,
                           const OURanges& ranges = {});
FitResult<HestonParams> fit_heston(std::span<const double> series,
                                   const TimeGrid& grid,
                                   const FitSettings& settings = {},
                                   std::uint64_t stream = 0,
                                   const HestonRanges& ranges = {});

enum class Process
{
  ou,
  heston,
};

std::string to_string(Process p);
Process parse_process(const std::string& text);

//! Parameter names in the order used by estimate arrays.
std::vector<std::string> parameter_names(Process p);

struct RobustnessConfig
{
  Process process = Process::ou;
  bool ranged = false; // draw per-sample parameters from the ranges
  OUParams ou;
  HestonParams heston;
  OURanges ou_ranges;
  HestonRanges heston_ranges;
  std::size_t samples = 1000;
  TimeGrid grid = TimeGrid::uniform(252, 1.0 / 252);
  ScalingMode scaling = ScalingMode::increment_rescale;
  //! Used as is when `selection` is empty.
  DriftConfig drift = DriftConfig::uniform(0.6, 1, MarkovOrder(1));
  //! Grid search on a split of the scaled real panel; `test_samples` of them
  //! (taken from the end) are held out.
  std::optional<SelectionConfig> selection;
  std::size_t test_samples = 50;
  std::uint64_t seed = 0;
  FitSettings fit;

  void validate() const;
};

struct ParameterSummary
{
  std::string name;
  double real_median = 0.0, synthetic_median = 0.0;
  double real_iqr = 0.0, synthetic_iqr = 0.0;
  double real_p01 = 0.0, real_p99 = 0.0;
  double synthetic_p01 = 0.0, synthetic_p99 = 0.0;
  double median_difference = 0.0; // synthetic - real
  double iqr_difference = 0.0;
};

struct RobustnessReport
{
  Process process = Process::ou;
  std::vector<std::string> names;
  // estimates[p][m]: parameter p fitted on series m
  std::vector<std::vector<double>> real, synthetic;
  std::vector<double> real_nll, synthetic_nll;
  std::vector<bool> real_converged, synthetic_converged;
  std::vector<std::vector<double>> true_params; // per sample, same order
  std::vector<ParameterSummary> summary;
  DriftConfig drift;
  std::size_t generation_fallbacks = 0;
  std::size_t floor_events = 0;
  std::size_t real_infeasible = 0, synthetic_infeasible = 0;

  const ParameterSummary& parameter(const std::string& name) const;
};

//! Linear-interpolation percentile (q in [0, 100]) of `values`.
double percentile(std::vector<double> values, double q);

RobustnessReport run_robustness(const RobustnessConfig& cfg);

//! Summary plus the 1st-99th percentile clipped estimate arrays.
std::string robustness_json(const RobustnessReport& report);

//! Histogram of the clipped real and synthetic estimates of one parameter on
//! a shared set of equal-width bins: bin_lo,bin_hi,real,synthetic.
void write_histogram_csv(std::ostream& out,
                         const RobustnessReport& report,
                         std::size_t parameter,
                         std::size_t bins = 30);

} // namespace sbts
