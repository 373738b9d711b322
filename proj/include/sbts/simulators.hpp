#pragma once

#include "sbts/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sbts {

struct OUParams
{
  double theta = 1.5; // mean-reversion speed
  double mu = 1.0;    // long-run level
  double sigma = 0.3;
  double x0 = 0.0;

  void validate() const;
};

struct HestonParams
{
  double kappa = 3.0;
  double theta = 0.5;
  double xi = 0.7;
  double rho = 0.7;
  double r = 0.02;
  double v0 = 0.5;
  double x0 = 1.0;

  void validate() const;
};

struct Interval
{
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

struct OURanges
{
  Interval theta{ 0.5, 2.5 };
  Interval mu{ 0.5, 1.5 };
  Interval sigma{ 0.1, 0.5 };
};

struct HestonRanges
{
  Interval kappa{ 0.5, 4.0 };
  Interval theta{ 0.5, 1.5 };
  Interval xi{ 0.01, 0.9 };
  Interval rho{ -0.9, 0.9 };
  Interval r{ 0.02, 0.1 };
};

//! Independent uniform draws, one vector of parameter values per sample;
//! sample s uses its own stream.
std::vector<std::vector<double>> sample_params(std::span<const Interval> ranges,
                                               std::size_t count,
                                               std::uint64_t seed);

//! Typed draws; x0 (and v0) are copied from `base`.
std::vector<OUParams> sample_ou_params(const OURanges& ranges,
                                       std::size_t count,
                                       std::uint64_t seed,
                                       const OUParams& base = {});
std::vector<HestonParams> sample_heston_params(const HestonRanges& ranges,
                                               std::size_t count,
                                               std::uint64_t seed,
                                               const HestonParams& base = {});

//! Exact-transition sampling: X_{t+dt} | X_t ~ N(mu_t, s_t^2) with
//! mu_t = X_t e^{-theta dt} + mu (1 - e^{-theta dt}),
//! s_t^2 = sigma^2 (1 - e^{-2 theta dt}) / (2 theta). X at the first grid
//! point is x0.
Panel simulate_ou(const OUParams& params,
                  const TimeGrid& grid,
                  std::size_t samples,
                  std::uint64_t seed);
//! One parameter set per sample.
Panel simulate_ou(std::span<const OUParams> per_sample,
                  const TimeGrid& grid,
                  std::uint64_t seed);

enum class HestonOutput
{
  price,      // features (X_t, v_t)
  log_return, // features (log(X_t / x0), v_t)
};

struct HestonSimulation
{
  Panel panel;
  std::size_t floor_events = 0; // steps where v went negative
};

//! Log-Euler discretization with correlated Gaussian shocks and full
//! truncation: max(v, 0) under square roots, v itself left untruncated in
//! the drift.
HestonSimulation simulate_heston(const HestonParams& params,
                                 const TimeGrid& grid,
                                 std::size_t samples,
                                 std::uint64_t seed,
                                 HestonOutput output = HestonOutput::log_return);
HestonSimulation simulate_heston(std::span<const HestonParams> per_sample,
                                 const TimeGrid& grid,
                                 std::uint64_t seed,
                                 HestonOutput output = HestonOutput::log_return);

struct GarchOptions
{
  double alpha0 = 5.0;
  double alpha1 = 0.4;
  double alpha2 = 0.1;
  double noise_variance = 0.1; // eps ~ N(0, noise_variance)
  std::size_t burn_in = 50;
  bool zero_noise = false; // eps = 0 everywhere
};

//! X_{i+1} = s_{i+1} eps_{i+1}, s_{i+1}^2 = a0 + a1 X_i^2 + a2 X_{i-1}^2,
//! started from s^2 = a0 / (1 - a1 - a2) and run through a burn-in.
Panel simulate_garch2(const TimeGrid& grid,
                      std::size_t samples,
                      std::uint64_t seed,
                      const GarchOptions& options = {});

//! x_j(t) = sin(2 pi eta_j t + phase_j), eta ~ U[0,1], phase ~ U[-pi, pi]
//! drawn per sample and feature.
Panel simulate_sine(const TimeGrid& grid,
                    std::size_t samples,
                    std::uint64_t seed,
                    std::size_t features = 5);

struct AROptions
{
  std::size_t features = 5;
  double phi = 0.5;
  double sigma = 0.8; // shock covariance sigma * ones + (1 - sigma) * I
};

//! x_0 = 0 at the first grid point, then x_t = phi x_{t-1} + Z.
Panel simulate_ar(const TimeGrid& grid,
                  std::size_t samples,
                  std::uint64_t seed,
                  const AROptions& options = {});

//! Exact fractional Brownian motion on a uniform grid from the Cholesky
//! factor of Cov(B_s, B_t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2. A grid
//! point at t = 0 is pinned to 0.
Panel simulate_fbm(double hurst,
                   const TimeGrid& grid,
                   std::size_t samples,
                   std::uint64_t seed);

} // namespace sbts
