#include "sbts/simulators.hpp"

#include "sbts/parallel.hpp"
#include "sbts/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <numbers>

namespace sbts {

void
OUParams::validate() const
{
  if (!(theta > 0.0))
    throw InvalidConfig("OU theta must be positive");
  if (!(sigma >= 0.0))
    throw InvalidConfig("OU sigma must be nonnegative");
  if (!std::isfinite(mu) || !std::isfinite(x0) || !std::isfinite(theta) ||
      !std::isfinite(sigma))
    throw InvalidConfig("OU parameters must be finite");
}

void
HestonParams::validate() const
{
  if (!(kappa > 0.0) || !(theta > 0.0) || !(xi >= 0.0))
    throw InvalidConfig("Heston needs kappa > 0, theta > 0, xi >= 0");
  if (!(rho >= -1.0 && rho <= 1.0))
    throw InvalidConfig("Heston rho must lie in [-1, 1]");
  if (!(v0 > 0.0) || !(x0 > 0.0))
    throw InvalidConfig("Heston v0 and x0 must be positive");
  if (!std::isfinite(r))
    throw InvalidConfig("Heston r must be finite");
}

std::vector<std::vector<double>>
sample_params(std::span<const Interval> ranges, std::size_t count, std::uint64_t seed)
{
  for (const auto& iv : ranges) {
    if (!(iv.lo <= iv.hi))
      throw InvalidConfig("parameter range lower bound exceeds upper bound");
  }
  std::vector<std::vector<double>> out(count, std::vector<double>(ranges.size()));
  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = make_rng(seed, { key(Stream::params), s });
    for (std::size_t p = 0; p < ranges.size(); ++p) {
      const double u = std::generate_canonical<double, 64>(rng);
      out[s][p] = ranges[p].lo + (ranges[p].hi - ranges[p].lo) * u;
    }
  }
  return out;
}

std::vector<OUParams>
sample_ou_params(const OURanges& ranges,
                 std::size_t count,
                 std::uint64_t seed,
                 const OUParams& base)
{
  const Interval iv[] = { ranges.theta, ranges.mu, ranges.sigma };
  const auto draws = sample_params(iv, count, seed);
  std::vector<OUParams> out(count, base);
  for (std::size_t s = 0; s < count; ++s) {
    out[s].theta = draws[s][0];
    out[s].mu = draws[s][1];
    out[s].sigma = draws[s][2];
  }
  return out;
}

std::vector<HestonParams>
sample_heston_params(const HestonRanges& ranges,
                     std::size_t count,
                     std::uint64_t seed,
                     const HestonParams& base)
{
  const Interval iv[] = { ranges.kappa, ranges.theta, ranges.xi, ranges.rho,
                          ranges.r };
  const auto draws = sample_params(iv, count, seed);
  std::vector<HestonParams> out(count, base);
  for (std::size_t s = 0; s < count; ++s) {
    out[s].kappa = draws[s][0];
    out[s].theta = draws[s][1];
    out[s].xi = draws[s][2];
    out[s].rho = draws[s][3];
    out[s].r = draws[s][4];
  }
  return out;
}

namespace {

void
require_grid(const TimeGrid& grid)
{
  if (auto report = validate_grid(grid); !report)
    throw InvalidConfig("grid: " + report.message);
}

} // namespace

Panel
simulate_ou(const OUParams& params,
            const TimeGrid& grid,
            std::size_t samples,
            std::uint64_t seed)
{
  return simulate_ou(std::vector<OUParams>(samples, params), grid, seed);
}

Panel
simulate_ou(std::span<const OUParams> per_sample, const TimeGrid& grid, std::uint64_t seed)
{
  require_grid(grid);
  for (const auto& p : per_sample)
    p.validate();
  Panel out(per_sample.size(), grid, 1);
  parallel_for(per_sample.size(), [&](std::size_t m) {
    const auto& p = per_sample[m];
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::normal_distribution<double> normal;
    double x = p.x0;
    out(m, 0, 0) = x;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double decay = std::exp(-p.theta * grid.spacing(i));
      const double mean = x * decay + p.mu * (1.0 - decay);
      const double var =
        p.sigma * p.sigma * (1.0 - decay * decay) / (2.0 * p.theta);
      x = mean + std::sqrt(var) * normal(rng);
      out(m, i + 1, 0) = x;
    }
  });
  return out;
}

HestonSimulation
simulate_heston(const HestonParams& params,
                const TimeGrid& grid,
                std::size_t samples,
                std::uint64_t seed,
                HestonOutput output)
{
  return simulate_heston(std::vector<HestonParams>(samples, params), grid, seed,
                         output);
}

HestonSimulation
simulate_heston(std::span<const HestonParams> per_sample,
                const TimeGrid& grid,
                std::uint64_t seed,
                HestonOutput output)
{
  require_grid(grid);
  for (const auto& p : per_sample)
    p.validate();
  HestonSimulation sim{ Panel(per_sample.size(), grid, 2), 0 };
  std::vector<std::size_t> floors(per_sample.size(), 0);

  parallel_for(per_sample.size(), [&](std::size_t m) {
    const auto& p = per_sample[m];
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::normal_distribution<double> normal;
    const double orth = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));

    double log_x = 0.0; // log(X_t / x0)
    double v = p.v0;
    auto record = [&](std::size_t i) {
      sim.panel(m, i, 0) =
        output == HestonOutput::price ? p.x0 * std::exp(log_x) : log_x;
      sim.panel(m, i, 1) = std::max(v, 0.0);
    };
    record(0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double dt = grid.spacing(i);
      const double z1 = normal(rng);
      const double z2 = p.rho * z1 + orth * normal(rng);
      const double v_pos = std::max(v, 0.0);
      const double root = std::sqrt(v_pos * dt);
      log_x += (p.r - 0.5 * v_pos) * dt + root * z1;
      v += p.kappa * (p.theta - v) * dt + p.xi * root * z2;
      if (v < 0.0)
        ++floors[m];
      record(i + 1);
    }
  });
  for (auto f : floors)
    sim.floor_events += f;
  return sim;
}

Panel
simulate_garch2(const TimeGrid& grid,
                std::size_t samples,
                std::uint64_t seed,
                const GarchOptions& o)
{
  require_grid(grid);
  if (!(o.alpha0 > 0.0) || o.alpha1 < 0.0 || o.alpha2 < 0.0 ||
      !(o.alpha1 + o.alpha2 < 1.0))
    throw InvalidConfig("GARCH needs alpha0 > 0, alpha1, alpha2 >= 0 and "
                        "alpha1 + alpha2 < 1");
  if (!(o.noise_variance >= 0.0))
    throw InvalidConfig("GARCH noise variance must be nonnegative");

  const std::size_t n = grid.size();
  const double init_var = o.alpha0 / (1.0 - o.alpha1 - o.alpha2);
  const double noise_sd = std::sqrt(o.noise_variance);
  Panel out(samples, grid, 1);
  parallel_for(samples, [&](std::size_t m) {
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::normal_distribution<double> normal;
    auto eps = [&] { return o.zero_noise ? 0.0 : noise_sd * normal(rng); };

    const std::size_t total = o.burn_in + n;
    std::vector<double> x(std::max<std::size_t>(total, 2));
    x[0] = std::sqrt(init_var) * eps();
    x[1] = std::sqrt(init_var) * eps();
    for (std::size_t i = 2; i < x.size(); ++i) {
      const double var = o.alpha0 + o.alpha1 * x[i - 1] * x[i - 1] +
                         o.alpha2 * x[i - 2] * x[i - 2];
      x[i] = std::sqrt(var) * eps();
    }
    for (std::size_t i = 0; i < n; ++i)
      out(m, i, 0) = x[x.size() - n + i];
  });
  return out;
}

Panel
simulate_sine(const TimeGrid& grid,
              std::size_t samples,
              std::uint64_t seed,
              std::size_t features)
{
  require_grid(grid);
  if (features < 1)
    throw InvalidConfig("sine needs at least one feature");
  constexpr double pi = std::numbers::pi;
  Panel out(samples, grid, features);
  parallel_for(samples, [&](std::size_t m) {
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::uniform_real_distribution<double> freq(0.0, 1.0);
    std::uniform_real_distribution<double> phase(-pi, pi);
    for (std::size_t j = 0; j < features; ++j) {
      const double eta = freq(rng);
      const double shift = phase(rng);
      for (std::size_t i = 0; i < grid.size(); ++i)
        out(m, i, j) = std::sin(2.0 * pi * eta * grid[i] + shift);
    }
  });
  return out;
}

Panel
simulate_ar(const TimeGrid& grid,
            std::size_t samples,
            std::uint64_t seed,
            const AROptions& o)
{
  require_grid(grid);
  const std::size_t d = o.features;
  if (d < 1)
    throw InvalidConfig("AR needs at least one feature");
  if (!(std::abs(o.phi) < 1.0))
    std::clog << "warning: AR coefficient |phi| >= 1 gives a non-stationary "
                 "process\n";

  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(
    static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), o.sigma);
  cov.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-12)
    throw InvalidConfig("AR shock covariance is not positive semi-definite");
  const Eigen::MatrixXd factor =
    eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Panel out(samples, grid, d);
  parallel_for(samples, [&](std::size_t m) {
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::normal_distribution<double> normal;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd z(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0) {
        for (Eigen::Index k = 0; k < z.size(); ++k)
          z[k] = normal(rng);
        x = o.phi * x + factor * z;
      }
      for (std::size_t j = 0; j < d; ++j)
        out(m, i, j) = x[static_cast<Eigen::Index>(j)];
    }
  });
  return out;
}

Panel
simulate_fbm(double hurst, const TimeGrid& grid, std::size_t samples, std::uint64_t seed)
{
  require_grid(grid);
  if (!(hurst > 0.0 && hurst < 1.0))
    throw InvalidConfig("Hurst index must lie in (0, 1)");
  if (!grid.is_uniform())
    throw InvalidConfig("fractional Brownian motion is only supported on "
                        "uniform grids");
  if (grid[0] < 0.0)
    throw InvalidConfig("fractional Brownian motion needs nonnegative times");

  // A point at t = 0 has zero variance; it is pinned and left out of the
  // factorization.
  const std::size_t first = grid[0] == 0.0 ? 1 : 0;
  const auto n = static_cast<Eigen::Index>(grid.size() - first);
  Eigen::MatrixXd cov(n, n);
  const double two_h = 2.0 * hurst;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double s = grid[first + static_cast<std::size_t>(a)];
      const double t = grid[first + static_cast<std::size_t>(b)];
      cov(a, b) = 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) -
                         std::pow(std::abs(t - s), two_h));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw DomainError("fBM covariance is not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();

  Panel out(samples, grid, 1);
  parallel_for(samples, [&](std::size_t m) {
    Rng rng = make_rng(seed, { key(Stream::simulate), m });
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (Eigen::Index k = 0; k < n; ++k)
      z[k] = normal(rng);
    const Eigen::VectorXd path = lower * z;
    for (Eigen::Index k = 0; k < n; ++k)
      out(m, first + static_cast<std::size_t>(k), 0) = path[k];
  });
  return out;
}

} // namespace sbts
