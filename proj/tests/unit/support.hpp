#pragma once

#include "sbts/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sbts::test {

// Normal draws from a fixed seed; independent of the library's streams.
inline Panel
gaussian_panel(std::size_t M, const TimeGrid& grid, std::size_t d, std::uint64_t seed, double sd = 1.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  Panel p(M, grid, d);
  for (auto& v : p.data())
    v = z(rng);
  return p;
}

inline double
max_abs_diff(const Panel& a, const Panel& b)
{
  double worst = 0.0;
  for (std::size_t n = 0; n < a.data().size(); ++n)
    worst = std::max(worst, std::abs(a.data()[n] - b.data()[n]));
  return worst;
}

inline double
mean(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v)
    s += x;
  return s / static_cast<double>(v.size());
}

inline double
variance(const std::vector<double>& v)
{
  const double m = mean(v);
  double s = 0.0;
  for (double x : v)
    s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

} // namespace sbts::test
