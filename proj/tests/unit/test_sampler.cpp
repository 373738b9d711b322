#include "doctest.h"
#include "support.hpp"

#include "sbts/parallel.hpp"
#include "sbts/sampler.hpp"
#include "sbts/simulators.hpp"

#include <cmath>
#include <sstream>

using namespace sbts;

TEST_SUITE("sampler")
{
  TEST_CASE("noiseless bridge collapses onto its single pin")
  {
    Panel ref(1, TimeGrid::uniform(6, 0.2, 0.0, 200), 2,
              { 0.0, 0.0, 0.3, -0.2, 0.1, 0.4, -0.5, 0.2, 0.0, 0.0, 0.7, 0.9 });
    const auto out = generate_paths(ref, DriftConfig::uniform(0.5, 2), { 3, 7, 0.0 });
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          CHECK(std::abs(out.panel(p, i, j) - ref(0, i, j)) <= 1e-8);
    CHECK(out.provenance.total_fallbacks() == 0);
    CHECK(out.provenance.reference_digest == panel_digest(ref));
  }

  TEST_CASE("terminal deviation is a single Euler increment")
  {
    const double dt = 0.25;
    Panel ref(1, TimeGrid::uniform(3, dt), 1, { 0.0, 0.4, -0.3 });
    const auto out = generate_paths(ref, DriftConfig::uniform(1.0, 1), { 1000, 21, 1.0 });
    const double delta = dt / 200.0;
    for (std::size_t i = 1; i < 3; ++i) {
      std::vector<double> dev;
      std::size_t inside = 0;
      for (std::size_t p = 0; p < 1000; ++p) {
        dev.push_back(out.panel(p, i, 0) - ref(0, i, 0));
        inside += std::abs(dev.back()) <= 4.0 * std::sqrt(delta);
      }
      CHECK(inside >= 990);
      // sd of N(0, delta) from 1000 draws: relative error ~ 1/sqrt(2000)
      CHECK(std::sqrt(test::variance(dev)) == doctest::Approx(std::sqrt(delta)).epsilon(0.12));
    }
  }

  TEST_CASE("first grid value is the origin and fallbacks are counted per path")
  {
    const auto ref = test::gaussian_panel(20, TimeGrid::uniform(5, 0.1, 0.0, 20), 1, 31, 0.3);
    auto shifted = ref;
    for (std::size_t m = 0; m < 20; ++m)
      shifted(m, 0, 0) = 0.0;
    const auto out = generate_paths(shifted, DriftConfig::uniform(0.05, 1, MarkovOrder::full()),
                                    { 10, 3, 1.0 });
    for (std::size_t p = 0; p < 10; ++p)
      CHECK(out.panel(p, 0, 0) == 0.0);
    CHECK(out.provenance.paths.size() == 10);
    CHECK(out.provenance.total_fallbacks() > 0);
    std::ostringstream nd;
    write_provenance_ndjson(nd, out.provenance);
    std::size_t lines = 0;
    for (char c : nd.str())
      lines += c == '\n';
    CHECK(lines == 10);
  }

  TEST_CASE("conditional terminal pins to the only sample")
  {
    Panel ref(1, TimeGrid::uniform(4, 0.1), 1, { 0.0, 0.2, 0.1, 0.6 });
    const std::vector<double> prefix{ 0.0, 0.2, 0.1 };
    const auto out = generate_conditional_terminals(prefix, ref, DriftConfig::uniform(0.5, 1),
                                                    { 1, 5, 0.0 });
    CHECK(std::abs(out.terminal(0)[0] - 0.6) <= 1e-8);
    CHECK(out.total_fallbacks() == 0);
  }

  TEST_CASE("prefix outside every support engages the ladder for each draw")
  {
    Panel ref(2, TimeGrid::uniform(3, 0.1), 1, { 0.0, 0.1, 0.2, 0.0, -0.1, 0.1 });
    const std::vector<double> prefix{ 0.0, 40.0 };
    const auto out = generate_conditional_terminals(prefix, ref, DriftConfig::uniform(0.1, 1),
                                                    { 7, 5, 1.0 });
    CHECK(out.total_fallbacks() == 7);
    CHECK_THROWS_AS(generate_conditional_terminals(std::vector<double>{ 0.0 }, ref,
                                                   DriftConfig::uniform(0.1, 1), { 1, 5, 1.0 }),
                    ShapeError);
  }

  TEST_CASE("AR(1) conditional mean")
  {
    // x_N | x_{N-1} ~ N(phi x_{N-1}, 1); kernel regression with a narrow
    // window around the real prefix should land on phi x_{N-1}
    const auto grid = TimeGrid::uniform(4, 1.0);
    const auto ref = simulate_ar(grid, 20000, 41, { 1, 0.5, 0.8 });
    const auto held = simulate_ar(grid, 1, 42, { 1, 0.5, 0.8 });
    const std::vector<double> prefix(held.row(0).begin(), held.row(0).begin() + 3);
    const auto out = generate_conditional_terminals(prefix, ref,
                                                    DriftConfig::uniform(0.2, 1, MarkovOrder(1)),
                                                    { 100, 43, 1.0 });
    std::vector<double> v(out.values.begin(), out.values.end());
    const double se = std::sqrt(test::variance(v) / 100.0);
    CHECK(std::abs(test::mean(v) - 0.5 * prefix[2]) <= 3.0 * se);
  }

  TEST_CASE("wide kernel single sample gives a Brownian bridge")
  {
    // variance of the state at s inside [0, D] is s (D - s) / D
    const double D = 1.0;
    Panel ref(1, TimeGrid({ 0.0, D }, 50), 1, { 0.0, 0.0 });
    const std::vector<double> prefix{ 0.0 };
    const IntervalDrift drift(ref, 0, prefix, MarkovOrder(1), std::vector<double>{ 1e6 });
    const std::size_t paths = 4000;
    std::vector<std::vector<double>> at(3);
    const std::size_t marks[3] = { 10, 25, 40 };
    for (std::size_t p = 0; p < paths; ++p) {
      Rng rng = make_rng(77, { p });
      std::vector<double> x{ 0.0 };
      std::size_t step = 0;
      advance_interval(drift, 50, x, rng, 1.0, [&](double, std::span<const double> s) {
        ++step;
        for (int k = 0; k < 3; ++k)
          if (step == marks[k])
            at[k].push_back(s[0]);
      });
    }
    for (int k = 0; k < 3; ++k) {
      const double s = static_cast<double>(marks[k]) / 50.0;
      const double expect = s * (D - s) / D;
      // Euler on the bridge SDE carries an O(delta) bias; the band below is
      // five standard errors of a Gaussian sample variance
      const double se = expect * std::sqrt(2.0 / static_cast<double>(paths - 1));
      CHECK(std::abs(test::variance(at[k]) - expect) <= 5.0 * se);
    }
  }

  TEST_CASE("output is independent of the thread count")
  {
    const auto ref = test::gaussian_panel(30, TimeGrid::uniform(6, 0.1, 0.0, 30), 2, 51, 0.3);
    const auto cfg = DriftConfig::uniform(0.8, 2, MarkovOrder(2));
    set_thread_count(1);
    const auto a = generate_paths(ref, cfg, { 12, 99, 1.0 });
    set_thread_count(3);
    const auto b = generate_paths(ref, cfg, { 12, 99, 1.0 });
    set_thread_count(1);
    CHECK(a.panel == b.panel);
    const auto c = generate_paths(ref, cfg, { 12, 100, 1.0 });
    CHECK_FALSE(a.panel == c.panel);
  }
}
