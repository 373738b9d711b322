#pragma once

#include "sbts/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sbts {

struct SelectionConfig
{
  //! Candidate bandwidths: one value (applied to every feature) or one per
  //! feature.
  std::vector<std::vector<double>> bandwidth_grid;
  std::vector<MarkovOrder> order_grid;
  std::size_t realizations = 20; // L
  std::uint64_t seed = 0;
  double noise_scale = 1.0;
  double weight_floor = 1e-300;
  //! MSE values closer than this are treated as tied.
  double tie_tolerance = 1e-12;

  static SelectionConfig scalar(std::vector<double> bandwidths,
                                std::vector<MarkovOrder> orders,
                                std::size_t realizations,
                                std::uint64_t seed);
  void validate(std::size_t features) const;
};

struct SelectionCell
{
  std::size_t bandwidth_index = 0;
  std::size_t order_index = 0;
  std::vector<double> bandwidths; // expanded to one per feature
  MarkovOrder order;
  double mse = 0.0;
  double fallback_rate = 0.0;
  bool unreliable = false; // more than half of the draws needed the fallback
};

struct SelectionReport
{
  std::vector<SelectionCell> cells; // bandwidth-major
  std::size_t chosen = 0;

  const SelectionCell& best() const { return cells[chosen]; }
  const SelectionCell& cell(std::size_t bandwidth_index,
                            std::size_t order_index) const;
  DriftConfig chosen_config(double weight_floor = 1e-300) const;
};

//! Grid search over (h, k): for every test series q, draw L conditional
//! terminals given its first N-1 values and score
//!
//!   MSE(h, k) = 1/Q sum_q | mean_l Yhat^{q,l}_N - Y^q_N |^2
//!
//! (squared Euclidean norm across features). Series q uses the same random
//! stream in every cell. The minimum wins; ties go to the smaller bandwidth
//! vector (lexicographic), then the smaller order.
SelectionReport select(const Panel& train,
                       const Panel& test,
                       const SelectionConfig& cfg);

//! CSV with header h,k,mse,fallback_rate; per-feature bandwidths are joined
//! with ';'.
void write_selection_csv(std::ostream& out, const SelectionReport& report);
std::string selection_choice_json(const SelectionReport& report);

} // namespace sbts
