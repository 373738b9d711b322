#pragma once

#include "sbts/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sbts {

enum class ScalingMode
{
  identity,
  log_return_rescale, // y = x * sqrt(dt) / sd(x)
  increment_rescale,  // y = (x - x_start) * sqrt(dt) / sd(first differences)
  standardize,        // y = (x - mean) / sd
  min_max,            // y = (x - min) / (max - min)
};

std::string to_string(ScalingMode mode);
ScalingMode parse_scaling_mode(const std::string& text);

//! Per-feature affine map y = (x - offset) * factor, with the statistics it
//! was fitted from. Features never mix.
struct ScalingTransform
{
  ScalingMode mode = ScalingMode::identity;
  double dt = 0.0;
  std::vector<double> statistic; // sd(R), sd(dX), sd or max-min per feature
  std::vector<double> offset;    // 0, start, mean or min per feature

  double factor(std::size_t feature) const;

  Panel apply(const Panel& panel) const;
  Panel invert(const Panel& panel) const;

  std::string to_json() const;
  static ScalingTransform from_json(const std::string& text);

  bool operator==(const ScalingTransform&) const = default;
};

//! R_j = log(X_{j+1} / X_j) per feature. The result lives on grid points
//! t_2..t_N (a return is stamped at the end of its interval).
Panel to_log_returns(const Panel& prices);

//! Scales each feature so its pooled sample standard deviation (all samples
//! and times, n-1 denominator) equals sqrt(dt).
std::pair<Panel, ScalingTransform> rescale_returns(const Panel& returns, double dt);

//! Undoes `transform`, then compounds the returns from 1. The output has one
//! more grid point than the input, placed one spacing before its first time.
Panel returns_to_base_one(const Panel& returns, const ScalingTransform& transform);

//! Shifts every feature by its mean starting value and scales it so that
//! first differences have standard deviation sqrt(dt). Paths that share a
//! common start begin at exactly 0 afterwards.
std::pair<Panel, ScalingTransform> rescale_increments(const Panel& levels, double dt);

std::pair<Panel, ScalingTransform> standardize(const Panel& panel);
std::pair<Panel, ScalingTransform> min_max(const Panel& panel);

//! Fits the transform of `mode` to `panel`. dt is used by the rescale modes.
ScalingTransform fit_transform(ScalingMode mode, const Panel& panel, double dt);

} // namespace sbts
