#pragma once

#include "sbts/core.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbts {

//! acf[j][l - 1] for lags l = 1..max_lag: products of deviations from the
//! pooled feature mean, averaged over samples and time, over the pooled
//! (biased) variance. Features with zero variance hold NaN.
std::vector<std::vector<double>> autocorrelations(const Panel& panel, std::size_t max_lag);

//! Pooled contemporaneous Pearson correlation matrix, row-major d x d. NaN
//! in rows/columns of constant features.
std::vector<double> correlation_matrix(const Panel& panel);

std::size_t default_max_lag(const Panel& panel);

//! Mean |acf_real - acf_gen| over features and lags 1..max_lag. Features that
//! are constant in either panel are skipped with a warning.
double autocorrelation_score(const Panel& real, const Panel& gen, std::size_t max_lag);

//! Mean |corr_real - corr_gen| over the off-diagonal pairs j < k.
double cross_correlation_score(const Panel& real, const Panel& gen);

//! Mean over generated samples of the Euclidean distance of the flattened
//! series to the nearest real sample.
double onnd(const Panel& real, const Panel& gen);

//! Two-sample Kolmogorov-Smirnov statistic of the values at one (time,
//! feature) across samples.
double marginal_ks(const Panel& real,
                   const Panel& gen,
                   std::size_t time_index,
                   std::size_t feature);

//! |acc - 0.5| of leave-one-out 1-nearest-neighbour classification on the
//! pooled, labelled, flattened series. Equal distances resolve to the lower
//! pooled index (real samples first).
double two_sample_proxy(const Panel& real, const Panel& gen);

struct MetricOptions
{
  std::optional<std::size_t> max_lag; // default_max_lag when empty
  std::size_t runs = 1; // generated panel split into this many disjoint parts
  std::optional<std::size_t> ks_time; // last grid point when empty
  std::size_t ks_feature = 0;
};

struct Score
{
  std::string name;
  double value = 0.0; // mean over runs
  double std = 0.0;   // across runs, 0 for a single run
};

struct LagRow
{
  std::size_t feature = 0;
  std::size_t lag = 0;
  double real = 0.0;
  double generated = 0.0;
};

struct MetricReport
{
  std::vector<Score> scores;
  std::size_t max_lag = 0;
  std::size_t runs = 1;
  std::size_t ks_time = 0;
  std::size_t ks_feature = 0;
  std::vector<LagRow> lags; // whole panels

  const Score& score(const std::string& name) const;
  std::string to_json() const;
};

MetricReport evaluate(const Panel& real, const Panel& gen, const MetricOptions& options = {});

//! feature,lag,real,generated,abs_diff
void write_lag_csv(std::ostream& out, const MetricReport& report);

} // namespace sbts
