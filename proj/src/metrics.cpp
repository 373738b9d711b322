#include "sbts/metrics.hpp"

#include "json.hpp"
#include "sbts/io.hpp"
#include "sbts/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace sbts {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void
require_nonempty(const Panel& p, const char* what)
{
  if (p.samples() == 0)
    throw ShapeError(std::string(what) + " has no samples");
}

struct Pooled
{
  double mean = 0.0;
  double var = 0.0; // biased
};

Pooled
pooled(const Panel& p, std::size_t j)
{
  const double count = static_cast<double>(p.samples() * p.length());
  double sum = 0.0;
  for (std::size_t m = 0; m < p.samples(); ++m)
    for (std::size_t i = 0; i < p.length(); ++i)
      sum += p(m, i, j);
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t m = 0; m < p.samples(); ++m)
    for (std::size_t i = 0; i < p.length(); ++i) {
      const double dev = p(m, i, j) - mean;
      ss += dev * dev;
    }
  return { mean, ss / count };
}

} // namespace

std::size_t
default_max_lag(const Panel& panel)
{
  return std::min<std::size_t>(panel.length() - 1, 10);
}

std::vector<std::vector<double>>
autocorrelations(const Panel& panel, std::size_t max_lag)
{
  require_nonempty(panel, "panel");
  if (max_lag < 1 || max_lag >= panel.length())
    throw InvalidConfig("max_lag must lie in [1, N)");
  std::vector<std::vector<double>> acf(panel.features(),
                                       std::vector<double>(max_lag, kNaN));
  for (std::size_t j = 0; j < panel.features(); ++j) {
    const auto st = pooled(panel, j);
    if (!(st.var > 0.0))
      continue;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
      double sum = 0.0;
      for (std::size_t m = 0; m < panel.samples(); ++m)
        for (std::size_t i = 0; i + lag < panel.length(); ++i)
          sum += (panel(m, i, j) - st.mean) * (panel(m, i + lag, j) - st.mean);
      const double count =
        static_cast<double>(panel.samples() * (panel.length() - lag));
      acf[j][lag - 1] = sum / count / st.var;
    }
  }
  return acf;
}

std::vector<double>
correlation_matrix(const Panel& panel)
{
  require_nonempty(panel, "panel");
  const std::size_t d = panel.features();
  std::vector<Pooled> st(d);
  for (std::size_t j = 0; j < d; ++j)
    st[j] = pooled(panel, j);
  const double count = static_cast<double>(panel.samples() * panel.length());
  std::vector<double> corr(d * d, kNaN);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      if (!(st[a].var > 0.0) || !(st[b].var > 0.0))
        continue;
      double sum = 0.0;
      for (std::size_t m = 0; m < panel.samples(); ++m)
        for (std::size_t i = 0; i < panel.length(); ++i)
          sum += (panel(m, i, a) - st[a].mean) * (panel(m, i, b) - st[b].mean);
      const double c = sum / count / std::sqrt(st[a].var * st[b].var);
      corr[a * d + b] = c;
      corr[b * d + a] = c;
    }
  }
  return corr;
}

double
autocorrelation_score(const Panel& real, const Panel& gen, std::size_t max_lag)
{
  require_compatible(real, gen, "autocorrelation score");
  const auto a = autocorrelations(real, max_lag);
  const auto b = autocorrelations(gen, max_lag);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < real.features(); ++j) {
    if (std::isnan(a[j][0]) || std::isnan(b[j][0])) {
      std::clog << "warning: feature " << j
                << " is constant and left out of the autocorrelation score\n";
      continue;
    }
    for (std::size_t l = 0; l < max_lag; ++l) {
      sum += std::abs(a[j][l] - b[j][l]);
      ++used;
    }
  }
  if (used == 0)
    throw DomainError("autocorrelation score: every feature is constant");
  return sum / static_cast<double>(used);
}

double
cross_correlation_score(const Panel& real, const Panel& gen)
{
  require_compatible(real, gen, "cross-correlation score");
  const std::size_t d = real.features();
  if (d < 2)
    throw InvalidConfig("cross-correlation score needs at least 2 features");
  const auto a = correlation_matrix(real);
  const auto b = correlation_matrix(gen);
  double sum = 0.0;
  std::size_t used = 0;
  bool warned = false;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      const double x = a[j * d + k], y = b[j * d + k];
      if (std::isnan(x) || std::isnan(y)) {
        if (!warned)
          std::clog << "warning: constant features are left out of the "
                       "cross-correlation score\n";
        warned = true;
        continue;
      }
      sum += std::abs(x - y);
      ++used;
    }
  }
  if (used == 0)
    throw DomainError("cross-correlation score: no pair of non-constant features");
  return sum / static_cast<double>(used);
}

namespace {

double
squared_distance(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

} // namespace

double
onnd(const Panel& real, const Panel& gen)
{
  require_compatible(real, gen, "ONND");
  require_nonempty(real, "real panel");
  require_nonempty(gen, "generated panel");
  std::vector<double> nearest(gen.samples());
  parallel_for(gen.samples(), [&](std::size_t g) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < real.samples(); ++r)
      best = std::min(best, squared_distance(gen.row(g), real.row(r)));
    nearest[g] = std::sqrt(best);
  });
  double sum = 0.0;
  for (double v : nearest)
    sum += v;
  return sum / static_cast<double>(gen.samples());
}

double
marginal_ks(const Panel& real, const Panel& gen, std::size_t time_index, std::size_t feature)
{
  require_compatible(real, gen, "marginal KS");
  require_nonempty(real, "real panel");
  require_nonempty(gen, "generated panel");
  if (time_index >= real.length() || feature >= real.features())
    throw InvalidConfig("marginal KS: time index or feature out of range");

  auto column = [&](const Panel& p) {
    std::vector<double> v(p.samples());
    for (std::size_t m = 0; m < p.samples(); ++m)
      v[m] = p(m, time_index, feature);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = column(real);
  const auto b = column(gen);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double stat = 0.0;
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] == x)
      ++i;
    while (k < b.size() && b[k] == x)
      ++k;
    stat = std::max(stat, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(k) / nb));
  }
  return stat;
}

double
two_sample_proxy(const Panel& real, const Panel& gen)
{
  require_compatible(real, gen, "two-sample proxy");
  require_nonempty(real, "real panel");
  require_nonempty(gen, "generated panel");
  const std::size_t nr = real.samples();
  const std::size_t total = nr + gen.samples();
  auto row = [&](std::size_t idx) {
    return idx < nr ? real.row(idx) : gen.row(idx - nr);
  };
  std::vector<char> correct(total, 0);
  parallel_for(total, [&](std::size_t a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = a;
    for (std::size_t b = 0; b < total; ++b) {
      if (b == a)
        continue;
      const double dist = squared_distance(row(a), row(b));
      if (dist < best) {
        best = dist;
        best_idx = b;
      }
    }
    correct[a] = (best_idx < nr) == (a < nr);
  });
  const double hits =
    static_cast<double>(std::count(correct.begin(), correct.end(), 1));
  return std::abs(hits / static_cast<double>(total) - 0.5);
}

const Score&
MetricReport::score(const std::string& name) const
{
  for (const auto& s : scores) {
    if (s.name == name)
      return s;
  }
  throw InvalidConfig("no score named '" + name + "'");
}

std::string
MetricReport::to_json() const
{
  nlohmann::ordered_json j;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& sc : scores)
    s[sc.name] = { { "value", sc.value }, { "std", sc.std } };
  j["scores"] = s;
  j["config"] = { { "max_lag", max_lag },
                  { "runs", runs },
                  { "ks_time", ks_time },
                  { "ks_feature", ks_feature } };
  return j.dump(2) + "\n";
}

MetricReport
evaluate(const Panel& real, const Panel& gen, const MetricOptions& options)
{
  require_valid(real, "real panel");
  require_valid(gen, "generated panel");
  require_compatible(real, gen, "evaluate");
  if (options.runs < 1 || options.runs > gen.samples())
    throw InvalidConfig("runs must lie in [1, generated samples]");

  MetricReport report;
  report.max_lag = options.max_lag ? *options.max_lag : default_max_lag(real);
  report.runs = options.runs;
  report.ks_time = options.ks_time ? *options.ks_time : real.length() - 1;
  report.ks_feature = options.ks_feature;
  if (report.ks_time >= real.length() || report.ks_feature >= real.features())
    throw InvalidConfig("KS time index or feature out of range");

  using Fn = double (*)(const Panel&, const Panel&, const MetricReport&);
  std::vector<std::pair<std::string, Fn>> metrics = {
    { "autocorrelation",
      [](const Panel& r, const Panel& g, const MetricReport& rep) {
        return autocorrelation_score(r, g, rep.max_lag);
      } },
  };
  if (real.features() >= 2)
    metrics.push_back({ "cross_correlation",
                        [](const Panel& r, const Panel& g, const MetricReport&) {
                          return cross_correlation_score(r, g);
                        } });
  metrics.push_back({ "onnd", [](const Panel& r, const Panel& g, const MetricReport&) {
                        return onnd(r, g);
                      } });
  metrics.push_back({ "marginal_ks",
                      [](const Panel& r, const Panel& g, const MetricReport& rep) {
                        return marginal_ks(r, g, rep.ks_time, rep.ks_feature);
                      } });
  metrics.push_back({ "two_sample_proxy",
                      [](const Panel& r, const Panel& g, const MetricReport&) {
                        return two_sample_proxy(r, g);
                      } });

  // Runs are contiguous, near-equal blocks of generated samples.
  std::vector<Panel> parts;
  for (std::size_t r = 0; r < options.runs; ++r) {
    const std::size_t first = gen.samples() * r / options.runs;
    const std::size_t last = gen.samples() * (r + 1) / options.runs;
    parts.push_back(gen.select_samples(first, last));
  }
  for (const auto& [name, fn] : metrics) {
    std::vector<double> values;
    for (const auto& part : parts)
      values.push_back(fn(real, part, report));
    double mean = 0.0;
    for (double v : values)
      mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values)
      var += (v - mean) * (v - mean);
    const double sd =
      values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
    report.scores.push_back({ name, mean, sd });
  }

  const auto acf_real = autocorrelations(real, report.max_lag);
  const auto acf_gen = autocorrelations(gen, report.max_lag);
  for (std::size_t j = 0; j < real.features(); ++j)
    for (std::size_t l = 1; l <= report.max_lag; ++l)
      report.lags.push_back({ j, l, acf_real[j][l - 1], acf_gen[j][l - 1] });
  return report;
}

void
write_lag_csv(std::ostream& out, const MetricReport& report)
{
  out << "feature,lag,real,generated,abs_diff\n";
  for (const auto& row : report.lags) {
    out << row.feature << ',' << row.lag << ',' << io::format_double(row.real)
        << ',' << io::format_double(row.generated) << ','
        << io::format_double(std::abs(row.real - row.generated)) << '\n';
  }
}

} // namespace sbts
