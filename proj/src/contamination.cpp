#include "lmc/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lmc/errors.hpp"
#include "lmc/numeric.hpp"

namespace lmc {

const char* to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split parse_split(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw DataError("split must be \"train\" or \"test\", got \"" + text + "\"");
}

std::size_t min_k_count(std::size_t n, double k_percent) {
  const auto m = static_cast<std::size_t>(std::floor(k_percent * static_cast<double>(n) / 100.0));
  return std::max<std::size_t>(1, std::min(m, n));
}

double min_k_score(std::span<const double> nlls, double k_percent) {
  if (nlls.empty()) throw ContractViolation("MIN-K% score of an empty token sequence");
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    throw ContractViolation("k must be in (0, 100], got " + std::to_string(k_percent));
  }
  for (double v : nlls) {
    if (std::isnan(v)) throw ContractViolation("NaN token NLL");
  }
  const std::size_t m = min_k_count(nlls.size(), k_percent);
  std::vector<std::size_t> idx(nlls.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Least probable = largest NLL; earlier position wins a tie.
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(),
                    [&](std::size_t a, std::size_t b) { return nlls[a] != nlls[b] ? nlls[a] > nlls[b] : a < b; });
  ExactSum sum;
  for (std::size_t i = 0; i < m; ++i) sum.add(nlls[idx[i]]);
  return sum.value() / static_cast<double>(m);
}

std::vector<double> MinKReport::scores(std::optional<Split> split) const {
  std::vector<double> out;
  for (const auto& e : per_example) {
    if (!split || e.split == *split) out.push_back(e.score);
  }
  return out;
}

double MinKReport::mean_score(std::optional<Split> split) const {
  const auto s = scores(split);
  if (s.empty()) {
    throw DataError(std::string("no scored examples") + (split ? std::string(" in split ") + to_string(*split) : ""));
  }
  return exact_sum(s) / static_cast<double>(s.size());
}

MinKReport score_benchmark(std::span<const BenchmarkExample> examples, const Provider& provider,
                           const MinKOptions& options) {
  if (!(options.k_percent > 0.0 && options.k_percent <= 100.0)) {
    throw ContractViolation("k must be in (0, 100]");
  }
  MinKReport report;
  report.provider_name = provider.descriptor().name;
  report.k_percent = options.k_percent;
  report.context = effective_context(provider, options.context);
  report.stride = effective_stride(report.context, options.stride);

  struct Outcome {
    std::optional<MinKEntry> entry;
    std::optional<DocumentFailure> failure;
  };
  std::vector<Outcome> outcomes(examples.size());
  parallel_for(examples.size(), options.workers, [&](std::size_t i) {
    const BenchmarkExample& ex = examples[i];
    try {
      const TokenizedDocument doc = provider.tokenize(ex.id, ex.text);
      if (doc.tokens.empty()) {
        outcomes[i].failure = DocumentFailure{ex.id, "data_error", "example has no tokens"};
        return;
      }
      const auto plan = plan_windows(doc.tokens.size(), report.context, report.stride);
      const auto nlls = score_tokens(doc.tokens, provider, plan);
      outcomes[i].entry = MinKEntry{ex.id, ex.split, min_k_score(nlls, options.k_percent), nlls.size(),
                                    min_k_count(nlls.size(), options.k_percent)};
    } catch (const ProviderError& e) {
      outcomes[i].failure = DocumentFailure{ex.id, e.kind(), e.what()};
    } catch (const TokenizationError& e) {
      outcomes[i].failure = DocumentFailure{ex.id, e.kind(), e.what()};
    }
  });
  for (auto& o : outcomes) {
    if (o.entry) report.per_example.push_back(std::move(*o.entry));
    if (o.failure) report.failures.push_back(std::move(*o.failure));
  }
  std::sort(report.per_example.begin(), report.per_example.end(),
            [](const MinKEntry& a, const MinKEntry& b) { return a.example_id < b.example_id; });
  for (std::size_t i = 1; i < report.per_example.size(); ++i) {
    if (report.per_example[i].example_id == report.per_example[i - 1].example_id) {
      throw DataError("duplicate example id '" + report.per_example[i].example_id + "'");
    }
  }
  std::sort(report.failures.begin(), report.failures.end(),
            [](const DocumentFailure& a, const DocumentFailure& b) { return a.doc_id < b.doc_id; });
  return report;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

OutlierResult flag_outliers(const std::map<std::string, double>& population) {
  if (population.size() < 3) {
    throw ContractViolation("outlier detection needs at least 3 models, got " + std::to_string(population.size()));
  }
  std::vector<double> values;
  for (const auto& [model, v] : population) values.push_back(v);
  OutlierResult r;
  r.median = median_of(values);
  std::vector<double> dev;
  for (double v : values) dev.push_back(std::abs(v - r.median));
  r.mad = median_of(dev);
  r.threshold = r.median - 3.0 * r.mad;
  for (const auto& [model, v] : population) {
    if (v < r.threshold) r.flagged.insert(model);
  }
  return r;
}

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw ContractViolation("bandwidth of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double sd = 0.0;
  if (n > 1) {
    const double mean = exact_sum(sorted) / static_cast<double>(n);
    CompensatedSum ss;
    for (double v : sorted) ss.add((v - mean) * (v - mean));
    sd = std::sqrt(ss.value() / static_cast<double>(n - 1));
  }
  const double iqr = (quantile(sorted, 0.75) - quantile(sorted, 0.25)) / 1.34;
  double spread = std::min(sd, iqr);
  if (spread <= 0.0) spread = std::max(sd, iqr);
  if (spread <= 0.0) spread = 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityCurve gaussian_kde(std::span<const double> samples, std::size_t grid_points) {
  if (grid_points < 2) throw ContractViolation("density grid needs at least 2 points");
  DensityCurve curve;
  curve.bandwidth = silverman_bandwidth(samples);
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * curve.bandwidth;
  const double hi = *hi_it + 3.0 * curve.bandwidth;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * curve.bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  curve.x.resize(grid_points);
  curve.density.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
    CompensatedSum s;
    for (double v : samples) {
      const double z = (x - v) / curve.bandwidth;
      s.add(std::exp(-0.5 * z * z));
    }
    curve.x[g] = x;
    curve.density[g] = s.value() * norm;
  }
  return curve;
}

}  // namespace lmc
