#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lmc/bpc.hpp"
#include "lmc/provider.hpp"

namespace lmc {

inline constexpr double kDefaultKPercent = 20.0;

enum class Split { train, test };

const char* to_string(Split split);
Split parse_split(const std::string& text);

/// max(1, floor(k/100 · n)).
std::size_t min_k_count(std::size_t n, double k_percent);

/// MIN-K% PROB score: mean NLL of the k% least probable tokens (largest
/// NLL first, earlier position on ties). Requires a non-empty sequence and
/// 0 < k <= 100.
double min_k_score(std::span<const double> nlls, double k_percent = kDefaultKPercent);

struct BenchmarkExample {
  std::string id;
  std::string text;
  Split split = Split::test;
};

struct MinKEntry {
  std::string example_id;
  Split split = Split::test;
  double score = 0.0;
  std::size_t token_count = 0;
  std::size_t selected = 0;
};

struct MinKReport {
  static constexpr int kSchemaVersion = 1;

  std::string provider_name;
  double k_percent = kDefaultKPercent;
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
  std::vector<MinKEntry> per_example;  // sorted by example_id
  std::vector<DocumentFailure> failures;

  /// Mean score over all examples or over one split. Throws DataError if no
  /// example matches.
  double mean_score(std::optional<Split> split = std::nullopt) const;
  std::vector<double> scores(std::optional<Split> split = std::nullopt) const;
};

struct MinKOptions {
  double k_percent = kDefaultKPercent;
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
  std::size_t workers = 0;
};

MinKReport score_benchmark(std::span<const BenchmarkExample> examples, const Provider& provider,
                           const MinKOptions& options = {});

struct OutlierResult {
  double median = 0.0;
  double mad = 0.0;
  double threshold = 0.0;
  std::set<std::string> flagged;
};

/// Flags models whose mean score lies strictly below median − 3·MAD.
/// Requires at least three models.
OutlierResult flag_outliers(const std::map<std::string, double>& population);

/// Gaussian kernel density estimate on an evenly spaced grid.
struct DensityCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

/// Silverman's rule: 0.9 · min(sd, IQR/1.34) · n^(-1/5). When one spread
/// estimate is zero the other is used, and 1 when both are.
double silverman_bandwidth(std::span<const double> samples);
DensityCurve gaussian_kde(std::span<const double> samples, std::size_t grid_points = 200);

}  // namespace lmc
