#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace lmc {

struct ModelObservation {
  std::string model_name;
  double bpc = 0.0;
  std::map<std::string, double> scores;  // benchmark -> [0, 1]
  std::set<std::string> flags;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Score regressed on BPC by ordinary least squares.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_rho = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  std::set<std::string> excluded;

  double predict(double x) const { return slope * x + intercept; }
};

/// Product-moment correlation. Needs n >= 3 and non-zero variance on both
/// axes (DataError otherwise).
double pearson(std::span<const Point> points);

/// OLS fit plus ρ (when defined) and RMSE over the fitted points. Needs
/// n >= 2 and non-zero x variance.
LinearFit fit_linear(std::span<const Point> points);

struct PlotPoint {
  std::string model;
  double x = 0.0;
  double y = 0.0;
  bool outlier = false;
};

struct BenchmarkFit {
  std::string benchmark;
  LinearFit fit;
  std::vector<PlotPoint> points;  // every model, excluded ones marked outlier
};

struct FitSet {
  std::vector<BenchmarkFit> per_benchmark;
  BenchmarkFit average;
};

inline constexpr const char* kAverageBenchmark = "Average";

/// Fits every benchmark and the per-model average score against BPC.
/// Models in `exclude`, plus flagged models when honor_flags is set, are
/// left out of the fit but kept in the plot data as outliers.
FitSet exclude_and_fit(std::span<const ModelObservation> observations,
                       std::span<const std::string> benchmarks, bool honor_flags,
                       const std::set<std::string>& exclude = {});

/// Unweighted mean over `benchmarks` for each model.
std::map<std::string, double> average_scores(std::span<const ModelObservation> observations,
                                             std::span<const std::string> benchmarks);

/// Unweighted mean of each model's per-area BPC values.
std::map<std::string, double> average_bpc(
    const std::map<std::string, std::vector<double>>& per_area_bpc);

/// One ability area: observations plus the benchmarks that define it.
struct AreaTable {
  std::string area;
  std::vector<std::string> benchmarks;
  std::vector<ModelObservation> observations;
  std::map<std::string, double> reported_average;  // optional "Average" column
};

/// Cross-area view: for the given models, x = mean BPC over areas and each
/// area contributes one score, its benchmark average. Model names match
/// case-insensitively; a model missing from any area is a DataError.
std::vector<ModelObservation> combine_areas(std::span<const AreaTable> areas,
                                            std::span<const std::string> models);

}  // namespace lmc
