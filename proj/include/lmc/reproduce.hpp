#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lmc/analysis.hpp"

namespace lmc {

/// One reported statistic compared against its recomputation.
struct StatCheck {
  std::string area;
  std::string benchmark;
  std::string statistic;  // "pearson_rho" | "rmse"
  double reported = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;

  bool pass() const;
};

struct ReproductionResult {
  std::vector<StatCheck> checks;
  /// Average-score ρ for the math area with flags ignored; its magnitude
  /// must be below the flagged fit's.
  double math_rho_without_exclusion = 0.0;
  double math_rho_with_exclusion = 0.0;

  bool all_pass() const;
};

/// Fixture directory layout: knowledge.csv, coding.csv, math.csv (model,
/// benchmarks..., Average, bpc[, flags]) and reported_correlations.csv
/// (area, benchmark, pearson_rho, rmse, rho_tolerance, rmse_tolerance).
/// Area "overall" is the cross-area view over the knowledge table's models.
ReproductionResult reproduce_tables(const std::filesystem::path& fixture_dir);

/// Area tables in the fixture directory, in knowledge/coding/math order.
std::vector<AreaTable> load_fixture_areas(const std::filesystem::path& fixture_dir);

/// Cross-area fit: mean BPC over areas against the mean of area averages
/// for `models` (no exclusions).
BenchmarkFit overall_fit(std::span<const AreaTable> areas, std::span<const std::string> models);

}  // namespace lmc
