#include "lmc/reproduce.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "lmc/errors.hpp"
#include "lmc/io.hpp"

namespace lmc {

bool StatCheck::pass() const { return std::abs(computed - reported) <= tolerance + 1e-12; }

bool ReproductionResult::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass()) return false;
  }
  return std::abs(math_rho_without_exclusion) < std::abs(math_rho_with_exclusion);
}

std::vector<AreaTable> load_fixture_areas(const std::filesystem::path& dir) {
  std::vector<AreaTable> areas;
  for (const char* area : {"knowledge", "coding", "math"}) {
    areas.push_back(io::read_observation_csv(dir / (std::string(area) + ".csv"), area, true));
  }
  return areas;
}

BenchmarkFit overall_fit(std::span<const AreaTable> areas, std::span<const std::string> models) {
  const auto combined = combine_areas(areas, models);
  std::vector<std::string> area_names;
  for (const auto& a : areas) area_names.push_back(a.area);
  return exclude_and_fit(combined, area_names, false).average;
}

namespace {

struct Reported {
  double rho, rmse, rho_tol, rmse_tol;
};

std::vector<std::pair<std::pair<std::string, std::string>, Reported>> read_reported(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::pair<std::pair<std::string, std::string>, Reported>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = io::split_csv_line(line);
    if (f.size() != 6) throw DataError(path.string() + ": expected 6 fields in '" + line + "'");
    out.push_back({{f[0], f[1]}, {std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5])}});
  }
  return out;
}

const BenchmarkFit& find_fit(const FitSet& fits, const std::string& benchmark) {
  if (benchmark == kAverageBenchmark) return fits.average;
  for (const auto& b : fits.per_benchmark) {
    if (b.benchmark == benchmark) return b;
  }
  throw DataError("no fit for benchmark '" + benchmark + "'");
}

}  // namespace

ReproductionResult reproduce_tables(const std::filesystem::path& dir) {
  const auto areas = load_fixture_areas(dir);
  const auto reported = read_reported(dir / "reported_correlations.csv");

  std::map<std::string, FitSet> fits;
  for (const auto& a : areas) fits[a.area] = exclude_and_fit(a.observations, a.benchmarks, true);

  std::vector<std::string> general_models;
  for (const auto& o : areas.front().observations) general_models.push_back(o.model_name);
  FitSet overall;
  overall.average = overall_fit(areas, general_models);
  fits["overall"] = overall;

  ReproductionResult result;
  for (const auto& [key, r] : reported) {
    const auto it = fits.find(key.first);
    if (it == fits.end()) throw DataError("reported correlations name unknown area '" + key.first + "'");
    const BenchmarkFit& f = find_fit(it->second, key.second);
    result.checks.push_back({key.first, key.second, "pearson_rho", r.rho, f.fit.pearson_rho, r.rho_tol});
    result.checks.push_back({key.first, key.second, "rmse", r.rmse, f.fit.rmse, r.rmse_tol});
  }

  const AreaTable& math = areas[2];
  result.math_rho_with_exclusion = fits["math"].average.fit.pearson_rho;
  result.math_rho_without_exclusion = exclude_and_fit(math.observations, math.benchmarks, false).average.fit.pearson_rho;
  return result;
}

}  // namespace lmc
