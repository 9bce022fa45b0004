#include "lmc/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "lmc/errors.hpp"
#include "lmc/numeric.hpp"

namespace lmc {

void ModelObservation::validate() const {
  if (!(bpc > 0.0) || !std::isfinite(bpc)) {
    throw DataError("model '" + model_name + "': bpc must be positive, got " + std::to_string(bpc));
  }
  for (const auto& [bench, s] : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DataError("model '" + model_name + "': score for '" + bench + "' outside [0, 1]: " + std::to_string(s));
    }
  }
}

namespace {

struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

Moments moments(std::span<const Point> points) {
  ExactSum sx, sy;
  for (const Point& p : points) {
    sx.add(p.x);
    sy.add(p.y);
  }
  Moments m;
  const auto n = static_cast<double>(points.size());
  m.mean_x = sx.value() / n;
  m.mean_y = sy.value() / n;
  ExactSum sxx, syy, sxy;
  for (const Point& p : points) {
    const double dx = p.x - m.mean_x;
    const double dy = p.y - m.mean_y;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  m.sxx = sxx.value();
  m.syy = syy.value();
  m.sxy = sxy.value();
  return m;
}

double correlation(const Moments& m) {
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

double pearson(std::span<const Point> points) {
  if (points.size() < 3) {
    throw DataError("Pearson correlation needs at least 3 points, got " + std::to_string(points.size()));
  }
  const Moments m = moments(points);
  if (!(m.sxx > 0.0) || !(m.syy > 0.0)) throw DataError("correlation undefined: an axis has zero variance");
  return correlation(m);
}

LinearFit fit_linear(std::span<const Point> points) {
  if (points.size() < 2) throw DataError("a linear fit needs at least 2 points");
  const Moments m = moments(points);
  if (!(m.sxx > 0.0)) throw DataError("linear fit undefined: all x values are equal");
  LinearFit fit;
  fit.n = points.size();
  fit.slope = m.sxy / m.sxx;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  fit.pearson_rho = m.syy > 0.0 ? correlation(m) : 0.0;
  ExactSum sq;
  for (const Point& p : points) {
    const double r = p.y - fit.predict(p.x);
    sq.add(r * r);
  }
  fit.rmse = std::sqrt(sq.value() / static_cast<double>(points.size()));
  return fit;
}

std::map<std::string, double> average_scores(std::span<const ModelObservation> observations,
                                             std::span<const std::string> benchmarks) {
  if (benchmarks.empty()) throw ContractViolation("averaging needs at least one benchmark");
  std::map<std::string, double> out;
  for (const auto& o : observations) {
    ExactSum s;
    for (const auto& b : benchmarks) {
      const auto it = o.scores.find(b);
      if (it == o.scores.end()) throw DataError("model '" + o.model_name + "' has no score for '" + b + "'");
      s.add(it->second);
    }
    out[o.model_name] = s.value() / static_cast<double>(benchmarks.size());
  }
  return out;
}

std::map<std::string, double> average_bpc(const std::map<std::string, std::vector<double>>& per_area_bpc) {
  std::map<std::string, double> out;
  for (const auto& [model, values] : per_area_bpc) {
    if (values.empty()) throw DataError("model '" + model + "' has no BPC values");
    out[model] = exact_sum(values) / static_cast<double>(values.size());
  }
  return out;
}

namespace {

BenchmarkFit fit_one(std::string name, std::span<const ModelObservation> observations,
                     const std::map<std::string, double>& y, const std::set<std::string>& excluded) {
  BenchmarkFit bf;
  bf.benchmark = std::move(name);
  std::vector<Point> kept;
  for (const auto& o : observations) {
    const bool out = excluded.count(o.model_name) > 0;
    const double score = y.at(o.model_name);
    bf.points.push_back({o.model_name, o.bpc, score, out});
    if (!out) kept.push_back({o.bpc, score});
  }
  if (kept.size() < 3) {
    throw DataError("'" + bf.benchmark + "': only " + std::to_string(kept.size()) +
                    " observations remain after exclusions (need 3)");
  }
  bf.fit = fit_linear(kept);
  for (const auto& o : observations) {
    if (excluded.count(o.model_name)) bf.fit.excluded.insert(o.model_name);
  }
  return bf;
}

}  // namespace

FitSet exclude_and_fit(std::span<const ModelObservation> observations, std::span<const std::string> benchmarks,
                       bool honor_flags, const std::set<std::string>& exclude) {
  std::set<std::string> names;
  for (const auto& o : observations) {
    o.validate();
    if (!names.insert(o.model_name).second) throw DataError("model '" + o.model_name + "' appears twice");
  }
  std::set<std::string> excluded;
  for (const auto& o : observations) {
    if (exclude.count(o.model_name) || (honor_flags && !o.flags.empty())) excluded.insert(o.model_name);
  }

  FitSet set;
  for (const auto& b : benchmarks) {
    const std::string one[] = {b};
    set.per_benchmark.push_back(fit_one(b, observations, average_scores(observations, one), excluded));
  }
  set.average = fit_one(kAverageBenchmark, observations, average_scores(observations, benchmarks), excluded);
  return set;
}

std::vector<ModelObservation> combine_areas(std::span<const AreaTable> areas, std::span<const std::string> models) {
  if (areas.empty()) throw ContractViolation("combining needs at least one area");
  std::vector<ModelObservation> out;
  for (const std::string& model : models) {
    ModelObservation combined;
    combined.model_name = model;
    ExactSum bpc;
    for (const AreaTable& area : areas) {
      const auto it = std::find_if(area.observations.begin(), area.observations.end(),
                                   [&](const ModelObservation& o) { return lower(o.model_name) == lower(model); });
      if (it == area.observations.end()) throw DataError("model '" + model + "' missing from area '" + area.area + "'");
      bpc.add(it->bpc);
      const ModelObservation one[] = {*it};
      combined.scores[area.area] = average_scores(one, area.benchmarks).begin()->second;
      combined.flags.insert(it->flags.begin(), it->flags.end());
    }
    combined.bpc = bpc.value() / static_cast<double>(areas.size());
    out.push_back(std::move(combined));
  }
  return out;
}

}  // namespace lmc
