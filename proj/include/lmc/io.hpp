#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string_view>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmc/analysis.hpp"
#include "lmc/bpc.hpp"
#include "lmc/contamination.hpp"
#include "lmc/corpus.hpp"

namespace lmc::io {

using json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

// JSONL pools and benchmarks. Records: {"id", "text", "source", "collected"}
// plus optional "repo"/"path"; benchmarks carry "split": "train"|"test".
std::vector<Document> parse_documents_jsonl(std::istream& in);
std::vector<Document> read_documents_jsonl(const std::filesystem::path& path);
std::vector<BenchmarkExample> read_benchmark_jsonl(const std::filesystem::path& path);
std::string units_to_jsonl(std::span<const CorpusUnit> units);

json to_json(const BpcReport& report);
BpcReport bpc_report_from_json(const json& j);
/// doc_id,nll_bits,chars,bpc
std::string to_csv(const BpcReport& report);

json to_json(const MinKReport& report);
MinKReport mink_report_from_json(const json& j);
/// example_id,split,min_k_score
std::string to_csv(const MinKReport& report);
std::string density_csv(const DensityCurve& curve);

json to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const json& j);

/// CSV with a model column, a "bpc" (or "corpus_bpc") column and one column
/// per benchmark. An "Average" column is kept aside as reported_average.
/// Scores are percentages when `percent` is true; when unset, the file is
/// treated as percentages if any score exceeds 1.
AreaTable parse_observation_csv(std::istream& in, std::string area,
                                std::optional<bool> percent = std::nullopt);
AreaTable read_observation_csv(const std::filesystem::path& path, std::string area,
                               std::optional<bool> percent = std::nullopt);

/// Joins BPC reports (matched on provider_name) with a score CSV of the
/// same shape as above minus the bpc column.
AreaTable observations_from_reports(std::span<const BpcReport> reports, std::istream& scores,
                                    std::string area, std::optional<bool> percent = std::nullopt);

json to_json(const LinearFit& fit);
json to_json(const FitSet& fits);
/// benchmark,pearson_rho,rmse,slope,intercept,n
std::string fit_table_csv(const FitSet& fits);
/// benchmark,model,x,y,outlier,fit_x0,fit_y0,fit_x1,fit_y1
std::string plot_data_csv(const FitSet& fits);

/// Minimal RFC-4180 field splitter.
std::vector<std::string> split_csv_line(const std::string& line);
/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace lmc::io
