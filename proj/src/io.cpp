#include "lmc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lmc/errors.hpp"

namespace lmc::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string optional_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) {
    throw DataError("line " + std::to_string(line) + ": \"" + key + "\" must be a string");
  }
  return j[key].get<std::string>();
}

std::string required_string(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw DataError("line " + std::to_string(line) + ": missing \"" + key + "\"");
  return optional_string(j, key, line);
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(number) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError("line " + std::to_string(number) + ": record is not an object");
    fn(j, number);
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::vector<Document> parse_documents_jsonl(std::istream& in) {
  std::vector<Document> docs;
  for_each_record(in, [&](const json& j, std::size_t line) {
    Document d;
    d.id = required_string(j, "id", line);
    d.text = required_string(j, "text", line);
    d.source = optional_string(j, "source", line);
    d.collected = optional_string(j, "collected", line);
    d.repo = optional_string(j, "repo", line);
    d.path = optional_string(j, "path", line);
    docs.push_back(std::move(d));
  });
  return docs;
}

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  try {
    return parse_documents_jsonl(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<BenchmarkExample> read_benchmark_jsonl(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<BenchmarkExample> out;
  try {
    for_each_record(in, [&](const json& j, std::size_t line) {
      BenchmarkExample ex;
      ex.id = required_string(j, "id", line);
      ex.text = required_string(j, "text", line);
      ex.split = parse_split(required_string(j, "split", line));
      out.push_back(std::move(ex));
    });
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return out;
}

std::string units_to_jsonl(std::span<const CorpusUnit> units) {
  std::string out;
  for (const CorpusUnit& u : units) {
    json j;
    j["id"] = u.id;
    j["text"] = u.text;
    j["source"] = u.source;
    j["collected"] = u.collected;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json failures_json(const std::vector<DocumentFailure>& failures) {
  json arr = json::array();
  for (const auto& f : failures) arr.push_back({{"id", f.doc_id}, {"kind", f.kind}, {"message", f.message}});
  return arr;
}

std::vector<DocumentFailure> failures_from(const json& j) {
  std::vector<DocumentFailure> out;
  for (const auto& f : j) out.push_back({f.at("id"), f.at("kind"), f.at("message")});
  return out;
}

template <typename Fn>
auto parse_report(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json to_json(const BpcReport& r) {
  json j;
  j["schema_version"] = BpcReport::kSchemaVersion;
  j["kind"] = "bpc_report";
  j["corpus_name"] = r.corpus_name;
  j["provider_name"] = r.provider_name;
  j["requested_context"] = r.requested_context;
  j["context"] = r.context;
  j["stride"] = r.stride;
  j["corpus_bpc"] = r.corpus_bpc;
  j["total_nll_bits"] = r.total_nll_bits;
  j["total_chars"] = r.total_chars;
  j["total_tokens"] = r.total_tokens;
  json notes = json::array();
  if (r.context < r.requested_context) {
    notes.push_back("effective context " + std::to_string(r.context) + " tokens: provider limit is below the requested " +
                    std::to_string(r.requested_context));
  }
  j["notes"] = notes;
  json docs = json::array();
  for (const auto& [id, s] : r.per_document) {
    docs.push_back({{"id", id},
                    {"nll_bits", s.nll_bits},
                    {"chars", s.char_count},
                    {"tokens", s.token_count},
                    {"bpc", s.bpc()}});
  }
  j["documents"] = docs;
  j["failures"] = failures_json(r.failures);
  return j;
}

BpcReport bpc_report_from_json(const json& j) {
  return parse_report("BPC report", [&] {
    if (j.at("kind") != "bpc_report") throw DataError("not a BPC report");
    BpcReport r;
    r.corpus_name = j.at("corpus_name");
    r.provider_name = j.at("provider_name");
    r.requested_context = j.at("requested_context");
    r.context = j.at("context");
    r.stride = j.at("stride");
    r.corpus_bpc = j.at("corpus_bpc");
    r.total_nll_bits = j.at("total_nll_bits");
    r.total_chars = j.at("total_chars");
    r.total_tokens = j.at("total_tokens");
    for (const auto& d : j.at("documents")) {
      DocumentScore s{d.at("id"), d.at("nll_bits"), d.at("chars"), d.at("tokens")};
      r.per_document.emplace(s.doc_id, s);
    }
    r.failures = failures_from(j.at("failures"));
    return r;
  });
}

std::string to_csv(const BpcReport& r) {
  std::string out = "doc_id,nll_bits,chars,bpc\n";
  for (const auto& [id, s] : r.per_document) {
    out += id + "," + format_double(s.nll_bits) + "," + std::to_string(s.char_count) + "," +
           format_double(s.bpc()) + "\n";
  }
  return out;
}

json to_json(const MinKReport& r) {
  json j;
  j["schema_version"] = MinKReport::kSchemaVersion;
  j["kind"] = "mink_report";
  j["provider_name"] = r.provider_name;
  j["k_percent"] = r.k_percent;
  j["context"] = r.context;
  j["stride"] = r.stride;
  json means;
  for (const char* name : {"all", "train", "test"}) {
    std::optional<Split> split;
    if (std::string(name) != "all") split = parse_split(name);
    const auto s = r.scores(split);
    means[name] = s.empty() ? json(nullptr) : json(r.mean_score(split));
  }
  j["mean_score"] = means;
  json ex = json::array();
  for (const auto& e : r.per_example) {
    ex.push_back({{"id", e.example_id},
                  {"split", to_string(e.split)},
                  {"min_k_score", e.score},
                  {"tokens", e.token_count},
                  {"selected", e.selected}});
  }
  j["examples"] = ex;
  j["failures"] = failures_json(r.failures);
  return j;
}

MinKReport mink_report_from_json(const json& j) {
  return parse_report("MIN-K% report", [&] {
    if (j.at("kind") != "mink_report") throw DataError("not a MIN-K% report");
    MinKReport r;
    r.provider_name = j.at("provider_name");
    r.k_percent = j.at("k_percent");
    r.context = j.at("context");
    r.stride = j.at("stride");
    for (const auto& e : j.at("examples")) {
      r.per_example.push_back({e.at("id"), parse_split(e.at("split")), e.at("min_k_score"), e.at("tokens"),
                               e.at("selected")});
    }
    r.failures = failures_from(j.at("failures"));
    return r;
  });
}

std::string to_csv(const MinKReport& r) {
  std::string out = "example_id,split,min_k_score\n";
  for (const auto& e : r.per_example) {
    out += e.example_id + "," + to_string(e.split) + "," + format_double(e.score) + "\n";
  }
  return out;
}

std::string density_csv(const DensityCurve& curve) {
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out += format_double(curve.x[i]) + "," + format_double(curve.density[i]) + "\n";
  }
  return out;
}

json to_json(const CorpusManifest& m) {
  json j;
  j["schema_version"] = CorpusManifest::kSchemaVersion;
  j["kind"] = "corpus_manifest";
  j["corpus_name"] = m.corpus_name;
  j["source"] = m.source;
  j["time_period"] = m.time_period ? json{{"start", m.time_period->first}, {"end", m.time_period->second}} : json(nullptr);
  j["spec"] = {{"mode", to_string(m.spec.mode)},
               {"segment_chars", m.spec.segment_chars},
               {"target_chars", m.spec.target_chars},
               {"seed", m.spec.seed}};
  j["total_chars"] = m.total_chars;
  j["max_unit_chars"] = m.max_unit_chars;
  j["document_ids"] = m.document_ids;
  json comps = json::array();
  for (const auto& c : m.components) {
    comps.push_back({{"source", c.source},
                     {"weight", c.weight},
                     {"target_chars", c.target_chars},
                     {"total_chars", c.total_chars},
                     {"document_ids", c.document_ids}});
  }
  j["components"] = comps;
  return j;
}

CorpusManifest manifest_from_json(const json& j) {
  return parse_report("corpus manifest", [&] {
    if (j.at("kind") != "corpus_manifest") throw DataError("not a corpus manifest");
    CorpusManifest m;
    m.corpus_name = j.at("corpus_name");
    m.source = j.at("source");
    if (!j.at("time_period").is_null()) {
      m.time_period = std::make_pair(j["time_period"].at("start").get<std::string>(),
                                     j["time_period"].at("end").get<std::string>());
    }
    const auto& s = j.at("spec");
    m.spec.mode = parse_sampling_mode(s.at("mode"));
    m.spec.segment_chars = s.at("segment_chars");
    m.spec.target_chars = s.at("target_chars");
    m.spec.seed = s.at("seed");
    m.total_chars = j.at("total_chars");
    m.max_unit_chars = j.at("max_unit_chars");
    m.document_ids = j.at("document_ids").get<std::vector<std::string>>();
    for (const auto& c : j.at("components")) {
      m.components.push_back({c.at("source"), c.at("weight"), c.at("target_chars"), c.at("total_chars"),
                              c.at("document_ids").get<std::vector<std::string>>()});
    }
    return m;
  });
}

// ---------------------------------------------------------------------------
// Observation tables

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& field, std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError("line " + std::to_string(line) + ": column '" + column + "' is not a number: '" + field + "'");
  }
  return v;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, fields)
};

RawTable read_csv(std::istream& in) {
  RawTable t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError("line " + std::to_string(number) + ": expected " + std::to_string(t.header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    t.rows.emplace_back(number, std::move(fields));
  }
  if (t.header.empty()) throw DataError("CSV has no header");
  return t;
}

// Column roles: model, bpc, average, flags; everything else is a benchmark.
struct Columns {
  std::size_t model = SIZE_MAX;
  std::size_t bpc = SIZE_MAX;
  std::size_t average = SIZE_MAX;
  std::size_t flags = SIZE_MAX;
  std::vector<std::size_t> benchmarks;
};

Columns classify(const std::vector<std::string>& header, bool need_bpc) {
  Columns c;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = lower(header[i]);
    if (h == "model" || h == "model_name") {
      c.model = i;
    } else if (h == "bpc" || h == "corpus_bpc") {
      c.bpc = i;
    } else if (h == "average") {
      c.average = i;
    } else if (h == "flags") {
      c.flags = i;
    } else {
      c.benchmarks.push_back(i);
    }
  }
  if (c.model == SIZE_MAX) throw DataError("CSV lacks a 'model' column");
  if (need_bpc && c.bpc == SIZE_MAX) throw DataError("CSV lacks a 'bpc' column");
  if (c.benchmarks.empty()) throw DataError("CSV has no benchmark columns");
  return c;
}

AreaTable build_table(const RawTable& t, const Columns& c, std::string area, std::optional<bool> percent) {
  AreaTable table;
  table.area = std::move(area);
  for (std::size_t i : c.benchmarks) table.benchmarks.push_back(t.header[i]);

  bool any_above_one = false;
  for (const auto& [line, f] : t.rows) {
    for (std::size_t i : c.benchmarks) any_above_one |= parse_number(f[i], line, t.header[i]) > 1.0;
  }
  const double scale = percent.value_or(any_above_one) ? 0.01 : 1.0;

  for (const auto& [line, f] : t.rows) {
    ModelObservation o;
    o.model_name = f[c.model];
    if (c.bpc != SIZE_MAX) o.bpc = parse_number(f[c.bpc], line, t.header[c.bpc]);
    for (std::size_t i : c.benchmarks) o.scores[t.header[i]] = parse_number(f[i], line, t.header[i]) * scale;
    if (c.average != SIZE_MAX && !f[c.average].empty()) {
      table.reported_average[o.model_name] = parse_number(f[c.average], line, t.header[c.average]) * scale;
    }
    if (c.flags != SIZE_MAX) {
      std::stringstream ss(f[c.flags]);
      std::string flag;
      while (std::getline(ss, flag, ';')) {
        if (!flag.empty()) o.flags.insert(flag);
      }
    }
    table.observations.push_back(std::move(o));
  }
  return table;
}

}  // namespace

AreaTable parse_observation_csv(std::istream& in, std::string area, std::optional<bool> percent) {
  const RawTable t = read_csv(in);
  AreaTable table = build_table(t, classify(t.header, true), std::move(area), percent);
  for (const auto& o : table.observations) o.validate();
  return table;
}

AreaTable read_observation_csv(const std::filesystem::path& path, std::string area, std::optional<bool> percent) {
  auto in = open_or_throw(path);
  try {
    return parse_observation_csv(in, std::move(area), percent);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

AreaTable observations_from_reports(std::span<const BpcReport> reports, std::istream& scores, std::string area,
                                    std::optional<bool> percent) {
  const RawTable t = read_csv(scores);
  AreaTable table = build_table(t, classify(t.header, false), std::move(area), percent);
  for (auto& o : table.observations) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const BpcReport& r) { return r.provider_name == o.model_name; });
    if (it == reports.end()) throw DataError("no BPC report for model '" + o.model_name + "'");
    o.bpc = it->corpus_bpc;
    o.validate();
  }
  return table;
}

// ---------------------------------------------------------------------------
// Fits

json to_json(const LinearFit& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"pearson_rho", f.pearson_rho},
          {"rmse", f.rmse},
          {"n", f.n},
          {"excluded", std::vector<std::string>(f.excluded.begin(), f.excluded.end())}};
}

json to_json(const FitSet& fits) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "fit_set";
  json arr = json::array();
  for (const auto& b : fits.per_benchmark) {
    json e = to_json(b.fit);
    e["benchmark"] = b.benchmark;
    arr.push_back(e);
  }
  j["benchmarks"] = arr;
  json avg = to_json(fits.average.fit);
  avg["benchmark"] = fits.average.benchmark;
  j["average"] = avg;
  return j;
}

std::string fit_table_csv(const FitSet& fits) {
  std::string out = "benchmark,pearson_rho,rmse,slope,intercept,n\n";
  const auto row = [&](const BenchmarkFit& b) {
    out += b.benchmark + "," + format_double(b.fit.pearson_rho) + "," + format_double(b.fit.rmse) + "," +
           format_double(b.fit.slope) + "," + format_double(b.fit.intercept) + "," + std::to_string(b.fit.n) + "\n";
  };
  for (const auto& b : fits.per_benchmark) row(b);
  row(fits.average);
  return out;
}

std::string plot_data_csv(const FitSet& fits) {
  std::string out = "benchmark,model,x,y,outlier,fit_x0,fit_y0,fit_x1,fit_y1\n";
  const auto rows = [&](const BenchmarkFit& b) {
    if (b.points.empty()) return;
    const auto [lo, hi] = std::minmax_element(b.points.begin(), b.points.end(),
                                              [](const PlotPoint& a, const PlotPoint& c) { return a.x < c.x; });
    const std::string line = format_double(lo->x) + "," + format_double(b.fit.predict(lo->x)) + "," +
                             format_double(hi->x) + "," + format_double(b.fit.predict(hi->x));
    for (const auto& p : b.points) {
      out += b.benchmark + "," + p.model + "," + format_double(p.x) + "," + format_double(p.y) + "," +
             (p.outlier ? "1" : "0") + "," + line + "\n";
    }
  };
  for (const auto& b : fits.per_benchmark) rows(b);
  rows(fits.average);
  return out;
}

}  // namespace lmc::io
