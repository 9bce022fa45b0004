#include "lmc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lmc/analysis.hpp"
#include "lmc/arithmetic_coder.hpp"
#include "lmc/bpc.hpp"
#include "lmc/contamination.hpp"
#include "lmc/corpus.hpp"
#include "lmc/errors.hpp"
#include "lmc/io.hpp"
#include "lmc/ngram.hpp"
#include "lmc/remote_provider.hpp"
#include "lmc/reproduce.hpp"

#ifndef LMC_FIXTURE_DIR
#define LMC_FIXTURE_DIR "fixtures"
#endif

namespace lmc::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

/// Everything a run depends on. Defaults are the evaluation protocol's
/// constants (1900-token context, stride 512, k = 20).
struct RunConfig {
  std::string provider_url;
  int native_order = 3;
  double alpha = 1.0;
  std::vector<std::string> train_files;
  int timeout_ms = 30000;
  int retries = 2;
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
  double k_percent = kDefaultKPercent;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out_dir = ".";
};

/// Acceptance-style failure (exit code 4).
class CheckFailed : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "acceptance_failure"; }
};

void apply_environment(RunConfig& cfg) {
  if (const char* url = std::getenv("LMC_PROVIDER_URL"); url != nullptr && *url != '\0') cfg.provider_url = url;
  if (const char* t = std::getenv("LMC_TIMEOUT_MS"); t != nullptr && *t != '\0') {
    try {
      cfg.timeout_ms = std::stoi(t);
    } catch (const std::exception&) {
      throw ContractViolation(std::string("LMC_TIMEOUT_MS is not an integer: ") + t);
    }
  }
}

std::vector<std::string> training_texts(const std::vector<std::string>& files) {
  std::vector<std::string> texts;
  for (const auto& f : files) {
    if (fs::path(f).extension() == ".jsonl") {
      for (auto& d : io::read_documents_jsonl(f)) texts.push_back(std::move(d.text));
    } else {
      texts.push_back(io::read_file(f));
    }
  }
  return texts;
}

std::unique_ptr<Provider> make_provider(const RunConfig& cfg) {
  if (!cfg.provider_url.empty()) {
    return std::make_unique<RemoteProvider>(RemoteConfig{cfg.provider_url, cfg.timeout_ms, cfg.retries});
  }
  NGramModelSpec spec;
  spec.order = cfg.native_order;
  spec.smoothing_alpha = cfg.alpha;
  return std::make_unique<NGramModel>(spec, training_texts(cfg.train_files));
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

void emit(std::ostream& out, const json& summary) { out << summary.dump() << "\n"; }

std::uint64_t default_target(const std::string& profile) {
  if (profile == "cc") return kCommonCrawlTargetChars;
  if (profile == "code") return kCodeTargetChars;
  if (profile == "math") return kMathTargetChars;
  throw ContractViolation("unknown target profile '" + profile + "' (cc, code, math)");
}

std::vector<CorpusUnit> pool_units(const std::vector<Document>& docs, SamplingMode mode, std::size_t segment_chars) {
  return mode == SamplingMode::segment ? segment_repositories(docs, segment_chars) : document_units(docs);
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::string pool;
  std::string mode = "document";
  std::uint64_t target_chars = 0;
  std::string profile = "cc";
  std::size_t segment_chars = kDefaultSegmentChars;
  std::string name = "corpus";
};

void run_sample(const RunConfig& cfg, const SampleArgs& a, std::ostream& out) {
  const auto docs = io::read_documents_jsonl(a.pool);
  SamplingSpec spec;
  spec.mode = parse_sampling_mode(a.mode);
  spec.segment_chars = a.segment_chars;
  spec.target_chars = a.target_chars ? a.target_chars : default_target(a.profile);
  spec.seed = cfg.seed;
  const auto units = pool_units(docs, spec.mode, spec.segment_chars);
  const std::string source = docs.empty() ? "" : docs.front().source;
  const CorpusManifest m = sample_units(units, spec, a.name, source);
  io::write_file(out_path(cfg, a.name + ".manifest.json"), io::to_json(m).dump(2) + "\n");
  io::write_file(out_path(cfg, a.name + ".jsonl"), io::units_to_jsonl(materialize(m, units)));
  emit(out, {{"command", "sample"}, {"corpus", a.name}, {"units", m.document_ids.size()}, {"total_chars", m.total_chars}});
}

struct MixArgs {
  std::vector<std::string> sources;  // name=path
  std::vector<double> weights;
  std::uint64_t target_chars = 0;
  std::string name = "mix";
};

void run_mix(const RunConfig& cfg, const MixArgs& a, std::ostream& out) {
  std::vector<MixSource> sources;
  for (const auto& s : a.sources) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ContractViolation("--source expects NAME=PATH, got '" + s + "'");
    sources.push_back({s.substr(0, eq), document_units(io::read_documents_jsonl(s.substr(eq + 1)))});
  }
  const CorpusManifest m = mix_corpora(sources, a.weights, a.target_chars, cfg.seed, a.name);
  std::string jsonl;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    CorpusManifest part;
    part.document_ids = m.components[i].document_ids;
    jsonl += io::units_to_jsonl(materialize(part, sources[i].units));
  }
  io::write_file(out_path(cfg, a.name + ".manifest.json"), io::to_json(m).dump(2) + "\n");
  io::write_file(out_path(cfg, a.name + ".jsonl"), jsonl);
  json comps = json::array();
  for (const auto& c : m.components) comps.push_back({{"source", c.source}, {"total_chars", c.total_chars}});
  emit(out, {{"command", "mix"}, {"corpus", a.name}, {"total_chars", m.total_chars}, {"components", comps}});
}

struct SweepArgs {
  std::string pool;
  std::vector<std::uint64_t> sizes;
  std::size_t repeats = 3;
  std::string mode = "document";
  std::size_t segment_chars = kDefaultSegmentChars;
  std::string name = "sweep";
  bool materialize = true;
};

void run_sweep(const RunConfig& cfg, const SweepArgs& a, std::ostream& out) {
  const auto docs = io::read_documents_jsonl(a.pool);
  const SamplingMode mode = parse_sampling_mode(a.mode);
  const auto units = pool_units(docs, mode, a.segment_chars);
  const auto entries = size_sweep(units, a.sizes, a.repeats, cfg.seed, a.name, mode, a.segment_chars);
  json all = json::array();
  for (const auto& e : entries) {
    const std::string stem = a.name + "-" + std::to_string(e.target_chars) + "-r" + std::to_string(e.repeat);
    all.push_back({{"size_index", e.size_index},
                   {"target_chars", e.target_chars},
                   {"repeat", e.repeat},
                   {"corpus", stem},
                   {"manifest", io::to_json(e.manifest)}});
    if (a.materialize) io::write_file(out_path(cfg, stem + ".jsonl"), io::units_to_jsonl(materialize(e.manifest, units)));
  }
  json doc{{"schema_version", 1}, {"kind", "size_sweep"}, {"master_seed", cfg.seed}, {"entries", all}};
  io::write_file(out_path(cfg, a.name + ".sweep.json"), doc.dump(2) + "\n");
  emit(out, {{"command", "sweep"}, {"manifests", entries.size()}});
}

struct BpcArgs {
  std::string corpus;
  std::string name;
};

void run_bpc(const RunConfig& cfg, const BpcArgs& a, std::ostream& out) {
  const auto provider = make_provider(cfg);
  const auto docs = io::read_documents_jsonl(a.corpus);
  BpcOptions opt;
  opt.context = cfg.context;
  opt.stride = cfg.stride;
  opt.workers = cfg.workers;
  opt.corpus_name = a.name.empty() ? fs::path(a.corpus).stem().string() : a.name;
  const BpcReport r = evaluate_corpus(docs, *provider, opt);
  io::write_file(out_path(cfg, opt.corpus_name + ".bpc.json"), io::to_json(r).dump(2) + "\n");
  io::write_file(out_path(cfg, opt.corpus_name + ".bpc.csv"), io::to_csv(r));
  emit(out, {{"command", "bpc"},
             {"corpus", r.corpus_name},
             {"provider", r.provider_name},
             {"corpus_bpc", r.corpus_bpc},
             {"context", r.context},
             {"stride", r.stride},
             {"documents", r.per_document.size()},
             {"failures", r.failures.size()}});
}

struct CodecArgs {
  std::string input;
  std::string output;
};

void run_compress(const RunConfig& cfg, const CodecArgs& a, std::ostream& out) {
  const auto provider = make_provider(cfg);
  const std::string data = io::read_file(a.input);
  std::vector<TokenId> tokens;
  std::size_t chars = 0;
  if (dynamic_cast<const NGramModel*>(provider.get()) != nullptr) {
    tokens = NGramModel::bytes_to_tokens(data);
    chars = data.size();
  } else {
    auto doc = provider->tokenize(a.input, data);
    tokens = std::move(doc.tokens);
    chars = doc.char_count;
  }
  EncodeStats stats;
  const CompressedBlob blob = encode(tokens, *provider, {cfg.context, cfg.stride}, &stats);
  const auto bytes = blob.serialize();
  io::write_file(a.output, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  emit(out, {{"command", "compress"},
             {"provider", blob.provider_name},
             {"tokens", blob.token_count},
             {"input_bytes", data.size()},
             {"payload_bits", blob.bit_length()},
             {"container_bytes", bytes.size()},
             {"ideal_bits", stats.quantized_bits},
             {"bits_per_unit", chars ? static_cast<double>(blob.bit_length()) / static_cast<double>(chars) : 0.0}});
}

void run_decompress(const RunConfig& cfg, const CodecArgs& a, std::ostream& out) {
  const auto provider = make_provider(cfg);
  const std::string raw = io::read_file(a.input);
  const CompressedBlob blob =
      CompressedBlob::parse(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  const auto tokens = decode(blob, *provider, {cfg.context, cfg.stride});
  const std::string data = provider->detokenize(tokens);
  io::write_file(a.output, data);
  emit(out, {{"command", "decompress"}, {"tokens", tokens.size()}, {"output_bytes", data.size()}});
}

struct MinkArgs {
  std::string benchmark;
  std::vector<std::string> population;
  std::string split = "all";
  std::size_t grid = 200;
};

std::optional<Split> split_filter(const std::string& s) {
  if (s == "all") return std::nullopt;
  return parse_split(s);
}

void run_mink(const RunConfig& cfg, const MinkArgs& a, std::ostream& out) {
  if (!a.population.empty()) {
    const auto split = split_filter(a.split);
    std::map<std::string, double> means;
    for (const auto& path : a.population) {
      const MinKReport r = io::mink_report_from_json(json::parse(io::read_file(path)));
      if (means.count(r.provider_name)) throw DataError("population lists model '" + r.provider_name + "' twice");
      means[r.provider_name] = r.mean_score(split);
      const auto scores = r.scores(split);
      io::write_file(out_path(cfg, "density_" + r.provider_name + ".csv"), io::density_csv(gaussian_kde(scores, a.grid)));
    }
    const OutlierResult res = flag_outliers(means);
    json j{{"schema_version", 1},
           {"kind", "outlier_flags"},
           {"split", a.split},
           {"median", res.median},
           {"mad", res.mad},
           {"threshold", res.threshold},
           {"population", means},
           {"flagged", std::vector<std::string>(res.flagged.begin(), res.flagged.end())}};
    io::write_file(out_path(cfg, "mink_flags.json"), j.dump(2) + "\n");
    emit(out, {{"command", "mink"}, {"mode", "flag"}, {"flagged", j["flagged"]}});
    return;
  }
  if (a.benchmark.empty()) throw ContractViolation("mink needs --benchmark or --population");
  const auto provider = make_provider(cfg);
  const auto examples = io::read_benchmark_jsonl(a.benchmark);
  MinKOptions opt;
  opt.k_percent = cfg.k_percent;
  opt.context = cfg.context;
  opt.stride = cfg.stride;
  opt.workers = cfg.workers;
  const MinKReport r = score_benchmark(examples, *provider, opt);
  io::write_file(out_path(cfg, "mink.json"), io::to_json(r).dump(2) + "\n");
  io::write_file(out_path(cfg, "mink.csv"), io::to_csv(r));
  for (const char* s : {"all", "train", "test"}) {
    const auto scores = r.scores(split_filter(s));
    if (!scores.empty()) {
      io::write_file(out_path(cfg, std::string("mink_density_") + s + ".csv"), io::density_csv(gaussian_kde(scores, a.grid)));
    }
  }
  emit(out, {{"command", "mink"},
             {"provider", r.provider_name},
             {"examples", r.per_example.size()},
             {"failures", r.failures.size()},
             {"mean_score", r.per_example.empty() ? json(nullptr) : json(r.mean_score())}});
}

struct CorrelateArgs {
  std::string observations;
  std::vector<std::string> reports;
  std::string scores;
  std::string area = "area";
  std::vector<std::string> exclude;
  std::string flags;
  bool honor_flags = false;
  std::optional<bool> percent;
};

void run_correlate(const RunConfig& cfg, const CorrelateArgs& a, std::ostream& out) {
  AreaTable table;
  if (!a.observations.empty()) {
    table = io::read_observation_csv(a.observations, a.area, a.percent);
  } else {
    if (a.reports.empty() || a.scores.empty()) {
      throw ContractViolation("correlate needs --observations, or --bpc-report plus --scores");
    }
    std::vector<BpcReport> reports;
    for (const auto& p : a.reports) reports.push_back(io::bpc_report_from_json(json::parse(io::read_file(p))));
    std::ifstream scores(a.scores);
    if (!scores) throw DataError("cannot open '" + a.scores + "'");
    table = io::observations_from_reports(reports, scores, a.area, a.percent);
  }
  if (!a.flags.empty()) {
    const json j = json::parse(io::read_file(a.flags));
    for (const auto& m : j.at("flagged")) {
      for (auto& o : table.observations) {
        if (o.model_name == m.get<std::string>()) o.flags.insert("contaminated");
      }
    }
  }
  const std::set<std::string> exclude(a.exclude.begin(), a.exclude.end());
  const FitSet fits = exclude_and_fit(table.observations, table.benchmarks, a.honor_flags, exclude);
  io::write_file(out_path(cfg, "fit.json"), io::to_json(fits).dump(2) + "\n");
  io::write_file(out_path(cfg, "fit_table.csv"), io::fit_table_csv(fits));
  io::write_file(out_path(cfg, "plot_data.csv"), io::plot_data_csv(fits));
  emit(out, {{"command", "correlate"},
             {"area", table.area},
             {"pearson_rho", fits.average.fit.pearson_rho},
             {"rmse", fits.average.fit.rmse},
             {"n", fits.average.fit.n},
             {"excluded", fits.average.fit.excluded}});
}

void run_reproduce(const std::string& fixtures, std::ostream& out) {
  const ReproductionResult r = reproduce_tables(fixtures);
  std::string current;
  for (const auto& c : r.checks) {
    if (c.area != current) {
      current = c.area;
      out << "== " << current << " ==\n";
    }
    out << "  " << std::left << std::setw(18) << c.benchmark << std::setw(12) << c.statistic << std::right << std::fixed
        << std::setprecision(3) << "reported " << std::setw(7) << c.reported << "  computed " << std::setw(7)
        << c.computed << "  tol " << c.tolerance << "  " << (c.pass() ? "PASS" : "FAIL") << "\n";
  }
  const bool weaker = std::abs(r.math_rho_without_exclusion) < std::abs(r.math_rho_with_exclusion);
  out << "== math exclusion effect ==\n"
      << "  rho with flagged rows excluded " << r.math_rho_with_exclusion << ", all rows " << r.math_rho_without_exclusion
      << "  " << (weaker ? "PASS" : "FAIL") << "\n";
  out.unsetf(std::ios::floatfield);
  if (!r.all_pass()) throw CheckFailed("reproduced statistics fall outside tolerance");
}

int fail(std::ostream& err, const char* kind, const std::string& message, int code) {
  json j{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compression-based evaluation of language models", "lmcompress"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file");

  RunConfig cfg;
  app.add_option("--provider-url", cfg.provider_url, "Remote log-prob server (overridden by LMC_PROVIDER_URL)");
  app.add_option("--native-ngram", cfg.native_order, "Order of the native byte n-gram model")->check(CLI::Range(0, 7));
  app.add_option("--alpha", cfg.alpha, "Additive smoothing for the native model")->check(CLI::PositiveNumber);
  app.add_option("--train", cfg.train_files, "Training text for the native model (.jsonl documents or raw file)");
  app.add_option("--timeout-ms", cfg.timeout_ms, "Remote request timeout (overridden by LMC_TIMEOUT_MS)");
  app.add_option("--retries", cfg.retries, "Remote retry count")->check(CLI::NonNegativeNumber);
  app.add_option("--context", cfg.context, "Unified context window in tokens")->check(CLI::PositiveNumber);
  app.add_option("--stride", cfg.stride, "Sliding-window stride in tokens")->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k_percent, "MIN-K% percentage")->check(CLI::Range(0.0, 100.0));
  app.add_option("--seed", cfg.seed, "Master sampling seed");
  app.add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");
  app.add_option("--out", cfg.out_dir, "Output directory");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Sample a compression corpus from a JSONL pool");
  sample_cmd->add_option("--pool", sample.pool, "Pool JSONL")->required();
  sample_cmd->add_option("--mode", sample.mode, "document | segment");
  sample_cmd->add_option("--target-chars", sample.target_chars, "Character budget (default from --profile)");
  sample_cmd->add_option("--profile", sample.profile, "cc | code | math default budgets");
  sample_cmd->add_option("--segment-chars", sample.segment_chars, "Segment length for segment mode");
  sample_cmd->add_option("--name", sample.name, "Corpus name");

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Mix several pools by character proportion");
  mix_cmd->add_option("--source", mix.sources, "NAME=PATH (repeat)")->required();
  mix_cmd->add_option("--weight", mix.weights, "Character proportion per source (repeat)")->required();
  mix_cmd->add_option("--target-chars", mix.target_chars, "Total character budget")->required();
  mix_cmd->add_option("--name", mix.name, "Corpus name");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Corpus-size sweep with repeated samples");
  sweep_cmd->add_option("--pool", sweep.pool, "Pool JSONL")->required();
  sweep_cmd->add_option("--sizes", sweep.sizes, "Character budgets (default 50K,500K,5M,30M,100M)")->delimiter(',');
  sweep_cmd->add_option("--repeats", sweep.repeats, "Samples per size");
  sweep_cmd->add_option("--mode", sweep.mode, "document | segment");
  sweep_cmd->add_option("--segment-chars", sweep.segment_chars, "Segment length for segment mode");
  sweep_cmd->add_option("--name", sweep.name, "Sweep name");
  sweep_cmd->add_flag("!--no-materialize", sweep.materialize, "Write manifests only");

  BpcArgs bpc;
  auto* bpc_cmd = app.add_subcommand("bpc", "Bits per character of a JSONL corpus");
  bpc_cmd->add_option("--corpus", bpc.corpus, "Corpus JSONL")->required();
  bpc_cmd->add_option("--name", bpc.name, "Corpus name (default: file stem)");

  CodecArgs compress;
  auto* compress_cmd = app.add_subcommand("compress", "Arithmetic-code a file with the model");
  compress_cmd->add_option("input", compress.input)->required();
  compress_cmd->add_option("output", compress.output)->required();

  CodecArgs decompress;
  auto* decompress_cmd = app.add_subcommand("decompress", "Decode a blob written by compress");
  decompress_cmd->add_option("input", decompress.input)->required();
  decompress_cmd->add_option("output", decompress.output)->required();

  MinkArgs mink;
  auto* mink_cmd = app.add_subcommand("mink", "MIN-K% PROB scores, or outlier flags over a population of reports");
  mink_cmd->add_option("--benchmark", mink.benchmark, "Benchmark JSONL {id, text, split}");
  mink_cmd->add_option("--population", mink.population, "MIN-K% report JSON files, one per model");
  mink_cmd->add_option("--split", mink.split, "all | train | test (population mode)");
  mink_cmd->add_option("--grid", mink.grid, "Density grid points");

  CorrelateArgs corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Linear fit, Pearson rho and RMSE of scores against BPC");
  corr_cmd->add_option("--observations", corr.observations, "CSV: model, bpc, benchmark columns");
  corr_cmd->add_option("--bpc-report", corr.reports, "BPC report JSON per model (provider_name = model)");
  corr_cmd->add_option("--scores", corr.scores, "CSV: model, benchmark columns");
  corr_cmd->add_option("--area", corr.area, "Area label");
  corr_cmd->add_option("--exclude", corr.exclude, "Models to leave out of the fit")->delimiter(',');
  corr_cmd->add_option("--flags", corr.flags, "Outlier flags JSON from `mink --population`");
  corr_cmd->add_flag("--honor-flags", corr.honor_flags, "Exclude flagged models from the fit");
  bool percent = false, fraction = false;
  corr_cmd->add_flag("--percent", percent, "Scores are percentages");
  corr_cmd->add_flag("--fraction", fraction, "Scores are already in [0, 1]");

  std::string fixtures = LMC_FIXTURE_DIR;
  auto* repro_cmd = app.add_subcommand("reproduce-tables", "Recompute the reference correlation tables");
  repro_cmd->add_option("--fixtures", fixtures, "Fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    return fail(err, "usage", e.what(), kUsage);
  }

  try {
    apply_environment(cfg);
    if (percent && fraction) throw ContractViolation("--percent and --fraction are exclusive");
    if (percent) corr.percent = true;
    if (fraction) corr.percent = false;

    if (*sample_cmd) run_sample(cfg, sample, out);
    else if (*mix_cmd) run_mix(cfg, mix, out);
    else if (*sweep_cmd) run_sweep(cfg, sweep, out);
    else if (*bpc_cmd) run_bpc(cfg, bpc, out);
    else if (*compress_cmd) run_compress(cfg, compress, out);
    else if (*decompress_cmd) run_decompress(cfg, decompress, out);
    else if (*mink_cmd) run_mink(cfg, mink, out);
    else if (*corr_cmd) run_correlate(cfg, corr, out);
    else if (*repro_cmd) run_reproduce(fixtures, out);
    return kSuccess;
  } catch (const CheckFailed& e) {
    return fail(err, e.kind(), e.what(), kAcceptanceFailure);
  } catch (const ProviderError& e) {
    return fail(err, e.kind(), e.what(), kProviderError);
  } catch (const ContractViolation& e) {
    return fail(err, e.kind(), e.what(), kUsage);
  } catch (const Error& e) {
    return fail(err, e.kind(), e.what(), kDataError);
  } catch (const json::exception& e) {
    return fail(err, "data_error", e.what(), kDataError);
  } catch (const std::exception& e) {
    return fail(err, "data_error", e.what(), kDataError);
  }
}

}  // namespace lmc::cli
