#include "lmc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "lmc/errors.hpp"
#include "lmc/utf8.hpp"

namespace lmc {

const char* to_string(SamplingMode mode) { return mode == SamplingMode::document ? "document" : "segment"; }

SamplingMode parse_sampling_mode(const std::string& text) {
  if (text == "document") return SamplingMode::document;
  if (text == "segment") return SamplingMode::segment;
  throw DataError("sampling mode must be \"document\" or \"segment\", got \"" + text + "\"");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SamplingRng::below(std::uint64_t bound) {
  // 2^64 mod bound; draws below it would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

namespace {

std::size_t checked_chars(const std::string& id, const std::string& text) {
  const auto n = utf8::count_scalars(text);
  if (!n) throw DataError("document '" + id + "' is not valid UTF-8");
  return *n;
}

}  // namespace

std::vector<CorpusUnit> document_units(std::span<const Document> docs) {
  std::vector<CorpusUnit> units;
  units.reserve(docs.size());
  for (const Document& d : docs) {
    units.push_back({d.id, d.text, d.source, d.collected, checked_chars(d.id, d.text)});
  }
  return units;
}

std::vector<CorpusUnit> segment_repositories(std::span<const Document> files, std::size_t segment_chars) {
  if (segment_chars == 0) throw ContractViolation("segment size must be positive");
  std::map<std::string, std::vector<const Document*>> repos;
  for (const Document& f : files) {
    if (f.repo.empty() || f.path.empty()) {
      throw DataError("segment sampling needs \"repo\" and \"path\" on every record ('" + f.id + "' lacks them)");
    }
    repos[f.repo].push_back(&f);
  }
  std::vector<CorpusUnit> units;
  for (auto& [repo, repo_files] : repos) {
    std::sort(repo_files.begin(), repo_files.end(),
              [](const Document* a, const Document* b) { return a->path < b->path; });
    std::string joined;
    std::string collected;
    for (std::size_t i = 0; i < repo_files.size(); ++i) {
      if (i > 0 && repo_files[i]->path == repo_files[i - 1]->path) {
        throw DataError("repository '" + repo + "' lists path '" + repo_files[i]->path + "' twice");
      }
      checked_chars(repo_files[i]->id, repo_files[i]->text);
      joined += repo_files[i]->text;
      collected = std::max(collected, repo_files[i]->collected);
    }
    const std::string_view text(joined);
    std::size_t offset = 0;
    for (std::size_t index = 0; offset < text.size(); ++index) {
      const std::size_t len = utf8::offset_of_scalar(text.substr(offset), segment_chars);
      CorpusUnit u;
      u.id = repo + "#" + std::to_string(index);
      u.text = std::string(text.substr(offset, len));
      u.source = repo_files.front()->source;
      u.collected = collected;
      u.char_count = *utf8::count_scalars(u.text);
      units.push_back(std::move(u));
      offset += len;
    }
  }
  return units;
}

CorpusManifest sample_units(std::span<const CorpusUnit> pool, const SamplingSpec& spec, std::string corpus_name,
                            std::string source) {
  std::uint64_t pool_chars = 0;
  std::uint64_t max_unit = 0;
  std::unordered_set<std::string_view> seen;
  for (const CorpusUnit& u : pool) {
    if (!seen.insert(u.id).second) throw DataError("pool lists id '" + u.id + "' twice");
    pool_chars += u.char_count;
    max_unit = std::max<std::uint64_t>(max_unit, u.char_count);
  }
  if (pool_chars < spec.target_chars) {
    throw DataError("pool '" + (source.empty() ? corpus_name : source) + "' holds " + std::to_string(pool_chars) +
                    " characters, " + std::to_string(spec.target_chars - pool_chars) + " short of the " +
                    std::to_string(spec.target_chars) + "-character target");
  }

  CorpusManifest m;
  m.corpus_name = std::move(corpus_name);
  m.source = std::move(source);
  m.spec = spec;
  m.max_unit_chars = max_unit;

  // Lazy Fisher-Yates: position i receives a uniform pick from the rest.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  SamplingRng rng(spec.seed);
  std::string first_date;
  std::string last_date;
  for (std::size_t i = 0; i < order.size() && m.total_chars < spec.target_chars; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
    const CorpusUnit& u = pool[order[i]];
    m.document_ids.push_back(u.id);
    m.total_chars += u.char_count;
    if (!u.collected.empty()) {
      if (first_date.empty() || u.collected < first_date) first_date = u.collected;
      if (last_date.empty() || u.collected > last_date) last_date = u.collected;
    }
  }
  if (!first_date.empty()) m.time_period = std::make_pair(first_date, last_date);
  return m;
}

CorpusManifest sample_documents(std::span<const Document> pool, const SamplingSpec& spec, std::string corpus_name,
                                std::string source) {
  SamplingSpec s = spec;
  s.mode = SamplingMode::document;
  const auto units = document_units(pool);
  return sample_units(units, s, std::move(corpus_name), std::move(source));
}

CorpusManifest sample_segments(std::span<const Document> repo_files, const SamplingSpec& spec,
                               std::string corpus_name, std::string source) {
  SamplingSpec s = spec;
  s.mode = SamplingMode::segment;
  const auto units = segment_repositories(repo_files, s.segment_chars);
  return sample_units(units, s, std::move(corpus_name), std::move(source));
}

CorpusManifest mix_corpora(std::span<const MixSource> sources, std::span<const double> weights,
                           std::uint64_t target_chars, std::uint64_t seed, std::string corpus_name) {
  if (sources.empty() || sources.size() != weights.size()) {
    throw ContractViolation("mixing needs one positive weight per source");
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ContractViolation("mixing weights must be positive");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ContractViolation("mixing weights must sum to 1, got " + std::to_string(weight_sum));
  }

  CorpusManifest m;
  m.corpus_name = corpus_name;
  m.spec.mode = SamplingMode::document;
  m.spec.target_chars = target_chars;
  m.spec.seed = seed;
  std::string label = "mix(";
  std::string first_date;
  std::string last_date;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    SamplingSpec s;
    s.target_chars = static_cast<std::uint64_t>(std::llround(weights[i] * static_cast<double>(target_chars)));
    s.seed = derive_seed(seed, i);
    CorpusManifest part = sample_units(sources[i].units, s, corpus_name, sources[i].name);
    ManifestComponent c{sources[i].name, weights[i], s.target_chars, part.total_chars, part.document_ids};
    m.document_ids.insert(m.document_ids.end(), part.document_ids.begin(), part.document_ids.end());
    m.total_chars += part.total_chars;
    m.max_unit_chars = std::max(m.max_unit_chars, part.max_unit_chars);
    if (part.time_period) {
      if (first_date.empty() || part.time_period->first < first_date) first_date = part.time_period->first;
      if (last_date.empty() || part.time_period->second > last_date) last_date = part.time_period->second;
    }
    m.components.push_back(std::move(c));
    if (i > 0) label += ",";
    label += sources[i].name;
  }
  m.source = label + ")";
  if (!first_date.empty()) m.time_period = std::make_pair(first_date, last_date);
  return m;
}

std::vector<std::uint64_t> default_size_ladder() {
  return {50'000, 500'000, 5'000'000, 30'000'000, 100'000'000};
}

std::vector<SweepEntry> size_sweep(std::span<const CorpusUnit> pool, std::span<const std::uint64_t> sizes,
                                   std::size_t repeats, std::uint64_t master_seed, std::string corpus_name,
                                   SamplingMode mode, std::size_t segment_chars) {
  if (repeats == 0) throw ContractViolation("a sweep needs at least one repeat");
  std::vector<std::uint64_t> ladder(sizes.begin(), sizes.end());
  if (ladder.empty()) ladder = default_size_ladder();
  std::vector<SweepEntry> out;
  for (std::size_t s = 0; s < ladder.size(); ++s) {
    for (std::size_t r = 0; r < repeats; ++r) {
      SamplingSpec spec;
      spec.mode = mode;
      spec.segment_chars = segment_chars;
      spec.target_chars = ladder[s];
      spec.seed = derive_seed(master_seed, s * repeats + r);
      SweepEntry e{s, ladder[s], r,
                   sample_units(pool, spec, corpus_name + "-" + std::to_string(ladder[s]) + "-r" + std::to_string(r), "")};
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<CorpusUnit> materialize(const CorpusManifest& manifest, std::span<const CorpusUnit> pool) {
  std::unordered_map<std::string_view, const CorpusUnit*> by_id;
  for (const CorpusUnit& u : pool) by_id.emplace(u.id, &u);
  std::vector<CorpusUnit> out;
  out.reserve(manifest.document_ids.size());
  for (const std::string& id : manifest.document_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("manifest id '" + id + "' is not in the pool");
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace lmc
