#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lmc {

/// One pre-cleaned pool record. `repo` and `path` are only used by segment
/// sampling.
struct Document {
  std::string id;
  std::string text;
  std::string source;
  std::string collected;  // ISO-8601 date, may be empty
  std::string repo;
  std::string path;
};

/// A sampleable unit: a whole document, or a contiguous segment of a
/// repository's concatenated files.
struct CorpusUnit {
  std::string id;
  std::string text;
  std::string source;
  std::string collected;
  std::size_t char_count = 0;
};

enum class SamplingMode { document, segment };

const char* to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(const std::string& text);

inline constexpr std::size_t kDefaultSegmentChars = 8192;
inline constexpr std::uint64_t kCommonCrawlTargetChars = 131'000'000;
inline constexpr std::uint64_t kCodeTargetChars = 98'000'000;
inline constexpr std::uint64_t kMathTargetChars = 101'000'000;

struct SamplingSpec {
  SamplingMode mode = SamplingMode::document;
  std::size_t segment_chars = kDefaultSegmentChars;
  std::uint64_t target_chars = kCommonCrawlTargetChars;
  std::uint64_t seed = 0;
};

struct ManifestComponent {
  std::string source;
  double weight = 1.0;
  std::uint64_t target_chars = 0;
  std::uint64_t total_chars = 0;
  std::vector<std::string> document_ids;
};

struct CorpusManifest {
  static constexpr int kSchemaVersion = 1;

  std::string corpus_name;
  std::string source;
  std::optional<std::pair<std::string, std::string>> time_period;
  SamplingSpec spec;
  std::vector<std::string> document_ids;
  std::uint64_t total_chars = 0;
  std::uint64_t max_unit_chars = 0;
  std::vector<ManifestComponent> components;  // only for mixed corpora
};

/// SplitMix64 finalizer applied to master + golden-ratio·(stream + 1).
/// Child seeds for repeats and mix components come from here.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 with a portable bounded draw (rejection sampling), so streams
/// are identical on every platform and standard library.
class SamplingRng {
 public:
  explicit SamplingRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Wraps whole documents as units (char counts in Unicode scalars).
std::vector<CorpusUnit> document_units(std::span<const Document> docs);

/// Groups files by repo, concatenates each repo's files in lexicographic
/// path order and cuts the result into `segment_chars`-scalar segments
/// (the last one shorter). Segment ids are "<repo>#<index>".
std::vector<CorpusUnit> segment_repositories(std::span<const Document> files,
                                             std::size_t segment_chars = kDefaultSegmentChars);

/// Uniform sampling without replacement until the running character total
/// first reaches target_chars. Throws DataError naming the shortfall when
/// the pool is too small.
CorpusManifest sample_units(std::span<const CorpusUnit> pool, const SamplingSpec& spec,
                            std::string corpus_name, std::string source);

CorpusManifest sample_documents(std::span<const Document> pool, const SamplingSpec& spec,
                                std::string corpus_name = "corpus", std::string source = "");

/// Segment-level sampling; every file must carry `repo` and `path`.
CorpusManifest sample_segments(std::span<const Document> repo_files, const SamplingSpec& spec,
                               std::string corpus_name = "corpus", std::string source = "");

struct MixSource {
  std::string name;
  std::vector<CorpusUnit> units;
};

/// Samples each source for weight·target characters with a derived seed and
/// concatenates the results. Weights must be positive and sum to 1.
CorpusManifest mix_corpora(std::span<const MixSource> sources, std::span<const double> weights,
                           std::uint64_t target_chars, std::uint64_t seed,
                           std::string corpus_name = "mix");

/// 50K, 500K, 5M, 30M, 100M characters.
std::vector<std::uint64_t> default_size_ladder();

struct SweepEntry {
  std::size_t size_index = 0;
  std::uint64_t target_chars = 0;
  std::size_t repeat = 0;
  CorpusManifest manifest;
};

/// One manifest per (size, repeat); the seed for entry i (size-major order)
/// is derive_seed(master_seed, i). An empty `sizes` uses the default ladder.
std::vector<SweepEntry> size_sweep(std::span<const CorpusUnit> pool,
                                   std::span<const std::uint64_t> sizes, std::size_t repeats,
                                   std::uint64_t master_seed, std::string corpus_name = "sweep",
                                   SamplingMode mode = SamplingMode::document,
                                   std::size_t segment_chars = kDefaultSegmentChars);

/// Units listed in the manifest, in manifest order. Throws DataError for ids
/// missing from `pool`.
std::vector<CorpusUnit> materialize(const CorpusManifest& manifest,
                                    std::span<const CorpusUnit> pool);

}  // namespace lmc
