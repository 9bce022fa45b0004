#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lmc/corpus.hpp"
#include "lmc/provider.hpp"
#include "lmc/window_plan.hpp"

namespace lmc {

struct DocumentScore {
  std::string doc_id;
  double nll_bits = 0.0;
  std::size_t char_count = 0;
  std::size_t token_count = 0;

  double bpc() const { return char_count ? nll_bits / static_cast<double>(char_count) : 0.0; }
};

struct DocumentFailure {
  std::string doc_id;
  std::string kind;
  std::string message;
};

/// Bits-per-character over a corpus: Σ nll_bits / Σ chars (Unicode scalars).
struct BpcReport {
  static constexpr int kSchemaVersion = 1;

  std::string corpus_name;
  std::string provider_name;
  std::size_t requested_context = kDefaultContext;
  std::size_t context = kDefaultContext;  // effective
  std::size_t stride = kDefaultStride;
  std::map<std::string, DocumentScore> per_document;
  std::vector<DocumentFailure> failures;
  double total_nll_bits = 0.0;
  std::size_t total_chars = 0;
  std::size_t total_tokens = 0;
  double corpus_bpc = 0.0;
};

struct BpcOptions {
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
  std::size_t workers = 0;  // 0 = hardware concurrency
  std::string corpus_name = "corpus";
};

/// Per-token NLL (bits) for every token of `tokens`, following `plan`.
std::vector<double> score_tokens(std::span<const TokenId> tokens, const Provider& provider,
                                 const WindowPlan& plan);

/// Total NLL in bits for `doc`; every token is counted once, conditioned on
/// the preceding tokens of its window.
double score_document(const TokenizedDocument& doc, const Provider& provider,
                      const WindowPlan& plan);

/// Deterministic reduction: documents are summed in doc_id order with
/// correctly rounded summation. Throws DataError when nothing was scored
/// or a doc_id repeats.
BpcReport aggregate_bpc(std::vector<DocumentScore> scored,
                        std::vector<DocumentFailure> failures,
                        std::string corpus_name, std::string provider_name);

/// Tokenizes and scores every document on `options.workers` threads.
/// Per-document provider/tokenization failures are recorded in the report.
BpcReport evaluate_corpus(std::span<const Document> documents, const Provider& provider,
                          const BpcOptions& options = {});

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

std::size_t resolve_workers(std::size_t requested);

}  // namespace lmc
