#include "lmc/bpc.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "lmc/errors.hpp"
#include "lmc/numeric.hpp"

namespace lmc {

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> score_tokens(std::span<const TokenId> tokens, const Provider& provider,
                                 const WindowPlan& plan) {
  if (plan.token_count != tokens.size()) {
    throw ContractViolation("window plan covers " + std::to_string(plan.token_count) +
                            " tokens but the document has " + std::to_string(tokens.size()));
  }
  std::vector<double> nll;
  nll.reserve(tokens.size());
  for (const Window& w : plan.windows) {
    const auto part = provider.score_window(tokens.subspan(w.start, w.end - w.start), w.score_from - w.start);
    nll.insert(nll.end(), part.begin(), part.end());
  }
  return nll;
}

double score_document(const TokenizedDocument& doc, const Provider& provider, const WindowPlan& plan) {
  if (plan.token_count != doc.tokens.size()) {
    throw ContractViolation("window plan covers " + std::to_string(plan.token_count) + " tokens but '" +
                            doc.doc_id + "' has " + std::to_string(doc.tokens.size()));
  }
  const std::span<const TokenId> tokens(doc.tokens);
  CompensatedSum total;
  for (const Window& w : plan.windows) {
    for (double v : provider.score_window(tokens.subspan(w.start, w.end - w.start), w.score_from - w.start)) {
      total.add(v);
    }
  }
  return total.value();
}

BpcReport aggregate_bpc(std::vector<DocumentScore> scored, std::vector<DocumentFailure> failures,
                        std::string corpus_name, std::string provider_name) {
  if (scored.empty()) {
    throw DataError("no document was scored successfully (" + std::to_string(failures.size()) + " failed)");
  }
  BpcReport report;
  report.corpus_name = std::move(corpus_name);
  report.provider_name = std::move(provider_name);
  for (auto& s : scored) {
    const std::string id = s.doc_id;
    if (!report.per_document.emplace(id, std::move(s)).second) {
      throw DataError("duplicate document id '" + id + "'");
    }
  }
  std::sort(failures.begin(), failures.end(),
            [](const DocumentFailure& a, const DocumentFailure& b) { return a.doc_id < b.doc_id; });
  report.failures = std::move(failures);

  ExactSum nll;
  for (const auto& [id, s] : report.per_document) {
    nll.add(s.nll_bits);
    report.total_chars += s.char_count;
    report.total_tokens += s.token_count;
  }
  report.total_nll_bits = nll.value();
  if (report.total_chars == 0) throw DataError("scored documents contain no characters");
  report.corpus_bpc = report.total_nll_bits / static_cast<double>(report.total_chars);
  return report;
}

BpcReport evaluate_corpus(std::span<const Document> documents, const Provider& provider,
                          const BpcOptions& options) {
  const std::size_t context = effective_context(provider, options.context);
  const std::size_t stride = effective_stride(context, options.stride);

  struct Outcome {
    std::optional<DocumentScore> score;
    std::optional<DocumentFailure> failure;
  };
  std::vector<Outcome> outcomes(documents.size());
  parallel_for(documents.size(), options.workers, [&](std::size_t i) {
    const Document& d = documents[i];
    try {
      const TokenizedDocument doc = provider.tokenize(d.id, d.text);
      const WindowPlan plan = plan_windows(doc.tokens.size(), context, stride);
      outcomes[i].score = DocumentScore{d.id, score_document(doc, provider, plan), doc.char_count,
                                        doc.tokens.size()};
    } catch (const ProviderError& e) {
      outcomes[i].failure = DocumentFailure{d.id, e.kind(), e.what()};
    } catch (const TokenizationError& e) {
      outcomes[i].failure = DocumentFailure{d.id, e.kind(), e.what()};
    }
  });

  std::vector<DocumentScore> scored;
  std::vector<DocumentFailure> failed;
  for (auto& o : outcomes) {
    if (o.score) scored.push_back(std::move(*o.score));
    if (o.failure) failed.push_back(std::move(*o.failure));
  }
  BpcReport report = aggregate_bpc(std::move(scored), std::move(failed), options.corpus_name,
                                   provider.descriptor().name);
  report.requested_context = options.context;
  report.context = context;
  report.stride = stride;
  return report;
}

}  // namespace lmc
