#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmc/analysis.hpp"
#include "lmc/arithmetic_coder.hpp"
#include "lmc/bpc.hpp"
#include "lmc/contamination.hpp"
#include "lmc/errors.hpp"
#include "lmc/ngram.hpp"
#include "lmc/remote_provider.hpp"
#include "lmc/reproduce.hpp"
#include "lmc/window_plan.hpp"

namespace py = pybind11;
using namespace lmc;

namespace {

std::vector<Point> zip_points(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ContractViolation("x and y must have the same length");
  std::vector<Point> p(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) p[i] = {xs[i], ys[i]};
  return p;
}

py::dict fit_dict(const LinearFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["pearson_rho"] = f.pearson_rho;
  d["rmse"] = f.rmse;
  d["n"] = f.n;
  d["excluded"] = f.excluded;
  return d;
}

std::vector<TokenId> tokens_of(const Provider& p, const py::bytes& data) {
  const std::string s = data;
  if (dynamic_cast<const NGramModel*>(&p) != nullptr) return NGramModel::bytes_to_tokens(s);
  return p.tokenize("<bytes>", s).tokens;
}

}  // namespace

PYBIND11_MODULE(_lmcompress, m) {
  m.doc() = "Compression-based language model evaluation";

  auto base = py::register_exception<Error>(m, "LmcError", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<CorruptionError>(m, "CorruptionError", data.ptr());
  py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", data.ptr());
  py::register_exception<TokenizationError>(m, "TokenizationError", data.ptr());
  auto prov = py::register_exception<ProviderError>(m, "ProviderError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", prov.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", prov.ptr());

  m.attr("DEFAULT_CONTEXT") = kDefaultContext;
  m.attr("DEFAULT_STRIDE") = kDefaultStride;
  m.attr("DEFAULT_K_PERCENT") = kDefaultKPercent;

  py::class_<Provider>(m, "Provider")
      .def_property_readonly("name", [](const Provider& p) { return p.descriptor().name; })
      .def_property_readonly("vocab_size", [](const Provider& p) { return p.descriptor().vocab_size; })
      .def_property_readonly("max_context", [](const Provider& p) { return p.descriptor().max_context; })
      .def("tokenize", [](const Provider& p, const std::string& text) { return p.tokenize("<text>", text).tokens; })
      .def("detokenize", [](const Provider& p, const std::vector<TokenId>& t) { return py::bytes(p.detokenize(t)); })
      .def("next_token_logprobs",
           [](const Provider& p, const std::vector<TokenId>& ctx) {
             const auto d = p.next_token_logprobs(ctx);
             return std::vector<double>(d.logprobs().begin(), d.logprobs().end());
           },
           "Log-probabilities in bits over the vocabulary.")
      .def("score_window",
           [](const Provider& p, const std::vector<TokenId>& tokens, std::size_t score_from) {
             py::gil_scoped_release release;
             return p.score_window(tokens, score_from);
           },
           py::arg("tokens"), py::arg("score_from") = 0);

  py::class_<NGramModel, Provider>(m, "NGramModel")
      .def(py::init([](int order, double alpha, const std::vector<std::string>& texts) {
             NGramModelSpec spec;
             spec.order = order;
             spec.smoothing_alpha = alpha;
             return std::make_unique<NGramModel>(spec, texts);
           }),
           py::arg("order") = 3, py::arg("alpha") = 1.0, py::arg("training_texts") = std::vector<std::string>{})
      .def_property_readonly("order", [](const NGramModel& n) { return n.spec().order; })
      .def("probability",
           [](const NGramModel& n, const std::vector<TokenId>& ctx, TokenId next) { return n.probability(ctx, next); },
           py::arg("context"), py::arg("next"));

  py::class_<RemoteProvider, Provider>(m, "RemoteProvider")
      .def(py::init([](const std::string& url, int timeout_ms, int retries) {
             return std::make_unique<RemoteProvider>(RemoteConfig{url, timeout_ms, retries});
           }),
           py::arg("url"), py::arg("timeout_ms") = 30000, py::arg("retries") = 2);

  m.def("plan_windows",
        [](std::size_t n, std::size_t context, std::size_t stride) {
          std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
          for (const auto& w : plan_windows(n, context, stride).windows) out.emplace_back(w.start, w.end, w.score_from);
          return out;
        },
        py::arg("token_count"), py::arg("context") = kDefaultContext, py::arg("stride") = kDefaultStride,
        "Windows as (start, end, score_from) triples.");

  m.def("compress",
        [](const py::bytes& data, const Provider& p, std::size_t context, std::size_t stride) {
          const auto tokens = tokens_of(p, data);
          std::vector<std::uint8_t> wire;
          {
            py::gil_scoped_release release;
            wire = encode(tokens, p, {context, stride}).serialize();
          }
          return py::bytes(reinterpret_cast<const char*>(wire.data()), wire.size());
        },
        py::arg("data"), py::arg("provider"), py::arg("context") = kDefaultContext, py::arg("stride") = kDefaultStride);

  m.def("decompress",
        [](const py::bytes& blob, const Provider& p, std::size_t context, std::size_t stride) {
          const std::string raw = blob;
          std::vector<TokenId> tokens;
          {
            py::gil_scoped_release release;
            const auto parsed = CompressedBlob::parse(
                std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
            tokens = decode(parsed, p, {context, stride});
          }
          return py::bytes(p.detokenize(tokens));
        },
        py::arg("blob"), py::arg("provider"), py::arg("context") = kDefaultContext, py::arg("stride") = kDefaultStride);

  m.def("evaluate_bpc",
        [](const std::vector<std::pair<std::string, std::string>>& docs, const Provider& p, std::size_t context,
           std::size_t stride, std::size_t workers) {
          std::vector<Document> d;
          for (const auto& [id, text] : docs) d.push_back({id, text});
          BpcOptions opt;
          opt.context = context;
          opt.stride = stride;
          opt.workers = workers;
          BpcReport r;
          {
            py::gil_scoped_release release;
            r = evaluate_corpus(d, p, opt);
          }
          py::dict per_doc;
          for (const auto& [id, s] : r.per_document) {
            per_doc[py::str(id)] = py::dict(py::arg("nll_bits") = s.nll_bits, py::arg("chars") = s.char_count,
                                            py::arg("tokens") = s.token_count);
          }
          py::list failures;
          for (const auto& f : r.failures) failures.append(py::make_tuple(f.doc_id, f.kind, f.message));
          py::dict out;
          out["corpus_bpc"] = r.corpus_bpc;
          out["total_nll_bits"] = r.total_nll_bits;
          out["total_chars"] = r.total_chars;
          out["context"] = r.context;
          out["stride"] = r.stride;
          out["per_document"] = per_doc;
          out["failures"] = failures;
          return out;
        },
        py::arg("documents"), py::arg("provider"), py::arg("context") = kDefaultContext,
        py::arg("stride") = kDefaultStride, py::arg("workers") = 0,
        "Corpus BPC for a list of (doc_id, text) pairs.");

  m.def("min_k_score", [](const std::vector<double>& nll, double k) { return min_k_score(nll, k); },
        py::arg("nlls"), py::arg("k_percent") = kDefaultKPercent);
  m.def("flag_outliers",
        [](const std::map<std::string, double>& pop) {
          const auto r = flag_outliers(pop);
          py::dict d;
          d["median"] = r.median;
          d["mad"] = r.mad;
          d["threshold"] = r.threshold;
          d["flagged"] = r.flagged;
          return d;
        },
        py::arg("population"));
  m.def("pearson", [](const std::vector<double>& xs, const std::vector<double>& ys) { return pearson(zip_points(xs, ys)); },
        py::arg("x"), py::arg("y"));
  m.def("fit_linear",
        [](const std::vector<double>& xs, const std::vector<double>& ys) { return fit_dict(fit_linear(zip_points(xs, ys))); },
        py::arg("x"), py::arg("y"));

  m.def("reproduce_tables",
        [](const std::string& dir) {
          const auto r = reproduce_tables(dir);
          py::list checks;
          for (const auto& c : r.checks) {
            checks.append(py::dict(py::arg("area") = c.area, py::arg("benchmark") = c.benchmark,
                                   py::arg("statistic") = c.statistic, py::arg("reported") = c.reported,
                                   py::arg("computed") = c.computed, py::arg("tolerance") = c.tolerance,
                                   py::arg("pass") = c.pass()));
          }
          py::dict d;
          d["checks"] = checks;
          d["math_rho_with_exclusion"] = r.math_rho_with_exclusion;
          d["math_rho_without_exclusion"] = r.math_rho_without_exclusion;
          d["all_pass"] = r.all_pass();
          return d;
        },
        py::arg("fixture_dir"));
  m.attr("BUILD_FIXTURE_DIR") = LMC_FIXTURE_DIR;
}
