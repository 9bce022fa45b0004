#include <gtest/gtest.h>

#include <sstream>

#include "lmc/errors.hpp"
#include "lmc/io.hpp"

using namespace lmc;

TEST(Jsonl, ParsesDocuments) {
  std::istringstream in(
      "{\"id\":\"a\",\"text\":\"x\",\"source\":\"web\",\"collected\":\"2023-01-01\"}\n\n"
      "{\"id\":\"b\",\"text\":\"y\",\"repo\":\"r\",\"path\":\"p\"}\n");
  auto docs = io::parse_documents_jsonl(in);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].repo, "r");
  std::istringstream bad("{\"id\":1}\n");
  EXPECT_THROW(io::parse_documents_jsonl(bad), DataError);
}

TEST(Csv, SplitsQuotedFields) {
  EXPECT_EQ(io::split_csv_line("a,\"b,c\",\"d\"\"e\""), (std::vector<std::string>{"a", "b,c", "d\"e"}));
}

TEST(Csv, ObservationPercentages) {
  std::istringstream in("# comment\nmodel,HumanEval,MBPP,Average,bpc,flags\nA,50,40,45,0.5,\nB,30,20,25,0.7,x;y\n");
  auto t = io::parse_observation_csv(in, "coding");
  EXPECT_EQ(t.benchmarks, (std::vector<std::string>{"HumanEval", "MBPP"}));
  ASSERT_EQ(t.observations.size(), 2u);
  EXPECT_DOUBLE_EQ(t.observations[0].scores.at("HumanEval"), 0.5);
  EXPECT_DOUBLE_EQ(t.reported_average.at("A"), 0.45);
  EXPECT_EQ(t.observations[1].flags, (std::set<std::string>{"x", "y"}));
}

TEST(Report, BpcRoundTrip) {
  auto r = aggregate_bpc({{"a", 8.5, 3, 4}, {"b", 1.25, 2, 2}}, {{"c", "transport_error", "down"}}, "corp", "prov");
  auto back = io::bpc_report_from_json(io::to_json(r));
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(r).dump());
  EXPECT_EQ(io::to_json(r)["schema_version"], 1);
}

TEST(Report, ManifestRoundTrip) {
  CorpusManifest m;
  m.corpus_name = "c";
  m.source = "web";
  m.time_period = {{"2023-01-01", "2023-02-01"}};
  m.document_ids = {"a", "b"};
  m.total_chars = 10;
  auto back = io::manifest_from_json(io::to_json(m));
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(m).dump());
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3)), 1.0 / 3);
}
