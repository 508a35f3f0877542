#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "refnav/catalog.hpp"
#include "support/synthetic.hpp"

using namespace refnav;
using refnav::fixtures::make_record;

namespace {

Error ingest_error(const std::string& text, const Thesaurus& th) {
  try {
    parse_corpus(text, th);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected ingestion to fail";
  return Error(ErrorCode::IoError, "");
}

std::vector<ErrorCode> codes(const std::vector<Violation>& vs) {
  std::vector<ErrorCode> out;
  for (const auto& v : vs) out.push_back(v.code);
  return out;
}

}  // namespace

class CatalogTest : public ::testing::Test {
 protected:
  std::shared_ptr<const Thesaurus> th = fixtures::make_thesaurus();
};

TEST_F(CatalogTest, IngestsWellFormedCorpus) {
  std::mt19937_64 rng(11);
  auto records = fixtures::random_records(rng, 50, *th);
  std::string text;
  for (const auto& r : records) text += to_json(r).dump() + "\n";
  auto corpus = parse_corpus(text, *th);
  EXPECT_EQ(corpus.size(), 50u);
  EXPECT_EQ(corpus.thesaurus_version(), "test-1");
  EXPECT_EQ(corpus.records(), records);
}

TEST_F(CatalogTest, GetRecordReturnsSourcePairs) {
  auto text =
      R"({"id":"x","uri":"u","info":{"title":"T","notes":"n"},"index":[{"term":"c1.t2","weight":3},{"term":"c0.t0","weight":1}]})"
      "\n";
  auto corpus = parse_corpus(text, *th);
  const ImageRecord* r = corpus.find("x");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->index, (std::vector<IndexEntry>{{"c1.t2", 3}, {"c0.t0", 1}}));
  EXPECT_EQ(r->info.title, "T");
  EXPECT_EQ(r->info.notes, "n");
  EXPECT_FALSE(r->info.creator.has_value());
  EXPECT_EQ(corpus.find("y"), nullptr);
}

TEST_F(CatalogTest, RejectsWeightFiveAndZero) {
  for (int w : {0, 5, -1, 99}) {
    auto text = R"({"id":"x","uri":"u","index":[{"term":"c0.t0","weight":)" + std::to_string(w) + "}]}\n";
    auto e = ingest_error(text, *th);
    EXPECT_EQ(e.code(), ErrorCode::WeightOutOfRange) << w;
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].record, "x");
    EXPECT_EQ(e.violations()[0].term, "c0.t0");
    EXPECT_EQ(e.violations()[0].weight, w);
  }
}

TEST_F(CatalogTest, RejectsUnknownTermDuplicateIdAndEmptyIndex) {
  EXPECT_EQ(ingest_error(R"({"id":"x","uri":"u","index":[{"term":"zz","weight":1}]})", *th).code(), ErrorCode::UnknownTerm);
  EXPECT_EQ(ingest_error(R"({"id":"x","uri":"u","index":[]})", *th).code(), ErrorCode::EmptyIndex);
  auto dup =
      R"({"id":"x","uri":"u","index":[{"term":"c0.t0","weight":1}]})"
      "\n"
      R"({"id":"x","uri":"v","index":[{"term":"c0.t1","weight":1}]})";
  EXPECT_EQ(ingest_error(dup, *th).code(), ErrorCode::DuplicateImageId);
}

TEST_F(CatalogTest, IngestionIsAllOrNothingWithFullReport) {
  auto text =
      R"({"id":"a","uri":"u","index":[{"term":"c0.t0","weight":2}]})"
      "\n"
      R"({"id":"b","uri":"u","index":[{"term":"c0.t0","weight":7}]})"
      "\n"
      R"({"id":"c","uri":"u","index":[{"term":"nope","weight":1}]})"
      "\n";
  auto e = ingest_error(text, *th);
  EXPECT_EQ(e.code(), ErrorCode::WeightOutOfRange);
  EXPECT_EQ(codes(e.violations()), (std::vector<ErrorCode>{ErrorCode::WeightOutOfRange, ErrorCode::UnknownTerm}));
  EXPECT_NE(std::string(e.what()).find("2 violation(s)"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("'c'"), std::string::npos);
}

TEST_F(CatalogTest, MalformedLinesNameTheLine) {
  auto e = ingest_error("\n{\"id\":\"a\",\"uri\":\"u\",\"index\":[{\"term\":\"c0.t0\",\"weight\":2}]}\n{oops\n", *th);
  EXPECT_EQ(e.code(), ErrorCode::MalformedFile);
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  EXPECT_EQ(ingest_error(R"({"id":"a","uri":"u","index":[{"term":"c0.t0","weight":2.5}]})", *th).code(),
            ErrorCode::MalformedFile);
  EXPECT_EQ(ingest_error(R"({"id":"a","uri":"u","index":[{"term":"c0.t0","weight":"2"}]})", *th).code(),
            ErrorCode::MalformedFile);
  EXPECT_EQ(ingest_error(R"({"id":"a","uri":"u","info":{"author":"x"},"index":[]})", *th).code(),
            ErrorCode::MalformedFile);
  EXPECT_EQ(ingest_error(R"({"id":"","uri":"u","index":[{"term":"c0.t0","weight":2}]})", *th).code(),
            ErrorCode::MalformedFile);
}

TEST_F(CatalogTest, ValidateRecordExamples) {
  EXPECT_TRUE(validate_record(make_record("x", {{"c0.t0", 1}, {"c6.t3", 4}}), *th).empty());
  EXPECT_EQ(codes(validate_record(make_record("x", {{"c0.t0", 0}}), *th)),
            std::vector<ErrorCode>{ErrorCode::WeightOutOfRange});
  EXPECT_EQ(codes(validate_record(make_record("x", {{"c0.t0", 1}, {"c0.t0", 2}}), *th)),
            std::vector<ErrorCode>{ErrorCode::DuplicateTermInIndex});
  // A term repeated three times is still a single violation.
  EXPECT_EQ(codes(validate_record(make_record("x", {{"c0.t0", 1}, {"c0.t0", 2}, {"c0.t0", 3}}), *th)),
            std::vector<ErrorCode>{ErrorCode::DuplicateTermInIndex});
}

// For each synthetic record breaking exactly one invariant, validation
// reports exactly that class.
TEST_F(CatalogTest, ValidationCompleteness) {
  std::mt19937_64 rng(3);
  auto vocab = fixtures::all_term_ids(*th);
  for (int i = 0; i < 200; ++i) {
    auto r = fixtures::random_record(rng, "r", vocab, 1, 5);
    ASSERT_TRUE(validate_record(r, *th).empty());
    std::size_t pos = rng() % r.index.size();
    ErrorCode expected{};
    switch (i % 4) {
      case 0:
        r.index[pos].weight = (rng() % 2) ? 0 : 5 + static_cast<long long>(rng() % 10);
        expected = ErrorCode::WeightOutOfRange;
        break;
      case 1:
        r.index[pos].term = "missing." + std::to_string(i);
        expected = ErrorCode::UnknownTerm;
        break;
      case 2:
        r.index.push_back({r.index[pos].term, 1 + static_cast<long long>(rng() % 4)});
        expected = ErrorCode::DuplicateTermInIndex;
        break;
      case 3:
        r.index.clear();
        expected = ErrorCode::EmptyIndex;
        break;
    }
    EXPECT_EQ(codes(validate_record(r, *th)), std::vector<ErrorCode>{expected}) << i;
  }
}

TEST_F(CatalogTest, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  auto records = fixtures::random_records(rng, 40, *th);
  records[3].info.title = "Chapelle « Notre-Dame-du-Haut »";
  records[3].info.rights = "CC-BY";
  Corpus corpus(records, *th);
  auto once = serialize_corpus(corpus);
  auto again = parse_corpus(once, *th);
  EXPECT_EQ(again, corpus);
  EXPECT_EQ(serialize_corpus(again), once);
  EXPECT_EQ(corpus_checksum(again), corpus_checksum(corpus));
}

TEST_F(CatalogTest, ChecksumTracksContent) {
  Corpus a({make_record("x", {{"c0.t0", 1}})}, *th);
  Corpus b({make_record("x", {{"c0.t0", 2}})}, *th);
  EXPECT_NE(corpus_checksum(a), corpus_checksum(b));
  EXPECT_EQ(corpus_checksum(a).size(), 16u);
}

TEST(CatalogSample, ShippedSampleIsCanonical) {
  std::ifstream tin(REFNAV_DATA_DIR "/thesaurus.default.json");
  auto th = load_thesaurus(tin);
  std::ifstream cin(REFNAV_DATA_DIR "/sample_corpus.jsonl");
  auto text = detail::read_all(cin);
  auto corpus = parse_corpus(text, th);
  EXPECT_EQ(corpus.size(), 25u);
  EXPECT_EQ(serialize_corpus(corpus), text);
}
