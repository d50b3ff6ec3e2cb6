#include <gtest/gtest.h>

#include "mfreg/corpus.hpp"

using namespace mfreg;

namespace {

ExtReal singleton_value(const SetDescription& d) {
  auto s = discretize(d, Window::box(1, -10, 10), 1e-3);
  EXPECT_EQ(s.size(), 1u);
  return ExtReal(s.points().front()[0]);
}

EntryRun synthetic(const std::string& id, std::vector<bool> expected, std::vector<bool> measured) {
  EntryRun r{id, "", {}, {}};
  for (size_t i = 0; i < expected.size(); ++i) {
    CorpusItem it;
    it.entry = id;
    it.property = "p" + std::to_string(i);
    it.expected = expected[i];
    it.measured = measured[i];
    r.items.push_back(it);
  }
  return r;
}

void expect_all_agree(const EntryRun& r) {
  for (const auto& it : r.items) EXPECT_TRUE(it.agree()) << r.id << " " << it.property << "\n" << it.evidence.dump(1);
}

}  // namespace

TEST(CorpusOracles, FirstExampleValues) {
  EXPECT_EQ(singleton_value(corpus::e1_h({0.25}, {0.25})), ExtReal(0.0));
  EXPECT_EQ(singleton_value(corpus::e1_h({0.0}, {0.0})), ExtReal(0.0));
  EXPECT_NEAR(singleton_value(corpus::e1_h({0.1}, {-0.25})).value(), 0.5, 1e-3);
}

TEST(CorpusOracles, RatioExampleValues) {
  EXPECT_NEAR(singleton_value(corpus::e3_h({0.5}, {0.25})).value(), 2, 1e-3);
  EXPECT_EQ(singleton_value(corpus::e3_h({0.5}, {0.0})), ExtReal(0.0));
  EXPECT_NEAR(singleton_value(corpus::e3_h({0.0}, {-0.5})).value(), 0.5, 1e-3);
}

TEST(CorpusOracles, SumExampleImages) {
  auto P = corpus::e6_pair(0.25);
  // F(0) = {0} u [1/2, 1], G(0) = [-1, 0]
  EXPECT_EQ(P.F.image_at({0.0}), (FiniteSet{{0.0}, {0.5}, {0.75}, {1.0}}));
  EXPECT_EQ(P.G.image_at({0.0}), (FiniteSet{{-1.0}, {-0.75}, {-0.5}, {-0.25}, {0.0}}));
  EXPECT_EQ(P.G.image_at({0.5}), (FiniteSet{{-0.5}, {0.0}}));
  EXPECT_EQ(P.F.image_at({-0.5}), (FiniteSet{{0.0}, {0.25}, {0.5}}));
}

TEST(CorpusOracles, SequenceExampleSolutions) {
  auto d = corpus::e7_build(0.05, 4);
  // 0 in F(x,p) + G(x) at x = -1/n^2 - 1/m^3, p = 1/n^2 - 1/m; n = 3, m = 4
  auto s = d.S.image_at(snap(Point{1.0 / 9 - 0.25}));
  EXPECT_TRUE(s.contains(snap(Point{-1.0 / 9 - 1.0 / 64})));
  EXPECT_TRUE(d.S.image_at({0.0}).contains(Point{0.0}));
}

TEST(Corpus, IntervalExamplesAgree) {
  for (const char* id : {"E1", "E2", "E3"}) expect_all_agree(run_corpus_entry(id, 1e-2, 10));
}

TEST(Corpus, SumExamplesAgree) {
  for (const char* id : {"E4", "E6"}) expect_all_agree(run_corpus_entry(id, 1e-2, 10));
}

TEST(Corpus, SequenceExampleAgreesAtSmallN) { expect_all_agree(run_corpus_entry("E7", 2e-2, 8)); }

TEST(Corpus, CalmSumTheoremOnFirstSumExample) {
  auto r = run_corpus_entry("E4", 1e-2, 5);
  ASSERT_EQ(r.theorems.size(), 1u);
  EXPECT_EQ(r.theorems[0].theorem_id, "calm_sum");
  EXPECT_FALSE(r.theorems[0].premises_hold);
}

TEST(Corpus, RejectsBadArguments) {
  EXPECT_THROW(run_corpus({1e-2}, 4), std::invalid_argument);
  EXPECT_THROW(run_corpus({}, 10), std::invalid_argument);
  EXPECT_THROW(run_corpus({0.0}, 10), std::invalid_argument);
  EXPECT_THROW(run_corpus({1e-2}, 10, {"E9"}), std::invalid_argument);
  EXPECT_THROW(run_corpus_entry("nope", 1e-2, 10), std::invalid_argument);
}

TEST(Corpus, Ids) {
  EXPECT_EQ(corpus_ids(), (std::vector<std::string>{"E1", "E2", "E3", "E4", "E5", "E6", "E7"}));
  EXPECT_TRUE(is_corpus_id("E5"));
  EXPECT_FALSE(is_corpus_id("e5"));
}

TEST(ClassificationMatrix, PassUsesFinestResolution) {
  ClassificationMatrix M;
  M.resolutions = {1e-2, 5e-3};
  M.runs = {{synthetic("A", {true, false}, {true, true})}, {synthetic("A", {true, false}, {true, false})}};
  EXPECT_TRUE(M.pass());
  EXPECT_FALSE(M.all_agree());
  EXPECT_FALSE(M.stable());
  EXPECT_EQ(M.agree_count(0), 1u);
  auto j = M.to_json();
  EXPECT_EQ(j["resolutions"][0]["agreement"], "1/2");
  EXPECT_EQ(j["pass"], true);
  auto t = M.table();
  EXPECT_NE(t.find("PASS"), std::string::npos);
  EXPECT_NE(t.find(" !"), std::string::npos);
}

TEST(ClassificationMatrix, FailsOnFinestDisagreement) {
  ClassificationMatrix M;
  M.resolutions = {5e-3, 1e-2};
  M.runs = {{synthetic("A", {true}, {false})}, {synthetic("A", {true}, {true})}};
  EXPECT_FALSE(M.pass());
  EXPECT_EQ(M.finest(), 0u);
}

TEST(ClassificationMatrix, RunIsDeterministic) {
  auto a = run_corpus({2e-2, 1e-2}, 5, {"E3", "E6"});
  auto b = run_corpus({2e-2, 1e-2}, 5, {"E3", "E6"});
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_TRUE(a.pass());
  EXPECT_TRUE(a.stable());
  auto item = a.to_json()["resolutions"][1]["entries"][0]["items"][0];
  for (const char* k : {"entry", "property", "point", "constant", "expected", "measured", "agree", "claim", "evidence"})
    EXPECT_TRUE(item.contains(k)) << k;
}
