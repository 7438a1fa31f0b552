#include "colmatch/evaluation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "colmatch/error.hpp"
#include "test_support.hpp"

namespace colmatch {
namespace {

// Report whose reference i lists `lists[i]` as candidate column names.
MatchReport report_with(const std::vector<std::vector<std::string>>& lists, std::size_t k = 3) {
  MatchReport r;
  r.reference_db = "ref";
  r.unknown_dbs = {"unk"};
  r.config.k = k;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    ReferenceMatches m;
    m.reference = {"ref", "r" + std::to_string(i), {"t"}};
    for (const auto& c : lists[i]) {
      m.candidates.push_back({{"unk", c, {"t"}}, 0.5, std::nullopt, {}, m.candidates.size() + 1});
    }
    r.matches.push_back(m);
  }
  return r;
}

GroundTruth truth_for(std::size_t n, std::size_t none_count = 0) {
  GroundTruth t;
  for (std::size_t i = 0; i < n; ++i) {
    GroundTruthEntry e{{"ref", "r" + std::to_string(i)}, std::nullopt};
    if (i >= none_count) e.truth = ColumnId{"unk", "t" + std::to_string(i)};
    t.entries.push_back(e);
  }
  return t;
}

TEST(GroundTruthFile, FixtureHasThirteenEvaluable) {
  auto t = load_ground_truth(testing::fixtures_dir() / "truth.json");
  EXPECT_EQ(t.entries.size(), 16u);
  EXPECT_EQ(t.evaluable(), 13u);
  const auto* ins = t.find({"mini-mimic", "insurance"});
  ASSERT_NE(ins, nullptr);
  EXPECT_FALSE(ins->truth);
  const auto* icd = t.find({"mini-mimic", "icd9_code"});
  ASSERT_NE(icd, nullptr);
  EXPECT_EQ(icd->truth, (ColumnId{"mini-eicu", "icd9code"}));
}

TEST(GroundTruthFile, Errors) {
  EXPECT_THROW(parse_ground_truth(R"({"entries": []})"), InputError);
  EXPECT_THROW(parse_ground_truth("[1,2"), InputError);
  EXPECT_THROW(parse_ground_truth(R"({"entries": [
      {"reference": {"db": "a", "column": "x"}, "truth": null},
      {"reference": {"db": "a", "column": "x"}, "truth": null}]})"),
               InputError);
  EXPECT_THROW(load_ground_truth("/nonexistent/truth.json"), InputError);
}

TEST(GroundTruthFile, ValidateAgainstDatabases) {
  auto ref = load_database(testing::fixtures_dir() / "mini-mimic", "mini-mimic");
  auto unk = load_database(testing::fixtures_dir() / "mini-eicu", "mini-eicu");
  std::vector<DatabaseHandle> dbs{ref, unk};
  auto t = load_ground_truth(testing::fixtures_dir() / "truth.json");
  EXPECT_NO_THROW(validate_ground_truth(t, dbs));
  t.entries[0].truth = ColumnId{"mini-eicu", "no_such_column"};
  EXPECT_THROW(validate_ground_truth(t, dbs), InputError);
  t.entries[0].truth = ColumnId{"other-db", "gender"};
  EXPECT_THROW(validate_ground_truth(t, dbs), InputError);
}

TEST(Accuracy, SevenOfThirteen) {
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 13; ++i) lists.push_back({i < 7 ? "t" + std::to_string(i) : "x"});
  auto r = accuracy_at_k(report_with(lists, 1), truth_for(13), 1);
  EXPECT_EQ(r.correct, 7u);
  EXPECT_EQ(r.evaluable, 13u);
  EXPECT_NEAR(r.accuracy, 0.538, 0.001);
  EXPECT_EQ(r.fraction(), "7/13");
}

TEST(Accuracy, TwelveOfThirteen) {
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 13; ++i) lists.push_back({"x", i < 12 ? "t" + std::to_string(i) : "y"});
  auto r = accuracy_at_k(report_with(lists), truth_for(13), 3);
  EXPECT_EQ(r.correct, 12u);
  EXPECT_NEAR(r.accuracy, 0.923, 0.001);
}

TEST(Accuracy, BoundaryAtK) {
  auto rep = report_with({{"a", "b", "t0"}});
  EXPECT_EQ(accuracy_at_k(rep, truth_for(1), 3).correct, 1u);
  EXPECT_EQ(accuracy_at_k(rep, truth_for(1), 2).correct, 0u);
}

TEST(Accuracy, NoneEntriesExcluded) {
  // r0 and r1 have no truth; r1's candidate list would "hit" anything.
  auto rep = report_with({{"t0"}, {"t1"}, {"t2"}, {"zz"}});
  auto r = accuracy_at_k(rep, truth_for(4, 2), 3);
  EXPECT_EQ(r.evaluable, 2u);
  EXPECT_EQ(r.correct, 1u);
}

TEST(Accuracy, SkippedCountsAsMiss) {
  auto rep = report_with({{"t0"}});
  rep.skipped.push_back({{"ref", "r1", {"t"}}, "no embeddable values"});
  auto r = accuracy_at_k(rep, truth_for(2), 1);
  EXPECT_EQ(r.evaluable, 2u);
  EXPECT_EQ(r.correct, 1u);
}

TEST(Accuracy, Errors) {
  auto rep = report_with({{"t0"}});
  EXPECT_THROW(accuracy_at_k(rep, truth_for(1), 4), InputError);
  EXPECT_THROW(accuracy_at_k(rep, truth_for(1), 0), InputError);
  EXPECT_THROW(accuracy_at_k(rep, truth_for(2), 1), InputError);
  EXPECT_THROW(accuracy_at_k(rep, truth_for(1, 1), 1), InputError);
}

TEST(Accuracy, NonDecreasingInK) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> lists;
    for (int i = 0; i < 13; ++i) {
      std::vector<std::string> l;
      for (int j = 0; j < 5; ++j) l.push_back(rng() % 4 ? "x" + std::to_string(j) : "t" + std::to_string(i));
      lists.push_back(l);
    }
    auto rep = report_with(lists, 5);
    double prev = -1;
    for (std::size_t k = 1; k <= 5; ++k) {
      auto r = accuracy_at_k(rep, truth_for(13), k);
      EXPECT_GE(r.accuracy, prev);
      EXPECT_LE(r.accuracy, 1.0);
      prev = r.accuracy;
    }
  }
}

TEST(Permutation, IsPermutationAndSeeded) {
  auto p = seeded_permutation(100, 42);
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(p, seeded_permutation(100, 42));
  EXPECT_NE(p, seeded_permutation(100, 43));
  EXPECT_TRUE(seeded_permutation(0, 1).empty());
}

EmbeddedColumn column(std::string db, std::string name, Vector v) {
  ColumnRef ref{db, name, {"t"}};
  return {{ref, v, 1, "hash-v1"},
          {ref, hash_embed(name, v.dim()), hash_embed("text", v.dim()), hash_embed("t", v.dim())}};
}

struct ScalingWorld {
  ScalingInputs inputs;
  GroundTruth truth;

  explicit ScalingWorld(std::size_t distractors) {
    std::mt19937_64 rng(17);
    std::normal_distribution<float> g;
    inputs.reference_db = "ref";
    for (int i = 0; i < 6; ++i) {
      Vector v(24);
      for (auto& x : v.values) x = g(rng);
      Vector noisy = v;
      for (auto& x : noisy.values) x += 0.8f * g(rng);
      inputs.queries.push_back(column("ref", "q" + std::to_string(i), v));
      inputs.true_pool.push_back(column("unk", "m" + std::to_string(i), noisy));
      truth.entries.push_back({{"ref", "q" + std::to_string(i)},
                               ColumnId{"unk", "m" + std::to_string(i)}});
    }
    for (std::size_t i = 0; i < distractors; ++i) {
      Vector v(24);
      for (auto& x : v.values) x = g(rng);
      inputs.distractor_pool.push_back(column("unk", "d" + std::to_string(i), v));
    }
  }
};

TEST(Scaling, DeterministicAndShaped) {
  ScalingWorld w(40);
  std::vector<std::size_t> counts{0, 10, 40};
  MatchConfig cfg{3, 0.4, MatchMode::kValuesOnly};
  auto a = scaling_experiment(w.inputs, w.truth, counts, 7, cfg);
  auto b = scaling_experiment(w.inputs, w.truth, counts, 7, cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 9u);
  EXPECT_EQ(*a[0].distractor_count, 0u);
  EXPECT_EQ(a[0].k, 1u);
  EXPECT_EQ(a[8].k, 3u);
  EXPECT_EQ(*a[8].distractor_count, 40u);
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (a[i].distractor_count == a[i + 1].distractor_count) {
      EXPECT_LE(a[i].accuracy, a[i + 1].accuracy);
    }
  }
}

TEST(Scaling, ZeroCountIsBaseline) {
  ScalingWorld w(10);
  std::vector<std::size_t> counts{0};
  MatchConfig cfg{2, 0.4, MatchMode::kValuesOnly};
  auto res = scaling_experiment(w.inputs, w.truth, counts, 1, cfg);

  std::vector<ReferenceMatches> lists;
  MatchReport rep;
  rep.reference_db = "ref";
  rep.config = cfg;
  for (const auto& q : w.inputs.queries) {
    rep.matches.push_back({q.values.ref, rank_column(q, w.inputs.true_pool, cfg).candidates});
  }
  EXPECT_EQ(res[0].correct, accuracy_at_k(rep, w.truth, 1).correct);
  EXPECT_EQ(res[1].correct, accuracy_at_k(rep, w.truth, 2).correct);
}

TEST(Scaling, SelfCopiesGivePerfectAccuracy) {
  ScalingWorld w(30);
  for (std::size_t i = 0; i < w.inputs.queries.size(); ++i) {
    auto copy = w.inputs.queries[i];
    copy.values.ref = w.inputs.true_pool[i].values.ref;
    copy.meta.ref = copy.values.ref;
    w.inputs.true_pool[i] = copy;
  }
  std::vector<std::size_t> counts{30};
  for (auto mode : {MatchMode::kValuesOnly, MatchMode::kMetadataRerank}) {
    auto res = scaling_experiment(w.inputs, w.truth, counts, 3, {1, 0.99, mode});
    EXPECT_DOUBLE_EQ(res[0].accuracy, 1.0);
  }
}

TEST(Scaling, Errors) {
  ScalingWorld w(5);
  MatchConfig cfg;
  EXPECT_THROW(scaling_experiment(w.inputs, w.truth, std::vector<std::size_t>{6}, 1, cfg),
               InputError);
  EXPECT_THROW(scaling_experiment(w.inputs, w.truth, std::vector<std::size_t>{3, 2}, 1, cfg),
               InputError);
  EXPECT_THROW(scaling_experiment(w.inputs, w.truth, std::vector<std::size_t>{}, 1, cfg),
               InputError);
  w.inputs.distractor_pool.push_back(w.inputs.true_pool[0]);
  EXPECT_THROW(scaling_experiment(w.inputs, w.truth, std::vector<std::size_t>{1}, 1, cfg),
               InputError);
}

std::vector<EvalResult> sample_results() {
  return {
      {3, 9, 13, 9.0 / 13, MatchMode::kMetadataRerank, 109},
      {1, 6, 13, 6.0 / 13, MatchMode::kValuesOnly, 0},
      {1, 7, 13, 7.0 / 13, MatchMode::kMetadataRerank, 109},
      {2, 7, 13, 7.0 / 13, MatchMode::kValuesOnly, std::nullopt},
  };
}

TEST(Render, Csv) {
  std::vector<EvalResult> one{sample_results()[0]};
  EXPECT_EQ(render_results(one, ResultFormat::kCsv),
            "mode,k,distractor_count,correct,evaluable,accuracy\n"
            "metadata,3,109,9,13,0.692308\n");
  auto all = render_results(sample_results(), ResultFormat::kCsv);
  EXPECT_NE(all.find("values,2,,7,13,0.538462\n"), std::string::npos);
}

TEST(Render, JsonRoundTrip) {
  auto res = sample_results();
  auto text = render_results(res, ResultFormat::kJson);
  EXPECT_NE(text.find("\"fraction\": \"9/13\""), std::string::npos);
  EXPECT_EQ(parse_results_json(text), res);
}

TEST(Render, TableSortedAndAligned) {
  auto text = render_results(sample_results(), ResultFormat::kTable);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  ASSERT_EQ(lines.size(), 5u);
  for (const auto& l : lines) EXPECT_EQ(l.size(), lines[0].size());
  // Mode in declaration order, then distractor count (none first), then k.
  EXPECT_EQ(lines[1].rfind("values", 0), 0u);
  EXPECT_NE(lines[1].find(" - "), std::string::npos);
  EXPECT_NE(lines[2].find("6/13"), std::string::npos);
  EXPECT_EQ(lines[3].rfind("metadata", 0), 0u);
  EXPECT_NE(lines[3].find("7/13"), std::string::npos);
  EXPECT_NE(lines[4].find("9/13"), std::string::npos);
}

TEST(Render, EmptyAndFormatWords) {
  EXPECT_THROW(render_results(std::vector<EvalResult>{}, ResultFormat::kCsv), InputError);
  EXPECT_EQ(parse_result_format("table"), ResultFormat::kTable);
  EXPECT_FALSE(parse_result_format("xml"));
}

}  // namespace
}  // namespace colmatch
