/*
 * Copyright 2026 The argq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "argq/evaluation.h"
#include "argq/simulator.h"
#include "oracles.h"
#include "test_util.h"

namespace argq {
namespace {

using testing::error_kind_of;

std::vector<PairCandidate> candidates() {
  return {{"b", "T1", StanceCall::kPro, Split::kTrain},
          {"a", "T1", StanceCall::kPro, Split::kTrain},
          {"c", "T1", StanceCall::kCon, Split::kTrain},
          {"d", "T1", StanceCall::kCon, Split::kDev},
          {"e", "T1", StanceCall::kUndetermined, Split::kTrain},
          {"f", "T2", StanceCall::kPro, Split::kTrain},
          {"g", "T2", StanceCall::kPro, Split::kTrain},
          {"h", "T2", StanceCall::kPro, Split::kTrain}};
}

TEST(Pairs, SameTopicSameStanceOnly) {
  const auto pairs = generate_pairs(candidates());
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& p : pairs) got.emplace_back(p.first, p.second);
  EXPECT_EQ(got, (std::vector<std::pair<std::string, std::string>>{
                     {"a", "b"}, {"c", "d"}, {"f", "g"}, {"f", "h"}, {"g", "h"}}));
  EXPECT_EQ(pairs[1].stance, Stance::kCon);
  const auto train = generate_pairs(candidates(), Split::kTrain);
  EXPECT_EQ(train.size(), 4u);
}

TEST(Pairs, CountMatchesGroupSizes) {
  std::vector<PairCandidate> c;
  for (int i = 0; i < 30; ++i) {
    c.push_back({"x" + std::to_string(i), "T" + std::to_string(i % 3),
                 i % 2 ? StanceCall::kPro : StanceCall::kCon, std::nullopt});
  }
  // Six groups of five.
  EXPECT_EQ(generate_pairs(c).size(), 6u * 10u);
}

TEST(Pairs, DeltasAndDisagreements) {
  const auto pairs = generate_pairs(candidates());
  const QualityScores a(ScoreMethod::kWeightedAverage,
                        {{"a", 0.2, 1}, {"b", 0.9, 1}, {"c", 0.5, 1}, {"d", 0.5, 1},
                         {"f", 0.1, 1}, {"g", 0.3, 1}, {"h", 0.6, 1}});
  const QualityScores m(ScoreMethod::kMaceP,
                        {{"a", 0.95, 1}, {"b", 0.1, 1}, {"c", 0.2, 1}, {"d", 0.8, 1},
                         {"f", 0.0, 1}, {"g", 0.4, 1}, {"h", 0.7, 1}});
  EXPECT_NEAR(score_delta(pairs[0], a), 0.7, 1e-15);
  auto copy = pairs;
  attach_score_deltas(copy, a);
  attach_score_deltas(copy, m);
  EXPECT_EQ(copy[0].score_delta.size(), 2u);
  const auto dis = disagreement_pairs(a, m, pairs);
  ASSERT_EQ(dis.size(), 1u);  // (c,d) is tied under WA, so not a disagreement
  EXPECT_EQ(dis[0].first, "a");
  const QualityScores partial(ScoreMethod::kMaceP, {{"a", 0.5, 1}});
  EXPECT_EQ(error_kind_of([&] { score_delta(pairs[0], partial); }), ErrorKind::kNotFound);
}

TEST(Gold, LookupIsOrderInsensitive) {
  PairwiseGold gold;
  gold.set("z", "a", {Preferred::kFirst, 0.8, 5});
  const auto fwd = gold.find("z", "a");
  const auto rev = gold.find("a", "z");
  ASSERT_TRUE(fwd && rev);
  EXPECT_EQ(fwd->preferred, Preferred::kFirst);
  EXPECT_EQ(rev->preferred, Preferred::kSecond);
  EXPECT_FALSE(gold.find("a", "b"));
}

TEST(Gold, CsvRoundTripAndErrors) {
  PairwiseGold gold;
  gold.set("a", "b", {Preferred::kSecond, 5.0 / 7.0, 7});
  gold.set("c", "d", {Preferred::kFirst, 1.0, 7});
  std::ostringstream out;
  write_pairwise_gold(out, gold);
  std::istringstream in(out.str());
  const PairwiseGold back = read_pairwise_gold(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.find("a", "b")->preferred, Preferred::kSecond);
  EXPECT_EQ(back.find("a", "b")->agreement, 5.0 / 7.0);

  std::istringstream neither("first_id,second_id,preferred_id,agreement\na,b,c,0.9\n");
  EXPECT_EQ(error_kind_of([&] { read_pairwise_gold(neither); }), ErrorKind::kValidation);
  std::istringstream dup("first_id,second_id,preferred_id,agreement\na,b,a,0.9\nb,a,a,1\n");
  EXPECT_EQ(error_kind_of([&] { read_pairwise_gold(dup); }), ErrorKind::kConflict);
  std::istringstream missing("first_id,second_id,agreement\na,b,0.9\n");
  EXPECT_EQ(error_kind_of([&] { read_pairwise_gold(missing); }), ErrorKind::kSchema);
}

// Pairs over n arguments in one group with the given scores; gold prefers
// the higher latent value.
struct BinFixture {
  std::vector<ArgumentPair> pairs;
  QualityScores scores;
  PairwiseGold gold;
};

BinFixture bin_fixture(const std::vector<double>& score, const std::vector<double>& latent,
                       double agreement = 1.0) {
  BinFixture f;
  std::vector<PairCandidate> c;
  std::vector<ScoreEntry> entries;
  for (std::size_t i = 0; i < score.size(); ++i) {
    const std::string id = "a" + std::to_string(100 + i);
    c.push_back({id, "T", StanceCall::kPro, std::nullopt});
    entries.push_back({id, score[i], 1});
  }
  f.pairs = generate_pairs(c);
  f.scores = QualityScores(ScoreMethod::kWeightedAverage, entries);
  for (const auto& p : f.pairs) {
    const double l1 = latent[std::stoi(p.first.substr(1)) - 100];
    const double l2 = latent[std::stoi(p.second.substr(1)) - 100];
    f.gold.set(p.first, p.second, {l1 >= l2 ? Preferred::kFirst : Preferred::kSecond,
                                   agreement, 7});
  }
  return f;
}

TEST(DeltaBins, EdgesTiesAndPerfectGold) {
  // Deltas: 0 (tie), 0.25, 0.5, 0.75, 1 and more.
  const std::vector<double> s = {0.0, 0.25, 0.5, 0.75, 1.0, 1.0};
  const BinFixture f = bin_fixture(s, s);
  const DeltaBinReport r = delta_bin_evaluation(f.pairs, f.scores, f.gold, {150, 0.7, 1});
  ASSERT_EQ(r.bins.size(), 4u);
  EXPECT_EQ(r.tied_pairs, 1);
  // 0.25 deltas: (0,.25) (.25,.5) (.5,.75) (.75,1) x2 -> 5 pairs in the first bin.
  EXPECT_EQ(r.bins[0].population, 5);
  EXPECT_EQ(r.bins[1].population, 4);   // delta 0.5
  EXPECT_EQ(r.bins[2].population, 3);   // delta 0.75
  EXPECT_EQ(r.bins[3].population, 2);   // delta 1
  for (const DeltaBin& b : r.bins) {
    ASSERT_TRUE(b.precision);
    EXPECT_EQ(*b.precision, 1.0);
    EXPECT_EQ(b.filtered, 0);
  }
  EXPECT_EQ(r.bins[0].label, "[0,0.25]");
}

TEST(DeltaBins, ReversedGoldGivesZeroAndLowAgreementIsFiltered) {
  const std::vector<double> s = {0.1, 0.3, 0.6, 0.95};
  const BinFixture f = bin_fixture(s, {0.9, 0.7, 0.4, 0.05});
  const DeltaBinReport r = delta_bin_evaluation(f.pairs, f.scores, f.gold, {150, 0.7, 1});
  for (const DeltaBin& b : r.bins) {
    if (b.precision) {
      EXPECT_EQ(*b.precision, 0.0);
    }
  }
  const BinFixture low = bin_fixture(s, s, 0.6);
  const DeltaBinReport lr = delta_bin_evaluation(low.pairs, low.scores, low.gold, {150, 0.7, 1});
  for (const DeltaBin& b : lr.bins) {
    EXPECT_EQ(b.pair_count, 0);
    EXPECT_FALSE(b.precision);
    if (b.sampled) {
      EXPECT_EQ(*b.filtered_fraction, 1.0);
    }
  }
}

TEST(DeltaBins, SamplingIsCappedAndSeeded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(60);
  for (double& x : s) x = u(rng);
  const BinFixture f = bin_fixture(s, s);
  const DeltaBinReport a = delta_bin_evaluation(f.pairs, f.scores, f.gold, {20, 0.7, 5});
  const DeltaBinReport b = delta_bin_evaluation(f.pairs, f.scores, f.gold, {20, 0.7, 5});
  const DeltaBinReport c = delta_bin_evaluation(f.pairs, f.scores, f.gold, {20, 0.7, 6});
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a.bins[k].sampled, std::min(20, a.bins[k].population));
    EXPECT_EQ(a.bins[k].sampled_pairs, b.bins[k].sampled_pairs);
    std::set<std::pair<std::string, std::string>> unique(a.bins[k].sampled_pairs.begin(),
                                                          a.bins[k].sampled_pairs.end());
    EXPECT_EQ(unique.size(), a.bins[k].sampled_pairs.size());
  }
  EXPECT_NE(a.bins[0].sampled_pairs, c.bins[0].sampled_pairs);
}

TEST(DeltaBins, MissingGoldIsNotFound) {
  const std::vector<double> s = {0.1, 0.9};
  BinFixture f = bin_fixture(s, s);
  f.gold = PairwiseGold{};
  EXPECT_EQ(error_kind_of([&] { delta_bin_evaluation(f.pairs, f.scores, f.gold, {}); }),
            ErrorKind::kNotFound);
}

AnnotationSet small_sim(std::uint64_t seed, int args = 60) {
  SimConfig c;
  c.n_topics = 1;
  c.args_per_topic = args;
  c.n_annotators = 10;
  c.annotations_per_argument = 9;
  c.seed = seed;
  return simulate_corpus(c).annotations;
}

TEST(SplitHalf, HalvesAreDisjointAndBalanced) {
  const AnnotationSet set = small_sim(1);
  const auto [a, b] = split_annotations(set, 42);
  for (std::size_t i = 0; i < set.arguments().size(); ++i) {
    // 9 annotations: one dropped, 4 per half.
    EXPECT_EQ(a.records_of(i).size(), 4u);
    EXPECT_EQ(b.records_of(i).size(), 4u);
    std::set<std::string> who;
    for (std::size_t r : a.records_of(i)) who.insert(a.records()[r].annotator_id);
    for (std::size_t r : b.records_of(i)) EXPECT_FALSE(who.count(b.records()[r].annotator_id));
  }
  const auto [c, d] = split_annotations(set, 42);
  EXPECT_EQ(a, c);
  EXPECT_EQ(b, d);
}

TEST(SplitHalf, ExchangeableAndDeterministic) {
  const AnnotationSet set = small_sim(2, 100);
  SplitHalfConfig config;
  config.reliability.min_shared = 10;
  config.seed = 9;
  const auto [a, b] = split_annotations(set, config.seed);
  for (ScoreMethod m : {ScoreMethod::kWeightedAverage, ScoreMethod::kMaceP}) {
    const CorrelationResult ab = half_consistency(a, b, m, config);
    const CorrelationResult ba = half_consistency(b, a, m, config);
    EXPECT_EQ(ab.pearson_r, ba.pearson_r);
    EXPECT_EQ(ab.spearman_rho, ba.spearman_rho);
    const CorrelationResult again = split_half_consistency(set, m, config);
    EXPECT_EQ(again.pearson_r, ab.pearson_r);
  }
}

TEST(SplitHalf, TooFewScoredArgumentsIsNumerical) {
  const AnnotationSet set = small_sim(3);
  SplitHalfConfig config;
  config.reliability.min_shared = 1000;
  config.weights.fallback = FallbackPolicy::kExclude;
  EXPECT_EQ(error_kind_of([&] {
              split_half_consistency(set, ScoreMethod::kWeightedAverage, config);
            }),
            ErrorKind::kNumerical);
}

std::pair<std::vector<Prediction>, QualityScores> noisy_predictor(std::uint64_t seed, int n,
                                                                   double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1), e(-noise, noise);
  std::vector<ScoreEntry> gold;
  std::vector<Prediction> preds;
  for (int i = 0; i < n; ++i) {
    const std::string id = "arg" + std::to_string(i);
    const double g = u(rng);
    gold.push_back({id, g, 1});
    preds.push_back({id, g + e(rng)});
  }
  return {preds, QualityScores(ScoreMethod::kWeightedAverage, gold)};
}

TEST(Predictions, EvaluationMatchesOracle) {
  const auto [preds, gold] = noisy_predictor(1, 200, 0.3);
  const PredictionEvaluation ev = evaluate_predictions(preds, gold);
  std::vector<double> p, g;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    p.push_back(preds[i].score);
    g.push_back(gold.entries()[i].score);
  }
  EXPECT_NEAR(ev.correlation.pearson_r, oracle::pearson(p, g), 1e-12);
  EXPECT_NEAR(ev.correlation.spearman_rho, oracle::spearman(p, g), 1e-12);
  EXPECT_NEAR(ev.rrse, oracle::rrse(p, g), 1e-12);
  ASSERT_EQ(ev.residuals.size(), 200u);
  EXPECT_EQ(ev.residuals[3].residual, p[3] - g[3]);
}

TEST(Predictions, IdentityGivesPerfectCorrelation) {
  const auto [preds, gold] = noisy_predictor(2, 50, 0.0);
  const PredictionEvaluation ev = evaluate_predictions(preds, gold);
  EXPECT_EQ(ev.correlation.pearson_r, 1.0);
  EXPECT_EQ(ev.correlation.spearman_rho, 1.0);
  EXPECT_EQ(ev.rrse, 0.0);
}

TEST(Predictions, MissingIdsAreListed) {
  auto [preds, gold] = noisy_predictor(3, 20, 0.1);
  preds.erase(preds.begin() + 5);
  try {
    evaluate_predictions(preds, gold);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("arg5"), std::string::npos);
  }
}

TEST(Predictions, CsvHeaderIsOptional) {
  std::istringstream with("argument_id,score\na,0.5\nb,-1.25\n");
  std::istringstream without("a,0.5\nb,-1.25\n");
  const auto x = read_predictions_csv(with), y = read_predictions_csv(without);
  ASSERT_EQ(x.size(), 2u);
  ASSERT_EQ(y.size(), 2u);
  EXPECT_EQ(x[1].score, y[1].score);
  std::istringstream dup("a,0.5\na,0.7\n");
  EXPECT_EQ(error_kind_of([&] { read_predictions_csv(dup); }), ErrorKind::kConflict);
  std::istringstream bad("a,0.5\nb,zero\n");
  EXPECT_EQ(error_kind_of([&] { read_predictions_csv(bad); }), ErrorKind::kValidation);
}

TEST(Cutoff, FiftyEqualsFullSetBitExactly) {
  for (int n : {100, 101, 7}) {
    const auto [preds, gold] = noisy_predictor(n, n, 0.4);
    const std::vector<int> d = {50};
    const CutoffCurve curve = cutoff_correlations(preds, gold, d);
    const PredictionEvaluation full = evaluate_predictions(preds, gold);
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_EQ(curve.points[0].pearson_r, full.correlation.pearson_r);
    EXPECT_EQ(curve.points[0].spearman_rho, full.correlation.spearman_rho);
    EXPECT_EQ(curve.points[0].subset_size, static_cast<std::size_t>(n));
  }
}

TEST(Cutoff, SubsetsAreExtremesOfGold) {
  const auto [preds, gold] = noisy_predictor(4, 1000, 0.5);
  const CutoffCurve curve = cutoff_correlations(preds, gold);
  ASSERT_EQ(curve.points.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(curve.points[k].percentile, 10 * static_cast<int>(k + 1));
    EXPECT_EQ(curve.points[k].subset_size, 200u * (k + 1));
  }
  // Oracle for d = 10: 100 lowest and 100 highest gold values.
  std::vector<std::size_t> idx(1000);
  for (std::size_t i = 0; i < 1000; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return gold.entries()[a].score < gold.entries()[b].score;
  });
  std::vector<bool> keep(1000, false);
  for (int r = 0; r < 100; ++r) keep[idx[r]] = keep[idx[999 - r]] = true;
  std::vector<double> p, g;
  for (std::size_t i = 0; i < 1000; ++i) {
    if (!keep[i]) continue;
    p.push_back(preds[i].score);
    g.push_back(gold.entries()[i].score);
  }
  EXPECT_NEAR(curve.points[0].pearson_r, oracle::pearson(p, g), 1e-12);
  std::ostringstream csv;
  write_cutoff_csv(csv, curve);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

TEST(Cutoff, TinySubsetsBecomeNotices) {
  const auto [preds, gold] = noisy_predictor(5, 10, 0.1);
  const std::vector<int> d = {1, 50};
  const CutoffCurve curve = cutoff_correlations(preds, gold, d);
  EXPECT_EQ(curve.points.size(), 1u);
  EXPECT_EQ(curve.notices.size(), 1u);
  const std::vector<int> bad = {60};
  EXPECT_EQ(error_kind_of([&] { cutoff_correlations(preds, gold, bad); }),
            ErrorKind::kValidation);
}

TEST(Compare, IdenticalPredictorsGiveHalf) {
  const auto [preds, gold] = noisy_predictor(6, 300, 0.3);
  const PredictorComparison c = compare_predictors(preds, preds, gold);
  EXPECT_EQ(c.pearson.p_value_one_sided, 0.5);
  EXPECT_EQ(c.spearman.p_value_one_sided, 0.5);
  EXPECT_EQ(c.pearson_a_b, 1.0);
}

TEST(Compare, BetterPredictorIsSignificant) {
  const auto [good, gold] = noisy_predictor(7, 2000, 0.1);
  auto [worse, unused] = noisy_predictor(7, 2000, 0.1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> e(-0.5, 0.5);
  for (Prediction& p : worse) p.score += e(rng);
  const PredictorComparison c = compare_predictors(good, worse, gold);
  EXPECT_GT(c.pearson_a_gold, c.pearson_b_gold);
  EXPECT_LT(c.pearson.p_value_one_sided, 1e-6);
  EXPECT_LT(c.spearman.p_value_one_sided, 1e-6);
}

}  // namespace
}  // namespace argq
