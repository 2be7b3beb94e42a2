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

// Evaluation protocols for quality scores and for external ranking
// predictors: same-topic same-stance pairs, delta-bin agreement with
// pairwise gold, split-half consistency, correlation with cut-off views, and
// dependent-correlation comparison of two predictors.

#ifndef ARGQ_EVALUATION_H_
#define ARGQ_EVALUATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "argq/corpus.h"
#include "argq/mace.h"
#include "argq/reliability.h"
#include "argq/scores.h"
#include "argq/scoring.h"
#include "argq/stats.h"
#include "json.hpp"

namespace argq {

// ---------------------------------------------------------------------------
// Pairs

struct PairCandidate {
  std::string id;
  std::string topic;
  StanceCall stance = StanceCall::kUndetermined;
  std::optional<Split> split;
};

std::vector<PairCandidate> pair_candidates(const ScoredCorpus& corpus);
// Stance is the annotators' majority; unannotated arguments are undetermined.
std::vector<PairCandidate> pair_candidates(const AnnotationSet& set);

struct ArgumentPair {
  std::string first;   // first < second
  std::string second;
  std::string topic;
  Stance stance = Stance::kPro;
  std::map<ScoreMethod, double> score_delta;
};

// Every unordered pair within a (topic, stance) group, undetermined stances
// excluded, sorted by (topic, stance, first, second).
std::vector<ArgumentPair> generate_pairs(
    std::span<const PairCandidate> candidates,
    std::optional<Split> split = std::nullopt);

// |score(first) - score(second)|; throws Error(kNotFound) naming the missing
// argument.
double score_delta(const ArgumentPair& pair, const QualityScores& scores);
void attach_score_deltas(std::vector<ArgumentPair>& pairs,
                         const QualityScores& scores);

// Pairs on which the two score sets order the arguments strictly oppositely.
std::vector<ArgumentPair> disagreement_pairs(
    const QualityScores& a, const QualityScores& b,
    std::span<const ArgumentPair> pairs);

// ---------------------------------------------------------------------------
// Pairwise gold

enum class Preferred { kFirst, kSecond };

struct GoldJudgment {
  Preferred preferred = Preferred::kFirst;
  double agreement = 1.0;  // majority share in [0.5, 1]
  int judges = 0;
};

class PairwiseGold {
 public:
  void set(const std::string& first, const std::string& second,
           GoldJudgment judgment);
  // Order of the ids does not matter; the judgment is reported relative to
  // the ids as passed.
  std::optional<GoldJudgment> find(const std::string& first,
                                   const std::string& second) const;
  std::size_t size() const { return judgments_.size(); }
  const std::map<std::pair<std::string, std::string>, GoldJudgment>&
  judgments() const {
    return judgments_;
  }

 private:
  std::map<std::pair<std::string, std::string>, GoldJudgment> judgments_;
};

// CSV columns: first_id,second_id,preferred_id,agreement[,judges].
PairwiseGold read_pairwise_gold(std::istream& in);
void write_pairwise_gold(std::ostream& out, const PairwiseGold& gold);

// ---------------------------------------------------------------------------
// Delta bins

struct DeltaBinConfig {
  int sample_per_bin = 150;
  double agreement_threshold = 0.7;
  std::uint64_t seed = 0;
};

struct DeltaBin {
  std::string label;
  double lower = 0.0;  // exclusive, except the first bin which starts at 0
  double upper = 0.0;  // inclusive
  int population = 0;  // non-tied pairs whose delta falls in the bin
  int sampled = 0;
  int filtered = 0;    // sampled pairs below the agreement threshold
  int pair_count = 0;  // retained pairs
  std::optional<double> filtered_fraction;
  std::optional<double> precision;
  std::vector<std::pair<std::string, std::string>> sampled_pairs;
};

struct DeltaBinReport {
  ScoreMethod method = ScoreMethod::kWeightedAverage;
  DeltaBinConfig config;
  int tied_pairs = 0;  // delta == 0, never sampled
  std::vector<DeltaBin> bins;
};

// Bins: [0, .25], (.25, .5], (.5, .75], (.75, 1]. Within each bin up to
// sample_per_bin non-tied pairs are drawn without replacement, pairs whose
// gold agreement is below the threshold are dropped, and precision is the
// share of retained pairs where the higher-scored argument is the gold
// preference. Throws Error(kNotFound) if gold lacks a sampled pair.
DeltaBinReport delta_bin_evaluation(std::span<const ArgumentPair> pairs,
                                    const QualityScores& scores,
                                    const PairwiseGold& gold,
                                    const DeltaBinConfig& config);

// ---------------------------------------------------------------------------
// Split-half consistency

struct SplitHalfConfig {
  // Halved shared-judgment threshold: each half holds half the evidence.
  ReliabilityConfig reliability{25, 5, LabelChannel::kQuality};
  // Applied once to the full set before splitting.
  double test_fail_rate = 0.2;
  WeightPolicy weights;
  MaceConfig mace;
  std::uint64_t seed = 0;
};

// Randomly halves every argument's annotations. Arguments with an odd count
// lose one randomly chosen annotation first; arguments with fewer than two
// annotations are left out.
std::pair<AnnotationSet, AnnotationSet> split_annotations(
    const AnnotationSet& set, std::uint64_t seed);

// Scores both halves independently (reliability recomputed per half) and
// correlates them over arguments scored in both. Throws Error(kNumerical)
// when fewer than three arguments are scored in both halves.
CorrelationResult half_consistency(const AnnotationSet& first,
                                   const AnnotationSet& second,
                                   ScoreMethod method,
                                   const SplitHalfConfig& config);

// Filters test-question failures on the full set, splits, then scores.
CorrelationResult split_half_consistency(const AnnotationSet& set,
                                         ScoreMethod method,
                                         const SplitHalfConfig& config);

// Reliability table then the scorer for `method`; no test-question
// filtering.
QualityScores score_method(const AnnotationSet& set, ScoreMethod method,
                           const ReliabilityConfig& reliability,
                           const WeightPolicy& weights,
                           const MaceConfig& mace);

// ---------------------------------------------------------------------------
// External predictors

struct Prediction {
  std::string argument_id;
  double score = 0.0;
};

// Two columns (argument_id, score); a header row is optional.
std::vector<Prediction> read_predictions_csv(std::istream& in);

struct Residual {
  std::string argument_id;
  double prediction = 0.0;
  double gold = 0.0;
  double residual = 0.0;  // prediction - gold
};

struct PredictionEvaluation {
  CorrelationResult correlation;
  double rrse = 0.0;
  std::vector<Residual> residuals;
};

// Aligns predictions to gold order. Throws Error(kValidation) listing the
// gold ids the predictions do not cover.
PredictionEvaluation evaluate_predictions(std::span<const Prediction> predictions,
                                          const QualityScores& gold);

struct CutoffPoint {
  int percentile = 0;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t subset_size = 0;
};

struct CutoffCurve {
  std::vector<CutoffPoint> points;
  std::vector<std::string> notices;  // skipped percentiles
};

// For each d the subset is the bottom ceil(n d / 100) and top ceil(n d / 100)
// arguments by gold score (ties by id), kept in gold order so d = 50
// reproduces the full-set correlation exactly.
CutoffCurve cutoff_correlations(std::span<const Prediction> predictions,
                                const QualityScores& gold,
                                std::span<const int> percentiles = {});

void write_cutoff_csv(std::ostream& out, const CutoffCurve& curve);

struct PredictorComparison {
  std::size_t n = 0;
  double pearson_a_gold = 0.0;
  double pearson_b_gold = 0.0;
  double pearson_a_b = 0.0;
  WilliamsResult pearson;
  double spearman_a_gold = 0.0;
  double spearman_b_gold = 0.0;
  double spearman_a_b = 0.0;
  WilliamsResult spearman;
};

// Williams test of H1: a correlates more strongly with gold than b, on raw
// values and on mid-ranks.
PredictorComparison compare_predictors(std::span<const Prediction> a,
                                       std::span<const Prediction> b,
                                       const QualityScores& gold);

void to_json(nlohmann::json& j, const ArgumentPair& pair);
void to_json(nlohmann::json& j, const DeltaBinReport& report);
void to_json(nlohmann::json& j, const PredictionEvaluation& evaluation);
void to_json(nlohmann::json& j, const CutoffCurve& curve);
void to_json(nlohmann::json& j, const PredictorComparison& comparison);

}  // namespace argq

#endif  // ARGQ_EVALUATION_H_
