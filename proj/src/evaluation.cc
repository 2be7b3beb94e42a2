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

#include "argq/evaluation.h"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>
#include <unordered_map>

#include "argq/csv.h"
#include "argq/errors.h"
#include "argq/random.h"

namespace argq {

namespace {

std::optional<Stance> to_stance(StanceCall call) {
  switch (call) {
    case StanceCall::kPro:
      return Stance::kPro;
    case StanceCall::kCon:
      return Stance::kCon;
    case StanceCall::kUndetermined:
      break;
  }
  return std::nullopt;
}

double required_score(const QualityScores& scores, const std::string& id) {
  const auto s = scores.find(id);
  if (!s) {
    throw Error(ErrorKind::kNotFound, "no " + std::string(to_string(scores.method())) +
                                          " score for argument '" + id + "'");
  }
  return *s;
}

Preferred flip(Preferred p) {
  return p == Preferred::kFirst ? Preferred::kSecond : Preferred::kFirst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairs

std::vector<PairCandidate> pair_candidates(const ScoredCorpus& corpus) {
  std::vector<PairCandidate> out;
  out.reserve(corpus.size());
  for (const ScoredArgument& a : corpus.entries()) {
    out.push_back({a.id, a.topic, a.stance, a.split});
  }
  return out;
}

std::vector<PairCandidate> pair_candidates(const AnnotationSet& set) {
  std::vector<PairCandidate> out;
  out.reserve(set.arguments().size());
  for (std::size_t i = 0; i < set.arguments().size(); ++i) {
    const Argument& a = set.arguments()[i];
    StanceCall stance = StanceCall::kUndetermined;
    if (!set.records_of(i).empty()) stance = majority_stance(set, a.id).stance;
    out.push_back({a.id, a.topic, stance, std::nullopt});
  }
  return out;
}

std::vector<ArgumentPair> generate_pairs(std::span<const PairCandidate> candidates,
                                         std::optional<Split> split) {
  std::map<std::pair<std::string, Stance>, std::vector<std::string>> groups;
  for (const PairCandidate& c : candidates) {
    if (split && c.split != split) continue;
    const auto stance = to_stance(c.stance);
    if (!stance) continue;
    groups[{c.topic, *stance}].push_back(c.id);
  }
  std::vector<ArgumentPair> pairs;
  for (auto& [key, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        if (ids[i] == ids[j]) {
          throw Error(ErrorKind::kConflict, "duplicate candidate '" + ids[i] + "'");
        }
        ArgumentPair p;
        p.first = ids[i];
        p.second = ids[j];
        p.topic = key.first;
        p.stance = key.second;
        pairs.push_back(std::move(p));
      }
    }
  }
  return pairs;
}

double score_delta(const ArgumentPair& pair, const QualityScores& scores) {
  return std::abs(required_score(scores, pair.first) - required_score(scores, pair.second));
}

void attach_score_deltas(std::vector<ArgumentPair>& pairs, const QualityScores& scores) {
  for (ArgumentPair& p : pairs) p.score_delta[scores.method()] = score_delta(p, scores);
}

std::vector<ArgumentPair> disagreement_pairs(const QualityScores& a, const QualityScores& b,
                                             std::span<const ArgumentPair> pairs) {
  std::vector<ArgumentPair> out;
  for (const ArgumentPair& p : pairs) {
    const double da = required_score(a, p.first) - required_score(a, p.second);
    const double db = required_score(b, p.first) - required_score(b, p.second);
    if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise gold

void PairwiseGold::set(const std::string& first, const std::string& second,
                       GoldJudgment judgment) {
  if (first == second) {
    throw Error(ErrorKind::kValidation, "gold pair pairs '" + first + "' with itself");
  }
  if (second < first) {
    judgment.preferred = flip(judgment.preferred);
    judgments_[{second, first}] = judgment;
  } else {
    judgments_[{first, second}] = judgment;
  }
}

std::optional<GoldJudgment> PairwiseGold::find(const std::string& first,
                                               const std::string& second) const {
  const bool swapped = second < first;
  auto it = swapped ? judgments_.find({second, first}) : judgments_.find({first, second});
  if (it == judgments_.end()) return std::nullopt;
  GoldJudgment j = it->second;
  if (swapped) j.preferred = flip(j.preferred);
  return j;
}

PairwiseGold read_pairwise_gold(std::istream& in) {
  const CsvTable table = read_csv(in);
  auto column = [&](const char* name) {
    const auto c = table.column_index(name);
    if (!c) {
      throw Error(ErrorKind::kSchema, std::string("pairwise gold: missing column '") + name + "'");
    }
    return *c;
  };
  const std::size_t c_first = column("first_id");
  const std::size_t c_second = column("second_id");
  const std::size_t c_pref = column("preferred_id");
  const std::size_t c_agree = column("agreement");
  const auto c_judges = table.column_index("judges");

  PairwiseGold gold;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "pairwise gold line " + std::to_string(table.line_numbers[r]) + ": ";
    const std::string first(trim(row[c_first]));
    const std::string second(trim(row[c_second]));
    const std::string preferred(trim(row[c_pref]));
    GoldJudgment j;
    if (preferred == first) {
      j.preferred = Preferred::kFirst;
    } else if (preferred == second) {
      j.preferred = Preferred::kSecond;
    } else {
      throw Error(ErrorKind::kValidation,
                  where + "preferred_id '" + preferred + "' is neither argument of the pair");
    }
    const auto agreement = parse_double(row[c_agree]);
    if (!agreement || *agreement < 0.0 || *agreement > 1.0) {
      throw Error(ErrorKind::kValidation, where + "agreement must be a number in [0,1]");
    }
    j.agreement = *agreement;
    if (c_judges && !trim(row[*c_judges]).empty()) {
      const auto judges = parse_int(row[*c_judges]);
      if (!judges || *judges < 1) {
        throw Error(ErrorKind::kValidation, where + "judges must be a positive integer");
      }
      j.judges = static_cast<int>(*judges);
    }
    if (gold.find(first, second)) {
      throw Error(ErrorKind::kConflict, where + "duplicate pair (" + first + ", " + second + ")");
    }
    gold.set(first, second, j);
  }
  return gold;
}

void write_pairwise_gold(std::ostream& out, const PairwiseGold& gold) {
  write_csv_row(out, {"first_id", "second_id", "preferred_id", "agreement", "judges"});
  for (const auto& [key, j] : gold.judgments()) {
    write_csv_row(out, {key.first, key.second,
                        j.preferred == Preferred::kFirst ? key.first : key.second,
                        format_double(j.agreement), std::to_string(j.judges)});
  }
}

// ---------------------------------------------------------------------------
// Delta bins

DeltaBinReport delta_bin_evaluation(std::span<const ArgumentPair> pairs,
                                    const QualityScores& scores, const PairwiseGold& gold,
                                    const DeltaBinConfig& config) {
  if (config.sample_per_bin < 1) {
    throw Error(ErrorKind::kValidation, "delta bins: sample_per_bin must be >= 1");
  }
  if (!(config.agreement_threshold >= 0.0 && config.agreement_threshold <= 1.0)) {
    throw Error(ErrorKind::kValidation, "delta bins: agreement_threshold must be in [0,1]");
  }
  static constexpr double kEdges[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr const char* kLabels[] = {"[0,0.25]", "(0.25,0.5]", "(0.5,0.75]",
                                            "(0.75,1]"};
  constexpr std::size_t kBins = 4;

  DeltaBinReport report;
  report.method = scores.method();
  report.config = config;

  std::vector<std::vector<std::size_t>> members(kBins);
  std::vector<double> first_score(pairs.size()), second_score(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    first_score[p] = required_score(scores, pairs[p].first);
    second_score[p] = required_score(scores, pairs[p].second);
    const double delta = std::abs(first_score[p] - second_score[p]);
    if (delta == 0.0) {
      ++report.tied_pairs;
      continue;
    }
    std::size_t b = 0;
    while (b + 1 < kBins && delta > kEdges[b + 1]) ++b;
    members[b].push_back(p);
  }

  for (std::size_t b = 0; b < kBins; ++b) {
    DeltaBin bin;
    bin.label = kLabels[b];
    bin.lower = kEdges[b];
    bin.upper = kEdges[b + 1];
    bin.population = static_cast<int>(members[b].size());

    std::vector<std::size_t> chosen = members[b];
    if (chosen.size() > static_cast<std::size_t>(config.sample_per_bin)) {
      Engine rng(derive_seed(config.seed, b));
      shuffle(chosen, rng);
      chosen.resize(config.sample_per_bin);
      std::sort(chosen.begin(), chosen.end());
    }
    bin.sampled = static_cast<int>(chosen.size());

    int correct = 0;
    for (std::size_t p : chosen) {
      const ArgumentPair& pair = pairs[p];
      bin.sampled_pairs.emplace_back(pair.first, pair.second);
      const auto judgment = gold.find(pair.first, pair.second);
      if (!judgment) {
        throw Error(ErrorKind::kNotFound, "pairwise gold lacks pair (" + pair.first + ", " +
                                              pair.second + ")");
      }
      if (judgment->agreement < config.agreement_threshold) {
        ++bin.filtered;
        continue;
      }
      ++bin.pair_count;
      const Preferred by_score =
          first_score[p] > second_score[p] ? Preferred::kFirst : Preferred::kSecond;
      if (by_score == judgment->preferred) ++correct;
    }
    if (bin.sampled > 0) {
      bin.filtered_fraction = static_cast<double>(bin.filtered) / bin.sampled;
    }
    if (bin.pair_count > 0) {
      bin.precision = static_cast<double>(correct) / bin.pair_count;
    }
    report.bins.push_back(std::move(bin));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Split-half consistency

std::pair<AnnotationSet, AnnotationSet> split_annotations(const AnnotationSet& set,
                                                          std::uint64_t seed) {
  Engine rng(seed);
  std::vector<AnnotationRecord> first, second;
  for (std::size_t i = 0; i < set.arguments().size(); ++i) {
    const auto records = set.records_of(i);
    if (records.size() < 2) continue;
    std::vector<std::size_t> order(records.begin(), records.end());
    shuffle(order, rng);
    const std::size_t half = order.size() / 2;
    for (std::size_t k = 0; k < half; ++k) first.push_back(set.records()[order[k]]);
    for (std::size_t k = half; k < 2 * half; ++k) second.push_back(set.records()[order[k]]);
  }
  return {AnnotationSet(set.arguments(), std::move(first)),
          AnnotationSet(set.arguments(), std::move(second))};
}

QualityScores score_method(const AnnotationSet& set, ScoreMethod method,
                           const ReliabilityConfig& reliability, const WeightPolicy& weights,
                           const MaceConfig& mace) {
  if (method == ScoreMethod::kMaceP) return mace_posteriors(mace_fit(set, mace));
  const ReliabilityTable table = compute_reliability(set, reliability);
  return score_corpus(set, method, &table, weights);
}

CorrelationResult half_consistency(const AnnotationSet& first, const AnnotationSet& second,
                                   ScoreMethod method, const SplitHalfConfig& config) {
  const QualityScores a =
      score_method(first, method, config.reliability, config.weights, config.mace);
  const QualityScores b =
      score_method(second, method, config.reliability, config.weights, config.mace);
  std::vector<double> x, y;
  for (const ScoreEntry& e : a.entries()) {
    if (const auto other = b.find(e.argument_id)) {
      x.push_back(e.score);
      y.push_back(*other);
    }
  }
  if (x.size() < 3) {
    std::string message = "split halves share " + std::to_string(x.size()) +
                          " scored argument(s); at least 3 are needed";
    for (const QualityScores* s : {&a, &b}) {
      if (!s->failures().empty()) {
        message += " (" + std::to_string(s->failures().size()) +
                   " failures in a half, e.g. " + s->failures().front().message + ")";
        break;
      }
    }
    throw Error(ErrorKind::kNumerical, message);
  }
  return correlate(x, y);
}

CorrelationResult split_half_consistency(const AnnotationSet& set, ScoreMethod method,
                                         const SplitHalfConfig& config) {
  const TestQuestionFilter filtered = filter_by_test_questions(set, config.test_fail_rate);
  const auto [first, second] = split_annotations(filtered.kept, config.seed);
  return half_consistency(first, second, method, config);
}

// ---------------------------------------------------------------------------
// External predictors

std::vector<Prediction> read_predictions_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;
  if (table.header.size() >= 2 && parse_double(table.header[1])) {
    rows.push_back(table.header);
    lines.push_back(1);
  }
  rows.insert(rows.end(), table.rows.begin(), table.rows.end());
  lines.insert(lines.end(), table.line_numbers.begin(), table.line_numbers.end());

  std::vector<Prediction> out;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "predictions line " + std::to_string(lines[r]) + ": ";
    if (rows[r].size() != 2) {
      throw Error(ErrorKind::kValidation, where + "expected 2 columns (argument_id, score)");
    }
    const std::string id(trim(rows[r][0]));
    const auto score = parse_double(rows[r][1]);
    if (id.empty()) throw Error(ErrorKind::kValidation, where + "empty argument id");
    if (!score) {
      throw Error(ErrorKind::kValidation, where + "score '" + rows[r][1] + "' is not a number");
    }
    if (!seen.emplace(id, r).second) {
      throw Error(ErrorKind::kConflict, where + "duplicate prediction for '" + id + "'");
    }
    out.push_back({id, *score});
  }
  return out;
}

namespace {

struct Aligned {
  std::vector<std::string> ids;
  std::vector<double> predicted;
  std::vector<double> gold;
};

Aligned align(std::span<const Prediction> predictions, const QualityScores& gold) {
  std::unordered_map<std::string, double> by_id;
  for (const Prediction& p : predictions) {
    if (!by_id.emplace(p.argument_id, p.score).second) {
      throw Error(ErrorKind::kConflict, "duplicate prediction for '" + p.argument_id + "'");
    }
  }
  Aligned out;
  std::vector<std::string> missing;
  for (const ScoreEntry& e : gold.entries()) {
    auto it = by_id.find(e.argument_id);
    if (it == by_id.end()) {
      missing.push_back(e.argument_id);
      continue;
    }
    out.ids.push_back(e.argument_id);
    out.predicted.push_back(it->second);
    out.gold.push_back(e.score);
  }
  if (!missing.empty()) {
    constexpr std::size_t kListed = 10;
    std::string message = "predictions lack " + std::to_string(missing.size()) + " gold id(s): ";
    for (std::size_t i = 0; i < std::min(missing.size(), kListed); ++i) {
      if (i) message += ", ";
      message += missing[i];
    }
    if (missing.size() > kListed) message += ", ...";
    throw Error(ErrorKind::kValidation, message);
  }
  return out;
}

}  // namespace

PredictionEvaluation evaluate_predictions(std::span<const Prediction> predictions,
                                          const QualityScores& gold) {
  const Aligned a = align(predictions, gold);
  PredictionEvaluation out;
  out.correlation = correlate(a.predicted, a.gold);
  out.rrse = rrse(a.predicted, a.gold);
  out.residuals.reserve(a.ids.size());
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    out.residuals.push_back({a.ids[i], a.predicted[i], a.gold[i], a.predicted[i] - a.gold[i]});
  }
  return out;
}

CutoffCurve cutoff_correlations(std::span<const Prediction> predictions,
                                const QualityScores& gold, std::span<const int> percentiles) {
  static constexpr int kDefault[] = {10, 20, 30, 40, 50};
  if (percentiles.empty()) percentiles = kDefault;
  for (int d : percentiles) {
    if (d < 1 || d > 50) {
      throw Error(ErrorKind::kValidation,
                  "cut-off percentile must be in [1,50], got " + std::to_string(d));
    }
  }
  const Aligned a = align(predictions, gold);
  const std::size_t n = a.ids.size();
  std::vector<std::size_t> by_gold(n);
  std::iota(by_gold.begin(), by_gold.end(), 0);
  std::sort(by_gold.begin(), by_gold.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(a.gold[x], a.ids[x]) < std::tie(a.gold[y], a.ids[y]);
  });

  CutoffCurve curve;
  for (int d : percentiles) {
    const std::size_t k = (n * static_cast<std::size_t>(d) + 99) / 100;
    std::vector<bool> keep(n, false);
    for (std::size_t r = 0; r < std::min(k, n); ++r) {
      keep[by_gold[r]] = true;
      keep[by_gold[n - 1 - r]] = true;
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i]) continue;
      x.push_back(a.predicted[i]);
      y.push_back(a.gold[i]);
    }
    try {
      const CorrelationResult c = correlate(x, y);
      curve.points.push_back({d, c.pearson_r, c.spearman_rho, x.size()});
    } catch (const Error& e) {
      curve.notices.push_back("d=" + std::to_string(d) + " skipped: " + e.what());
    }
  }
  return curve;
}

void write_cutoff_csv(std::ostream& out, const CutoffCurve& curve) {
  write_csv_row(out, {"percentile", "pearson_r", "spearman_rho", "subset_size"});
  for (const CutoffPoint& p : curve.points) {
    write_csv_row(out, {std::to_string(p.percentile), format_double(p.pearson_r),
                        format_double(p.spearman_rho), std::to_string(p.subset_size)});
  }
}

PredictorComparison compare_predictors(std::span<const Prediction> a,
                                       std::span<const Prediction> b,
                                       const QualityScores& gold) {
  const Aligned left = align(a, gold);
  const Aligned right = align(b, gold);
  const std::size_t n = left.gold.size();
  PredictorComparison out;
  out.n = n;
  out.pearson_a_gold = pearson(left.predicted, left.gold);
  out.pearson_b_gold = pearson(right.predicted, right.gold);
  out.pearson_a_b = pearson(left.predicted, right.predicted);
  out.pearson = williams_test(out.pearson_a_gold, out.pearson_b_gold, out.pearson_a_b,
                              static_cast<int>(n));
  out.spearman_a_gold = spearman(left.predicted, left.gold);
  out.spearman_b_gold = spearman(right.predicted, right.gold);
  out.spearman_a_b = spearman(left.predicted, right.predicted);
  out.spearman = williams_test(out.spearman_a_gold, out.spearman_b_gold, out.spearman_a_b,
                               static_cast<int>(n));
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void to_json(nlohmann::json& j, const ArgumentPair& pair) {
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& [method, delta] : pair.score_delta) deltas[std::string(to_string(method))] = delta;
  j = {{"first", pair.first},
       {"second", pair.second},
       {"topic", pair.topic},
       {"stance", to_string(pair.stance)},
       {"score_delta", std::move(deltas)}};
}

void to_json(nlohmann::json& j, const DeltaBinReport& report) {
  nlohmann::json bins = nlohmann::json::array();
  for (const DeltaBin& b : report.bins) {
    bins.push_back({{"label", b.label},
                    {"lower", b.lower},
                    {"upper", b.upper},
                    {"population", b.population},
                    {"sampled", b.sampled},
                    {"filtered", b.filtered},
                    {"pair_count", b.pair_count},
                    {"filtered_fraction", optional_json(b.filtered_fraction)},
                    {"precision", optional_json(b.precision)}});
  }
  j = {{"method", to_string(report.method)},
       {"sample_per_bin", report.config.sample_per_bin},
       {"agreement_threshold", report.config.agreement_threshold},
       {"seed", report.config.seed},
       {"tied_pairs", report.tied_pairs},
       {"bins", std::move(bins)}};
}

void to_json(nlohmann::json& j, const PredictionEvaluation& evaluation) {
  j = {{"correlation", evaluation.correlation}, {"rrse", evaluation.rrse}};
}

void to_json(nlohmann::json& j, const CutoffCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const CutoffPoint& p : curve.points) {
    points.push_back({{"percentile", p.percentile},
                      {"pearson_r", p.pearson_r},
                      {"spearman_rho", p.spearman_rho},
                      {"subset_size", p.subset_size}});
  }
  j = {{"points", std::move(points)}, {"notices", curve.notices}};
}

void to_json(nlohmann::json& j, const PredictorComparison& c) {
  j = {{"n", c.n},
       {"pearson", {{"a_gold", c.pearson_a_gold},
                    {"b_gold", c.pearson_b_gold},
                    {"a_b", c.pearson_a_b},
                    {"williams", c.pearson}}},
       {"spearman", {{"a_gold", c.spearman_a_gold},
                     {"b_gold", c.spearman_b_gold},
                     {"a_b", c.spearman_a_b},
                     {"williams", c.spearman}}}};
}

}  // namespace argq
