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

// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion. Exits
// non-zero when the set of failing criteria differs from the ones listed
// with --known-failure.
//
//   argq_acceptance [--known-failure N]... [criterion...]
//
// The released-dataset check reads ARGQ_RANK30K_CSV, falling back to
// data/arg_quality_rank_30k.csv under the source tree.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "argq/corpus.h"
#include "argq/errors.h"
#include "argq/evaluation.h"
#include "argq/mace.h"
#include "argq/random.h"
#include "argq/reliability.h"
#include "argq/scoring.h"
#include "argq/simulator.h"
#include "argq/stats.h"
#include "oracles.h"

#ifndef ARGQ_BINARY
#error "ARGQ_BINARY must point at the argq executable"
#endif
#ifndef ARGQ_SOURCE_DIR
#define ARGQ_SOURCE_DIR "."
#endif

namespace argq {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  enum class Status { kPass, kFail, kSkip } status = Status::kFail;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::Status::kPass : Outcome::Status::kFail, std::move(detail)};
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double mid_fraction(const QualityScores& s) {
  int mid = 0;
  for (const ScoreEntry& e : s.entries()) mid += e.score > 0.1 && e.score < 0.9;
  return static_cast<double>(mid) / static_cast<double>(s.size());
}

// Test-question filter at the default rate, then the chosen scorer with
// default settings.
QualityScores pipeline_scores(const AnnotationSet& set, ScoreMethod method,
                              std::uint64_t seed) {
  const TestQuestionFilter filtered = filter_by_test_questions(set, 0.2);
  MaceConfig mace;
  mace.seed = seed;
  return score_method(filtered.kept, method, ReliabilityConfig{}, WeightPolicy{}, mace);
}

// ---------------------------------------------------------------------------
// 1. Statistical fixtures against direct-formula oracles.

Outcome statistical_fixtures() {
  const auto start = std::chrono::steady_clock::now();
  Engine rng(derive_seed(2024, 1));
  double worst = 0.0;
  int mismatches = 0;
  auto check = [&](double got, double want) {
    if (std::isnan(want)) return;
    const double d = std::fabs(got - want);
    worst = std::max(worst, d);
    mismatches += !(d <= 1e-10);
  };
  // Library throws where the oracle is undefined; count those as agreeing.
  auto guarded = [&](const std::function<double()>& f, double want) {
    try {
      check(f(), want);
    } catch (const Error& e) {
      mismatches += !(e.kind() == ErrorKind::kNumerical && !std::isfinite(want));
    }
  };
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + uniform_index(rng, 28);
    const bool ties = t % 2 == 1;
    std::vector<double> x(n), y(n);
    std::vector<std::uint8_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? static_cast<double>(uniform_index(rng, 5)) : uniform(rng, -3.0, 3.0);
      y[i] = ties ? static_cast<double>(uniform_index(rng, 5)) : x[i] + uniform(rng, -2.0, 2.0);
      a[i] = bernoulli(rng, 0.6);
      b[i] = bernoulli(rng, 0.8) ? a[i] : 1 - a[i];
    }
    guarded([&] { return pearson(x, y); }, oracle::pearson(x, y));
    guarded([&] { return spearman(x, y); }, oracle::spearman(x, y));
    guarded([&] { return rrse(x, y); }, oracle::rrse(x, y));
    const double k = oracle::kappa(a, b);
    // Chance agreement of 1 means identical constant raters: defined as 1.
    check(cohen_kappa(a, b), std::isfinite(k) ? k : 1.0);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pass_if(mismatches == 0 && secs < 1.0,
                 "400 comparisons, " + std::to_string(mismatches) +
                     " mismatches, max |diff| " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s");
}

// ---------------------------------------------------------------------------
// 2. Williams test: null calibration and the significance-claim shape.

struct TriCorr {
  double r1, r2, r12;
};

TriCorr draw_correlations(oracle::CorrelatedNormals& gen, std::mt19937_64& rng, int n) {
  std::vector<double> g(n), x1(n), x2(n);
  for (int i = 0; i < n; ++i) {
    const auto d = gen.draw(rng);
    g[i] = d[0];
    x1[i] = d[1];
    x2[i] = d[2];
  }
  return {pearson(x1, g), pearson(x2, g), pearson(x1, x2)};
}

Outcome williams_calibration() {
  const auto start = std::chrono::steady_clock::now();
  // Null: both predictors correlate 0.5 with gold and with each other.
  oracle::CorrelatedNormals null_gen({{{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}}});
  std::mt19937_64 rng(derive_seed(2024, 2));
  const int trials = 2000;
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    const TriCorr c = draw_correlations(null_gen, rng, 500);
    rejected += williams_test(c.r1, c.r2, c.r12, 500).p_value_two_sided < 0.05;
  }
  const double rate = static_cast<double>(rejected) / trials;

  // Claim shape: a .01 Pearson gain (.52 vs .51) between predictors that
  // correlate .95, on 6000 test arguments.
  const WilliamsResult claim = williams_test(0.52, 0.51, 0.95, 6000);
  // Monte Carlo oracle: equal true correlations (.515) and r12 = .95; how
  // often does chance alone produce a gain of at least .01?
  oracle::CorrelatedNormals mc_gen(
      {{{1.0, 0.515, 0.515}, {0.515, 1.0, 0.95}, {0.515, 0.95, 1.0}}});
  const int mc_trials = 4000;
  int exceed = 0;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < mc_trials; ++t) {
    const TriCorr c = draw_correlations(mc_gen, rng, 6000);
    const double d = c.r1 - c.r2;
    exceed += d >= 0.01;
    sum += d;
    sum2 += d * d;
  }
  const double mc_p = (exceed + 1.0) / (mc_trials + 1.0);
  const double mc_sd = std::sqrt(sum2 / mc_trials - (sum / mc_trials) * (sum / mc_trials));
  const double analytic_sd = 0.01 / claim.t_statistic;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = rate >= 0.03 && rate <= 0.07 && claim.p_value_one_sided < 0.01 &&
                  mc_p < 0.01 && secs < 120.0;
  return pass_if(ok, "null rejection " + fmt(rate) + " (2000 x n=500); claim t=" +
                         fmt(claim.t_statistic) + " p=" + fmt(claim.p_value_one_sided) +
                         ", Monte Carlo p=" + fmt(mc_p) + " (sd " + fmt(mc_sd) +
                         " vs analytic " + fmt(analytic_sd) + "), " + fmt(secs, 3) + " s");
}

// ---------------------------------------------------------------------------
// 3. MACE recovery, monotone EM and a brute-force likelihood grid.

bool non_decreasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[k - 1] - tol) return false;
  }
  return true;
}

// Two annotators; every item pattern is listed with its multiplicity.
struct TinyInstance {
  LabelMatrix matrix;
  // counts[l0][l1] for items both labelled, labels 0/1; solo[j][l] for items
  // only annotator j labelled.
  int both[2][2] = {{0, 0}, {0, 0}};
  int solo[2][2] = {{0, 0}, {0, 0}};
};

TinyInstance tiny_instance() {
  TinyInstance t;
  t.matrix.annotator_ids = {"w0", "w1"};
  auto item = [&](std::vector<std::pair<int, int>> labels) {
    const int i = static_cast<int>(t.matrix.item_ids.size());
    t.matrix.item_ids.push_back("i" + std::to_string(i));
    for (const auto& [j, l] : labels) t.matrix.observations.push_back({i, j, l});
    if (labels.size() == 2) ++t.both[labels[0].second][labels[1].second];
    else ++t.solo[labels[0].first][labels[0].second];
  };
  for (int k = 0; k < 4; ++k) item({{0, 1}, {1, 1}});
  for (int k = 0; k < 3; ++k) item({{0, 0}, {1, 0}});
  for (int k = 0; k < 2; ++k) item({{0, 1}, {1, 0}});
  item({{0, 0}, {1, 1}});
  item({{0, 1}});
  item({{0, 0}});
  item({{1, 1}});
  return t;
}

// Maximum of the marginal log-likelihood over (theta, xi) in {0.01..0.99}^4.
double grid_maximum(const TinyInstance& t) {
  constexpr int kSteps = 99;
  // p[c][T][l]: P(label l | truth T) for parameter combo c = (theta, xi).
  std::vector<std::array<std::array<double, 2>, 2>> p(kSteps * kSteps);
  for (int a = 0; a < kSteps; ++a) {
    for (int b = 0; b < kSteps; ++b) {
      const double theta = (a + 1) / 100.0, xi = (b + 1) / 100.0;
      auto& q = p[a * kSteps + b];
      for (int truth = 0; truth < 2; ++truth) {
        q[truth][1] = theta * (truth == 1) + (1 - theta) * xi;
        q[truth][0] = theta * (truth == 0) + (1 - theta) * (1 - xi);
      }
    }
  }
  const int combos = kSteps * kSteps;
  std::vector<double> solo_ll[2];
  for (int j = 0; j < 2; ++j) {
    solo_ll[j].resize(combos);
    for (int c = 0; c < combos; ++c) {
      double ll = 0.0;
      for (int l = 0; l < 2; ++l) {
        if (t.solo[j][l]) ll += t.solo[j][l] * std::log(0.5 * (p[c][0][l] + p[c][1][l]));
      }
      solo_ll[j][c] = ll;
    }
  }
  double best = -INFINITY;
  for (int c0 = 0; c0 < combos; ++c0) {
    for (int c1 = 0; c1 < combos; ++c1) {
      double product = 1.0;
      for (int l0 = 0; l0 < 2; ++l0) {
        for (int l1 = 0; l1 < 2; ++l1) {
          const int n = t.both[l0][l1];
          if (!n) continue;
          const double pat = 0.5 * (p[c0][0][l0] * p[c1][0][l1] + p[c0][1][l0] * p[c1][1][l1]);
          for (int k = 0; k < n; ++k) product *= pat;
        }
      }
      best = std::max(best, std::log(product) + solo_ll[0][c0] + solo_ll[1][c1]);
    }
  }
  return best;
}

double competence_recovery(const SimResult& r, const MaceConfig& config) {
  const MaceModel model = mace_fit(r.annotations, config);
  std::map<std::string, double> truth;
  for (const AnnotatorTruth& a : r.truth.annotators) truth[a.id] = a.competence;
  std::vector<double> fitted, actual;
  for (std::size_t j = 0; j < model.annotator_ids.size(); ++j) {
    fitted.push_back(model.competence[j]);
    actual.push_back(truth.at(model.annotator_ids[j]));
  }
  return spearman(fitted, actual);
}

Outcome mace_recovery() {
  const auto start = std::chrono::steady_clock::now();
  SimConfig sim;
  sim.n_topics = 10;
  sim.args_per_topic = 50;
  sim.n_annotators = 30;
  sim.annotations_per_argument = 10;
  sim.competence = UniformRange{0.1, 0.95};
  sim.seed = 3;
  MaceConfig config;
  config.seed = 3;
  // Continuous quality draws Bernoulli(q') even for attentive annotators;
  // reported alongside, not asserted.
  const double rho_continuous = competence_recovery(simulate_corpus(sim), config);
  // Binary quality without positivity bias: attentive annotators copy the
  // true label exactly as the MACE model assumes.
  sim.quality = BinaryQuality{0.6};
  sim.positivity_bias = 0.0;
  const SimResult r = simulate_corpus(sim);
  const MaceModel model = mace_fit(r.annotations, config);
  const double rho = competence_recovery(r, config);

  bool objective_monotone = true;
  for (const RestartTrace& t : model.traces) {
    objective_monotone = objective_monotone && non_decreasing(t.objective, 1e-9);
  }
  MaceConfig plain = config;
  plain.smoothing_delta = 0.0;
  const MaceModel unsmoothed = mace_fit(r.annotations, plain);
  bool ll_monotone = true;
  for (const RestartTrace& t : unsmoothed.traces) {
    ll_monotone = ll_monotone && non_decreasing(t.log_likelihood, 1e-9);
  }

  const TinyInstance tiny = tiny_instance();
  MaceConfig exact;
  exact.smoothing_delta = 0.0;
  exact.iterations = 5000;
  exact.restarts = 10;
  exact.convergence_tol = 1e-13;
  const MaceModel tiny_fit = mace_fit(tiny.matrix, exact);
  const double grid = grid_maximum(tiny);
  const double gap = tiny_fit.log_likelihood - grid;

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = rho >= 0.8 && objective_monotone && ll_monotone && std::fabs(gap) <= 1e-3 &&
                  secs < 60.0;
  return pass_if(ok, "Spearman(theta, competence)=" + fmt(rho) + " (continuous quality " +
                         fmt(rho_continuous) + "); objective monotone " +
                         (objective_monotone ? "yes" : "no") + ", unsmoothed LL monotone " +
                         (ll_monotone ? "yes" : "no") + "; tiny EM LL " +
                         fmt(tiny_fit.log_likelihood, 10) + " vs grid " + fmt(grid, 10) +
                         " (diff " + fmt(gap, 3) + "), " + fmt(secs, 3) + " s");
}

// ---------------------------------------------------------------------------
// 4. Score-shape contrast between MACE-P and WA.

Outcome shape_contrast() {
  int holds = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.seed = seed;
    const SimResult r = simulate_corpus(sim);
    int positive = 0;
    for (const AnnotationRecord& rec : r.annotations.records()) positive += rec.quality_label;
    const double rate = static_cast<double>(positive) / r.annotations.records().size();
    const double wa = mid_fraction(pipeline_scores(r.annotations, ScoreMethod::kWeightedAverage, seed));
    const double mace = mid_fraction(pipeline_scores(r.annotations, ScoreMethod::kMaceP, seed));
    holds += rate > 0.5 && mace < wa;
    detail += (seed > 1 ? "; " : "") + std::string("seed ") + std::to_string(seed) + ": " +
              fmt(mace, 3) + " < " + fmt(wa, 3) + " (pos " + fmt(rate, 3) + ")";
  }
  return pass_if(holds == 5,
                 std::to_string(holds) + "/5 seeds, mid-range fraction MACE-P vs WA: " + detail);
}

// ---------------------------------------------------------------------------
// 5. Delta-bin precision.

std::vector<ArgumentPair> majority_pairs(const AnnotationSet& set) {
  return generate_pairs(pair_candidates(set));
}

bool precision_non_decreasing(const DeltaBinReport& report, std::string* detail) {
  bool ok = true;
  std::optional<double> previous;
  for (const DeltaBin& b : report.bins) {
    *detail += b.precision ? fmt(*b.precision, 3) : std::string("-");
    *detail += " ";
    if (!b.precision) {
      ok = false;
      continue;
    }
    if (previous && *b.precision < *previous) ok = false;
    previous = b.precision;
  }
  return ok;
}

bool all_bins_perfect(const DeltaBinReport& report, bool require_every_bin) {
  int present = 0;
  for (const DeltaBin& b : report.bins) {
    if (!b.precision) {
      if (require_every_bin) return false;
      continue;
    }
    ++present;
    if (*b.precision != 1.0) return false;
  }
  return present > 0;
}

Outcome delta_bins() {
  int monotone_seeds = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.seed = seed;
    const SimResult r = simulate_corpus(sim);
    const auto pairs = majority_pairs(r.annotations);
    const PairwiseGold gold =
        simulate_pairwise_gold(r.truth, pairs, 7, 0.2, derive_seed(seed, stable_hash("pairs")));
    DeltaBinConfig bins;
    bins.seed = derive_seed(seed, stable_hash("bins"));
    std::string wa_detail, mace_detail;
    const bool wa = precision_non_decreasing(
        delta_bin_evaluation(pairs, pipeline_scores(r.annotations, ScoreMethod::kWeightedAverage, seed),
                             gold, bins),
        &wa_detail);
    const bool mace = precision_non_decreasing(
        delta_bin_evaluation(pairs, pipeline_scores(r.annotations, ScoreMethod::kMaceP, seed),
                             gold, bins),
        &mace_detail);
    monotone_seeds += wa && mace;
    detail += "seed " + std::to_string(seed) + " WA " + wa_detail + "MACE-P " + mace_detail + "; ";
  }

  // Noiseless gold against the latent quality itself.
  SimConfig sim;
  sim.seed = 1;
  const SimResult r = simulate_corpus(sim);
  std::vector<ScoreEntry> latent;
  for (const ArgumentTruth& a : r.truth.arguments) latent.push_back({a.id, a.latent_quality, 1});
  const QualityScores latent_scores(ScoreMethod::kWeightedAverage, latent);
  const auto pairs = majority_pairs(r.annotations);
  const PairwiseGold clean = simulate_pairwise_gold(r.truth, pairs, 7, 0.0, 1);
  const bool oracle_perfect =
      all_bins_perfect(delta_bin_evaluation(pairs, latent_scores, clean, DeltaBinConfig{}), true);

  // Fully noiseless simulation scored by WA: only the extreme bin is populated.
  SimConfig noiseless;
  noiseless.competence = std::vector<PointMass>{{1.0, 30}};
  noiseless.quality = BinaryQuality{0.5};
  noiseless.positivity_bias = 0.0;
  noiseless.stance_noise = 0.0;
  noiseless.test_question_rate = 0.0;
  noiseless.seed = 1;
  const SimResult n = simulate_corpus(noiseless);
  const auto npairs = majority_pairs(n.annotations);
  const PairwiseGold ngold = simulate_pairwise_gold(n.truth, npairs, 7, 0.0, 1);
  const bool wa_perfect = all_bins_perfect(
      delta_bin_evaluation(npairs, pipeline_scores(n.annotations, ScoreMethod::kWeightedAverage, 1),
                           ngold, DeltaBinConfig{}),
      false);

  return pass_if(monotone_seeds >= 4 && oracle_perfect && wa_perfect,
                 std::to_string(monotone_seeds) + "/5 seeds monotone for both (" + detail +
                     "); noiseless gold: latent-score bins all 1.0 " +
                     (oracle_perfect ? "yes" : "no") + ", noiseless-sim WA bins all 1.0 " +
                     (wa_perfect ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// 6. Split-half consistency.

SimConfig split_half_sim(std::uint64_t seed) {
  SimConfig sim;
  sim.n_topics = 4;
  sim.args_per_topic = 50;
  sim.n_annotators = 12;
  sim.annotations_per_argument = 10;
  sim.seed = seed;
  return sim;
}

Outcome split_half() {
  SplitHalfConfig config;
  config.seed = 17;
  config.mace.seed = 17;
  std::string detail;

  SimConfig clean = split_half_sim(1);
  clean.n_annotators = 10;
  clean.competence = std::vector<PointMass>{{1.0, 10}};
  clean.quality = BinaryQuality{0.5};
  clean.positivity_bias = 0.0;
  clean.stance_noise = 0.0;
  clean.test_question_rate = 0.0;
  const AnnotationSet clean_set = simulate_corpus(clean).annotations;
  bool exact = true;
  for (ScoreMethod m : {ScoreMethod::kWeightedAverage, ScoreMethod::kMaceP}) {
    const CorrelationResult c = split_half_consistency(clean_set, m, config);
    exact = exact && c.pearson_r == 1.0 && c.spearman_rho == 1.0;
    detail += std::string(to_string(m)) + " noiseless r=" + fmt(c.pearson_r, 17) +
              " rho=" + fmt(c.spearman_rho, 17) + "; ";
  }

  SimConfig noise = split_half_sim(1);
  noise.n_annotators = 10;
  noise.competence = std::vector<PointMass>{{0.0, 10}};
  const AnnotationSet noise_set = simulate_corpus(noise).annotations;
  bool flat = true;
  for (ScoreMethod m : {ScoreMethod::kWeightedAverage, ScoreMethod::kMaceP}) {
    const CorrelationResult c = split_half_consistency(noise_set, m, config);
    flat = flat && std::fabs(c.pearson_r) < 0.15 && c.n >= 190;
    detail += std::string(to_string(m)) + " pure noise r=" + fmt(c.pearson_r, 3) + " (n=" +
              std::to_string(c.n) + "); ";
  }

  const AnnotationSet typical = simulate_corpus(split_half_sim(1)).annotations;
  bool positive = true;
  for (ScoreMethod m : {ScoreMethod::kWeightedAverage, ScoreMethod::kMaceP}) {
    const CorrelationResult c = split_half_consistency(typical, m, config);
    positive = positive && c.pearson_r > 0.25;
    detail += std::string(to_string(m)) + " realistic r=" + fmt(c.pearson_r, 3) + " rho=" +
              fmt(c.spearman_rho, 3) + "; ";
  }
  return pass_if(exact && flat && positive, detail);
}

// ---------------------------------------------------------------------------
// 7. WA algebraic invariants.

ReliabilityTable table_of(const std::map<std::string, double>& rel) {
  std::map<std::string, AnnotatorReliability> entries;
  for (const auto& [id, v] : rel) {
    AnnotatorReliability e;
    e.annotator_rel = v;
    e.eligible = true;
    e.qualifying_peers = 5;
    entries[id] = e;
  }
  return ReliabilityTable(ReliabilityConfig{}, std::move(entries));
}

AnnotationSet one_argument(const std::vector<int>& labels) {
  Argument a;
  a.id = "x";
  std::vector<AnnotationRecord> records;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    AnnotationRecord r;
    r.annotator_id = "w" + std::to_string(j);
    r.argument_id = "x";
    r.quality_label = static_cast<std::uint8_t>(labels[j]);
    records.push_back(r);
  }
  return AnnotationSet({a}, std::move(records));
}

Outcome wa_invariants() {
  Engine rng(derive_seed(2024, 7));
  const WeightPolicy floored{0.01, FallbackPolicy::kTaskAverage};
  const WeightPolicy unfloored{0.0, FallbackPolicy::kTaskAverage};
  int uniform_ok = 0, scale_ok = 0, flip_ok = 0, flips = 0;
  double arbitrary_scale_worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + uniform_index(rng, 12);
    std::vector<int> labels(k);
    std::map<std::string, double> rel;
    for (std::size_t j = 0; j < k; ++j) {
      labels[j] = bernoulli(rng, 0.6);
      rel["w" + std::to_string(j)] = uniform(rng, 0.02, 1.0);
    }
    const AnnotationSet set = one_argument(labels);

    std::map<std::string, double> flat = rel;
    const double level = uniform(rng, 0.02, 1.0);
    for (auto& [id, v] : flat) v = level;
    uniform_ok += weighted_average(set, table_of(flat), "x", floored) == simple_average(set, "x");

    const double base = weighted_average(set, table_of(rel), "x", unfloored);
    bool exact = true;
    for (double c : {0.125, 0.5, 2.0, 64.0, 1024.0}) {
      std::map<std::string, double> scaled = rel;
      for (auto& [id, v] : scaled) v *= c;
      exact = exact && weighted_average(set, table_of(scaled), "x", unfloored) == base;
    }
    scale_ok += exact;
    std::map<std::string, double> scaled = rel;
    const double c = uniform(rng, 0.1, 10.0);
    for (auto& [id, v] : scaled) v *= c;
    arbitrary_scale_worst =
        std::max(arbitrary_scale_worst,
                 std::fabs(weighted_average(set, table_of(scaled), "x", unfloored) - base));

    const ReliabilityTable table = table_of(rel);
    const double before = weighted_average(set, table, "x", floored);
    bool increases = true;
    for (std::size_t j = 0; j < k; ++j) {
      if (labels[j]) continue;
      std::vector<int> flipped = labels;
      flipped[j] = 1;
      ++flips;
      increases = increases && weighted_average(one_argument(flipped), table, "x", floored) > before;
    }
    flip_ok += increases;
  }
  return pass_if(uniform_ok == 1000 && scale_ok == 1000 && flip_ok == 1000 &&
                     arbitrary_scale_worst <= 1e-15,
                 "uniform==simple average " + std::to_string(uniform_ok) +
                     "/1000; bit-exact under power-of-two scaling " + std::to_string(scale_ok) +
                     "/1000 (arbitrary factor max |diff| " + fmt(arbitrary_scale_worst, 3) +
                     "); single flip strictly increases " + std::to_string(flip_ok) +
                     "/1000 (" + std::to_string(flips) + " flips)");
}

// ---------------------------------------------------------------------------
// 8. Cut-off correlations.

Outcome cutoff() {
  int increasing = 0, bit_exact = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.n_topics = 20;
    sim.args_per_topic = 50;
    sim.seed = seed;
    const SimResult r = simulate_corpus(sim);
    const QualityScores gold = pipeline_scores(r.annotations, ScoreMethod::kWeightedAverage, seed);
    Engine noise(derive_seed(seed, stable_hash("noise")));
    std::vector<Prediction> preds;
    for (const ScoreEntry& e : gold.entries()) {
      preds.push_back({e.argument_id, e.score + uniform(noise, -0.5, 0.5)});
    }
    const std::vector<int> d = {50, 40, 30, 20, 10};
    const CutoffCurve curve = cutoff_correlations(preds, gold, d);
    bool strict = curve.points.size() == 5;
    for (std::size_t k = 1; strict && k < curve.points.size(); ++k) {
      strict = curve.points[k].pearson_r > curve.points[k - 1].pearson_r &&
               curve.points[k].spearman_rho > curve.points[k - 1].spearman_rho;
    }
    increasing += strict;
    const PredictionEvaluation full = evaluate_predictions(preds, gold);
    bit_exact += !curve.points.empty() && curve.points[0].percentile == 50 &&
                 curve.points[0].pearson_r == full.correlation.pearson_r &&
                 curve.points[0].spearman_rho == full.correlation.spearman_rho;
    detail += "seed " + std::to_string(seed) + " r:";
    for (const CutoffPoint& p : curve.points) detail += " " + fmt(p.pearson_r, 3);
    detail += "; ";
  }
  return pass_if(increasing >= 4 && bit_exact == 5,
                 std::to_string(increasing) + "/5 seeds strictly increasing as d goes 50->10, d=50 "
                 "bit-exact " + std::to_string(bit_exact) + "/5 (" + detail + ")");
}

// ---------------------------------------------------------------------------
// 9. Released dataset checks.

fs::path rank30k_path() {
  if (const char* env = std::getenv("ARGQ_RANK30K_CSV"); env && *env) return env;
  return fs::path(ARGQ_SOURCE_DIR) / "data" / "arg_quality_rank_30k.csv";
}

std::string squash(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

Outcome released_dataset() {
  const fs::path path = rank30k_path();
  if (!fs::exists(path)) {
    return {Outcome::Status::kSkip, "dataset not found at " + path.string() +
                                        " (set ARGQ_RANK30K_CSV)"};
  }
  const ScoredCorpus corpus =
      load_scored_corpus(path, ColumnSchema::load(fs::path(ARGQ_SOURCE_DIR) / "schemas" /
                                                  "ibm_rank_30k.json"));
  const QualityScores wa = corpus.scores(ScoreMethod::kWeightedAverage);
  const QualityScores mace = corpus.scores(ScoreMethod::kMaceP);
  // QualityScores rejects anything outside [0,1] on construction.
  const bool in_range = wa.size() == corpus.size() && mace.size() == corpus.size();

  int wa_low = 0;
  for (const ScoreEntry& e : wa.entries()) wa_low += e.score < 0.5;
  const double wa_low_share = static_cast<double>(wa_low) / wa.size();
  const double wa_mid = mid_fraction(wa), mace_mid = mid_fraction(mace);

  const std::vector<std::pair<std::string, double>> table_rows = {
      {"the interest rates are too high and trap people in debt", 1.0},
      {"racial profiling unfairly targets minorities and the poor", 1.0},
      {"we should subsidize student loans for reach excelent education", 0.05},
      {"i think the same as you, they should ban", 0.09}};
  int rows_ok = 0;
  std::string rows;
  for (const auto& [text, label] : table_rows) {
    const std::string want = squash(text);
    std::optional<double> found;
    for (const ScoredArgument& a : corpus.entries()) {
      if (a.wa_score && squash(a.text) == want) {
        found = a.wa_score;
        break;
      }
    }
    const bool ok = found && std::round(*found * 100.0) / 100.0 == label;
    rows_ok += ok;
    rows += (found ? fmt(*found, 3) : std::string("missing")) + " ";
  }
  return pass_if(in_range && wa_low_share < 0.5 && mace_mid < wa_mid && rows_ok == 4,
                 std::to_string(corpus.size()) + " arguments; WA below 0.5: " +
                     fmt(wa_low_share, 3) + "; mid-range fraction MACE-P " + fmt(mace_mid, 3) +
                     " vs WA " + fmt(wa_mid, 3) + "; Table rows " + rows + "(" +
                     std::to_string(rows_ok) + "/4)");
}

// ---------------------------------------------------------------------------
// 10. End-to-end determinism through the CLI.

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ARGQ_BINARY) + " " + args + " >>" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = s.str();
  }
  return out;
}

Outcome end_to_end() {
  const fs::path root = fs::temp_directory_path() / ("argq_acceptance_" + std::to_string(::getpid()));
  const fs::path work = root / "run";
  const fs::path log = root / "log.txt";
  const std::string w = work.string();
  const std::vector<std::string> steps = {
      "simulate -o " + w + "/sim --seed 11 --n-annotators 12 --pairs",
      "score -i " + w + "/sim/annotations.csv -o " + w + "/wa.csv --method wa --seed 11",
      "score -i " + w + "/sim/annotations.csv -o " + w + "/mace.csv --method mace --seed 11",
      "consistency -i " + w + "/sim/annotations.csv --pair-gold " + w +
          "/sim/pairs.csv --method wa --seed 11 -o " + w + "/consistency_wa.json",
      "consistency -i " + w + "/sim/annotations.csv --pair-gold " + w +
          "/sim/pairs.csv --method mace --seed 11 -o " + w + "/consistency_mace.json"};
  std::vector<std::map<std::string, std::string>> runs;
  fs::remove_all(root);
  fs::create_directories(root);
  for (int attempt = 0; attempt < 2; ++attempt) {
    fs::remove_all(work);
    fs::create_directories(work);
    for (const std::string& step : steps) {
      const int code = run_cli(step, log);
      if (code != 0) {
        std::ifstream in(log);
        std::ostringstream s;
        s << in.rdbuf();
        fs::remove_all(root);
        return {Outcome::Status::kFail,
                "'argq " + step + "' exited " + std::to_string(code) + ": " + s.str()};
      }
    }
    runs.push_back(snapshot(work));
  }
  fs::remove_all(root);
  std::vector<std::string> differing;
  for (const auto& [name, body] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != body) differing.push_back(name);
  }
  if (runs[0].size() != runs[1].size()) differing.push_back("<file set>");
  std::string detail = std::to_string(runs[0].size()) + " files compared";
  for (const std::string& d : differing) detail += ", differs: " + d;
  return pass_if(differing.empty() && runs[0].size() >= 8, detail);
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  const char* title;
  Outcome (*run)();
};

int run_suite(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "statistical fixtures", statistical_fixtures},
      {2, "Williams calibration", williams_calibration},
      {3, "MACE recovery", mace_recovery},
      {4, "MACE-P vs WA score shape", shape_contrast},
      {5, "delta-bin precision", delta_bins},
      {6, "split-half consistency", split_half},
      {7, "WA invariants", wa_invariants},
      {8, "cut-off correlations", cutoff},
      {9, "released dataset", released_dataset},
      {10, "end-to-end determinism", end_to_end}};
  std::set<int> wanted, known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      wanted.insert(std::atoi(argv[i]));
    }
  }

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {Outcome::Status::kFail, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* status = outcome.status == Outcome::Status::kPass   ? "PASS"
                         : outcome.status == Outcome::Status::kSkip ? "SKIP"
                                                                    : "FAIL";
    const bool failed = outcome.status == Outcome::Status::kFail;
    const bool listed = known.count(c.number) > 0;
    std::string note;
    if (failed && listed) note = " (known failure)";
    if (!failed && listed) note = " (listed as a known failure but did not fail)";
    unexpected += failed != listed;
    std::cout << status << " criterion " << c.number << ": " << c.title << " [" << fmt(secs, 3)
              << " s] " << outcome.detail << note << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}

}  // namespace
}  // namespace argq

int main(int argc, char** argv) { return argq::run_suite(argc, argv); }
