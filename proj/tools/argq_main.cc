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

// argq: point-wise argument quality from crowd labels.
//
//   argq score       annotations -> per-argument scores + reliability report
//   argq evaluate    predictions vs. gold scores (correlation, cut-off, Williams)
//   argq simulate    synthetic crowd corpus with ground truth
//   argq consistency split-half and delta-bin checks of a scoring method
//   argq report      corpus validation, test-question filter, agreement stats
//
// Options may also come from a TOML file given with --config; flags on the
// command line take precedence over the file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "argq/corpus.h"
#include "argq/csv.h"
#include "argq/errors.h"
#include "argq/evaluation.h"
#include "argq/mace.h"
#include "argq/random.h"
#include "argq/reliability.h"
#include "argq/scores.h"
#include "argq/scoring.h"
#include "argq/simulator.h"
#include "argq/stats.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace argq {
namespace {

// Artifacts are staged in memory and written together at the end, so a
// failing command leaves nothing behind.
class Outputs {
 public:
  void add(fs::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void commit() {
    std::vector<fs::path> written;
    try {
      for (const auto& [path, content] : files_) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        const fs::path tmp = path.string() + ".tmp";
        {
          std::ofstream out(tmp, std::ios::binary);
          out << content;
          out.close();
          if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
        }
        fs::rename(tmp, path);
        written.push_back(path);
      }
    } catch (const fs::filesystem_error& e) {
      rollback(written);
      throw Error(ErrorKind::kIo, e.what());
    } catch (...) {
      rollback(written);
      throw;
    }
  }

 private:
  static void rollback(const std::vector<fs::path>& written) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
  }

  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Report goes to a file when a path is given, else to stdout after all
// files are in place.
void emit(Outputs& outputs, const std::string& path, const json& report) {
  if (path.empty() || path == "-") {
    outputs.commit();
    std::cout << dump(report);
  } else {
    outputs.add(path, dump(report));
    outputs.commit();
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return in;
}

ColumnSchema schema_from(const std::string& path) {
  return path.empty() ? ColumnSchema{} : ColumnSchema::load(path);
}

AnnotationSet read_annotations(const std::string& path, const std::string& schema) {
  AnnotationSet set = load_annotations(path, schema_from(schema));
  if (set.empty()) {
    throw Error(ErrorKind::kValidation, "'" + path + "' contains no annotations");
  }
  return set;
}

std::vector<Prediction> read_predictions(const std::string& path) {
  auto in = open_input(path);
  return read_predictions_csv(in);
}

// Options shared by the commands that score annotations.
struct ScoringFlags {
  std::string method = "wa";
  double test_fail_rate = 0.2;
  int min_shared = 50;
  int min_peers = 5;
  double weight_floor = 0.01;
  std::string fallback = "task_average";
  int mace_iterations = 50;
  int mace_restarts = 10;
  double mace_smoothing = 0.1;
  double mace_tol = 1e-6;

  void attach(CLI::App* app, bool with_method = true) {
    if (with_method) {
      app->add_option("--method", method, "avg | wa | mace")->capture_default_str();
    }
    app->add_option("--test-fail-rate", test_fail_rate,
                    "Remove annotators failing more than this share of test questions")
        ->capture_default_str();
    app->add_option("--min-shared", min_shared, "Shared judgments for a peer kappa")
        ->capture_default_str();
    app->add_option("--min-peers", min_peers, "Qualifying peers for a reliability value")
        ->capture_default_str();
    app->add_option("--weight-floor", weight_floor, "Lower bound on WA weights")
        ->capture_default_str();
    app->add_option("--fallback", fallback, "task_average | exclude")->capture_default_str();
    app->add_option("--mace-iterations", mace_iterations)->capture_default_str();
    app->add_option("--mace-restarts", mace_restarts)->capture_default_str();
    app->add_option("--mace-smoothing", mace_smoothing)->capture_default_str();
    app->add_option("--mace-tol", mace_tol)->capture_default_str();
  }

  ReliabilityConfig reliability() const { return {min_shared, min_peers, LabelChannel::kQuality}; }
  WeightPolicy weights() const { return {weight_floor, parse_fallback_policy(fallback)}; }
  MaceConfig mace(std::uint64_t seed) const {
    MaceConfig c;
    c.iterations = mace_iterations;
    c.restarts = mace_restarts;
    c.smoothing_delta = mace_smoothing;
    c.convergence_tol = mace_tol;
    c.seed = seed;
    c.validate();
    return c;
  }

  json to_json(std::uint64_t seed) const {
    return {{"method", std::string(to_string(parse_score_method(method)))},
            {"test_fail_rate", test_fail_rate},
            {"reliability", reliability()},
            {"weights", weights()},
            {"mace", mace(seed)}};
  }
};

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::kValidation, "--test-fail-rate must be in [0,1]");
  }
}

struct Scored {
  QualityScores scores;
  TestQuestionFilter filter;
  std::optional<ReliabilityTable> table;
  std::optional<MaceModel> model;
};

Scored run_scoring(const AnnotationSet& set, ScoreMethod method, const ScoringFlags& flags,
                   std::uint64_t seed) {
  check_rate(flags.test_fail_rate);
  Scored out;
  out.filter = filter_by_test_questions(set, flags.test_fail_rate);
  out.table = compute_reliability(out.filter.kept, flags.reliability(), out.filter.removed);
  switch (method) {
    case ScoreMethod::kSimpleAverage:
    case ScoreMethod::kWeightedAverage:
      out.scores = score_corpus(out.filter.kept, method, &*out.table, flags.weights());
      break;
    case ScoreMethod::kMaceP:
      out.model = mace_fit(out.filter.kept, flags.mace(seed));
      out.scores = mace_posteriors(*out.model);
      break;
  }
  return out;
}

json mace_summary(const MaceModel& model) {
  json annotators = json::object();
  for (std::size_t j = 0; j < model.annotator_ids.size(); ++j) {
    annotators[model.annotator_ids[j]] = {{"competence", model.competence[j]},
                                          {"spam_positive", model.spam[j][1]}};
  }
  json restarts = json::array();
  for (const RestartTrace& t : model.traces) {
    restarts.push_back({{"seed", t.seed},
                        {"iterations", t.log_likelihood.empty() ? 0 : t.log_likelihood.size() - 1},
                        {"log_likelihood", t.log_likelihood.empty() ? 0.0 : t.log_likelihood.back()},
                        {"converged", t.converged}});
  }
  return {{"log_likelihood", model.log_likelihood},
          {"objective", model.objective},
          {"best_restart", model.best_restart},
          {"restarts", std::move(restarts)},
          {"annotators", std::move(annotators)}};
}

// ---------------------------------------------------------------------------
// score

struct ScoreCommand {
  std::string input, schema, output, report;
  std::uint64_t seed = 0;
  ScoringFlags flags;

  void attach(CLI::App* app) {
    app->add_option("--input,-i", input, "Annotation file")->required();
    app->add_option("--schema", schema, "Column schema JSON");
    app->add_option("--output,-o", output, "Scores CSV")->required();
    app->add_option("--report", report, "JSON report (default: <output>.json)");
    app->add_option("--seed", seed, "Seed for MACE restarts")->capture_default_str();
    flags.attach(app);
  }

  int run() const {
    const ScoreMethod method = parse_score_method(flags.method);
    const AnnotationSet set = read_annotations(input, schema);
    const Scored scored = run_scoring(set, method, flags, seed);

    std::ostringstream csv;
    write_scores_csv(csv, scored.scores);
    json j = {{"command", "score"},
              {"seed", seed},
              {"config", {{"input", input}, {"schema", schema}, {"scoring", flags.to_json(seed)}}},
              {"removed_annotators", scored.filter.removed},
              {"reliability", *scored.table},
              {"task_stats", task_stats(scored.filter.kept, *scored.table)},
              {"scored_arguments", scored.scores.size()},
              {"failures", json::array()},
              {"notes", scored.scores.notes()}};
    for (const ScoreFailure& f : scored.scores.failures()) {
      j["failures"].push_back({{"argument_id", f.argument_id}, {"message", f.message}});
    }
    if (scored.model) j["mace"] = mace_summary(*scored.model);

    Outputs outputs;
    outputs.add(output, csv.str());
    outputs.add(report.empty() ? output + ".json" : report, dump(j));
    outputs.commit();
    return 0;
  }
};

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateCommand {
  std::string gold, gold_format = "scores", gold_method = "wa", gold_schema, split;
  std::string predictions, compare, output, cutoff_output;
  bool cutoff = false;
  std::vector<int> percentiles;

  void attach(CLI::App* app) {
    app->add_option("--gold,-g", gold, "Gold scores")->required();
    app->add_option("--gold-format", gold_format, "scores | corpus")->capture_default_str();
    app->add_option("--gold-method", gold_method, "Score column of a corpus: wa | mace")
        ->capture_default_str();
    app->add_option("--gold-schema", gold_schema, "Column schema for a corpus");
    app->add_option("--split", split, "Restrict a corpus to train | dev | test");
    app->add_option("--predictions,-p", predictions, "Predictions CSV")->required();
    app->add_option("--compare", compare, "Second predictions CSV for a Williams test");
    app->add_flag("--cutoff", cutoff, "Also compute the cut-off curve");
    app->add_option("--cutoff-output", cutoff_output, "Curve CSV (default: <output>.cutoff.csv)");
    app->add_option("--percentiles", percentiles, "Cut-off percentiles (default 10 20 30 40 50)");
    app->add_option("--output,-o", output, "JSON report (default: stdout)");
  }

  QualityScores load_gold() const {
    if (gold_format == "scores") {
      auto in = open_input(gold);
      return read_scores_csv(in);
    }
    if (gold_format == "corpus") {
      std::optional<Split> s;
      if (!split.empty()) {
        s = parse_split(split);
        if (!s) throw Error(ErrorKind::kValidation, "unknown split '" + split + "'");
      }
      return load_scored_corpus(gold, schema_from(gold_schema))
          .scores(parse_score_method(gold_method), s);
    }
    throw Error(ErrorKind::kValidation, "--gold-format must be scores or corpus");
  }

  int run() const {
    const QualityScores gold_scores = load_gold();
    const std::vector<Prediction> preds = read_predictions(predictions);
    const PredictionEvaluation evaluation = evaluate_predictions(preds, gold_scores);

    json j = {{"command", "evaluate"},
              {"seed", nullptr},
              {"config",
               {{"gold", gold},
                {"gold_format", gold_format},
                {"gold_method", gold_format == "corpus" ? json(gold_method) : json(nullptr)},
                {"split", split.empty() ? json(nullptr) : json(split)},
                {"predictions", predictions},
                {"compare", compare.empty() ? json(nullptr) : json(compare)},
                {"cutoff", cutoff},
                {"percentiles", percentiles}}},
              {"gold_method", to_string(gold_scores.method())},
              {"evaluation", evaluation}};

    Outputs outputs;
    if (cutoff || !percentiles.empty()) {
      const CutoffCurve curve = cutoff_correlations(preds, gold_scores, percentiles);
      j["cutoff"] = curve;
      std::ostringstream csv;
      write_cutoff_csv(csv, curve);
      std::string path = cutoff_output;
      if (path.empty()) path = (output.empty() || output == "-") ? "cutoff.csv" : output + ".cutoff.csv";
      outputs.add(path, csv.str());
      j["cutoff_output"] = path;
    }
    if (!compare.empty()) {
      j["comparison"] = compare_predictors(preds, read_predictions(compare), gold_scores);
    }
    emit(outputs, output, j);
    return 0;
  }
};

// ---------------------------------------------------------------------------
// simulate

// "uniform:0.4,1" | "points:1:20,0:10"
CompetenceDistribution parse_competence(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto bad = [&] {
    return Error(ErrorKind::kValidation, "bad --competence '" + text +
                                             "' (use uniform:LO,HI or points:V:N,V:N)");
  };
  if (kind == "uniform") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw bad();
    const auto lo = parse_double(rest.substr(0, comma));
    const auto hi = parse_double(rest.substr(comma + 1));
    if (!lo || !hi) throw bad();
    return UniformRange{*lo, *hi};
  }
  if (kind == "points") {
    std::vector<PointMass> masses;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto sep = item.find(':');
      if (sep == std::string::npos) throw bad();
      const auto v = parse_double(item.substr(0, sep));
      const auto n = parse_int(item.substr(sep + 1));
      if (!v || !n) throw bad();
      masses.push_back({*v, static_cast<int>(*n)});
    }
    if (masses.empty()) throw bad();
    return masses;
  }
  throw bad();
}

// "beta:0.5,0.5" | "uniform:0,1" | "binary:0.6"
QualityDistribution parse_quality(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto bad = [&] {
    return Error(ErrorKind::kValidation,
                 "bad --quality '" + text + "' (use beta:A,B, uniform:LO,HI or binary:P)");
  };
  if (kind == "binary") {
    const auto p = parse_double(rest);
    if (!p) throw bad();
    return BinaryQuality{*p};
  }
  const auto comma = rest.find(',');
  if (comma == std::string::npos) throw bad();
  const auto x = parse_double(rest.substr(0, comma));
  const auto y = parse_double(rest.substr(comma + 1));
  if (!x || !y) throw bad();
  if (kind == "beta") return BetaShape{*x, *y};
  if (kind == "uniform") return UniformRange{*x, *y};
  throw bad();
}

struct SimulateCommand {
  SimConfig config;
  std::string output_dir, sim_json, competence, quality;
  bool pairs = false;
  int pair_judges = 7;
  double pair_noise = 0.2;

  void attach(CLI::App* app) {
    app->add_option("--output-dir,-o", output_dir, "Directory for the generated files")
        ->required();
    app->add_option("--sim-config", sim_json, "Simulation config JSON (flags override it)");
    app->add_option("--seed", config.seed)->capture_default_str();
    app->add_option("--n-topics", config.n_topics)->capture_default_str();
    app->add_option("--args-per-topic", config.args_per_topic)->capture_default_str();
    app->add_option("--n-annotators", config.n_annotators)->capture_default_str();
    app->add_option("--annotations-per-argument", config.annotations_per_argument)
        ->capture_default_str();
    app->add_option("--competence", competence, "uniform:LO,HI | points:V:N,...");
    app->add_option("--quality", quality, "beta:A,B | uniform:LO,HI | binary:P");
    app->add_option("--positivity-bias", config.positivity_bias)->capture_default_str();
    app->add_option("--spam-base-rate", config.spam_base_rate)->capture_default_str();
    app->add_option("--stance-noise", config.stance_noise)->capture_default_str();
    app->add_option("--test-question-rate", config.test_question_rate)->capture_default_str();
    app->add_option("--min-text-length", config.min_text_length)->capture_default_str();
    app->add_option("--max-text-length", config.max_text_length)->capture_default_str();
    app->add_flag("--pairs", pairs, "Also write simulated pairwise gold");
    app->add_option("--pair-judges", pair_judges)->capture_default_str();
    app->add_option("--pair-noise", pair_noise)->capture_default_str();
  }

  SimConfig effective(const CLI::App* app) const {
    SimConfig c;
    if (!sim_json.empty()) {
      auto in = open_input(sim_json);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw Error(ErrorKind::kValidation, "'" + sim_json + "': " + e.what());
      }
      from_json(j, c);
    }
    // Explicit flags beat the JSON file.
    auto given = [&](const char* name) { return app->count(name) > 0; };
    if (given("--seed")) c.seed = config.seed;
    if (given("--n-topics")) c.n_topics = config.n_topics;
    if (given("--args-per-topic")) c.args_per_topic = config.args_per_topic;
    if (given("--n-annotators")) c.n_annotators = config.n_annotators;
    if (given("--annotations-per-argument")) {
      c.annotations_per_argument = config.annotations_per_argument;
    }
    if (given("--positivity-bias")) c.positivity_bias = config.positivity_bias;
    if (given("--spam-base-rate")) c.spam_base_rate = config.spam_base_rate;
    if (given("--stance-noise")) c.stance_noise = config.stance_noise;
    if (given("--test-question-rate")) c.test_question_rate = config.test_question_rate;
    if (given("--min-text-length")) c.min_text_length = config.min_text_length;
    if (given("--max-text-length")) c.max_text_length = config.max_text_length;
    if (!competence.empty()) c.competence = parse_competence(competence);
    if (!quality.empty()) c.quality = parse_quality(quality);
    c.validate();
    return c;
  }

  int run(const CLI::App* app) const {
    const SimConfig c = effective(app);
    if (pairs && (pair_judges < 1 || !(pair_noise >= 0.0 && pair_noise <= 1.0))) {
      throw Error(ErrorKind::kValidation, "--pair-judges must be >= 1, --pair-noise in [0,1]");
    }
    const SimResult sim = simulate_corpus(c);
    const fs::path dir(output_dir);

    std::ostringstream annotations;
    write_annotations_csv(annotations, sim.annotations);

    int positive = 0;
    for (const AnnotationRecord& r : sim.annotations.records()) positive += r.quality_label;
    const double positive_rate =
        static_cast<double>(positive) / static_cast<double>(sim.annotations.records().size());
    const ReliabilityTable table = compute_reliability(sim.annotations, ReliabilityConfig{});

    json summary = {{"command", "simulate"},
                    {"seed", c.seed},
                    {"config", c},
                    {"arguments", sim.truth.arguments.size()},
                    {"annotators", sim.truth.annotators.size()},
                    {"annotations", sim.annotations.records().size()},
                    {"positive_rate", positive_rate},
                    {"expected_positive_rate", expected_positive_rate(c)},
                    {"task_average_kappa", table.mean_eligible()
                                               ? json(*table.mean_eligible())
                                               : json(nullptr)}};
    json truth = sim.truth;
    truth["config"] = c;

    Outputs outputs;
    outputs.add(dir / "annotations.csv", annotations.str());
    outputs.add(dir / "truth.json", dump(truth));
    if (pairs) {
      std::vector<PairCandidate> candidates;
      for (const ArgumentTruth& a : sim.truth.arguments) {
        candidates.push_back({a.id, a.topic,
                              a.true_stance == Stance::kPro ? StanceCall::kPro : StanceCall::kCon,
                              std::nullopt});
      }
      const std::vector<ArgumentPair> all = generate_pairs(candidates);
      const std::uint64_t pair_seed = derive_seed(c.seed, stable_hash("pairs"));
      const PairwiseGold gold =
          simulate_pairwise_gold(sim.truth, all, pair_judges, pair_noise, pair_seed);
      std::ostringstream csv;
      write_pairwise_gold(csv, gold);
      outputs.add(dir / "pairs.csv", csv.str());
      summary["pairs"] = {{"count", gold.size()}, {"judges", pair_judges}, {"noise", pair_noise}};
    }
    outputs.add(dir / "summary.json", dump(summary));
    outputs.commit();
    std::cout << dump(summary);
    return 0;
  }
};

// ---------------------------------------------------------------------------
// consistency

struct ConsistencyCommand {
  std::string input, schema, pair_gold, output;
  std::uint64_t seed = 0;
  int half_min_shared = 25;
  int sample_per_bin = 150;
  double agreement_threshold = 0.7;
  ScoringFlags flags;

  void attach(CLI::App* app) {
    app->add_option("--input,-i", input, "Annotation file")->required();
    app->add_option("--schema", schema, "Column schema JSON");
    app->add_option("--pair-gold", pair_gold, "Pairwise gold CSV for delta bins");
    app->add_option("--output,-o", output, "JSON report (default: stdout)");
    app->add_option("--seed", seed, "Seed for halves, bin sampling and MACE")
        ->capture_default_str();
    app->add_option("--half-min-shared", half_min_shared,
                    "Shared judgments for a peer kappa within one half")
        ->capture_default_str();
    app->add_option("--sample-per-bin", sample_per_bin)->capture_default_str();
    app->add_option("--agreement-threshold", agreement_threshold)->capture_default_str();
    flags.attach(app);
  }

  int run() const {
    const ScoreMethod method = parse_score_method(flags.method);
    const AnnotationSet set = read_annotations(input, schema);
    check_rate(flags.test_fail_rate);

    // One seed feeds every random step; each step gets its own stream.
    const std::uint64_t mace_seed = derive_seed(seed, stable_hash("mace"));
    const std::uint64_t split_seed = derive_seed(seed, stable_hash("split"));
    const std::uint64_t bin_seed = derive_seed(seed, stable_hash("bins"));

    json j = {{"command", "consistency"},
              {"seed", seed},
              {"config",
               {{"input", input},
                {"schema", schema},
                {"pair_gold", pair_gold.empty() ? json(nullptr) : json(pair_gold)},
                {"scoring", flags.to_json(mace_seed)},
                {"half_min_shared", half_min_shared},
                {"sample_per_bin", sample_per_bin},
                {"agreement_threshold", agreement_threshold},
                {"streams", {{"mace", mace_seed}, {"split", split_seed}, {"bins", bin_seed}}}}}};

    const TestQuestionFilter filtered = filter_by_test_questions(set, flags.test_fail_rate);
    SplitHalfConfig half;
    half.reliability = flags.reliability();
    half.reliability.min_shared = half_min_shared;
    half.test_fail_rate = flags.test_fail_rate;
    half.weights = flags.weights();
    half.mace = flags.mace(mace_seed);
    half.seed = split_seed;
    const auto [first, second] = split_annotations(filtered.kept, split_seed);
    j["split_half"] = half_consistency(first, second, method, half);
    j["removed_annotators"] = filtered.removed;

    if (!pair_gold.empty()) {
      auto in = open_input(pair_gold);
      const PairwiseGold gold = read_pairwise_gold(in);
      const QualityScores full = run_scoring(set, method, flags, mace_seed).scores;
      std::vector<ArgumentPair> pairs = generate_pairs(pair_candidates(set));
      std::erase_if(pairs, [&](const ArgumentPair& p) {
        return !full.find(p.first) || !full.find(p.second);
      });
      const DeltaBinReport report = delta_bin_evaluation(
          pairs, full, gold, {sample_per_bin, agreement_threshold, bin_seed});
      json bins = report;
      for (std::size_t k = 0; k < report.bins.size(); ++k) {
        json sampled = json::array();
        for (const auto& [p, q] : report.bins[k].sampled_pairs) sampled.push_back({p, q});
        bins["bins"][k]["sampled_pairs"] = std::move(sampled);
      }
      j["candidate_pairs"] = pairs.size();
      j["delta_bins"] = std::move(bins);
    } else {
      j["delta_bins"] = nullptr;
      j["notice"] = "no --pair-gold given; delta-bin evaluation skipped";
    }
    Outputs outputs;
    emit(outputs, output, j);
    return 0;
  }
};

// ---------------------------------------------------------------------------
// report

struct ReportCommand {
  std::string input, schema, output;
  ValidationConfig validation;
  ScoringFlags flags;

  void attach(CLI::App* app) {
    app->add_option("--input,-i", input, "Annotation file")->required();
    app->add_option("--schema", schema, "Column schema JSON");
    app->add_option("--output,-o", output, "JSON report (default: stdout)");
    app->add_option("--min-length", validation.min_length)->capture_default_str();
    app->add_option("--max-length", validation.max_length)->capture_default_str();
    app->add_option("--author-cap", validation.max_arguments_per_author_topic,
                    "Arguments per author and topic")
        ->capture_default_str();
    app->add_option("--min-annotations", validation.min_annotations_per_argument)
        ->capture_default_str();
    flags.attach(app, false);
  }

  int run() const {
    const AnnotationSet set = read_annotations(input, schema);
    check_rate(flags.test_fail_rate);
    const ValidationReport validation_report = validate_corpus(set, validation);
    const TestQuestionFilter filtered = filter_by_test_questions(set, flags.test_fail_rate);
    const ReliabilityTable table =
        compute_reliability(filtered.kept, flags.reliability(), filtered.removed);
    json j = {{"command", "report"},
              {"seed", nullptr},
              {"config",
               {{"input", input},
                {"schema", schema},
                {"validation", validation},
                {"test_fail_rate", flags.test_fail_rate},
                {"reliability", flags.reliability()}}},
              {"arguments", set.arguments().size()},
              {"annotations", set.records().size()},
              {"annotators", set.annotator_ids().size()},
              {"validation", validation_report},
              {"removed_annotators", filtered.removed},
              {"task_stats", task_stats(filtered.kept, table)},
              {"reliability", table}};
    Outputs outputs;
    emit(outputs, output, j);
    return 0;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"argq: point-wise argument quality from crowd labels"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  ScoreCommand score;
  score.attach(app.add_subcommand("score", "Score arguments from annotations"));
  EvaluateCommand evaluate;
  evaluate.attach(app.add_subcommand("evaluate", "Evaluate predictions against gold scores"));
  SimulateCommand simulate;
  CLI::App* sim_app = app.add_subcommand("simulate", "Generate a synthetic annotated corpus");
  simulate.attach(sim_app);
  ConsistencyCommand consistency;
  consistency.attach(
      app.add_subcommand("consistency", "Split-half and delta-bin checks of a scoring method"));
  ReportCommand report;
  report.attach(app.add_subcommand("report", "Corpus validation and annotator agreement"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("score")) return score.run();
    if (app.got_subcommand("evaluate")) return evaluate.run();
    if (app.got_subcommand("simulate")) return simulate.run(sim_app);
    if (app.got_subcommand("consistency")) return consistency.run();
    if (app.got_subcommand("report")) return report.run();
  } catch (const Error& e) {
    std::cerr << "argq: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "argq: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace argq

int main(int argc, char** argv) { return argq::run(argc, argv); }
