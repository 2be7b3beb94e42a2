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

#include "argq/mace.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "argq/errors.h"
#include "argq/random.h"

namespace argq {

namespace {

// Keeps log P(a | t) finite when a parameter is driven onto the boundary
// (only reachable without smoothing).
constexpr double kParamEpsilon = 1e-12;

struct Params {
  std::vector<double> theta;
  std::vector<std::array<double, 2>> xi;
};

struct Expectations {
  double log_likelihood = 0.0;
  std::vector<double> posterior;                // P(T_i = 1)
  std::vector<double> honest;                   // E[#(S = 0)] per annotator
  std::vector<std::array<double, 2>> spam;      // E[#(S = 1, a)] per annotator
};

// Observations grouped by item; validated once up front.
struct Indexed {
  std::vector<std::vector<std::pair<int, int>>> by_item;  // (annotator, label)
  std::vector<int> per_annotator;
};

Indexed index_observations(const LabelMatrix& data) {
  const int items = static_cast<int>(data.item_ids.size());
  const int annotators = static_cast<int>(data.annotator_ids.size());
  if (data.observations.empty()) {
    throw Error(ErrorKind::kValidation, "mace: no annotations to fit");
  }
  Indexed idx;
  idx.by_item.resize(items);
  idx.per_annotator.assign(annotators, 0);
  for (const Observation& o : data.observations) {
    if (o.item < 0 || o.item >= items || o.annotator < 0 || o.annotator >= annotators) {
      throw Error(ErrorKind::kValidation, "mace: observation index out of range");
    }
    if (o.label != 0 && o.label != 1) {
      throw Error(ErrorKind::kValidation,
                  "mace: labels must be binary, got " + std::to_string(o.label));
    }
    idx.by_item[o.item].emplace_back(o.annotator, o.label);
    ++idx.per_annotator[o.annotator];
  }
  for (int i = 0; i < items; ++i) {
    if (idx.by_item[i].empty()) {
      throw Error(ErrorKind::kValidation,
                  "mace: item '" + data.item_ids[i] + "' has no annotations");
    }
  }
  return idx;
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// P(a | t) for one annotator.
inline double emission(double theta, const std::array<double, 2>& xi, int a, int t) {
  return (a == t ? theta : 0.0) + (1.0 - theta) * xi[a];
}

Expectations expectation(const Indexed& idx, const Params& p) {
  const std::size_t annotators = p.theta.size();
  Expectations e;
  e.posterior.resize(idx.by_item.size());
  e.honest.assign(annotators, 0.0);
  e.spam.assign(annotators, {0.0, 0.0});
  const double log_half = -std::numbers::ln2;

  for (std::size_t i = 0; i < idx.by_item.size(); ++i) {
    double lp[2] = {log_half, log_half};
    for (const auto& [j, a] : idx.by_item[i]) {
      for (int t = 0; t < 2; ++t) lp[t] += std::log(emission(p.theta[j], p.xi[j], a, t));
    }
    const double item_ll = log_sum_exp(lp[0], lp[1]);
    const double post[2] = {std::exp(lp[0] - item_ll), std::exp(lp[1] - item_ll)};
    e.log_likelihood += item_ll;
    e.posterior[i] = post[1];

    for (const auto& [j, a] : idx.by_item[i]) {
      for (int t = 0; t < 2; ++t) {
        if (post[t] == 0.0) continue;
        const double total = emission(p.theta[j], p.xi[j], a, t);
        const double honest = (a == t ? p.theta[j] : 0.0) / total;
        e.honest[j] += post[t] * honest;
        e.spam[j][a] += post[t] * (1.0 - honest);
      }
    }
  }
  return e;
}

double penalty(const Params& p, double delta) {
  if (delta <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < p.theta.size(); ++j) {
    s += std::log(p.theta[j]) + std::log1p(-p.theta[j]) + std::log(p.xi[j][0]) +
         std::log(p.xi[j][1]);
  }
  return delta * s;
}

void maximization(const Indexed& idx, const Expectations& e, double delta, Params& p) {
  for (std::size_t j = 0; j < p.theta.size(); ++j) {
    const double n = idx.per_annotator[j];
    if (n + 2.0 * delta > 0.0) {
      p.theta[j] = std::clamp((e.honest[j] + delta) / (n + 2.0 * delta), kParamEpsilon,
                              1.0 - kParamEpsilon);
    }
    const double spam_total = e.spam[j][0] + e.spam[j][1] + 2.0 * delta;
    if (spam_total > 0.0) {
      const double xi1 = std::clamp((e.spam[j][1] + delta) / spam_total, kParamEpsilon,
                                    1.0 - kParamEpsilon);
      p.xi[j] = {1.0 - xi1, xi1};
    }
  }
}

Params initial_params(const LabelMatrix& data, const Indexed& idx, std::uint64_t seed) {
  Params p;
  const std::size_t annotators = data.annotator_ids.size();
  p.theta.resize(annotators);
  p.xi.resize(annotators);
  std::vector<int> positives(annotators, 0);
  for (const Observation& o : data.observations) positives[o.annotator] += o.label;
  for (std::size_t j = 0; j < annotators; ++j) {
    // Keyed by id so the draw does not depend on annotator order.
    Engine rng(derive_seed(seed, stable_hash(data.annotator_ids[j])));
    p.theta[j] = 0.5 + 0.5 * uniform01(rng);
    const double n = idx.per_annotator[j];
    const double xi1 = (positives[j] + 1.0) / (n + 2.0);
    p.xi[j] = {1.0 - xi1, xi1};
  }
  return p;
}

struct RestartResult {
  Params params;
  Expectations expectations;
  RestartTrace trace;
  double objective = 0.0;
};

RestartResult run_restart(const LabelMatrix& data, const Indexed& idx,
                          const MaceConfig& config, std::uint64_t seed) {
  RestartResult r;
  r.trace.seed = seed;
  r.params = initial_params(data, idx, seed);
  r.expectations = expectation(idx, r.params);
  r.objective = r.expectations.log_likelihood + penalty(r.params, config.smoothing_delta);
  r.trace.log_likelihood.push_back(r.expectations.log_likelihood);
  r.trace.objective.push_back(r.objective);

  for (int it = 0; it < config.iterations; ++it) {
    maximization(idx, r.expectations, config.smoothing_delta, r.params);
    r.expectations = expectation(idx, r.params);
    const double previous = r.objective;
    r.objective = r.expectations.log_likelihood + penalty(r.params, config.smoothing_delta);
    r.trace.log_likelihood.push_back(r.expectations.log_likelihood);
    r.trace.objective.push_back(r.objective);
    const double scale = std::max(std::fabs(previous), 1e-300);
    if (std::fabs(r.objective - previous) / scale < config.convergence_tol) {
      r.trace.converged = true;
      break;
    }
  }
  return r;
}

// Maps model parameters onto the data's index space.
Params align_params(const LabelMatrix& data, const MaceModel& model) {
  auto same_ids = [](std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  };
  if (!same_ids(data.item_ids, model.item_ids) ||
      !same_ids(data.annotator_ids, model.annotator_ids)) {
    throw Error(ErrorKind::kValidation,
                "mace: model items/annotators do not match the annotation data");
  }
  if (model.competence.size() != model.annotator_ids.size() ||
      model.spam.size() != model.annotator_ids.size()) {
    throw Error(ErrorKind::kValidation, "mace: model parameter arrays are inconsistent");
  }
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t j = 0; j < model.annotator_ids.size(); ++j) {
    pos.emplace(model.annotator_ids[j], j);
  }
  Params p;
  for (const auto& id : data.annotator_ids) {
    const std::size_t j = pos.at(id);
    p.theta.push_back(model.competence[j]);
    p.xi.push_back(model.spam[j]);
  }
  return p;
}

}  // namespace

void MaceConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::kValidation, "mace: iterations must be >= 1");
  if (restarts < 1) throw Error(ErrorKind::kValidation, "mace: restarts must be >= 1");
  if (!(smoothing_delta >= 0.0) || !std::isfinite(smoothing_delta)) {
    throw Error(ErrorKind::kValidation, "mace: smoothing must be >= 0");
  }
  if (!(convergence_tol > 0.0)) {
    throw Error(ErrorKind::kValidation, "mace: convergence tolerance must be > 0");
  }
}

LabelMatrix LabelMatrix::from_annotations(const AnnotationSet& set) {
  LabelMatrix m;
  m.annotator_ids = set.annotator_ids();
  std::unordered_map<std::string, int> annotator_pos;
  for (std::size_t j = 0; j < m.annotator_ids.size(); ++j) {
    annotator_pos.emplace(m.annotator_ids[j], static_cast<int>(j));
  }
  for (std::size_t a = 0; a < set.arguments().size(); ++a) {
    const auto records = set.records_of(a);
    if (records.empty()) continue;
    const int item = static_cast<int>(m.item_ids.size());
    m.item_ids.push_back(set.arguments()[a].id);
    for (std::size_t r : records) {
      const AnnotationRecord& rec = set.records()[r];
      m.observations.push_back({item, annotator_pos.at(rec.annotator_id),
                                static_cast<int>(rec.quality_label)});
    }
  }
  return m;
}

MaceModel mace_fit(const LabelMatrix& data, const MaceConfig& config) {
  config.validate();
  const Indexed idx = index_observations(data);

  MaceModel model;
  model.config = config;
  std::optional<RestartResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    RestartResult result = run_restart(data, idx, config, derive_seed(config.seed, r));
    model.traces.push_back(result.trace);
    if (!best || result.expectations.log_likelihood > best->expectations.log_likelihood) {
      best = std::move(result);
      model.best_restart = r;
    }
  }

  model.item_ids = data.item_ids;
  model.annotator_ids = data.annotator_ids;
  model.posteriors = best->expectations.posterior;
  model.annotation_counts.reserve(idx.by_item.size());
  for (const auto& obs : idx.by_item) {
    model.annotation_counts.push_back(static_cast<int>(obs.size()));
  }
  model.competence = best->params.theta;
  model.spam = best->params.xi;
  model.log_likelihood = best->expectations.log_likelihood;
  model.objective = best->objective;
  return model;
}

MaceModel mace_fit(const AnnotationSet& set, const MaceConfig& config) {
  if (set.empty()) throw Error(ErrorKind::kValidation, "mace: empty annotation set");
  return mace_fit(LabelMatrix::from_annotations(set), config);
}

QualityScores mace_posteriors(const MaceModel& model) {
  std::vector<ScoreEntry> entries;
  entries.reserve(model.item_ids.size());
  for (std::size_t i = 0; i < model.item_ids.size(); ++i) {
    const int support = i < model.annotation_counts.size() ? model.annotation_counts[i] : 1;
    entries.push_back({model.item_ids[i], std::clamp(model.posteriors[i], 0.0, 1.0),
                       std::max(support, 1)});
  }
  return QualityScores(ScoreMethod::kMaceP, std::move(entries));
}

double mace_log_likelihood(const LabelMatrix& data, const MaceModel& model) {
  const Indexed idx = index_observations(data);
  return expectation(idx, align_params(data, model)).log_likelihood;
}

double mace_log_likelihood(const AnnotationSet& set, const MaceModel& model) {
  return mace_log_likelihood(LabelMatrix::from_annotations(set), model);
}

void to_json(nlohmann::json& j, const MaceConfig& config) {
  j = {{"iterations", config.iterations},
       {"restarts", config.restarts},
       {"smoothing_delta", config.smoothing_delta},
       {"convergence_tol", config.convergence_tol},
       {"seed", config.seed}};
}

void to_json(nlohmann::json& j, const MaceModel& model) {
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < model.item_ids.size(); ++i) {
    items.push_back({{"id", model.item_ids[i]}, {"posterior", model.posteriors[i]}});
  }
  nlohmann::json annotators = nlohmann::json::array();
  for (std::size_t k = 0; k < model.annotator_ids.size(); ++k) {
    annotators.push_back({{"id", model.annotator_ids[k]},
                          {"competence", model.competence[k]},
                          {"spam", {model.spam[k][0], model.spam[k][1]}}});
  }
  nlohmann::json traces = nlohmann::json::array();
  for (const RestartTrace& t : model.traces) {
    traces.push_back({{"seed", t.seed},
                      {"converged", t.converged},
                      {"updates", t.log_likelihood.size() - 1},
                      {"final_log_likelihood", t.log_likelihood.back()},
                      {"final_objective", t.objective.back()}});
  }
  j = {{"config", model.config},
       {"log_likelihood", model.log_likelihood},
       {"objective", model.objective},
       {"best_restart", model.best_restart},
       {"items", std::move(items)},
       {"annotators", std::move(annotators)},
       {"restarts", std::move(traces)}};
}

}  // namespace argq
