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

// MACE (multi-annotator competence estimation) for binary labels.
//
// Generative story: item i has a latent label T_i ~ uniform{0,1}. For each
// annotation by annotator j a spam indicator S is drawn with P(S=0) = theta_j.
// When S = 0 the annotation copies T_i; otherwise it is drawn from the
// annotator's spam distribution xi_j over {0,1}.
//
// Parameters are fitted by EM. With smoothing_delta > 0 the M-step adds delta
// pseudo-counts to every expected count, which makes the procedure MAP-EM
// under Beta(1+delta, 1+delta) priors on theta_j and xi_j; the quantity that
// never decreases is then the smoothed objective
//
//   log_likelihood + delta * sum_j [log theta_j + log(1-theta_j)
//                                   + log xi_j0 + log xi_j1],
//
// which equals the log-likelihood when delta = 0.

#ifndef ARGQ_MACE_H_
#define ARGQ_MACE_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "argq/corpus.h"
#include "argq/scores.h"
#include "json.hpp"

namespace argq {

struct MaceConfig {
  int iterations = 50;
  int restarts = 10;
  double smoothing_delta = 0.1;
  // Relative change of the objective below which a restart stops.
  double convergence_tol = 1e-6;
  std::uint64_t seed = 0;

  // Throws Error(kValidation) on out-of-range values.
  void validate() const;
};

struct Observation {
  int item = 0;
  int annotator = 0;
  int label = 0;
};

// Index-based view of a binary annotation matrix.
struct LabelMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> annotator_ids;
  std::vector<Observation> observations;

  // Items are arguments with at least one annotation, in argument order;
  // annotators are sorted ids.
  static LabelMatrix from_annotations(const AnnotationSet& set);
};

struct RestartTrace {
  std::uint64_t seed = 0;
  // Value at the initial parameters, then after every EM update.
  std::vector<double> log_likelihood;
  std::vector<double> objective;
  bool converged = false;
};

struct MaceModel {
  std::vector<std::string> item_ids;
  std::vector<double> posteriors;  // P(T_i = 1 | annotations)
  std::vector<int> annotation_counts;
  std::vector<std::string> annotator_ids;
  std::vector<double> competence;                 // theta_j
  std::vector<std::array<double, 2>> spam;        // xi_j, sums to 1
  double log_likelihood = 0.0;
  double objective = 0.0;
  int best_restart = 0;
  MaceConfig config;
  std::vector<RestartTrace> traces;
};

// Throws Error(kValidation) for an empty matrix, labels outside {0,1},
// out-of-range indices or an invalid config.
MaceModel mace_fit(const LabelMatrix& data, const MaceConfig& config = {});
MaceModel mace_fit(const AnnotationSet& set, const MaceConfig& config = {});

// Positive-label posterior per item as a kMaceP score set.
QualityScores mace_posteriors(const MaceModel& model);

// Marginal log-likelihood of `data` under the model parameters, summing out
// latent labels and spam indicators. Throws Error(kValidation) when the
// model's items or annotators do not match the data.
double mace_log_likelihood(const LabelMatrix& data, const MaceModel& model);
double mace_log_likelihood(const AnnotationSet& set, const MaceModel& model);

void to_json(nlohmann::json& j, const MaceConfig& config);
void to_json(nlohmann::json& j, const MaceModel& model);

}  // namespace argq

#endif  // ARGQ_MACE_H_
