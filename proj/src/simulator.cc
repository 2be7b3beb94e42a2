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

#include "argq/simulator.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "argq/errors.h"
#include "argq/random.h"

namespace argq {

namespace {

enum Stream : std::uint64_t {
  kQualityStream = 1,
  kCompetenceStream,
  kAssignmentStream,
  kLabelStream,
  kTextStream,
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::kValidation, "simulator: " + message);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string padded(const char* prefix, int value, int width) {
  std::string digits_text = std::to_string(value);
  if (static_cast<int>(digits_text.size()) < width) {
    digits_text.insert(0, width - digits_text.size(), '0');
  }
  return prefix + digits_text;
}

int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

double draw_quality(const QualityDistribution& dist, Engine& rng) {
  if (const auto* u = std::get_if<UniformRange>(&dist)) return uniform(rng, u->lo, u->hi);
  if (const auto* b = std::get_if<BetaShape>(&dist)) return beta_draw(rng, b->a, b->b);
  return bernoulli(rng, std::get<BinaryQuality>(dist).p) ? 1.0 : 0.0;
}

std::vector<double> draw_competences(const SimConfig& config, Engine& rng) {
  std::vector<double> out;
  out.reserve(config.n_annotators);
  if (const auto* u = std::get_if<UniformRange>(&config.competence)) {
    for (int j = 0; j < config.n_annotators; ++j) out.push_back(uniform(rng, u->lo, u->hi));
  } else {
    for (const PointMass& m : std::get<std::vector<PointMass>>(config.competence)) {
      out.insert(out.end(), m.count, m.value);
    }
  }
  return out;
}

const char kFiller[] =
    " because the policy changes incentives for everyone involved and the"
    " long term effects on society outweigh the short term costs of acting now";

std::string synthetic_text(const std::string& id, std::size_t length) {
  std::string text = "argument " + id;
  while (text.size() < length) text += kFiller;
  text.resize(length);
  if (text.back() == ' ') text.back() = '.';
  return text;
}

// Balanced random assignment: annotators are dealt from a shuffled deck that
// is reshuffled whenever it runs out, skipping anyone already on the item.
class AnnotatorDealer {
 public:
  AnnotatorDealer(int annotators, Engine& rng) : n_(annotators), rng_(rng) {}

  std::vector<int> deal(int k) {
    std::vector<int> chosen;
    chosen.reserve(k);
    std::vector<int> deferred;
    while (static_cast<int>(chosen.size()) < k) {
      if (next_ >= deck_.size()) refill(deferred);
      const int a = deck_[next_++];
      if (std::find(chosen.begin(), chosen.end(), a) != chosen.end()) {
        deferred.push_back(a);
      } else {
        chosen.push_back(a);
      }
    }
    // Skipped annotators go back to the front of what remains.
    deck_.insert(deck_.begin() + static_cast<std::ptrdiff_t>(next_), deferred.begin(),
                 deferred.end());
    return chosen;
  }

 private:
  void refill(std::vector<int>& deferred) {
    std::vector<int> fresh(n_);
    std::iota(fresh.begin(), fresh.end(), 0);
    shuffle(fresh, rng_);
    deck_ = std::move(deferred);
    deferred.clear();
    deck_.insert(deck_.end(), fresh.begin(), fresh.end());
    next_ = 0;
  }

  int n_;
  Engine& rng_;
  std::vector<int> deck_;
  std::size_t next_ = 0;
};

}  // namespace

void SimConfig::validate() const {
  require(n_topics >= 1, "n_topics must be >= 1");
  require(args_per_topic >= 1, "args_per_topic must be >= 1");
  require(n_annotators >= 1, "n_annotators must be >= 1");
  require(annotations_per_argument >= 1, "annotations_per_argument must be >= 1");
  require(annotations_per_argument <= n_annotators,
          "annotations_per_argument (" + std::to_string(annotations_per_argument) +
              ") exceeds n_annotators (" + std::to_string(n_annotators) + ")");
  require(is_probability(positivity_bias), "positivity_bias must be in [0,1]");
  require(is_probability(spam_base_rate), "spam_base_rate must be in [0,1]");
  require(is_probability(stance_noise), "stance_noise must be in [0,1]");
  require(is_probability(test_question_rate), "test_question_rate must be in [0,1]");
  require(min_text_length >= 1 && min_text_length <= max_text_length,
          "text length bounds must satisfy 1 <= min <= max");

  if (const auto* u = std::get_if<UniformRange>(&competence)) {
    require(is_probability(u->lo) && is_probability(u->hi) && u->lo <= u->hi,
            "competence range must lie in [0,1]");
  } else {
    int total = 0;
    for (const PointMass& m : std::get<std::vector<PointMass>>(competence)) {
      require(is_probability(m.value), "competence values must be in [0,1]");
      require(m.count >= 0, "point mass counts must be >= 0");
      total += m.count;
    }
    require(total == n_annotators, "point mass counts must sum to n_annotators");
  }
  if (const auto* u = std::get_if<UniformRange>(&quality)) {
    require(is_probability(u->lo) && is_probability(u->hi) && u->lo <= u->hi,
            "quality range must lie in [0,1]");
  } else if (const auto* b = std::get_if<BetaShape>(&quality)) {
    require(b->a > 0.0 && b->b > 0.0, "beta shape parameters must be > 0");
  } else {
    require(is_probability(std::get<BinaryQuality>(quality).p),
            "binary quality probability must be in [0,1]");
  }
}

const ArgumentTruth* SimTruth::find_argument(const std::string& id) const {
  for (const auto& a : arguments) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

SimResult simulate_corpus(const SimConfig& config) {
  config.validate();
  Engine quality_rng(derive_seed(config.seed, kQualityStream));
  Engine competence_rng(derive_seed(config.seed, kCompetenceStream));
  Engine assignment_rng(derive_seed(config.seed, kAssignmentStream));
  Engine label_rng(derive_seed(config.seed, kLabelStream));
  Engine text_rng(derive_seed(config.seed, kTextStream));

  SimResult result;
  SimTruth& truth = result.truth;

  const int annotator_width = std::max(3, digits(config.n_annotators - 1));
  const std::vector<double> competences = draw_competences(config, competence_rng);
  for (int j = 0; j < config.n_annotators; ++j) {
    truth.annotators.push_back({padded("w", j, annotator_width), competences[j]});
  }

  const int topic_width = std::max(2, digits(config.n_topics - 1));
  const int arg_width = std::max(3, digits(config.args_per_topic - 1));
  std::vector<Argument> arguments;
  arguments.reserve(static_cast<std::size_t>(config.n_topics) * config.args_per_topic);
  for (int t = 0; t < config.n_topics; ++t) {
    const std::string topic = padded("topic-", t, topic_width);
    for (int a = 0; a < config.args_per_topic; ++a) {
      ArgumentTruth at;
      at.id = padded("t", t, topic_width) + padded("-a", a, arg_width);
      at.topic = topic;
      at.latent_quality = draw_quality(config.quality, quality_rng);
      at.adjusted_quality =
          config.positivity_bias + (1.0 - config.positivity_bias) * at.latent_quality;
      // Contributors write one supporting and one contesting argument.
      at.true_stance = a % 2 == 0 ? Stance::kPro : Stance::kCon;

      const std::size_t length = config.min_text_length +
                                 uniform_index(text_rng, config.max_text_length -
                                                             config.min_text_length + 1);
      Argument arg;
      arg.id = at.id;
      arg.text = synthetic_text(at.id, length);
      arg.topic = topic;
      arg.declared_stance = at.true_stance;
      arg.author = padded("c", a / 2, arg_width);
      arguments.push_back(std::move(arg));
      truth.arguments.push_back(std::move(at));
    }
  }

  std::vector<AnnotationRecord> records;
  records.reserve(arguments.size() * config.annotations_per_argument);
  AnnotatorDealer dealer(config.n_annotators, assignment_rng);
  for (const ArgumentTruth& at : truth.arguments) {
    for (int j : dealer.deal(config.annotations_per_argument)) {
      const double theta = truth.annotators[j].competence;
      AnnotationRecord rec;
      rec.annotator_id = truth.annotators[j].id;
      rec.argument_id = at.id;
      const bool attentive = bernoulli(label_rng, theta);
      const double p_positive = attentive ? at.adjusted_quality : config.spam_base_rate;
      rec.quality_label = bernoulli(label_rng, p_positive) ? 1 : 0;
      const bool flip = bernoulli(label_rng, config.stance_noise);
      rec.stance_label = flip ? (at.true_stance == Stance::kPro ? Stance::kCon : Stance::kPro)
                              : at.true_stance;
      rec.is_test_question = bernoulli(label_rng, config.test_question_rate);
      if (rec.is_test_question) rec.test_passed = rec.stance_label == at.true_stance;
      records.push_back(std::move(rec));
    }
  }
  result.annotations = AnnotationSet(std::move(arguments), std::move(records));
  return result;
}

PairwiseGold simulate_pairwise_gold(const SimTruth& truth,
                                    std::span<const ArgumentPair> pairs, int judges,
                                    double pair_noise, std::uint64_t seed) {
  require(judges >= 1, "judges per pair must be >= 1");
  require(is_probability(pair_noise), "pair_noise must be in [0,1]");
  std::unordered_map<std::string, double> quality;
  for (const auto& a : truth.arguments) quality.emplace(a.id, a.latent_quality);
  auto latent = [&](const std::string& id) {
    auto it = quality.find(id);
    if (it == quality.end()) {
      throw Error(ErrorKind::kNotFound, "simulator: unknown argument '" + id + "'");
    }
    return it->second;
  };

  PairwiseGold gold;
  for (const ArgumentPair& pair : pairs) {
    const double q1 = latent(pair.first);
    const double q2 = latent(pair.second);
    // One stream per pair, so a pair's gold does not depend on which other
    // pairs are being judged.
    Engine rng(derive_seed(seed, stable_hash(pair.first), stable_hash(pair.second)));
    int for_first = 0;
    for (int k = 0; k < judges; ++k) {
      bool picks_first;
      if (q1 == q2) {
        picks_first = bernoulli(rng, 0.5);
      } else {
        const bool correct = !bernoulli(rng, pair_noise);
        picks_first = (q1 > q2) == correct;
      }
      for_first += picks_first;
    }
    const int for_second = judges - for_first;
    GoldJudgment j;
    j.judges = judges;
    if (for_first != for_second) {
      j.preferred = for_first > for_second ? Preferred::kFirst : Preferred::kSecond;
    } else {
      j.preferred = bernoulli(rng, 0.5) ? Preferred::kFirst : Preferred::kSecond;
    }
    j.agreement = static_cast<double>(std::max(for_first, for_second)) / judges;
    gold.set(pair.first, pair.second, j);
  }
  return gold;
}

double expected_positive_rate(const SimConfig& config) {
  double mean_theta;
  if (const auto* u = std::get_if<UniformRange>(&config.competence)) {
    mean_theta = 0.5 * (u->lo + u->hi);
  } else {
    double sum = 0.0;
    int count = 0;
    for (const PointMass& m : std::get<std::vector<PointMass>>(config.competence)) {
      sum += m.value * m.count;
      count += m.count;
    }
    mean_theta = count > 0 ? sum / count : 0.0;
  }
  double mean_q;
  if (const auto* u = std::get_if<UniformRange>(&config.quality)) {
    mean_q = 0.5 * (u->lo + u->hi);
  } else if (const auto* b = std::get_if<BetaShape>(&config.quality)) {
    mean_q = b->a / (b->a + b->b);
  } else {
    mean_q = std::get<BinaryQuality>(config.quality).p;
  }
  const double mean_adjusted = config.positivity_bias + (1.0 - config.positivity_bias) * mean_q;
  return mean_theta * mean_adjusted + (1.0 - mean_theta) * config.spam_base_rate;
}

void to_json(nlohmann::json& j, const SimConfig& config) {
  nlohmann::json competence;
  if (const auto* u = std::get_if<UniformRange>(&config.competence)) {
    competence = {{"uniform", {u->lo, u->hi}}};
  } else {
    nlohmann::json masses = nlohmann::json::array();
    for (const PointMass& m : std::get<std::vector<PointMass>>(config.competence)) {
      masses.push_back({m.value, m.count});
    }
    competence = {{"point_masses", masses}};
  }
  nlohmann::json quality;
  if (const auto* u = std::get_if<UniformRange>(&config.quality)) {
    quality = {{"uniform", {u->lo, u->hi}}};
  } else if (const auto* b = std::get_if<BetaShape>(&config.quality)) {
    quality = {{"beta", {b->a, b->b}}};
  } else {
    quality = {{"binary", std::get<BinaryQuality>(config.quality).p}};
  }
  j = {{"n_topics", config.n_topics},
       {"args_per_topic", config.args_per_topic},
       {"n_annotators", config.n_annotators},
       {"annotations_per_argument", config.annotations_per_argument},
       {"competence", competence},
       {"quality", quality},
       {"positivity_bias", config.positivity_bias},
       {"spam_base_rate", config.spam_base_rate},
       {"stance_noise", config.stance_noise},
       {"test_question_rate", config.test_question_rate},
       {"min_text_length", config.min_text_length},
       {"max_text_length", config.max_text_length},
       {"seed", config.seed}};
}

void from_json(const nlohmann::json& j, SimConfig& config) {
  try {
    auto get = [&](const char* key, auto& field) {
      if (auto it = j.find(key); it != j.end()) it->get_to(field);
    };
    get("n_topics", config.n_topics);
    get("args_per_topic", config.args_per_topic);
    get("n_annotators", config.n_annotators);
    get("annotations_per_argument", config.annotations_per_argument);
    get("positivity_bias", config.positivity_bias);
    get("spam_base_rate", config.spam_base_rate);
    get("stance_noise", config.stance_noise);
    get("test_question_rate", config.test_question_rate);
    get("min_text_length", config.min_text_length);
    get("max_text_length", config.max_text_length);
    get("seed", config.seed);
    if (auto it = j.find("competence"); it != j.end()) {
      if (auto u = it->find("uniform"); u != it->end()) {
        config.competence = UniformRange{u->at(0).get<double>(), u->at(1).get<double>()};
      } else if (auto m = it->find("point_masses"); m != it->end()) {
        std::vector<PointMass> masses;
        for (const auto& e : *m) masses.push_back({e.at(0).get<double>(), e.at(1).get<int>()});
        config.competence = std::move(masses);
      } else {
        throw Error(ErrorKind::kValidation,
                    "simulator: competence needs 'uniform' or 'point_masses'");
      }
    }
    if (auto it = j.find("quality"); it != j.end()) {
      if (auto u = it->find("uniform"); u != it->end()) {
        config.quality = UniformRange{u->at(0).get<double>(), u->at(1).get<double>()};
      } else if (auto b = it->find("beta"); b != it->end()) {
        config.quality = BetaShape{b->at(0).get<double>(), b->at(1).get<double>()};
      } else if (auto p = it->find("binary"); p != it->end()) {
        config.quality = BinaryQuality{p->get<double>()};
      } else {
        throw Error(ErrorKind::kValidation,
                    "simulator: quality needs 'uniform', 'beta' or 'binary'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("simulator config: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const SimTruth& truth) {
  nlohmann::json arguments = nlohmann::json::array();
  for (const auto& a : truth.arguments) {
    arguments.push_back({{"id", a.id},
                         {"topic", a.topic},
                         {"latent_quality", a.latent_quality},
                         {"adjusted_quality", a.adjusted_quality},
                         {"true_stance", to_string(a.true_stance)}});
  }
  nlohmann::json annotators = nlohmann::json::array();
  for (const auto& a : truth.annotators) {
    annotators.push_back({{"id", a.id}, {"competence", a.competence}});
  }
  j = {{"arguments", std::move(arguments)}, {"annotators", std::move(annotators)}};
}

}  // namespace argq
