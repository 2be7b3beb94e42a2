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

#include "argq/reliability.h"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <utility>

#include "argq/errors.h"

namespace argq {

double cohen_kappa(std::span<const std::uint8_t> a,
                   std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kValidation, "kappa: sequences differ in length");
  }
  if (a.empty()) {
    throw Error(ErrorKind::kValidation, "kappa: empty sequences");
  }
  std::int64_t agree = 0, a1 = 0, b1 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 1 || b[i] > 1) {
      throw Error(ErrorKind::kValidation, "kappa: labels must be binary");
    }
    agree += a[i] == b[i];
    a1 += a[i];
    b1 += b[i];
  }
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  if (agree == n) return 1.0;
  // kappa = (p_o - p_e) / (1 - p_e), scaled by n^2 to stay in integers.
  const std::int64_t chance = a1 * b1 + (n - a1) * (n - b1);
  const std::int64_t n2 = n * n;
  if (chance == n2) {
    throw Error(ErrorKind::kNumerical, "kappa: undefined (chance agreement is 1)");
  }
  return static_cast<double>(agree * n - chance) / static_cast<double>(n2 - chance);
}

TestQuestionFilter filter_by_test_questions(const AnnotationSet& set,
                                            double max_fail_rate) {
  std::map<std::string, std::pair<int, int>> tally;  // (failed, asked)
  for (const AnnotationRecord& rec : set.records()) {
    if (!rec.is_test_question) continue;
    auto& [failed, asked] = tally[rec.annotator_id];
    ++asked;
    if (!rec.test_passed.value_or(false)) ++failed;
  }
  std::set<std::string> removed;
  for (const auto& [annotator, counts] : tally) {
    const double rate = static_cast<double>(counts.first) / counts.second;
    if (rate > max_fail_rate) removed.insert(annotator);
  }

  TestQuestionFilter out;
  out.removed.assign(removed.begin(), removed.end());
  if (removed.empty()) {
    out.kept = set;
    return out;
  }
  std::vector<AnnotationRecord> kept;
  kept.reserve(set.records().size());
  for (const AnnotationRecord& rec : set.records()) {
    if (!removed.contains(rec.annotator_id)) kept.push_back(rec);
  }
  out.kept = AnnotationSet(set.arguments(), std::move(kept));
  return out;
}

ReliabilityTable::ReliabilityTable(ReliabilityConfig config,
                                   std::map<std::string, AnnotatorReliability> entries)
    : config_(config), entries_(std::move(entries)) {}

const AnnotatorReliability* ReliabilityTable::find(const std::string& annotator_id) const {
  auto it = entries_.find(annotator_id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> ReliabilityTable::mean_eligible() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& [id, entry] : entries_) {
    if (entry.eligible && entry.annotator_rel) {
      sum += *entry.annotator_rel;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

int ReliabilityTable::eligible_count() const {
  return static_cast<int>(std::count_if(entries_.begin(), entries_.end(),
                                        [](const auto& e) { return e.second.eligible; }));
}

int ReliabilityTable::removed_count() const {
  return static_cast<int>(std::count_if(
      entries_.begin(), entries_.end(),
      [](const auto& e) { return e.second.removed_by_test_questions; }));
}

ReliabilityTable compute_reliability(const AnnotationSet& set,
                                     const ReliabilityConfig& config,
                                     std::span<const std::string> removed) {
  const std::vector<std::string>& ids = set.annotator_ids();
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < ids.size(); ++i) slot.emplace(ids[i], i);

  // Per annotator: (argument index, label) sorted by argument index.
  std::vector<std::vector<std::pair<std::size_t, std::uint8_t>>> judgments(ids.size());
  for (std::size_t a = 0; a < set.arguments().size(); ++a) {
    for (std::size_t r : set.records_of(a)) {
      const AnnotationRecord& rec = set.records()[r];
      const std::uint8_t label = config.channel == LabelChannel::kQuality
                                     ? rec.quality_label
                                     : static_cast<std::uint8_t>(rec.stance_label == Stance::kPro);
      judgments[slot.at(rec.annotator_id)].emplace_back(a, label);
    }
  }

  std::map<std::string, AnnotatorReliability> entries;
  std::vector<std::map<std::string, double>> kappas(ids.size());
  for (const auto& id : ids) entries[id];

  std::vector<std::uint8_t> la, lb;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      la.clear();
      lb.clear();
      const auto& ji = judgments[i];
      const auto& jj = judgments[j];
      std::size_t p = 0, q = 0;
      while (p < ji.size() && q < jj.size()) {
        if (ji[p].first < jj[q].first) {
          ++p;
        } else if (jj[q].first < ji[p].first) {
          ++q;
        } else {
          la.push_back(ji[p].second);
          lb.push_back(jj[q].second);
          ++p;
          ++q;
        }
      }
      if (la.empty()) continue;
      const int shared = static_cast<int>(la.size());
      entries[ids[i]].shared_counts[ids[j]] = shared;
      entries[ids[j]].shared_counts[ids[i]] = shared;
      if (shared < config.min_shared) continue;
      double kappa;
      try {
        kappa = cohen_kappa(la, lb);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNumerical) throw;
        continue;  // degenerate pair, left out of both averages
      }
      kappas[i][ids[j]] = kappa;
      kappas[j][ids[i]] = kappa;
    }
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    AnnotatorReliability& entry = entries[ids[i]];
    entry.qualifying_peers = static_cast<int>(kappas[i].size());
    entry.eligible = entry.qualifying_peers >= config.min_peers && entry.qualifying_peers > 0;
    if (entry.eligible) {
      double sum = 0.0;
      for (const auto& [peer, k] : kappas[i]) sum += k;
      entry.annotator_rel = sum / entry.qualifying_peers;
    }
  }
  for (const std::string& id : removed) {
    AnnotatorReliability& entry = entries[id];
    entry = AnnotatorReliability{};
    entry.removed_by_test_questions = true;
  }
  return ReliabilityTable(config, std::move(entries));
}

TaskStats task_stats(const AnnotationSet& set, const ReliabilityTable& table) {
  TaskStats stats;
  stats.task_average_kappa = table.mean_eligible();
  stats.eligible_annotators = table.eligible_count();

  ReliabilityConfig stance_config = table.config();
  stance_config.channel = LabelChannel::kStance;
  const ReliabilityTable stance_table = compute_reliability(set, stance_config);
  stats.stance_average_kappa = stance_table.mean_eligible();
  stats.stance_eligible_annotators = stance_table.eligible_count();

  if (!table.entries().empty()) {
    stats.removed_annotator_fraction =
        static_cast<double>(table.removed_count()) / table.entries().size();
  }
  return stats;
}

void to_json(nlohmann::json& j, const ReliabilityConfig& config) {
  j = {{"min_shared", config.min_shared},
       {"min_peers", config.min_peers},
       {"channel", config.channel == LabelChannel::kQuality ? "quality" : "stance"}};
}

void to_json(nlohmann::json& j, const ReliabilityTable& table) {
  nlohmann::json annotators = nlohmann::json::object();
  for (const auto& [id, e] : table.entries()) {
    nlohmann::json entry = {{"eligible", e.eligible},
                            {"removed_by_test_questions", e.removed_by_test_questions},
                            {"qualifying_peers", e.qualifying_peers},
                            {"shared_counts", e.shared_counts}};
    entry["annotator_rel"] =
        e.annotator_rel ? nlohmann::json(*e.annotator_rel) : nlohmann::json(nullptr);
    annotators[id] = std::move(entry);
  }
  j = {{"config", table.config()}, {"annotators", std::move(annotators)}};
}

void to_json(nlohmann::json& j, const TaskStats& stats) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = {{"task_average_kappa", opt(stats.task_average_kappa)},
       {"stance_average_kappa", opt(stats.stance_average_kappa)},
       {"removed_annotator_fraction", stats.removed_annotator_fraction},
       {"eligible_annotators", stats.eligible_annotators},
       {"stance_eligible_annotators", stats.stance_eligible_annotators}};
}

}  // namespace argq
