// SPDX-License-Identifier: Apache-2.0

#include "breakage/scorer.hpp"

#include <algorithm>
#include <set>

namespace breakage::scorer {

double composite_of(int detected, double diag, int fixed, int no_regressions) {
  return kWeightDetected * detected + kWeightDiagnosed * diag + kWeightFixed * fixed +
         kWeightNoRegressions * no_regressions;
}

double diagnosis_credit(const scenario::CategoryId& pm_primary,
                        const std::vector<scenario::CategoryId>& pm_secondaries,
                        const scenario::GroundTruth& truth) {
  if (pm_primary == truth.primary_category) return 1.0;
  const auto& truth_sec = truth.secondary_categories;
  if (std::find(truth_sec.begin(), truth_sec.end(), pm_primary) != truth_sec.end())
    return kNearMissFactor;
  if (std::find(pm_secondaries.begin(), pm_secondaries.end(), truth.primary_category) !=
      pm_secondaries.end())
    return kNearMissFactor;
  return 0.0;
}

double containment(const std::vector<scenario::ToolName>& agent_actions,
                   const std::vector<scenario::ToolName>& exemplar_actions) {
  std::set<scenario::ToolName> exemplar(exemplar_actions.begin(), exemplar_actions.end());
  if (exemplar.empty()) return 0.0;
  std::set<scenario::ToolName> agent(agent_actions.begin(), agent_actions.end());
  size_t covered = 0;
  for (const auto& tool : exemplar)
    if (agent.count(tool)) covered += 1;
  return static_cast<double>(covered) / static_cast<double>(exemplar.size());
}

bool retrieval_used(const std::vector<scenario::ToolName>& agent_actions,
                    const std::vector<experience::Retrieved>& retrieved, double threshold) {
  for (const auto& r : retrieved)
    if (containment(agent_actions, r.postmortem.actions_taken) >= threshold) return true;
  return false;
}

bool detect_channel_disagreement(const std::vector<experience::HypothesisRecord>& hypotheses,
                                 const scenario::CategoryId& pm_primary,
                                 const scenario::Vocabulary& vocab) {
  if (hypotheses.empty()) return false;
  const auto& last = hypotheses.back().category;
  if (last == pm_primary) return false;
  if (vocab.related(last, pm_primary)) return false;
  return true;
}

experience::Outcome outcome_label(const ScoreResult& score) {
  if (score.no_regressions == 0) return experience::Outcome::Regressed;
  if (score.fixed == 1 && !score.channel_disagreement) return experience::Outcome::Resolved;
  return experience::Outcome::Inconclusive;
}

ScoreResult score_run(const RunOutput& run, const detector::DetectorVerdict& verdict,
                      const scenario::ScenarioSpec& spec, const scenario::Vocabulary& vocab,
                      const std::vector<experience::Retrieved>& retrieved) {
  ScoreResult score;
  score.framework_error = run.framework_error;
  if (run.framework_error) return score;  // excluded from capability aggregates

  const auto& truth = spec.ground_truth;
  for (const auto& h : run.hypotheses) {
    bool matches = h.category == truth.primary_category ||
                   std::find(truth.secondary_categories.begin(),
                             truth.secondary_categories.end(),
                             h.category) != truth.secondary_categories.end();
    if (matches) {
      score.detected = 1;
      break;
    }
  }

  if (!run.postmortem_missing)
    score.diagnosis_credit = diagnosis_credit(run.pm_primary, run.pm_secondaries, truth);

  score.fixed = verdict.all_fixed ? 1 : 0;
  score.no_regressions = verdict.any_regressed ? 0 : 1;
  score.retrieval_used = retrieval_used(run.actions, retrieved);
  score.channel_disagreement =
      !run.postmortem_missing &&
      detect_channel_disagreement(run.hypotheses, run.pm_primary, vocab);
  score.composite =
      composite_of(score.detected, score.diagnosis_credit, score.fixed, score.no_regressions);
  return score;
}

}  // namespace breakage::scorer
