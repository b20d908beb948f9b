// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "breakage/detector.hpp"
#include "breakage/experience.hpp"
#include "breakage/scenario.hpp"

namespace breakage::scorer {

// Axis weights; they sum to 1 so the composite lands in [0, 1].
inline constexpr double kWeightDetected = 0.20;
inline constexpr double kWeightDiagnosed = 0.30;
inline constexpr double kWeightFixed = 0.30;
inline constexpr double kWeightNoRegressions = 0.20;
inline constexpr double kNearMissFactor = 0.35;
inline constexpr double kRetrievalUsedThreshold = 0.80;
static_assert(kWeightDetected + kWeightDiagnosed + kWeightFixed + kWeightNoRegressions == 1.0);

struct ScoreResult {
  int detected = 0;
  double diagnosis_credit = 0.0;  // {0, 0.35, 1.0}
  int fixed = 0;
  int no_regressions = 0;
  double composite = 0.0;
  bool retrieval_used = false;
  bool channel_disagreement = false;
  bool framework_error = false;
};

double composite_of(int detected, double diagnosis_credit, int fixed, int no_regressions);

// Full credit on an exact primary match; near-miss credit when the pick
// appears in the ground truth's secondaries or vice versa; zero otherwise
// (including out-of-vocabulary picks, which match nothing).
double diagnosis_credit(const scenario::CategoryId& pm_primary,
                        const std::vector<scenario::CategoryId>& pm_secondaries,
                        const scenario::GroundTruth& truth);

// Asymmetric containment: fraction of the exemplar's tool set covered by the
// agent's tool set. Empty exemplar set is 0 by convention.
double containment(const std::vector<scenario::ToolName>& agent_actions,
                   const std::vector<scenario::ToolName>& exemplar_actions);

bool retrieval_used(const std::vector<scenario::ToolName>& agent_actions,
                    const std::vector<experience::Retrieved>& retrieved,
                    double threshold = kRetrievalUsedThreshold);

// True when the last mid-investigation hypothesis disagrees with the final
// diagnosis and the two categories are not a declared cause/effect pair.
bool detect_channel_disagreement(const std::vector<experience::HypothesisRecord>& hypotheses,
                                 const scenario::CategoryId& pm_primary,
                                 const scenario::Vocabulary& vocab);

experience::Outcome outcome_label(const ScoreResult& score);

// What the scorer needs from a finished run.
struct RunOutput {
  std::vector<experience::HypothesisRecord> hypotheses;
  std::vector<scenario::ToolName> actions;  // tool names in call order
  scenario::CategoryId pm_primary;
  std::vector<scenario::CategoryId> pm_secondaries;
  bool postmortem_missing = false;  // synthesized no-postmortem marker
  bool framework_error = false;
};

ScoreResult score_run(const RunOutput& run, const detector::DetectorVerdict& verdict,
                      const scenario::ScenarioSpec& spec, const scenario::Vocabulary& vocab,
                      const std::vector<experience::Retrieved>& retrieved);

}  // namespace breakage::scorer
