// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "breakage/core.hpp"

namespace breakage::stats {

struct SampleSummary {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n-1 denominator)
};

// Mean and sample sd; n must be >= 1 (sd is 0 for a single value).
SampleSummary summarize(const std::vector<double>& values);

struct WelchResult {
  double delta = 0.0;  // treatment mean - control mean
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p_two_tailed = 1.0;
  bool significant = false;  // at alpha = 0.05
};

inline constexpr double kAlpha = 0.05;

// Unequal-variance two-sample t-test from summaries. One arm with sd=0 is
// fine (the standard error comes from the other arm). Both arms sd=0:
// equal means give t=0 p=1; unequal means give p=0 with a warning.
WelchResult welch_t(const SampleSummary& treatment, const SampleSummary& control);

// Concatenates raw per-run values across scenarios per arm, then tests.
WelchResult pooled_compare(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& per_scenario);

// Regularized incomplete beta I_x(a, b) by continued fraction (Lentz).
double incomplete_beta(double a, double b, double x);

// Two-tailed p for Student's t with df degrees of freedom.
double t_p_two_tailed(double t, double df);

enum class Verdict { Continue, ShipLimited, Pivot };

std::string verdict_to_string(Verdict v);

struct DecisionOutcome {
  Verdict verdict = Verdict::ShipLimited;
  std::vector<WelchResult> per_scenario;
  WelchResult pooled;
};

// Pre-registered decision rule over exactly three scenario results:
// Continue when >= 2 are significant positive; Pivot when none are and the
// pooled delta is <= 0; ShipLimited otherwise.
DecisionOutcome decide(const std::vector<WelchResult>& per_scenario, const WelchResult& pooled);

struct Stratum {
  int n = 0;
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

struct BiasAudit {
  // Within the treatment arm: runs that used retrieval vs runs that did not.
  std::optional<Stratum> treatment_used;
  std::optional<Stratum> treatment_unused;
  // Across arms, the controlled comparison.
  std::optional<Stratum> treatment_all;
  std::optional<Stratum> control_all;

  std::optional<double> observational_delta;
  std::optional<double> controlled_delta;
  std::optional<double> gap;     // observational - controlled
  std::optional<double> gap_se;  // propagated standard error of the gap
};

struct AuditRow {
  std::string arm;  // "tei" or "control" by runner convention
  bool retrieval_used = false;
  bool framework_error = false;
  double composite = 0.0;
};

// Observational-vs-controlled comparison. The observational delta contrasts
// treatment runs by whether retrieval was used; the controlled delta
// contrasts arms. framework-error rows are excluded. Empty strata stay
// absent rather than zero.
BiasAudit bias_audit(const std::vector<AuditRow>& rows, const std::string& treatment_arm = "tei",
                     const std::string& control_arm = "control");

struct SubsampleSpread {
  int subsample_size = 0;
  double se_of_mean = 0.0;  // empirical sd of the subsample mean
};

// Seeded resampling without replacement: for each size, draws `trials`
// subsamples and reports the empirical spread of the subsample mean.
std::vector<SubsampleSpread> small_sample_report(const std::vector<double>& values,
                                                 const std::vector<int>& subsample_sizes,
                                                 int trials, std::uint64_t seed);

}  // namespace breakage::stats
