// SPDX-License-Identifier: Apache-2.0

#include "breakage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace breakage::stats {

SampleSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::BadArity, "summarize needs at least one value");
  SampleSummary s;
  s.n = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta via continued fraction (modified Lentz).
// ---------------------------------------------------------------------------

namespace {

double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  // Continued fraction converges fastest for x < (a+1)/(a+b+2).
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_p_two_tailed(double t, double df) {
  if (df <= 0.0) return 1.0;
  double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

WelchResult welch_t(const SampleSummary& a, const SampleSummary& b) {
  WelchResult r;
  r.delta = a.mean - b.mean;
  double va = a.sd * a.sd / a.n;
  double vb = b.sd * b.sd / b.n;
  double se2 = va + vb;
  if (se2 <= 0.0) {
    if (r.delta == 0.0) {
      r.t = 0.0;
      r.df = static_cast<double>(a.n + b.n - 2);
      r.p_two_tailed = 1.0;
    } else {
      std::fprintf(stderr,
                   "warning: both arms have zero variance with differing means; p=0 convention\n");
      r.t = r.delta > 0 ? HUGE_VAL : -HUGE_VAL;
      r.df = static_cast<double>(a.n + b.n - 2);
      r.p_two_tailed = 0.0;
    }
    r.significant = r.p_two_tailed < kAlpha;
    return r;
  }
  r.t = r.delta / std::sqrt(se2);
  double denom = 0.0;
  if (a.n > 1 && va > 0.0) denom += va * va / (a.n - 1);
  if (b.n > 1 && vb > 0.0) denom += vb * vb / (b.n - 1);
  r.df = denom > 0.0 ? se2 * se2 / denom : static_cast<double>(a.n + b.n - 2);
  r.p_two_tailed = t_p_two_tailed(r.t, r.df);
  r.significant = r.p_two_tailed < kAlpha;
  return r;
}

WelchResult pooled_compare(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& per_scenario) {
  if (per_scenario.empty()) throw Error(ErrorKind::BadArity, "pooled_compare needs scenarios");
  std::vector<double> a, b;
  for (const auto& [va, vb] : per_scenario) {
    a.insert(a.end(), va.begin(), va.end());
    b.insert(b.end(), vb.begin(), vb.end());
  }
  return welch_t(summarize(a), summarize(b));
}

std::string verdict_to_string(Verdict v) {
  switch (v) {
    case Verdict::Continue: return "Continue";
    case Verdict::ShipLimited: return "ShipLimited";
    case Verdict::Pivot: return "Pivot";
  }
  return "?";
}

DecisionOutcome decide(const std::vector<WelchResult>& per_scenario, const WelchResult& pooled) {
  if (per_scenario.size() != 3)
    throw Error(ErrorKind::BadArity, "decision matrix is defined over exactly 3 scenarios");
  DecisionOutcome out;
  out.per_scenario = per_scenario;
  out.pooled = pooled;
  int significant_positive = 0;
  for (const auto& r : per_scenario)
    if (r.significant && r.delta > 0.0) significant_positive += 1;
  if (significant_positive >= 2)
    out.verdict = Verdict::Continue;
  else if (significant_positive == 0 && pooled.delta <= 0.0)
    out.verdict = Verdict::Pivot;
  else
    out.verdict = Verdict::ShipLimited;
  return out;
}

namespace {

std::optional<Stratum> stratum_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  auto s = summarize(values);
  Stratum st;
  st.n = s.n;
  st.mean = s.mean;
  st.se = s.n > 1 ? s.sd / std::sqrt(static_cast<double>(s.n)) : 0.0;
  return st;
}

}  // namespace

BiasAudit bias_audit(const std::vector<AuditRow>& rows, const std::string& treatment_arm,
                     const std::string& control_arm) {
  std::vector<double> used, unused, treat, control;
  for (const auto& row : rows) {
    if (row.framework_error) continue;
    if (row.arm == treatment_arm) {
      treat.push_back(row.composite);
      (row.retrieval_used ? used : unused).push_back(row.composite);
    } else if (row.arm == control_arm) {
      control.push_back(row.composite);
    }
  }
  BiasAudit audit;
  audit.treatment_used = stratum_of(used);
  audit.treatment_unused = stratum_of(unused);
  audit.treatment_all = stratum_of(treat);
  audit.control_all = stratum_of(control);
  if (audit.treatment_used && audit.treatment_unused)
    audit.observational_delta = audit.treatment_used->mean - audit.treatment_unused->mean;
  if (audit.treatment_all && audit.control_all)
    audit.controlled_delta = audit.treatment_all->mean - audit.control_all->mean;
  if (audit.observational_delta && audit.controlled_delta) {
    audit.gap = *audit.observational_delta - *audit.controlled_delta;
    double var = audit.treatment_used->se * audit.treatment_used->se +
                 audit.treatment_unused->se * audit.treatment_unused->se +
                 audit.treatment_all->se * audit.treatment_all->se +
                 audit.control_all->se * audit.control_all->se;
    audit.gap_se = std::sqrt(var);
  }
  return audit;
}

std::vector<SubsampleSpread> small_sample_report(const std::vector<double>& values,
                                                 const std::vector<int>& subsample_sizes,
                                                 int trials, std::uint64_t seed) {
  for (int size : subsample_sizes)
    if (size <= 0 || size > static_cast<int>(values.size()))
      throw Error(ErrorKind::BadArity, "subsample size out of range: " + std::to_string(size));

  Rng rng(seed);
  std::vector<SubsampleSpread> report;
  std::vector<size_t> indices(values.size());
  for (int size : subsample_sizes) {
    std::vector<double> means;
    means.reserve(trials);
    for (int trial = 0; trial < trials; ++trial) {
      std::iota(indices.begin(), indices.end(), 0);
      double sum = 0.0;
      // Partial Fisher-Yates: the first `size` slots become the draw.
      for (int i = 0; i < size; ++i) {
        size_t j = i + static_cast<size_t>(rng.next_below(indices.size() - i));
        std::swap(indices[i], indices[j]);
        sum += values[indices[i]];
      }
      means.push_back(sum / size);
    }
    auto s = summarize(means);
    report.push_back({size, s.sd});
  }
  return report;
}

}  // namespace breakage::stats
