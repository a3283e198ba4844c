#pragma once

// The four surplus-sharing models: premia, retention, events, surplus splits,
// per-party payoff variables and machine-checked acceptability verdicts.
//
// Model 1: limited liability, government covers the excess at no cost.
// Model 2: full coverage through reinsurance priced by the insurer's own
//          utility; zero-profit outcome.
// Model 3: charged premia p_i ≥ π_i, the excess counts as capital and earns a
//          proportional surplus share.
// Model 4: direct insurer plus default-free reinsurer with utility ordering
//          u_i ≤ u_r ≤ u_0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "surplus/allocation.hpp"
#include "surplus/choquet.hpp"
#include "surplus/distortion.hpp"
#include "surplus/prob.hpp"
#include "surplus/retention.hpp"

namespace surplus {

struct Portfolio {
  ProbSpace space;
  std::vector<std::string> agents;
  std::vector<RandomVar> claims;
  double k0 = 0.0;
  std::optional<std::vector<double>> premia;  // charged p_i, Models 3-4
  Distortion f0 = Distortion::identity();     // insurer
  std::optional<Distortion> fr;               // reinsurer, Model 4
  std::vector<Distortion> fi;                 // one per agent

  std::size_t n_agents() const { return claims.size(); }
  RandomVar aggregate() const { return aggregate_sum(claims); }

  /// Model-independent invariants. Field paths match the portfolio-file schema.
  void validate_base() const {
    if (claims.empty()) throw std::invalid_argument("claims: at least one agent required");
    if (agents.size() != claims.size())
      throw std::invalid_argument("claims: agent name/claim count mismatch");
    for (std::size_t i = 0; i < claims.size(); ++i) {
      if (claims[i].size() != space.size())
        throw std::invalid_argument("claims." + agents[i] + ": expected one value per atom");
      if (!claims[i].nonnegative())
        throw std::invalid_argument("claims." + agents[i] + ": negative entry");
    }
    if (!(k0 >= 0.0)) throw std::invalid_argument("capital: must be nonnegative");
    if (auto r = f0.validate(); !r.ok)
      throw std::invalid_argument("utilities.insurer: " + r.issues.front());
    if (fr)
      if (auto r = fr->validate(); !r.ok)
        throw std::invalid_argument("utilities.reinsurer: " + r.issues.front());
    if (fi.size() != claims.size())
      throw std::invalid_argument("utilities.agents: one distortion per agent required");
    for (std::size_t i = 0; i < fi.size(); ++i)
      if (auto r = fi[i].validate(); !r.ok)
        throw std::invalid_argument("utilities.agents." + agents[i] + ": " + r.issues.front());
    if (premia) {
      if (premia->size() != claims.size())
        throw std::invalid_argument("premia: one entry per agent required");
      for (std::size_t i = 0; i < premia->size(); ++i)
        if (!std::isfinite((*premia)[i]))
          throw std::invalid_argument("premia." + agents[i] + ": non-finite");
    }
  }

  /// Ordering among the distortions actually present: f_i ≤ f_0 always, and
  /// f_i ≤ f_r ≤ f_0 once a reinsurer utility is declared.
  void validate_orderings() const {
    if (fr) {
      if (!utility_dominates(*fr, f0))
        throw std::invalid_argument("utilities.reinsurer: ordering f_r <= f_0 violated");
      for (std::size_t i = 0; i < fi.size(); ++i)
        if (!utility_dominates(fi[i], *fr))
          throw std::invalid_argument("utilities.agents." + agents[i] +
                                      ": ordering f_i <= f_r violated");
    }
    for (std::size_t i = 0; i < fi.size(); ++i)
      if (!utility_dominates(fi[i], f0))
        throw std::invalid_argument("utilities.agents." + agents[i] +
                                    ": ordering f_i <= f_0 violated");
  }

  /// Adds the per-model requirements: utility ordering, reinsurer presence,
  /// charged-premium presence. Premium floors are checked inside the runs
  /// because they depend on computed fair premia.
  void validate_for_model(int model) const {
    validate_base();
    if (model < 1 || model > 4) throw std::invalid_argument("model: must be 1..4");
    if (model == 4 && !fr)
      throw std::invalid_argument("utilities.reinsurer: required for model 4");
    if (model == 4) validate_orderings();
    else
      for (std::size_t i = 0; i < fi.size(); ++i)
        if (!utility_dominates(fi[i], f0))
          throw std::invalid_argument("utilities.agents." + agents[i] +
                                      ": ordering f_i <= f_0 violated");
    if ((model == 3 || model == 4) && !premia)
      throw std::invalid_argument("premia: required for model " + std::to_string(model));
  }
};

struct SurplusShares {
  double insurer = 1.0;
  std::vector<double> agents;
  bool degenerate = false;  // k0 = 0 and all capital inputs zero
};

struct Verdict {
  double utility = 0.0;
  double threshold = 0.0;
  double gap = 0.0;
  bool accepted = false;
};

inline Verdict make_verdict(double utility, double threshold) {
  Verdict v;
  v.utility = utility;
  v.threshold = threshold;
  v.gap = utility - threshold;
  v.accepted = v.gap >= -kValueTol;
  return v;
}

struct AgentAssessment {
  Verdict verdict;                         // u_i(position) vs u_i(−X_i)
  double premium_paid = 0.0;
  std::optional<double> sufficient_bound;  // −u_0(−X_i) (M3) / −u_r(−X_i) (M4)
  std::optional<bool> bound_holds;
  std::optional<double> premium_cap;       // −u_i(−X_i), M3
  std::optional<bool> cap_holds;
};

struct EventPartition {
  std::vector<std::size_t> A;  // claims exceed premium + capital
  std::vector<std::size_t> B;  // insurer loses part of the capital
  std::vector<std::size_t> C;  // surplus remains
};

/// Alternative premium-input/capital-input decomposition of the charged
/// premia in Model 4, advisory only: it reshuffles the surplus shares but
/// never changes R or the surplus variable.
struct AltSplit {
  std::vector<double> premium_inputs;    // E_Qr[X_i 1_{S>R}] + E_Q0[X_i 1_{S≤R}]
  std::vector<double> capital_inputs;    // p_i − premium_input_i
  double premium_inputs_total = 0.0;
  double total_required_premium = 0.0;   // E_Qr[(S−R)^+] + E_Q0[S∧R]
  bool all_nonnegative = false;
  std::optional<SurplusShares> shares;   // emitted only when all inputs ≥ 0
};

struct ModelReport {
  int model = 0;
  std::vector<std::string> agents;
  double k0 = 0.0;
  PremiumVector fair;                          // π_i under f_0
  std::optional<PremiumVector> fair_reins;     // π^r_i under f_r (Model 4)
  std::optional<std::vector<double>> charged;  // p_i
  std::optional<std::vector<double>> capital_inputs;
  std::optional<RetentionSolution> retention;
  std::optional<EventPartition> events;        // Model 1
  SurplusShares shares;
  RandomVar aggregate;
  RandomVar surplus;                  // distributable surplus variable
  RandomVar insurer_payoff;           // insurer's share of the surplus
  std::vector<RandomVar> agent_payoffs;  // λ_i·surplus − p_i (fair-premium models: −π_i)
  std::optional<RandomVar> government;   // Model 1 excess cover
  std::optional<RandomVar> reinsurer_net;  // ρ^R − (S−R)^+, Models 2-4
  Verdict insurer;
  std::vector<AgentAssessment> agent_assessments;
  std::optional<AltSplit> alt_split;  // Model 4
  double balance_residual = 0.0;        // max abs per-atom reconciliation error
  bool all_accepted = false;

  double charged_total() const {
    if (!charged) return fair.total;
    long double t = 0.0L;
    for (double p : *charged) t += p;
    return static_cast<double>(t);
  }
};

namespace detail {

/// Per-atom reconciliation: premia + capital + government inflow must equal
/// claims plus every party payoff (insurer surplus share, agent surplus
/// shares, reinsurer net).
inline double balance_residual(const Portfolio& pf, const ModelReport& report) {
  const RandomVar s = report.aggregate;
  const double sources_const = report.charged_total() + report.k0;
  double worst = 0.0;
  for (std::size_t w = 0; w < pf.space.size(); ++w) {
    long double sources = sources_const;
    if (report.government) sources += (*report.government)[w];
    long double uses = s[w];
    uses += report.insurer_payoff[w];
    for (std::size_t i = 0; i < report.agent_payoffs.size(); ++i) {
      // Agent payoffs carry −p_i for verdict purposes; the premium is already
      // a source, so only the surplus share counts as a flow.
      double share = report.agent_payoffs[i][w];
      if (report.charged) share += (*report.charged)[i];
      else share += report.fair.per_agent[i];
      uses += share;
    }
    if (report.reinsurer_net) uses += (*report.reinsurer_net)[w];
    worst = std::max(worst, std::fabs(static_cast<double>(sources - uses)));
  }
  return worst;
}

inline void finalize_verdict_summary(ModelReport& report) {
  report.all_accepted = report.insurer.accepted;
  for (const auto& a : report.agent_assessments)
    report.all_accepted = report.all_accepted && a.verdict.accepted;
}

/// Verdicts for agents charged exactly the fair premium: −π_i ≥ u_i(−X_i).
inline void fair_premium_agent_verdicts(const Portfolio& pf, ModelReport& report) {
  for (std::size_t i = 0; i < pf.n_agents(); ++i) {
    const double pi = report.fair.per_agent[i];
    const double baseline = choquet_utility(pf.space, pf.fi[i], -pf.claims[i]);
    AgentAssessment a;
    a.premium_paid = pi;
    a.verdict = make_verdict(-pi, baseline);
    report.agent_assessments.push_back(std::move(a));
    report.agent_payoffs.push_back(constant_var(pf.space.size(), -pi));
  }
}

inline SurplusShares proportional_shares(double k0, const std::vector<double>& capital_inputs) {
  SurplusShares shares;
  long double denom = k0;
  for (double c : capital_inputs) denom += c;
  if (static_cast<double>(denom) <= 0.0) {
    shares.insurer = 1.0;
    shares.agents.assign(capital_inputs.size(), 0.0);
    shares.degenerate = true;
    return shares;
  }
  shares.insurer = k0 / static_cast<double>(denom);
  shares.agents.reserve(capital_inputs.size());
  for (double c : capital_inputs) shares.agents.push_back(c / static_cast<double>(denom));
  return shares;
}

}  // namespace detail

/// Limited liability: the insurer keeps (π_0 + k_0 − S)^+, the government
/// absorbs (S − π_0 − k_0)^+ at no cost.
inline ModelReport model1_run(const Portfolio& pf) {
  pf.validate_for_model(1);
  ModelReport report;
  report.model = 1;
  report.agents = pf.agents;
  report.k0 = pf.k0;
  report.aggregate = pf.aggregate();
  report.fair = fair_premia(pf.space, pf.f0, pf.claims);

  const double pi0 = report.fair.total;
  const double cap_level = pi0 + pf.k0;
  const RandomVar& s = report.aggregate;

  EventPartition events;
  for (std::size_t w = 0; w < pf.space.size(); ++w) {
    if (s[w] > cap_level) events.A.push_back(w);
    else if (s[w] >= pi0) events.B.push_back(w);
    else events.C.push_back(w);
  }
  report.events = std::move(events);

  report.surplus = pos_part(shift(-s, cap_level));  // (π_0 + k_0 − S)^+
  report.insurer_payoff = report.surplus;
  report.government = excess(s, cap_level);
  report.shares = SurplusShares{};  // insurer keeps everything

  report.insurer = make_verdict(choquet_utility(pf.space, pf.f0, report.insurer_payoff), pf.k0);
  detail::fair_premium_agent_verdicts(pf, report);
  detail::finalize_verdict_summary(report);
  report.balance_residual = detail::balance_residual(pf, report);
  return report;
}

/// Full coverage via reinsurance priced by the insurer's own utility:
/// Φ(R) = k_0 under Q_0, surplus R − S∧R, zero-profit equality.
inline ModelReport model2_run(const Portfolio& pf) {
  pf.validate_for_model(2);
  ModelReport report;
  report.model = 2;
  report.agents = pf.agents;
  report.k0 = pf.k0;
  report.aggregate = pf.aggregate();
  report.fair = fair_premia(pf.space, pf.f0, pf.claims);

  const WorstCaseMeasure q0 = worst_case_measure(pf.space, pf.f0, report.aggregate);
  const RetentionSolution ret =
      solve_retention(RetentionProblem{pf.space, report.aggregate, q0.measure, pf.k0});
  report.retention = ret;

  const RandomVar& s = report.aggregate;
  report.surplus = pos_part(shift(-s, ret.R));  // R − S∧R
  report.insurer_payoff = report.surplus;
  report.reinsurer_net = shift(-excess(s, ret.R), ret.rho_R);
  report.shares = SurplusShares{};  // agents bear no risk, receive no surplus

  report.insurer = make_verdict(choquet_utility(pf.space, pf.f0, report.insurer_payoff), pf.k0);
  detail::fair_premium_agent_verdicts(pf, report);
  detail::finalize_verdict_summary(report);
  report.balance_residual = detail::balance_residual(pf, report);
  return report;
}

/// Charged premia p_i ≥ π_i; the excess p_i − π_i is a capital input earning
/// a proportional surplus share. Φ(R) = k_0 + Σ(p_i − π_i) under Q_0.
inline ModelReport model3_run(const Portfolio& pf) {
  pf.validate_for_model(3);
  ModelReport report;
  report.model = 3;
  report.agents = pf.agents;
  report.k0 = pf.k0;
  report.aggregate = pf.aggregate();
  report.fair = fair_premia(pf.space, pf.f0, pf.claims);

  const std::vector<double>& p = *pf.premia;
  std::vector<double> capital_inputs(pf.n_agents());
  for (std::size_t i = 0; i < pf.n_agents(); ++i) {
    capital_inputs[i] = p[i] - report.fair.per_agent[i];
    if (capital_inputs[i] < -kValueTol)
      throw std::invalid_argument("premia." + pf.agents[i] +
                                  ": below the fair premium floor");
  }
  report.charged = p;
  report.capital_inputs = capital_inputs;

  long double target = pf.k0;
  for (double c : capital_inputs) target += c;

  const WorstCaseMeasure q0 = worst_case_measure(pf.space, pf.f0, report.aggregate);
  const RetentionSolution ret = solve_retention(RetentionProblem{
      pf.space, report.aggregate, q0.measure, std::max(0.0, static_cast<double>(target))});
  report.retention = ret;

  const RandomVar& s = report.aggregate;
  report.surplus = pos_part(shift(-s, ret.R));  // (R − S)^+
  report.reinsurer_net = shift(-excess(s, ret.R), ret.rho_R);
  report.shares = detail::proportional_shares(pf.k0, capital_inputs);
  report.insurer_payoff = report.shares.insurer * report.surplus;

  report.insurer = make_verdict(choquet_utility(pf.space, pf.f0, report.insurer_payoff), pf.k0);
  for (std::size_t i = 0; i < pf.n_agents(); ++i) {
    AgentAssessment a;
    a.premium_paid = p[i];
    RandomVar position = shift(report.shares.agents[i] * report.surplus, -p[i]);
    report.agent_payoffs.push_back(position);
    const double baseline = choquet_utility(pf.space, pf.fi[i], -pf.claims[i]);
    a.verdict = make_verdict(choquet_utility(pf.space, pf.fi[i], position), baseline);
    a.sufficient_bound = -choquet_utility(pf.space, pf.f0, -pf.claims[i]);
    a.bound_holds = p[i] <= *a.sufficient_bound + kValueTol;
    a.premium_cap = -baseline;
    a.cap_holds = p[i] <= *a.premium_cap + kValueTol;
    report.agent_assessments.push_back(std::move(a));
  }
  detail::finalize_verdict_summary(report);
  report.balance_residual = detail::balance_residual(pf, report);
  return report;
}

/// Direct insurer plus default-free reinsurer: premium inputs π^r_i under Q_r,
/// Ψ(R) = k_0 + Σ(p_i − π^r_i) under Q_r, surplus k_0 + Σp − ρ^R − S∧R.
inline ModelReport model4_run(const Portfolio& pf) {
  pf.validate_for_model(4);
  ModelReport report;
  report.model = 4;
  report.agents = pf.agents;
  report.k0 = pf.k0;
  report.aggregate = pf.aggregate();
  report.fair = fair_premia(pf.space, pf.f0, pf.claims);
  report.fair_reins = fair_premia(pf.space, *pf.fr, pf.claims);

  const std::vector<double>& p = *pf.premia;
  std::vector<double> capital_inputs(pf.n_agents());
  for (std::size_t i = 0; i < pf.n_agents(); ++i) {
    capital_inputs[i] = p[i] - report.fair_reins->per_agent[i];
    if (capital_inputs[i] < -kValueTol)
      throw std::invalid_argument("premia." + pf.agents[i] +
                                  ": below the reinsurance premium floor");
  }
  report.charged = p;
  report.capital_inputs = capital_inputs;

  long double target = pf.k0;
  for (double c : capital_inputs) target += c;

  const WorstCaseMeasure qr = worst_case_measure(pf.space, *pf.fr, report.aggregate);
  const RetentionSolution ret = solve_retention(RetentionProblem{
      pf.space, report.aggregate, qr.measure, std::max(0.0, static_cast<double>(target))});
  report.retention = ret;

  const RandomVar& s = report.aggregate;
  const double funds = pf.k0 + report.charged_total() - ret.rho_R;
  report.surplus = shift(-cap(s, ret.R), funds);  // k_0 + Σp − ρ^R − S∧R, ≥ 0
  report.reinsurer_net = shift(-excess(s, ret.R), ret.rho_R);
  report.shares = detail::proportional_shares(pf.k0, capital_inputs);
  report.insurer_payoff = report.shares.insurer * report.surplus;

  report.insurer = make_verdict(choquet_utility(pf.space, pf.f0, report.insurer_payoff), pf.k0);
  for (std::size_t i = 0; i < pf.n_agents(); ++i) {
    AgentAssessment a;
    a.premium_paid = p[i];
    RandomVar position = shift(report.shares.agents[i] * report.surplus, -p[i]);
    report.agent_payoffs.push_back(position);
    const double baseline = choquet_utility(pf.space, pf.fi[i], -pf.claims[i]);
    a.verdict = make_verdict(choquet_utility(pf.space, pf.fi[i], position), baseline);
    a.sufficient_bound = -choquet_utility(pf.space, *pf.fr, -pf.claims[i]);
    a.bound_holds = p[i] <= *a.sufficient_bound + kValueTol;
    report.agent_assessments.push_back(std::move(a));
  }

  // Alternative split of the charged premia.
  {
    const WorstCaseMeasure q0 = worst_case_measure(pf.space, pf.f0, s);
    AltSplit alt;
    const RandomVar above = indicator_gt(s, ret.R);
    long double pi_total = 0.0L;
    bool all_nonneg = true;
    for (std::size_t i = 0; i < pf.n_agents(); ++i) {
      const RandomVar hi = hadamard(pf.claims[i], above);
      const RandomVar lo = pf.claims[i] - hi;
      const double pi_alt = expectation(pf.space, hi, qr.measure) +
                            expectation(pf.space, lo, q0.measure);
      alt.premium_inputs.push_back(pi_alt);
      alt.capital_inputs.push_back(p[i] - pi_alt);
      pi_total += pi_alt;
      all_nonneg = all_nonneg && (p[i] - pi_alt >= -kValueTol);
    }
    alt.premium_inputs_total = static_cast<double>(pi_total);
    alt.total_required_premium =
        ret.rho_R + expectation(pf.space, cap(s, ret.R), q0.measure);
    alt.all_nonnegative = all_nonneg;
    if (all_nonneg) alt.shares = detail::proportional_shares(pf.k0, alt.capital_inputs);
    report.alt_split = std::move(alt);
  }

  detail::finalize_verdict_summary(report);
  report.balance_residual = detail::balance_residual(pf, report);
  return report;
}

struct SweepRow {
  double k0 = 0.0;
  double R = 0.0;
  double rho_R = 0.0;
  double lambda0 = 0.0;
  double insurer_utility = 0.0;
  double extra_return = 0.0;
  double return_ratio = 0.0;
  double identity_residual = 0.0;  // |u_0(λ_0 S_plus) − λ_0 E_Q0[(R−S)^+]|
  double extra_identity_residual = 0.0;  // extra return vs the measure-gap form
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool retention_monotone = true;
  bool utility_monotone = true;
};

/// Model-4 capital sensitivity sweep over an ascending positive k_0 grid.
inline SweepTable capital_sweep(const Portfolio& pf, const std::vector<double>& k0_grid) {
  if (!pf.fr) throw std::invalid_argument("utilities.reinsurer: required for a capital sweep");
  if (k0_grid.empty()) throw std::invalid_argument("capital_sweep: empty grid");
  for (std::size_t i = 0; i < k0_grid.size(); ++i) {
    if (!(k0_grid[i] > 0.0))
      throw std::invalid_argument("capital_sweep: grid entries must be positive");
    if (i > 0 && k0_grid[i] < k0_grid[i - 1])
      throw std::invalid_argument("capital_sweep: grid must be ascending");
  }
  Portfolio variant = pf;
  const RandomVar s = pf.aggregate();
  const WorstCaseMeasure q0 = worst_case_measure(pf.space, pf.f0, s);
  const WorstCaseMeasure qr = worst_case_measure(pf.space, *pf.fr, s);
  SweepTable table;
  for (double k0 : k0_grid) {
    variant.k0 = k0;
    const ModelReport report = model4_run(variant);
    SweepRow row;
    row.k0 = k0;
    row.R = report.retention->R;
    row.rho_R = report.retention->rho_R;
    row.lambda0 = report.shares.insurer;
    row.insurer_utility = report.insurer.utility;
    row.extra_return = row.insurer_utility - k0;
    row.return_ratio = row.extra_return / k0;
    const double direct =
        row.lambda0 * expectation(pf.space, pos_part(shift(-s, row.R)), q0.measure);
    row.identity_residual = std::fabs(row.insurer_utility - direct);
    // extra return = k0 (E_Qr[S∧R] − E_Q0[S∧R]) / (k0 + Σ(p − π^r)).
    const double gap = expectation(pf.space, cap(s, row.R), qr.measure) -
                       expectation(pf.space, cap(s, row.R), q0.measure);
    long double denom = k0;
    for (double c : *report.capital_inputs) denom += c;
    row.extra_identity_residual =
        std::fabs(row.extra_return - k0 * gap / static_cast<double>(denom));
    if (!table.rows.empty()) {
      table.retention_monotone = table.retention_monotone &&
                                 row.R >= table.rows.back().R - kValueTol;
      table.utility_monotone = table.utility_monotone &&
                               row.insurer_utility >= table.rows.back().insurer_utility - kValueTol;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace surplus
