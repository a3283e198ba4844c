#pragma once

// Portfolio files and report serialization. One self-contained JSON document
// describes a scenario; reports come back as JSON, CSV (per-atom variables
// flattened into atom_<id> columns) or plain text. All numeric report output
// is fixed at 12 significant digits so identical inputs produce identical
// bytes.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "surplus/distortion.hpp"
#include "surplus/models.hpp"
#include "surplus/prob.hpp"

namespace surplus::io {

using json = nlohmann::ordered_json;

/// Accepts JSON numbers, decimal strings and exact fraction strings ("29/9").
inline double parse_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      const auto slash = s.find('/');
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
      }
      const double num = std::stod(s.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("bad numerator");
      const std::string den_str = s.substr(slash + 1);
      const double den = std::stod(den_str, &used);
      if (used != den_str.size()) throw std::invalid_argument("bad denominator");
      if (den == 0.0) throw std::invalid_argument("zero denominator");
      return num / den;
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ": cannot parse number '" + s + "'");
    }
  }
  throw std::invalid_argument(path + ": expected a number or numeric string");
}

inline std::vector<double> parse_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw std::invalid_argument(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Distortion parse_distortion(const json& j, const std::string& path) {
  if (!j.is_string()) throw std::invalid_argument(path + ": expected a distortion string");
  Distortion d = [&] {
    try {
      return Distortion::parse(j.get<std::string>());
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
  }();
  if (auto r = d.validate(); !r.ok)
    throw std::invalid_argument(path + ": " + r.issues.front());
  return d;
}

/// Schema: sections `space` (atoms + probs), `claims` (agent -> values),
/// `capital`, optional `premia`, `utilities` (insurer / optional reinsurer /
/// agents as one grammar string or a per-agent map).
inline Portfolio parse_portfolio(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("document: expected a JSON object");
  for (const char* key : {"space", "claims", "capital", "utilities"})
    if (!doc.contains(key))
      throw std::invalid_argument(std::string(key) + ": missing section");

  const json& jspace = doc["space"];
  if (!jspace.is_object() || !jspace.contains("atoms") || !jspace.contains("probs"))
    throw std::invalid_argument("space: expected {atoms, probs}");
  if (!jspace["atoms"].is_array()) throw std::invalid_argument("space.atoms: expected an array");
  std::vector<std::string> atoms;
  for (const auto& a : jspace["atoms"]) {
    if (!a.is_string()) throw std::invalid_argument("space.atoms: ids must be strings");
    atoms.push_back(a.get<std::string>());
  }
  std::vector<double> probs = parse_number_array(jspace["probs"], "space.probs");
  ProbSpace space = [&] {
    try {
      return ProbSpace(atoms, probs);
    } catch (const std::exception& e) {
      throw std::invalid_argument("space.probs: " + std::string(e.what()));
    }
  }();

  Portfolio pf{std::move(space), {}, {}, 0.0, std::nullopt, Distortion::identity(),
               std::nullopt, {}};

  const json& jclaims = doc["claims"];
  if (!jclaims.is_object() || jclaims.empty())
    throw std::invalid_argument("claims: expected a non-empty object of agent -> values");
  for (auto it = jclaims.begin(); it != jclaims.end(); ++it) {
    const std::string path = "claims." + it.key();
    std::vector<double> values = parse_number_array(it.value(), path);
    if (values.size() != pf.space.size())
      throw std::invalid_argument(path + ": expected one value per atom");
    pf.agents.push_back(it.key());
    try {
      pf.claims.emplace_back(std::move(values));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
  }

  pf.k0 = parse_number(doc["capital"], "capital");

  if (doc.contains("premia") && !doc["premia"].is_null()) {
    const json& jp = doc["premia"];
    if (!jp.is_object()) throw std::invalid_argument("premia: expected an object agent -> premium");
    std::vector<double> premia(pf.n_agents());
    std::vector<bool> seen(pf.n_agents(), false);
    for (auto it = jp.begin(); it != jp.end(); ++it) {
      auto pos = std::find(pf.agents.begin(), pf.agents.end(), it.key());
      if (pos == pf.agents.end())
        throw std::invalid_argument("premia." + it.key() + ": unknown agent");
      const auto idx = static_cast<std::size_t>(pos - pf.agents.begin());
      premia[idx] = parse_number(it.value(), "premia." + it.key());
      seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw std::invalid_argument("premia." + pf.agents[i] + ": missing entry");
    pf.premia = std::move(premia);
  }

  const json& jut = doc["utilities"];
  if (!jut.is_object() || !jut.contains("insurer"))
    throw std::invalid_argument("utilities.insurer: missing distortion");
  pf.f0 = parse_distortion(jut["insurer"], "utilities.insurer");
  if (jut.contains("reinsurer") && !jut["reinsurer"].is_null())
    pf.fr = parse_distortion(jut["reinsurer"], "utilities.reinsurer");
  if (!jut.contains("agents"))
    throw std::invalid_argument("utilities.agents: missing distortion(s)");
  const json& jag = jut["agents"];
  if (jag.is_string()) {
    pf.fi.assign(pf.n_agents(), parse_distortion(jag, "utilities.agents"));
  } else if (jag.is_object()) {
    pf.fi.assign(pf.n_agents(), Distortion::identity());
    std::vector<bool> seen(pf.n_agents(), false);
    for (auto it = jag.begin(); it != jag.end(); ++it) {
      auto pos = std::find(pf.agents.begin(), pf.agents.end(), it.key());
      if (pos == pf.agents.end())
        throw std::invalid_argument("utilities.agents." + it.key() + ": unknown agent");
      const auto idx = static_cast<std::size_t>(pos - pf.agents.begin());
      pf.fi[idx] = parse_distortion(it.value(), "utilities.agents." + it.key());
      seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw std::invalid_argument("utilities.agents." + pf.agents[i] + ": missing entry");
  } else {
    throw std::invalid_argument("utilities.agents: expected a string or an object");
  }

  pf.validate_base();
  pf.validate_orderings();
  return pf;
}

inline Portfolio load_portfolio(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw std::invalid_argument("cannot open input file '" + file_path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::invalid_argument("malformed JSON in '" + file_path + "': " + e.what());
  }
  return parse_portfolio(doc);
}

inline json portfolio_to_json(const Portfolio& pf) {
  json doc;
  doc["space"]["atoms"] = pf.space.atoms();
  doc["space"]["probs"] = pf.space.probs();
  json claims = json::object();
  for (std::size_t i = 0; i < pf.n_agents(); ++i) claims[pf.agents[i]] = pf.claims[i].values;
  doc["claims"] = std::move(claims);
  doc["capital"] = pf.k0;
  if (pf.premia) {
    json premia = json::object();
    for (std::size_t i = 0; i < pf.n_agents(); ++i) premia[pf.agents[i]] = (*pf.premia)[i];
    doc["premia"] = std::move(premia);
  }
  doc["utilities"]["insurer"] = pf.f0.to_string();
  if (pf.fr) doc["utilities"]["reinsurer"] = pf.fr->to_string();
  json agents = json::object();
  for (std::size_t i = 0; i < pf.n_agents(); ++i) agents[pf.agents[i]] = pf.fi[i].to_string();
  doc["utilities"]["agents"] = std::move(agents);
  return doc;
}

/// Report numbers carry 12 significant digits.
inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

inline double round_g12(double v) { return std::stod(format_g12(v)); }

inline json num(double v) { return json(round_g12(v)); }

inline json num_array(const std::vector<double>& vs) {
  json arr = json::array();
  for (double v : vs) arr.push_back(num(v));
  return arr;
}

inline json var_json(const RandomVar& x) { return num_array(x.values); }

inline json verdict_json(const Verdict& v) {
  json j;
  j["utility"] = num(v.utility);
  j["threshold"] = num(v.threshold);
  j["gap"] = num(v.gap);
  j["accepted"] = v.accepted;
  return j;
}

inline json agent_map(const std::vector<std::string>& agents, const std::vector<double>& vs) {
  json j = json::object();
  for (std::size_t i = 0; i < agents.size(); ++i) j[agents[i]] = num(vs[i]);
  return j;
}

inline json shares_json(const std::vector<std::string>& agents, const SurplusShares& s) {
  json j;
  j["insurer"] = num(s.insurer);
  j["agents"] = s.agents.empty() ? agent_map(agents, std::vector<double>(agents.size(), 0.0))
                                 : agent_map(agents, s.agents);
  j["degenerate"] = s.degenerate;
  return j;
}

inline json report_to_json(const ModelReport& r, const ProbSpace& space) {
  json j;
  j["model"] = r.model;
  j["agents"] = r.agents;
  j["capital"] = num(r.k0);

  json premia;
  premia["fair"] = agent_map(r.agents, r.fair.per_agent);
  premia["fair_total"] = num(r.fair.total);
  if (r.fair_reins) {
    premia["reinsurance_fair"] = agent_map(r.agents, r.fair_reins->per_agent);
    premia["reinsurance_fair_total"] = num(r.fair_reins->total);
  }
  if (r.charged) {
    premia["charged"] = agent_map(r.agents, *r.charged);
    premia["charged_total"] = num(r.charged_total());
  }
  if (r.capital_inputs) premia["capital_inputs"] = agent_map(r.agents, *r.capital_inputs);
  j["premia"] = std::move(premia);

  if (r.retention) {
    json ret;
    ret["R"] = num(r.retention->R);
    ret["pi_R"] = num(r.retention->pi_R);
    ret["rho_R"] = num(r.retention->rho_R);
    ret["segment"] = r.retention->segment;
    ret["exact"] = r.retention->exact;
    j["retention"] = std::move(ret);
  }

  if (r.events) {
    auto names = [&](const std::vector<std::size_t>& idx) {
      json arr = json::array();
      for (std::size_t w : idx) arr.push_back(space.atom(w));
      return arr;
    };
    j["events"]["A"] = names(r.events->A);
    j["events"]["B"] = names(r.events->B);
    j["events"]["C"] = names(r.events->C);
  }

  j["shares"] = shares_json(r.agents, r.shares);

  json vars;
  vars["aggregate"] = var_json(r.aggregate);
  vars["surplus"] = var_json(r.surplus);
  vars["insurer_payoff"] = var_json(r.insurer_payoff);
  if (r.government) vars["government"] = var_json(*r.government);
  if (r.reinsurer_net) vars["reinsurer_net"] = var_json(*r.reinsurer_net);
  json agent_vars = json::object();
  for (std::size_t i = 0; i < r.agents.size(); ++i)
    agent_vars[r.agents[i]] = var_json(r.agent_payoffs[i]);
  vars["agent_payoffs"] = std::move(agent_vars);
  j["variables"] = std::move(vars);

  json verdicts;
  verdicts["insurer"] = verdict_json(r.insurer);
  json agent_verdicts = json::object();
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const AgentAssessment& a = r.agent_assessments[i];
    json aj = verdict_json(a.verdict);
    aj["premium_paid"] = num(a.premium_paid);
    if (a.sufficient_bound) {
      aj["sufficient_bound"] = num(*a.sufficient_bound);
      aj["bound_holds"] = *a.bound_holds;
    }
    if (a.premium_cap) {
      aj["premium_cap"] = num(*a.premium_cap);
      aj["cap_holds"] = *a.cap_holds;
    }
    agent_verdicts[r.agents[i]] = std::move(aj);
  }
  verdicts["agents"] = std::move(agent_verdicts);
  j["verdicts"] = std::move(verdicts);

  if (r.alt_split) {
    json alt;
    alt["advisory_only"] = true;
    alt["premium_inputs"] = agent_map(r.agents, r.alt_split->premium_inputs);
    alt["premium_inputs_total"] = num(r.alt_split->premium_inputs_total);
    alt["capital_inputs"] = agent_map(r.agents, r.alt_split->capital_inputs);
    alt["total_required_premium"] = num(r.alt_split->total_required_premium);
    alt["all_capital_inputs_nonnegative"] = r.alt_split->all_nonnegative;
    if (r.alt_split->shares) alt["shares"] = shares_json(r.agents, *r.alt_split->shares);
    else alt["shares_suppressed"] = "negative capital input";
    j["alternative_split"] = std::move(alt);
  }

  j["balance_residual"] = num(r.balance_residual);
  j["all_accepted"] = r.all_accepted;
  return j;
}

inline json sweep_to_json(const SweepTable& t) {
  json j;
  json rows = json::array();
  for (const SweepRow& r : t.rows) {
    json row;
    row["k0"] = num(r.k0);
    row["R"] = num(r.R);
    row["rho_R"] = num(r.rho_R);
    row["lambda0"] = num(r.lambda0);
    row["insurer_utility"] = num(r.insurer_utility);
    row["extra_return"] = num(r.extra_return);
    row["return_ratio"] = num(r.return_ratio);
    row["identity_residual"] = num(r.identity_residual);
    row["extra_identity_residual"] = num(r.extra_identity_residual);
    rows.push_back(std::move(row));
  }
  j["sweep"] = std::move(rows);
  j["retention_monotone"] = t.retention_monotone;
  j["utility_monotone"] = t.utility_monotone;
  return j;
}

// --- CSV ---------------------------------------------------------------

inline void csv_var_row(std::ostringstream& out, const std::string& name, const RandomVar& x) {
  out << name;
  for (double v : x.values) out << ',' << format_g12(v);
  out << '\n';
}

inline std::string report_to_csv(const ModelReport& r, const ProbSpace& space) {
  std::ostringstream out;
  out << "model," << r.model << '\n';
  out << "scalar,value\n";
  out << "capital," << format_g12(r.k0) << '\n';
  out << "fair_total," << format_g12(r.fair.total) << '\n';
  for (std::size_t i = 0; i < r.agents.size(); ++i)
    out << "fair_" << r.agents[i] << ',' << format_g12(r.fair.per_agent[i]) << '\n';
  if (r.fair_reins) {
    out << "reinsurance_fair_total," << format_g12(r.fair_reins->total) << '\n';
    for (std::size_t i = 0; i < r.agents.size(); ++i)
      out << "reinsurance_fair_" << r.agents[i] << ','
          << format_g12(r.fair_reins->per_agent[i]) << '\n';
  }
  if (r.charged)
    for (std::size_t i = 0; i < r.agents.size(); ++i)
      out << "charged_" << r.agents[i] << ',' << format_g12((*r.charged)[i]) << '\n';
  if (r.retention) {
    out << "R," << format_g12(r.retention->R) << '\n';
    out << "pi_R," << format_g12(r.retention->pi_R) << '\n';
    out << "rho_R," << format_g12(r.retention->rho_R) << '\n';
  }
  out << "lambda_insurer," << format_g12(r.shares.insurer) << '\n';
  for (std::size_t i = 0; i < r.shares.agents.size(); ++i)
    out << "lambda_" << r.agents[i] << ',' << format_g12(r.shares.agents[i]) << '\n';
  if (r.events) {
    auto row = [&](const char* name, const std::vector<std::size_t>& idx) {
      out << name;
      for (std::size_t w : idx) out << ',' << space.atom(w);
      out << '\n';
    };
    row("event_A", r.events->A);
    row("event_B", r.events->B);
    row("event_C", r.events->C);
  }
  out << "variable";
  for (const std::string& atom : space.atoms()) out << ",atom_" << atom;
  out << '\n';
  csv_var_row(out, "aggregate", r.aggregate);
  csv_var_row(out, "surplus", r.surplus);
  csv_var_row(out, "insurer_payoff", r.insurer_payoff);
  if (r.government) csv_var_row(out, "government", *r.government);
  if (r.reinsurer_net) csv_var_row(out, "reinsurer_net", *r.reinsurer_net);
  for (std::size_t i = 0; i < r.agents.size(); ++i)
    csv_var_row(out, "payoff_" + r.agents[i], r.agent_payoffs[i]);
  out << "verdict,utility,threshold,gap,accepted\n";
  out << "insurer," << format_g12(r.insurer.utility) << ',' << format_g12(r.insurer.threshold)
      << ',' << format_g12(r.insurer.gap) << ',' << (r.insurer.accepted ? "true" : "false")
      << '\n';
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const Verdict& v = r.agent_assessments[i].verdict;
    out << r.agents[i] << ',' << format_g12(v.utility) << ',' << format_g12(v.threshold) << ','
        << format_g12(v.gap) << ',' << (v.accepted ? "true" : "false") << '\n';
  }
  out << "balance_residual," << format_g12(r.balance_residual) << '\n';
  out << "all_accepted," << (r.all_accepted ? "true" : "false") << '\n';
  return out.str();
}

inline std::string sweep_to_csv(const SweepTable& t) {
  std::ostringstream out;
  out << "k0,R,rho_R,lambda0,insurer_utility,extra_return,return_ratio,identity_residual,"
         "extra_identity_residual\n";
  for (const SweepRow& r : t.rows) {
    out << format_g12(r.k0) << ',' << format_g12(r.R) << ',' << format_g12(r.rho_R) << ','
        << format_g12(r.lambda0) << ',' << format_g12(r.insurer_utility) << ','
        << format_g12(r.extra_return) << ',' << format_g12(r.return_ratio) << ','
        << format_g12(r.identity_residual) << ',' << format_g12(r.extra_identity_residual)
        << '\n';
  }
  out << "retention_monotone," << (t.retention_monotone ? "true" : "false") << '\n';
  out << "utility_monotone," << (t.utility_monotone ? "true" : "false") << '\n';
  return out.str();
}

// --- text ---------------------------------------------------------------

inline std::string report_to_text(const ModelReport& r, const ProbSpace& space) {
  std::ostringstream out;
  out << "== Model " << r.model << " ==\n";
  out << "capital k0: " << format_g12(r.k0) << '\n';
  out << "fair premia:";
  for (std::size_t i = 0; i < r.agents.size(); ++i)
    out << ' ' << r.agents[i] << '=' << format_g12(r.fair.per_agent[i]);
  out << "  (total " << format_g12(r.fair.total) << ")\n";
  if (r.fair_reins) {
    out << "reinsurance fair premia:";
    for (std::size_t i = 0; i < r.agents.size(); ++i)
      out << ' ' << r.agents[i] << '=' << format_g12(r.fair_reins->per_agent[i]);
    out << "  (total " << format_g12(r.fair_reins->total) << ")\n";
  }
  if (r.charged) {
    out << "charged premia:";
    for (std::size_t i = 0; i < r.agents.size(); ++i)
      out << ' ' << r.agents[i] << '=' << format_g12((*r.charged)[i]);
    out << '\n';
  }
  if (r.retention)
    out << "retention R=" << format_g12(r.retention->R)
        << "  pi_R=" << format_g12(r.retention->pi_R)
        << "  rho_R=" << format_g12(r.retention->rho_R) << '\n';
  if (r.events) {
    auto row = [&](const char* name, const std::vector<std::size_t>& idx) {
      out << name << " = {";
      for (std::size_t k = 0; k < idx.size(); ++k)
        out << (k ? ", " : " ") << space.atom(idx[k]);
      out << (idx.empty() ? "}" : " }");
    };
    row("A", r.events->A);
    out << "  ";
    row("B", r.events->B);
    out << "  ";
    row("C", r.events->C);
    out << '\n';
  }
  out << "shares: insurer=" << format_g12(r.shares.insurer);
  for (std::size_t i = 0; i < r.shares.agents.size(); ++i)
    out << ' ' << r.agents[i] << '=' << format_g12(r.shares.agents[i]);
  if (r.shares.degenerate) out << "  [degenerate: no capital at risk]";
  out << '\n';
  out << "verdicts:\n";
  out << "  insurer: u0 = " << format_g12(r.insurer.utility)
      << (r.insurer.accepted ? " >= " : " <  ") << format_g12(r.insurer.threshold)
      << (r.insurer.accepted ? "  ACCEPT" : "  REJECT") << '\n';
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const AgentAssessment& a = r.agent_assessments[i];
    out << "  " << r.agents[i] << ": u_i = " << format_g12(a.verdict.utility)
        << (a.verdict.accepted ? " >= " : " <  ") << format_g12(a.verdict.threshold)
        << (a.verdict.accepted ? "  ACCEPT" : "  REJECT");
    if (a.sufficient_bound)
      out << "  (sufficient bound " << format_g12(*a.sufficient_bound)
          << (*a.bound_holds ? " holds" : " fails") << ")";
    out << '\n';
  }
  out << "balance residual: " << format_g12(r.balance_residual) << '\n';
  return out.str();
}

inline std::string sweep_to_text(const SweepTable& t) {
  std::ostringstream out;
  out << "k0            R             insurer_utility  extra_return   return_ratio\n";
  for (const SweepRow& r : t.rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-13.6g %-13.6g %-16.6g %-14.6g %-13.6g\n", r.k0, r.R,
                  r.insurer_utility, r.extra_return, r.return_ratio);
    out << line;
  }
  out << "retention monotone: " << (t.retention_monotone ? "yes" : "NO") << '\n';
  out << "insurer utility monotone: " << (t.utility_monotone ? "yes" : "NO") << '\n';
  return out.str();
}

}  // namespace surplus::io
