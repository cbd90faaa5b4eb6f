#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "kmrates/certificates.hpp"
#include "kmrates/engine.hpp"
#include "kmrates/verify.hpp"

namespace kmrates {

inline nlohmann::json constants_json(const InstanceConstants &c) {
  return {{"b", c.b}, {"M0", c.M0}, {"M", c.M}, {"M_ab", c.M_ab}, {"M_r", c.M_r}};
}

inline nlohmann::json certificate_json(const Certificate &cert, Nat k_max) {
  nlohmann::json j;
  j["formula_tag"] = to_string(cert.tag);
  j["modulus"] = cert.modulus;
  j["constants"] = constants_json(cert.constants);
  j["omega"] = cert.omega.description();
  j["phi"] = cert.phi.description();
  j["psi"] = cert.psi.description();
  j["liminf"] = cert.liminf.description();
  j["liminf_uses_factored_omega"] = cert.factored_liminf;
  auto &table = j["table"] = nlohmann::json::array();
  for (Nat k = 0; k <= k_max; ++k)
    table.push_back({{"k", k}, {"omega", cert.omega(k)}, {"phi", cert.phi(k)}, {"psi", cert.psi(k)}});
  if (cert.cross_check)
    j["cross_check"] = {{"route", cert.cross_check->route},
                        {"agrees", cross_check_agrees(cert, k_max)}};
  return j;
}

inline std::string certificate_csv(const Certificate &cert, Nat k_max) {
  std::string out = "k,omega,phi,psi\n";
  for (Nat k = 0; k <= k_max; ++k) {
    detail::append_number(out, k);
    out += ',';
    detail::append_number(out, cert.omega(k));
    out += ',';
    detail::append_number(out, cert.phi(k));
    out += ',';
    detail::append_number(out, cert.psi(k));
    out += '\n';
  }
  return out;
}

inline nlohmann::json audit_json(const AuditReport &rep) {
  nlohmann::json j;
  j["horizon"] = rep.horizon;
  j["tolerance"] = kAuditTol;
  j["ok"] = rep.ok();
  auto &per = j["inequalities"] = nlohmann::json::object();
  for (auto which : kAllInequalities)
    per[to_string(which)] = {{"checked", rep.checked[static_cast<std::size_t>(which)]},
                             {"violations", rep.count(which)}};
  auto &vs = j["violations"] = nlohmann::json::array();
  for (const auto &v : rep.violations)
    vs.push_back({{"inequality", to_string(v.which)},
                  {"n", v.n},
                  {"lhs", v.lhs},
                  {"rhs", v.rhs},
                  {"slack", v.slack()}});
  return j;
}

inline nlohmann::json soundness_json(const SoundnessReport &rep) {
  nlohmann::json j;
  j["quantity"] = to_string(rep.quantity);
  j["rate"] = rep.rate;
  j["ok"] = rep.ok();
  auto &rows = j["rows"] = nlohmann::json::array();
  for (const auto &r : rep.rows) {
    nlohmann::json row = {{"k", r.k},
                          {"bound", r.bound},
                          {"window", {r.bound, r.window_end}},
                          {"truncated", r.truncated}};
    if (!r.truncated) {
      row["max_excess"] = r.max_excess;
      row["pass"] = r.pass;
    }
    row["empirical_first_index"] =
        r.empirical_first_index ? nlohmann::json(*r.empirical_first_index) : nlohmann::json(nullptr);
    const auto slack = r.slack();
    row["slack_factor"] = slack ? nlohmann::json(*slack) : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  return j;
}

/// k, bound, empirical_first_index, max_excess, pass, truncated.
inline std::string soundness_csv(const SoundnessReport &rep) {
  std::string out = "k,bound,empirical_first_index,max_excess,pass,truncated\n";
  for (const auto &r : rep.rows) {
    detail::append_number(out, r.k);
    out += ',';
    detail::append_number(out, r.bound);
    out += ',';
    if (r.empirical_first_index) detail::append_number(out, *r.empirical_first_index);
    out += ',';
    if (!r.truncated) detail::append_number(out, r.max_excess);
    out += ',';
    out += r.truncated ? "" : (r.pass ? "true" : "false");
    out += ',';
    out += r.truncated ? "true" : "false";
    out += '\n';
  }
  return out;
}

inline nlohmann::json liminf_json(const LiminfReport &rep) {
  nlohmann::json j;
  j["modulus"] = rep.modulus;
  j["horizon"] = rep.horizon;
  j["ok"] = rep.ok();
  j["verified_cells"] = rep.verified_cells();
  auto &cells = j["cells"] = nlohmann::json::array();
  for (const auto &c : rep.cells) {
    nlohmann::json cell = {{"k", c.k}, {"L", c.L}, {"bound", c.bound}, {"truncated", c.truncated}};
    if (!c.truncated) cell["pass"] = c.pass;
    cell["witness"] = c.witness ? nlohmann::json(*c.witness) : nlohmann::json(nullptr);
    cells.push_back(cell);
  }
  return j;
}

inline nlohmann::json verify_json(const VerifyReport &rep) {
  nlohmann::json j;
  j["ok"] = rep.ok();
  j["phi"] = soundness_json(rep.phi);
  j["psi"] = soundness_json(rep.psi);
  j["psi_implication"] = {{"checked_k", rep.implication.checked_k},
                          {"failures", rep.implication.failures},
                          {"ok", rep.implication.ok()}};
  j["liminf"] = liminf_json(rep.liminf);
  if (rep.cross_phi) j["cross_check_phi"] = soundness_json(*rep.cross_phi);
  if (rep.cross_psi) j["cross_check_psi"] = soundness_json(*rep.cross_psi);
  return j;
}

}  // namespace kmrates
