#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kmrates/certificates.hpp"
#include "kmrates/checked.hpp"
#include "kmrates/engine.hpp"
#include "kmrates/operators.hpp"
#include "kmrates/schedule.hpp"
#include "kmrates/space.hpp"

namespace kmrates {

/// An invalid or inconsistent configuration document.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct SpaceConfig {
  std::size_t dim = 2;
  std::string norm = "euclidean";  // euclidean | lp
  double p = 2.0;
  bool operator==(const SpaceConfig &) const = default;
};

struct OperatorConfig {
  std::string name = "identity";
  nlohmann::json params = nlohmann::json::object();
  bool operator==(const OperatorConfig &) const = default;
};

struct PointEdit {
  Nat n = 0;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool operator==(const PointEdit &) const = default;
};

struct ScheduleConfig {
  std::string family = "classical_km";
  nlohmann::json params = nlohmann::json::object();
  std::optional<Nat> b;
  std::optional<Nat> M_ab;
  std::optional<Nat> M_r;
  std::vector<PointEdit> points;
  bool operator==(const ScheduleConfig &) const = default;
};

struct CertificateConfig {
  std::string formula = "auto";
  std::optional<Nat> phi_override;  // constant rate, for negative controls
  std::optional<Nat> psi_override;
  bool operator==(const CertificateConfig &) const = default;
};

struct RunSection {
  std::optional<Nat> horizon;  // none = auto
  Nat k_max = 5;
  Nat liminf_max = 8;
  std::uint64_t seed = 0;
  Nat nonexpansive_samples = 1000;
  bool operator==(const RunSection &) const = default;
};

struct OutputConfig {
  std::string directory;
  std::vector<std::string> formats{"json"};
  bool operator==(const OutputConfig &) const = default;
};

/// One document fully determines a run.
struct RunConfig {
  SpaceConfig space;
  OperatorConfig op;
  std::vector<double> start;
  ScheduleConfig schedule;
  CertificateConfig certificate;
  RunSection run;
  OutputConfig output;
  bool operator==(const RunConfig &) const = default;
};

inline const std::vector<std::string> &schedule_family_names() {
  static const std::vector<std::string> names = {"classical_km", "example1", "example2", "anchor"};
  return names;
}

namespace detail {

inline void reject_unknown(const nlohmann::json &j, std::initializer_list<const char *> keys,
                           const std::string &where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto &item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get_or(const nlohmann::json &j, const char *key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

template <class T>
std::optional<T> get_opt(const nlohmann::json &j, const char *key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T>
void put_opt(nlohmann::json &j, const char *key, const std::optional<T> &v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json &j) {
  using namespace detail;
  RunConfig c;
  try {
    reject_unknown(j, {"space", "operator", "start", "schedule", "certificate", "run", "output"},
                   "config");
    if (j.contains("space")) {
      const auto &s = j.at("space");
      reject_unknown(s, {"dim", "norm", "p"}, "space");
      c.space.dim = get_or<std::size_t>(s, "dim", c.space.dim);
      c.space.norm = get_or<std::string>(s, "norm", c.space.norm);
      c.space.p = get_or<double>(s, "p", c.space.p);
    }
    if (j.contains("operator")) {
      const auto &o = j.at("operator");
      reject_unknown(o, {"name", "params"}, "operator");
      c.op.name = get_or<std::string>(o, "name", c.op.name);
      if (o.contains("params")) c.op.params = o.at("params");
    }
    if (j.contains("start")) c.start = j.at("start").get<std::vector<double>>();
    if (j.contains("schedule")) {
      const auto &s = j.at("schedule");
      reject_unknown(s, {"family", "params", "b", "M_ab", "M_r", "points"}, "schedule");
      c.schedule.family = get_or<std::string>(s, "family", c.schedule.family);
      if (s.contains("params")) c.schedule.params = s.at("params");
      c.schedule.b = get_opt<Nat>(s, "b");
      c.schedule.M_ab = get_opt<Nat>(s, "M_ab");
      c.schedule.M_r = get_opt<Nat>(s, "M_r");
      if (s.contains("points")) {
        for (const auto &p : s.at("points")) {
          reject_unknown(p, {"n", "alpha", "beta"}, "schedule.points[]");
          PointEdit e;
          e.n = p.at("n").get<Nat>();
          e.alpha = get_opt<double>(p, "alpha");
          e.beta = get_opt<double>(p, "beta");
          c.schedule.points.push_back(e);
        }
      }
    }
    if (j.contains("certificate")) {
      const auto &s = j.at("certificate");
      reject_unknown(s, {"formula", "phi_override", "psi_override"}, "certificate");
      c.certificate.formula = get_or<std::string>(s, "formula", c.certificate.formula);
      c.certificate.phi_override = get_opt<Nat>(s, "phi_override");
      c.certificate.psi_override = get_opt<Nat>(s, "psi_override");
    }
    if (j.contains("run")) {
      const auto &s = j.at("run");
      reject_unknown(s, {"horizon", "k_max", "liminf_max", "seed", "nonexpansive_samples"}, "run");
      if (s.contains("horizon") && !s.at("horizon").is_null()) {
        const auto &h = s.at("horizon");
        if (h.is_string()) {
          if (h.get<std::string>() != "auto") throw ConfigError("run.horizon must be a number or \"auto\"");
        } else {
          c.run.horizon = h.get<Nat>();
        }
      }
      c.run.k_max = get_or<Nat>(s, "k_max", c.run.k_max);
      c.run.liminf_max = get_or<Nat>(s, "liminf_max", c.run.liminf_max);
      c.run.seed = get_or<std::uint64_t>(s, "seed", c.run.seed);
      c.run.nonexpansive_samples = get_or<Nat>(s, "nonexpansive_samples", c.run.nonexpansive_samples);
    }
    if (j.contains("output")) {
      const auto &s = j.at("output");
      reject_unknown(s, {"directory", "formats"}, "output");
      c.output.directory = get_or<std::string>(s, "directory", c.output.directory);
      if (s.contains("formats")) c.output.formats = s.at("formats").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  if (c.space.dim == 0) throw ConfigError("space.dim must be >= 1");
  if (c.space.norm != "euclidean" && c.space.norm != "lp")
    throw ConfigError("space.norm must be \"euclidean\" or \"lp\"");
  if (c.start.empty()) c.start.assign(c.space.dim, 0.0);
  if (c.start.size() != c.space.dim) throw ConfigError("start has the wrong dimension");
  const auto &fams = schedule_family_names();
  if (std::find(fams.begin(), fams.end(), c.schedule.family) == fams.end())
    throw ConfigError("unknown schedule family '" + c.schedule.family + "'");
  if (c.certificate.formula != "auto" && !formula_tag_from_string(c.certificate.formula))
    throw ConfigError("unknown certificate formula '" + c.certificate.formula + "'");
  if (c.run.horizon && *c.run.horizon == 0) throw ConfigError("run.horizon must be >= 1");
  for (const auto &f : c.output.formats)
    if (f != "json" && f != "csv") throw ConfigError("output format must be json or csv");
  return c;
}

inline RunConfig parse_config(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// Canonical document with every field spelled out.
inline nlohmann::json serialize_config(const RunConfig &c) {
  using detail::put_opt;
  nlohmann::json j;
  j["space"] = {{"dim", c.space.dim}, {"norm", c.space.norm}, {"p", c.space.p}};
  j["operator"] = {{"name", c.op.name}, {"params", c.op.params}};
  j["start"] = c.start;
  nlohmann::json s = {{"family", c.schedule.family}, {"params", c.schedule.params}};
  put_opt(s, "b", c.schedule.b);
  put_opt(s, "M_ab", c.schedule.M_ab);
  put_opt(s, "M_r", c.schedule.M_r);
  s["points"] = nlohmann::json::array();
  for (const auto &e : c.schedule.points) {
    nlohmann::json p = {{"n", e.n}};
    put_opt(p, "alpha", e.alpha);
    put_opt(p, "beta", e.beta);
    s["points"].push_back(p);
  }
  j["schedule"] = s;
  nlohmann::json cert = {{"formula", c.certificate.formula}};
  put_opt(cert, "phi_override", c.certificate.phi_override);
  put_opt(cert, "psi_override", c.certificate.psi_override);
  j["certificate"] = cert;
  j["run"] = {{"horizon", c.run.horizon ? nlohmann::json(*c.run.horizon) : nlohmann::json("auto")},
              {"k_max", c.run.k_max},
              {"liminf_max", c.run.liminf_max},
              {"seed", c.run.seed},
              {"nonexpansive_samples", c.run.nonexpansive_samples}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j;
}

inline Space build_space(const RunConfig &c) {
  return c.space.norm == "euclidean" ? Space::euclidean(c.space.dim)
                                     : Space::lp(c.space.dim, c.space.p);
}

namespace detail {

inline Vector vector_param(const Space &space, const nlohmann::json &params, const char *key) {
  if (!params.contains(key)) return space.zero();
  const Vector v = vector_from_json(params.at(key), key);
  space.require_dim(v, key);
  return v;
}

}  // namespace detail

/// The schedule named by the config, with constant overrides and point edits
/// applied. Point edits turn the schedule into a Custom one.
inline Schedule build_schedule(const Space &space, const RunConfig &c) {
  const auto &p = c.schedule.params;
  const auto &fam = c.schedule.family;
  Schedule s;
  try {
    if (fam == "classical_km") {
      detail::reject_unknown(p, {"beta"}, "schedule.params");
      s = make_classical_km(space, detail::get_or<double>(p, "beta", 0.5));
    } else if (fam == "example1") {
      detail::reject_unknown(p, {"lambda", "L", "r_star"}, "schedule.params");
      s = make_example1(space, detail::get_or<double>(p, "lambda", 0.5),
                        detail::get_or<Nat>(p, "L", 1), detail::vector_param(space, p, "r_star"));
    } else if (fam == "example2") {
      detail::reject_unknown(p, {"lambda", "J", "L", "r_star"}, "schedule.params");
      s = make_example2(space, detail::get_or<double>(p, "lambda", 0.5),
                        detail::get_or<Nat>(p, "J", 2), detail::get_or<Nat>(p, "L", 1),
                        detail::vector_param(space, p, "r_star"));
    } else if (fam == "anchor") {
      detail::reject_unknown(p, {"lambda", "J", "u"}, "schedule.params");
      const Schedule base = make_example2(space, detail::get_or<double>(p, "lambda", 0.5),
                                          detail::get_or<Nat>(p, "J", 2), 1, space.zero());
      s = make_anchor(space, base, detail::vector_param(space, p, "u"));
    } else {
      throw ConfigError("unknown schedule family '" + fam + "'");
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("schedule.params: ") + e.what());
  }
  if (c.schedule.M_ab || c.schedule.M_r)
    s = with_constants(s, c.schedule.M_ab.value_or(s.M_ab), c.schedule.M_r.value_or(s.M_r));
  if (!c.schedule.points.empty()) {
    std::map<Nat, PointOverride> edits;
    for (const auto &e : c.schedule.points) edits[e.n] = PointOverride{e.alpha, e.beta};
    s = with_point_overrides(s, std::move(edits));
  }
  return s;
}

inline Instance build_instance(const RunConfig &c) {
  const Space space = build_space(c);
  Operator op = catalog_make(c.op.name, space, c.op.params);
  Schedule s = build_schedule(space, c);
  Vector x0(static_cast<Eigen::Index>(c.start.size()));
  for (std::size_t i = 0; i < c.start.size(); ++i) x0[static_cast<Eigen::Index>(i)] = c.start[i];
  return make_instance(space, std::move(op), std::move(s), std::move(x0), c.schedule.b);
}

/// The configured certificate, with constant-rate overrides applied last.
inline Certificate build_certificate(const Instance &inst, const RunConfig &c) {
  std::optional<FormulaTag> choice;
  if (c.certificate.formula != "auto") choice = formula_tag_from_string(c.certificate.formula);
  Certificate cert = make_certificate(inst.space, inst.schedule, inst.constants, choice);
  if (c.certificate.phi_override)
    cert.phi = RateFn::constant(*c.certificate.phi_override, RateKind::RateOfConvergence);
  if (c.certificate.psi_override)
    cert.psi = RateFn::constant(*c.certificate.psi_override, RateKind::RateOfConvergence);
  if (c.certificate.phi_override || c.certificate.psi_override) cert.cross_check.reset();
  return cert;
}

/// Rejects schedules leaving their admissible ranges on [0, horizon] or at
/// any explicitly edited index.
inline void validate_schedule(const Schedule &s, const RunConfig &c, Nat horizon) {
  Nat top = horizon;
  for (const auto &e : c.schedule.points) top = std::max(top, e.n);
  const auto bad = range_violations(s, top);
  if (!bad.empty())
    throw ConfigError("schedule invalid at n=" + std::to_string(bad.front().n) + ": " +
                      bad.front().what);
}

}  // namespace kmrates
