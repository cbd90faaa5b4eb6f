// kmrates: certify, run, verify and audit generalized Krasnoselskii-Mann
// iterations from a JSON config.

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "kmrates/kmrates.hpp"

namespace fs = std::filesystem;
using namespace kmrates;

namespace {

enum Exit : int {
  kOk = 0,
  kConfig = 2,
  kOverflow = 3,
  kNumeric = 4,
  kVerification = 5,
};

struct Flags {
  std::string config;
  std::string out;
  std::optional<Nat> k_max;
  std::optional<Nat> horizon;
  std::optional<std::uint64_t> seed;
  std::string format;
  std::optional<Nat> corrupt;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("kmrates");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char *env = std::getenv("KM_RATES_LOG"); env && *env)
    spdlog::cfg::helpers::load_levels(env);
}

RunConfig load_config(const Flags &f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  std::ifstream in(f.config);
  if (!in) throw ConfigError("cannot read config file " + f.config);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str());
  if (f.k_max) c.run.k_max = *f.k_max;
  if (f.horizon) {
    if (*f.horizon == 0) throw ConfigError("--horizon must be >= 1");
    c.run.horizon = *f.horizon;
  }
  if (f.seed) c.run.seed = *f.seed;
  if (!f.out.empty()) c.output.directory = f.out;
  if (!f.format.empty()) c.output.formats = {f.format};
  spdlog::info("config {} loaded: operator={}, family={}", f.config, c.op.name, c.schedule.family);
  return c;
}

bool wants(const RunConfig &c, const char *fmt) {
  for (const auto &f : c.output.formats)
    if (f == fmt) return true;
  return false;
}

/// Primary output format for stdout: the first configured one.
std::string primary_format(const RunConfig &c) {
  return c.output.formats.empty() ? "json" : c.output.formats.front();
}

void write_file(const RunConfig &c, const std::string &name, const std::string &content) {
  if (c.output.directory.empty()) return;
  fs::create_directories(c.output.directory);
  const fs::path path = fs::path(c.output.directory) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  spdlog::info("wrote {}", path.string());
}

void emit(const RunConfig &c, const nlohmann::json &report, const std::string &csv) {
  if (primary_format(c) == "csv" && !csv.empty())
    std::cout << csv;
  else
    std::cout << report.dump(2) << '\n';
}

struct Prepared {
  RunConfig config;
  Instance instance;
  Certificate certificate;
};

Prepared prepare(const Flags &f) {
  RunConfig c = load_config(f);
  Instance inst = build_instance(c);
  Certificate cert = build_certificate(inst, c);
  spdlog::info("constants b={} M0={} M={} M_ab={} M_r={}, formula={}", inst.constants.b,
               inst.constants.M0, inst.constants.M, inst.constants.M_ab, inst.constants.M_r,
               to_string(cert.tag));
  write_file(c, "config.json", serialize_config(c).dump(2) + "\n");
  return {std::move(c), std::move(inst), std::move(cert)};
}

int cmd_certify(const Flags &f) {
  const Prepared p = prepare(f);
  nlohmann::json rep = certificate_json(p.certificate, p.config.run.k_max);
  const std::string csv = certificate_csv(p.certificate, p.config.run.k_max);
  if (wants(p.config, "json")) write_file(p.config, "certificate.json", rep.dump(2) + "\n");
  if (wants(p.config, "csv")) write_file(p.config, "certificate.csv", csv);
  emit(p.config, rep, csv);
  return kOk;
}

struct RunResult {
  Nat horizon = 0;
  Trajectory trajectory;
  AuditReport audit;
  NonexpansiveReport nonexpansive;
};

RunResult execute(const Prepared &p, std::optional<Nat> corrupt = std::nullopt) {
  const RunConfig &c = p.config;
  RunResult r;
  r.horizon = c.run.horizon ? *c.run.horizon : auto_horizon(p.certificate, c.run.k_max);
  validate_schedule(p.instance.schedule, c, r.horizon);
  spdlog::info("horizon {}", r.horizon);
  r.nonexpansive = check_nonexpansive(p.instance.op, p.instance.space,
                                      std::max<Nat>(1, c.run.nonexpansive_samples), c.run.seed);
  if (!r.nonexpansive.ok())
    spdlog::warn("operator {} failed the sampled nonexpansiveness check", p.instance.op.tag);

  std::ofstream csv_out;
  IterateOptions opts;
  if (!c.output.directory.empty() && !corrupt) {
    fs::create_directories(c.output.directory);
    csv_out.open(fs::path(c.output.directory) / "trajectory.csv", std::ios::binary);
    if (!csv_out) throw Error("cannot write trajectory.csv");
    opts.csv = &csv_out;
  }
  r.trajectory = iterate(p.instance, r.horizon, opts);
  if (corrupt) {
    r.trajectory = corrupt_point(std::move(r.trajectory), p.instance.space, p.instance.op, *corrupt);
    if (!c.output.directory.empty()) {
      std::ostringstream os;
      write_trajectory_csv(os, r.trajectory);
      write_file(c, "trajectory.csv", os.str());
    }
  }
  r.audit = audit_inequalities(r.trajectory, p.instance.constants);
  if (!r.audit.ok())
    spdlog::warn("{} inequality violations, first at n={}", r.audit.violations.size(),
                 r.audit.violations.front().n);
  return r;
}

nlohmann::json run_json(const Prepared &p, const RunResult &r) {
  nlohmann::json j;
  j["space"] = p.instance.space.describe();
  j["operator"] = p.instance.op.tag;
  j["family"] = to_string(p.instance.schedule.family);
  j["horizon"] = r.horizon;
  j["constants"] = constants_json(p.instance.constants);
  j["streamed"] = r.trajectory.streamed();
  j["nonexpansive"] = {{"samples", r.nonexpansive.samples},
                       {"violations", r.nonexpansive.violations},
                       {"max_excess", r.nonexpansive.max_excess}};
  j["audit"] = audit_json(r.audit);
  return j;
}

int cmd_run(const Flags &f, bool audit_only) {
  const Prepared p = prepare(f);
  const RunResult r = execute(p, audit_only ? f.corrupt : std::nullopt);
  const nlohmann::json rep = run_json(p, r);
  write_file(p.config, "audit.json", rep.dump(2) + "\n");
  std::cout << rep.dump(2) << '\n';
  return r.audit.ok() && r.nonexpansive.ok() ? kOk : kVerification;
}

int cmd_verify(const Flags &f) {
  const Prepared p = prepare(f);
  const Nat k_max = p.config.run.k_max;
  const RunResult r = execute(p);
  const VerifyReport v = verify_certificate(r.trajectory, p.certificate, k_max,
                                            p.config.run.liminf_max);
  const HypothesisReport h = verify_hypotheses(p.instance.schedule, r.horizon, std::min<Nat>(k_max, 100));
  const bool cross_ok = cross_check_agrees(p.certificate, k_max);

  nlohmann::json rep = run_json(p, r);
  rep["certificate"] = certificate_json(p.certificate, k_max);
  rep["verification"] = verify_json(v);
  rep["hypotheses"] = {{"window", h.window},
                       {"range_violations", h.range_violations.size()},
                       {"sigma1", h.sigma1.all_pass},
                       {"sigma2", h.sigma2.ok()},
                       {"sigma2_window", h.sigma2_window},
                       {"sigma3", h.sigma3.all_pass},
                       {"M_ab", h.defect_bound_ok},
                       {"M_r", h.r_bound_ok},
                       {"ok", h.ok()}};
  const bool ok = v.ok() && r.audit.ok() && r.nonexpansive.ok() && h.ok() && cross_ok;
  rep["ok"] = ok;

  const std::string phi_csv = soundness_csv(v.phi);
  if (wants(p.config, "json")) write_file(p.config, "verify.json", rep.dump(2) + "\n");
  if (wants(p.config, "csv")) {
    write_file(p.config, "soundness_phi.csv", phi_csv);
    write_file(p.config, "soundness_psi.csv", soundness_csv(v.psi));
  }
  emit(p.config, rep, phi_csv);
  for (const auto &row : v.phi.rows)
    if (!row.truncated && !row.pass)
      spdlog::warn("res_T exceeds 1/(k+1) beyond Phi({})={} by {}", row.k, row.bound, row.max_excess);
  for (const auto &row : v.psi.rows)
    if (!row.truncated && !row.pass)
      spdlog::warn("res_step exceeds 1/(k+1) beyond Psi({})={} by {}", row.k, row.bound, row.max_excess);
  return ok ? kOk : kVerification;
}

int cmd_catalog() {
  nlohmann::json j;
  j["operators"] = catalog_names();
  j["schedules"] = schedule_family_names();
  nlohmann::json formulas = nlohmann::json::array({"auto"});
  for (auto t : {FormulaTag::General, FormulaTag::Factored, FormulaTag::Hilbert,
                 FormulaTag::InexactKM, FormulaTag::ClassicalKM, FormulaTag::Anchor,
                 FormulaTag::Example1, FormulaTag::Example2})
    formulas.push_back(to_string(t));
  j["formulas"] = formulas;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  setup_logging();
  CLI::App app{"Rate certificates for perturbed Krasnoselskii-Mann iterations"};
  app.require_subcommand(1);
  Flags flags;

  const auto add_common = [&flags](CLI::App *sub) {
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--k-max", flags.k_max, "Largest k to certify or verify");
    sub->add_option("--horizon", flags.horizon, "Iteration horizon (default: auto)");
    sub->add_option("--seed", flags.seed, "Seed for sampled checks");
    sub->add_option("--format", flags.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto *certify = app.add_subcommand("certify", "Tabulate Omega, Phi and Psi");
  auto *run = app.add_subcommand("run", "Iterate, write the trajectory and audit it");
  auto *verify = app.add_subcommand("verify", "Certify, run and check the certificates");
  auto *audit = app.add_subcommand("audit", "Iterate and report the inequality audit");
  auto *catalog = app.add_subcommand("catalog", "List operators, schedules and formulas");
  for (auto *sub : {certify, run, verify, audit}) add_common(sub);
  audit->add_option("--corrupt", flags.corrupt, "Move x_n by 1 before auditing (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (certify->parsed()) return cmd_certify(flags);
    if (run->parsed()) return cmd_run(flags, false);
    if (audit->parsed()) return cmd_run(flags, true);
    if (verify->parsed()) return cmd_verify(flags);
    if (catalog->parsed()) return cmd_catalog();
  } catch (const OverflowError &e) {
    spdlog::error("overflow: {}", e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kOverflow;
  } catch (const NumericAbort &e) {
    spdlog::error("numeric abort: {}", e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DomainError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
