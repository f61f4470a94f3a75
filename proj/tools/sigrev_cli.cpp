// sigrev: instance generation, pricing, LP solves, audits, dual bounds and experiments.
//
// Every subcommand reads its options from flags and, optionally, from a JSON object given with
// --config (keys are long option names without dashes). Flags win over the file.
// Exit status: 0 when every check of the run passes, 1 when a check fails, 2 on errors.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sigrev/sigrev.hpp"

using namespace sigrev;
using io::Json;

namespace {

struct Common {
  std::string out;
  double tol = 1e-7;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

void emit(const std::string& path, const Json& j) { emit(path, io::dump(j) + "\n"); }

bool is_profile(const Json& j) { return j.contains("grids"); }

ConstraintMode parse_mode(const std::string& ir, const std::string& pay, const std::string& ic) {
  ConstraintMode m;
  m.ir = ir == "interim" ? IrMode::Interim : IrMode::ExPost;
  m.payments = pay == "free" ? PaymentMode::Free : PaymentMode::NonNegative;
  m.ic = ic == "dsic" ? IcMode::DominantStrategy : IcMode::Bayesian;
  return m;
}

bool multi_passes(const MultiAuditReport& r, const ConstraintMode& mode, double tol) {
  if (r.max_feasibility_violation > tol) return false;
  const double ic = mode.ic == IcMode::Bayesian ? r.max_bic_violation_rel
                                                : std::max(r.max_dsic_violation_rel, r.max_bic_violation_rel);
  if (ic > tol || r.max_expost_ir_violation_rel > tol) return false;
  return mode.payments == PaymentMode::Free || r.min_payment >= -tol;
}

/// Turns a flat JSON object into "--key value" tokens placed ahead of the real arguments.
std::vector<std::string> config_tokens(const std::string& path) {
  std::vector<std::string> out;
  const Json j = io::read_file(path);
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) continue;  // experiment parameters are read separately
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back("--" + k);
      continue;
    }
    out.push_back("--" + k);
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      out.push_back(v.dump());
    }
  }
  return out;
}

std::string find_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") return argv[i + 1];
  }
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seller-signal pricing, BIC/DSIC mechanism LPs, dual revenue bounds"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option values (flags override)");

  Common c;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--out", c.out, "output file (default stdout)");
  };

  // gen
  std::string kind;
  double H = 1e6, eps = 1e-4, lift_eps = 1e-3;
  std::size_t points = 100, values = 200, signals = 4, n1 = 12, n2 = 12;
  int levels = 4;
  std::uint64_t seed = 1;
  std::string mass_mode = "mass", from;
  auto* gen = app.add_subcommand("gen", "generate an instance");
  gen->add_option("kind", kind, "example1 | example2 | regular | mixture | generic3x3 | two-bidder | regular-two-bidder | lift")
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "regular", "mixture", "generic3x3", "two-bidder",
                             "regular-two-bidder", "lift"}));
  gen->add_option("--H", H, "equal-revenue cap");
  gen->add_option("--eps", eps, "probability the signal reveals the value");
  gen->add_option("--points", points, "grid points (example1)");
  gen->add_option("--mode", mass_mode, "mass | quadrature (example1)")->check(CLI::IsMember({"mass", "quadrature"}));
  gen->add_option("--levels", levels, "levels m (example2)");
  gen->add_option("--seed", seed);
  gen->add_option("--values", values, "grid size (regular, mixture)");
  gen->add_option("--signals", signals, "signal count (regular, mixture)");
  gen->add_option("--n1", n1);
  gen->add_option("--n2", n2);
  gen->add_option("--from", from, "single-buyer instance to lift");
  gen->add_option("--lift-eps", lift_eps, "second bidder's value scale (lift)");
  common(gen);

  // drev
  std::string inst_path;
  auto* drev_cmd = app.add_subcommand("drev", "optimal public-signal prices, one CSV row per signal");
  drev_cmd->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  common(drev_cmd);

  // solve
  std::string ir = "expost", pay = "nonneg", ic = "bic";
  bool highest_only = false;
  auto* solve = app.add_subcommand("solve", "revenue-optimal mechanism LP");
  solve->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--ir", ir)->check(CLI::IsMember({"expost", "interim"}));
  solve->add_option("--payments", pay)->check(CLI::IsMember({"free", "nonneg"}));
  solve->add_option("--ic", ic)->check(CLI::IsMember({"bic", "dsic"}));
  solve->add_flag("--highest-only", highest_only, "allocate only to the highest bidder");
  common(solve);

  // audit
  std::string mech_path;
  auto* audit = app.add_subcommand("audit", "IC/IR/payment audit of a mechanism");
  audit->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  audit->add_option("mechanism", mech_path)->required()->check(CLI::ExistingFile);
  audit->add_option("--ir", ir)->check(CLI::IsMember({"expost", "interim"}));
  audit->add_option("--payments", pay)->check(CLI::IsMember({"free", "nonneg"}));
  audit->add_option("--ic", ic)->check(CLI::IsMember({"bic", "dsic"}));
  audit->add_option("--tol", c.tol, "relative tolerance for the pass verdict");
  common(audit);

  // bound
  double delta = 0.05;
  bool per_signal = false;
  auto* bound = app.add_subcommand("bound", "Lagrangian revenue bound against public pricing");
  bound->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  bound->add_option("--delta", delta, "slack on the 3x factor");
  bound->add_flag("--per-signal", per_signal, "include the per-signal terms");
  common(bound);

  // lookahead
  auto* look = app.add_subcommand("lookahead", "lookahead auction on a two-bidder profile");
  look->add_option("instance", inst_path)->required()->check(CLI::ExistingFile);
  look->add_option("--tol", c.tol, "tolerance for the DSIC/IR verdict");
  common(look);

  // experiment
  std::string exp_name, prefix;
  std::vector<std::string> params;
  auto* exp = app.add_subcommand("experiment", "run a named experiment; writes <prefix>.csv and <prefix>.json");
  exp->add_option("name", exp_name);
  exp->add_option("--seed", seed);
  exp->add_option("--output", prefix, "path prefix for the CSV and JSON reports");
  exp->add_option("-p,--param", params, "parameter override key=value (value is JSON)");
  exp->add_flag("--list", "print experiment names");

  try {
    config_path = find_config(argc, argv);
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!config_path.empty()) {
      // Config tokens go right after the subcommand name, so later user flags override them.
      const auto sub = std::find_if(args.begin(), args.end(),
                                    [&](const std::string& a) { return app.get_subcommand_no_throw(a) != nullptr; });
      if (sub != args.end() && *sub != "experiment") {
        const auto extra = config_tokens(config_path);
        args.insert(sub + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "sigrev: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      const MassMode mm = io::parse_mass_mode(mass_mode);
      if (kind == "example1") emit(c.out, io::to_json(example1_instance(H, eps, points, GridSpacing::Geometric, mm)));
      if (kind == "example2") emit(c.out, io::to_json(example2_instance(levels)));
      if (kind == "regular") emit(c.out, io::to_json(random_regular_instance(seed, values, signals)));
      if (kind == "mixture") emit(c.out, io::to_json(random_mixture_instance(seed, values, signals)));
      if (kind == "generic3x3") emit(c.out, io::to_json(random_generic_3x3(seed)));
      if (kind == "two-bidder") emit(c.out, io::to_json(random_two_bidder(seed, n1, n2)));
      if (kind == "regular-two-bidder") emit(c.out, io::to_json(random_regular_two_bidder(seed, n1, n2)));
      if (kind == "lift") {
        if (from.empty()) throw Error(ErrorCode::InvalidConfig, "lift needs --from");
        emit(c.out, io::to_json(lift_two_bidders(io::instance_from_json(io::read_file(from)), lift_eps)));
      }
      return 0;
    }

    if (*drev_cmd) {
      const auto inst = io::instance_from_json(io::read_file(inst_path));
      const auto rep = drev(inst);
      std::string csv = "signal,price,contribution\n";
      for (const auto& sp : rep.per_signal) {
        csv += sp.signal + "," + io::format_double(sp.price) + "," + io::format_double(sp.contribution) + "\n";
      }
      csv += "total,," + io::format_double(rep.total) + "\n";
      emit(c.out, csv);
      return 0;
    }

    if (*solve) {
      const Json j = io::read_file(inst_path);
      const auto mode = parse_mode(ir, pay, ic);
      LpOptions opts;
      opts.highest_only = highest_only;
      if (is_profile(j)) {
        const auto inst = io::profile_from_json(j);
        const auto sol = solve_multi_bidder(inst, mode, opts);
        emit(c.out, io::to_json(inst, sol, mode));
        return sol.status == LpStatus::Optimal ? 0 : 1;
      }
      const auto inst = io::instance_from_json(j);
      const auto sol = solve_single_buyer(inst, mode, opts);
      emit(c.out, io::to_json(inst, sol, mode));
      return sol.status == LpStatus::Optimal ? 0 : 1;
    }

    if (*audit) {
      const Json j = io::read_file(inst_path);
      Json mj = io::read_file(mech_path);
      if (mj.contains("mechanism")) mj = mj["mechanism"];  // accepts `solve` output directly
      const auto mode = parse_mode(ir, pay, ic);
      if (is_profile(j)) {
        const auto inst = io::profile_from_json(j);
        const auto rep = audit_multi(inst, io::multi_mechanism_from_json(inst, mj));
        Json out = io::to_json(rep);
        out["pass"] = multi_passes(rep, mode, c.tol);
        emit(c.out, out);
        return out["pass"].get<bool>() ? 0 : 1;
      }
      const auto inst = io::instance_from_json(j);
      const auto rep = audit_mechanism(inst, io::mechanism_from_json(inst, mj));
      Json out = io::to_json(rep);
      out["pass"] = passes(rep, mode, c.tol);
      emit(c.out, out);
      return out["pass"].get<bool>() ? 0 : 1;
    }

    if (*bound) {
      const auto inst = io::instance_from_json(io::read_file(inst_path));
      const auto rep = lagrangian_bound(inst, delta);
      Json out = io::to_json(rep);
      if (!per_signal) out.erase("per_signal");
      emit(c.out, out);
      return rep.all_hold ? 0 : 1;
    }

    if (*look) {
      const auto inst = io::profile_from_json(io::read_file(inst_path));
      const auto res = lookahead_auction(inst);
      const auto rep = audit_multi(inst, res.mechanism);
      Json out = io::to_json(res, inst);
      out["audit"] = io::to_json(rep);
      const bool ok = rep.max_dsic_violation_rel <= c.tol && rep.max_expost_ir_violation_rel <= c.tol &&
                      rep.max_feasibility_violation <= c.tol;
      out["pass"] = ok;
      emit(c.out, out);
      return ok ? 0 : 1;
    }

    if (*exp) {
      if (exp->count("--list") > 0) {
        for (const auto& n : experiment_names()) std::cout << n << "\n";
        return 0;
      }
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(io::read_file(config_path));
      if (!exp_name.empty()) cfg.name = exp_name;
      if (exp->count("--seed") > 0) cfg.seed = seed;
      if (!prefix.empty()) cfg.output = prefix;
      for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::InvalidConfig, "expected key=value, got " + kv);
        cfg.parameters[kv.substr(0, eq)] = io::parse(kv.substr(eq + 1));
      }
      if (cfg.name.empty()) throw Error(ErrorCode::InvalidConfig, "no experiment name");
      const auto rep = run_experiment(cfg);
      if (cfg.output.empty()) std::cout << rep.csv();
      std::cout << io::dump(rep.summary()) << "\n";
      return rep.all_pass ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "sigrev: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
