#include "geodamage/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

#include "geodamage/io.hpp"

namespace geodamage {

namespace fs = std::filesystem;

namespace {

RunConfig configure(const CommandOptions& opt) {
  if (opt.config.empty()) throw ConfigError(0, "", "--config is required");
  RunConfig cfg = load_config(opt.config);
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

RunConfig configure_dir(const CommandOptions& opt, fs::path& dir) {
  dir = !opt.dir.empty() ? fs::path(opt.dir) : fs::path(opt.out);
  if (dir.empty()) throw ConfigError(0, "", "a trajectory directory is required");
  RunConfig cfg = load_config(opt.config.empty() ? dir / "config.cfg" : fs::path(opt.config));
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

void write_failure(const fs::path& dir, const std::string& what) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / "failure.txt");
  f << what << '\n';
}

std::string eps_dir(double eps) { return "eps_" + format_double(eps); }

template <class F>
int guarded(const fs::path& fail_dir, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InitialStateError& e) {
    write_failure(fail_dir, std::string(e.what()) + " (gap " + format_double(e.gap()) + ")");
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SolverFailure& e) {
    write_failure(fail_dir, e.what());
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

struct Bundle {
  FeSpace fe;
  IncrementalSolver solver;
  explicit Bundle(const RunConfig& cfg) : fe(cfg.make_space()), solver(fe, cfg.law, cfg.solver) {}
  Bundle(const Bundle&) = delete;
};

struct RescaleOutput {
  RescaledTrajectory rt;
  BvReport report;
};

RescaleOutput rescale_and_check(const Trajectory& traj, const RunConfig& cfg, const FeSpace& fe) {
  RescaleOutput r;
  r.rt = arclength_parametrize(traj, fe, cfg.rescale_intervals);
  detect_plateaus(r.rt, default_plateau_threshold(r.rt));
  r.report = check_bv_conditions(r.rt, cfg.law, fe);
  return r;
}

}  // namespace

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(opt.out.empty() ? fs::path("out") : fs::path(opt.out), err, [&] {
    const RunConfig cfg = configure(opt);
    const fs::path dir = cfg.out_dir;
    Bundle b(cfg);
    try {
      const Trajectory traj = run_evolution(cfg.load, b.solver, cfg.k, cfg.eps);
      write_trajectory(dir, traj, cfg);
      double diss = 0.0, min_slack = traj.steps.front().slack;
      for (const auto& r : traj.steps) {
        diss += r.dissipation;
        min_slack = std::min(min_slack, r.slack);
      }
      if (!opt.quiet)
        out << "energy " << format_double(traj.steps.back().energy.total) << " dissipation " << format_double(diss)
            << " min_slack " << format_double(min_slack) << '\n';
      return static_cast<int>(kExitOk);
    } catch (const SolverFailure&) {
      fs::create_directories(dir);
      throw;
    }
  });
}

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  fs::path dir;
  return guarded(opt.dir.empty() ? fs::path(opt.out) : fs::path(opt.dir), err, [&] {
    const RunConfig cfg = configure_dir(opt, dir);
    Bundle b(cfg);
    const Trajectory traj = read_trajectory(dir, cfg, b.solver);
    SuiteOptions so;
    so.balance_rate = cfg.balance_rate;
    so.seed = cfg.seed;
    const auto checks = run_check_suite(traj, b.solver, so);
    write_checks(dir / "checks.csv", checks);
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.pass;
      if (!opt.quiet || !c.pass)
        out << (c.pass ? "pass " : "FAIL ") << c.id << " residual " << format_double(c.residual) << " tolerance "
            << format_double(c.tolerance) << " at " << c.index << '\n';
    }
    return static_cast<int>(ok ? kExitOk : kExitCheck);
  });
}

int cmd_rescale(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  fs::path dir;
  return guarded(opt.dir.empty() ? fs::path(opt.out) : fs::path(opt.dir), err, [&] {
    const RunConfig cfg = configure_dir(opt, dir);
    Bundle b(cfg);
    const Trajectory traj = read_trajectory(dir, cfg, b.solver);
    const RescaleOutput r = rescale_and_check(traj, cfg, b.fe);
    write_rescaled(dir / "rescaled.csv", r.rt, r.report);
    write_bv_report(dir / "bv_report.txt", r.rt, r.report);
    if (!opt.quiet)
      out << "S " << format_double(r.rt.S) << " plateaus " << r.rt.plateaus.size() << " slack_min "
          << format_double(r.report.balance_slack_min) << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep_eps(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(opt.out.empty() ? fs::path("out") : fs::path(opt.out), err, [&] {
    const RunConfig cfg = configure(opt);
    std::vector<double> list = cfg.eps_sweep;
    if (list.empty()) {
      if (!(cfg.eps > 0.0)) throw ConfigError(0, "viscosity.sweep", "no positive epsilon to sweep");
      list = {cfg.eps};
    }
    const fs::path root = cfg.out_dir;
    fs::create_directories(root);

    struct Item {
      Trajectory traj;
      RescaleOutput res;
      ViscousTotals totals;
    };
    std::vector<std::future<Item>> jobs;
    for (double eps : list)
      jobs.push_back(std::async(std::launch::async, [&cfg, &root, eps] {
        Bundle b(cfg);
        Item it;
        it.traj = run_viscous(cfg.load, b.solver, cfg.k, eps);
        const fs::path dir = root / eps_dir(eps);
        RunConfig sub = cfg;
        sub.eps = eps;
        write_trajectory(dir, it.traj, sub);
        it.res = rescale_and_check(it.traj, sub, b.fe);
        it.totals = viscous_totals(it.traj);
        write_rescaled(dir / "rescaled.csv", it.res.rt, it.res.report);
        write_bv_report(dir / "bv_report.txt", it.res.rt, it.res.report);
        return it;
      }));
    std::vector<Item> items;
    for (auto& j : jobs) items.push_back(j.get());

    std::ofstream sweep(root / "sweep.csv");
    sweep << "# geodamage sweep v" << kCsvVersion << '\n'
          << "eps,alpha_rate_h1,alpha_rate_h1_sq,alpha_rate_l2_sq,max_increment_ratio,S,slope_outside,slack_min\n";
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& v = items[i].totals;
      sweep << format_double(list[i]) << ',' << format_double(v.alpha_rate_h1) << ','
            << format_double(v.alpha_rate_h1_sq) << ',' << format_double(v.alpha_rate_l2_sq) << ','
            << format_double(v.max_increment_ratio) << ',' << format_double(items[i].res.rt.S) << ','
            << format_double(items[i].res.report.slope_outside) << ','
            << format_double(items[i].res.report.balance_slack_min) << '\n';
      lo = i ? std::min(lo, v.alpha_rate_h1) : v.alpha_rate_h1;
      hi = i ? std::max(hi, v.alpha_rate_h1) : v.alpha_rate_h1;
    }
    if (items.size() >= 2) {
      Bundle b(cfg);
      std::vector<const RescaledTrajectory*> rts;
      for (const auto& it : items) rts.push_back(&it.res.rt);
      write_comparison(root / "comparison.csv", eps_limit_compare(rts, b.fe));
    }
    if (!opt.quiet) {
      const double ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
      out << "runs " << items.size() << " damage_variation_spread " << format_double(ratio) << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_oracle(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(opt.out.empty() ? fs::path("out") : fs::path(opt.out), err, [&] {
    RunConfig cfg = configure(opt);
    cfg.mesh.homogeneous = true;
    Bundle b(cfg);
    const double t0 = opt.from_time.value_or(0.0);
    const double t1 = opt.to_time.value_or(cfg.load.T);
    if (!(t1 > t0)) throw ConfigError(0, "--to", "target time must exceed the start time");
    const State prev = b.solver.elastic_state(Vec::Ones(1), Vec::Zero(kVoigt), b.fe.lift(cfg.load.G, cfg.load.ramp(t0)), t0);
    const double tau = t1 - t0;
    const StepResult step = b.solver.incremental_minimize(prev, t1, b.fe.lift(cfg.load.G, cfg.load.ramp(t1)), cfg.eps, tau);
    const SymTensor2 strain = cfg.load.ramp(t1) * cfg.load.sym_g();
    const OracleResult o =
        brute_force_oracle_homogeneous(1.0, SymTensor2::zero(), strain, cfg.eps, tau, cfg.law, b.fe.measure());
    const double gap = step.objective - o.objective;
    const double rel = std::abs(gap) / std::max(1.0, std::abs(o.objective));
    if (!opt.quiet)
      out << "solver " << format_double(step.objective) << " oracle " << format_double(o.objective) << " gap "
          << format_double(gap) << " alpha " << format_double(step.state.alpha[0]) << " / "
          << format_double(o.alpha) << '\n';
    return static_cast<int>(rel <= 1e-3 ? kExitOk : kExitCheck);
  });
}

}  // namespace geodamage
