#include "geodamage/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace geodamage {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, int line, const std::string& key) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  if (!text.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (text.empty() || ec != std::errc() || ptr != e) throw ConfigError(line, key, "expected a number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& text, int line, const std::string& key) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(line, key, "expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text, int line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(line, key, "expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, line, key));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

void check_header(std::istream& in, const std::string& schema, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const std::string want = "# geodamage " + schema + " v" + std::to_string(kCsvVersion);
  if (trim(line) != want) throw std::runtime_error(path.string() + ": expected header '" + want + "'");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void header(std::ostream& out, const std::string& schema, const std::vector<std::string>& columns) {
  out << "# geodamage " << schema << " v" << kCsvVersion << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

template <class... T>
void row(std::ostream& out, const T&... v) {
  bool first = true;
  auto put = [&](const auto& x) {
    if (!first) out << ',';
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>)
      out << format_double(x);
    else
      out << x;
  };
  (put(v), ...);
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

FeSpace RunConfig::make_space() const {
  if (mesh.homogeneous) return FeSpace::homogeneous(mesh.lx, mesh.ly);
  return FeSpace::structured(build_structured_mesh(mesh.lx, mesh.ly, mesh.nx, mesh.ny));
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  c.law.hooke = {1.0, 1.0};
  c.law.constraint = ConstraintSet::ball(1.0);
  std::string kind_constraint = "ball";
  double radius = 1.0, dp_tau = 1.0, dp_kappa = 1.0;

  using Setter = std::function<void(const std::string&, int, const std::string&)>;
  auto num = [](double& dst) -> Setter {
    return [&dst](const std::string& v, int l, const std::string& k) { dst = to_double(v, l, k); };
  };
  auto integer = [](int& dst) -> Setter {
    return [&dst](const std::string& v, int l, const std::string& k) {
      const long long x = to_int(v, l, k);
      if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(l, k, "integer out of range");
      dst = static_cast<int>(x);
    };
  };
  std::map<std::string, Setter> keys{
      {"mesh.homogeneous", [&](auto& v, int l, auto& k) { c.mesh.homogeneous = to_bool(v, l, k); }},
      {"mesh.lx", num(c.mesh.lx)},
      {"mesh.ly", num(c.mesh.ly)},
      {"mesh.nx", integer(c.mesh.nx)},
      {"mesh.ny", integer(c.mesh.ny)},
      {"material.lambda", num(c.law.hooke.lambda_lame)},
      {"material.mu", num(c.law.hooke.mu)},
      {"material.hardening.kind",
       [&](auto& v, int l, auto& k) {
         if (v == "linear") c.law.hardening.kind = HardeningKind::linear;
         else if (v == "quadratic") c.law.hardening.kind = HardeningKind::quadratic;
         else if (v == "softening") c.law.hardening.kind = HardeningKind::softening;
         else throw ConfigError(l, k, "unknown hardening kind '" + v + "'");
       }},
      {"material.hardening.b_max", num(c.law.hardening.b_max)},
      {"material.hardening.b_floor", num(c.law.hardening.b_floor)},
      {"material.damage.kind",
       [&](auto& v, int l, auto& k) {
         if (v == "linear") c.law.damage.kind = DamageKind::linear;
         else if (v == "quadratic") c.law.damage.kind = DamageKind::quadratic;
         else throw ConfigError(l, k, "unknown damage kind '" + v + "'");
       }},
      {"material.damage.w1", num(c.law.damage.w1)},
      {"material.constraint.kind",
       [&](auto& v, int l, auto& k) {
         if (v != "ball" && v != "drucker_prager") throw ConfigError(l, k, "unknown constraint kind '" + v + "'");
         kind_constraint = v;
       }},
      {"material.constraint.radius", num(radius)},
      {"material.constraint.tau", num(dp_tau)},
      {"material.constraint.kappa", num(dp_kappa)},
      {"material.grad_alpha_weight", num(c.law.grad_alpha_weight)},
      {"material.grad_p_weight", num(c.law.grad_p_weight)},
      {"load.g",
       [&](auto& v, int l, auto& k) {
         const auto g = to_list(v, l, k);
         if (g.size() != 4) throw ConfigError(l, k, "expected 4 entries g11, g12, g21, g22");
         c.load.G << g[0], g[1], g[2], g[3];
       }},
      {"load.ramp",
       [&](auto& v, int l, auto& k) {
         c.load.ramp_table.clear();
         if (v.empty() || v == "identity") return;
         for (const auto& knot : split(v, ',')) {
           const auto tv = split(knot, ':');
           if (tv.size() != 2) throw ConfigError(l, k, "ramp knots are written t:value");
           c.load.ramp_table.emplace_back(to_double(tv[0], l, k), to_double(tv[1], l, k));
         }
       }},
      {"load.T", num(c.load.T)},
      {"time.k", integer(c.k)},
      {"viscosity.epsilon", num(c.eps)},
      {"viscosity.sweep", [&](auto& v, int l, auto& k) { c.eps_sweep = to_list(v, l, k); }},
      {"solver.tol_energy_stagnation", num(c.solver.tol_energy_stagnation)},
      {"solver.tol_pd", num(c.solver.tol_pd)},
      {"solver.tol_kkt", num(c.solver.tol_kkt)},
      {"solver.tol_sweep", num(c.solver.tol_sweep)},
      {"solver.max_outer", integer(c.solver.max_outer)},
      {"solver.max_inner", integer(c.solver.max_inner)},
      {"solver.cg_tol", num(c.solver.cg_tol)},
      {"solver.n_starts", integer(c.solver.n_starts)},
      {"solver.linear",
       [&](auto& v, int l, auto& k) {
         if (v == "direct") c.solver.linear_solver = LinearSolverKind::direct_sparse;
         else if (v == "cg") c.solver.linear_solver = LinearSolverKind::conjugate_gradient;
         else throw ConfigError(l, k, "unknown linear solver '" + v + "'");
       }},
      {"seed",
       [&](auto& v, int l, auto& k) {
         const long long x = to_int(v, l, k);
         if (x < 0) throw ConfigError(l, k, "seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"output.dir", [&](auto& v, int, auto&) { c.out_dir = v; }},
      {"rescale.intervals", integer(c.rescale_intervals)},
      {"check.balance_rate", num(c.balance_rate)},
  };

  std::string text;
  int line = 0;
  bool seen_header = false;
  std::map<std::string, int> seen;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    const std::string body = trim(hash == std::string::npos ? text : text.substr(0, hash));
    if (body.empty()) continue;
    if (!seen_header) {
      if (body != kConfigHeader) throw ConfigError(line, "", std::string("first line must be '") + kConfigHeader + "'");
      seen_header = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(line, key, "unknown key");
    if (seen.count(key)) throw ConfigError(line, key, "duplicate key (first on line " + std::to_string(seen[key]) + ")");
    seen[key] = line;
    it->second(value, line, key);
  }
  if (!seen_header) throw ConfigError(0, "", std::string("missing header '") + kConfigHeader + "'");

  auto where = [&](const std::string& key) { return seen.count(key) ? seen[key] : 0; };
  auto guard = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(key), key, e.what());
    } catch (const std::domain_error& e) {
      throw ConfigError(where(key), key, e.what());
    }
  };
  guard("material.constraint.kind", [&] {
    c.law.constraint = kind_constraint == "ball" ? ConstraintSet::ball(radius) : ConstraintSet::drucker_prager(dp_tau, dp_kappa);
  });
  guard("material.lambda", [&] { HookeLaw{c.law.hooke.lambda_lame, 1.0}.validate(); });
  guard("material.mu", [&] { HookeLaw{0.0, c.law.hooke.mu}.validate(); });
  guard(c.law.hardening.b_max >= 0.0 ? "material.hardening.b_floor" : "material.hardening.b_max",
        [&] { c.law.hardening.validate(); });
  guard("material.damage.w1", [&] { c.law.damage.validate(); });
  guard(c.law.grad_alpha_weight >= 0.0 ? "material.grad_p_weight" : "material.grad_alpha_weight",
        [&] { c.law.validate(); });
  guard(c.load.T > 0.0 ? (c.load.G.allFinite() ? "load.ramp" : "load.g") : "load.T", [&] { c.load.validate(); });
  guard("solver", [&] { c.solver.validate(); });
  if (c.mesh.homogeneous ? false : (c.mesh.nx < 1 || c.mesh.ny < 1))
    throw ConfigError(where("mesh.nx"), "mesh.nx", "mesh divisions must be >= 1");
  if (!(c.mesh.lx > 0.0) || !(c.mesh.ly > 0.0)) throw ConfigError(where("mesh.lx"), "mesh.lx", "lengths must be > 0");
  if (c.k < 1) throw ConfigError(where("time.k"), "time.k", "must be >= 1");
  if (!(c.eps >= 0.0 && c.eps < 1.0)) throw ConfigError(where("viscosity.epsilon"), "viscosity.epsilon", "must be in [0, 1)");
  for (double e : c.eps_sweep)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError(where("viscosity.sweep"), "viscosity.sweep", "entries must be in (0, 1)");
  if (c.rescale_intervals < 0) throw ConfigError(where("rescale.intervals"), "rescale.intervals", "must be >= 0");
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& c) {
  const auto& law = c.law;
  auto hk = [](HardeningKind k) {
    return k == HardeningKind::linear ? "linear" : k == HardeningKind::quadratic ? "quadratic" : "softening";
  };
  out << kConfigHeader << '\n';
  out << "mesh.homogeneous = " << (c.mesh.homogeneous ? "true" : "false") << '\n';
  out << "mesh.lx = " << format_double(c.mesh.lx) << '\n';
  out << "mesh.ly = " << format_double(c.mesh.ly) << '\n';
  out << "mesh.nx = " << c.mesh.nx << '\n';
  out << "mesh.ny = " << c.mesh.ny << '\n';
  out << "material.lambda = " << format_double(law.hooke.lambda_lame) << '\n';
  out << "material.mu = " << format_double(law.hooke.mu) << '\n';
  out << "material.hardening.kind = " << hk(law.hardening.kind) << '\n';
  out << "material.hardening.b_max = " << format_double(law.hardening.b_max) << '\n';
  out << "material.hardening.b_floor = " << format_double(law.hardening.b_floor) << '\n';
  out << "material.damage.kind = " << (law.damage.kind == DamageKind::linear ? "linear" : "quadratic") << '\n';
  out << "material.damage.w1 = " << format_double(law.damage.w1) << '\n';
  if (law.constraint.kind() == ConstraintKind::ball) {
    out << "material.constraint.kind = ball\n";
    out << "material.constraint.radius = " << format_double(law.constraint.radius()) << '\n';
  } else {
    out << "material.constraint.kind = drucker_prager\n";
    out << "material.constraint.tau = " << format_double(law.constraint.tau()) << '\n';
    out << "material.constraint.kappa = " << format_double(law.constraint.kappa()) << '\n';
  }
  out << "material.grad_alpha_weight = " << format_double(law.grad_alpha_weight) << '\n';
  out << "material.grad_p_weight = " << format_double(law.grad_p_weight) << '\n';
  out << "load.g = " << join({c.load.G(0, 0), c.load.G(0, 1), c.load.G(1, 0), c.load.G(1, 1)}) << '\n';
  out << "load.ramp = ";
  if (c.load.ramp_table.empty()) out << "identity";
  for (std::size_t i = 0; i < c.load.ramp_table.size(); ++i)
    out << (i ? ", " : "") << format_double(c.load.ramp_table[i].first) << ':'
        << format_double(c.load.ramp_table[i].second);
  out << '\n';
  out << "load.T = " << format_double(c.load.T) << '\n';
  out << "time.k = " << c.k << '\n';
  out << "viscosity.epsilon = " << format_double(c.eps) << '\n';
  out << "viscosity.sweep = " << join(c.eps_sweep) << '\n';
  const auto& s = c.solver;
  out << "solver.tol_energy_stagnation = " << format_double(s.tol_energy_stagnation) << '\n';
  out << "solver.tol_pd = " << format_double(s.tol_pd) << '\n';
  out << "solver.tol_kkt = " << format_double(s.tol_kkt) << '\n';
  out << "solver.tol_sweep = " << format_double(s.tol_sweep) << '\n';
  out << "solver.max_outer = " << s.max_outer << '\n';
  out << "solver.max_inner = " << s.max_inner << '\n';
  out << "solver.cg_tol = " << format_double(s.cg_tol) << '\n';
  out << "solver.n_starts = " << s.n_starts << '\n';
  out << "solver.linear = " << (s.linear_solver == LinearSolverKind::direct_sparse ? "direct" : "cg") << '\n';
  out << "seed = " << c.seed << '\n';
  out << "output.dir = " << c.out_dir << '\n';
  out << "rescale.intervals = " << c.rescale_intervals << '\n';
  out << "check.balance_rate = " << format_double(c.balance_rate) << '\n';
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::runtime_error(schema + ": missing column '" + name + "'");
  return static_cast<int>(it - columns.begin());
}

double CsvTable::number(std::size_t r, const std::string& name) const {
  const std::string& cell = rows.at(r).at(column(name));
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw std::runtime_error(schema + ": bad number '" + cell + "' in column " + name);
  return v;
}

CsvTable read_csv(const fs::path& path, const std::string& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  check_header(in, schema, path);
  CsvTable t;
  t.schema = schema;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing column line");
  t.columns = split(trim(line), ',');
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(trim(line), ',');
    if (cells.size() != t.columns.size())
      throw std::runtime_error(path.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_states(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  if (traj.states.empty()) {
    header(out, "states", {"step", "t"});
    return;
  }
  const State& s0 = traj.states.front();
  std::vector<std::string> cols{"step", "t"};
  for (Eigen::Index i = 0; i < s0.alpha.size(); ++i) cols.push_back("alpha_" + std::to_string(i));
  for (Eigen::Index i = 0; i < s0.u.size(); ++i) cols.push_back("u_" + std::to_string(i));
  for (Eigen::Index i = 0; i < s0.e.size(); ++i) cols.push_back("e_" + std::to_string(i));
  for (Eigen::Index i = 0; i < s0.p.size(); ++i) cols.push_back("p_" + std::to_string(i));
  header(out, "states", cols);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    out << i << ',' << format_double(s.t);
    for (const Vec* v : {&s.alpha, &s.u, &s.e, &s.p})
      for (Eigen::Index j = 0; j < v->size(); ++j) out << ',' << format_double((*v)[j]);
    out << '\n';
  }
}

std::vector<State> read_states(const fs::path& path) {
  const CsvTable t = read_csv(path, "states");
  int na = 0, nu = 0, ne = 0, np = 0;
  for (const auto& c : t.columns) {
    if (c.rfind("alpha_", 0) == 0) ++na;
    else if (c.rfind("u_", 0) == 0) ++nu;
    else if (c.rfind("e_", 0) == 0) ++ne;
    else if (c.rfind("p_", 0) == 0) ++np;
  }
  std::vector<State> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    State s;
    s.t = t.number(r, "t");
    s.alpha.resize(na);
    s.u.resize(nu);
    s.e.resize(ne);
    s.p.resize(np);
    for (int i = 0; i < na; ++i) s.alpha[i] = t.number(r, "alpha_" + std::to_string(i));
    for (int i = 0; i < nu; ++i) s.u[i] = t.number(r, "u_" + std::to_string(i));
    for (int i = 0; i < ne; ++i) s.e[i] = t.number(r, "e_" + std::to_string(i));
    for (int i = 0; i < np; ++i) s.p[i] = t.number(r, "p_" + std::to_string(i));
    out.push_back(std::move(s));
  }
  return out;
}

void write_energy(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  header(out, "energy", {"step", "t", "elastic", "damage", "grad_alpha", "hardening", "grad_p", "total"});
  for (const auto& r : traj.steps) {
    const auto& E = r.energy;
    row(out, r.index, r.t, E.elastic, E.damage, E.grad_alpha, E.hardening, E.grad_p, E.total);
  }
}

void write_steps(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  header(out, "steps",
         {"step", "t", "dissipation", "viscous", "work", "work_end", "lhs", "rhs", "slack", "balance", "kt",
          "hill_start", "hill_end", "stress", "equilibrium", "psi", "plastic_residual", "damage_kkt", "sweeps",
          "start", "flagged", "d_alpha_h1", "d_e_l2", "d_p_h1"});
  const std::vector<double> bal = balance_residuals(traj);
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& r = traj.steps[i];
    row(out, r.index, r.t, r.dissipation_infinite ? std::numeric_limits<double>::infinity() : r.dissipation,
        r.viscous, r.work, r.work_end, r.lhs, r.rhs, r.slack, bal[i], r.kt_residual, r.hill_start, r.hill_end,
        r.stress_residual, r.equilibrium, r.psi, r.plastic_residual, r.damage_kkt, r.sweeps, r.start,
        r.flagged ? 1 : 0, r.d_alpha_h1, r.d_e_l2, r.d_p_h1);
  }
}

void write_checks(const fs::path& path, const std::vector<CheckReport>& checks) {
  auto out = open_out(path);
  header(out, "checks", {"id", "residual", "tolerance", "pass", "index", "node", "condition"});
  for (const auto& c : checks) row(out, c.id, c.residual, c.tolerance, c.pass ? 1 : 0, c.index, c.node, c.condition);
}

void write_rescaled(const fs::path& path, const RescaledTrajectory& rt, const BvReport& report) {
  auto out = open_out(path);
  header(out, "rescaled", {"j", "s", "t0", "slope_t", "slope_alpha", "slope_e", "slope_p", "psi", "slack", "plateau"});
  const int n = static_cast<int>(rt.s.size()) - 1;
  for (int j = 0; j <= n; ++j) {
    const double mid = j < n ? 0.5 * (rt.s[j] + rt.s[j + 1]) : rt.s[j];
    const auto it = std::upper_bound(rt.knot_s.begin(), rt.knot_s.end(), mid);
    const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - rt.knot_s.begin()), 1,
                                                  rt.knot_s.size() - 1);
    const KnotSlope& k = rt.slopes[i];
    const double psi = j < static_cast<int>(report.psi.size()) ? report.psi[j] : 0.0;
    const double slack = j < static_cast<int>(report.slack.size()) ? report.slack[j] : 0.0;
    row(out, j, rt.s[j], rt.t0[j], k.dt / k.ds, k.d_alpha_h1 / k.ds, k.d_e_l2 / k.ds, k.d_p_h1 / k.ds, psi, slack,
        rt.on_plateau.empty() ? 0 : static_cast<int>(rt.on_plateau[j]));
  }
}

void write_bv_report(const fs::path& path, const RescaledTrajectory& rt, const BvReport& r) {
  auto out = open_out(path);
  out << "# geodamage bv_report v" << kCsvVersion << '\n';
  auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
  kv("eps", rt.eps);
  kv("S", rt.S);
  kv("T", rt.T);
  kv("grid_intervals", static_cast<double>(rt.s.size() - 1));
  kv("scale", r.scale);
  kv("tolerance", r.tol);
  kv("t0_decrease", r.t0_decrease);
  kv("t0_lipschitz_excess", r.t0_lipschitz);
  kv("knot_slope_error", r.knot_slope_error);
  kv("bundle_excess", r.bundle_excess);
  kv("alpha_increase", r.alpha_increase);
  kv("alpha_box", r.alpha_box);
  kv("kinematic", r.kinematic);
  kv("equilibrium", r.equilibrium);
  kv("stress", r.stress);
  kv("slope_outside_plateaus", r.slope_outside);
  kv("slope_on_plateaus", r.slope_inside);
  kv("balance_slack_min", r.balance_slack_min);
  kv("balance_residual", r.balance_residual);
  kv("generalized_kt", r.generalized_kt);
  kv("hill", r.hill);
  kv("plateaus", r.plateau_count);
  kv("slope_positive_points", r.slope_positive_points);
  kv("slope_points_outside", r.slope_points_outside);
  out << "contained = " << (r.contained ? "true" : "false") << '\n';
  for (const auto& p : rt.plateaus) out << "plateau = " << format_double(p.lo) << ", " << format_double(p.hi) << '\n';
}

void write_comparison(const fs::path& path, const std::vector<ComparisonRow>& rows) {
  auto out = open_out(path);
  header(out, "comparison", {"eps_a", "eps_b", "distance", "at"});
  for (const auto& r : rows) row(out, r.eps_a, r.eps_b, r.distance, r.at);
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, const RunConfig& cfg) {
  fs::create_directories(dir);
  write_states(dir / "states.csv", traj);
  write_energy(dir / "energy.csv", traj);
  write_steps(dir / "steps.csv", traj);
  RunConfig copy = cfg;
  copy.eps = traj.eps;
  copy.k = traj.k;
  auto out = open_out(dir / "config.cfg");
  write_config(out, copy);
}

Trajectory read_trajectory(const fs::path& dir, const RunConfig& cfg, const IncrementalSolver& solver) {
  Trajectory traj;
  traj.states = read_states(dir / "states.csv");
  if (traj.states.size() < 1) throw std::runtime_error(dir.string() + ": no states");
  traj.eps = cfg.eps;
  traj.k = static_cast<int>(traj.states.size()) - 1;
  traj.load = cfg.load;
  const FeSpace& fe = solver.space();
  for (const auto& s : traj.states)
    if (s.alpha.size() != fe.n_nodes() || s.p.size() != kVoigt * fe.n_nodes() ||
        s.e.size() != kVoigt * fe.n_elements() || s.u.size() != fe.n_u_dofs())
      throw std::runtime_error(dir.string() + ": states do not match the configured mesh");
  if (fs::exists(dir / "steps.csv")) {
    const CsvTable t = read_csv(dir / "steps.csv", "steps");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      StepRecord rec;
      rec.plastic_residual = t.number(r, "plastic_residual");
      rec.damage_kkt = t.number(r, "damage_kkt");
      rec.sweeps = static_cast<int>(t.number(r, "sweeps"));
      rec.start = static_cast<int>(t.number(r, "start"));
      rec.flagged = t.number(r, "flagged") != 0.0;
      traj.steps.push_back(rec);
    }
  }
  fill_records(traj, solver.law(), fe);
  return traj;
}

}  // namespace geodamage
