// maxplus: command-line front end.
//
// Exit codes: 0 success (including an infeasibility diagnosis), 1 input
// error, 2 numerical feasibility / convergence failure, 3 hypothesis
// violation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maxplus/convergence.hpp"
#include "maxplus/duality.hpp"
#include "maxplus/errors.hpp"
#include "maxplus/fundamental.hpp"
#include "maxplus/grid_oracle.hpp"
#include "maxplus/io.hpp"
#include "maxplus/riccati.hpp"
#include "maxplus/value.hpp"

using namespace maxplus;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void emit_json(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

SpaceKind resolve_space(int index, const std::string& M_path,
                        const Config& cfg) {
  if (index == 2) {
    Matrix M;
    if (!M_path.empty()) {
      M = read_matrix_file(M_path, "M");
    } else if (cfg.M) {
      M = *cfg.M;
    } else {
      throw InputError("space 2 needs M (--M file or \"M\" in the config)");
    }
    if (M.rows() != cfg.problem.n()) throw InputError("M must be n x n");
    return SpaceKind::semi_convex(M);
  }
  return SpaceKind::from_index(index);
}

GridSpec resolve_grid(const std::string& flag, const Config& cfg,
                      const std::string& name, int dim) {
  if (!flag.empty()) return grid_from_string(flag, dim);
  if (auto g = config_grid(cfg, name, dim)) return *g;
  throw InputError("no '" + name + "' grid: pass it on the command line or "
                   "add grids." + name + " to the config");
}

struct PayoffOptions {
  std::string spec = "config";
  double growth_r = 0.0;
  double growth_c = 0.0;
};

TerminalPayoff resolve_payoff(const PayoffOptions& opt, const Config& cfg) {
  const int n = cfg.problem.n();
  if (opt.spec == "config") {
    if (cfg.payoff.is_null()) {
      throw InputError("the config has no payoff; pass --payoff");
    }
    return payoff_from_json(cfg.payoff, n, cfg.base_dir);
  }
  Json j;
  if (opt.spec == "quadratic" || opt.spec == "abs-sin" ||
      opt.spec == "abs-weighted") {
    j = {{"type", "named"}, {"name", opt.spec}};
  } else if (opt.spec == "zero") {
    j = {{"type", "named"}, {"name", "quadratic"}, {"params", {{"scale", 0.0}}}};
  } else {
    if (!(opt.growth_r > 0.0)) {
      throw InputError("a CSV payoff needs --growth-r (and optionally "
                       "--growth-c)");
    }
    j = {{"type", "csv"}, {"path", opt.spec}};
  }
  if (opt.growth_r > 0.0) {
    j["growth"] = {{"r", opt.growth_r}, {"c", opt.growth_c}};
  }
  return payoff_from_json(j, n, ".");
}

void add_payoff_options(CLI::App* cmd, PayoffOptions& opt) {
  cmd->add_option("--payoff", opt.spec,
                  "config | quadratic | abs-sin | abs-weighted | zero | "
                  "path to a CSV grid")
      ->capture_default_str();
  cmd->add_option("--growth-r", opt.growth_r,
                  "declared growth bound: Psi(x) <= r/2 |x|^2 + c");
  cmd->add_option("--growth-c", opt.growth_c, "offset c of the growth bound");
}

void require_growth(const TerminalPayoff& psi, const GridSpec& grid) {
  const GrowthViolation v = check_growth(psi, grid);
  if (!v.ok) {
    std::ostringstream msg;
    msg << "terminal payoff exceeds its declared growth bound by "
        << v.worst_excess << " at x = (" << v.worst_point.transpose() << ")";
    throw HypothesisError(msg.str());
  }
}

Json ops_json(const OpCounts& ops) {
  return {{"oplus", ops.oplus},
          {"doubling", ops.doubling},
          {"subdoubling", ops.subdoubling},
          {"primal_steps", ops.primal_steps}};
}

// ---------------------------------------------------------------- solve-dre

struct DreArgs {
  std::string config;
  long horizon = 0;
  std::string p0 = "zero";
  bool trajectory = false;
  std::string json_out;
};

int run_solve_dre(const DreArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  Matrix P0;
  if (a.p0 == "zero") {
    P0 = Matrix::Zero(p.n(), p.n());
  } else if (a.p0 == "lambda") {
    if (cfg.payoff.is_null() || cfg.payoff.value("type", "") != "quadratic") {
      throw InputError("--p0 lambda needs a quadratic payoff in the config");
    }
    P0 = matrix_from_json(cfg.payoff.at("Lambda"), "payoff.Lambda");
  } else if (a.p0 == "config") {
    if (!cfg.P0) throw InputError("the config has no P0");
    P0 = *cfg.P0;
  } else {
    P0 = read_matrix_file(a.p0, "P0");
  }
  if (P0.rows() != p.n() || P0.cols() != p.n()) {
    throw InputError("P0 must be n x n");
  }
  const auto t0 = Clock::now();
  const std::vector<Matrix> traj = dre_solve(p, P0, a.horizon);
  const double elapsed = seconds_since(t0);

  Json out;
  out["horizon"] = a.horizon;
  out["P_k"] = matrix_to_json(traj.back());
  // Distance of P_K from being a fixed point; null if the next step fails.
  try {
    out["residual"] = inf_norm(dre_step(traj.back(), p) - traj.back());
  } catch (const FeasibilityError&) {
    out["residual"] = nullptr;
  }
  if (a.trajectory) {
    Json t = Json::array();
    for (const auto& P : traj) t.push_back(matrix_to_json(P));
    out["trajectory"] = std::move(t);
  }
  out["meta"] = {{"wall_time", elapsed}};
  emit_json(out, a.json_out);
  return 0;
}

// -------------------------------------------------------------- fundamental

struct FundamentalArgs {
  std::string config;
  int space = 1;
  std::string M;
  long horizon = 1;
  std::string json_out;
};

int run_fundamental(const FundamentalArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  const SpaceKind space = resolve_space(a.space, a.M, cfg);

  const auto t0 = Clock::now();
  const FundamentalState st = initial_state(p, space);
  if (a.horizon < st.base_horizon) {
    throw InputError("horizon must be at least " +
                     std::to_string(st.base_horizon) + " for this space");
  }
  const Propagation pr = propagate(st, a.horizon, p);
  const double elapsed = seconds_since(t0);

  Json out;
  out["space"] = space.index();
  out["horizon"] = pr.horizon;
  out["base_horizon"] = st.base_horizon;
  out["Theta_k"] = hessian_to_json(pr.theta);
  out["Q_k"] = hessian_to_json(pr.Q);
  out["ops_count"] = pr.ops.oplus;
  out["ops"] = ops_json(pr.ops);
  out["meta"] = {{"wall_time", elapsed}};
  emit_json(out, a.json_out);
  return 0;
}

// -------------------------------------------------------------------- value

struct ValueArgs {
  std::string config;
  int space = 1;
  std::string M;
  long horizon = 1;
  PayoffOptions payoff;
  std::string zgrid;
  std::string xgrid;
  std::string sample_grid;
  std::string dual = "auto";
  std::string output;
  std::string json_out;
};

int run_value(const ValueArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  const int n = p.n();
  const SpaceKind space = resolve_space(a.space, a.M, cfg);
  const TerminalPayoff psi = resolve_payoff(a.payoff, cfg);
  const GridSpec zgrid = resolve_grid(a.zgrid, cfg, "z", n);
  const GridSpec xgrid = resolve_grid(a.xgrid, cfg, "value", n);

  const auto* quad = std::get_if<QuadraticPayoff>(&psi.variant());
  std::string method = a.dual;
  if (method == "auto") {
    method = quad && space.variant() != Space::Indicator ? "exact" : "grid";
  }
  if (method != "exact" && method != "grid") {
    throw InputError("--dual must be auto, exact or grid");
  }
  if (method == "exact" && !quad) {
    throw InputError("--dual exact needs a quadratic payoff");
  }

  Json timing;
  auto t0 = Clock::now();
  DualFunction dual;
  Json dual_info = {{"method", method}, {"grid", grid_to_json(zgrid)}};
  if (method == "exact") {
    require_growth(psi, zgrid);
    dual = sample_quadratic_dual(quadratic_dual(quad->Lambda, space), space,
                                 zgrid);
  } else {
    const GridSpec sgrid = space.variant() == Space::Indicator
                               ? zgrid
                               : resolve_grid(a.sample_grid, cfg, "sample", n);
    require_growth(psi, sgrid);
    dual = dual_transform(psi, space, zgrid, sgrid);
    dual_info["sample_grid"] = grid_to_json(sgrid);
  }
  timing["dual"] = seconds_since(t0);

  t0 = Clock::now();
  PartitionedHessian Q;
  Json ops = nullptr;
  if (a.horizon == 0) {
    Q = psi_hessian(space, n);
  } else {
    const FundamentalState st = initial_state(p, space);
    if (a.horizon < st.base_horizon) {
      throw InputError("horizon must be 0 or at least " +
                       std::to_string(st.base_horizon) + " for this space");
    }
    const Propagation pr = propagate(st, a.horizon, p);
    Q = pr.Q;
    ops = ops_json(pr.ops);
  }
  timing["propagate"] = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<double> W = value_grid(Q, dual, xgrid);
  timing["value"] = seconds_since(t0);

  if (!a.output.empty()) write_grid_csv(a.output, xgrid, W);

  Json out;
  out["space"] = space.index();
  out["horizon"] = a.horizon;
  out["Q_k"] = hessian_to_json(Q);
  out["ops"] = ops;
  out["dual"] = dual_info;
  out["value_grid"] = grid_to_json(xgrid);
  if (a.output.empty()) out["values"] = W;
  out["meta"] = {{"timing", timing}};
  emit_json(out, a.json_out);
  return 0;
}

// ------------------------------------------------------------------ grid-dp

struct GridDpArgs {
  std::string config;
  long horizon = 0;
  PayoffOptions payoff;
  std::string xgrid;
  std::string wgrid;
  std::string output;
  std::string json_out;
};

int run_grid_dp(const GridDpArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  const TerminalPayoff psi = resolve_payoff(a.payoff, cfg);
  const GridSpec xgrid = resolve_grid(a.xgrid, cfg, "x", p.n());
  const GridSpec wgrid = resolve_grid(a.wgrid, cfg, "w", p.m());
  require_growth(psi, xgrid);

  const auto t0 = Clock::now();
  const GridDpResult r = dp_solve_grid(psi.sample(xgrid), a.horizon, p, wgrid,
                                       xgrid);
  const double elapsed = seconds_since(t0);
  if (!a.output.empty()) write_grid_csv(a.output, xgrid, r.values);

  Json out;
  out["horizon"] = a.horizon;
  out["x_grid"] = grid_to_json(xgrid);
  out["w_grid"] = grid_to_json(wgrid);
  if (a.output.empty()) out["values"] = r.values;
  out["meta"] = {{"step_seconds", r.step_seconds}, {"wall_time", elapsed}};
  emit_json(out, a.json_out);
  return 0;
}

// ----------------------------------------------------------------- converge

struct ConvergeArgs {
  std::string config;
  int space = 3;
  std::string M;
  PayoffOptions payoff;
  bool no_payoff = false;
  std::string zgrid;
  std::string sample_grid;
  std::string value_grid;
  double tol = 1e-10;
  long max_doublings = 60;
  double eps0 = 1e-3;
  double r0 = -1.0;
  std::string output;
  std::string json_out;
};

Json trace_json(const std::vector<DoublingRecord>& trace) {
  Json t = Json::array();
  for (const auto& r : trace) {
    t.push_back({{"doubling", r.doubling},
                 {"sigma", r.sigma},
                 {"lambda", r.lambda},
                 {"offblock_norm", r.offblock_norm}});
  }
  return t;
}

int run_converge(const ConvergeArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  const int n = p.n();
  const SpaceKind space = resolve_space(a.space, a.M, cfg);
  const FundamentalState st = initial_state(p, space);

  Json out;
  out["space"] = space.index();
  out["base_horizon"] = st.base_horizon;
  out["notes"] = Json::array(
      {"continuity of the dual payoff is not checkable on a grid; only the "
       "growth hypothesis is checked"});

  const HypothesisResult h = hypothesis_check(st.unit);
  out["sigma"] = h.sigma;
  out["lambda"] = h.lambda;
  out["rho"] = h.rho ? Json(*h.rho) : Json(nullptr);
  out["f_rho"] = h.rho ? Json(h.f_at_rho) : Json(nullptr);
  out["feasible"] = h.rho.has_value();

  ConvergenceReport rep;
  try {
    rep = theta_limit(st.unit, a.tol, a.max_doublings);
  } catch (const Error& e) {
    if (h.rho) throw;
    // Without a certified rho a failed iteration is a diagnosis, not an error.
    out["error"] = e.what();
    out["theta_inf"] = nullptr;
    emit_json(out, a.json_out);
    return 0;
  }
  out["trace"] = trace_json(rep.trace);
  out["theta_inf"] = hessian_to_json(*rep.theta_inf);
  const PartitionedHessian Qinf = q_infinity(*rep.theta_inf, space);
  out["Q_inf"] = hessian_to_json(Qinf);
  out["Q_inf_22_eigenvalues"] = vector_to_json(symmetric_eigenvalues(Qinf.q22()));
  if (space.variant() == Space::Indicator) {
    try {
      out["are_deviation"] = max_abs(Qinf.q11() - are_fixed_point(p));
    } catch (const Error& e) {
      out["are_deviation"] = nullptr;
      out["notes"].push_back(std::string("ARE check skipped: ") + e.what());
    }
  }

  const bool want_payoff =
      !a.no_payoff && (a.payoff.spec != "config" || !cfg.payoff.is_null());
  if (!want_payoff) {
    out["kappa"] = nullptr;
    emit_json(out, a.json_out);
    return 0;
  }
  const TerminalPayoff psi = resolve_payoff(a.payoff, cfg);
  const GridSpec zgrid = resolve_grid(a.zgrid, cfg, "z", n);
  const GridSpec sgrid = space.variant() == Space::Indicator
                             ? zgrid
                             : resolve_grid(a.sample_grid, cfg, "sample", n);
  require_growth(psi, sgrid);
  const DualFunction dual = dual_transform(psi, space, zgrid, sgrid);
  const KappaResult k = compute_kappa(dual, Qinf.q22(), a.eps0, a.r0);
  out["kappa"] = k.kappa;
  out["kappa_argmax"] = vector_to_json(k.argmax);
  out["growth_excess"] = k.growth_excess;
  out["dual_grid"] = grid_to_json(zgrid);
  out["sample_grid"] = grid_to_json(sgrid);

  if (!a.output.empty()) {
    const GridSpec vgrid = resolve_grid(a.value_grid, cfg, "value", n);
    write_grid_csv(a.output, vgrid,
                   w_infinity_grid(Qinf.q11(), k.kappa, vgrid));
    out["value_grid"] = grid_to_json(vgrid);
  }
  emit_json(out, a.json_out);
  return 0;
}

// -------------------------------------------------------------------- bench

struct BenchArgs {
  std::string config;
  int space = 1;
  std::string M;
  std::string horizons = "8,16,32,64,128";
  PayoffOptions payoff;
  std::string xgrid;
  std::string wgrid;
  int repeats = 5;
  std::string json_out;
};

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = sxx > 0 && syy > 0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  return f;
}

int run_bench(const BenchArgs& a) {
  const Config cfg = load_config(a.config);
  const RegulatorProblem& p = cfg.problem;
  require_valid(p);
  const SpaceKind space = resolve_space(a.space, a.M, cfg);
  const TerminalPayoff psi = resolve_payoff(a.payoff, cfg);
  const GridSpec xgrid = resolve_grid(a.xgrid, cfg, "x", p.n());
  const GridSpec wgrid = resolve_grid(a.wgrid, cfg, "w", p.m());
  require_growth(psi, xgrid);

  std::vector<long> Ks;
  {
    std::stringstream ss(a.horizons);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        Ks.push_back(std::stol(item));
      } catch (const std::exception&) {
        throw InputError("--horizons must be a comma-separated list");
      }
    }
  }
  if (Ks.size() < 2) throw InputError("--horizons needs at least two values");
  std::sort(Ks.begin(), Ks.end());
  if (Ks.front() < 1) throw InputError("horizons must be positive");

  const FundamentalState st = initial_state(p, space);
  Json rows = Json::array();
  std::vector<double> xs, fund_t, grid_t;

  // One grid run to the largest horizon, read off cumulatively.
  const GridDpResult dp =
      dp_solve_grid(psi.sample(xgrid), Ks.back(), p, wgrid, xgrid);
  for (long K : Ks) {
    if (K < st.base_horizon) continue;
    double best = std::numeric_limits<double>::infinity();
    Propagation pr;
    for (int r = 0; r < std::max(1, a.repeats); ++r) {
      const auto t0 = Clock::now();
      pr = propagate(st, K, p);
      best = std::min(best, seconds_since(t0));
    }
    double cum = 0.0;
    for (long k = 0; k < K; ++k) cum += dp.step_seconds[static_cast<std::size_t>(k)];
    xs.push_back(static_cast<double>(K));
    fund_t.push_back(best);
    grid_t.push_back(cum);
    rows.push_back({{"horizon", K},
                    {"oplus_ops", pr.ops.oplus},
                    {"expected_ops",
                     expected_oplus_ops(static_cast<std::uint64_t>(K / st.base_horizon))},
                    {"fundamental_seconds", best},
                    {"grid_seconds", cum}});
  }
  const Fit gf = least_squares(xs, grid_t);
  const Fit ff = least_squares(xs, fund_t);
  Json out;
  out["space"] = space.index();
  out["rows"] = rows;
  out["grid_fit"] = {{"slope", gf.slope}, {"intercept", gf.intercept}, {"r2", gf.r2}};
  out["fundamental_fit"] = {
      {"slope", ff.slope}, {"intercept", ff.intercept}, {"r2", ff.r2}};
  out["x_grid"] = grid_to_json(xgrid);
  out["w_grid"] = grid_to_json(wgrid);
  emit_json(out, a.json_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-plus fundamental solutions for discrete-time linear "
               "regulators"};
  app.require_subcommand(1);

  DreArgs dre;
  auto* c_dre = app.add_subcommand("solve-dre", "Difference Riccati recursion");
  c_dre->add_option("config", dre.config, "JSON config")->required();
  c_dre->add_option("--horizon,-k", dre.horizon, "number of steps K")
      ->check(CLI::NonNegativeNumber);
  c_dre->add_option("--p0", dre.p0,
                    "zero | lambda (payoff Lambda) | config | matrix file")
      ->capture_default_str();
  c_dre->add_flag("--trajectory", dre.trajectory, "include P_0..P_K");
  c_dre->add_option("--json", dre.json_out, "write JSON here instead of stdout");

  FundamentalArgs fun;
  auto* c_fun = app.add_subcommand("fundamental",
                                   "Dual and primal kernel Hessians at horizon k");
  c_fun->add_option("config", fun.config, "JSON config")->required();
  c_fun->add_option("--space", fun.space, "1 convex, 2 semiconvex, 3 indicator")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  c_fun->add_option("--M", fun.M, "matrix file for space 2 (default: config M)");
  c_fun->add_option("--horizon,-k", fun.horizon, "horizon k")
      ->check(CLI::PositiveNumber);
  c_fun->add_option("--json", fun.json_out, "write JSON here instead of stdout");

  ValueArgs val;
  auto* c_val = app.add_subcommand("value", "Finite-horizon value function");
  c_val->add_option("config", val.config, "JSON config")->required();
  c_val->add_option("--space", val.space)->check(CLI::Range(1, 3))
      ->capture_default_str();
  c_val->add_option("--M", val.M, "matrix file for space 2");
  c_val->add_option("--horizon,-k", val.horizon)->check(CLI::NonNegativeNumber);
  add_payoff_options(c_val, val.payoff);
  c_val->add_option("--zgrid", val.zgrid, "dual grid lo:hi:step (default grids.z)");
  c_val->add_option("--xgrid", val.xgrid,
                    "output grid lo:hi:step (default grids.value)");
  c_val->add_option("--sample-grid", val.sample_grid,
                    "payoff sample grid for the dual (default grids.sample)");
  c_val->add_option("--dual", val.dual, "auto | exact | grid")
      ->capture_default_str();
  c_val->add_option("--output,-o", val.output, "CSV value grid");
  c_val->add_option("--json", val.json_out, "write metadata here instead of stdout");

  GridDpArgs gdp;
  auto* c_gdp = app.add_subcommand("grid-dp", "Grid value iteration (reference)");
  c_gdp->add_option("config", gdp.config, "JSON config")->required();
  c_gdp->add_option("--horizon,-k", gdp.horizon)->check(CLI::NonNegativeNumber);
  add_payoff_options(c_gdp, gdp.payoff);
  c_gdp->add_option("--xgrid", gdp.xgrid, "state grid (default grids.x)");
  c_gdp->add_option("--wgrid", gdp.wgrid, "input grid (default grids.w)");
  c_gdp->add_option("--output,-o", gdp.output, "CSV value grid");
  c_gdp->add_option("--json", gdp.json_out, "write metadata here instead of stdout");

  ConvergeArgs cvg;
  auto* c_cvg = app.add_subcommand("converge", "Infinite-horizon limit");
  c_cvg->add_option("config", cvg.config, "JSON config")->required();
  c_cvg->add_option("--space", cvg.space)->check(CLI::Range(1, 3))
      ->capture_default_str();
  c_cvg->add_option("--M", cvg.M, "matrix file for space 2");
  add_payoff_options(c_cvg, cvg.payoff);
  c_cvg->add_flag("--no-payoff", cvg.no_payoff, "skip the offset kappa");
  c_cvg->add_option("--zgrid", cvg.zgrid, "dual grid (default grids.z)");
  c_cvg->add_option("--sample-grid", cvg.sample_grid,
                    "payoff sample grid (default grids.sample)");
  c_cvg->add_option("--value-grid", cvg.value_grid,
                    "W_inf output grid (default grids.value)");
  c_cvg->add_option("--tol", cvg.tol)->capture_default_str();
  c_cvg->add_option("--max-doublings", cvg.max_doublings)->capture_default_str();
  c_cvg->add_option("--eps0", cvg.eps0, "growth margin")->capture_default_str();
  c_cvg->add_option("--r0", cvg.r0,
                    "growth check radius (default half the dual grid radius)");
  c_cvg->add_option("--output,-o", cvg.output, "CSV of W_inf");
  c_cvg->add_option("--json", cvg.json_out, "write the report here instead of stdout");

  BenchArgs bch;
  auto* c_bch = app.add_subcommand("bench", "Doubling vs grid iteration timings");
  c_bch->add_option("config", bch.config, "JSON config")->required();
  c_bch->add_option("--space", bch.space)->check(CLI::Range(1, 3))
      ->capture_default_str();
  c_bch->add_option("--M", bch.M, "matrix file for space 2");
  c_bch->add_option("--horizons", bch.horizons, "comma-separated horizons")
      ->capture_default_str();
  add_payoff_options(c_bch, bch.payoff);
  c_bch->add_option("--xgrid", bch.xgrid, "state grid (default grids.x)");
  c_bch->add_option("--wgrid", bch.wgrid, "input grid (default grids.w)");
  c_bch->add_option("--repeats", bch.repeats, "timing repeats per horizon")
      ->capture_default_str();
  c_bch->add_option("--json", bch.json_out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*c_dre) return run_solve_dre(dre);
    if (*c_fun) return run_fundamental(fun);
    if (*c_val) return run_value(val);
    if (*c_gdp) return run_grid_dp(gdp);
    if (*c_cvg) return run_converge(cvg);
    if (*c_bch) return run_bench(bch);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
