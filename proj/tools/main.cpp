#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sshock/errors.hpp"
#include "sshock/full_profile.hpp"
#include "sshock/inner_layer.hpp"
#include "sshock/io.hpp"
#include "sshock/outer_layers.hpp"
#include "sshock/pde_lf.hpp"
#include "sshock/weak_limit.hpp"

namespace fs = std::filesystem;
using namespace sshock;

namespace {

constexpr int kExitHypothesis = 1;
constexpr int kExitSolver = 2;
constexpr int kExitUsage = 64;

struct RunConfig {
  std::vector<double> uL{2.0, 6.0};
  std::vector<double> uR{-1.6, 4.56};
  std::string out = ".";
  std::string eps = "1e-2:0.7:1e-4";
  double epsilon = 1e-2;
  double ratio = 0.7;
  double newton_tol = 1e-10;
  double rtol = 1e-12;
  double atol = 1e-14;
  double settle_tol = 1e-11;
  double boundary_tol = 1e-3;
  int samples_per_step = 64;
  bool parallel = false;
  double iota_sigma = 25.0;
  double iota_grid = 1e-3;
  GridConfig grid;
  bool all_snapshots = false;
  bool gnuplot = false;
};

State2 to_state(const std::vector<double>& v) { return {v.at(0), v.at(1)}; }

std::vector<double> parse_eps(const std::string& text) {
  double a = 0, r = 0, b = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  std::string rest;
  if (!(in >> a >> c1 >> r >> c2 >> b) || c1 != ':' || c2 != ':' || (in >> rest) || !(a > 0) ||
      !(r > 0 && r < 1) || !(b > 0 && b <= a)) {
    throw CLI::ValidationError("--eps", "expected start:ratio:end with 0 < ratio < 1, end <= start, got '" +
                                            text + "'");
  }
  return geometric_eps(a, r, b);
}

ShootConfig shoot_config(const RunConfig& rc) {
  ShootConfig c;
  c.newton_tol = rc.newton_tol;
  c.settle_tol = rc.settle_tol;
  c.boundary_tol = rc.boundary_tol;
  c.samples_per_step = rc.samples_per_step;
  c.parallel_jacobian = rc.parallel;
  c.integrator.rel_tol = rc.rtol;
  c.integrator.abs_tol = rc.atol;
  return c;
}

std::string path_in(const RunConfig& rc, const std::string& name) {
  fs::create_directories(rc.out);
  return (fs::path(rc.out) / name).string();
}

void write_gnuplot(const RunConfig& rc, const std::string& name, const std::string& body) {
  if (!rc.gnuplot) return;
  std::ofstream f(path_in(rc, name), std::ios::binary);
  f << "set datafile separator ','\nset key autotitle columnhead\n" << body;
}

RiemannAnalysis checked_analysis(const RunConfig& rc) {
  const RiemannAnalysis a = analyze({to_state(rc.uL), to_state(rc.uR)});
  if (!a.h1_holds) throw HypothesisViolated("HypothesisViolated: H1 fails (lambda+(uR) < s < lambda-(uL) required)");
  if (!a.h2_holds) throw HypothesisViolated("HypothesisViolated: H2 fails (e0 > 0 required)");
  return a;
}

void print_analysis(const RiemannAnalysis& a) {
  std::printf("s = %.17g\nwL = (%.17g, %.17g)\nwR = (%.17g, %.17g)\ne0 = %.17g\nH1 = %s\nH2 = %s\n", a.s,
              a.wL[0], a.wL[1], a.wR[0], a.wR[1], a.e0, a.h1_holds ? "true" : "false",
              a.h2_holds ? "true" : "false");
}

int cmd_analyze(const RunConfig& rc) {
  const RiemannAnalysis a = analyze({to_state(rc.uL), to_state(rc.uR)});
  print_analysis(a);
  CsvWriter w(path_in(rc, "analysis.csv"), {"s", "w1L", "w2L", "w1R", "w2R", "e0", "h1", "h2"});
  w.row({a.s, a.wL[0], a.wL[1], a.wR[0], a.wR[1], a.e0, a.h1_holds ? 1.0 : 0.0, a.h2_holds ? 1.0 : 0.0});
  if (!a.h1_holds || !a.h2_holds) {
    std::fprintf(stderr, "HypothesisViolated: %s fails\n", !a.h1_holds ? "H1" : "H2");
    return kExitHypothesis;
  }
  return 0;
}

struct Inner {
  IotaTable table;
  InnerConstants constants;
};

Inner inner_setup(const RunConfig& rc, const RiemannAnalysis& a) {
  Inner in{build_iota_table(rc.iota_sigma, 1e-10, rc.iota_grid), {}};
  in.constants = matching_constants(a, in.table);
  return in;
}

void print_constants(const InnerConstants& c) {
  std::printf("rho3 = %.17g\nkappa0 = %.17g\nkappa0^2 = %.17g\nomega0 = %.17g\nsigma0 = %.17g\niota3(0) = %.17g\n",
              c.rho[2], c.kappa0, c.kappa0 * c.kappa0, c.omega0, c.sigma0, c.iota3_at_0);
}

void write_constants(const RunConfig& rc, const InnerConstants& c) {
  CsvWriter w(path_in(rc, "constants.csv"), {"rho3", "kappa0", "kappa0_sq", "omega0", "sigma0", "iota3_0"});
  w.row({c.rho[2], c.kappa0, c.kappa0 * c.kappa0, c.omega0, c.sigma0, c.iota3_at_0});
}

int cmd_inner(const RunConfig& rc) {
  const RiemannAnalysis a = checked_analysis(rc);
  const Inner in = inner_setup(rc, a);
  const Gamma0Trajectory g = build_gamma0(a, in.constants, in.table);
  print_constants(in.constants);
  std::printf("w2 drop along gamma0 = %.17g\nmax beta*kappa = %.17g at sigma = %.17g\n",
              g.w2_minus_inf - g.w2_plus_inf, g.max_beta_kappa, g.sigma_at_max);
  write_constants(rc, in.constants);
  write_iota_csv(in.table, path_in(rc, "iota.csv"));
  write_gamma0_csv(g, path_in(rc, "gamma0.csv"));
  CsvWriter w(path_in(rc, "gamma0_summary.csv"), {"w2_drop", "max_beta_kappa", "sigma_at_max", "iota1_at_max"});
  w.row({g.w2_minus_inf - g.w2_plus_inf, g.max_beta_kappa, g.sigma_at_max, g.iota1_at_max});
  write_gnuplot(rc, "inner.gp", "plot 'iota.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n");
  return 0;
}

int cmd_outer(const RunConfig& rc) {
  const RiemannAnalysis a = checked_analysis(rc);
  const Inner in = inner_setup(rc, a);
  const Linearization lin = jacobian_at_P(CornerPoint::P_L, a.s);
  const HeteroclinicResult g1 = compute_gamma1(a);
  const HeteroclinicResult g2 = compute_gamma2(a);
  const TransversalityReport tr = transversality_frames(a, in.constants, in.table);
  std::printf("eigenvalues at P_L = (%.17g, %.17g, %.17g)\n", lin.eigenvalues[0], lin.eigenvalues[1],
              lin.eigenvalues[2]);
  std::printf("gamma1 endpoint error = %.3e\ngamma2 endpoint error = %.3e\n", g1.endpoint_error,
              g2.endpoint_error);
  std::printf("transversality rank = %d, intersection dimension = %d\n", tr.rank, tr.intersection_dim);
  write_heteroclinic_csv(g1, path_in(rc, "gamma1.csv"));
  write_heteroclinic_csv(g2, path_in(rc, "gamma2.csv"));
  CsvWriter w(path_in(rc, "outer_summary.csv"),
              {"lambda1", "lambda2", "lambda3", "gamma1_error", "gamma2_error", "rank", "intersection_dim"});
  w.row({lin.eigenvalues[0], lin.eigenvalues[1], lin.eigenvalues[2], g1.endpoint_error, g2.endpoint_error,
         static_cast<double>(tr.rank), static_cast<double>(tr.intersection_dim)});
  write_gnuplot(rc, "outer.gp", "plot 'gamma1.csv' using 2:3 with lines, 'gamma2.csv' using 2:3 with lines\n");
  return 0;
}

void write_maxima(const RunConfig& rc, const ProfileSolution& p) {
  const auto& m = p.maxima;
  std::printf("epsilon = %.17g\nmatch residual = %.3e\nmax u2 = %.17g at xi = %.17g\n"
              "max u1 = %.17g, -min u1 = %.17g\nxi layer = [%.17g, %.17g]\n",
              p.epsilon, p.match_residual, m.max_u2, m.argmax_u2, m.max_u1_plus, m.max_u1_minus, p.xi_in,
              p.xi_out);
  CsvWriter w(path_in(rc, "profile_summary.csv"),
              {"epsilon", "match_residual", "max_u2", "argmax_u2", "max_u1", "argmax_u1", "max_minus_u1",
               "argmin_u1", "xi_in", "xi_out", "xi_gamma", "T_layer"});
  w.row({p.epsilon, p.match_residual, m.max_u2, m.argmax_u2, m.max_u1_plus, m.argmax_u1, m.max_u1_minus,
         m.argmin_u1, p.xi_in, p.xi_out, p.xi_gamma, p.T_layer()});
}

ScalingReport run_sweep(const RunConfig& rc, const RiemannAnalysis& a, const Inner& in,
                        const std::vector<double>& eps, bool keep) {
  ScalingReport r = measure_scaling(a, in.constants, eps, shoot_config(rc), keep);
  if (!r.failure.empty()) throw NoConvergence(r.failure);
  return r;
}

int cmd_profile(const RunConfig& rc) {
  const RiemannAnalysis a = checked_analysis(rc);
  const Inner in = inner_setup(rc, a);
  if (!(rc.epsilon > 0.0 && rc.epsilon <= 0.05)) throw CLI::ValidationError("--epsilon", "must lie in (0, 0.05]");
  // Continuation from 1e-2 when the target is smaller.
  const auto eps = rc.epsilon < 1e-2 ? geometric_eps(1e-2, rc.ratio, rc.epsilon) : std::vector<double>{rc.epsilon};
  const ScalingReport r = run_sweep(rc, a, in, eps, true);
  const ProfileSolution& p = r.profiles.back();
  write_maxima(rc, p);
  write_profile_csv(p, path_in(rc, "profile.csv"));
  write_gnuplot(rc, "profile.gp", "set logscale y\nplot 'profile.csv' using 1:3 with lines\n");
  return 0;
}

void print_scaling(const ScalingReport& r) {
  std::printf("kappa0^2 = %.17g, omega0 = %.17g\n", r.kappa0_sq_ref, r.omega0_ref);
  std::printf("%-12s %-14s %-14s %-14s %-10s %-12s %-10s\n", "epsilon", "eps2*max_u2", "eps*max_u1",
              "eps*max(-u1)", "T_layer", "inner_width", "residual");
  for (const auto& row : r.rows) {
    std::printf("%-12.4e %-14.8f %-14.8f %-14.8f %-10.4f %-12.4e %-10.2e\n", row.epsilon, row.eps2_max_u2,
                row.eps_max_u1_plus, row.eps_max_u1_minus, row.T_layer, row.inner_xi_width, row.match_residual);
  }
}

int cmd_sweep(const RunConfig& rc) {
  const RiemannAnalysis a = checked_analysis(rc);
  const Inner in = inner_setup(rc, a);
  const ScalingReport r = run_sweep(rc, a, in, parse_eps(rc.eps), false);
  print_scaling(r);
  write_scaling_csv(r, path_in(rc, "scaling.csv"));
  write_gnuplot(rc, "sweep.gp",
                "set logscale x\nplot 'scaling.csv' using 1:2 with linespoints, '' using 1:16 with lines\n");
  return 0;
}

int cmd_weaklimit(const RunConfig& rc) {
  const RiemannAnalysis a = checked_analysis(rc);
  const Inner in = inner_setup(rc, a);
  const ScalingReport r = run_sweep(rc, a, in, parse_eps(rc.eps), true);
  const std::vector<TestFunction> psis{bump_function(a.s, 0.5, "bump_s_0.5"),
                                       bump_function(a.s + 0.1, 0.3, "bump_s+0.1_0.3"),
                                       bump_function(a.s - 0.2, 1.0, "bump_s-0.2_1.0")};
  const TestFunction2D phi = separable_bump(a.s * 1.5, 1.0, 1.5, 0.5, "bump2d");
  std::vector<PairingReport> reports;
  CsvWriter w(path_in(rc, "layer_integrals.csv"),
              {"epsilon", "I_u1", "I_abs_u1", "I_u2", "I_u2_minus_e0", "tail_L", "tail_R"});
  std::printf("%-12s %-14s %-14s %-14s %-12s", "epsilon", "I_u2-e0", "I_u1", "I|u1|", "tails");
  for (const auto& p : psis) std::printf(" %-16s", p.name.c_str());
  std::printf(" %-12s\n", phi.name.c_str());
  for (const auto& p : r.profiles) {
    const LayerIntegrals L = layer_integrals(p);
    w.row({p.epsilon, L.I_u1, L.I_abs_u1, L.I_u2, L.I_u2 - a.e0, L.tail_L, L.tail_R});
    std::printf("%-12.4e %-14.6e %-14.6e %-14.6e %-12.4e", p.epsilon, L.I_u2 - a.e0, L.I_u1, L.I_abs_u1,
                L.tail_L + L.tail_R);
    for (const auto& psi : psis) {
      reports.push_back(pair_1d(p, a, psi));
      std::printf(" %-16.4e", reports.back().discrepancy[1]);
    }
    reports.push_back(pair_2d(p, a, phi));
    std::printf(" %-12.4e\n", reports.back().discrepancy[1]);
  }
  write_pairing_csv(reports, path_in(rc, "pairing.csv"));
  return 0;
}

int cmd_pde(const RunConfig& rc) {
  const RiemannData rd{to_state(rc.uL), to_state(rc.uR)};
  const auto snaps = run_lf(rd, rc.grid);
  const GrowthFit fit = fit_spike_growth(snaps);
  const FieldSnapshot& last = snaps.back();
  std::printf("steps = %ld, t = %.17g\nmax u1 = %.17g, max u2 = %.17g\nspike mass = %.17g\n"
              "spike growth slope = %.17g (r^2 = %.6f)\n",
              last.step, last.t, last.max_u1, last.max_u2, last.spike_mass_u2, fit.slope, fit.r_squared);
  if (rd.left.u1 != rd.right.u1) std::printf("e0 = %.17g\n", analyze(rd).e0);
  write_lf_summary_csv(snaps, path_in(rc, "lf_summary.csv"));
  CsvWriter w(path_in(rc, "lf_fit.csv"), {"slope", "intercept", "r_squared", "points"});
  w.row({fit.slope, fit.intercept, fit.r_squared, static_cast<double>(fit.points)});
  write_snapshot_csv(last, path_in(rc, "lf_final.csv"));
  if (rc.all_snapshots) {
    for (const auto& s : snaps) write_snapshot_csv(s, path_in(rc, "lf_step_" + std::to_string(s.step) + ".csv"));
  }
  write_gnuplot(rc, "pde.gp", "plot 'lf_final.csv' using 1:2 with lines, '' using 1:3 with lines\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular-shock profiles of the Keyfitz-Kranzer system and their weak limits"};
  app.set_config("--config", "", "key = value configuration file; flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();
  RunConfig rc;

  app.add_option("--uL", rc.uL, "left state u1,u2")->expected(2)->delimiter(',')->capture_default_str();
  app.add_option("--uR", rc.uR, "right state u1,u2")->expected(2)->delimiter(',')->capture_default_str();
  app.add_option("-o,--out", rc.out, "output directory")->capture_default_str();
  app.add_option("--eps", rc.eps, "sweep list start:ratio:end")->capture_default_str();
  app.add_option("--epsilon", rc.epsilon, "profile epsilon")->capture_default_str();
  app.add_option("--ratio", rc.ratio, "continuation ratio for profile")->capture_default_str()->check(CLI::Range(0.05, 0.95));
  app.add_option("--newton-tol", rc.newton_tol, "shooting residual tolerance")->capture_default_str();
  app.add_option("--rtol", rc.rtol, "integrator relative tolerance")->capture_default_str();
  app.add_option("--atol", rc.atol, "integrator absolute tolerance")->capture_default_str();
  app.add_option("--settle-tol", rc.settle_tol, "end-state settle tolerance")->capture_default_str();
  app.add_option("--boundary-tol", rc.boundary_tol, "profile truncation near end states")->capture_default_str();
  app.add_option("--samples-per-step", rc.samples_per_step, "dense samples per integrator step")
      ->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--parallel", rc.parallel, "evaluate Jacobian columns concurrently");
  app.add_option("--iota-sigma", rc.iota_sigma, "inner table half-width")->capture_default_str();
  app.add_option("--iota-grid", rc.iota_grid, "inner table grid step")->capture_default_str();
  app.add_option("--xmin", rc.grid.x_min, "PDE domain left end")->capture_default_str();
  app.add_option("--xmax", rc.grid.x_max, "PDE domain right end")->capture_default_str();
  app.add_option("--cells", rc.grid.cells, "PDE cells")->capture_default_str();
  app.add_option("--cfl", rc.grid.cfl, "CFL number")->capture_default_str();
  app.add_option("--steps", rc.grid.steps, "PDE time steps")->capture_default_str();
  app.add_option("--snapshot-every", rc.grid.snapshot_every, "snapshot cadence")->capture_default_str();
  app.add_option("--window", rc.grid.window_fraction, "spike window half-width / domain length")
      ->capture_default_str();
  app.add_flag("--fixed-dt", rc.grid.fixed_dt, "dt = cfl dx instead of cfl dx / lambda_max");
  app.add_flag("--periodic", rc.grid.periodic, "periodic boundaries");
  app.add_flag("--all-snapshots", rc.all_snapshots, "write every snapshot CSV");
  app.add_flag("--gnuplot", rc.gnuplot, "write a gnuplot script next to the CSV output");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"analyze", "shock speed, w_L, w_R, e0 and hypotheses"},
      {"inner", "inner-layer functions iota1..3 and gamma0"},
      {"outer", "outer layers gamma1, gamma2, linearization and transversality"},
      {"profile", "viscous profile at --epsilon"},
      {"sweep", "epsilon scaling sweep over --eps"},
      {"weaklimit", "layer integrals and distributional pairings over --eps"},
      {"pde", "Lax-Friedrichs run of the Riemann problem"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\nrun '%s --help' for the option list\n", e.what(), argv[0]);
    return kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "analyze") return cmd_analyze(rc);
    if (cmd == "inner") return cmd_inner(rc);
    if (cmd == "outer") return cmd_outer(rc);
    if (cmd == "profile") return cmd_profile(rc);
    if (cmd == "sweep") return cmd_sweep(rc);
    if (cmd == "weaklimit") return cmd_weaklimit(rc);
    if (cmd == "pde") return cmd_pde(rc);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const HypothesisError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitHypothesis;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitSolver;
  }
  return kExitUsage;
}
