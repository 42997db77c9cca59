#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sshock/errors.hpp"
#include "sshock/pde_lf.hpp"

using namespace sshock;

namespace {

// Right state joined to uL by a Lax 1-shock: both Rankine-Hugoniot conditions hold
// and lambda_-(uR) < s < lambda_-(uL), s < lambda_+(uR).
std::pair<State2, double> lax_one_shock(State2 uL, double u1R) {
  const double D = uL.u1 - u1R;
  const double g = (uL.u1 * uL.u1 * uL.u1 - u1R * u1R * u1R) / 3.0 - D;
  // -Delta^2 / D + (u1L + u1R) Delta - g = 0 for Delta = u2L - u2R.
  const double qa = -1.0 / D, qb = uL.u1 + u1R, qc = -g;
  const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  for (double delta : {(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)}) {
    const State2 uR{u1R, uL.u2 - delta};
    const double s = uL.u1 + u1R - delta / D;
    if (uR.u2 > 0.0 && uR.u1 - 1.0 < s && s < uL.u1 - 1.0 && s < uR.u1 + 1.0) return {uR, s};
  }
  return {{0.0, -1.0}, 0.0};
}

GridConfig small_grid(int cells, long steps) {
  GridConfig g;
  g.x_min = -3.0;
  g.x_max = 3.0;
  g.cells = cells;
  g.steps = steps;
  g.snapshot_every = steps / 10;
  g.fixed_dt = true;
  return g;
}

}  // namespace

TEST_CASE("constant data is preserved exactly") {
  GridConfig g;
  g.cells = 200;
  g.steps = 500;
  g.snapshot_every = 100;
  const auto snaps = run_lf({{0.7, 2.0}, {0.7, 2.0}}, g);
  REQUIRE(snaps.size() == 6);
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < s.u1.size(); ++i) {
      CHECK(s.u1[i] == 0.7);
      CHECK(s.u2[i] == 2.0);
    }
    CHECK(s.spike_mass_u2 == 0.0);
  }
  CHECK(snaps.front().step == 0);
  CHECK(snaps.back().step == 500);
  // Adaptive step from the constant speed |u1| + 1.
  CHECK(snaps.back().t == doctest::Approx(500 * 0.05 * (4.0 / 200) / 1.7).epsilon(1e-12));
}

TEST_CASE("periodic runs conserve both components") {
  GridConfig g;
  g.cells = 400;
  g.steps = 2000;
  g.snapshot_every = 200;
  g.periodic = true;
  const auto snaps = run_lf({{2, 6}, {-1.6, 4.56}}, g);
  const double m1 = snaps.front().total_u1, m2 = snaps.front().total_u2;
  for (const auto& s : snaps) {
    CHECK(s.total_u1 == doctest::Approx(m1).epsilon(1e-12));
    CHECK(s.total_u2 == doctest::Approx(m2).epsilon(1e-12));
  }
}

TEST_CASE("outflow mass balance equals the boundary flux") {
  // Edges stay at the initial states, so d/dt sum u dx = f(uL) - f(uR).
  GridConfig g = small_grid(600, 2000);
  const RiemannData rd{{2, 6}, {-1.6, 4.56}};
  const auto snaps = run_lf(rd, g);
  const Vec2 fL = flux(rd.left), fR = flux(rd.right);
  for (const auto& s : snaps) {
    CHECK(s.edge_deviation < 1e-12);
    CHECK(s.total_u1 - snaps.front().total_u1 == doctest::Approx(s.t * (fL[0] - fR[0])).scale(1.0).epsilon(1e-10));
    CHECK(s.total_u2 - snaps.front().total_u2 == doctest::Approx(s.t * (fL[1] - fR[1])).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("singular data: spike grows and sharpens under refinement") {
  const RiemannData rd{{2, 6}, {-1.6, 4.56}};
  const auto coarse = run_lf(rd, small_grid(300, 2000));
  const auto fine = run_lf(rd, small_grid(600, 4000));
  CHECK(fine.back().t == doctest::Approx(coarse.back().t));
  CHECK(fine.back().max_u2 >= coarse.back().max_u2);
  for (std::size_t i = 2; i < fine.size(); ++i) CHECK(fine[i].max_u2 > fine[i - 1].max_u2);
  const GrowthFit fit = fit_spike_growth(fine);
  CHECK(fit.slope == doctest::Approx(0.432).epsilon(0.2));
  CHECK(fit.r_squared > 0.98);
}

TEST_CASE("classical shock stays bounded under refinement") {
  const State2 uL{0.5, 1.0};
  const auto [uR, s] = lax_one_shock(uL, 0.0);
  REQUIRE(uR.u2 > 0.0);
  const RiemannAnalysis a = analyze({uL, uR});
  CHECK(a.s == doctest::Approx(s).epsilon(1e-12));
  CHECK(std::abs(a.e0) < 1e-12);
  const RiemannData rd{uL, uR};
  const auto coarse = run_lf(rd, small_grid(300, 2000));
  const auto fine = run_lf(rd, small_grid(600, 4000));
  const double top = std::max(uL.u2, uR.u2);
  CHECK(coarse.back().max_u2 < top + 1e-3);
  CHECK(fine.back().max_u2 < top + 1e-3);
  CHECK(fit_spike_growth(fine).slope == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
}

TEST_CASE("spike growth fit") {
  std::vector<FieldSnapshot> snaps(12);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    snaps[i].t = 0.1 * i;
    snaps[i].spike_mass_u2 = 0.432 * snaps[i].t;
  }
  GrowthFit f = fit_spike_growth(snaps);
  CHECK(f.slope == doctest::Approx(0.432).epsilon(1e-12));
  CHECK(f.r_squared > 0.999);
  CHECK(f.points == 6);
  for (auto& s : snaps) s.spike_mass_u2 = 1.5;
  f = fit_spike_growth(snaps);
  CHECK(f.slope == 0.0);
  CHECK(f.intercept == doctest::Approx(1.5));
  snaps.resize(8);
  CHECK_THROWS_AS(fit_spike_growth(snaps), InsufficientData);
}

TEST_CASE("grid validation and blow-up") {
  GridConfig g;
  g.cells = 50;
  CHECK_THROWS_AS(run_lf({{2, 6}, {-1.6, 4.56}}, g), std::invalid_argument);
  g = GridConfig{};
  g.cfl = 0.7;
  CHECK_THROWS_AS(run_lf({{2, 6}, {-1.6, 4.56}}, g), std::invalid_argument);
  // A mesh ratio far beyond the speed limit diverges.
  g = small_grid(200, 4000);
  g.cfl = 0.5;
  g.x_min = -0.3;
  g.x_max = 0.3;
  CHECK_THROWS_AS(run_lf({{2, 6}, {-1.6, 4.56}}, g), UnstableBlowup);
}

TEST_CASE("pde csv output") {
  GridConfig g;
  g.cells = 100;
  g.steps = 10;
  g.snapshot_every = 5;
  const auto snaps = run_lf({{2, 6}, {-1.6, 4.56}}, g);
  const auto dir = std::filesystem::temp_directory_path() / "sshock_lf_test";
  std::filesystem::create_directories(dir);
  write_snapshot_csv(snaps.back(), (dir / "snap.csv").string());
  write_lf_summary_csv(snaps, (dir / "sum.csv").string());
  std::ifstream a(dir / "snap.csv"), b(dir / "sum.csv");
  std::string line;
  std::getline(a, line);
  CHECK(line == "x,u1,u2");
  std::getline(b, line);
  CHECK(line == "step,t,max_u1,max_u2,spike_mass");
  int n = 0;
  while (std::getline(b, line)) ++n;
  CHECK(n == 3);
  std::filesystem::remove_all(dir);
}
