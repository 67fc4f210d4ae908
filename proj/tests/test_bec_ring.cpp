#include <gtest/gtest.h>

#include <cmath>

#include "papt/bec_ring.hpp"
#include "papt/errors.hpp"

using namespace papt;
using namespace papt::bec;

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<double> uniform_angles(int n) {
  std::vector<double> th;
  for (int k = 0; k < n; ++k) th.push_back(2.0 * kPi * k / n);
  return th;
}

}  // namespace

TEST(PairModel, Examples) {
  const BecParams p = BecParams::ring(0.5, 2.0);
  const cplx phi0(std::sqrt(p.Phi0_sq), 0.0);
  EXPECT_EQ(classify_regime(pair_model(1, phi0, p), 1e-9), Regime::ExceptionalPoint);

  const BecParams q = BecParams::ring(0.48, 2.0);
  const ModelParams m2 = pair_model(2, phi0, q);
  EXPECT_NEAR(m2.delta, 3.52, 1e-12);
  EXPECT_NEAR(std::abs(m2.kappa), 0.48, 1e-12);
  EXPECT_NEAR(lambda0(m2), std::sqrt(3.52 * 3.52 - 0.48 * 0.48), 1e-12);
  EXPECT_NEAR(lambda0(m2), 3.4871, 1e-4);

  const BecParams free = BecParams::ring(0.0, 2.0);
  const Eigen::Matrix2cd d = bogoliubov_matrix(3, phi0, free);
  EXPECT_EQ(d(0, 0), cplx(9.0, 0.0));
  EXPECT_EQ(d(1, 1), cplx(-9.0, 0.0));
  EXPECT_EQ(d(0, 1), cplx(0.0, 0.0));

  const cplx phi = std::polar(3.0, 0.4);
  BecParams g = free;
  g.g = 0.1;
  const Eigen::Matrix2cd b = bogoliubov_matrix(1, phi, g);
  EXPECT_NEAR(std::abs(b(0, 1) - kI * 0.1 * phi * phi), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(b(1, 0) - kI * 0.1 * std::conj(phi * phi)), 0.0, 1e-14);
  EXPECT_NEAR(b(0, 0).real(), 1.0 - 0.9, 1e-14);
  EXPECT_THROW(bogoliubov_matrix(0, phi, g), InputError);
}

TEST(PairMoments, Examples) {
  const PairMoments vac = pair_moments(PairMatrix{}, 0.0, 0.0);
  EXPECT_EQ(vac.normal_p, 0.0);
  EXPECT_EQ(std::abs(vac.anomalous), 0.0);

  const PairMatrix m{cplx(1.2, 0.3), cplx(0.5, -0.6)};
  const PairMoments pm = pair_moments(m, cplx(0.4, 0.1), cplx(-0.2, 0.7));
  const auto beta = coherent_part(m, cplx(0.4, 0.1), cplx(-0.2, 0.7));
  EXPECT_NEAR(pm.normal_p, std::norm(beta[0]) + std::norm(m.B), 1e-15);
  EXPECT_NEAR(pm.normal_m, std::norm(beta[1]) + std::norm(m.B), 1e-15);
  EXPECT_NEAR(std::abs(pm.anomalous - (beta[0] * beta[1] + m.A * m.B)), 0.0, 1e-15);
  EXPECT_GE(pm.normal_p, std::norm(m.B));
}

TEST(Dynamics, FreeRotationWithoutInteraction) {
  BecParams p = BecParams::ring(0.0, 1.5);
  p.n_max = 3;
  const double t = 0.5 * kPi;
  const Trajectory tr = integrate(p, t, t);
  const PairMatrix& m = tr.final_state.M[0];
  EXPECT_NEAR(std::abs(m.A - std::polar(1.0, -t)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(m.B), 0.0, 1e-15);
  const PairMoments pm = pair_moments(m, p.alpha_p1, p.alpha_m1);
  EXPECT_NEAR(pm.normal_p, 1.5 * 1.5, 1e-9);
  EXPECT_NEAR(std::abs(pm.anomalous - std::polar(1.5 * 1.5, kPi / 2.0 - 2.0 * t)), 0.0, 1e-9);
  const Observables o = observe(tr.final_state, p);
  EXPECT_NEAR(o.X_p1, 1.5, 1e-9);
  EXPECT_NEAR(o.P_p1, 0.0, 1e-9);
  EXPECT_NEAR(std::abs(tr.final_state.Phi - std::sqrt(p.Phi0_sq)), 0.0, 1e-9);
}

TEST(Dynamics, FrozenCondensateMatchesTwoModeSolution) {
  BecParams p = BecParams::ring(0.48, 2.0);
  p.back_action = false;
  p.dt = 3e-5;
  const double t = 12.0;
  const Trajectory tr = integrate(p, t, t);
  const cplx phi0(std::sqrt(p.Phi0_sq), 0.0);
  for (int n = 1; n <= p.n_max; ++n) {
    const TransferCoeffs c = transfer_coeffs(pair_model(n, phi0, p), t);
    const PairMatrix& m = tr.final_state.M[n - 1];
    EXPECT_NEAR(std::abs(m.A - c.A), 0.0, 1e-9) << n;
    EXPECT_NEAR(std::abs(m.B - c.B), 0.0, 1e-9) << n;
  }
  EXPECT_EQ(tr.final_state.Phi, phi0);
}

TEST(Dynamics, InvariantsAlongTrajectory) {
  const BecParams p = BecParams::ring(0.48, 2.0);
  const Trajectory tr = integrate(p, 30.0, 0.05);
  const double atoms0 = tr.rows.front().total_atoms;
  for (const Observables& o : tr.rows) {
    EXPECT_LT(o.max_symplectic_defect, 1e-8);
    EXPECT_NEAR(o.total_atoms / atoms0, 1.0, 1e-9);
  }
  EXPECT_LT(tr.max_condensate_change, 1e-3);
  EXPECT_GT(tr.max_condensate_change, 0.0);

  // Higher pairs sit deeper in the stable region and squeeze less.
  std::vector<double> s_max(p.n_max, 0.0);
  for (const Observables& o : tr.rows) {
    for (int k = 0; k < p.n_max; ++k) s_max[k] = std::max(s_max[k], o.S[k]);
  }
  for (int k = 1; k < p.n_max; ++k) EXPECT_LT(s_max[k], s_max[k - 1]) << k;

  // S_1 returns to 1 after one period π/λ₀ of the n = 1 pair.
  const double period = kPi / lambda0(pair_model(1, cplx(std::sqrt(p.Phi0_sq), 0.0), p));
  double t_min = 0.0;
  double s_min = INFINITY;
  for (const Observables& o : tr.rows) {
    if (o.t > 0.5 * period && o.t < 1.5 * period && o.S[0] < s_min) {
      s_min = o.S[0];
      t_min = o.t;
    }
  }
  EXPECT_NEAR(t_min / period, 1.0, 0.02);
}

TEST(Dynamics, AttractiveInteractionDepletesCondensate) {
  const Trajectory tr = integrate(BecParams::ring(0.465, 20.0), 10.0, 0.1);
  EXPECT_GT(tr.max_depletion, 0.0);
  EXPECT_LT(tr.max_depletion, 0.05);
  EXPECT_GT(tr.dt_used, 0.0);
  for (const Observables& o : tr.rows) {
    const PairMoments pm = pair_moments(tr.final_state.M[0], 0.0, 0.0);
    EXPECT_GE(pm.normal_p, 0.0);
    EXPECT_GE(o.depletion_fraction, -1e-9);
  }
}

TEST(Step, ErrorsAndHalving) {
  const BecParams p = BecParams::ring(0.48, 2.0);
  BecState s = BecState::initial(p);
  const StepOutcome coarse = step(s, p, 0.5, 1e-3);
  const StepOutcome fine = step(s, p, 0.5, 1e-11);
  EXPECT_GT(fine.halvings, coarse.halvings);
  EXPECT_DOUBLE_EQ(fine.state.t, 0.5);

  s.Phi = cplx(NAN, 0.0);
  EXPECT_THROW(step(s, p, 0.1, 1e-10), StepSizeError);

  BecParams bad = p;
  bad.n_max = 2;
  EXPECT_THROW(integrate(bad, 1.0, 0.1), InputError);
  EXPECT_THROW(integrate(p, 1.0, 0.0), InputError);
  EXPECT_THROW(integrate(p, -1.0, 0.1), InputError);
}

TEST(Density, Examples) {
  const BecParams p = BecParams::ring(0.46, 20.0);
  const DensityProfile d0 = density_profile(BecState::initial(p), uniform_angles(360), p);
  for (double r : d0.rho) EXPECT_NEAR(r, 1.0, 1e-15);
  EXPECT_NEAR(d0.visibility, 0.0, 1e-15);

  BecParams free = BecParams::ring(0.0, 20.0);
  free.n_max = 3;
  const Trajectory tr = integrate(free, 0.5 * kPi, 0.5 * kPi);
  const DensityProfile d = density_profile(tr.final_state, uniform_angles(360), free);
  const double amp = 4.0 * 20.0 / (std::sqrt(free.Phi0_sq) * std::sqrt(2.0 * kPi));
  for (std::size_t k = 0; k < d.theta.size(); ++k) {
    EXPECT_NEAR(d.rho[k], 1.0 + amp * std::cos(d.theta[k]), 1e-9);
  }
  EXPECT_NEAR(d.visibility, amp, 1e-9);
  EXPECT_NEAR(d.X_p1, 20.0, 1e-8);
  EXPECT_THROW(density_profile(tr.final_state, {}, free), InputError);
}

TEST(Sweep, FlagsExceptionalPointAndDifferentiates) {
  BecParams base = BecParams::ring(0.0, 2.0);
  base.n_max = 4;
  const std::vector<double> grid{0.40, 0.44, 0.50, 0.52};
  const auto pts = sensing_sweep(base, grid, 3.0, 2);
  ASSERT_EQ(pts.size(), grid.size());
  EXPECT_FALSE(pts[0].flagged);
  EXPECT_FALSE(pts[1].flagged);
  EXPECT_TRUE(pts[2].flagged);
  EXPECT_TRUE(pts[3].flagged);
  EXPECT_NEAR(pts[0].chi_g, (pts[1].X - pts[0].X) / 0.04, 1e-12);
  const double h0 = 0.06, h1 = 0.02;
  const double central = (h0 * h0 * pts[3].X - h1 * h1 * pts[1].X - (h0 * h0 - h1 * h1) * pts[2].X) /
                         (h0 * h1 * (h0 + h1));
  EXPECT_NEAR(pts[2].chi_g, central, 1e-9);

  const auto serial = sensing_sweep(base, grid, 3.0, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(serial[i].X, pts[i].X);

  EXPECT_THROW(sensing_sweep(base, {0.4}, 3.0), InputError);
  EXPECT_THROW(sensing_sweep(base, {0.4, 0.4}, 3.0), InputError);
  EXPECT_THROW(sensing_sweep(base, {0.45, 0.4}, 3.0), InputError);
}

TEST(Convergence, CutoffDoublingLeavesQuadratureUnchanged) {
  for (double g : {0.46, 0.462, 0.465, 0.468}) {
    const BecParams coarse = BecParams::ring(g, 20.0, 1e5, 10);
    const BecParams fine = BecParams::ring(g, 20.0, 1e5, 20);
    const double x10 = observe(integrate(coarse, 30.0, 30.0).final_state, coarse).X_p1;
    const double x20 = observe(integrate(fine, 30.0, 30.0).final_state, fine).X_p1;
    EXPECT_LT(std::abs(x20 - x10) / std::abs(x20), 1e-6) << "gPhi0^2 = " << g;
  }
}
