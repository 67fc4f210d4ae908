#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "papt/errors.hpp"
#include "papt/fock_oracle.hpp"

using namespace papt;
using namespace papt::fock;

namespace {

constexpr cplx kI{0.0, 1.0};

cplx entry(const SparseOperator& h, const FockBasis& b, std::pair<int, int> row, std::pair<int, int> col) {
  return h.coeff(static_cast<Eigen::Index>(*b.index(row.first, row.second)),
                 static_cast<Eigen::Index>(*b.index(col.first, col.second)));
}

// Sector size keeping the thermal pair tail e^{-N/(n+1)} below 1e-13.
int pairs_for(double n_mean) { return static_cast<int>(30.0 * (n_mean + 1.0)) + 100; }

FockState evolved_vacuum(const ModelParams& p, double t, int pairs = 0, double U = 0.0) {
  if (pairs == 0) pairs = pairs_for(std::norm(transfer_coeffs(p, t).B));
  const FockBasis b = FockBasis::pair_sector(pairs);
  return evolve(prepare_state(b, Vacuum{}), build_hamiltonian(p, {U}, b), t);
}

}  // namespace

TEST(Basis, IndexingRoundTrip) {
  const FockBasis full = FockBasis::full(4, 6);
  EXPECT_EQ(full.size(), 35u);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const auto [n1, n2] = full.occupations(i);
    EXPECT_EQ(full.index(n1, n2), i);
  }
  EXPECT_FALSE(full.index(5, 0).has_value());

  const FockBasis sec = FockBasis::pair_sector(10, 2);
  EXPECT_EQ(sec.size(), 11u);
  for (std::size_t i = 0; i < sec.size(); ++i) {
    const auto [n1, n2] = sec.occupations(i);
    EXPECT_EQ(n1 - n2, 2);
    EXPECT_EQ(sec.index(n1, n2), i);
  }
  EXPECT_FALSE(sec.index(1, 1).has_value());
  EXPECT_THROW(FockBasis::full(0, 3), InputError);
}

TEST(Hamiltonian, Examples) {
  const FockBasis b = FockBasis::full(3, 3);
  const SparseOperator h = build_hamiltonian({0.7, 0.0}, {}, b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto [n1, n2] = b.occupations(i);
    EXPECT_EQ(h.coeff(i, i), cplx(0.7 * (n1 + n2), 0.0));
  }

  const FockBasis s = FockBasis::pair_sector(1);
  const SparseOperator h2 = build_hamiltonian({1.0, 0.5}, {}, s);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(entry(h2, s, {1, 1}, {0, 0}), 0.5 * kI);
  EXPECT_EQ(entry(h2, s, {0, 0}, {1, 1}), -0.5 * kI);
  EXPECT_EQ(entry(h2, s, {1, 1}, {1, 1}), cplx(2.0, 0.0));

  const FockBasis k = FockBasis::pair_sector(5);
  const SparseOperator hk = build_hamiltonian({1.0, 0.0}, {0.01}, k);
  for (int n = 0; n <= 5; ++n) EXPECT_NEAR(entry(hk, k, {n, n}, {n, n}).real(), 2.0 * n + 0.01 * n * n, 1e-15);

  const FockBasis f = FockBasis::full(4, 4);
  const SparseOperator hc = build_hamiltonian({0.3, cplx(0.2, -0.4)}, {}, f);
  EXPECT_NEAR(std::abs(entry(hc, f, {3, 2}, {2, 1}) - kI * cplx(0.2, -0.4) * std::sqrt(6.0)), 0.0, 1e-15);
  EXPECT_THROW(build_hamiltonian({1.0, 0.5}, {-1e-3}, f), InputError);
}

TEST(Hamiltonian, Hermitian) {
  const FockBasis b = FockBasis::full(9, 7);
  const SparseOperator h = build_hamiltonian({-0.4, cplx(0.3, 0.8)}, {0.05}, b);
  const SparseOperator ha = h.adjoint();
  EXPECT_LT((h - ha).norm(), 1e-15);
}

TEST(PrepareState, Examples) {
  const FockBasis s = FockBasis::pair_sector(60);
  const cplx q = kI / 3.0;
  const FockState ps = prepare_state(s, PairSqueezed{q});
  const double c0 = std::sqrt(1.0 - std::norm(q));
  for (int n = 0; n < 5; ++n) {
    EXPECT_NEAR(std::abs(ps.amplitudes(*s.index(n, n)) - c0 * std::pow(q, n)), 0.0, 1e-15);
  }
  EXPECT_NEAR(ps.norm(), 1.0, 1e-14);

  const FockBasis f = FockBasis::full(30, 30);
  const FockState coh = prepare_state(f, Coherent{cplx(0.0, 2.0), cplx(2.0, 0.0)});
  EXPECT_NEAR(coh.norm(), 1.0, 1e-14);
  const MomentTable m = moments(coh);
  EXPECT_NEAR(std::abs(m.a1 - cplx(0.0, 2.0)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(m.a2 - cplx(2.0, 0.0)), 0.0, 1e-6);
  EXPECT_NEAR(m.n1, 4.0, 1e-5);

  const FockState vac = prepare_state(f, Vacuum{});
  EXPECT_EQ(vac.amplitudes(*f.index(0, 0)), cplx(1.0, 0.0));
  EXPECT_EQ(vac.amplitudes.squaredNorm(), 1.0);
}

TEST(PrepareState, Errors) {
  EXPECT_THROW(prepare_state(FockBasis::pair_sector(10), Coherent{1.0, 1.0}), InputError);
  EXPECT_THROW(prepare_state(FockBasis::full(10, 10), Coherent{3.0, 0.0}), TruncationError);
  EXPECT_THROW(prepare_state(FockBasis::pair_sector(10), PairSqueezed{0.9}), TruncationError);
  EXPECT_THROW(prepare_state(FockBasis::pair_sector(10), PairSqueezed{1.0}), InputError);
  EXPECT_THROW(prepare_state(FockBasis::pair_sector(10, 1), PairSqueezed{0.1}), InputError);
  EXPECT_THROW(prepare_state(FockBasis::pair_sector(10, 1), Vacuum{}), InputError);
}

TEST(Propagator, ChebyshevAndRk4MatchDenseExponential) {
  const FockBasis b = FockBasis::full(11, 11);
  const FockState psi = prepare_state(b, Coherent{cplx(0.3, 0.2), cplx(-0.1, 0.4)});
  const SparseOperator h = build_hamiltonian({1.0, 0.7}, {0.3}, b);
  const double t = 4.0;
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(h);
  const Eigen::MatrixXcd u = (Eigen::MatrixXcd(-kI * t * dense)).exp();
  const Eigen::VectorXcd ref = u * psi.amplitudes;

  StepControl cheb;
  cheb.throw_on_truncation = false;
  StepControl rk4 = cheb;
  rk4.method = Integrator::Rk4;
  EXPECT_LT((evolve(psi, h, t, cheb).amplitudes - ref).norm(), 1e-11);
  EXPECT_LT((evolve(psi, h, t, rk4).amplitudes - ref).norm(), 1e-8);
}

TEST(Propagator, ConservesNormEnergyAndSector) {
  const FockBasis b = FockBasis::full(40, 40);
  const FockState vac = prepare_state(b, Vacuum{});
  const SparseOperator h = build_hamiltonian({1.0, 0.9}, {0.02}, b);
  const FockState out = evolve(vac, h, 7.0);
  EXPECT_LT(std::abs(out.norm() - 1.0), 1e-9);
  EXPECT_NEAR(energy(out, h), energy(vac, h), 1e-9);
  double off_sector = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto [n1, n2] = b.occupations(i);
    if (n1 != n2) off_sector += std::norm(out.amplitudes(i));
  }
  EXPECT_LT(off_sector, 1e-28);

  const FockState coh = prepare_state(b, Coherent{cplx(0.5, 0.5), cplx(0.7, -0.2)});
  const FockState cout_ = evolve(coh, h, 3.0);
  EXPECT_LT(std::abs(cout_.norm() - 1.0), 1e-9);
  EXPECT_NEAR(energy(cout_, h) / energy(coh, h), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(cout_.time, 3.0);
}

TEST(Moments, EvolvedStatesMatchTransferCoefficients) {
  for (ModelParams p : {ModelParams{1.0, 0.95}, ModelParams{1.0, 1.0}, ModelParams{1.0, 1.05}, ModelParams{-0.6, 0.4}}) {
    for (double t : {0.7, 3.0, 6.0}) {
      const TransferCoeffs c = transfer_coeffs(p, t);
      const MomentTable m = moments(evolved_vacuum(p, t));
      EXPECT_NEAR(std::abs(m.a1a2 - c.A * c.B) / std::max(1.0, std::abs(c.A * c.B)), 0.0, 1e-9);
      EXPECT_NEAR(m.n1 / std::max(1.0, std::norm(c.B)), std::norm(c.B) / std::max(1.0, std::norm(c.B)), 1e-9);
      EXPECT_NEAR(m.n2, m.n1, 1e-9 * std::max(1.0, m.n1));
    }
  }

  const ModelParams p{1.0, 0.8};
  const FockBasis b = FockBasis::full(80, 80);
  const CoherentPair a{cplx(0.4, 0.3), cplx(-0.2, 0.5)};
  const FockState out = evolve(prepare_state(b, Coherent{a.alpha1, a.alpha2}), build_hamiltonian(p, {}, b), 2.0);
  const TransferCoeffs c = transfer_coeffs(p, 2.0);
  const MomentTable m = moments(out);
  EXPECT_NEAR(std::abs(m.a1 - (c.A * a.alpha1 + c.B * std::conj(a.alpha2))), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(m.a2 - (c.A * a.alpha2 + c.B * std::conj(a.alpha1))), 0.0, 1e-9);
  const MomentTable cm = m.central();
  EXPECT_NEAR(std::abs(cm.a1a2 - c.A * c.B), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(cm.a1a1), 0.0, 1e-9);
  EXPECT_NEAR(cm.n1, std::norm(c.B), 1e-9);
}

TEST(SqueezeFromMoments, Examples) {
  EXPECT_NEAR(squeeze_factor_from_moments(MomentTable{}).S, 1.0, 1e-15);
  const ModelParams p{1.0, 0.95};
  const double half = 0.5 * kPi / lambda0(p);
  EXPECT_NEAR(squeeze_factor_from_moments(moments(evolved_vacuum(p, half))).S, std::sqrt(39.0), 1e-6);
  EXPECT_NEAR(squeeze_factor_from_moments(moments(evolved_vacuum({1.0, 1.0}, 2.0))).S, std::sqrt(5.0) + 2.0, 1e-6);

  MomentTable bad;
  bad.a1a2 = 5.0;
  EXPECT_THROW(squeeze_factor_from_moments(bad), InputError);
}

TEST(SqueezeFromMoments, OptimalAngleMinimizesVariance) {
  // Var[X1(φ) ± X2(φ)] from b = a1 ± a2: ¼(2Re[e^{-2iφ}⟨b²⟩] + ⟨b†b + bb†⟩).
  auto variance = [](const MomentTable& m, double phi, int sign) {
    const cplx bb = m.a1a1 + m.a2a2 + 2.0 * double(sign) * m.a1a2;
    const double sym = 2.0 * (m.n1 + m.n2) + 2.0 + 4.0 * sign * m.a1dag_a2.real();
    return 0.25 * (2.0 * std::real(std::polar(1.0, -2.0 * phi) * bb) + sym);
  };
  for (ModelParams p : {ModelParams{1.0, 0.6}, ModelParams{-0.7, cplx(0.2, 0.3)}}) {
    for (double t : {0.8, 2.3, 4.1}) {
      const MomentTable m = moments(evolved_vacuum(p, t)).central();
      const SqueezeEstimate e = squeeze_factor_from_moments(m);
      double vmin = INFINITY, vmax = 0.0;
      for (int k = 0; k < 20000; ++k) {
        const double phi = kPi * k / 20000.0;
        for (int sign : {1, -1}) {
          vmin = std::min(vmin, variance(m, phi, sign));
          vmax = std::max(vmax, variance(m, phi, sign));
        }
      }
      EXPECT_NEAR(variance(m, e.phi_opt, e.sign), vmin, 1e-6 * vmin);
      EXPECT_NEAR(std::pow(vmax / vmin, 0.25), e.S, 1e-6 * e.S);
    }
  }
}

TEST(Equivalence, KerrFreeTracksClosedForm) {
  const std::vector<ModelParams> cases{{1.0, 0.5}, {1.0, 0.95}, {1.0, 1.0}, {1.0, 1.05}, {-0.8, 0.3}};
  for (const auto& p : cases) {
    std::vector<double> times;
    double n_max = 0.0;
    for (int k = 1; k <= 12; ++k) {
      times.push_back(0.5 * k);
      n_max = std::max(n_max, std::norm(transfer_coeffs(p, times.back()).B));
    }
    const FockBasis b = FockBasis::pair_sector(pairs_for(n_max));
    const auto rows = evolve_trace(prepare_state(b, Vacuum{}), build_hamiltonian(p, {}, b), times);
    ASSERT_EQ(rows.size(), times.size());
    for (const auto& r : rows) {
      const double s = squeeze_summary(p, r.t).S;
      EXPECT_NEAR(r.S_num, s, 1e-6 * std::max(1.0, s)) << p.delta << " " << p.kappa << " " << r.t;
      EXPECT_LT(std::abs(r.norm_drift), 1e-9);
    }
  }
}

TEST(Equivalence, StateIsPairSqueezedWithTransferRatio) {
  const ModelParams p{1.0, 0.95};
  const FockBasis b = FockBasis::pair_sector(500);
  const SparseOperator h = build_hamiltonian(p, {}, b);
  FockState psi = prepare_state(b, Vacuum{});
  for (double t : {1.0, 5.0, 12.0, 30.0}) {
    psi = evolve(psi, h, t - psi.time);
    const TransferCoeffs c = transfer_coeffs(p, t);
    const FockState ref = prepare_state(b, PairSqueezed{c.B / std::conj(c.A)});
    EXPECT_NEAR(fidelity(psi, ref), 1.0, 1e-10) << t;
  }
}

TEST(Equivalence, UncoupledVacuumIsStationary) {
  const FockBasis b = FockBasis::full(6, 6);
  const FockState vac = prepare_state(b, Vacuum{});
  const FockState out = evolve(vac, build_hamiltonian({1.3, 0.0}, {0.1}, b), 17.0);
  EXPECT_NEAR(fidelity(out, vac), 1.0, 1e-12);
}

TEST(Truncation, ThrowsWhenTopLevelsPopulate) {
  const FockBasis b = FockBasis::pair_sector(20);
  const SparseOperator h = build_hamiltonian({1.0, 1.0}, {}, b);
  EXPECT_THROW(evolve(prepare_state(b, Vacuum{}), h, 10.0), TruncationError);
  EXPECT_THROW(evolve_trace(prepare_state(b, Vacuum{}), h, {1.0, 10.0}), TruncationError);
  StepControl lax;
  lax.throw_on_truncation = false;
  EXPECT_GT(top_population(evolve(prepare_state(b, Vacuum{}), h, 10.0, lax), 0.05), 1e-8);
  const FockBasis big = FockBasis::pair_sector(300);
  EXPECT_THROW(evolve_trace(prepare_state(big, Vacuum{}), build_hamiltonian({1.0, 1.0}, {}, big), {2.0, 1.0}),
               InputError);
}

TEST(Kerr, WeakKerrPerturbsSqueezingSlightly) {
  const ModelParams p{1.0, 0.95};
  const double t = 0.5 * kPi / lambda0(p);
  const double s0 = squeeze_factor_from_moments(moments(evolved_vacuum(p, t, 500))).S;
  const double s1 = squeeze_factor_from_moments(moments(evolved_vacuum(p, t, 500, 1e-6))).S;
  EXPECT_NE(s0, s1);
  EXPECT_LT(std::abs(s1 - s0) / s0, 1e-3);
}
