#include "papt/bec_ring.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "papt/errors.hpp"

namespace papt::bec {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kMaxHalvings = 30;
/// Per-step limit never drops below the rounding noise of one RK4 step.
constexpr double kDefectFloor = 1e-13;
const cplx kQuadraturePhase = std::polar(1.0, kPi / 4.0);  // e^{−iφ} at φ = −π/4

struct Derivative {
  cplx dPhi;
  std::vector<PairMatrix> dM;
};

Derivative rhs(const BecState& s, const BecParams& p) {
  Derivative d;
  d.dM.resize(s.M.size());
  const double phi_sq = std::norm(s.Phi);
  const cplx kappa = p.g * s.Phi * s.Phi;

  cplx anomalous_sum{0.0, 0.0};
  double normal_sum = 0.0;
  for (std::size_t k = 0; k < s.M.size(); ++k) {
    const PairMatrix& m = s.M[k];
    const double n = static_cast<double>(k + 1);
    const double delta = n * n * p.E1 - p.g * phi_sq;
    d.dM[k].A = -kI * (delta * m.A + kI * kappa * std::conj(m.B));
    d.dM[k].B = -kI * (delta * m.B + kI * kappa * std::conj(m.A));

    if (p.back_action) {
      const cplx ap = k == 0 ? p.alpha_p1 : cplx(0.0, 0.0);
      const cplx am = k == 0 ? p.alpha_m1 : cplx(0.0, 0.0);
      const PairMoments pm = pair_moments(m, ap, am);
      // ⟨ψ̂_nψ̂_{−n}⟩ and ⟨ψ̂_{−n}ψ̂_n⟩ both enter the sum over ±n.
      anomalous_sum += 2.0 * pm.anomalous;
      normal_sum += pm.normal_p + pm.normal_m;
    }
  }
  if (p.back_action) {
    const double c = p.g / (2.0 * kPi);
    d.dPhi = -kI * (-kI * c * anomalous_sum * std::conj(s.Phi) - c * normal_sum * s.Phi);
  }
  return d;
}

BecState axpy(const BecState& s, double h, const Derivative& d) {
  BecState out = s;
  out.Phi += h * d.dPhi;
  for (std::size_t k = 0; k < s.M.size(); ++k) {
    out.M[k].A += h * d.dM[k].A;
    out.M[k].B += h * d.dM[k].B;
  }
  out.t += h;
  return out;
}

double max_defect_change(const BecState& a, const BecState& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.M.size(); ++k) {
    worst = std::max(worst, std::abs(b.M[k].symplectic_form() - a.M[k].symplectic_form()));
  }
  return worst;
}

}  // namespace

BecParams BecParams::ring(double g_phi0_sq, double alpha, double Phi0_sq, int n_max) {
  BecParams p;
  p.Phi0_sq = Phi0_sq;
  p.g = g_phi0_sq / Phi0_sq;
  p.n_max = n_max;
  p.alpha_p1 = std::polar(alpha, kPi / 4.0);
  p.alpha_m1 = p.alpha_p1;
  return p;
}

void BecParams::validate() const {
  if (!(E1 > 0.0)) throw InputError("BecParams: E1 must be positive");
  if (!(Phi0_sq > 0.0)) throw InputError("BecParams: Phi0_sq must be positive");
  if (n_max < 3) throw InputError("BecParams: n_max must be at least 3");
  if (!(dt > 0.0)) throw InputError("BecParams: dt must be positive");
  if (!std::isfinite(g)) throw InputError("BecParams: g must be finite");
  if (!(defect_tol > 0.0) || !(drift_budget > 0.0)) {
    throw InputError("BecParams: defect tolerances must be positive");
  }
}

BecState BecState::initial(const BecParams& params) {
  params.validate();
  BecState s;
  s.Phi = cplx(std::sqrt(params.Phi0_sq), 0.0);
  s.M.assign(params.n_max, PairMatrix{});
  return s;
}

Eigen::Matrix2cd bogoliubov_matrix(int n, cplx Phi, const BecParams& params) {
  if (n < 1) throw InputError("bogoliubov_matrix: n must be positive");
  const ModelParams m = pair_model(n, Phi, params);
  return dynamical_matrix(m);
}

ModelParams pair_model(int n, cplx Phi, const BecParams& params) {
  const double dn = static_cast<double>(n);
  return {dn * dn * params.E1 - params.g * std::norm(Phi), params.g * Phi * Phi};
}

std::array<cplx, 2> coherent_part(const PairMatrix& m, cplx alpha_p, cplx alpha_m) {
  return {m.A * alpha_p + m.B * std::conj(alpha_m), m.A * alpha_m + m.B * std::conj(alpha_p)};
}

PairMoments pair_moments(const PairMatrix& m, cplx alpha_p, cplx alpha_m) {
  const auto beta = coherent_part(m, alpha_p, alpha_m);
  PairMoments pm;
  const double floor = std::norm(m.B);
  pm.normal_p = std::norm(beta[0]) + floor;
  pm.normal_m = std::norm(beta[1]) + floor;
  pm.anomalous = beta[0] * beta[1] + m.A * m.B;
  return pm;
}

BecState rk4_step(const BecState& s, const BecParams& p, double dt) {
  const Derivative k1 = rhs(s, p);
  const Derivative k2 = rhs(axpy(s, 0.5 * dt, k1), p);
  const Derivative k3 = rhs(axpy(s, 0.5 * dt, k2), p);
  const Derivative k4 = rhs(axpy(s, dt, k3), p);
  BecState out = s;
  out.Phi += dt / 6.0 * (k1.dPhi + 2.0 * k2.dPhi + 2.0 * k3.dPhi + k4.dPhi);
  for (std::size_t k = 0; k < s.M.size(); ++k) {
    out.M[k].A += dt / 6.0 * (k1.dM[k].A + 2.0 * k2.dM[k].A + 2.0 * k3.dM[k].A + k4.dM[k].A);
    out.M[k].B += dt / 6.0 * (k1.dM[k].B + 2.0 * k2.dM[k].B + 2.0 * k3.dM[k].B + k4.dM[k].B);
  }
  out.t = s.t + dt;
  return out;
}

StepOutcome step(const BecState& state, const BecParams& params, double dt, double defect_limit,
                 int halvings) {
  if (!std::isfinite(std::abs(state.Phi))) throw StepSizeError("bec step: state is non-finite");
  for (int h = std::max(halvings, 0); h <= kMaxHalvings; ++h) {
    const long pieces = 1L << h;
    const double sub = dt / static_cast<double>(pieces);
    BecState s = state;
    for (long i = 0; i < pieces; ++i) s = rk4_step(s, params, sub);
    s.t = state.t + dt;
    if (max_defect_change(state, s) < defect_limit && std::isfinite(std::abs(s.Phi))) {
      return {std::move(s), h};
    }
  }
  throw StepSizeError("bec step: symplectic defect stays above limit after " +
                      std::to_string(kMaxHalvings) + " halvings");
}

Observables observe(const BecState& state, const BecParams& params) {
  Observables o;
  o.t = state.t;
  o.Phi = state.Phi;
  o.S.reserve(state.M.size());
  double atoms = 2.0 * kPi * std::norm(state.Phi);
  for (std::size_t k = 0; k < state.M.size(); ++k) {
    const PairMatrix& m = state.M[k];
    o.S.push_back(std::abs(m.A) + std::abs(m.B));
    o.max_symplectic_defect = std::max(o.max_symplectic_defect, std::abs(m.symplectic_form() - 1.0));
    const cplx ap = k == 0 ? params.alpha_p1 : cplx(0.0, 0.0);
    const cplx am = k == 0 ? params.alpha_m1 : cplx(0.0, 0.0);
    const PairMoments pm = pair_moments(m, ap, am);
    atoms += pm.normal_p + pm.normal_m;
  }
  const cplx beta = coherent_part(state.M[0], params.alpha_p1, params.alpha_m1)[0];
  const cplx rotated = kQuadraturePhase * beta;
  o.X_p1 = rotated.real();
  o.P_p1 = rotated.imag();
  o.X_p1_rel = (rotated * std::polar(1.0, -std::arg(state.Phi))).real();
  o.depletion_fraction = 1.0 - std::norm(state.Phi) / params.Phi0_sq;
  o.total_atoms = atoms;
  return o;
}

Trajectory integrate(const BecParams& params, double t_end, double record_every) {
  params.validate();
  if (!(t_end >= 0.0)) throw InputError("integrate: t_end must be non-negative");
  if (!(record_every > 0.0)) throw InputError("integrate: record interval must be positive");

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_end / params.dt - 1e-9)));
  const double h = t_end > 0.0 ? t_end / static_cast<double>(steps) : 0.0;
  const long every = std::max(1L, static_cast<long>(std::llround(record_every / std::max(h, 1e-300))));
  const double budget = t_end > 0.0 ? params.drift_budget * h / t_end : params.defect_tol;
  const double limit = std::max(std::min(params.defect_tol, budget), kDefectFloor);

  Trajectory traj;
  BecState s = BecState::initial(params);
  traj.rows.push_back(observe(s, params));
  int halvings = 0;
  if (t_end > 0.0) {
    for (long i = 1; i <= steps; ++i) {
      StepOutcome out = step(s, params, h, limit, halvings);
      halvings = out.halvings;
      s = std::move(out.state);
      s.t = h * static_cast<double>(i);
      const double ratio = std::norm(s.Phi) / params.Phi0_sq;
      traj.max_depletion = std::max(traj.max_depletion, 1.0 - ratio);
      traj.max_condensate_change = std::max(traj.max_condensate_change, std::abs(1.0 - ratio));
      if (i % every == 0 || i == steps) traj.rows.push_back(observe(s, params));
    }
  }
  traj.dt_used = h / static_cast<double>(1L << halvings);
  traj.final_state = std::move(s);
  return traj;
}

DensityProfile density_profile(const BecState& state, const std::vector<double>& theta,
                               const BecParams& params) {
  if (theta.empty()) throw InputError("density_profile: empty angle grid");
  if (state.M.empty()) throw InputError("density_profile: state has no pair modes");
  const auto beta = coherent_part(state.M[0], params.alpha_p1, params.alpha_m1);
  const double amp = std::abs(state.Phi);
  if (!(amp > 0.0)) throw InputError("density_profile: condensate amplitude vanished");
  const cplx frame = kQuadraturePhase * std::polar(1.0, -std::arg(state.Phi));
  const double scale = 2.0 / (amp * std::sqrt(2.0 * kPi));

  DensityProfile d;
  d.theta = theta;
  d.rho.reserve(theta.size());
  for (double th : theta) {
    const cplx mod = beta[0] * std::polar(1.0, th) + beta[1] * std::polar(1.0, -th);
    d.rho.push_back(1.0 + scale * (frame * mod).real());
  }
  const auto [lo, hi] = std::minmax_element(d.rho.begin(), d.rho.end());
  d.visibility = (*hi - *lo) / (*hi + *lo);
  const cplx rotated = kQuadraturePhase * beta[0];
  d.X_p1 = rotated.real();
  d.P_p1 = rotated.imag();
  return d;
}

std::vector<SweepPoint> sensing_sweep(const BecParams& base, const std::vector<double>& g_phi0_sq,
                                      double t, unsigned threads) {
  base.validate();
  if (g_phi0_sq.size() < 2) throw InputError("sensing_sweep: grid needs at least two points");
  for (std::size_t i = 1; i < g_phi0_sq.size(); ++i) {
    if (!(g_phi0_sq[i] > g_phi0_sq[i - 1])) {
      throw InputError("sensing_sweep: grid must be strictly increasing");
    }
  }

  std::vector<double> theta(721);
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 2.0 * kPi * i / (theta.size() - 1);

  std::vector<SweepPoint> out(g_phi0_sq.size());
  auto run = [&](std::size_t i) {
    BecParams p = base;
    p.g = g_phi0_sq[i] / base.Phi0_sq;
    const Trajectory traj = integrate(p, t, std::max(t, 1.0));
    SweepPoint& pt = out[i];
    pt.g_phi0_sq = g_phi0_sq[i];
    pt.X = observe(traj.final_state, p).X_p1;
    pt.visibility = density_profile(traj.final_state, theta, p).visibility;
    pt.max_depletion = traj.max_depletion;
    const ModelParams m1 = pair_model(1, cplx(std::sqrt(p.Phi0_sq), 0.0), p);
    pt.flagged = classify_regime(m1) != Regime::Broken;
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(g_phi0_sq.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < out.size(); i += threads) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = g_phi0_sq.data();
    if (i == 0) {
      out[i].chi_g = (out[1].X - out[0].X) / (x[1] - x[0]);
    } else if (i == n - 1) {
      out[i].chi_g = (out[i].X - out[i - 1].X) / (x[i] - x[i - 1]);
    } else {
      const double h1 = x[i] - x[i - 1];
      const double h2 = x[i + 1] - x[i];
      out[i].chi_g = -h2 / (h1 * (h1 + h2)) * out[i - 1].X + (h2 - h1) / (h1 * h2) * out[i].X +
                     h1 / (h2 * (h1 + h2)) * out[i + 1].X;
    }
  }
  return out;
}

}  // namespace papt::bec
