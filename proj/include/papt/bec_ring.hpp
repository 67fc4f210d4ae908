#pragma once

// Hartree-Fock-Bogoliubov dynamics of a condensate in a ring. Each pair of
// counter-rotating modes (n, −n) is a two-mode system with δ_n = n²E₁ − g|Φ|²
// and κ = gΦ², and the condensate amplitude Φ feels the pair moments.
//
// Frame: Φ(0) = √Phi0_sq is real and positive and the chemical-potential
// phase is removed, so μ never appears. Quadratures of the n = ±1 modes are
// taken at φ = −π/4.

#include <array>
#include <cstddef>
#include <vector>

#include "papt/core_dynamics.hpp"

namespace papt::bec {

struct BecParams {
  double E1 = 1.0;
  /// Interaction strength; g > 0 is attractive.
  double g = 0.0;
  double Phi0_sq = 1e5;
  int n_max = 10;
  /// Coherent amplitudes of the n = +1 and n = −1 modes at t = 0.
  cplx alpha_p1{0.0, 0.0};
  cplx alpha_m1{0.0, 0.0};
  double dt = 1e-3;
  /// Per-step growth of ||A_n|²−|B_n|²−1| that triggers halving of dt.
  double defect_tol = 1e-10;
  /// Budget for the drift accumulated over a whole run; the per-step
  /// limit is tightened to budget·dt/t_end when that is smaller, but not
  /// below 1e-13.
  double drift_budget = 1e-9;
  /// Off switches the condensate back-action (Φ frozen at its initial value).
  bool back_action = true;

  /// g = gPhi0_sq / Phi0_sq and α_{±1} = e^{iπ/4}α.
  static BecParams ring(double g_phi0_sq, double alpha, double Phi0_sq = 1e5, int n_max = 10);

  /// Throws InputError unless E1 > 0, Phi0_sq > 0, n_max ≥ 3, dt > 0.
  void validate() const;
};

struct PairMatrix {
  cplx A{1.0, 0.0};
  cplx B{0.0, 0.0};

  double symplectic_form() const { return std::norm(A) - std::norm(B); }
};

struct BecState {
  cplx Phi{0.0, 0.0};
  /// Entry k holds M_{k+1}.
  std::vector<PairMatrix> M;
  double t = 0.0;

  static BecState initial(const BecParams& params);
};

/// [[δ_n, igΦ²], [ig(Φ*)², −δ_n]] with δ_n = n²E₁ − g|Φ|².
Eigen::Matrix2cd bogoliubov_matrix(int n, cplx Phi, const BecParams& params);

/// Two-mode parameters of pair n with the condensate frozen at Φ.
ModelParams pair_model(int n, cplx Phi, const BecParams& params);

struct PairMoments {
  /// ⟨ψ̂_n ψ̂_{−n}⟩
  cplx anomalous{0.0, 0.0};
  /// ⟨ψ̂_n†ψ̂_n⟩ and ⟨ψ̂_{−n}†ψ̂_{−n}⟩
  double normal_p = 0.0;
  double normal_m = 0.0;
};

/// Coherent part ⟨ψ̂_{±n}(t)⟩ = A α_{±n} + B α_{∓n}*.
std::array<cplx, 2> coherent_part(const PairMatrix& m, cplx alpha_p, cplx alpha_m);

/// Wick moments of pair n for a coherent ⊗ vacuum input.
PairMoments pair_moments(const PairMatrix& m, cplx alpha_p, cplx alpha_m);

/// One joint RK4 step of length dt. Does not adapt.
BecState rk4_step(const BecState& state, const BecParams& params, double dt);

struct StepOutcome {
  BecState state;
  /// The step was split into 2^halvings RK4 substeps.
  int halvings = 0;
};

/// Advances by exactly dt with symplectic-defect control: the step is split
/// into 2^h substeps, h starting at `halvings` and growing until the defect
/// accumulated over dt is below `defect_limit`. Throws StepSizeError after
/// 30 halvings, or at once for a non-finite input state.
StepOutcome step(const BecState& state, const BecParams& params, double dt, double defect_limit,
                 int halvings = 0);

struct Observables {
  double t = 0.0;
  cplx Phi{0.0, 0.0};
  std::vector<double> S;
  /// Quadratures of the n = +1 mode at φ = −π/4 and φ = +π/4.
  double X_p1 = 0.0;
  double P_p1 = 0.0;
  /// X_p1 measured relative to the instantaneous condensate phase.
  double X_p1_rel = 0.0;
  double depletion_fraction = 0.0;
  /// Σ over ±n of ⟨ψ̂†ψ̂⟩ plus 2π|Φ|².
  double total_atoms = 0.0;
  double max_symplectic_defect = 0.0;
};

Observables observe(const BecState& state, const BecParams& params);

struct Trajectory {
  std::vector<Observables> rows;
  BecState final_state;
  double max_depletion = 0.0;
  double max_condensate_change = 0.0;
  double dt_used = 0.0;
};

/// Integrates from t = 0 to t_end, recording every `record_every` time
/// units (and at t = 0 and t_end).
Trajectory integrate(const BecParams& params, double t_end, double record_every);

struct DensityProfile {
  std::vector<double> theta;
  std::vector<double> rho;
  double visibility = 0.0;
  double X_p1 = 0.0;
  double P_p1 = 0.0;
};

/// Linearized normalized density
///   ρ(θ) = 1 + 2 Re[e^{iπ/4} e^{−i arg Φ} (β₊₁e^{iθ} + β₋₁e^{−iθ})] / (|Φ|√(2π)),
/// which for β₊₁ = β₋₁ is 1 + 4X′cos θ / (|Φ|√(2π)) with X′ the quadrature
/// relative to the condensate phase. Only n = ±1 carry a coherent part.
DensityProfile density_profile(const BecState& state, const std::vector<double>& theta,
                               const BecParams& params);

struct SweepPoint {
  double g_phi0_sq = 0.0;
  double X = 0.0;
  double chi_g = 0.0;
  double visibility = 0.0;
  double max_depletion = 0.0;
  /// Pair n = 1 sits at or beyond the exceptional point.
  bool flagged = false;
};

/// Runs one trajectory per grid value of gΦ₀² (in units of E₁, with the
/// other fields from `base`) up to t, and differentiates X_p1 along the grid
/// (central differences inside, one-sided at the ends). Grid must be
/// strictly increasing with at least two points.
std::vector<SweepPoint> sensing_sweep(const BecParams& base, const std::vector<double>& g_phi0_sq,
                                      double t, unsigned threads = 1);

}  // namespace papt::bec
