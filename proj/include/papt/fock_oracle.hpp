#pragma once

// Brute-force propagation of the two-mode model in a truncated Fock space,
// with an optional Kerr term (U/2) Σ_i (a_i†a_i)². Serves as independent
// ground truth for the Gaussian closed forms and as the only route once
// U > 0 makes the dynamics non-Gaussian.

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "papt/core_dynamics.hpp"

namespace papt::fock {

/// Product basis |n1, n2⟩ with n_i ≤ cutoff_i, optionally restricted to the
/// sector n1 − n2 = c that the pair-creation term conserves.
class FockBasis {
 public:
  static FockBasis full(int cutoff1, int cutoff2);
  /// Sector basis {|n + c, n⟩}; `pairs` bounds the per-mode occupation.
  static FockBasis pair_sector(int pairs, int difference = 0);

  std::size_t size() const { return size_; }
  int cutoff1() const { return cutoff1_; }
  int cutoff2() const { return cutoff2_; }
  std::optional<int> sector() const { return sector_; }

  std::pair<int, int> occupations(std::size_t index) const;
  std::optional<std::size_t> index(int n1, int n2) const;

 private:
  FockBasis(int cutoff1, int cutoff2, std::optional<int> sector);

  int cutoff1_;
  int cutoff2_;
  std::optional<int> sector_;
  int n2_min_ = 0;
  std::size_t size_ = 0;
};

struct FockState {
  FockBasis basis;
  Eigen::VectorXcd amplitudes;
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
};

struct KerrParams {
  double U = 0.0;
};

using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// δ(n1+n2) + (U/2)(n1²+n2²) + i(κ a1†a2† − κ* a1a2). Throws InputError for
/// a negative Kerr strength.
SparseOperator build_hamiltonian(const ModelParams& params, const KerrParams& kerr,
                                 const FockBasis& basis);

struct Vacuum {};
struct Coherent {
  cplx alpha1;
  cplx alpha2;
};
struct PairSqueezed {
  cplx q;
};
using StateSpec = std::variant<Vacuum, Coherent, PairSqueezed>;

/// Normalized initial state. Coherent states need the full basis. The
/// probability mass cut off by the truncation must stay below `tail_tol`,
/// otherwise TruncationError.
FockState prepare_state(const FockBasis& basis, const StateSpec& spec, double tail_tol = 1e-12);

enum class Integrator { Chebyshev, Rk4 };

struct StepControl {
  Integrator method = Integrator::Chebyshev;
  /// Chebyshev series truncation (|J_k| threshold).
  double chebyshev_tol = 1e-16;
  /// RK4 per-step error target; the step comes from the Gershgorin bound of H.
  double rk4_local_error = 1e-12;
  /// Population allowed in the highest `top_fraction` of each mode's ladder.
  double top_fraction = 0.05;
  double top_population_max = 1e-8;
  bool throw_on_truncation = true;
};

/// Population in the top `fraction` of either mode's occupation ladder.
double top_population(const FockState& state, double fraction);

/// Reusable propagator for a fixed Hamiltonian.
class Propagator {
 public:
  Propagator(SparseOperator hamiltonian, StepControl control = {});

  /// Advances `state` by dt in place. Never renormalizes.
  void advance(FockState& state, double dt) const;

  const SparseOperator& hamiltonian() const { return h_; }
  double spectral_min() const { return e_min_; }
  double spectral_max() const { return e_max_; }

 private:
  void advance_chebyshev(Eigen::VectorXcd& psi, double dt) const;
  void advance_rk4(Eigen::VectorXcd& psi, double dt) const;

  SparseOperator h_;
  StepControl control_;
  double e_min_ = 0.0;
  double e_max_ = 0.0;
};

/// e^{−iHt}|state⟩. Throws TruncationError when the top-level population
/// exceeds the limit (unless disabled in `control`).
FockState evolve(const FockState& state, const SparseOperator& hamiltonian, double t,
                 const StepControl& control = {});

/// First and second moments; the defaults describe the vacuum.
struct MomentTable {
  cplx a1{0.0, 0.0};
  cplx a2{0.0, 0.0};
  cplx a1a1{0.0, 0.0};
  cplx a2a2{0.0, 0.0};
  cplx a1a2{0.0, 0.0};
  cplx a1dag_a2{0.0, 0.0};
  double n1 = 0.0;
  double n2 = 0.0;

  /// Same table with the coherent part removed.
  MomentTable central() const;
};

MomentTable moments(const FockState& state);

struct SqueezeEstimate {
  double S = 1.0;
  /// Quadrature angle φ at which Var[X1(φ) ± X2(φ)] is smallest.
  double phi_opt = 0.0;
  /// +1 or −1: which combination X1 ± X2 is squeezed.
  int sign = 1;
};

/// S = (max V / min V)^{1/4} over φ and ±, with V±(φ) = Var[X1(φ) ± X2(φ)]
/// evaluated in closed form from the central second moments. Throws
/// InputError for a non-physical (non-positive) variance.
SqueezeEstimate squeeze_factor_from_moments(const MomentTable& m);

/// ⟨ψ|H|ψ⟩.
double energy(const FockState& state, const SparseOperator& hamiltonian);

/// |⟨a|b⟩|² (states on the same basis).
double fidelity(const FockState& a, const FockState& b);

/// Applies c_a1·a1 + c_a2dag·a2† to the state (truncated at the cutoff).
Eigen::VectorXcd apply_mode_combination(const FockState& state, cplx c_a1, cplx c_a2dag);

struct TraceRow {
  double t = 0.0;
  double S_num = 1.0;
  double n_mean_1 = 0.0;
  double n_mean_2 = 0.0;
  double norm_drift = 0.0;
  double top_population = 0.0;
};

/// Evolves through the increasing `times` (t ≥ state.time) and records one
/// row per time.
std::vector<TraceRow> evolve_trace(const FockState& initial, const SparseOperator& hamiltonian,
                                   const std::vector<double>& times,
                                   const StepControl& control = {});

}  // namespace papt::fock
