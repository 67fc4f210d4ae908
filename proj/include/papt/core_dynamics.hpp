#pragma once

// Closed-form dynamics of the two-mode pair-creation model
//
//   H = δ (a1†a1 + a2†a2) + i (κ a1†a2† − κ* a1 a2),
//
// whose Heisenberg equations for (a1, a2†) are generated by the 2×2
// non-Hermitian dynamical matrix [[δ, iκ], [iκ*, −δ]]. Units: ħ = 1, δ and κ
// are angular frequencies, t is time (or propagation length on the optical
// platform).

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace papt {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default relative tolerance for deciding |κ| = |δ|.
inline constexpr double kDefaultRegimeTol = 1e-12;

struct ModelParams {
  double delta = 0.0;
  /// Real in the optical model; complex values arise for the ring condensate.
  cplx kappa = 0.0;
};

enum class Regime { Broken, ExceptionalPoint, Symmetric };

std::string_view to_string(Regime regime);

/// Mode-operator transfer: a_j(t) = A a_j(0) + B a_ĵ†(0).
struct TransferCoeffs {
  cplx A{1.0, 0.0};
  cplx B{0.0, 0.0};

  double a0() const { return std::abs(A); }
  double b0() const { return std::abs(B); }
  double phi_a() const;
  double phi_b() const;
};

struct SqueezeSummary {
  double S = 1.0;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  std::optional<double> period;  // Broken regime only
  std::optional<double> s_max;   // Broken regime only
};

/// Initial coherent amplitudes of the two modes.
struct CoherentPair {
  cplx alpha1{0.0, 0.0};
  cplx alpha2{0.0, 0.0};

  /// Sensing convention: α1 = iα, α2 = α.
  static CoherentPair sensing_convention(double alpha) {
    return {cplx(0.0, alpha), cplx(alpha, 0.0)};
  }
};

struct QuadratureStats {
  double mean = 0.0;
  double variance = 0.25;
};

struct Eigensystem {
  /// Index 0 is the "+" branch (λ₀ or iλ₀), index 1 the "−" branch.
  std::array<cplx, 2> lambda;
  /// Unit-norm right eigenvectors.
  std::array<Eigen::Vector2cd, 2> right;
  /// Left eigenvectors as columns (H† L = λ* L), scaled so ⟨L_s|R_s⟩ = 1.
  std::array<Eigen::Vector2cd, 2> left;

  /// Σ_s |R_s⟩ e^{−iλ_s t} ⟨L_s|.
  Eigen::Matrix2cd propagator(double t) const;
};

/// Even/odd kernels of the propagator as functions of the signed gap
/// s = δ² − |κ|²: c = cos(√s t), sn = sin(√s t)/√s (hyperbolic for s < 0,
/// c = 1 and sn = t at s = 0), plus their s-derivatives at fixed t.
struct GapKernels {
  double c = 1.0;
  double sn = 0.0;
  double dc_ds = 0.0;
  double dsn_ds = 0.0;
};

/// Evaluates the kernels; switches to power series in x = s t² near x = 0.
GapKernels gap_kernels(double s, double t);

/// s = δ² − |κ|², formed as (|δ|−|κ|)(|δ|+|κ|).
double signed_gap(const ModelParams& params);

Regime classify_regime(const ModelParams& params, double tol = kDefaultRegimeTol);

/// λ₀ = sqrt(| |κ|² − δ² |).
double lambda0(const ModelParams& params);

Eigen::Matrix2cd dynamical_matrix(const ModelParams& params);

Eigensystem eigensystem(const ModelParams& params, double tol = kDefaultRegimeTol);

/// Closed-form A(t), B(t). Continuous across the exceptional point; never
/// branches on the regime tolerance.
TransferCoeffs transfer_coeffs(const ModelParams& params, double t);

/// [[A, B], [B*, A*]].
Eigen::Matrix2cd transfer_matrix(const TransferCoeffs& coeffs);

/// S = |A| + |B|, φ± = (Arg B ± Arg A)/2 wrapped to (−π, π].
///
/// When B vanishes (t = 0 or a working point) Arg B is replaced by its
/// one-sided limit: from the right at t = 0 (φ₊ = ½Arg κ), from the left
/// otherwise (φ₊ = ½Arg[−κ] at t = T).
SqueezeSummary squeeze_summary(const ModelParams& params, double t);

/// ⟨X_j(φ, t)⟩ = Re[e^{−iφ}(A α_j + B α_ĵ*)] for a coherent initial state.
/// `mode` is 1 or 2.
double quadrature_mean(const ModelParams& params, double t,
                       const CoherentPair& alphas, double phi, int mode);

/// [ΔX_j]² = (|A|² + |B|²)/4; independent of φ and of the coherent amplitudes.
double quadrature_variance(const ModelParams& params, double t);

QuadratureStats quadrature_stats(const ModelParams& params, double t,
                                 const CoherentPair& alphas, double phi, int mode);

/// Pair amplitude q of the stationary two-mode squeezed state
/// Σ sqrt(1−|q|²) qⁿ |n,n⟩ annihilated by both Bogoliubov eigenmodes.
/// Throws NoGroundStateError outside the Broken regime.
cplx ground_state_param(const ModelParams& params, double tol = kDefaultRegimeTol);

/// Wraps an angle to (−π, π].
double wrap_angle(double angle);

}  // namespace papt
