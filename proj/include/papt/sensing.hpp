#pragma once

// Parameter estimation near the exceptional point: analytic derivatives of
// the transfer coefficients, homodyne susceptibility, quantum Fisher
// information for a coherent input, and a Monte-Carlo homodyne estimator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "papt/core_dynamics.hpp"

namespace papt {

enum class Estimand { Kappa, Delta };

struct SensorConfig {
  ModelParams params;
  CoherentPair alphas;
  double t = 0.0;
  /// When set, the evolution time is the working point t = nπ/λ₀ and `t` is ignored.
  std::optional<int> working_index;
  Estimand wrt = Estimand::Kappa;
  /// Measured quadrature X_mode(phi, t).
  double phi = 0.0;
  int mode = 1;

  static SensorConfig at_time(const ModelParams& params, const CoherentPair& alphas, double t,
                              Estimand wrt = Estimand::Kappa);
  static SensorConfig at_working_point(const ModelParams& params, const CoherentPair& alphas,
                                       int n, Estimand wrt = Estimand::Kappa);

  /// Evolution time, resolving the working index. Throws InputError if a
  /// working index is requested outside the Broken regime.
  double time() const;
};

struct CoeffDerivatives {
  cplx dA{0.0, 0.0};
  cplx dB{0.0, 0.0};
};

struct SensitivityReport {
  double chi = 0.0;
  double variance = 0.25;
  double inv_var = 0.0;
  double qfi = 0.0;
  double ratio = 0.0;
};

void to_json(nlohmann::json& j, const SensitivityReport& r);

/// ∂A/∂θ and ∂B/∂θ at fixed t for θ ∈ {κ, δ}; κ must be real.
CoeffDerivatives coeff_derivatives(const ModelParams& params, double t, Estimand wrt);

/// ∂⟨a_j(t)⟩/∂θ for j = 1, 2.
std::array<cplx, 2> mean_field_derivatives(const SensorConfig& config);

/// χ = ∂⟨X_mode(φ, t)⟩/∂θ.
double susceptibility(const SensorConfig& config);

/// F = 4A₀⁴|∂(B/A*)|² + 4(A₀²+B₀²) Σ_j |∂⟨a_j⟩|² − 16 Re[A*B* ∂⟨a₁⟩ ∂⟨a₂⟩].
double qfi(const SensorConfig& config);

/// Δ⁻² = χ² / [ΔX]².
double inverse_variance(const SensorConfig& config);

SensitivityReport sensitivity_report(const SensorConfig& config);

/// Working times t_n = nπ/λ₀ for n = 1..n_max; empty outside the Broken regime.
std::vector<double> working_points(const ModelParams& params, int n_max);

/// κ_n = sqrt(δ² − (nπ/t)²) for n in [n_first, n_last] with nπ/t < |δ|.
std::vector<double> working_kappas(double delta, double t, int n_first, int n_last);

struct MonteCarloResult {
  std::size_t shots = 0;
  /// Mean of the per-shot linearized estimates θ̂_i.
  double estimate = 0.0;
  /// Sample variance of θ̂_i (per shot).
  double shot_variance = 0.0;
  /// shot_variance / shots: variance of `estimate`.
  double estimate_variance = 0.0;
  /// Δ_θ² / shots from the analytic report at the nominal point.
  double predicted_variance = 0.0;
};

void to_json(nlohmann::json& j, const MonteCarloResult& r);

/// Draws homodyne outcomes of X_mode from the Gaussian marginal at `truth`
/// and inverts them with the linearization about `nominal`:
/// θ̂ = θ₀ + (x − ⟨X⟩(θ₀)) / χ(θ₀).
///
/// Shot i depends only on (seed, i), so the result is independent of
/// `threads`. Throws IllConditionedError when |χ| < chi_min.
MonteCarloResult monte_carlo_estimate(const SensorConfig& nominal, const ModelParams& truth,
                                      std::size_t shots, std::uint64_t seed,
                                      unsigned threads = 1, double chi_min = 1e-9);

}  // namespace papt
