#pragma once

// Maps the laboratory parameters of a four-wave-mixing medium onto the
// two-mode model. All inputs are SI-derived (rad/m, rad/s, m², m⁻³); the
// propagation distance z plays the role of time.

#include <vector>

#include <json.hpp>

#include "papt/core_dynamics.hpp"

namespace papt::platform {

struct FwmParams {
  double Omega_c = 0.0;
  double Omega_p = 0.0;
  double Delta_p = 0.0;
  double N_a = 0.0;
  double sigma_13 = 0.0;
  double sigma_24 = 0.0;
  double gamma_12 = 0.0;
  double gamma_13 = 0.0;
  double gamma_14 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double kc = 0.0;
  double kp = 0.0;
  double theta_cp = 0.0;

  /// Throws InputError for non-positive rates, cross sections, density or
  /// wave vectors, and DegenerateInputError for Delta_p = 0.
  void validate() const;
};

/// 2π/λ.
double wavenumber(double wavelength_m);

/// κ̃ = N_a√(σ₁₃σ₂₄γ₁₃γ₁₄)/(|Ω_c|² + 4γ₁₃γ₁₂) · Ω_pΩ_c/(2Δ_p).
double fwm_coupling(const FwmParams& p);

struct MappedModel {
  double delta_k = 0.0;
  double kappa_tilde = 0.0;
  /// δ = −Δk/2, κ = −κ̃ (per metre of propagation).
  ModelParams params;
};

/// Δk = k₁ + k₂ − (k_c + k_p)cos θ_cp and the mapped model.
MappedModel phase_mismatch(const FwmParams& p);

/// Medium lengths L_n = nπ/λ₀ (metres) for n = 1..n_max; empty outside the
/// Broken regime.
std::vector<double> working_lengths(const FwmParams& p, int n_max);

/// Reads the "fwm" block (or a bare object with the same keys). Missing
/// keys or wrong types raise InputError.
FwmParams fwm_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MappedModel& m);

}  // namespace papt::platform
