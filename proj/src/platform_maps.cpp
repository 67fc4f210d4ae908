#include "papt/platform_maps.hpp"

#include <cmath>
#include <string>

#include "papt/errors.hpp"
#include "papt/sensing.hpp"

namespace papt::platform {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError(std::string("FwmParams: ") + name + " must be positive and finite");
  }
}

}  // namespace

void FwmParams::validate() const {
  require_positive(N_a, "N_a");
  require_positive(sigma_13, "sigma_13");
  require_positive(sigma_24, "sigma_24");
  require_positive(gamma_12, "gamma_12");
  require_positive(gamma_13, "gamma_13");
  require_positive(gamma_14, "gamma_14");
  require_positive(k1, "k1");
  require_positive(k2, "k2");
  require_positive(kc, "kc");
  require_positive(kp, "kp");
  if (!std::isfinite(Omega_c) || !std::isfinite(Omega_p) || !std::isfinite(theta_cp) ||
      !std::isfinite(Delta_p)) {
    throw InputError("FwmParams: non-finite field");
  }
  if (Delta_p == 0.0) throw DegenerateInputError("FwmParams: Delta_p must be nonzero");
}

double wavenumber(double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw InputError("wavenumber: wavelength must be positive");
  return 2.0 * kPi / wavelength_m;
}

double fwm_coupling(const FwmParams& p) {
  p.validate();
  const double prefactor = p.N_a * std::sqrt(p.sigma_13 * p.sigma_24 * p.gamma_13 * p.gamma_14) /
                           (p.Omega_c * p.Omega_c + 4.0 * p.gamma_13 * p.gamma_12);
  return prefactor * p.Omega_p * p.Omega_c / (2.0 * p.Delta_p);
}

MappedModel phase_mismatch(const FwmParams& p) {
  MappedModel m;
  m.kappa_tilde = fwm_coupling(p);
  // (k1 + k2 − kc − kp) + (kc + kp)(1 − cos θ), with 1 − cos θ = 2 sin²(θ/2)
  // to keep small angles accurate.
  const double s = std::sin(0.5 * p.theta_cp);
  m.delta_k = (p.k1 + p.k2 - p.kc - p.kp) + (p.kc + p.kp) * 2.0 * s * s;
  m.params = ModelParams{-0.5 * m.delta_k, cplx(-m.kappa_tilde, 0.0)};
  return m;
}

std::vector<double> working_lengths(const FwmParams& p, int n_max) {
  return working_points(phase_mismatch(p).params, n_max);
}

FwmParams fwm_from_json(const nlohmann::json& j) {
  const nlohmann::json& b = j.contains("fwm") ? j.at("fwm") : j;
  if (!b.is_object()) throw InputError("fwm block must be an object");
  auto get = [&](const char* key) {
    if (!b.contains(key)) throw InputError(std::string("fwm block: missing key '") + key + "'");
    const auto& v = b.at(key);
    if (!v.is_number()) throw InputError(std::string("fwm block: '") + key + "' must be a number");
    return v.get<double>();
  };
  FwmParams p;
  p.Omega_c = get("Omega_c");
  p.Omega_p = get("Omega_p");
  p.Delta_p = get("Delta_p");
  p.N_a = get("N_a");
  p.sigma_13 = get("sigma_13");
  p.sigma_24 = get("sigma_24");
  p.gamma_12 = get("gamma_12");
  p.gamma_13 = get("gamma_13");
  p.gamma_14 = get("gamma_14");
  p.k1 = get("k1");
  p.k2 = get("k2");
  p.kc = get("kc");
  p.kp = get("kp");
  p.theta_cp = get("theta_cp");
  p.validate();
  return p;
}

nlohmann::json to_json(const MappedModel& m) {
  return nlohmann::json{{"delta_k", m.delta_k},
                        {"kappa_tilde", m.kappa_tilde},
                        {"delta", m.params.delta},
                        {"kappa", m.params.kappa.real()},
                        {"regime", std::string(papt::to_string(classify_regime(m.params)))}};
}

}  // namespace papt::platform
