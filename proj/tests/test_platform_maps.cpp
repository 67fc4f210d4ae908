#include <gtest/gtest.h>

#include <cmath>

#include "papt/errors.hpp"
#include "papt/platform_maps.hpp"
#include "papt/sensing.hpp"

using namespace papt;
using namespace papt::platform;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Rb-like Λ/double-Λ medium at 780/795 nm.
FwmParams lab() {
  FwmParams p;
  p.Omega_c = kTwoPi * 10e6;
  p.Omega_p = kTwoPi * 1e6;
  p.Delta_p = kTwoPi * 100e6;
  p.N_a = 1.2e15;
  p.sigma_13 = 2.9e-13;
  p.sigma_24 = 2.9e-13;
  p.gamma_12 = kTwoPi * 1e3;
  p.gamma_13 = kTwoPi * 3e6;
  p.gamma_14 = kTwoPi * 3e6;
  p.kp = kTwoPi / 780e-9;
  p.kc = kTwoPi / 795e-9;
  p.k1 = p.kp;
  p.k2 = p.kc;
  p.theta_cp = 0.2 * kPi / 180.0;
  return p;
}

double coupling_oracle(const FwmParams& p) {
  const double prefactor = p.N_a * std::sqrt(p.sigma_13 * p.sigma_24 * p.gamma_13 * p.gamma_14);
  return prefactor / (p.Omega_c * p.Omega_c + 4.0 * p.gamma_13 * p.gamma_12) * p.Omega_p * p.Omega_c /
         (2.0 * p.Delta_p);
}

}  // namespace

TEST(Wavenumber, Examples) {
  EXPECT_NEAR(wavenumber(780e-9), 8.0554e6, 1e2);
  EXPECT_NEAR(wavenumber(1.0), kTwoPi, 1e-15);
  EXPECT_THROW(wavenumber(0.0), InputError);
  EXPECT_THROW(wavenumber(-1e-6), InputError);
}

TEST(Coupling, MatchesDirectEvaluation) {
  const FwmParams p = lab();
  EXPECT_NEAR(fwm_coupling(p) / coupling_oracle(p), 1.0, 1e-14);
  EXPECT_GT(fwm_coupling(p), 0.1);
  EXPECT_LT(fwm_coupling(p), 5.0);

  FwmParams weak = p;
  weak.Omega_p = 1e-9;
  EXPECT_NEAR(fwm_coupling(weak), 0.0, 1e-12);

  FwmParams far = p;
  far.Delta_p *= 2.0;
  EXPECT_NEAR(fwm_coupling(far) / fwm_coupling(p), 0.5, 1e-14);

  FwmParams neg = p;
  neg.Delta_p = -p.Delta_p;
  EXPECT_NEAR(fwm_coupling(neg), -fwm_coupling(p), 1e-15);
}

TEST(PhaseMismatch, Examples) {
  const FwmParams p = lab();
  const MappedModel m = phase_mismatch(p);
  const double direct = p.k1 + p.k2 - (p.kc + p.kp) * std::cos(p.theta_cp);
  EXPECT_NEAR(m.delta_k / direct, 1.0, 1e-9);
  EXPECT_NEAR(m.delta_k, 97.2, 0.1);
  EXPECT_EQ(m.params.delta, -m.delta_k / 2.0);
  EXPECT_EQ(m.params.kappa, cplx(-m.kappa_tilde, 0.0));
  EXPECT_EQ(classify_regime(m.params), Regime::Broken);

  FwmParams collinear = p;
  collinear.theta_cp = 0.0;
  EXPECT_NEAR(phase_mismatch(collinear).delta_k, 0.0, 1e-8);
}

TEST(PhaseMismatch, SignConvention) {
  // Δk = 100 rad/m and κ̃ = 0.5 rad/m map to δ = −50, κ = −0.5.
  FwmParams p = lab();
  p.theta_cp = 0.0;
  p.k1 = p.kp + 100.0;
  const double scale = 0.5 / fwm_coupling(p);
  p.N_a *= scale;
  const MappedModel m = phase_mismatch(p);
  EXPECT_NEAR(m.delta_k, 100.0, 1e-7);
  EXPECT_NEAR(m.kappa_tilde, 0.5, 1e-14);
  EXPECT_NEAR(m.params.delta, -50.0, 1e-7);
  EXPECT_NEAR(m.params.kappa.real(), -0.5, 1e-14);
}

TEST(Validate, Errors) {
  FwmParams p = lab();
  p.Delta_p = 0.0;
  EXPECT_THROW(p.validate(), DegenerateInputError);
  EXPECT_THROW(phase_mismatch(p), DegenerateInputError);
  for (double FwmParams::*field : {&FwmParams::N_a, &FwmParams::sigma_13, &FwmParams::gamma_12,
                                   &FwmParams::k1, &FwmParams::kp}) {
    FwmParams q = lab();
    q.*field = -1.0;
    EXPECT_THROW(q.validate(), InputError);
    q.*field = NAN;
    EXPECT_THROW(q.validate(), InputError);
  }
  FwmParams nan_rabi = lab();
  nan_rabi.Omega_c = NAN;
  EXPECT_THROW(nan_rabi.validate(), InputError);
  EXPECT_NO_THROW(lab().validate());
}

TEST(WorkingLengths, ConsistentWithModel) {
  const FwmParams p = lab();
  const auto len = working_lengths(p, 3);
  const MappedModel m = phase_mismatch(p);
  const double l0 = lambda0(m.params);
  ASSERT_EQ(len.size(), 3u);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(l0 * len[n - 1], n * kPi, 1e-12);
  EXPECT_EQ(len, working_points(m.params, 3));

  FwmParams sym = p;
  sym.theta_cp = 0.0;
  EXPECT_TRUE(working_lengths(sym, 3).empty());
}

TEST(Json, RoundTripAndErrors) {
  const FwmParams p = lab();
  const nlohmann::json j = {{"Omega_c", p.Omega_c},   {"Omega_p", p.Omega_p},   {"Delta_p", p.Delta_p},
                            {"N_a", p.N_a},           {"sigma_13", p.sigma_13}, {"sigma_24", p.sigma_24},
                            {"gamma_12", p.gamma_12}, {"gamma_13", p.gamma_13}, {"gamma_14", p.gamma_14},
                            {"k1", p.k1},             {"k2", p.k2},             {"kc", p.kc},
                            {"kp", p.kp},             {"theta_cp", p.theta_cp}};
  const FwmParams bare = fwm_from_json(j);
  const FwmParams nested = fwm_from_json(nlohmann::json{{"fwm", j}});
  EXPECT_EQ(bare.Delta_p, p.Delta_p);
  EXPECT_EQ(nested.theta_cp, p.theta_cp);

  nlohmann::json missing = j;
  missing.erase("kp");
  EXPECT_THROW(fwm_from_json(missing), InputError);
  nlohmann::json wrong = j;
  wrong["N_a"] = "dense";
  EXPECT_THROW(fwm_from_json(wrong), InputError);

  const nlohmann::json out = to_json(phase_mismatch(p));
  for (const char* key : {"delta_k", "kappa_tilde", "delta", "kappa", "regime"}) EXPECT_TRUE(out.contains(key)) << key;
  EXPECT_EQ(out["regime"], "broken");
}
