#include "papt/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "papt/counter_rng.hpp"
#include "papt/errors.hpp"

namespace papt {

namespace {

constexpr cplx kI{0.0, 1.0};

double real_kappa(const ModelParams& params) {
  if (params.kappa.imag() != 0.0) {
    throw InputError("sensing: the estimated model requires a real kappa");
  }
  return params.kappa.real();
}

cplx measured_alpha(const CoherentPair& a, int mode) { return mode == 1 ? a.alpha1 : a.alpha2; }
cplx other_alpha(const CoherentPair& a, int mode) { return mode == 1 ? a.alpha2 : a.alpha1; }

}  // namespace

SensorConfig SensorConfig::at_time(const ModelParams& params, const CoherentPair& alphas, double t,
                                   Estimand wrt) {
  SensorConfig c;
  c.params = params;
  c.alphas = alphas;
  c.t = t;
  c.wrt = wrt;
  return c;
}

SensorConfig SensorConfig::at_working_point(const ModelParams& params, const CoherentPair& alphas,
                                            int n, Estimand wrt) {
  SensorConfig c = at_time(params, alphas, 0.0, wrt);
  c.working_index = n;
  return c;
}

double SensorConfig::time() const {
  if (!working_index) return t;
  if (*working_index < 1) throw InputError("SensorConfig: working index must be positive");
  if (classify_regime(params) != Regime::Broken) {
    throw InputError("SensorConfig: working points exist only in the Broken regime");
  }
  return *working_index * kPi / lambda0(params);
}

void to_json(nlohmann::json& j, const SensitivityReport& r) {
  j = nlohmann::json{{"chi", r.chi},
                     {"variance", r.variance},
                     {"inv_var", r.inv_var},
                     {"qfi", r.qfi},
                     {"ratio", r.ratio}};
}

void to_json(nlohmann::json& j, const MonteCarloResult& r) {
  j = nlohmann::json{{"shots", r.shots},
                     {"estimate", r.estimate},
                     {"shot_variance", r.shot_variance},
                     {"estimate_variance", r.estimate_variance},
                     {"predicted_variance", r.predicted_variance}};
}

CoeffDerivatives coeff_derivatives(const ModelParams& params, double t, Estimand wrt) {
  const double kappa = real_kappa(params);
  const double delta = params.delta;
  const GapKernels k = gap_kernels(signed_gap(params), t);

  const cplx dA_ds(k.dc_ds, -delta * k.dsn_ds);
  const double dB_ds = kappa * k.dsn_ds;

  if (wrt == Estimand::Kappa) {
    const double ds = -2.0 * kappa;
    return {dA_ds * ds, k.sn + dB_ds * ds};
  }
  const double ds = 2.0 * delta;
  return {dA_ds * ds - kI * k.sn, dB_ds * ds};
}

std::array<cplx, 2> mean_field_derivatives(const SensorConfig& config) {
  const CoeffDerivatives d = coeff_derivatives(config.params, config.time(), config.wrt);
  const CoherentPair& a = config.alphas;
  return {d.dA * a.alpha1 + d.dB * std::conj(a.alpha2),
          d.dA * a.alpha2 + d.dB * std::conj(a.alpha1)};
}

double susceptibility(const SensorConfig& config) {
  if (config.mode != 1 && config.mode != 2) throw InputError("susceptibility: mode must be 1 or 2");
  const CoeffDerivatives d = coeff_derivatives(config.params, config.time(), config.wrt);
  const cplx own = measured_alpha(config.alphas, config.mode);
  const cplx other = other_alpha(config.alphas, config.mode);
  return std::real(std::exp(-kI * config.phi) * (d.dA * own + d.dB * std::conj(other)));
}

double qfi(const SensorConfig& config) {
  const double t = config.time();
  const TransferCoeffs c = transfer_coeffs(config.params, t);
  const CoeffDerivatives d = coeff_derivatives(config.params, t, config.wrt);
  const auto dm = mean_field_derivatives(config);

  const cplx a_conj = std::conj(c.A);
  const cplx dq = d.dB / a_conj - c.B * std::conj(d.dA) / (a_conj * a_conj);
  const double a0sq = std::norm(c.A);
  const double b0sq = std::norm(c.B);

  const double f = 4.0 * a0sq * a0sq * std::norm(dq) +
                   4.0 * (a0sq + b0sq) * (std::norm(dm[0]) + std::norm(dm[1])) -
                   16.0 * std::real(std::conj(c.A) * std::conj(c.B) * dm[0] * dm[1]);
  return std::max(f, 0.0);
}

double inverse_variance(const SensorConfig& config) {
  const double chi = susceptibility(config);
  return chi * chi / quadrature_variance(config.params, config.time());
}

SensitivityReport sensitivity_report(const SensorConfig& config) {
  SensitivityReport r;
  r.chi = susceptibility(config);
  r.variance = quadrature_variance(config.params, config.time());
  r.inv_var = r.chi * r.chi / r.variance;
  r.qfi = qfi(config);
  r.ratio = r.qfi > 0.0 ? r.inv_var / r.qfi : 0.0;
  return r;
}

std::vector<double> working_points(const ModelParams& params, int n_max) {
  std::vector<double> out;
  if (params.delta == 0.0 && params.kappa == 0.0) return out;
  if (classify_regime(params) != Regime::Broken) return out;
  const double l0 = lambda0(params);
  for (int n = 1; n <= n_max; ++n) out.push_back(n * kPi / l0);
  return out;
}

std::vector<double> working_kappas(double delta, double t, int n_first, int n_last) {
  std::vector<double> out;
  if (t <= 0.0) return out;
  for (int n = std::max(n_first, 1); n <= n_last; ++n) {
    const double rate = n * kPi / t;
    if (rate >= std::abs(delta)) break;
    out.push_back(std::sqrt((std::abs(delta) - rate) * (std::abs(delta) + rate)));
  }
  return out;
}

MonteCarloResult monte_carlo_estimate(const SensorConfig& nominal, const ModelParams& truth,
                                      std::size_t shots, std::uint64_t seed, unsigned threads,
                                      double chi_min) {
  if (shots < 100) throw InputError("monte_carlo_estimate: at least 100 shots required");
  const double t = nominal.time();
  const double chi = susceptibility(nominal);
  if (!(std::abs(chi) >= chi_min)) {
    throw IllConditionedError("monte_carlo_estimate: |chi| below threshold, estimator is ill-conditioned");
  }

  const double model_mean =
      quadrature_mean(nominal.params, t, nominal.alphas, nominal.phi, nominal.mode);
  const double true_mean = quadrature_mean(truth, t, nominal.alphas, nominal.phi, nominal.mode);
  const double sigma = std::sqrt(quadrature_variance(truth, t));
  const double theta0 =
      nominal.wrt == Estimand::Kappa ? nominal.params.kappa.real() : nominal.params.delta;

  std::vector<double> estimates(shots);
  const CounterRng rng(seed);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double x = true_mean + sigma * rng.normal(i);
      estimates[i] = theta0 + (x - model_mean) / chi;
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    fill(0, shots);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (shots + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(shots, w * chunk);
      const std::size_t end = std::min(shots, begin + chunk);
      pool.emplace_back(fill, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  // Sequential two-pass reduction keeps the result independent of the split.
  double sum = 0.0;
  for (double e : estimates) sum += e;
  const double mean = sum / static_cast<double>(shots);
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);

  MonteCarloResult r;
  r.shots = shots;
  r.estimate = mean;
  r.shot_variance = ss / static_cast<double>(shots - 1);
  r.estimate_variance = r.shot_variance / static_cast<double>(shots);
  r.predicted_variance = 1.0 / (inverse_variance(nominal) * static_cast<double>(shots));
  return r;
}

}  // namespace papt
