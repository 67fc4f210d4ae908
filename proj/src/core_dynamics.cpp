#include "papt/core_dynamics.hpp"

#include <cmath>
#include <limits>

#include "papt/errors.hpp"

namespace papt {

namespace {

constexpr cplx kI{0.0, 1.0};

// Below this |λ₀ t| the closed forms lose digits to 0/0; use the series.
constexpr double kSeriesLambdaT = 1e-4;

// Derivative kernels: (t c − sn)/(2s) cancels badly for small x = s t².
constexpr double kDerivSeriesX = 1.0;

// Σ_k (−x)^k / (2k + offset)! for offset ∈ {0, 1}.
double even_odd_series(double x, int offset) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -x / (static_cast<double>(2 * k + offset - 1) * (2 * k + offset));
    sum += term;
    if (std::abs(term) <= std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return sum;
}

// d(sn)/ds / t³ = Σ_{j≥0} (−1)^{j+1} (j+1) x^j / (2j+3)!
double dsn_series(double x) {
  double fact = 6.0;  // 3!
  double xp = 1.0;
  double sum = 0.0;
  for (int j = 0; j < 60; ++j) {
    const double term = ((j % 2 == 0) ? -1.0 : 1.0) * (j + 1) * xp / fact;
    sum += term;
    if (j > 0 && std::abs(term) <= std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
    xp *= x;
    fact *= static_cast<double>(2 * j + 4) * (2 * j + 5);
  }
  return sum;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Broken:
      return "broken";
    case Regime::ExceptionalPoint:
      return "exceptional_point";
    case Regime::Symmetric:
      return "symmetric";
  }
  return "unknown";
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double TransferCoeffs::phi_a() const { return wrap_angle(std::arg(A)); }
double TransferCoeffs::phi_b() const { return wrap_angle(std::arg(B)); }

GapKernels gap_kernels(double s, double t) {
  GapKernels k;
  const double x = s * t * t;
  const double lambda = std::sqrt(std::abs(s));

  if (lambda * std::abs(t) < kSeriesLambdaT) {
    k.c = even_odd_series(x, 0);
    k.sn = t * even_odd_series(x, 1);
  } else if (s > 0.0) {
    k.c = std::cos(lambda * t);
    k.sn = std::sin(lambda * t) / lambda;
  } else {
    k.c = std::cosh(lambda * t);
    k.sn = std::sinh(lambda * t) / lambda;
  }

  k.dc_ds = -0.5 * t * k.sn;
  if (std::abs(x) < kDerivSeriesX) {
    k.dsn_ds = t * t * t * dsn_series(x);
  } else {
    k.dsn_ds = (t * k.c - k.sn) / (2.0 * s);
  }
  return k;
}

double signed_gap(const ModelParams& params) {
  const double d = std::abs(params.delta);
  const double k = std::abs(params.kappa);
  return (d - k) * (d + k);
}

Regime classify_regime(const ModelParams& params, double tol) {
  if (!(tol > 0.0 && tol <= 1e-3)) {
    throw InputError("classify_regime: tol must lie in (0, 1e-3]");
  }
  const double d = std::abs(params.delta);
  const double k = std::abs(params.kappa);
  if (!std::isfinite(d) || !std::isfinite(k)) {
    throw InputError("classify_regime: non-finite parameters");
  }
  if (d == 0.0 && k == 0.0) {
    throw DegenerateInputError("classify_regime: delta = kappa = 0 has no regime");
  }
  if (std::abs(k - d) <= tol * std::max(k, d)) return Regime::ExceptionalPoint;
  return d > k ? Regime::Broken : Regime::Symmetric;
}

double lambda0(const ModelParams& params) { return std::sqrt(std::abs(signed_gap(params))); }

Eigen::Matrix2cd dynamical_matrix(const ModelParams& params) {
  Eigen::Matrix2cd h;
  h << params.delta, kI * params.kappa,
       kI * std::conj(params.kappa), -params.delta;
  return h;
}

Eigen::Matrix2cd Eigensystem::propagator(double t) const {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  for (int s = 0; s < 2; ++s) {
    u += right[s] * std::exp(-kI * lambda[s] * t) * left[s].adjoint();
  }
  return u;
}

Eigensystem eigensystem(const ModelParams& params, double tol) {
  const Regime regime = classify_regime(params, tol);
  if (regime == Regime::ExceptionalPoint) {
    throw CoalescenceError("eigensystem: eigenvectors coalesce at the exceptional point");
  }
  const double l0 = lambda0(params);
  const cplx lam = regime == Regime::Broken ? cplx(l0, 0.0) : cplx(0.0, l0);

  Eigensystem es;
  es.lambda = {lam, -lam};
  const double delta = params.delta;
  const cplx kc = std::conj(params.kappa);

  for (int s = 0; s < 2; ++s) {
    const cplx ls = es.lambda[s];
    Eigen::RowVector2cd row;
    Eigen::Vector2cd r;
    if (params.kappa == 0.0) {
      // Diagonal matrix: λ_s = ±|δ| picks one of the unit vectors.
      const bool first = std::abs(ls - delta) < std::abs(ls + delta);
      r = first ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
      row = r.transpose();
    } else {
      r << delta + ls, kI * kc;
      row << kI * kc, ls - delta;
      const double norm = r.norm();
      r /= norm;
      row *= norm / (2.0 * kI * ls * kc);
    }
    es.right[s] = r;
    es.left[s] = row.adjoint();
  }
  return es;
}

TransferCoeffs transfer_coeffs(const ModelParams& params, double t) {
  const GapKernels k = gap_kernels(signed_gap(params), t);
  return {cplx(k.c, -params.delta * k.sn), params.kappa * k.sn};
}

Eigen::Matrix2cd transfer_matrix(const TransferCoeffs& coeffs) {
  Eigen::Matrix2cd m;
  m << coeffs.A, coeffs.B, std::conj(coeffs.B), std::conj(coeffs.A);
  return m;
}

SqueezeSummary squeeze_summary(const ModelParams& params, double t) {
  if (t < 0.0) throw InputError("squeeze_summary: t must be non-negative");
  const GapKernels k = gap_kernels(signed_gap(params), t);
  const TransferCoeffs c{cplx(k.c, -params.delta * k.sn), params.kappa * k.sn};

  SqueezeSummary out;
  out.S = c.a0() + c.b0();

  double arg_b = 0.0;
  if (c.b0() > 1e-12 * std::max(1.0, c.a0())) {
    arg_b = std::arg(c.B);
  } else {
    // B ≈ κ·C(t₀)·(t − t₀) near a zero: right limit at t = 0, left limit otherwise.
    const cplx slope = params.kappa * k.c;
    arg_b = std::arg(t == 0.0 ? slope : -slope);
  }
  const double arg_a = std::arg(c.A);
  out.phi_plus = wrap_angle(0.5 * (arg_b + arg_a));
  out.phi_minus = wrap_angle(0.5 * (arg_b - arg_a));

  if (params.delta != 0.0 || params.kappa != 0.0) {
    if (classify_regime(params) == Regime::Broken) {
      const double l0 = lambda0(params);
      out.period = kPi / l0;
      out.s_max = (std::abs(params.delta) + std::abs(params.kappa)) / l0;
    }
  }
  return out;
}

double quadrature_mean(const ModelParams& params, double t, const CoherentPair& alphas,
                       double phi, int mode) {
  if (mode != 1 && mode != 2) throw InputError("quadrature_mean: mode must be 1 or 2");
  const TransferCoeffs c = transfer_coeffs(params, t);
  const cplx own = mode == 1 ? alphas.alpha1 : alphas.alpha2;
  const cplx other = mode == 1 ? alphas.alpha2 : alphas.alpha1;
  return std::real(std::exp(-kI * phi) * (c.A * own + c.B * std::conj(other)));
}

double quadrature_variance(const ModelParams& params, double t) {
  const TransferCoeffs c = transfer_coeffs(params, t);
  return 0.25 * (std::norm(c.A) + std::norm(c.B));
}

QuadratureStats quadrature_stats(const ModelParams& params, double t, const CoherentPair& alphas,
                                 double phi, int mode) {
  return {quadrature_mean(params, t, alphas, phi, mode), quadrature_variance(params, t)};
}

cplx ground_state_param(const ModelParams& params, double tol) {
  if (classify_regime(params, tol) != Regime::Broken) {
    throw NoGroundStateError(
        "ground_state_param: only the Broken regime has a stationary squeezed state");
  }
  // q = −i(δ − sgn(δ)λ₀)/κ*, rewritten without the small-κ cancellation.
  const double l0 = lambda0(params);
  const double sgn = params.delta > 0.0 ? 1.0 : -1.0;
  return -kI * params.kappa / (params.delta + sgn * l0);
}

}  // namespace papt
