#include "papt/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "papt/errors.hpp"

namespace papt::fock {

namespace {

constexpr cplx kI{0.0, 1.0};

// Keeps the Chebyshev argument a·dt moderate so Bessel evaluation stays accurate.
constexpr double kMaxChebyshevArgument = 100.0;

// Σ_{n > cutoff} of the Poisson weights of |α⟩, plus the kept amplitudes.
double coherent_amplitudes(cplx alpha, int cutoff, std::vector<cplx>& amps) {
  amps.assign(cutoff + 1, cplx(0.0, 0.0));
  cplx c = std::exp(-0.5 * std::norm(alpha));
  amps[0] = c;
  for (int n = 1; n <= cutoff; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    amps[n] = c;
  }
  double tail = 0.0;
  for (int n = cutoff + 1; n < cutoff + 100000; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    const double p = std::norm(c);
    tail += p;
    if (n > std::norm(alpha) && p < 1e-30) break;
  }
  return tail;
}

}  // namespace

FockBasis::FockBasis(int cutoff1, int cutoff2, std::optional<int> sector)
    : cutoff1_(cutoff1), cutoff2_(cutoff2), sector_(sector) {
  if (cutoff1 < 1 || cutoff2 < 1) throw InputError("FockBasis: cutoff must be at least 1");
  if (sector_) {
    const int c = *sector_;
    n2_min_ = std::max(0, -c);
    const int n2_max = std::min(cutoff2_, cutoff1_ - c);
    if (n2_max < n2_min_) throw InputError("FockBasis: sector is empty for these cutoffs");
    size_ = static_cast<std::size_t>(n2_max - n2_min_ + 1);
  } else {
    size_ = static_cast<std::size_t>(cutoff1_ + 1) * static_cast<std::size_t>(cutoff2_ + 1);
  }
}

FockBasis FockBasis::full(int cutoff1, int cutoff2) { return FockBasis(cutoff1, cutoff2, std::nullopt); }

FockBasis FockBasis::pair_sector(int pairs, int difference) {
  return FockBasis(pairs + std::max(difference, 0), pairs + std::max(-difference, 0), difference);
}

std::pair<int, int> FockBasis::occupations(std::size_t index) const {
  if (sector_) {
    const int n2 = n2_min_ + static_cast<int>(index);
    return {n2 + *sector_, n2};
  }
  const int stride = cutoff2_ + 1;
  return {static_cast<int>(index / stride), static_cast<int>(index % stride)};
}

std::optional<std::size_t> FockBasis::index(int n1, int n2) const {
  if (n1 < 0 || n2 < 0 || n1 > cutoff1_ || n2 > cutoff2_) return std::nullopt;
  if (sector_) {
    if (n1 - n2 != *sector_) return std::nullopt;
    return static_cast<std::size_t>(n2 - n2_min_);
  }
  return static_cast<std::size_t>(n1) * (cutoff2_ + 1) + n2;
}

SparseOperator build_hamiltonian(const ModelParams& params, const KerrParams& kerr,
                                 const FockBasis& basis) {
  if (kerr.U < 0.0) throw InputError("build_hamiltonian: Kerr strength must be non-negative");
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(3 * basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto [n1, n2] = basis.occupations(i);
    const double diag = params.delta * (n1 + n2) + 0.5 * kerr.U * (double(n1) * n1 + double(n2) * n2);
    triplets.emplace_back(i, i, cplx(diag, 0.0));
    if (const auto up = basis.index(n1 + 1, n2 + 1)) {
      const cplx elem = kI * params.kappa * std::sqrt(double(n1 + 1) * double(n2 + 1));
      triplets.emplace_back(*up, i, elem);
      triplets.emplace_back(i, *up, std::conj(elem));
    }
  }
  SparseOperator h(basis.size(), basis.size());
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

FockState prepare_state(const FockBasis& basis, const StateSpec& spec, double tail_tol) {
  FockState state{basis, Eigen::VectorXcd::Zero(basis.size()), 0.0};

  if (std::holds_alternative<Vacuum>(spec)) {
    const auto i0 = basis.index(0, 0);
    if (!i0) throw InputError("prepare_state: basis does not contain the vacuum");
    state.amplitudes[*i0] = 1.0;
    return state;
  }

  if (const auto* coh = std::get_if<Coherent>(&spec)) {
    if (basis.sector()) throw InputError("prepare_state: coherent states need the full basis");
    std::vector<cplx> c1, c2;
    const double t1 = coherent_amplitudes(coh->alpha1, basis.cutoff1(), c1);
    const double t2 = coherent_amplitudes(coh->alpha2, basis.cutoff2(), c2);
    const double tail = t1 + t2 - t1 * t2;
    if (tail > tail_tol) {
      throw TruncationError("prepare_state: cutoff too small for coherent amplitude (tail mass " +
                            std::to_string(tail) + ")");
    }
    for (int n1 = 0; n1 <= basis.cutoff1(); ++n1) {
      for (int n2 = 0; n2 <= basis.cutoff2(); ++n2) {
        state.amplitudes[*basis.index(n1, n2)] = c1[n1] * c2[n2];
      }
    }
    state.amplitudes.normalize();
    return state;
  }

  const cplx q = std::get<PairSqueezed>(spec).q;
  if (!(std::abs(q) < 1.0)) throw InputError("prepare_state: pair amplitude requires |q| < 1");
  if (basis.sector() && *basis.sector() != 0) {
    throw InputError("prepare_state: pair-squeezed states live in the n1 = n2 sector");
  }
  const int n_max = std::min(basis.cutoff1(), basis.cutoff2());
  const double tail = std::pow(std::norm(q), n_max + 1);
  if (tail > tail_tol) {
    throw TruncationError("prepare_state: cutoff too small for pair amplitude (tail mass " +
                          std::to_string(tail) + ")");
  }
  cplx amp = std::sqrt(1.0 - std::norm(q));
  for (int n = 0; n <= n_max; ++n) {
    state.amplitudes[*basis.index(n, n)] = amp;
    amp *= q;
  }
  state.amplitudes.normalize();
  return state;
}

double top_population(const FockState& state, double fraction) {
  const auto& b = state.basis;
  const double level1 = (1.0 - fraction) * b.cutoff1();
  const double level2 = (1.0 - fraction) * b.cutoff2();
  double pop = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto [n1, n2] = b.occupations(i);
    if (n1 > level1 || n2 > level2) pop += std::norm(state.amplitudes[i]);
  }
  return pop;
}

Propagator::Propagator(SparseOperator hamiltonian, StepControl control)
    : h_(std::move(hamiltonian)), control_(control) {
  // Gershgorin bounds; H is Hermitian so the spectrum is real.
  e_min_ = std::numeric_limits<double>::infinity();
  e_max_ = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < h_.outerSize(); ++r) {
    double center = 0.0;
    double radius = 0.0;
    for (SparseOperator::InnerIterator it(h_, r); it; ++it) {
      if (it.col() == r) {
        center = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    e_min_ = std::min(e_min_, center - radius);
    e_max_ = std::max(e_max_, center + radius);
  }
}

void Propagator::advance(FockState& state, double dt) const {
  if (dt == 0.0) return;
  if (control_.method == Integrator::Chebyshev) {
    advance_chebyshev(state.amplitudes, dt);
  } else {
    advance_rk4(state.amplitudes, dt);
  }
  state.time += dt;
}

void Propagator::advance_chebyshev(Eigen::VectorXcd& psi, double dt) const {
  const double half_width = std::max(0.5 * (e_max_ - e_min_), 1e-12);
  const double center = 0.5 * (e_max_ + e_min_);
  const int pieces = std::max(1, static_cast<int>(std::ceil(half_width * std::abs(dt) / kMaxChebyshevArgument)));
  const double h = dt / pieces;
  const double x = half_width * std::abs(h);
  const double sign = h >= 0.0 ? 1.0 : -1.0;

  // c_k = (2 − δ_k0)(−i·sign)^k J_k(x)
  std::vector<cplx> coeffs;
  const int k_min = static_cast<int>(std::ceil(x)) + 8;
  for (int k = 0;; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
    cplx phase = std::pow(cplx(0.0, -sign), k);
    coeffs.push_back((k == 0 ? 1.0 : 2.0) * phase * jk);
    if (k >= k_min && std::abs(jk) < control_.chebyshev_tol) break;
    if (k > 100000) throw StepSizeError("Chebyshev series failed to converge");
  }
  const cplx global_phase = std::exp(cplx(0.0, -center * h));

  Eigen::VectorXcd prev(psi.size()), cur(psi.size()), next(psi.size()), acc(psi.size());
  for (int p = 0; p < pieces; ++p) {
    prev = psi;
    cur = (h_ * psi - center * psi) / half_width;
    acc = coeffs[0] * prev + coeffs[1] * cur;
    for (std::size_t k = 2; k < coeffs.size(); ++k) {
      next = 2.0 * (h_ * cur - center * cur) / half_width - prev;
      acc += coeffs[k] * next;
      prev.swap(cur);
      cur.swap(next);
    }
    psi = global_phase * acc;
  }
}

void Propagator::advance_rk4(Eigen::VectorXcd& psi, double dt) const {
  const double bound = std::max(std::abs(e_min_), std::abs(e_max_));
  const double h_max = std::pow(120.0 * control_.rk4_local_error, 0.2) / std::max(bound, 1e-12);
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(dt) / h_max)));
  if (steps > 100000000L) throw StepSizeError("RK4: step count exceeds limit");
  const double h = dt / static_cast<double>(steps);
  const cplx mih = cplx(0.0, -h);
  Eigen::VectorXcd k1, k2, k3, k4;
  for (long s = 0; s < steps; ++s) {
    k1 = mih * (h_ * psi);
    k2 = mih * (h_ * (psi + 0.5 * k1));
    k3 = mih * (h_ * (psi + 0.5 * k2));
    k4 = mih * (h_ * (psi + k3));
    psi += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
}

FockState evolve(const FockState& state, const SparseOperator& hamiltonian, double t,
                 const StepControl& control) {
  const Propagator prop(hamiltonian, control);
  FockState out = state;
  prop.advance(out, t);
  const double top = top_population(out, control.top_fraction);
  if (control.throw_on_truncation && top > control.top_population_max) {
    throw TruncationError("evolve: top Fock levels populated (" + std::to_string(top) +
                          "), raise the cutoff");
  }
  return out;
}

MomentTable MomentTable::central() const {
  MomentTable c = *this;
  c.a1 = 0.0;
  c.a2 = 0.0;
  c.a1a1 = a1a1 - a1 * a1;
  c.a2a2 = a2a2 - a2 * a2;
  c.a1a2 = a1a2 - a1 * a2;
  c.a1dag_a2 = a1dag_a2 - std::conj(a1) * a2;
  c.n1 = n1 - std::norm(a1);
  c.n2 = n2 - std::norm(a2);
  return c;
}

MomentTable moments(const FockState& state) {
  const auto& b = state.basis;
  const auto& psi = state.amplitudes;
  MomentTable m;
  // ⟨ψ| O |ψ⟩ with O|n1,n2⟩ = w |n1', n2'⟩: Σ conj(ψ[n1',n2']) w ψ[n1,n2].
  auto bra = [&](int n1, int n2) -> cplx {
    const auto j = b.index(n1, n2);
    return j ? std::conj(psi[*j]) : cplx(0.0, 0.0);
  };
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cplx amp = psi[i];
    if (amp == 0.0) continue;
    const auto [n1, n2] = b.occupations(i);
    const double p = std::norm(amp);
    m.n1 += n1 * p;
    m.n2 += n2 * p;
    if (n1 > 0) m.a1 += bra(n1 - 1, n2) * std::sqrt(double(n1)) * amp;
    if (n2 > 0) m.a2 += bra(n1, n2 - 1) * std::sqrt(double(n2)) * amp;
    if (n1 > 1) m.a1a1 += bra(n1 - 2, n2) * std::sqrt(double(n1) * (n1 - 1)) * amp;
    if (n2 > 1) m.a2a2 += bra(n1, n2 - 2) * std::sqrt(double(n2) * (n2 - 1)) * amp;
    if (n1 > 0 && n2 > 0) m.a1a2 += bra(n1 - 1, n2 - 1) * std::sqrt(double(n1) * n2) * amp;
    if (n2 > 0) m.a1dag_a2 += bra(n1 + 1, n2 - 1) * std::sqrt(double(n1 + 1) * n2) * amp;
  }
  return m;
}

SqueezeEstimate squeeze_factor_from_moments(const MomentTable& raw) {
  const MomentTable m = raw.central();
  double v_max = -std::numeric_limits<double>::infinity();
  double v_min = std::numeric_limits<double>::infinity();
  SqueezeEstimate out;
  for (int sign : {1, -1}) {
    // V±(φ) = c± + Re(e^{−2iφ} z±)/2
    const double c = 0.5 * (m.n1 + m.n2 + 1.0 + 2.0 * sign * m.a1dag_a2.real());
    const cplx z = m.a1a1 + m.a2a2 + 2.0 * sign * m.a1a2;
    const double half = 0.5 * std::abs(z);
    v_max = std::max(v_max, c + half);
    if (c - half < v_min) {
      v_min = c - half;
      out.sign = sign;
      out.phi_opt = std::remainder(0.5 * (std::arg(z) - kPi), kPi);
    }
  }
  if (!(v_min > 0.0)) throw InputError("squeeze_factor_from_moments: non-physical moment table");
  out.S = std::pow(v_max / v_min, 0.25);
  return out;
}

double energy(const FockState& state, const SparseOperator& hamiltonian) {
  return state.amplitudes.dot(hamiltonian * state.amplitudes).real();
}

double fidelity(const FockState& a, const FockState& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw InputError("fidelity: basis mismatch");
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

Eigen::VectorXcd apply_mode_combination(const FockState& state, cplx c_a1, cplx c_a2dag) {
  const auto& b = state.basis;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const cplx amp = state.amplitudes[i];
    if (amp == 0.0) continue;
    const auto [n1, n2] = b.occupations(i);
    if (n1 > 0) {
      if (const auto j = b.index(n1 - 1, n2)) out[*j] += c_a1 * std::sqrt(double(n1)) * amp;
    }
    if (const auto j = b.index(n1, n2 + 1)) out[*j] += c_a2dag * std::sqrt(double(n2 + 1)) * amp;
  }
  return out;
}

std::vector<TraceRow> evolve_trace(const FockState& initial, const SparseOperator& hamiltonian,
                                   const std::vector<double>& times, const StepControl& control) {
  const Propagator prop(hamiltonian, control);
  FockState state = initial;
  const double norm0 = initial.norm();
  std::vector<TraceRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    if (t < state.time) throw InputError("evolve_trace: times must be non-decreasing");
    prop.advance(state, t - state.time);
    state.time = t;

    TraceRow row;
    row.t = t;
    const MomentTable m = moments(state);
    row.S_num = squeeze_factor_from_moments(m).S;
    row.n_mean_1 = m.n1;
    row.n_mean_2 = m.n2;
    row.norm_drift = state.norm() - norm0;
    row.top_population = top_population(state, control.top_fraction);
    if (control.throw_on_truncation && row.top_population > control.top_population_max) {
      throw TruncationError("evolve_trace: top Fock levels populated at t = " + std::to_string(t));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace papt::fock
