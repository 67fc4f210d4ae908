#include "papt/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <toml.hpp>

#include "papt/bec_ring.hpp"
#include "papt/core_dynamics.hpp"
#include "papt/errors.hpp"
#include "papt/fock_oracle.hpp"
#include "papt/platform_maps.hpp"
#include "papt/sensing.hpp"

namespace papt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> linspace(double a, double b, long n, const char* what) {
  if (n < 1) throw InputError(std::string(what) + ": grid must have at least one point");
  if (!std::isfinite(a) || !std::isfinite(b)) throw InputError(std::string(what) + ": non-finite bound");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

std::vector<double> number_list(const json& j, const char* what) {
  std::vector<double> out = j.get<std::vector<double>>();
  if (out.empty()) throw InputError(std::string(what) + ": list must not be empty");
  return out;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers (strided split).
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw InputError("config: '" + path + "' must be a table/object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path + "." + it.key();
    if (!base.contains(it.key())) throw InputError("config: unknown key '" + key + "'");
    json& slot = base[it.key()];
    const json& v = it.value();
    if (slot.is_object()) {
      overlay(slot, v, key);
    } else if (slot.is_null()) {
      if (!v.is_null() && !v.is_number()) throw InputError("config: '" + key + "' must be a number");
      slot = v;
    } else if (slot.is_number() && v.is_null() && it.key() == "working_index") {
      slot = v;  // null selects an explicit evolution time instead
    } else if (slot.is_number()) {
      if (!v.is_number()) throw InputError("config: '" + key + "' must be a number");
      // Keep integer-valued defaults integral so they read back as counts.
      if (slot.is_number_integer() && !v.is_number_integer()) {
        throw InputError("config: '" + key + "' must be an integer");
      }
      slot = v;
    } else if (slot.is_array()) {
      if (!v.is_array()) throw InputError("config: '" + key + "' must be a list");
      for (const auto& e : v) {
        if (!e.is_number()) throw InputError("config: '" + key + "' must hold numbers");
      }
      slot = v;
    } else if (slot.is_string()) {
      if (!v.is_string()) throw InputError("config: '" + key + "' must be a string");
      slot = v;
    } else if (slot.is_boolean()) {
      if (!v.is_boolean()) throw InputError("config: '" + key + "' must be true or false");
      slot = v;
    }
  }
}

std::string block_name(std::string_view command) {
  if (command == "platform") return "fwm";
  return std::string(command);
}

Estimand parse_estimand(const std::string& s) {
  if (s == "kappa") return Estimand::Kappa;
  if (s == "delta") return Estimand::Delta;
  throw InputError("config: wrt must be 'kappa' or 'delta'");
}

// ---- fig1 ---------------------------------------------------------------

RunOutput run_fig1(const json& b) {
  const double delta = b.at("delta").get<double>();
  if (delta == 0.0) throw InputError("fig1: delta must be nonzero");
  const auto ratios = number_list(b.at("ratios"), "fig1.ratios");
  const auto times = linspace(0.0, b.at("t_max").get<double>(), b.at("t_points").get<long>(), "fig1.t");
  const auto kappas = linspace(b.at("kappa_min").get<double>(), b.at("kappa_max").get<double>(),
                               b.at("kappa_points").get<long>(), "fig1.kappa");
  const auto delta_times = number_list(b.at("delta_times"), "fig1.delta_times");

  RunOutput out;
  Table st{"fig1_squeezing_vs_time.csv", {"kappa_over_delta", "t", "S"}, {}};
  for (double r : ratios) {
    const ModelParams p{delta, cplx(r * delta, 0.0)};
    for (double t : times) st.rows.push_back({r, t, squeeze_summary(p, t).S});
  }
  Table sk{"fig1_squeezing_vs_kappa.csv", {"delta_t", "kappa", "S", "re_A", "im_A"}, {}};
  for (double dt : delta_times) {
    const double t = dt / std::abs(delta);
    for (double k : kappas) {
      const ModelParams p{delta, cplx(k, 0.0)};
      const TransferCoeffs c = transfer_coeffs(p, t);
      sk.rows.push_back({dt, k, c.a0() + c.b0(), c.A.real(), c.A.imag()});
    }
  }
  out.tables.push_back(std::move(st));
  out.tables.push_back(std::move(sk));
  return out;
}

// ---- fig2 ---------------------------------------------------------------

RunOutput run_fig2(const json& b, unsigned threads) {
  const double delta = b.at("delta").get<double>();
  if (delta == 0.0) throw InputError("fig2: delta must be nonzero");
  const double alpha = b.at("alpha").is_null() ? 2.0 * (delta > 0 ? 1.0 : -1.0) : b.at("alpha").get<double>();
  const double phi = b.at("phi").get<double>();
  const auto kappas = linspace(b.at("kappa_min").get<double>(), b.at("kappa_max").get<double>(),
                               b.at("kappa_points").get<long>(), "fig2.kappa");
  const auto delta_times = number_list(b.at("delta_times"), "fig2.delta_times");
  const auto ratios = number_list(b.at("trace_ratios"), "fig2.trace_ratios");
  const auto times = linspace(0.0, b.at("t_max").get<double>(), b.at("t_points").get<long>(), "fig2.t");
  const auto alphas = linspace(b.at("alpha_min").get<double>(), b.at("alpha_max").get<double>(),
                               b.at("alpha_points").get<long>(), "fig2.alpha");
  const double alpha_ratio = b.at("alpha_ratio").get<double>();
  const int alpha_n = b.at("alpha_working_index").get<int>();
  const CoherentPair pair = CoherentPair::sensing_convention(alpha);

  auto sensor = [&](const ModelParams& p, double t, const CoherentPair& a) {
    SensorConfig c = SensorConfig::at_time(p, a, t);
    c.phi = phi;
    return c;
  };

  RunOutput out;
  Table ks{"fig2_kappa_sweep.csv", {"delta_t", "kappa", "X1", "abs_chi"}, {}};
  ks.rows.resize(delta_times.size() * kappas.size());
  parallel_for(ks.rows.size(), threads, [&](std::size_t i) {
    const double dt = delta_times[i / kappas.size()];
    const double k = kappas[i % kappas.size()];
    const double t = dt / std::abs(delta);
    const ModelParams p{delta, cplx(k, 0.0)};
    ks.rows[i] = {dt, k, quadrature_mean(p, t, pair, phi, 1), std::abs(susceptibility(sensor(p, t, pair)))};
  });

  Table kw{"fig2_kappa_sweep_working.csv", {"kappa", "t", "X1", "abs_chi"}, {}};
  for (double k : kappas) {
    const ModelParams p{delta, cplx(k, 0.0)};
    if (std::abs(k) >= std::abs(delta) || classify_regime(p) != Regime::Broken) continue;
    const double t = 2.0 * kPi / lambda0(p);
    kw.rows.push_back({k, t, quadrature_mean(p, t, pair, phi, 1), std::abs(susceptibility(sensor(p, t, pair)))});
  }

  Table tt{"fig2_time_trace.csv", {"kappa_over_delta", "t", "inv_var", "qfi", "S"}, {}};
  tt.rows.resize(ratios.size() * times.size());
  parallel_for(tt.rows.size(), threads, [&](std::size_t i) {
    const double r = ratios[i / times.size()];
    const double t = times[i % times.size()];
    const ModelParams p{delta, cplx(r * delta, 0.0)};
    const SensitivityReport rep = sensitivity_report(sensor(p, t, pair));
    tt.rows[i] = {r, t, rep.inv_var, rep.qfi, squeeze_summary(p, t).S};
  });

  Table as{"fig2_alpha_sweep.csv", {"alpha", "inv_var", "qfi", "ratio"}, {}};
  {
    const ModelParams p{delta, cplx(alpha_ratio * delta, 0.0)};
    for (double a : alphas) {
      SensorConfig c = SensorConfig::at_working_point(p, CoherentPair::sensing_convention(a), alpha_n);
      c.phi = phi;
      const SensitivityReport rep = sensitivity_report(c);
      as.rows.push_back({a, rep.inv_var, rep.qfi, rep.ratio});
    }
  }

  out.tables.push_back(std::move(ks));
  out.tables.push_back(std::move(kw));
  out.tables.push_back(std::move(tt));
  out.tables.push_back(std::move(as));
  return out;
}

// ---- fock ---------------------------------------------------------------

struct FockSeries {
  std::vector<std::vector<double>> rows;
  json summary;
};

RunOutput run_fock(const json& b, unsigned threads) {
  const double delta = b.at("delta").get<double>();
  if (delta == 0.0) throw InputError("fock: delta must be nonzero");
  const auto ratios = number_list(b.at("ratios"), "fock.ratios");
  const auto kerrs = number_list(b.at("U_over_delta"), "fock.U_over_delta");
  const auto times = linspace(0.0, b.at("t_max").get<double>(), b.at("t_points").get<long>(), "fock.t");
  const int pairs_min = b.at("pairs_min").get<int>();
  const int pairs_max = b.at("pairs_max").get<int>();
  if (pairs_min < 1 || pairs_max < pairs_min) throw InputError("fock: need 1 <= pairs_min <= pairs_max");
  fock::StepControl control;
  control.top_population_max = b.at("top_population_max").get<double>();
  control.throw_on_truncation = false;

  std::vector<FockSeries> series(ratios.size() * kerrs.size());
  parallel_for(series.size(), threads, [&](std::size_t i) {
    const double r = ratios[i / kerrs.size()];
    const double u = kerrs[i % kerrs.size()] * std::abs(delta);
    const ModelParams p{delta, cplx(r * delta, 0.0)};

    // Thermal pair statistics: the top 5% of a ladder of N pairs holds
    // about exp(−0.95N/n̄), so N ≈ 25 n̄ keeps it far below 1e-8.
    double nbar = 0.0;
    for (double t : times) nbar = std::max(nbar, std::norm(transfer_coeffs(p, t).B));
    const double wanted = std::ceil(25.0 * nbar) + 50.0;
    const int pairs = static_cast<int>(std::clamp(wanted, double(pairs_min), double(pairs_max)));

    const fock::FockBasis basis = fock::FockBasis::pair_sector(pairs);
    const fock::Propagator prop(fock::build_hamiltonian(p, fock::KerrParams{u}, basis), control);
    fock::FockState state = fock::prepare_state(basis, fock::Vacuum{});

    FockSeries& s = series[i];
    double t_last = 0.0;
    bool truncated = false;
    for (double t : times) {
      prop.advance(state, t - state.time);
      state.time = t;
      const double top = fock::top_population(state, control.top_fraction);
      if (top > control.top_population_max) {
        truncated = true;
        break;
      }
      const fock::MomentTable m = fock::moments(state);
      s.rows.push_back({r, u, t, fock::squeeze_factor_from_moments(m).S, squeeze_summary(p, t).S, m.n1,
                        state.norm() - 1.0, top, double(pairs)});
      t_last = t;
    }
    s.summary = json{{"kappa_over_delta", r}, {"U", u}, {"pairs", pairs}, {"t_last", t_last},
                     {"stopped_by_truncation", truncated}};
  });

  RunOutput out;
  Table tab{"fock_squeezing.csv",
            {"kappa_over_delta", "U", "t", "S_num", "S_exact", "n_mean", "norm_drift", "top_population", "pairs"},
            {}};
  json summary = json::array();
  for (auto& s : series) {
    for (auto& row : s.rows) tab.rows.push_back(std::move(row));
    summary.push_back(s.summary);
  }
  out.tables.push_back(std::move(tab));
  out.reports.push_back({"fock_summary.json", json{{"series", summary}}});
  return out;
}

// ---- bec ----------------------------------------------------------------

bec::BecParams bec_base(const json& b, double g_phi0_sq, double alpha) {
  bec::BecParams p = bec::BecParams::ring(g_phi0_sq, alpha, b.at("Phi0_sq").get<double>(), b.at("n_max").get<int>());
  p.E1 = b.at("E1").get<double>();
  p.dt = b.at("dt").get<double>();
  p.validate();
  return p;
}

RunOutput run_bec(const json& b, unsigned threads) {
  RunOutput out;

  const json& tr = b.at("trajectory");
  const bec::BecParams tp = bec_base(b, tr.at("g_phi0_sq").get<double>(), tr.at("alpha").get<double>());
  const bec::Trajectory traj =
      bec::integrate(tp, tr.at("t_max").get<double>(), tr.at("record_every").get<double>());
  Table tt{"bec_trajectory.csv", {"t", "re_Phi", "im_Phi"}, {}};
  for (int n = 1; n <= tp.n_max; ++n) tt.columns.push_back("S_" + std::to_string(n));
  for (const char* c : {"X_p1", "P_p1", "depletion_fraction"}) tt.columns.push_back(c);
  for (const auto& o : traj.rows) {
    std::vector<double> row{o.t, o.Phi.real(), o.Phi.imag()};
    row.insert(row.end(), o.S.begin(), o.S.end());
    row.push_back(o.X_p1);
    row.push_back(o.P_p1);
    row.push_back(o.depletion_fraction);
    tt.rows.push_back(std::move(row));
  }
  out.tables.push_back(std::move(tt));

  auto sweep_table = [&](const std::string& file, const std::vector<bec::SweepPoint>& pts) {
    Table t{file, {"g", "X", "chi_g", "visibility", "max_depletion", "flagged"}, {}};
    for (const auto& p : pts) {
      t.rows.push_back({p.g_phi0_sq, p.X, p.chi_g, p.visibility, p.max_depletion, p.flagged ? 1.0 : 0.0});
    }
    return t;
  };

  const json& sw = b.at("sweep");
  const auto grid = linspace(sw.at("g_min").get<double>(), sw.at("g_max").get<double>(),
                             sw.at("points").get<long>(), "bec.sweep");
  const bec::BecParams sp = bec_base(b, 0.0, sw.at("alpha").get<double>());
  out.tables.push_back(sweep_table("bec_sweep.csv", bec::sensing_sweep(sp, grid, sw.at("t").get<double>(), threads)));

  const json& fg = b.at("figure");
  const auto fgrid = number_list(fg.at("g_phi0_sq"), "bec.figure.g_phi0_sq");
  const double ft = fg.at("t").get<double>();
  const bec::BecParams fp = bec_base(b, 0.0, fg.at("alpha").get<double>());
  out.tables.push_back(sweep_table("bec_figure.csv", bec::sensing_sweep(fp, fgrid, ft, threads)));

  const auto theta = linspace(0.0, 2.0 * kPi, fg.at("theta_points").get<long>(), "bec.figure.theta");
  std::vector<Table> traces(fgrid.size()), densities(fgrid.size());
  parallel_for(fgrid.size(), threads, [&](std::size_t i) {
    bec::BecParams p = fp;
    p.g = fgrid[i] / p.Phi0_sq;
    const bec::Trajectory t = bec::integrate(p, ft, fg.at("record_every").get<double>());
    for (const auto& o : t.rows) traces[i].rows.push_back({fgrid[i], o.t, o.depletion_fraction, o.X_p1});
    const bec::DensityProfile d = bec::density_profile(t.final_state, theta, p);
    for (std::size_t k = 0; k < theta.size(); ++k) densities[i].rows.push_back({fgrid[i], theta[k], d.rho[k]});
  });
  Table ft_tab{"bec_figure_traces.csv", {"g", "t", "depletion_fraction", "X_p1"}, {}};
  Table dn_tab{"bec_density.csv", {"g", "theta", "rho"}, {}};
  for (auto& t : traces) {
    for (auto& r : t.rows) ft_tab.rows.push_back(std::move(r));
  }
  for (auto& t : densities) {
    for (auto& r : t.rows) dn_tab.rows.push_back(std::move(r));
  }
  out.tables.push_back(std::move(ft_tab));
  out.tables.push_back(std::move(dn_tab));
  return out;
}

// ---- sense --------------------------------------------------------------

RunOutput run_sense(const json& b, std::uint64_t seed, unsigned threads) {
  const ModelParams nominal{b.at("delta").get<double>(), cplx(b.at("kappa").get<double>(), 0.0)};
  const CoherentPair pair = CoherentPair::sensing_convention(b.at("alpha").get<double>());
  const Estimand wrt = parse_estimand(b.at("wrt").get<std::string>());

  SensorConfig c;
  if (!b.at("working_index").is_null()) {
    c = SensorConfig::at_working_point(nominal, pair, b.at("working_index").get<int>(), wrt);
  } else if (!b.at("t").is_null()) {
    c = SensorConfig::at_time(nominal, pair, b.at("t").get<double>(), wrt);
  } else {
    throw InputError("sense: set either working_index or t");
  }
  c.phi = b.at("phi").get<double>();
  c.mode = b.at("mode").get<int>();

  ModelParams truth = nominal;
  if (!b.at("truth_kappa").is_null()) truth.kappa = cplx(b.at("truth_kappa").get<double>(), 0.0);
  if (!b.at("truth_delta").is_null()) truth.delta = b.at("truth_delta").get<double>();

  const long shots = b.at("shots").get<long>();
  if (shots < 0) throw InputError("sense: shots must be non-negative");

  json body;
  body["time"] = c.time();
  body["report"] = sensitivity_report(c);
  if (shots > 0) {
    body["monte_carlo"] = monte_carlo_estimate(c, truth, static_cast<std::size_t>(shots), seed, threads);
  }

  RunOutput out;
  out.reports.push_back({"sense_report.json", std::move(body)});
  return out;
}

// ---- platform -----------------------------------------------------------

RunOutput run_platform(const json& b) {
  const platform::FwmParams p = platform::fwm_from_json(b);
  const platform::MappedModel m = platform::phase_mismatch(p);
  json body = platform::to_json(m);
  body["working_lengths"] = platform::working_lengths(p, b.at("working_points").get<int>());
  RunOutput out;
  out.reports.push_back({"platform.json", std::move(body)});
  return out;
}

// ---- output -------------------------------------------------------------

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(15) << v;
  return os.str();
}

json metadata(const RunOutput& output, const RunConfig& config) {
  return json{{"tool", "papt"},
              {"version", kVersion},
              {"command", config.command},
              {"seed", config.seed},
              {"config_hash", config_hash(output.effective)},
              {"modules",
               {{"core_dynamics", kVersion},
                {"sensing", kVersion},
                {"fock_oracle", kVersion},
                {"bec_ring", kVersion},
                {"platform_maps", kVersion},
                {"cli_runner", kVersion}}},
              {"config", output.effective}};
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"fig1", "fig2", "fock", "bec", "sense", "platform"};
  return names;
}

json load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file: " + path.string());
  const std::string text = buf.str();

  if (path.extension() == ".toml") {
    try {
      const toml::table tbl = toml::parse(text, path.string());
      std::ostringstream js;
      js << toml::json_formatter{tbl};
      return json::parse(js.str());
    } catch (const toml::parse_error& e) {
      throw InputError(std::string("config: TOML syntax error: ") + std::string(e.description()));
    }
  }
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw InputError("config: top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: JSON syntax error: ") + e.what());
  }
}

json default_block(std::string_view command) {
  if (command == "fig1") {
    return json{{"delta", 1.0},          {"ratios", {0.95, 1.0, 1.05}}, {"t_max", 30.0},
                {"t_points", 601},       {"kappa_min", 0.0},            {"kappa_max", 1.2},
                {"kappa_points", 1201},  {"delta_times", {15.0, 30.0}}};
  }
  if (command == "fig2") {
    return json{{"delta", 1.0},           {"alpha", nullptr},          {"phi", 0.0},
                {"kappa_min", 0.5},       {"kappa_max", 1.1},          {"kappa_points", 601},
                {"delta_times", {10.0, 15.0, 30.0}},                   {"trace_ratios", {0.94, 0.95}},
                {"t_max", 60.0},          {"t_points", 1201},          {"alpha_min", 0.1},
                {"alpha_max", 5.0},       {"alpha_points", 50},        {"alpha_ratio", 0.95},
                {"alpha_working_index", 2}};
  }
  if (command == "fock") {
    return json{{"delta", 1.0},       {"ratios", {0.95, 0.99, 1.0, 1.05}}, {"U_over_delta", {0.0, 1e-6}},
                {"t_max", 30.0},      {"t_points", 61},                    {"pairs_min", 200},
                {"pairs_max", 4000},  {"top_population_max", 1e-8}};
  }
  if (command == "bec") {
    return json{{"E1", 1.0},
                {"Phi0_sq", 1e5},
                {"n_max", 10},
                {"dt", 1e-3},
                {"trajectory", {{"g_phi0_sq", 0.48}, {"alpha", 2.0}, {"t_max", 30.0}, {"record_every", 0.05}}},
                {"sweep", {{"g_min", 0.40}, {"g_max", 0.49}, {"points", 19}, {"alpha", 20.0}, {"t", 30.0}}},
                {"figure",
                 {{"g_phi0_sq", {0.46, 0.462, 0.465, 0.468}},
                  {"alpha", 20.0},
                  {"t", 30.0},
                  {"record_every", 0.05},
                  {"theta_points", 361}}}};
  }
  if (command == "sense") {
    return json{{"delta", 1.0},     {"kappa", 0.95},  {"alpha", 2.0},        {"working_index", 2},
                {"t", nullptr},     {"wrt", "kappa"}, {"phi", 0.0},          {"mode", 1},
                {"shots", 10000},   {"truth_kappa", nullptr},               {"truth_delta", nullptr}};
  }
  if (command == "platform") {
    // 780 nm probe, 795 nm coupling, signal/idler sum matched to the pumps,
    // 0.2° crossing angle; rates in rad/s, density in m⁻³, σ in m².
    const double kp = platform::wavenumber(780e-9);
    const double kc = platform::wavenumber(795e-9);
    const double two_pi = 2.0 * kPi;
    return json{{"Omega_c", two_pi * 10e6},  {"Omega_p", two_pi * 1e6},   {"Delta_p", two_pi * 100e6},
                {"N_a", 1.2e15},             {"sigma_13", 2.9e-13},       {"sigma_24", 2.9e-13},
                {"gamma_12", two_pi * 1e3},  {"gamma_13", two_pi * 3e6},  {"gamma_14", two_pi * 3e6},
                {"k1", kp},                  {"k2", kc},                  {"kc", kc},
                {"kp", kp},                  {"theta_cp", 0.2 * kPi / 180.0},
                {"working_points", 3}};
  }
  throw InputError("unknown command '" + std::string(command) + "'");
}

json effective_block(std::string_view command, const json& file) {
  json block = default_block(command);
  const std::string name = block_name(command);
  if (file.is_object() && file.contains(name)) overlay(block, file.at(name), name);
  return block;
}

std::string config_hash(const json& effective) {
  const std::string text = effective.dump();  // keys are sorted by nlohmann::json
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunOutput run(const RunConfig& config) {
  const json block = effective_block(config.command, config.file);
  RunOutput out;
  try {
    if (config.command == "fig1") out = run_fig1(block);
    else if (config.command == "fig2") out = run_fig2(block, config.threads);
    else if (config.command == "fock") out = run_fock(block, config.threads);
    else if (config.command == "bec") out = run_bec(block, config.threads);
    else if (config.command == "sense") out = run_sense(block, config.seed, config.threads);
    else if (config.command == "platform") out = run_platform(block);
    else throw InputError("unknown command '" + config.command + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  out.effective = json{{block_name(config.command), block}};
  return out;
}

std::vector<fs::path> write_outputs(const RunOutput& output, const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

  const json meta = metadata(output, config);
  std::vector<fs::path> written;
  auto open = [&](const std::string& name) {
    const fs::path path = config.out_dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    written.push_back(path);
    return f;
  };

  for (const Table& t : output.tables) {
    std::ofstream f = open(t.file);
    f << "# tool: papt " << kVersion << "\n";
    f << "# command: " << config.command << "\n";
    f << "# seed: " << config.seed << "\n";
    f << "# config_hash: " << meta.at("config_hash").get<std::string>() << "\n";
    f << "# modules: " << meta.at("modules").dump() << "\n";
    f << "# config: " << output.effective.dump() << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) f << (i ? "," : "") << t.columns[i];
    f << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_number(row[i]);
      f << "\n";
    }
    if (!f) throw IoError("write failed for " + t.file);
  }
  for (const Report& r : output.reports) {
    std::ofstream f = open(r.file);
    json body = r.body;
    body["meta"] = meta;
    f << body.dump(2) << "\n";
    if (!f) throw IoError("write failed for " + r.file);
  }
  return written;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Two-mode squeezing and sensing datasets"};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("command", command, "fig1 | fig2 | fock | bec | sense | platform")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "TOML or JSON configuration file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg;
    cfg.command = command;
    cfg.out_dir = out_dir;
    cfg.seed = seed;
    cfg.threads = threads;
    if (!config_path.empty()) cfg.file = load_config_file(config_path);
    const RunOutput output = run(cfg);
    for (const auto& p : write_outputs(output, cfg)) std::cout << p.string() << "\n";
    return 0;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace papt::cli
