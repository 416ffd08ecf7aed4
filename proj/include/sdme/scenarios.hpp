#pragma once

// Named scenarios behind the command-line runner. Each scenario reads a flat
// key=value map, writes CSV artifacts plus run.meta, and maps failures onto
// exit codes: 0 ok, 2 configuration, 3 numerical, 4 undecided verdict.

#include "sdme/csv.hpp"
#include "sdme/evolution.hpp"
#include "sdme/mfa.hpp"
#include "sdme/random.hpp"
#include "sdme/schmidt.hpp"
#include "sdme/twospin.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#ifndef SDME_VERSION
#define SDME_VERSION "0.0.0"
#endif

namespace sdme::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kUndecided = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ParamMap = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits "key=value"; throws ConfigError on a malformed entry.
inline std::pair<std::string, std::string> parse_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
  auto key = trim(line.substr(0, eq));
  auto value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(line) + "'");
  return {key, value};
}

/// key=value lines; blank lines and lines starting with '#' are ignored.
inline ParamMap parse_config(std::istream& in) {
  ParamMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      auto [k, v] = parse_assignment(t);
      out[k] = v;
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline ParamMap parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in);
}

inline double parse_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + s + "' is not a finite number");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
  return v;
}

/// Typed access to a scenario's parameters. Every read declares the key;
/// finish() rejects whatever was supplied but never declared.
class Params {
 public:
  Params(std::string scenario, ParamMap given) : scenario_(std::move(scenario)), given_(std::move(given)) {
    if (auto it = given_.find("scenario"); it != given_.end() && it->second != scenario_)
      throw ConfigError("config is for scenario '" + it->second + "', not '" + scenario_ + "'");
    declared_.push_back("scenario");
  }

  std::string text(const std::string& key, const std::string& fallback) { return resolve(key, &fallback); }
  std::string text(const std::string& key) { return resolve(key, nullptr); }

  double real(const std::string& key, const std::string& fallback) { return parse_real(key, text(key, fallback)); }
  double real(const std::string& key) { return parse_real(key, text(key)); }

  double positive(const std::string& key, const std::string& fallback) {
    const double v = real(key, fallback);
    if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be > 0");
    return v;
  }
  double nonnegative(const std::string& key, const std::string& fallback) {
    const double v = real(key, fallback);
    if (v < 0.0) throw ConfigError("key '" + key + "' must be >= 0");
    return v;
  }

  long long integer(const std::string& key, const std::string& fallback, long long lo, long long hi) {
    return bounded(key, parse_integer(key, text(key, fallback)), lo, hi);
  }
  long long integer(const std::string& key, long long lo, long long hi) {
    return bounded(key, parse_integer(key, text(key)), lo, hi);
  }

  std::vector<double> reals(const std::string& key, const std::string& fallback) {
    std::vector<double> out;
    std::stringstream ss(text(key, fallback));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value");
    return out;
  }

  Vec3 vec3(const std::string& key, const std::string& fallback) {
    auto v = reals(key, fallback);
    if (v.size() != 3) throw ConfigError("key '" + key + "' needs three comma-separated values");
    return {v[0], v[1], v[2]};
  }

  bool flag(const std::string& key, const std::string& fallback) {
    const auto v = text(key, fallback);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("key '" + key + "' must be 0/1/true/false");
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    const auto v = text(key, fallback);
    for (const auto& a : allowed)
      if (v == a) return v;
    throw ConfigError("key '" + key + "' has unsupported value '" + v + "'");
  }

  void finish() const {
    for (const auto& [k, v] : given_)
      if (std::find(declared_.begin(), declared_.end(), k) == declared_.end())
        throw ConfigError("unknown key '" + k + "' for scenario " + scenario_);
  }

  const std::vector<std::pair<std::string, std::string>>& resolved() const { return resolved_; }

 private:
  std::string resolve(const std::string& key, const std::string* fallback) {
    declared_.push_back(key);
    std::string value;
    if (auto it = given_.find(key); it != given_.end()) {
      value = it->second;
    } else if (fallback) {
      value = *fallback;
    } else {
      throw ConfigError("missing required key '" + key + "' for scenario " + scenario_);
    }
    if (value.empty()) throw ConfigError("key '" + key + "' has an empty value");
    resolved_.emplace_back(key, value);
    return value;
  }

  long long bounded(const std::string& key, long long v, long long lo, long long hi) const {
    if (v < lo || v > hi)
      throw ConfigError("key '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::string scenario_;
  ParamMap given_;
  std::vector<std::string> declared_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct RunResult {
  std::string scenario;
  std::vector<Artifact> files;
  std::vector<std::pair<std::string, std::string>> resolved;
  std::vector<std::pair<std::string, std::string>> notes;  // written to run.meta as comments
  int exit_code = kOk;
  std::string message;

  const Artifact& file(const std::string& name) const& {
    for (const auto& f : files)
      if (f.name == name) return f;
    throw std::out_of_range("no artifact " + name);
  }
  Artifact file(const std::string& name) && { return static_cast<const RunResult&>(*this).file(name); }
};

inline std::string table_text(const csv::Table& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

inline std::string vec_text(const Vec3& v) {
  return csv::format(v.x()) + "," + csv::format(v.y()) + "," + csv::format(v.z());
}

namespace scenarios {

inline std::size_t sample_count(Params& p, const std::string& fallback) {
  return static_cast<std::size_t>(p.integer("samples", fallback, 1, 10'000'000));
}

inline RunResult schmidt(Params& p) {
  const int d_m = static_cast<int>(p.integer("d_m", "10", 2, 1000));
  SchmidtModel model;
  model.gamma_eta = p.positive("gamma_eta", "1");
  model.m = static_cast<int>(p.integer("m", "3", 2, 3));
  const double factor = p.nonnegative("rate_factor", "0");  // 0: 12 for d_m = 2, else 4
  if (factor > 0.0) model.rate_factor = factor;
  const double t_end = p.positive("t_end", "40");
  const auto samples = sample_count(p, "400");
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 0, std::numeric_limits<long long>::max()));
  p.finish();

  Rng rng(seed);
  auto s0 = SchmidtState::random(rng, d_m);
  SchmidtControls ctl;
  ctl.sample_interval = t_end / static_cast<double>(samples);
  auto tr = integrate_schmidt(s0, model, t_end, ctl);

  RunResult r;
  r.files.push_back({"fig1_schmidt.csv", table_text(tr.table)});
  r.notes = {{"initial_max", "q" + std::to_string(tr.initial_max + 1)},
             {"final_max_q", csv::format(tr.final_q.maxCoeff())},
             {"rate_factor_used", csv::format(model.factor(d_m))},
             {"max_norm_error", csv::format(tr.max_norm_error)}};
  return r;
}

inline RunResult bell(Params& p) {
  BellModelParams m;
  m.omega_B = p.positive("omega_B", "1");
  m.beta = p.positive("beta", "10");
  m.gamma_H = p.nonnegative("gamma_H", "0.005");
  m.gamma_D = p.nonnegative("gamma_D", "0.05");
  const Vec3 ka = p.vec3("ka0", "0.5,0,0.5");
  const Vec3 kb = p.vec3("kb0", "0,0.5,-0.5");
  const double t_end = p.positive("t_end", "2000");
  const auto samples = sample_count(p, "2000");
  p.finish();
  if (ka.norm() > 1.0 || kb.norm() > 1.0) throw ConfigError("ka0 and kb0 must lie in the unit ball");

  const Dims dims{2, 2};
  const CMatrix ra = pauli::bloch_state(ka), rb = pauli::bloch_state(kb);
  DensityMatrix rho0(dims, hermitian_part(kron(ra, rb)));
  auto eq = bell_equation(m);
  IntegrationControls ctl;
  ctl.adaptive = {.atol = 1e-12, .rtol = 1e-10};
  ctl.sample_interval = t_end / static_cast<double>(samples);
  std::vector<Probe> probes = {probes::qubit_bloch(dims, 0, "ka"),
                               probes::qubit_bloch(dims, 1, "kb"),
                               probes::purity(),
                               probes::tau(dims, {.pair = {}, .eta = m.eta}),
                               probes::expectation("PB", singlet_projector()),
                               probes::free_energy(eq.hamiltonian(), ThermalConfig{.beta = m.beta})};
  auto tr = integrate(rho0, eq, t_end, ctl, probes);

  RunResult r;
  r.files.push_back({"fig2_bell.csv", table_text(tr.table)});
  if (m.gamma_H > 0.0) {
    const double kappa = solve_kappa(m);
    r.notes.emplace_back("kappa", csv::format(kappa));
    r.notes.emplace_back("final_distance_to_fixed_point",
                         csv::format((tr.final_state - bell_state_from_kappa(kappa).matrix()).norm()));
  }
  r.notes.emplace_back("max_trace_error", csv::format(tr.diagnostics.max_trace_error));
  return r;
}

inline RunResult trunc(Params& p) {
  TruncationParams tp;
  tp.gamma_H = p.nonnegative("gamma_H", "1");
  tp.gamma_D = p.nonnegative("gamma_D", "1");
  tp.omega_E = p.vec3("omega_E", "100,100,100");
  const double bw = p.positive("beta_omega", "1");  // β|ω_E|
  tp.omega_s = p.nonnegative("omega_s", "0");
  const Vec3 k0 = p.vec3("k0", "0,0.5,0.5");
  const double t_end = p.positive("t_end", "10");
  const auto samples = sample_count(p, "4000");
  p.finish();
  if (tp.omega_E.norm() == 0.0) throw ConfigError("omega_E must be nonzero");
  if (k0.norm() > 1.0) throw ConfigError("k0 must lie in the unit ball");
  tp.beta = bw / tp.omega_E.norm();

  auto tr = integrate_trunc(k0, tp, t_end, t_end / static_cast<double>(samples));
  csv::Table t;
  t.columns = {"t", "kx", "ky", "kz"};
  for (std::size_t i = 0; i < tr.t.size(); ++i) t.rows.push_back({tr.t[i], tr.k[i].x(), tr.k[i].y(), tr.k[i].z()});

  RunResult r;
  r.files.push_back({"fig3_trunc.csv", table_text(t)});
  r.notes = {{"thermal_point", vec_text(thermal_bloch(tp))},
             {"steady_state", vec_text(trunc_steady_state(tp, tr.k.back(), t_end))},
             {"truncation_valid", tp.truncation_valid() ? "1" : "0"}};
  return r;
}

inline RunResult mfa(Params& p) {
  const double omega_a = p.positive("omega_a", "1");
  const double delta = p.real("Delta", "0.38268343236508978");
  const double omega_1 = p.nonnegative("omega_1", "0.92387953251128674");
  const double g = p.real("g", "0.1");
  QubitChannel a{p.nonnegative("gamma1_a", "0.01"), p.nonnegative("gamma_phi_a", "0.001"),
                 p.nonnegative("n0_a", "0.005")};
  QubitChannel b{p.nonnegative("gamma1_b", "0.1"), p.nonnegative("gamma_phi_b", "0.01"),
                 p.nonnegative("n0_b", "0.0001")};
  const double kick = p.real("kick", "0.05");
  ScanSettings ss;
  ss.t_end = p.positive("t_end", "6000");
  ss.dt_out = p.positive("dt", "0.2");
  ss.kick = kick;
  ss.cycle.settle_fraction = p.real("settle_fraction", "0.6");
  ss.cycle.tol = p.positive("cycle_tol", "1e-4");
  const bool require = p.flag("require_verdict", "0");
  const bool scan = p.flag("scan", "1");
  std::vector<double> deltas, gs;
  if (scan) {
    deltas = p.reals("scan_Delta", "-0.38268343236508978,-0.2,0,0.2,0.38268343236508978");
    gs = p.reals("scan_g", "0,0.1");
    ss.policy = p.choice("scan_policy", "fixed_omega1", {"fixed_omega1", "fixed_omegaR"}) == "fixed_omegaR"
                    ? ScanPolicy::fixed_omegaR
                    : ScanPolicy::fixed_omega1;
  }
  p.finish();
  if (ss.cycle.settle_fraction < 0.0 || ss.cycle.settle_fraction >= 1.0)
    throw ConfigError("settle_fraction must lie in [0, 1)");
  if (!relaxation_times(a).finite || !relaxation_times(b).finite)
    throw ConfigError("both spins need nonzero relaxation rates");

  auto params = MfaParams::from_rates(omega_a, delta, omega_1, g, a, b);
  auto uncoupled = params;
  uncoupled.g = 0.0;
  auto tc = integrate_mfa(mfa_default_initial(params, kick), params, ss.t_end, ss.dt_out);
  auto tu = integrate_mfa(mfa_default_initial(uncoupled, kick), uncoupled, ss.t_end, ss.dt_out);
  const auto vc = detect_limit_cycle(tc, ss.cycle);
  const auto vu = detect_limit_cycle(tu, ss.cycle);

  RunResult r;
  r.files.push_back({"fig4_coupled.csv", table_text(tc.table())});
  r.files.push_back({"fig4_uncoupled.csv", table_text(tu.table())});
  r.notes = {{"bloch_convention", "k=<sigma> |k|<=1 kz0=-1/(2n0+1)"},
             {"hartmann_hahn", params.hartmann_hahn(1e-6) ? "1" : "0"},
             {"verdict_coupled", to_string(vc.verdict)},
             {"period_coupled", csv::format(vc.period)},
             {"amplitude_coupled", csv::format(vc.amplitude)},
             {"verdict_uncoupled", to_string(vu.verdict)}};
  bool undecided = vc.verdict == Verdict::undecided || vu.verdict == Verdict::undecided;

  if (scan) {
    csv::Table t;
    t.columns = {"Delta", "g", "verdict", "period", "amplitude"};
    std::ostringstream os;
    csv::write_header(os, t.columns);
    for (const auto& row : detuning_scan(params, deltas, gs, ss)) {
      os << csv::format(row.Delta) << ',' << csv::format(row.g) << ',' << to_string(row.report.verdict) << ','
         << csv::format(row.report.period) << ',' << csv::format(row.report.amplitude) << '\n';
      undecided = undecided || row.report.verdict == Verdict::undecided;
    }
    r.files.push_back({"fig4_scan.csv", os.str()});
    r.notes.emplace_back("scan_policy", ss.policy == ScanPolicy::fixed_omegaR ? "fixed_omegaR" : "fixed_omega1");
  }
  if (require && undecided) {
    r.exit_code = kUndecided;
    r.message = "limit-cycle detection undecided";
  }
  return r;
}

inline RunResult bloch_svd(Params& p) {
  const int d_a = static_cast<int>(p.integer("d_a", "3", 2, 6));
  const int d_b = static_cast<int>(p.integer("d_b", "4", 2, 6));
  const double gamma_D = p.positive("gamma_D", "1");
  const int rank = static_cast<int>(p.integer("rank", "2", 0, 36));
  const double t_end = p.positive("t_end", "1000");
  const auto samples = sample_count(p, "400");
  const auto seed = static_cast<std::uint64_t>(p.integer("seed", 0, std::numeric_limits<long long>::max()));
  p.finish();
  if (rank > d_a * d_b) throw ConfigError("rank exceeds d_a*d_b");

  Rng rng(seed);
  const Dims dims{d_a, d_b};
  auto rho0 = random_mixed(rng, dims, rank);
  const int n = d_a * d_b;
  ThetaSpec th;
  th.gamma_D = gamma_D;
  MasterEquation eq(dims, CMatrix::Zero(n, n), th);
  IntegrationControls ctl;
  ctl.adaptive = {.atol = 1e-12, .rtol = 1e-10};
  ctl.sample_interval = t_end / static_cast<double>(samples);
  auto tr = integrate(rho0, eq, t_end, ctl,
                      {probes::purity(), probes::tau(dims), probes::bloch_singular_values(d_a, d_b)});

  RunResult r;
  r.files.push_back({"fig5_bloch_svd.csv", table_text(tr.table)});
  const auto& last = tr.table.rows.back();
  r.notes = {{"final_tau", csv::format(last[2])},
             {"final_sv_ratio", csv::format(last[4] / last[3])},
             {"max_trace_error", csv::format(tr.diagnostics.max_trace_error)}};
  return r;
}

}  // namespace scenarios

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"schmidt", "bell", "trunc", "mfa", "bloch-svd"};
  return names;
}

/// Resolves parameters and runs; throws ConfigError, std::invalid_argument or
/// NumericalError.
inline RunResult run(const std::string& scenario, const ParamMap& given) {
  Params p(scenario, given);
  RunResult r;
  if (scenario == "schmidt") r = scenarios::schmidt(p);
  else if (scenario == "bell") r = scenarios::bell(p);
  else if (scenario == "trunc") r = scenarios::trunc(p);
  else if (scenario == "mfa") r = scenarios::mfa(p);
  else if (scenario == "bloch-svd") r = scenarios::bloch_svd(p);
  else throw ConfigError("unknown scenario '" + scenario + "'");
  r.scenario = scenario;
  r.resolved = p.resolved();
  return r;
}

inline std::string meta_text(const RunResult& r) {
  std::ostringstream os;
  os << "# sdme run metadata; pass back with --config to repeat the run\n";
  os << "# version=" << SDME_VERSION << "\n";
  os << "# rng=" << kRngName << "\n";
  os << "scenario=" << r.scenario << "\n";
  for (const auto& [k, v] : r.resolved) os << k << "=" << v << "\n";
  for (const auto& [k, v] : r.notes) os << "# " << k << "=" << v << "\n";
  return os.str();
}

/// Write-then-rename so a reader never sees a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : r.files) write_atomic(dir / f.name, f.content);
  write_atomic(dir / "run.meta", meta_text(r));
}

/// Runs a scenario end to end and returns the process exit code. Nothing is
/// written unless the run itself completes.
inline int execute(const std::string& scenario, const ParamMap& given, const std::filesystem::path& out_dir,
                   std::ostream& log) {
  RunResult r;
  try {
    r = run(scenario, given);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    write_outputs(r, out_dir);
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << "\n";
    return kConfigError;
  }
  if (r.exit_code != kOk) log << r.message << "\n";
  return r.exit_code;
}

}  // namespace sdme::cli
