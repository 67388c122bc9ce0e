// harness.hpp
// Orchestration on top of the solver and diagnostics: single runs, sweeps,
// oracle comparisons, convergence studies and lifespan scans, plus the
// CSV/JSON artifacts they produce. Nothing here does file I/O except the
// ArtifactWriter.
#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "diagnostics.hpp"
#include "initial_data.hpp"
#include "linear_oracle.hpp"
#include "solver.hpp"

namespace eulerdamp {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kExitOk = 0, kExitNumerical = 2, kExitConfig = 3 };

inline constexpr const char* kDichotomyNote =
    "moderate-amplitude consistency demonstration of the damping dichotomy, not a verification of the "
    "small-data theorems";

// ---------------------------------------------------------------------------
// Single run

struct RunOutcome {
  RunConfig cfg;
  AdvanceResult advance;
  std::vector<DiagnosticsRecord> records;
  RLattice lattice;
  HypothesisVerdict hypothesis;
  double B0 = 0.0;
  std::map<std::string, std::optional<PowerFit>> fits;
  std::map<std::string, std::string> fit_errors;
  std::vector<GridField> fields;  // only with cfg.write_fields

  bool numerical_failure() const {
    return advance.status == AdvanceStatus::vacuum || advance.status == AdvanceStatus::nonfinite;
  }

  RunTrace trace() const { return {advance.status, advance.history, cfg.n_cells}; }

  /// decayed | blew_up | inconclusive | numerical_failure
  std::string verdict() const {
    if (numerical_failure()) return "numerical_failure";
    if (advance.status == AdvanceStatus::blowup) return "blew_up";
    const auto it = fits.find("sup_dxu");
    if (it != fits.end() && it->second && it->second->exponent < 0.0) return "decayed";
    return "inconclusive";
  }

  std::optional<double> t_blow() const { return blowup_instant(trace()); }

  /// max_t |M_ex(t) - M_ex(0)| / M(0), with M_ex the excess mass int (rho - 1).
  double mass_drift() const {
    if (records.empty()) return 0.0;
    double d = 0.0;
    for (const auto& r : records) d = std::max(d, std::abs(r.excess_mass - records.front().excess_mass));
    return d / records.front().mass;
  }

  /// max_t |M(t) - M(0) f(0,t)| / |M(0)| for the total momentum M and the
  /// damping integrating factor f; NaN when M(0) = 0.
  double momentum_budget_error() const {
    if (records.empty() || records.front().momentum == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double m0 = records.front().momentum;
    double e = 0.0;
    for (const auto& r : records) {
      const double expect = m0 * damping_decay_factor(0.0, r.t, cfg.damping);
      e = std::max(e, std::abs(r.momentum - expect));
    }
    return e / std::abs(m0);
  }
};

inline const std::vector<std::pair<std::string, double DiagnosticsRecord::*>>& fitted_series() {
  static const std::vector<std::pair<std::string, double DiagnosticsRecord::*>> s = {
      {"sup_v", &DiagnosticsRecord::sup_v},
      {"sup_u", &DiagnosticsRecord::sup_u},
      {"sup_dxv", &DiagnosticsRecord::sup_dxv},
      {"sup_dxu", &DiagnosticsRecord::sup_dxu},
  };
  return s;
}

/// Runs one simulation with diagnostics at every snapshot (including t = 0).
inline RunOutcome run_simulation(const RunConfig& cfg) {
  cfg.validate();
  RunOutcome out;
  out.cfg = cfg;
  out.hypothesis = check_hypothesis(cfg.initial);
  out.B0 = b0(cfg.initial);
  out.lattice = RLattice::for_run(cfg.initial, cfg.solver.t_end, cfg.lattice_stations);
  RunDiagnostics diag(cfg.gas, cfg.initial, out.lattice, cfg.m);
  const GridField init = sample_initial(cfg.initial, cfg.grid());
  diag.consume(init);
  if (cfg.write_fields) out.fields.push_back(init);
  auto on_snapshot = [&](const GridField& f) {
    diag.consume(f);
    if (cfg.write_fields) out.fields.push_back(f);
  };
  out.advance = advance(init, cfg.solver, cfg.damping, cfg.gas, cfg.solver.t_end, on_snapshot);
  out.records = diag.records();

  std::vector<double> times;
  for (const auto& r : out.records) times.push_back(r.t);
  for (const auto& [name, member] : fitted_series()) {
    std::vector<double> values;
    for (const auto& r : out.records) values.push_back(r.*member);
    try {
      out.fits[name] = pointwise_rates(times, values, cfg.fit_lo, cfg.fit_hi);
    } catch (const std::exception& e) {
      out.fits[name] = std::nullopt;
      out.fit_errors[name] = e.what();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string fmt(double v) { return cfgio::format_double(v); }

inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
inline Json json_number(const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); }

inline std::string timeseries_csv(const RunOutcome& run) {
  std::string s = "t,mass,momentum,sup_v,sup_u,sup_dxv,sup_dxu,E_m_bracket,E_m_running";
  for (double r : run.lattice.r) s += ",P@" + fmt(r);
  s += ",F,Fpp\n";
  for (const auto& rec : run.records) {
    for (double v : {rec.t, rec.mass, rec.momentum, rec.sup_v, rec.sup_u, rec.sup_dxv, rec.sup_dxu,
                     rec.energy_bracket, rec.energy_running})
      s += fmt(v) + ",";
    for (double p : rec.P) s += fmt(p) + ",";
    s += (rec.sideris_valid ? fmt(rec.F) : "") + "," + (rec.sideris_valid ? fmt(rec.Fpp) : "") + "\n";
  }
  return s;
}

inline std::string field_csv(const GridField& f) {
  std::string s = "x,rho,u\n";
  for (std::size_t i = 0; i < f.size(); ++i) s += fmt(f.x(i)) + "," + fmt(f.rho[i]) + "," + fmt(f.velocity(i)) + "\n";
  return s;
}

inline Json fit_json(const RunOutcome& run, const std::string& name) {
  const auto& fit = run.fits.at(name);
  Json j;
  j["window"] = {run.cfg.fit_lo, run.cfg.fit_hi};
  if (fit) {
    j["exponent"] = json_number(fit->exponent);
    j["intercept"] = json_number(fit->intercept);
    j["rms_residual"] = json_number(fit->residual);
    j["samples"] = fit->samples;
  } else {
    j["exponent"] = nullptr;
    j["error"] = run.fit_errors.at(name);
  }
  return j;
}

inline Json summary_json(const RunOutcome& run) {
  Json j;
  j["config_hash"] = run.cfg.hash();
  j["code_version"] = kCodeVersion;
  j["status"] = to_string(run.advance.status);
  j["verdict"] = run.verdict();
  j["message"] = run.advance.message;
  j["t_final"] = run.advance.field.t;
  j["t_blow"] = json_number(run.t_blow());
  j["t_est"] = run.advance.status == AdvanceStatus::blowup ? json_number(extrapolate_blowup(run.advance.history))
                                                           : Json(nullptr);
  j["B0"] = run.B0;
  Json hyp;
  hyp["holds"] = run.hypothesis.holds;
  hyp["failing_r"] = json_number(run.hypothesis.failing_r);
  hyp["reason"] = run.hypothesis.reason;
  j["hypothesis"] = hyp;
  Json fits;
  for (const auto& [name, member] : fitted_series()) fits[name] = fit_json(run, name);
  j["fits"] = fits;
  j["energy_running_max"] = run.records.empty() ? Json(nullptr) : Json(run.records.back().energy_running);
  j["mass_drift"] = run.mass_drift();
  j["momentum_budget_error"] = json_number(run.momentum_budget_error());
  j["snapshots"] = run.records.size();
  j["steps"] = run.advance.history.size();
  j["regrids"] = run.advance.regrids;
  j["n_cells"] = run.cfg.n_cells;
  j["dx_final"] = run.advance.field.dx();
  j["note"] = kDichotomyNote;
  return j;
}

// ---------------------------------------------------------------------------
// Artifacts

/// Writes files into OUT/<hash>/ only after their content is complete; each
/// file goes through a temporary name and an atomic rename.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) const {
    const auto target = dir_ / name;
    std::filesystem::create_directories(target.parent_path());
    const auto tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << content;
      if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  void mark_failed(const std::string& message) const noexcept {
    try {
      std::filesystem::create_directories(dir_);
      std::ofstream(dir_ / ".failed", std::ios::trunc) << message << "\n";
    } catch (...) {
    }
  }

  void clear_failed() const {
    std::error_code ec;
    std::filesystem::remove(dir_ / ".failed", ec);
  }

 private:
  std::filesystem::path dir_;
};

/// Persists a run; returns the CLI exit code.
inline int write_run_artifacts(const RunOutcome& run, const std::filesystem::path& out_root) {
  ArtifactWriter w(out_root / run.cfg.hash());
  w.clear_failed();
  w.write("config.txt", run.cfg.serialize());
  w.write("summary.json", summary_json(run).dump(2) + "\n");
  if (run.numerical_failure()) {
    w.mark_failed("numerical failure: " + run.advance.message);
    return kExitNumerical;
  }
  w.write("timeseries.csv", timeseries_csv(run));
  for (std::size_t k = 0; k < run.fields.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "fields/field_%05zu.csv", k);
    w.write(name, field_csv(run.fields[k]));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Worker pool

/// Runs task(i) for i in [0, n) on at most `jobs` threads.
template <class Task>
void parallel_for(std::size_t n, unsigned jobs, Task&& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  if (jobs <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
}

// ---------------------------------------------------------------------------
// Sweeps

struct PointResult {
  RunConfig cfg;
  std::optional<RunOutcome> coarse, fine;
  BlowupEstimate blowup;
  std::string error;  // non-empty when a run threw

  bool produced_result() const {
    return error.empty() && coarse && !coarse->numerical_failure() && (!fine || !fine->numerical_failure());
  }

  std::string verdict() const {
    if (!error.empty()) return "error";
    if (!produced_result()) return "numerical_failure";
    if (!fine) return coarse->verdict();
    switch (blowup.verdict) {
      case BlowupVerdict::converged: return "blow_up";
      case BlowupVerdict::unconverged: return "blow_up_unconverged";
      case BlowupVerdict::no_blowup: return "no_blow_up_by_t_end";
    }
    return "?";
  }
};

inline RunConfig refined(const RunConfig& c) {
  RunConfig f = c;
  f.n_cells = 2 * c.n_cells;
  return f;
}

/// One sweep point: a run at n_cells and, when requested, at 2 n_cells.
inline PointResult run_point(const RunConfig& cfg, bool two_resolution) {
  PointResult p;
  p.cfg = cfg;
  try {
    p.coarse = run_simulation(cfg);
    if (two_resolution) {
      p.fine = run_simulation(refined(cfg));
      p.blowup = blowup_time(p.coarse->trace(), p.fine->trace());
    }
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

inline std::vector<PointResult> run_sweep(const SweepSpec& spec, unsigned jobs) {
  const auto points = spec.points();
  std::vector<PointResult> results(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) { results[i] = run_point(points[i], spec.two_resolution); });
  return results;
}

inline std::string sweep_csv(const std::vector<PointResult>& results) {
  std::string s =
      "mu,lambda,gamma,epsilon,n_cells,verdict,t_blow,t_blow_fine,t_est,exp_sup_v,exp_sup_dxu,config_hash,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  auto exponent = [](const std::optional<RunOutcome>& run, const char* name) {
    if (!run) return std::string();
    const auto& f = run->fits.at(name);
    return f ? fmt(f->exponent) : std::string();
  };
  for (const auto& p : results) {
    std::optional<double> tb, tbf, test;
    if (p.coarse) tb = p.coarse->t_blow();
    if (p.fine) {
      tbf = p.fine->t_blow();
      if (std::isfinite(p.blowup.t_est)) test = p.blowup.t_est;
    }
    const auto& run = p.fine ? p.fine : p.coarse;
    std::string err = p.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    s += fmt(p.cfg.damping.mu) + "," + fmt(p.cfg.damping.lambda) + "," + fmt(p.cfg.gas.gamma) + "," +
         fmt(p.cfg.initial.epsilon) + "," + std::to_string(p.cfg.n_cells) + "," + p.verdict() + "," + opt(tb) +
         "," + opt(tbf) + "," + opt(test) + "," + exponent(run, "sup_v") + "," + exponent(run, "sup_dxu") + "," +
         p.cfg.hash() + "," + err + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Oracle comparison

inline constexpr double kOracleMaxEpsilon = 1e-3;

struct OracleComparison {
  std::vector<double> t;
  std::vector<double> rel_error;  // |v_solver - v_oracle| / |v_oracle| in L2
  AdvanceStatus status = AdvanceStatus::completed;

  double max_error() const {
    double m = 0.0;
    for (double e : rel_error) m = std::max(m, e);
    return m;
  }
};

/// Solver vs Fourier-mode oracle on the same grid at every snapshot. The
/// relative error is taken against the oracle's own norm at that time, and
/// is zero when both fields vanish.
inline OracleComparison oracle_compare(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.initial.epsilon > kOracleMaxEpsilon)
    throw ConfigError("oracle-compare needs epsilon <= 1e-3 (linear regime), got " + fmt(cfg.initial.epsilon));
  if (cfg.solver.regrid) throw ConfigError("oracle-compare needs solver.regrid = false");
  const UniformGrid grid = cfg.grid();
  const GridField init = sample_initial(cfg.initial, grid);
  LinearOracle oracle(cfg.initial, cfg.damping, cfg.gas, grid, cfg.oracle_modes, cfg.oracle_tol);
  OracleComparison out;
  auto compare = [&](const GridField& f) {
    const std::vector<double> vs = sound_variable(f, cfg.gas);
    const std::vector<double> vo = oracle.evaluate(f.t);
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      diff += (vs[i] - vo[i]) * (vs[i] - vo[i]);
      ref += vo[i] * vo[i];
    }
    out.t.push_back(f.t);
    out.rel_error.push_back(diff == 0.0 ? 0.0 : std::sqrt(diff / ref));
  };
  compare(init);
  SolverConfig sc = cfg.solver;
  sc.steepness_cap = 0.0;
  out.status = advance(init, sc, cfg.damping, cfg.gas, sc.t_end, compare).status;
  return out;
}

inline std::string oracle_csv(const OracleComparison& c) {
  std::string s = "t,rel_l2_error\n";
  for (std::size_t i = 0; i < c.t.size(); ++i) s += fmt(c.t[i]) + "," + fmt(c.rel_error[i]) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Manufactured-solution convergence

struct ConvergenceReport {
  std::vector<std::size_t> resolutions;
  std::vector<double> l1_error;  // density plus momentum
  std::vector<double> orders;    // between consecutive resolutions
  bool smooth = true;            // every run completed without tripping a cap
  std::string note;
};

/// Three significant digits, as printed in reports.
inline std::string format_order(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::vector<std::size_t> convergence_resolutions(const RunConfig& cfg) {
  std::vector<std::size_t> res = cfg.convergence_resolutions;
  if (res.empty()) res = {cfg.n_cells, 2 * cfg.n_cells, 4 * cfg.n_cells};
  if (res.size() != 3) throw ConfigError("convergence needs exactly 3 resolutions");
  for (std::size_t i = 0; i + 1 < res.size(); ++i)
    if (!(res[i + 1] > res[i])) throw ConfigError("convergence resolutions must be distinct and increasing");
  return res;
}

inline ConvergenceReport convergence_study(const RunConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  rep.resolutions = convergence_resolutions(cfg);
  const AnalyticTarget target = make_target(cfg.manufactured_target, cfg.manufactured_amplitude, cfg.manufactured_width);
  const SourceFn source = manufactured_forcing(target, cfg.gas, cfg.damping);
  const double t_end = cfg.solver.t_end;
  for (std::size_t n : rep.resolutions) {
    const UniformGrid grid = UniformGrid::symmetric(cfg.domain_half_width(), n);
    GridField f(grid);
    for (std::size_t i = 0; i < n; ++i) {
      const AnalyticState s = target(grid.center(i), 0.0);
      f.rho[i] = s.rho;
      f.momentum[i] = s.rho * s.u;
    }
    SolverConfig sc = cfg.solver;
    sc.snapshot_dt = 0.0;
    sc.regrid = false;
    const AdvanceResult r = advance(f, sc, cfg.damping, cfg.gas, t_end, {}, source);
    if (r.status != AdvanceStatus::completed) {
      rep.smooth = false;
      rep.note = "run at n_cells=" + std::to_string(n) + " ended with status " + to_string(r.status);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const AnalyticState s = target(grid.center(i), r.field.t);
      e += std::abs(r.field.rho[i] - s.rho) + std::abs(r.field.momentum[i] - s.rho * s.u);
    }
    rep.l1_error.push_back(e * grid.dx());
  }
  for (std::size_t i = 0; i + 1 < rep.l1_error.size(); ++i) {
    const double ratio = static_cast<double>(rep.resolutions[i + 1]) / static_cast<double>(rep.resolutions[i]);
    rep.orders.push_back(std::log(rep.l1_error[i] / rep.l1_error[i + 1]) / std::log(ratio));
  }
  if (rep.smooth && rep.orders.back() < 1.0) {
    rep.smooth = false;
    rep.note = "observed order below 1; target may not be smooth on this window";
  }
  return rep;
}

inline Json convergence_json(const RunConfig& cfg, const ConvergenceReport& rep) {
  Json j;
  j["config_hash"] = cfg.hash();
  j["code_version"] = kCodeVersion;
  j["target"] = cfg.manufactured_target;
  j["resolutions"] = rep.resolutions;
  j["l1_error"] = rep.l1_error;
  Json orders = Json::array();
  for (double o : rep.orders) orders.push_back(format_order(o));
  j["observed_order"] = orders;
  j["smooth"] = rep.smooth;
  j["note"] = rep.note;
  return j;
}

// ---------------------------------------------------------------------------
// Lifespan scan

struct LifespanRow {
  double epsilon = 0.0;
  double mu = 0.0;
  BlowupEstimate estimate;
  std::string error;
};

struct LifespanTable {
  std::vector<LifespanRow> rows;
  bool all_converged = true;
  bool monotone = true;  // T_est non-increasing in epsilon (non-decreasing in mu)
};

/// Two-resolution blow-up estimates along one axis: epsilon (T_est must not
/// increase) or mu (T_est must not decrease).
inline LifespanTable lifespan_scan(const RunConfig& base, const std::vector<double>& eps,
                                   const std::vector<double>& mus, unsigned jobs) {
  if (!eps.empty() && !mus.empty()) throw ConfigError("lifespan-scan takes an epsilon list or a mu list, not both");
  std::vector<RunConfig> cfgs;
  for (double e : eps) {
    RunConfig c = base;
    c.initial.epsilon = e;
    c.validate();
    cfgs.push_back(c);
  }
  for (double m : mus) {
    RunConfig c = base;
    c.damping.mu = m;
    c.validate();
    cfgs.push_back(c);
  }
  LifespanTable table;
  table.rows.resize(cfgs.size());
  parallel_for(cfgs.size(), jobs, [&](std::size_t i) {
    const PointResult p = run_point(cfgs[i], true);
    table.rows[i] = {cfgs[i].initial.epsilon, cfgs[i].damping.mu, p.blowup, p.error};
  });
  std::vector<double> t_est;
  for (const auto& r : table.rows) {
    if (!r.error.empty() || r.estimate.verdict != BlowupVerdict::converged) table.all_converged = false;
    t_est.push_back(r.estimate.t_est);
  }
  for (double t : t_est)
    if (!std::isfinite(t)) table.monotone = false;
  if (table.monotone)
    table.monotone = mus.empty() ? is_monotone_nonincreasing(t_est) : is_monotone_nondecreasing(t_est);
  return table;
}

inline std::string lifespan_csv(const LifespanTable& t) {
  std::string s = "epsilon,mu,t_blow,t_blow_fine,T_est,verdict,error\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : t.rows) {
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    s += fmt(r.epsilon) + "," + fmt(r.mu) + "," + opt(r.estimate.t_blow_coarse) + "," +
         opt(r.estimate.t_blow_fine) + "," + (std::isfinite(r.estimate.t_est) ? fmt(r.estimate.t_est) : "") + "," +
         to_string(r.estimate.verdict) + "," + err + "\n";
  }
  return s;
}

}  // namespace eulerdamp
