// eulerdamp command-line driver.
//
//   eulerdamp run             --config run.cfg
//   eulerdamp sweep           --config sweep.cfg --jobs 8
//   eulerdamp oracle-compare  --config linear.cfg
//   eulerdamp convergence     --config mms.cfg
//   eulerdamp lifespan-scan   --config scan.cfg
//
// Outputs land in OUT/<config-hash>/, with OUT taken from --out, then
// $EULERDAMP_OUT, then ./out.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eulerdamp/config.hpp"
#include "eulerdamp/harness.hpp"

namespace fs = std::filesystem;
using namespace eulerdamp;

namespace {

struct Options {
  std::string config;
  std::string out;
  unsigned jobs = 0;
  std::optional<double> t_end;
  std::optional<std::size_t> cells;
};

fs::path out_root(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("EULERDAMP_OUT"); env && *env) return env;
  return "out";
}

std::map<std::string, std::string> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return cfgio::parse_pairs(in);
}

void apply_overrides(std::map<std::string, std::string>& kv, const Options& o) {
  if (o.t_end) kv["solver.t_end"] = cfgio::format_double(*o.t_end);
  if (o.cells) kv["solver.n_cells"] = std::to_string(*o.cells);
}

RunConfig load_run(const Options& o) {
  auto kv = read_pairs(o.config);
  apply_overrides(kv, o);
  return RunConfig::from_pairs(kv);
}

int cmd_run(const Options& o) {
  const RunConfig cfg = load_run(o);
  const fs::path root = out_root(o);
  std::cerr << "run " << cfg.hash() << "\n";
  std::optional<RunOutcome> outcome;
  try {
    outcome = run_simulation(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    ArtifactWriter(root / cfg.hash()).mark_failed(e.what());
    throw;
  }
  const RunOutcome& run = *outcome;
  const int code = write_run_artifacts(run, root);
  std::cout << (root / cfg.hash()).string() << " " << to_string(run.advance.status) << " " << run.verdict() << "\n";
  return code;
}

int cmd_sweep(const Options& o) {
  auto kv = read_pairs(o.config);
  apply_overrides(kv, o);
  const SweepSpec spec = SweepSpec::from_pairs(kv);
  const fs::path root = out_root(o);
  std::cerr << "sweep " << spec.hash() << ": " << spec.size() << " point(s)"
            << (spec.two_resolution ? " x 2 resolutions" : "") << "\n";
  const auto results = run_sweep(spec, o.jobs);
  int produced = 0;
  for (const auto& p : results) {
    if (p.coarse) write_run_artifacts(*p.coarse, root);
    if (p.fine) write_run_artifacts(*p.fine, root);
    if (!p.error.empty()) ArtifactWriter(root / p.cfg.hash()).mark_failed(p.error);
    if (p.produced_result()) ++produced;
  }
  ArtifactWriter w(root / spec.hash());
  w.write("sweep_config.txt", spec.serialize());
  w.write("sweep.csv", sweep_csv(results));
  std::cout << (root / spec.hash() / "sweep.csv").string() << " " << produced << "/" << results.size()
            << " point(s) produced a result\n";
  return produced > 0 ? kExitOk : kExitNumerical;
}

int cmd_oracle(const Options& o) {
  const RunConfig cfg = load_run(o);
  const OracleComparison c = oracle_compare(cfg);
  ArtifactWriter w(out_root(o) / cfg.hash());
  w.clear_failed();
  Json j;
  j["config_hash"] = cfg.hash();
  j["code_version"] = kCodeVersion;
  j["status"] = to_string(c.status);
  j["max_rel_l2_error"] = c.max_error();
  j["t_final"] = c.t.empty() ? 0.0 : c.t.back();
  if (c.status != AdvanceStatus::completed) {
    w.write("oracle_summary.json", j.dump(2) + "\n");
    w.mark_failed(std::string("solver ended with status ") + to_string(c.status));
    return kExitNumerical;
  }
  w.write("oracle_compare.csv", oracle_csv(c));
  w.write("oracle_summary.json", j.dump(2) + "\n");
  std::cout << "max relative L2 error " << c.max_error() << " over t <= " << j["t_final"].get<double>() << "\n";
  return kExitOk;
}

int cmd_convergence(const Options& o) {
  const RunConfig cfg = load_run(o);
  const ConvergenceReport rep = convergence_study(cfg);
  ArtifactWriter w(out_root(o) / cfg.hash());
  w.clear_failed();
  w.write("convergence.json", convergence_json(cfg, rep).dump(2) + "\n");
  for (std::size_t i = 0; i < rep.resolutions.size(); ++i) {
    std::cout << "n_cells=" << rep.resolutions[i] << " L1=" << rep.l1_error[i];
    if (i > 0) std::cout << " order=" << format_order(rep.orders[i - 1]);
    std::cout << "\n";
  }
  if (!rep.smooth) std::cout << "flagged: " << rep.note << "\n";
  return kExitOk;
}

int cmd_lifespan(const Options& o) {
  auto kv = read_pairs(o.config);
  apply_overrides(kv, o);
  std::vector<double> eps, mus;
  for (auto it = kv.begin(); it != kv.end();) {
    if (it->first == "scan.epsilon" || it->first == "scan.mu") {
      auto& dst = it->first == "scan.epsilon" ? eps : mus;
      for (const auto& item : cfgio::split_list(it->second)) dst.push_back(cfgio::parse_double(it->first, item));
      it = kv.erase(it);
    } else if (it->first.starts_with("scan.")) {
      throw ConfigError("unknown key '" + it->first + "'");
    } else {
      ++it;
    }
  }
  const RunConfig base = RunConfig::from_pairs(kv);
  const LifespanTable table = lifespan_scan(base, eps, mus, o.jobs);
  std::string scan_text = base.serialize() + "scan.epsilon = ";
  for (std::size_t i = 0; i < eps.size(); ++i) scan_text += (i ? "," : "") + cfgio::format_double(eps[i]);
  scan_text += "\nscan.mu = ";
  for (std::size_t i = 0; i < mus.size(); ++i) scan_text += (i ? "," : "") + cfgio::format_double(mus[i]);
  scan_text += "\n";
  ArtifactWriter w(out_root(o) / cfgio::hex64(cfgio::fnv1a(scan_text)));
  w.write("scan_config.txt", scan_text);
  w.write("lifespan.csv", lifespan_csv(table));
  std::cout << lifespan_csv(table);
  if (!table.all_converged) std::cout << "flagged: at least one point did not converge\n";
  std::cout << (table.monotone ? "T_est monotone\n" : "T_est NOT monotone\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isentropic Euler with time-decayed damping: runs, sweeps and checks"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "config file")->required();
    sub->add_option("--out", o.out, "output root (default $EULERDAMP_OUT or ./out)");
    sub->add_option("--jobs", o.jobs, "concurrent runs (default: hardware threads)");
    sub->add_option("--t-end", o.t_end, "override solver.t_end");
    sub->add_option("--cells", o.cells, "override solver.n_cells");
  };
  CLI::App* run = app.add_subcommand("run", "single simulation");
  CLI::App* sweep = app.add_subcommand("sweep", "cross-product parameter sweep");
  CLI::App* oracle = app.add_subcommand("oracle-compare", "solver vs linear Fourier-mode oracle");
  CLI::App* conv = app.add_subcommand("convergence", "manufactured-solution order study");
  CLI::App* scan = app.add_subcommand("lifespan-scan", "two-resolution lifespan estimates");
  for (CLI::App* s : {run, sweep, oracle, conv, scan}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*oracle) return cmd_oracle(o);
    if (*conv) return cmd_convergence(o);
    if (*scan) return cmd_lifespan(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
