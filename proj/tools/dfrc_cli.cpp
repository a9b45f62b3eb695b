// dfrc: secrecy-rate beamforming designs, parameter sweeps and phase-error
// outage experiments for a dual-functional radar-communication transmitter.
//
// Usage:
//   dfrc design  --config run.cfg --method closed-form --out design.json
//   dfrc sweep   --config sweep.cfg --out sweep.csv
//   dfrc outage  --config outage.cfg --out outage_dir
//   dfrc --dump-defaults > run.cfg
//
// Exit codes: 0 ok, 2 malformed input, 3 infeasible, 4 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfrc/dfrc.hpp"

namespace {

using dfrc::internal::format_double;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitMalformed = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method;
  std::optional<unsigned> threads;
};

dfrc::RunConfig load_config(const Flags& f) {
  dfrc::RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw dfrc::InvalidInput("config: cannot open " + f.config);
    cfg = dfrc::parse_config(in);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output = f.out;
  if (!f.method.empty()) cfg.method = f.method;
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  dfrc::parallel_threads() = cfg.threads;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dfrc::InvalidInput("output: cannot write " + path);
  out << text;
}

ordered_json interleaved(const Eigen::VectorXcd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v(i).real());
    a.push_back(v(i).imag());
  }
  return a;
}

ordered_json phi_summary(const dfrc::Design& d) {
  ordered_json j;
  if (!d.phi) {
    j["present"] = false;
    return j;
  }
  const Eigen::MatrixXcd Phi = d.p2 * *d.phi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (Phi + Phi.adjoint()),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues().reverse();
  const double top = ev.size() ? std::max(ev(0), 0.0) : 0.0;
  int rank = 0;
  ordered_json vals = ordered_json::array();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    vals.push_back(ev(i));
    if (ev(i) > 1e-9 * top && top > 0) ++rank;
  }
  j["present"] = true;
  j["eigenvalues"] = vals;
  j["rank"] = rank;
  j["trace"] = Phi.trace().real();
  return j;
}

ordered_json design_json(const std::string& method, const dfrc::Design& d) {
  ordered_json j;
  j["method"] = method;
  j["w"] = interleaved(d.w);
  j["w_norm"] = d.w.norm();
  j["p1"] = d.p1;
  j["p2"] = d.p2;
  j["phi"] = phi_summary(d);
  j["secrecy_rate_bps"] = d.secrecy_rate;
  j["estimation_rate_bps"] = d.estimation_rate;
  return j;
}

/// Builds the requested design. `threshold` receives the rate the design
/// targets (robust rate for drb, nominal rate otherwise).
dfrc::Design build_design(dfrc::Method m, const dfrc::RunConfig& rc, const dfrc::ScenarioConfig& cfg,
                          const dfrc::ChannelSet& ch, ordered_json& diag, double& threshold) {
  const dfrc::MethodOptions opt = rc.to_method_options();
  dfrc::Design d;
  switch (m) {
    case dfrc::Method::ClosedForm: {
      dfrc::ClosedFormSolution sol;
      d = dfrc::closed_form_design(cfg, ch, &sol);
      diag["theta"] = sol.theta;
      diag["degenerate"] = sol.degenerate;
      break;
    }
    case dfrc::Method::Sdr: {
      dfrc::SdrResult r;
      d = dfrc::sdr_design(cfg, ch, &r, opt.sdr);
      diag["iterations"] = r.iterations;
      diag["rank_ratio"] = r.rank_ratio;
      diag["rank_one"] = r.rank_one;
      diag["relaxation_objective"] = r.objective;
      break;
    }
    case dfrc::Method::Mrt: d = dfrc::mrt_beamformer(cfg, ch); break;
    case dfrc::Method::AoAn:
    case dfrc::Method::NonRobust: {
      const dfrc::AoResult r = dfrc::ao_solve(cfg, ch, opt.ao);
      d = r.design;
      diag["iterations"] = r.iterations;
      diag["converged"] = r.converged;
      diag["objective_trace"] = r.objective;
      break;
    }
    case dfrc::Method::Drb: {
      const dfrc::DrbResult r = dfrc::drb_solve(cfg, ch, opt.moments, opt.drb);
      d = r.design;
      diag["eta_star"] = r.eta_star;
      diag["robust_secrecy_rate_bps"] = r.robust_secrecy_rate;
      diag["relaxation_value"] = r.relaxation_value;
      diag["rank_ratio"] = r.rank_ratio;
      diag["rank_one"] = r.rank_one;
      diag["sdp_evaluations"] = r.evaluations.size();
      threshold = r.robust_secrecy_rate;
      return d;
    }
  }
  threshold = d.secrecy_rate;
  return d;
}

int cmd_design(const dfrc::RunConfig& rc) {
  const dfrc::Method m = dfrc::parse_method(rc.method);
  const dfrc::ScenarioConfig cfg = rc.to_scenario();
  const dfrc::ChannelSet ch = dfrc::build_channels(cfg);
  ordered_json diag = ordered_json::object();
  double threshold = 0;
  const dfrc::Design d = build_design(m, rc, cfg, ch, diag, threshold);
  ordered_json j = design_json(dfrc::method_name(m), d);
  j["diagnostics"] = diag;
  write_text(rc.output, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const dfrc::RunConfig& rc, bool method_flag) {
  if (rc.sweep.values.empty()) throw dfrc::InvalidInput("sweep.values: must be nonempty");
  dfrc::SweepSpec spec;
  spec.variable = dfrc::parse_variable(rc.sweep.variable);
  spec.grid = rc.sweep.values;
  spec.fixed = rc.to_scenario();
  if (method_flag) {
    spec.methods = {dfrc::parse_method(rc.method)};
  } else {
    for (const auto& name : rc.sweep.methods) spec.methods.push_back(dfrc::parse_method(name));
  }
  if (spec.methods.empty()) throw dfrc::InvalidInput("sweep.methods: must be nonempty");
  spec.options = rc.to_method_options();
  const auto rows = dfrc::run_sweep(spec);
  std::ostringstream csv;
  csv << "grid_var,grid_value,method,secrecy_rate_bps,estimation_rate_bps,p2_fraction,iterations,status\n";
  for (const auto& r : rows) {
    csv << dfrc::variable_name(spec.variable) << ',' << format_double(r.grid_value) << ','
        << dfrc::method_name(r.method) << ',';
    const bool has_metrics = r.status == "ok" || r.status == "degenerate";
    if (has_metrics) {
      csv << format_double(r.secrecy_rate) << ',' << format_double(r.estimation_rate) << ','
          << format_double(r.p2_fraction) << ',' << r.iterations;
    } else {
      csv << ",,,";
    }
    csv << ',' << r.status << '\n';
  }
  write_text(rc.output, csv.str());
  return kExitOk;
}

void write_histogram(const std::filesystem::path& path, const std::vector<long>& h, double vmax) {
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,count\n";
  const double n = static_cast<double>(h.size());
  for (size_t b = 0; b < h.size(); ++b) {
    csv << format_double(vmax * static_cast<double>(b) / n) << ','
        << format_double(vmax * static_cast<double>(b + 1) / n) << ',' << h[b] << '\n';
  }
  write_text(path.string(), csv.str());
}

int cmd_outage(const dfrc::RunConfig& rc, bool method_flag) {
  if (rc.output.empty() || rc.output == "-") {
    throw dfrc::InvalidInput("outage: an output directory is required (--out or run.output)");
  }
  const dfrc::Method m = dfrc::parse_method(method_flag ? rc.method : rc.outage.method);
  const dfrc::ScenarioConfig cfg = rc.to_scenario();
  const dfrc::ChannelSet ch = dfrc::build_channels(cfg);
  const dfrc::MomentModel model = rc.to_moments();
  ordered_json diag = ordered_json::object();
  double target = 0;
  const dfrc::Design d = build_design(m, rc, cfg, ch, diag, target);
  const double threshold = rc.outage.threshold_rate.value_or(target);

  const std::filesystem::path dir(rc.output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw dfrc::InvalidInput("output: cannot create " + rc.output);

  std::ostringstream summary, summary_exact;
  summary << "family,empirical_outage,threshold_rate_bps\n";
  summary_exact << "family,empirical_outage,threshold_rate_bps\n";
  for (const auto& name : rc.outage.families) {
    const dfrc::Family fam = dfrc::parse_family(name);
    const std::uint64_t seed = dfrc::splitmix64(rc.seed ^ (0x100u + static_cast<unsigned>(fam)));
    const dfrc::OutageReport rep =
        dfrc::monte_carlo_outage(d, cfg, ch, model, fam, rc.outage.n_samples, threshold, seed);
    write_histogram(dir / (name + ".csv"), rep.histogram, rep.histogram_max);
    write_histogram(dir / (name + "_exact.csv"), rep.exact_histogram, rep.exact_histogram_max);
    summary << name << ',' << format_double(rep.empirical_outage) << ',' << format_double(threshold) << '\n';
    summary_exact << name << ',' << format_double(rep.exact_outage) << ',' << format_double(threshold)
                  << '\n';
  }
  write_text((dir / "summary.csv").string(), summary.str());
  write_text((dir / "summary_exact.csv").string(), summary_exact.str());
  ordered_json j = design_json(dfrc::method_name(m), d);
  j["diagnostics"] = diag;
  write_text((dir / "design.json").string(), j.dump(2) + "\n");
  std::cout << summary.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Secrecy-rate beamforming for dual-functional radar-communication.\n"
      "Config keys use degrees for angles, dB for gains, watts and bits/s.\n"
      "Exit codes: 0 ok, 2 malformed input, 3 infeasible, 4 solver failure."};
  app.set_version_flag("--version", "dfrc 1.0");
  Flags flags;
  bool dump_defaults = false;
  app.add_flag("--dump-defaults", dump_defaults, "Print the default configuration and exit");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Configuration file (key = value lines)");
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--out", flags.out, "Output file (design, sweep) or directory (outage)");
    sub->add_option("--method", flags.method,
                    "closed-form | sdr | mrt | ao-an | drb | non-robust");
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  };
  CLI::App* design = app.add_subcommand("design", "Compute one design and write it as JSON");
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one scenario variable and write CSV");
  CLI::App* outage = app.add_subcommand("outage", "Monte-Carlo secrecy outage under phase errors");
  for (CLI::App* sub : {design, sweep, outage}) add_common(sub);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitMalformed;
  }

  try {
    if (dump_defaults) {
      write_text(flags.out, dfrc::dump_config(dfrc::RunConfig{}));
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitMalformed;
    }
    const dfrc::RunConfig rc = load_config(flags);
    const bool method_flag = !flags.method.empty();
    if (design->parsed()) return cmd_design(rc);
    if (sweep->parsed()) return cmd_sweep(rc, method_flag);
    return cmd_outage(rc, method_flag);
  } catch (const dfrc::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const dfrc::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const dfrc::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
