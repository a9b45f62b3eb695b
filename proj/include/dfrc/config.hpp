#pragma once

// Flat key=value run configuration with dotted section prefixes. Lines are
// `key = value`; `#` starts a comment. Angles are in degrees, gains in dB,
// powers in watts and rates in bits/s. Lists are comma separated.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dfrc/harness.hpp"

namespace dfrc {

struct RunConfig {
  struct Scenario {
    int N = 10;
    double d = 0.025;
    double lambda = 0.1;
    double theta1_deg = 30.0;
    double theta2_deg = 60.0;
    double d1 = 1000.0;
    double d2 = 500.0;
    double Gt_dB = 10.0;
    double G1_dB = 0.0;
    double G2_dB = 0.0;
    double S = 1.0;
    double B = 10e6;
    double T = 10e-6;
    double delta = 0.5;
    double sigma2_proc = 4.44e-15;
    double gamma2 = (2.0 * kPi) * (2.0 * kPi) / 12.0;
    double P = 1000.0;
    double zeta = 1000.0;
    double sigma2_rel_dB = 0.0;
    bool operator==(const Scenario&) const = default;
  };
  struct Moments {
    double mu_deg = 0.0;
    double sigma_deg = 5.0;
    double eps_sec = 0.01;
    double eps_est = 0.01;
    bool operator==(const Moments&) const = default;
  };
  struct Sweep {
    std::string variable = "P";
    std::vector<double> values;
    std::vector<std::string> methods{"closed_form", "ao_an"};
    bool operator==(const Sweep&) const = default;
  };
  struct Outage {
    long n_samples = 100000;
    std::vector<std::string> families{"gaussian", "uniform", "laplacian"};
    std::string method = "drb";
    std::optional<double> threshold_rate;  // empty: the design's own target rate
    bool operator==(const Outage&) const = default;
  };
  struct Ao {
    double eps = 1e-6;
    int max_iter = 100;
    double p2_init_fraction = 0.1;
    int init_grid = 64;
    bool operator==(const Ao&) const = default;
  };
  struct Sdr {
    double tol = 1e-9;
    double rank_one_threshold = 1e-6;
    int n_rand = 200;
    bool operator==(const Sdr&) const = default;
  };
  struct Drb {
    double bisect_tol = 1e-3;
    int grid_points = 32;
    int n_rand = 200;
    double solver_tol = 1e-8;
    double rank_one_threshold = 1e-6;
    double certificate_tol = 1e-6;
    bool operator==(const Drb&) const = default;
  };

  Scenario scenario;
  Moments moments;
  Sweep sweep;
  Outage outage;
  Ao ao;
  Sdr sdr;
  Drb drb;
  std::uint64_t seed = 1;
  std::string method = "closed_form";
  std::string output;
  unsigned threads = 0;

  bool operator==(const RunConfig&) const = default;

  ScenarioConfig to_scenario() const {
    ScenarioConfig c;
    c.N = scenario.N;
    c.d = scenario.d;
    c.lambda = scenario.lambda;
    c.theta1 = deg_to_rad(scenario.theta1_deg);
    c.theta2 = deg_to_rad(scenario.theta2_deg);
    c.d1 = scenario.d1;
    c.d2 = scenario.d2;
    c.Gt = std::pow(10.0, scenario.Gt_dB / 10.0);
    c.G1 = std::pow(10.0, scenario.G1_dB / 10.0);
    c.G2 = std::pow(10.0, scenario.G2_dB / 10.0);
    c.S = scenario.S;
    c.B = scenario.B;
    c.T = scenario.T;
    c.delta = scenario.delta;
    c.sigma2_proc = scenario.sigma2_proc;
    c.gamma2 = scenario.gamma2;
    c.P = scenario.P;
    c.zeta = scenario.zeta;
    c.sigma2_rel_dB = scenario.sigma2_rel_dB;
    return c;
  }

  MomentModel to_moments() const {
    MomentModel m = MomentModel::isotropic(scenario.N, deg_to_rad(moments.sigma_deg),
                                           moments.eps_sec, moments.eps_est);
    m.mu_bar.setConstant(deg_to_rad(moments.mu_deg));
    return m;
  }

  MethodOptions to_method_options() const {
    MethodOptions o;
    o.ao.eps = ao.eps;
    o.ao.max_iter = ao.max_iter;
    o.ao.p2_init_fraction = ao.p2_init_fraction;
    o.ao.init_grid = ao.init_grid;
    o.sdr.tol = sdr.tol;
    o.sdr.rank_one_threshold = sdr.rank_one_threshold;
    o.sdr.n_rand = sdr.n_rand;
    o.sdr.seed = seed;
    o.drb.bisect_tol = drb.bisect_tol;
    o.drb.grid_points = drb.grid_points;
    o.drb.n_rand = drb.n_rand;
    o.drb.seed = seed;
    o.drb.solver_tol = drb.solver_tol;
    o.drb.rank_one_threshold = drb.rank_one_threshold;
    o.drb.certificate_tol = drb.certificate_tol;
    o.moments = to_moments();
    return o;
  }

  /// Throws InvalidInput naming the first offending key.
  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
      throw InvalidInput(key + ": " + why);
    };
    if (!(std::abs(scenario.theta1_deg) <= 90)) fail("scenario.theta1_deg", "must lie in [-90, 90]");
    if (!(std::abs(scenario.theta2_deg) <= 90)) fail("scenario.theta2_deg", "must lie in [-90, 90]");
    if (scenario.theta1_deg == scenario.theta2_deg) fail("scenario.theta2_deg", "must differ from theta1_deg");
    for (double g : {scenario.Gt_dB, scenario.G1_dB, scenario.G2_dB}) {
      if (!std::isfinite(g)) fail("scenario.G*_dB", "must be finite");
    }
    to_scenario().validate();
    if (!(moments.sigma_deg >= 0) || !std::isfinite(moments.sigma_deg)) fail("moments.sigma_deg", "must be >= 0");
    if (!std::isfinite(moments.mu_deg)) fail("moments.mu_deg", "must be finite");
    if (!(moments.eps_sec > 0 && moments.eps_sec < 0.5)) fail("moments.eps_sec", "must lie in (0, 0.5)");
    if (!(moments.eps_est > 0 && moments.eps_est < 0.5)) fail("moments.eps_est", "must lie in (0, 0.5)");
    parse_variable(sweep.variable);
    for (double v : sweep.values) {
      if (!std::isfinite(v)) fail("sweep.values", "non-finite entry");
    }
    for (const auto& m : sweep.methods) parse_method(m);
    if (outage.n_samples < 1) fail("outage.n_samples", "must be >= 1");
    if (outage.families.empty()) fail("outage.families", "must be nonempty");
    for (const auto& f : outage.families) parse_family(f);
    parse_method(outage.method);
    if (outage.threshold_rate && !(*outage.threshold_rate >= 0)) fail("outage.threshold_rate", "must be >= 0");
    if (!(ao.eps > 0)) fail("ao.eps", "must be > 0");
    if (ao.max_iter < 1) fail("ao.max_iter", "must be >= 1");
    if (!(ao.p2_init_fraction >= 0 && ao.p2_init_fraction <= 1)) fail("ao.p2_init_fraction", "must lie in [0, 1]");
    if (ao.init_grid < 0) fail("ao.init_grid", "must be >= 0");
    if (!(sdr.tol > 0)) fail("sdr.tol", "must be > 0");
    if (sdr.n_rand < 1) fail("sdr.n_rand", "must be >= 1");
    if (!(drb.bisect_tol > 0 && drb.bisect_tol < 1)) fail("drb.bisect_tol", "must lie in (0, 1)");
    if (drb.grid_points < 3) fail("drb.grid_points", "must be >= 3");
    if (drb.n_rand < 1) fail("drb.n_rand", "must be >= 1");
    if (!(drb.solver_tol > 0)) fail("drb.solver_tol", "must be > 0");
    if (!(drb.certificate_tol >= 0)) fail("drb.certificate_tol", "must be >= 0");
    parse_method(method);
  }
};

namespace internal {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != last) {
    throw InvalidInput(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

struct ConfigKey {
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

inline ConfigKey bind_key(const std::string& key, double& v) {
  return {key, [&v] { return format_double(v); },
          [&v, key](const std::string& s) { v = parse_number<double>(key, s); }};
}
inline ConfigKey bind_key(const std::string& key, int& v) {
  return {key, [&v] { return std::to_string(v); },
          [&v, key](const std::string& s) { v = parse_number<int>(key, s); }};
}
inline ConfigKey bind_key(const std::string& key, long& v) {
  return {key, [&v] { return std::to_string(v); },
          [&v, key](const std::string& s) { v = parse_number<long>(key, s); }};
}
inline ConfigKey bind_key(const std::string& key, unsigned& v) {
  return {key, [&v] { return std::to_string(v); },
          [&v, key](const std::string& s) { v = parse_number<unsigned>(key, s); }};
}
inline ConfigKey bind_key(const std::string& key, std::uint64_t& v) {
  return {key, [&v] { return std::to_string(v); },
          [&v, key](const std::string& s) { v = parse_number<std::uint64_t>(key, s); }};
}
inline ConfigKey bind_key(const std::string& key, std::string& v) {
  return {key, [&v] { return v; }, [&v](const std::string& s) { v = trim(s); }};
}
inline ConfigKey bind_key(const std::string& key, std::vector<std::string>& v) {
  return {key,
          [&v] {
            std::string out;
            for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
            return out;
          },
          [&v](const std::string& s) { v = split_list(s); }};
}
inline ConfigKey bind_key(const std::string& key, std::vector<double>& v) {
  return {key,
          [&v] {
            std::string out;
            for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
            return out;
          },
          [&v, key](const std::string& s) {
            v.clear();
            for (const auto& item : split_list(s)) v.push_back(parse_number<double>(key, item));
          }};
}
inline ConfigKey bind_key(const std::string& key, std::optional<double>& v) {
  return {key, [&v] { return v ? format_double(*v) : std::string("auto"); },
          [&v, key](const std::string& s) {
            if (trim(s) == "auto") {
              v.reset();
            } else {
              v = parse_number<double>(key, s);
            }
          }};
}

inline std::vector<ConfigKey> config_keys(RunConfig& c) {
  auto& s = c.scenario;
  return {
      bind_key("scenario.N", s.N),
      bind_key("scenario.d", s.d),
      bind_key("scenario.lambda", s.lambda),
      bind_key("scenario.theta1_deg", s.theta1_deg),
      bind_key("scenario.theta2_deg", s.theta2_deg),
      bind_key("scenario.d1", s.d1),
      bind_key("scenario.d2", s.d2),
      bind_key("scenario.Gt_dB", s.Gt_dB),
      bind_key("scenario.G1_dB", s.G1_dB),
      bind_key("scenario.G2_dB", s.G2_dB),
      bind_key("scenario.S", s.S),
      bind_key("scenario.B", s.B),
      bind_key("scenario.T", s.T),
      bind_key("scenario.delta", s.delta),
      bind_key("scenario.sigma2_proc", s.sigma2_proc),
      bind_key("scenario.gamma2", s.gamma2),
      bind_key("scenario.P", s.P),
      bind_key("scenario.zeta", s.zeta),
      bind_key("scenario.sigma2_rel_dB", s.sigma2_rel_dB),
      bind_key("moments.mu_deg", c.moments.mu_deg),
      bind_key("moments.sigma_deg", c.moments.sigma_deg),
      bind_key("moments.eps_sec", c.moments.eps_sec),
      bind_key("moments.eps_est", c.moments.eps_est),
      bind_key("sweep.variable", c.sweep.variable),
      bind_key("sweep.values", c.sweep.values),
      bind_key("sweep.methods", c.sweep.methods),
      bind_key("outage.n_samples", c.outage.n_samples),
      bind_key("outage.families", c.outage.families),
      bind_key("outage.method", c.outage.method),
      bind_key("outage.threshold_rate", c.outage.threshold_rate),
      bind_key("ao.eps", c.ao.eps),
      bind_key("ao.max_iter", c.ao.max_iter),
      bind_key("ao.p2_init_fraction", c.ao.p2_init_fraction),
      bind_key("ao.init_grid", c.ao.init_grid),
      bind_key("sdr.tol", c.sdr.tol),
      bind_key("sdr.rank_one_threshold", c.sdr.rank_one_threshold),
      bind_key("sdr.n_rand", c.sdr.n_rand),
      bind_key("drb.bisect_tol", c.drb.bisect_tol),
      bind_key("drb.grid_points", c.drb.grid_points),
      bind_key("drb.n_rand", c.drb.n_rand),
      bind_key("drb.solver_tol", c.drb.solver_tol),
      bind_key("drb.rank_one_threshold", c.drb.rank_one_threshold),
      bind_key("drb.certificate_tol", c.drb.certificate_tol),
      bind_key("run.seed", c.seed),
      bind_key("run.method", c.method),
      bind_key("run.output", c.output),
      bind_key("run.threads", c.threads),
  };
}

}  // namespace internal

/// Applies `key = value` lines on top of `base`. Unknown keys, missing `=`
/// and unparsable values throw InvalidInput with the line number.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  auto keys = internal::config_keys(base);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = internal::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (eq == std::string::npos) throw InvalidInput("config: expected key = value" + where);
    const std::string key = internal::trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    bool found = false;
    for (auto& k : keys) {
      if (k.key != key) continue;
      try {
        k.set(value);
      } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(e.what()) + where);
      }
      found = true;
      break;
    }
    if (!found) throw InvalidInput("config: unknown key '" + key + "'" + where);
  }
  return base;
}

inline RunConfig parse_config_string(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

/// Every key, one per line, doubles with 17 significant digits.
inline std::string dump_config(const RunConfig& cfg) {
  RunConfig copy = cfg;
  std::string out;
  for (const auto& k : internal::config_keys(copy)) out += k.key + " = " + k.get() + "\n";
  return out;
}

}  // namespace dfrc
