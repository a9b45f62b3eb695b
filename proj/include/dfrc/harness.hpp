#pragma once

// Brute-force oracles, parameter sweeps and Monte-Carlo outage experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dfrc/an_design.hpp"
#include "dfrc/closed_form.hpp"
#include "dfrc/parallel.hpp"
#include "dfrc/robust.hpp"
#include "dfrc/sampling.hpp"
#include "dfrc/sdr.hpp"

namespace dfrc {

/// Best theta on a uniform grid of [alpha/mu3^2, 1] (n_points >= 1; ties go
/// to the smaller theta).
inline double grid_oracle_one_dim(const OneDimInstance& inst, long n_points) {
  if (n_points < 1) throw InvalidInput("grid_oracle_one_dim: n_points must be >= 1");
  const double lo = inst.lower();
  if (lo > 1 + 1e-12) throw Infeasible("grid_oracle_one_dim: empty box");
  const double a = std::clamp(lo, 0.0, 1.0);
  if (n_points == 1 || a >= 1.0) return a;
  double best = a, best_f = one_dim_objective(inst, a);
  for (long i = 1; i < n_points; ++i) {
    const double t = a + (1.0 - a) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double f = one_dim_objective(inst, t);
    if (f > best_f) {
      best_f = f;
      best = t;
    }
  }
  return best;
}

/// Best p2 on a uniform grid of [zeta_hat, P].
inline double grid_oracle_power(const PowerAllocInstance& inst, long n_points) {
  if (n_points < 1) throw InvalidInput("grid_oracle_power: n_points must be >= 1");
  if (inst.zeta_hat > inst.P * (1 + 1e-12)) throw Infeasible("grid_oracle_power: empty box");
  const double a = std::min(inst.zeta_hat, inst.P);
  if (n_points == 1 || a >= inst.P) return a;
  double best = a, best_g = power_objective(inst, a);
  for (long i = 1; i < n_points; ++i) {
    const double p = a + (inst.P - a) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double g = power_objective(inst, p);
    if (g > best_g) {
      best_g = g;
      best = p;
    }
  }
  return best;
}

enum class Method { ClosedForm, Sdr, Mrt, AoAn, Drb, NonRobust };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::Sdr: return "sdr";
    case Method::Mrt: return "mrt";
    case Method::AoAn: return "ao_an";
    case Method::Drb: return "drb";
    case Method::NonRobust: return "non_robust";
  }
  return "unknown";
}

/// Accepts both underscore and hyphen spellings.
inline Method parse_method(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  for (Method m : {Method::ClosedForm, Method::Sdr, Method::Mrt, Method::AoAn, Method::Drb,
                   Method::NonRobust}) {
    if (method_name(m) == s) return m;
  }
  throw InvalidInput("unknown method: " + s);
}

enum class SweepVariable { P, Zeta, D2OverD1, DeltaTheta };

inline std::string variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::P: return "P";
    case SweepVariable::Zeta: return "zeta";
    case SweepVariable::D2OverD1: return "d2_over_d1";
    case SweepVariable::DeltaTheta: return "delta_theta";
  }
  return "unknown";
}

inline SweepVariable parse_variable(const std::string& s) {
  for (SweepVariable v : {SweepVariable::P, SweepVariable::Zeta, SweepVariable::D2OverD1,
                          SweepVariable::DeltaTheta}) {
    if (variable_name(v) == s) return v;
  }
  throw InvalidInput("sweep.variable: unknown variable " + s);
}

/// Scene with the swept variable set: P in watts, zeta in bits/s, d2 = v d1,
/// theta2 = theta1 + v degrees.
inline ScenarioConfig apply_sweep_value(ScenarioConfig cfg, SweepVariable var, double v) {
  switch (var) {
    case SweepVariable::P: cfg.P = v; break;
    case SweepVariable::Zeta: cfg.zeta = v; break;
    case SweepVariable::D2OverD1: cfg.d2 = v * cfg.d1; break;
    case SweepVariable::DeltaTheta: cfg.theta2 = cfg.theta1 + deg_to_rad(v); break;
  }
  return cfg;
}

struct MethodOptions {
  AoOptions ao;
  DrbOptions drb;
  SdrOptions sdr;
  MomentModel moments;  // used by drb; must match N
};

struct MethodOutcome {
  Design design;
  int iterations = 0;
  std::string status = "ok";
  std::string message;
  bool ok() const { return status == "ok"; }
};

/// Runs one method and converts library errors into a status string.
inline MethodOutcome run_method(Method m, const ScenarioConfig& cfg, const MethodOptions& opt) {
  MethodOutcome out;
  try {
    const ChannelSet ch = build_channels(cfg);
    switch (m) {
      case Method::ClosedForm: {
        ClosedFormSolution sol;
        out.design = closed_form_design(cfg, ch, &sol);
        if (sol.degenerate) out.status = "degenerate";
        break;
      }
      case Method::Sdr: {
        SdrResult r;
        out.design = sdr_design(cfg, ch, &r, opt.sdr);
        out.iterations = r.iterations;
        break;
      }
      case Method::Mrt: out.design = mrt_beamformer(cfg, ch); break;
      case Method::AoAn:
      case Method::NonRobust: {
        const AoResult r = ao_solve(cfg, ch, opt.ao);
        out.design = r.design;
        out.iterations = r.iterations;
        break;
      }
      case Method::Drb: {
        const DrbResult r = drb_solve(cfg, ch, opt.moments, opt.drb);
        out.design = r.design;
        out.iterations = static_cast<int>(r.evaluations.size());
        break;
      }
    }
  } catch (const Infeasible& e) {
    out.status = "infeasible";
    out.message = e.what();
  } catch (const DegenerateGeometry& e) {
    out.status = "degenerate_geometry";
    out.message = e.what();
  } catch (const RecoveryFailure& e) {
    out.status = "recovery_failure";
    out.message = e.what();
  } catch (const SolverFailure& e) {
    out.status = "solver_failure";
    out.message = e.what();
  } catch (const NumericalError& e) {
    out.status = "numerical_error";
    out.message = e.what();
  } catch (const InvalidInput& e) {
    out.status = "invalid_input";
    out.message = e.what();
  }
  return out;
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::P;
  std::vector<double> grid;
  ScenarioConfig fixed;
  std::vector<Method> methods;
  MethodOptions options;
};

struct SweepRow {
  double grid_value = 0;
  Method method = Method::Mrt;
  double secrecy_rate = 0;
  double estimation_rate = 0;
  double p2_fraction = 0;
  int iterations = 0;
  double wall_time = 0;  // seconds; not part of the CSV output
  std::string status;
};

/// One row per (grid value, method), sorted by grid value then method name.
/// Points run concurrently; per-point failures are recorded in `status`.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw InvalidInput("sweep.grid: must be nonempty");
  if (spec.methods.empty()) throw InvalidInput("sweep.methods: must be nonempty");
  for (double v : spec.grid) {
    if (!std::isfinite(v)) throw InvalidInput("sweep.grid: non-finite value");
  }
  spec.fixed.validate();
  std::vector<SweepRow> rows(spec.grid.size() * spec.methods.size());
  parallel_for(rows.size(), [&](size_t k) {
    const size_t gi = k / spec.methods.size();
    const Method m = spec.methods[k % spec.methods.size()];
    SweepRow& row = rows[k];
    row.grid_value = spec.grid[gi];
    row.method = m;
    const auto t0 = std::chrono::steady_clock::now();
    MethodOutcome out;
    try {
      const ScenarioConfig cfg = apply_sweep_value(spec.fixed, spec.variable, spec.grid[gi]);
      cfg.validate();
      out = run_method(m, cfg, spec.options);
      if (out.ok() || out.status == "degenerate") {
        row.p2_fraction = out.design.p2 / cfg.P;
      }
    } catch (const InvalidInput& e) {
      out.status = "invalid_input";
      out.message = e.what();
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.status = out.status;
    row.iterations = out.iterations;
    if (out.ok() || out.status == "degenerate") {
      row.secrecy_rate = out.design.secrecy_rate;
      row.estimation_rate = out.design.estimation_rate;
    }
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.grid_value != b.grid_value) return a.grid_value < b.grid_value;
    return method_name(a.method) < method_name(b.method);
  });
  return rows;
}

struct OutageReport {
  std::string distribution;
  long n_samples = 0;
  double threshold_rate = 0;
  double empirical_outage = 0;        // second-order phase-error model
  double exact_outage = 0;            // exact phase-error channel
  double estimation_outage = 0;       // second-order model
  double exact_estimation_outage = 0;
  double histogram_max = 0;
  std::vector<long> histogram;        // 100 bins over [0, histogram_max]
  double exact_histogram_max = 0;
  std::vector<long> exact_histogram;
};

namespace internal {

inline std::vector<long> histogram(const std::vector<double>& v, int bins, double& vmax) {
  vmax = 0;
  for (double x : v) vmax = std::max(vmax, x);
  std::vector<long> h(static_cast<size_t>(bins), 0);
  for (double x : v) {
    int b = vmax > 0 ? static_cast<int>(std::floor(x / vmax * bins)) : 0;
    b = std::clamp(b, 0, bins - 1);
    ++h[static_cast<size_t>(b)];
  }
  return h;
}

}  // namespace internal

/// Realized secrecy rates under random target phase errors drawn from the
/// moment-matched `family`. A sample is an outage when its rate is below
/// threshold_rate (relative slack 1e-12). The second-order model replaces
/// h^H X h by its expansion in the phase error; the exact variant uses
/// h = a1 .* exp(j dtheta).
inline OutageReport monte_carlo_outage(const Design& design, const ScenarioConfig& cfg,
                                       const ChannelSet& ch, const MomentModel& model, Family family,
                                       long n_samples, double threshold_rate, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidInput("outage.n_samples: must be >= 1");
  if (!std::isfinite(threshold_rate)) throw InvalidInput("outage: non-finite threshold");
  if (model.N() != cfg.N) throw InvalidInput("outage: moment model size differs from N");
  const int N = cfg.N;
  const MatrixXcd W = design.p1 * design.w * design.w.adjoint();
  const MatrixXcd Phi = design.phi ? MatrixXcd(design.p2 * *design.phi) : MatrixXcd::Zero(N, N);
  const TaylorizedQuadratic tw = taylorize(W, ch.a1);
  const TaylorizedQuadratic tp = taylorize(Phi, ch.a1);
  const double noise = ch.sigma2 / ch.beta1_sq;
  const double sinr_cu = sinrs(ch, design.w, design.p1, design.p2, design.phi).cu;
  const double zb = zeta_bar(cfg, ch);
  const MomentSampler sampler(model.mu_bar, model.Sigma, family);
  const double limit = threshold_rate * (1 - 1e-12);

  auto rate = [&](double sig, double an) {
    double eve;
    if (noise + an > 0) {
      eve = std::max(0.0, sig) / (noise + an);
    } else {
      eve = sig > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return secrecy_rate_from_sinrs(cfg.B, sinr_cu, eve);
  };

  constexpr long kChunk = 4096;
  const long n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<double> taylor_rates(static_cast<size_t>(n_samples));
  std::vector<double> exact_rates(static_cast<size_t>(n_samples));
  std::vector<long> est_fail(static_cast<size_t>(n_chunks), 0), est_fail_exact(static_cast<size_t>(n_chunks), 0);
  parallel_for(static_cast<size_t>(n_chunks), [&](size_t c) {
    std::mt19937_64 rng = stream_rng(seed, c);
    const long begin = static_cast<long>(c) * kChunk;
    const long end = std::min(n_samples, begin + kChunk);
    VectorXcd h(N);
    for (long s = begin; s < end; ++s) {
      const VectorXd t = sampler(rng);
      const double sig_t = tw(t), an_t = tp(t);
      taylor_rates[static_cast<size_t>(s)] = rate(sig_t, an_t);
      if (sig_t + an_t < zb) ++est_fail[c];
      for (int k = 0; k < N; ++k) h(k) = ch.a1(k) * std::polar(1.0, t(k));
      const double sig_e = design.p1 * std::norm(h.dot(design.w));
      const double an_e = internal::quad_form(Phi, h);
      exact_rates[static_cast<size_t>(s)] = rate(sig_e, an_e);
      if (sig_e + an_e < zb) ++est_fail_exact[c];
    }
  });

  OutageReport rep;
  rep.distribution = family_name(family);
  rep.n_samples = n_samples;
  rep.threshold_rate = threshold_rate;
  long out_t = 0, out_e = 0, est_t = 0, est_e = 0;
  for (long s = 0; s < n_samples; ++s) {
    if (taylor_rates[static_cast<size_t>(s)] < limit) ++out_t;
    if (exact_rates[static_cast<size_t>(s)] < limit) ++out_e;
  }
  for (long c = 0; c < n_chunks; ++c) {
    est_t += est_fail[static_cast<size_t>(c)];
    est_e += est_fail_exact[static_cast<size_t>(c)];
  }
  const double n = static_cast<double>(n_samples);
  rep.empirical_outage = out_t / n;
  rep.exact_outage = out_e / n;
  rep.estimation_outage = est_t / n;
  rep.exact_estimation_outage = est_e / n;
  rep.histogram = internal::histogram(taylor_rates, 100, rep.histogram_max);
  rep.exact_histogram = internal::histogram(exact_rates, 100, rep.exact_histogram_max);
  return rep;
}

}  // namespace dfrc
