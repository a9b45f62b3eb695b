#pragma once

// Artificial-noise-aided secrecy design. The AN covariance is fixed to
// u1 u1^H (AN beamformed at the target), and the beamformer w and the power
// split (p1, p2) are updated alternately, each step solved to global
// optimality in closed form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "dfrc/closed_form.hpp"

namespace dfrc {

/// Data of the power-allocation step for a fixed beamformer w:
/// maximize g(p2) = (a1 p2^2 + b1 p2 + c1) / (a2 p2^2 + b2 p2 + c2) over
/// zeta_hat <= p2 <= P.
struct PowerAllocInstance {
  double psi1 = 0;  // |h1^H w|
  double psi2 = 0;  // |h2^H w|
  double psi3 = 0;  // |a1^H w|
  double mu1 = 0;   // |h2^H u1|
  double mu3 = 0;   // ||h1||
  int N = 1;
  double zeta_bar = 0;
  double P = 1;
  double a1c = 0, b1c = 0, c1c = 0;
  double a2c = 0, b2c = 0, c2c = 0;
  double zeta_hat = 0;

  /// Fills the quadratic coefficients and the lower box bound from the
  /// psi/mu values. Throws Infeasible when no p2 in [0, P] meets zeta_bar.
  static PowerAllocInstance make(double psi1, double psi2, double psi3, double mu1,
                                 double mu3, int N, double zeta_bar, double P) {
    PowerAllocInstance in;
    in.psi1 = psi1;
    in.psi2 = psi2;
    in.psi3 = psi3;
    in.mu1 = mu1;
    in.mu3 = mu3;
    in.N = N;
    in.zeta_bar = zeta_bar;
    in.P = P;
    const double m1 = mu1 * mu1, m3 = mu3 * mu3, s1 = psi1 * psi1, s2 = psi2 * psi2;
    in.a1c = m3 * (m1 - s2);
    in.b1c = P * (m1 - s2 + m3 + m3 * s2);
    in.c1c = (1 + s2) * P * P;
    in.a2c = m1 * (m3 - s1);
    in.b2c = P * (m3 - s1 + m1 + m1 * s1);
    in.c2c = (1 + s1) * P * P;

    const double s3 = psi3 * psi3;
    const double slack = N - s3;
    if (slack > 1e-12 * N) {
      in.zeta_hat = std::max(0.0, (zeta_bar - P * s3) / slack);
    } else {
      // w points at the target: p2 does not change the illumination.
      in.zeta_hat = 0;
      if (zeta_bar > P * s3 * (1 + 1e-12)) {
        throw Infeasible("power_allocation: illumination threshold unreachable");
      }
    }
    return in;
  }
};

inline double power_objective(const PowerAllocInstance& in, double p2) {
  return (in.a1c * p2 * p2 + in.b1c * p2 + in.c1c) / (in.a2c * p2 * p2 + in.b2c * p2 + in.c2c);
}

namespace internal {

/// Real roots of qa x^2 + qb x + qc = 0 computed without cancellation. A
/// leading coefficient below 1e-12 of the coefficient scale is treated as
/// zero (linear equation); an identically zero polynomial has no roots.
inline std::vector<double> real_quadratic_roots(double qa, double qb, double qc) {
  std::vector<double> r;
  const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
  if (scale == 0) return r;
  qa /= scale;
  qb /= scale;
  qc /= scale;
  if (std::abs(qa) <= 1e-12) {
    if (std::abs(qb) > 1e-12) r.push_back(-qc / qb);
    return r;
  }
  double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) {
    if (disc < -1e-12) return r;
    disc = 0;
  }
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  if (q != 0) {
    r.push_back(q / qa);
    r.push_back(qc / q);
  } else {
    r.push_back(0.0);
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace internal

/// Stationary points of g. With p2 = P t they solve
///   (a1 b2 - a2 b1) t^2 + 2 (a1 c2 - a2 c1) t + (b1 c2 - b2 c1) = 0
/// in the P-normalized coefficients; the roots equal the closed-form pair
/// (a2 c1 - a1 c2 +- sqrt(.)) / (a1 b2 - a2 b1). A vanishing leading term
/// falls back to the linear equation.
inline std::vector<double> power_stationary_points(const PowerAllocInstance& in) {
  const double P = in.P;
  const double a1 = in.a1c, b1 = in.b1c / P, c1 = in.c1c / (P * P);
  const double a2 = in.a2c, b2 = in.b2c / P, c2 = in.c2c / (P * P);
  std::vector<double> out;
  for (double t : internal::real_quadratic_roots(a1 * b2 - a2 * b1, 2 * (a1 * c2 - a2 * c1),
                                                 b1 * c2 - b2 * c1)) {
    if (std::isfinite(t)) out.push_back(t * P);
  }
  return out;
}

/// Optimal (p1, p2). Candidates are zeta_hat, P and the stationary points in
/// the box; ties within 1e-12 (relative) go to the smaller p2. Throws
/// Infeasible when zeta_hat > P.
inline std::pair<double, double> power_allocation(const PowerAllocInstance& in) {
  if (in.zeta_hat > in.P * (1 + 1e-12)) {
    throw Infeasible("power_allocation: zeta_hat exceeds the power budget");
  }
  const double lo = std::min(in.zeta_hat, in.P);
  std::vector<double> cand{lo, in.P};
  for (double p : power_stationary_points(in)) {
    if (p > lo && p < in.P) cand.push_back(p);
  }
  std::sort(cand.begin(), cand.end());
  double best = cand.front();
  double best_g = power_objective(in, best);
  for (double p : cand) {
    const double g = power_objective(in, p);
    if (g > best_g + 1e-12 * std::abs(best_g)) {
      best_g = g;
      best = p;
    }
  }
  return {in.P - best, best};
}

/// Quantities shared by every AO iteration of one scene.
struct AnContext {
  SrmInstance srm;
  OrthoPair basis;
  double mu1 = 0;
  double mu3 = 0;
  double zeta_bar = 0;
  MatrixXcd phi;  // u1 u1^H

  static AnContext make(const ScenarioConfig& cfg, const ChannelSet& ch) {
    AnContext c;
    c.srm = build_srm_instance(cfg, ch);
    c.basis = orthonormal_pair(c.srm.h1, c.srm.h2);
    c.mu1 = std::abs(c.srm.h2.dot(c.basis.u1));
    c.mu3 = c.srm.h1.norm();
    c.zeta_bar = dfrc::zeta_bar(cfg, ch);
    c.phi = c.basis.u1 * c.basis.u1.adjoint();
    return c;
  }
};

/// Beamformer step for a fixed power split: the no-AN closed form applied to
/// the rescaled channels. Requires p1 > 0.
inline ClosedFormSolution an_beamformer_subproblem(const ScenarioConfig& cfg,
                                                   const ChannelSet& ch,
                                                   const AnContext& ctx, double p1,
                                                   double p2) {
  if (!(p1 > 0)) throw InvalidInput("an_beamformer_subproblem: p1 must be > 0");
  const double P = cfg.P;
  const double m1 = ctx.mu1 * ctx.mu1, m3 = ctx.mu3 * ctx.mu3;
  SrmInstance tilde;
  tilde.h1 = std::sqrt(p1 / (P + m3 * p2)) * ctx.srm.h1;
  tilde.h2 = std::sqrt(p1 / (P + m1 * p2)) * ctx.srm.h2;
  const double alpha =
      P * ch.beta1_sq * (ctx.zeta_bar - cfg.N * p2) / (ch.sigma2 * (P + m3 * p2));
  tilde.alpha = std::max(0.0, alpha);
  // Rounding can push alpha a hair above ||h1~||^2 when the budget is tight.
  tilde.alpha = std::min(tilde.alpha, tilde.h1.squaredNorm());
  return closed_form_beamformer(tilde);
}

inline ClosedFormSolution an_beamformer_subproblem(const ScenarioConfig& cfg,
                                                   const ChannelSet& ch, double p1,
                                                   double p2) {
  return an_beamformer_subproblem(cfg, ch, AnContext::make(cfg, ch), p1, p2);
}

inline PowerAllocInstance power_alloc_instance(const ScenarioConfig& cfg, const ChannelSet& ch,
                                               const AnContext& ctx, const VectorXcd& w) {
  return PowerAllocInstance::make(std::abs(ctx.srm.h1.dot(w)), std::abs(ctx.srm.h2.dot(w)),
                                  std::abs(ch.a1.dot(w)), ctx.mu1, ctx.mu3, cfg.N,
                                  ctx.zeta_bar, cfg.P);
}

struct AoOptions {
  double eps = 1e-6;
  int max_iter = 100;
  double p2_init_fraction = 0.1;
  /// AN powers probed (geometric in [1e-4 P, P], plus 0 and zeta_bar / N)
  /// to seed a second run; 0 disables it.
  int init_grid = 64;
};

struct AoResult {
  Design design;
  /// Objective (1+SINR_cu)/(1+SINR_eve) after each full (w, p) update;
  /// entry 0 is the initial point with the MRT beamformer.
  std::vector<double> objective;
  /// p1 |a1^H w|^2 + N p2 at every iterate.
  std::vector<double> illumination;
  int iterations = 0;
  bool converged = false;
};

namespace internal {

/// Runs the alternation from a feasible (w, p2) with p1 = P - p2.
inline AoResult ao_run(const ScenarioConfig& cfg, const ChannelSet& ch, const AnContext& ctx,
                       const AoOptions& opt, VectorXcd w, double p2) {
  const double P = cfg.P;
  AoResult res;
  auto objective = [&](const VectorXcd& v, double q1, double q2) {
    return secrecy_ratio(ch, v, q1, q2, ctx.phi);
  };
  double p1 = P - p2;
  double prev = objective(w, p1, p2);
  if (!std::isfinite(prev)) throw NumericalError("ao_solve: non-finite initial objective");
  res.objective.push_back(prev);
  res.illumination.push_back(p1 * std::norm(ch.a1.dot(w)) + cfg.N * p2);

  for (int it = 1; it <= opt.max_iter; ++it) {
    if (p1 > 0) w = an_beamformer_subproblem(cfg, ch, ctx, p1, p2).w;
    const auto [np1, np2] = power_allocation(power_alloc_instance(cfg, ch, ctx, w));
    p1 = np1;
    p2 = np2;
    const double cur = objective(w, p1, p2);
    if (!std::isfinite(cur)) throw NumericalError("ao_solve: non-finite objective");
    res.objective.push_back(cur);
    res.illumination.push_back(p1 * std::norm(ch.a1.dot(w)) + cfg.N * p2);
    res.iterations = it;
    if (std::abs(cur - prev) < opt.eps) {
      res.converged = true;
      break;
    }
    prev = cur;
  }

  res.design.w = w;
  res.design.p1 = p1;
  res.design.p2 = p2;
  res.design.phi = ctx.phi;
  fill_rates(cfg, ch, res.design);
  return res;
}

}  // namespace internal

namespace internal {

inline AoResult ao_search(const ScenarioConfig& cfg, const ChannelSet& ch, const AnContext& ctx,
                          const AoOptions& opt) {
  const double P = cfg.P;
  if (ctx.zeta_bar > cfg.N * P * (1 + 1e-12)) {
    throw Infeasible("ao_solve: estimation-rate threshold exceeds what N*P can illuminate");
  }
  // Default start: MRT with p2 raised to its feasibility bound if needed.
  const VectorXcd mrt = ch.a2.normalized();
  const double p2_init = std::clamp(
      std::max(std::clamp(opt.p2_init_fraction, 0.0, 1.0) * P,
               power_alloc_instance(cfg, ch, ctx, mrt).zeta_hat),
      0.0, P);
  AoResult best = internal::ao_run(cfg, ch, ctx, opt, mrt, p2_init);
  if (opt.init_grid <= 0) return best;

  std::vector<double> probes{0.0, std::min(P, ctx.zeta_bar / cfg.N)};
  for (int i = 0; i < opt.init_grid; ++i) {
    const double t = opt.init_grid == 1 ? 1.0 : static_cast<double>(i) / (opt.init_grid - 1);
    probes.push_back(P * std::pow(10.0, -4.0 * (1.0 - t)));
  }
  std::sort(probes.begin(), probes.end());
  auto score = [&](double p2, VectorXcd* w_out) {
    if (!(p2 < P)) return -std::numeric_limits<double>::infinity();
    try {
      const VectorXcd w = an_beamformer_subproblem(cfg, ch, ctx, P - p2, p2).w;
      if (power_alloc_instance(cfg, ch, ctx, w).zeta_hat > p2 * (1 + 1e-9) + 1e-12) {
        return -std::numeric_limits<double>::infinity();
      }
      if (w_out) *w_out = w;
      return secrecy_ratio(ch, w, P - p2, p2, ctx.phi);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  size_t arg = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < probes.size(); ++i) {
    const double v = score(probes[i], nullptr);
    if (v > best_val) {
      best_val = v;
      arg = i;
    }
  }
  if (!std::isfinite(best_val)) return best;

  // Golden-section refinement between the neighbouring probes.
  double lo = probes[arg == 0 ? 0 : arg - 1];
  double hi = probes[std::min(arg + 1, probes.size() - 1)];
  double best_p2 = probes[arg];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = score(x1, nullptr), f2 = score(x2, nullptr);
  for (int it = 0; it < 80 && hi - lo > 1e-12 * P; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = score(x1, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = score(x2, nullptr);
    }
  }
  for (double x : {x1, x2}) {
    const double v = score(x, nullptr);
    if (v > best_val) {
      best_val = v;
      best_p2 = x;
    }
  }
  VectorXcd best_w;
  score(best_p2, &best_w);
  AoResult alt = internal::ao_run(cfg, ch, ctx, opt, best_w, best_p2);
  if (alt.objective.back() > best.objective.back()) best = std::move(alt);
  return best;
}

}  // namespace internal

/// Alternating optimization of (w, p1, p2) with Phi = u1 u1^H. Stops when two
/// successive objectives differ by less than `eps` or after `max_iter`
/// rounds. A second run starts from the probed AN power whose optimal
/// beamformer scores best; the run with the larger final objective is
/// returned. The no-AN closed-form design is a feasible point and replaces
/// the AO design when it scores at least as well. Throws Infeasible when
/// zeta_bar > N P.
inline AoResult ao_solve(const ScenarioConfig& cfg, const ChannelSet& ch,
                         const AoOptions& opt = {}) {
  const AnContext ctx = AnContext::make(cfg, ch);
  AoResult res = internal::ao_search(cfg, ch, ctx, opt);
  try {
    const VectorXcd w = closed_form_beamformer(build_srm_instance(cfg, ch)).w;
    const Design& d = res.design;
    if (secrecy_ratio(ch, w, cfg.P, 0.0, ctx.phi) >= secrecy_ratio(ch, d.w, d.p1, d.p2, d.phi)) {
      res.design.w = w;
      res.design.p1 = cfg.P;
      res.design.p2 = 0;
      fill_rates(cfg, ch, res.design);
    }
  } catch (const Error&) {
  }
  return res;
}

}  // namespace dfrc
