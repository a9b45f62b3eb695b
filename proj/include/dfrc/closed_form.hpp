#pragma once

// Optimal no-AN secrecy beamformer. The optimum lies in span{h1, h2}; after
// aligning the phases of the two expansion coefficients the problem reduces to
// maximizing
//
//   f(theta) = (1 + (sqrt(theta) mu1 + sqrt(1-theta) mu2)^2) / (1 + mu3^2 theta)
//
// over alpha/mu3^2 <= theta <= 1, where theta is the power placed on u1.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dfrc/scenario.hpp"

namespace dfrc {

/// Orthonormal basis of span{h1, h2}: u1 along h1, u2 along the part of h2
/// orthogonal to h1.
struct OrthoPair {
  VectorXcd u1;
  VectorXcd u2;
};

/// Throws DegenerateGeometry when h2 is parallel to h1 (residual below
/// 1e-10 ||h2||) and InvalidInput when h1 = 0.
inline OrthoPair orthonormal_pair(const VectorXcd& h1, const VectorXcd& h2) {
  if (h1.size() != h2.size()) throw InvalidInput("orthonormal_pair: size mismatch");
  const double n1 = h1.norm();
  if (!(n1 > 0)) throw InvalidInput("orthonormal_pair: h1 must be nonzero");
  OrthoPair p;
  p.u1 = h1 / n1;
  VectorXcd r = h2 - p.u1 * p.u1.dot(h2);
  // One re-orthogonalization pass keeps |u1^H u2| at rounding level even when
  // h2 is nearly parallel to h1.
  r -= p.u1 * p.u1.dot(r);
  const double rn = r.norm();
  if (!(rn > 1e-10 * h2.norm())) {
    throw DegenerateGeometry("orthonormal_pair: h2 is parallel to h1");
  }
  p.u2 = r / rn;
  return p;
}

/// Scalar data of the reduced one-dimensional problem.
struct OneDimInstance {
  double mu1 = 0;  // |h2^H u1|
  double mu2 = 0;  // |h2^H u2|
  double mu3 = 0;  // |h1^H u1| = ||h1||
  double alpha = 0;

  double kappa1() const { return mu1 * mu1 - (mu3 * mu3 + 1) * mu2 * mu2 - mu3 * mu3; }
  double kappa2() const { return mu1 * mu2 * (mu3 * mu3 + 2); }
  double kappa3() const { return mu1 * mu2; }

  /// Lower end of the feasible box, alpha / mu3^2.
  double lower() const { return alpha / (mu3 * mu3); }
};

inline double one_dim_objective(const OneDimInstance& inst, double theta) {
  const double s = std::sqrt(theta) * inst.mu1 + std::sqrt(std::max(0.0, 1 - theta)) * inst.mu2;
  return (1 + s * s) / (1 + inst.mu3 * inst.mu3 * theta);
}

/// kappa1 sqrt(theta(1-theta)) - kappa2 theta + kappa3; vanishes exactly at the
/// interior stationary points of f.
inline double one_dim_gradient_residual(const OneDimInstance& inst, double theta) {
  return inst.kappa1() * std::sqrt(theta * (1 - theta)) - inst.kappa2() * theta + inst.kappa3();
}

/// Real roots of (k1^2 + k2^2) t^2 - (k1^2 + 2 k2 k3) t + k3^2 = 0 (the squared
/// stationarity condition) that also satisfy the unsquared one, sorted and
/// deduplicated. All lie in [0, 1].
inline std::vector<double> one_dim_stationary_points(const OneDimInstance& inst) {
  const double k1 = inst.kappa1(), k2 = inst.kappa2(), k3 = inst.kappa3();
  const double den = k1 * k1 + k2 * k2;
  std::vector<double> out;
  if (!(den > 0)) return out;
  const double sum_num = k1 * k1 + 2 * k2 * k3;
  double disc = k1 * k1 * k1 * k1 + 4 * k1 * k1 * k2 * k3 - 4 * k1 * k1 * k3 * k3;
  const double disc_scale = k1 * k1 * k1 * k1 + 4 * k1 * k1 * (std::abs(k2 * k3) + k3 * k3);
  if (disc < 0) {
    // Rounding noise near tangency: keep the double root.
    if (disc < -1e-12 * std::max(1.0, disc_scale)) return out;
    disc = 0;
  }
  const double root_big = (sum_num + std::sqrt(disc)) / (2 * den);
  // Product of roots is k3^2 / den; avoids cancellation for the small root.
  const double root_small = root_big > 0 ? (k3 * k3 / den) / root_big
                                         : (sum_num - std::sqrt(disc)) / (2 * den);
  const double scale = std::max(1.0, std::abs(k1) + std::abs(k2) + std::abs(k3));
  for (double t : {root_small, root_big}) {
    if (!std::isfinite(t)) continue;
    t = std::clamp(t, 0.0, 1.0);
    if (std::abs(one_dim_gradient_residual(inst, t)) > 1e-6 * scale) continue;
    if (!out.empty() && std::abs(out.back() - t) <= 1e-15) continue;
    out.push_back(t);
  }
  return out;
}

/// Maximizer of f over [alpha/mu3^2, 1], chosen among the two box ends and
/// the interior stationary points. Ties within 1e-12 (relative) go to the
/// smaller theta. Throws Infeasible when alpha > mu3^2.
inline double one_dim_maximize(const OneDimInstance& inst) {
  if (!(inst.mu3 > 0)) throw InvalidInput("one_dim_maximize: mu3 must be > 0");
  double lo = inst.lower();
  if (lo > 1 + 1e-12) throw Infeasible("one_dim_maximize: alpha exceeds ||h1||^2");
  lo = std::clamp(lo, 0.0, 1.0);
  std::vector<double> cand{lo, 1.0};
  for (double t : one_dim_stationary_points(inst)) {
    if (t > lo && t < 1.0) cand.push_back(t);
  }
  std::sort(cand.begin(), cand.end());
  double best_t = cand.front();
  double best_f = one_dim_objective(inst, best_t);
  for (double t : cand) {
    const double f = one_dim_objective(inst, t);
    if (f > best_f + 1e-12 * std::abs(best_f)) {
      best_f = f;
      best_t = t;
    }
  }
  return best_t;
}

struct ClosedFormSolution {
  VectorXcd w;
  double theta = 1;
  double objective = 1;  // (1 + |h2^H w|^2) / (1 + |h1^H w|^2)
  bool degenerate = false;
  OneDimInstance reduced;
};

/// Closed-form optimal beamformer of the normalized no-AN problem. When h2 is
/// parallel to h1 the optimum lies in span{u1, v} for any v orthogonal to h1
/// and `degenerate` is set.
inline ClosedFormSolution closed_form_beamformer(const SrmInstance& inst) {
  const double mu3 = inst.h1.norm();
  if (!(mu3 > 0)) throw InvalidInput("closed_form_beamformer: h1 must be nonzero");
  if (!(inst.alpha >= 0)) throw InvalidInput("closed_form_beamformer: alpha must be >= 0");
  if (inst.alpha > mu3 * mu3 * (1 + 1e-12)) {
    throw Infeasible("closed_form_beamformer: estimation-rate threshold exceeds ||h1||^2");
  }
  ClosedFormSolution sol;
  OrthoPair basis;
  try {
    basis = orthonormal_pair(inst.h1, inst.h2);
  } catch (const DegenerateGeometry&) {
    // h2 = c h1: the ratio is monotone in x = |h1^H w|^2 on [alpha, mu3^2].
    const VectorXcd u1 = inst.h1 / mu3;
    const double c2 = inst.h2.squaredNorm() / (mu3 * mu3);
    double theta = 1;
    VectorXcd w = u1;
    if (c2 < 1 && u1.size() > 1) {
      Eigen::Index k = 0;
      u1.cwiseAbs().minCoeff(&k);
      VectorXcd v = VectorXcd::Unit(u1.size(), k);
      v -= u1 * u1.dot(v);
      v.normalize();
      theta = std::clamp(inst.alpha / (mu3 * mu3), 0.0, 1.0);
      w = std::sqrt(theta) * u1 + std::sqrt(1 - theta) * v;
    }
    sol.w = w.normalized();
    sol.theta = theta;
    sol.degenerate = true;
    sol.reduced = {std::abs(inst.h2.dot(u1)), 0.0, mu3, std::min(inst.alpha, mu3 * mu3)};
    sol.objective = (1 + std::norm(inst.h2.dot(sol.w))) / (1 + std::norm(inst.h1.dot(sol.w)));
    return sol;
  }
  const Complex c1 = inst.h2.dot(basis.u1);  // h2^H u1
  const Complex c2 = inst.h2.dot(basis.u2);
  sol.reduced = {std::abs(c1), std::abs(c2), mu3, std::min(inst.alpha, mu3 * mu3)};
  sol.theta = one_dim_maximize(sol.reduced);
  const Complex ph1 = std::abs(c1) > 0 ? std::conj(c1) / std::abs(c1) : Complex(1, 0);
  const Complex ph2 = std::abs(c2) > 0 ? std::conj(c2) / std::abs(c2) : Complex(1, 0);
  sol.w = std::sqrt(sol.theta) * ph1 * basis.u1 +
          std::sqrt(1 - sol.theta) * ph2 * basis.u2;
  sol.w.normalize();
  sol.objective = (1 + std::norm(inst.h2.dot(sol.w))) / (1 + std::norm(inst.h1.dot(sol.w)));
  return sol;
}

/// No-AN design with full power on the closed-form beamformer.
inline Design closed_form_design(const ScenarioConfig& cfg, const ChannelSet& ch,
                                 ClosedFormSolution* detail = nullptr) {
  const ClosedFormSolution sol = closed_form_beamformer(build_srm_instance(cfg, ch));
  if (detail) *detail = sol;
  Design d;
  d.w = sol.w;
  d.p1 = cfg.P;
  d.p2 = 0;
  return fill_rates(cfg, ch, d);
}

}  // namespace dfrc
