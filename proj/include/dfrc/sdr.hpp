#pragma once

// Semidefinite relaxation of the no-AN secrecy problem. With
// A = I + h2 h2^H, B = I + h1 h1^H, C = h1 h1^H - alpha I the relaxation
// max Tr(A W)/Tr(B W) s.t. Tr(C W) >= 0, Tr(W) = 1 is homogenized with
// X = kappa W:
//
//   maximize Tr(A X)  s.t.  Tr(B X) = 1,  Tr(h1 h1^H X) >= alpha kappa,
//                           Tr(X) = kappa,  X PSD,  kappa >= 0.

#include <cmath>
#include <cstdint>

#include "dfrc/closed_form.hpp"
#include "dfrc/conic.hpp"
#include "dfrc/sampling.hpp"

namespace dfrc {

struct SrmSdp {
  ConicProgram program;
  BlockRef X;
  ScalarRef kappa;
};

inline SrmSdp build_srm_sdp(const SrmInstance& inst) {
  const auto n = inst.h1.size();
  if (inst.h2.size() != n || n == 0) throw InvalidInput("build_srm_sdp: bad channel sizes");
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  const MatrixXcd H1 = inst.h1 * inst.h1.adjoint();
  const MatrixXcd H2 = inst.h2 * inst.h2.adjoint();
  SrmSdp s;
  s.X = s.program.add_psd_block("X", static_cast<int>(n));
  s.kappa = s.program.add_nonneg("kappa");

  LinearForm obj;
  obj.add(s.X, MatrixXcd(I + H2));
  s.program.maximize(obj);

  LinearForm norm;
  norm.add(s.X, MatrixXcd(I + H1));
  s.program.add_constraint(norm, Sense::Eq, 1.0);

  LinearForm est;
  est.add(s.X, H1).add(s.kappa, -inst.alpha);
  s.program.add_constraint(est, Sense::Ge, 0.0);

  LinearForm trace;
  trace.add(s.X, I).add(s.kappa, -1.0);
  s.program.add_constraint(trace, Sense::Eq, 0.0);
  return s;
}

struct SdrOptions {
  double tol = 1e-9;
  double rank_one_threshold = 1e-6;
  int n_rand = 200;
  std::uint64_t seed = 1;
};

struct SdrResult {
  MatrixXcd W;  // X / kappa, unit trace
  double kappa = 0;
  double objective = 0;  // relaxation optimum
  double rank_ratio = 0;
  VectorXcd extracted_w;
  double extracted_objective = 0;
  bool rank_one = false;
  int iterations = 0;
};

namespace internal {

inline double srm_objective(const SrmInstance& inst, const VectorXcd& w) {
  return (1 + std::norm(inst.h2.dot(w))) / (1 + std::norm(inst.h1.dot(w)));
}

/// Moves w towards the radar direction until |h1^H w|^2 >= alpha. Used only
/// to absorb solver-tolerance violations of the extracted eigenvector.
inline VectorXcd repair_estimation(const SrmInstance& inst, VectorXcd w) {
  if (std::norm(inst.h1.dot(w)) >= inst.alpha) return w;
  const VectorXcd u1 = inst.h1.normalized();
  const Complex c = u1.dot(w);
  const VectorXcd target = u1 * (std::abs(c) > 0 ? c / std::abs(c) : Complex(1, 0));
  double lo = 0, hi = 1;
  for (int i = 0; i < 60; ++i) {
    const double t = 0.5 * (lo + hi);
    const VectorXcd v = ((1 - t) * w + t * target).normalized();
    if (std::norm(inst.h1.dot(v)) >= inst.alpha) {
      hi = t;
    } else {
      lo = t;
    }
  }
  return ((1 - hi) * w + hi * target).normalized();
}

}  // namespace internal

/// Solves the relaxation and extracts a beamformer: the principal
/// eigenvector when lambda2/lambda1 < rank_one_threshold, Gaussian
/// randomization otherwise. A vanishing kappa triggers one retry at a
/// tighter tolerance, then SolverFailure.
inline SdrResult solve_srm_sdr(const SrmInstance& inst, const SdrOptions& opt = {}) {
  const double mu3_sq = inst.h1.squaredNorm();
  if (inst.alpha > mu3_sq * (1 + 1e-12)) {
    throw Infeasible("solve_srm_sdr: estimation-rate threshold exceeds ||h1||^2");
  }
  const SrmSdp sdp = build_srm_sdp(inst);
  ConicSolution sol;
  double tol = opt.tol;
  for (int attempt = 0; attempt < 2; ++attempt, tol *= 1e-2) {
    SolveOptions so;
    so.tol = tol;
    sol = solve(sdp.program, so);
    if (sol.status == SolveStatus::Infeasible) throw Infeasible("solve_srm_sdr: relaxation infeasible");
    if (sol.solved() && sol.scalar(sdp.kappa) > 1e-12) break;
  }
  if (!sol.solved()) {
    throw SolverFailure(std::string("solve_srm_sdr: conic solver returned ") + to_string(sol.status));
  }
  const double kappa = sol.scalar(sdp.kappa);
  if (!(kappa > 1e-12)) throw SolverFailure("solve_srm_sdr: kappa vanished");

  SdrResult r;
  r.kappa = kappa;
  r.W = sol.block(sdp.X) / kappa;
  r.W = 0.5 * (r.W + r.W.adjoint());
  r.objective = sol.objective;
  r.rank_ratio = rank_ratio(r.W);
  r.iterations = sol.iterations;
  r.rank_one = r.rank_ratio < opt.rank_one_threshold;
  if (r.rank_one) {
    r.extracted_w = internal::repair_estimation(inst, principal_eigenvector(r.W));
  } else {
    const auto res = gaussian_randomization(
        r.W, opt.n_rand, opt.seed,
        [&](const VectorXcd& w) { return std::norm(inst.h1.dot(w)) >= inst.alpha * (1 - 1e-9); },
        [&](const VectorXcd& w) { return internal::srm_objective(inst, w); });
    if (res.feasible_samples == 0) {
      throw RecoveryFailure("solve_srm_sdr: no feasible randomized sample", r.objective);
    }
    r.extracted_w = internal::repair_estimation(inst, res.w);
  }
  r.extracted_objective = internal::srm_objective(inst, r.extracted_w);
  return r;
}

/// No-AN design from the relaxation, full power on the extracted beamformer.
inline Design sdr_design(const ScenarioConfig& cfg, const ChannelSet& ch,
                         SdrResult* detail = nullptr, const SdrOptions& opt = {}) {
  const SdrResult r = solve_srm_sdr(build_srm_instance(cfg, ch), opt);
  if (detail) *detail = r;
  Design d;
  d.w = r.extracted_w;
  d.p1 = cfg.P;
  d.p2 = 0;
  return fill_rates(cfg, ch, d);
}

}  // namespace dfrc
