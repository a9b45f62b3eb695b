#pragma once

// Distributionally robust AN-aided design under a random phase error on the
// target channel, h(theta1) = h(theta1_bar) .* exp(j dtheta) with only the
// mean and covariance of dtheta known.
//
// Quadratic forms h^H X h are replaced by their second-order expansion in
// dtheta; each chance constraint is then enforced through the worst-case
// CVaR over all distributions with the given moments, which is an LMI in
// (Q, nu). For fixed eta the resulting problem is an SDP; eta is searched on
// a grid refined by golden-section search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "dfrc/an_design.hpp"
#include "dfrc/conic.hpp"
#include "dfrc/parallel.hpp"
#include "dfrc/sampling.hpp"

namespace dfrc {

struct MomentModel {
  VectorXd mu_bar;
  MatrixXd Sigma;
  double eps_sec = 0.01;
  double eps_est = 0.01;

  /// mu_bar = 0, Sigma = sigma_rad^2 I.
  static MomentModel isotropic(int N, double sigma_rad, double eps_sec = 0.01,
                               double eps_est = 0.01) {
    MomentModel m;
    m.mu_bar = VectorXd::Zero(N);
    m.Sigma = sigma_rad * sigma_rad * MatrixXd::Identity(N, N);
    m.eps_sec = eps_sec;
    m.eps_est = eps_est;
    return m;
  }

  int N() const { return static_cast<int>(mu_bar.size()); }

  void validate() const {
    const auto n = mu_bar.size();
    if (n < 1) throw InvalidInput("moments.mu: must be nonempty");
    if (Sigma.rows() != n || Sigma.cols() != n) throw InvalidInput("moments.sigma: shape mismatch");
    if (!mu_bar.allFinite() || !Sigma.allFinite()) throw InvalidInput("moments: non-finite entry");
    if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Sigma.norm())) {
      throw InvalidInput("moments.sigma: must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Sigma.norm())) {
      throw InvalidInput("moments.sigma: must be PSD");
    }
    if (!(eps_sec > 0 && eps_sec < 0.5)) throw InvalidInput("moments.eps_sec: must lie in (0, 0.5)");
    if (!(eps_est > 0 && eps_est < 0.5)) throw InvalidInput("moments.eps_est: must lie in (0, 0.5)");
  }

  /// [[Sigma + mu mu^T, mu], [mu^T, 1]].
  MatrixXd Omega() const {
    const auto n = mu_bar.size();
    MatrixXd O(n + 1, n + 1);
    O.topLeftCorner(n, n) = Sigma + mu_bar * mu_bar.transpose();
    O.topRightCorner(n, 1) = mu_bar;
    O.bottomLeftCorner(1, n) = mu_bar.transpose();
    O(n, n) = 1;
    return O;
  }
};

/// X .* (h h^H)^T, so that (e^{j t})^H M(X) e^{j t} = (h .* e^{j t})^H X (h .* e^{j t}).
inline MatrixXcd map_M(const MatrixXcd& X, const VectorXcd& h_bar) {
  if (X.rows() != h_bar.size() || X.cols() != h_bar.size()) throw InvalidInput("map_M: size mismatch");
  return X.cwiseProduct((h_bar.conjugate() * h_bar.transpose()));
}

/// Off-diagonal entries unchanged; [L(A)]_kk = A_kk - sum_j A_kj.
inline MatrixXd map_L(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw InvalidInput("map_L: matrix must be square");
  MatrixXd R = A;
  const VectorXd rows = A.rowwise().sum();
  for (Eigen::Index k = 0; k < A.rows(); ++k) R(k, k) -= rows(k);
  return R;
}

/// [F(B)]_k = 2 sum_j B_kj.
inline VectorXd map_F(const MatrixXd& B) {
  if (B.rows() != B.cols()) throw InvalidInput("map_F: matrix must be square");
  return 2.0 * B.rowwise().sum();
}

/// Second-order model t^T Q t + 2 q^T t + c of (h_bar .* e^{jt})^H X (...) - threshold.
struct TaylorizedQuadratic {
  MatrixXd Q_mat;
  VectorXd q_vec;
  double q_const = 0;

  double operator()(const VectorXd& t) const {
    return t.dot(Q_mat * t) + 2 * q_vec.dot(t) + q_const;
  }
};

inline TaylorizedQuadratic taylorize(const MatrixXcd& X, const VectorXcd& h_bar,
                                     double threshold = 0) {
  const MatrixXcd M = map_M(X, h_bar);
  TaylorizedQuadratic t;
  t.Q_mat = map_L(M.real());
  t.Q_mat = 0.5 * (t.Q_mat + t.Q_mat.transpose());
  t.q_vec = map_F(M.imag()) / 2;
  t.q_const = M.sum().real() - threshold;
  return t;
}

/// G(X, x) = [[L(Re M(X)), F(Im M(X))/2], [., x]].
inline MatrixXd g_matrix(const MatrixXcd& X, double x, const VectorXcd& h_bar) {
  const TaylorizedQuadratic t = taylorize(X, h_bar);
  const auto n = h_bar.size();
  MatrixXd G(n + 1, n + 1);
  G.topLeftCorner(n, n) = t.Q_mat;
  G.topRightCorner(n, 1) = t.q_vec;
  G.bottomLeftCorner(1, n) = t.q_vec.transpose();
  G(n, n) = x;
  return G;
}

/// Hermitian E_ij (upper triangle of the (N+1) x (N+1) G block, row-major,
/// corner excluded since it carries the scalar argument) with
/// G(X, 0)_ij = Tr(E_ij X).
inline std::vector<MatrixXcd> g_coefficients(const VectorXcd& h_bar) {
  const int n = static_cast<int>(h_bar.size());
  const int m = n + 1;
  const int count = m * (m + 1) / 2;
  return functional_matrices(n, Field::Complex, count, [&](const MatrixXcd& X) {
    const MatrixXd G = g_matrix(X, 0.0, h_bar);
    VectorXd v(count);
    int k = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) v(k++) = G(i, j);
    }
    return v;
  });
}

inline MatrixXd sym_unit(int n, int i, int j) {
  MatrixXd E = MatrixXd::Zero(n, n);
  if (i == j) {
    E(i, i) = 1;
  } else {
    E(i, j) = E(j, i) = 0.5;
  }
  return E;
}

struct CvarRefs {
  BlockRef Q;
  ScalarRef nu;
};

namespace internal {

/// Coordinates x = U z + mu on the range of Sigma, where Omega carries
/// mean mu and covariance Sigma. Every distribution with these moments is
/// supported on that affine set, so a quadratic [x; 1]^T F [x; 1] equals
/// [z; 1]^T (T^T F T) [z; 1] with T = [[U, mu], [0, 1]], and z has mean 0
/// and covariance diag(lambda). `full` is set when Sigma is nonsingular and
/// no change of coordinates is needed.
struct MomentReduction {
  MatrixXd T;
  MatrixXd Omega;
  bool full = true;
};

inline MomentReduction reduce_moments(const MatrixXd& Omega) {
  const int n = static_cast<int>(Omega.rows()) - 1;
  const VectorXd mu = Omega.topRightCorner(n, 1);
  const MatrixXd Sigma = Omega.topLeftCorner(n, n) - mu * mu.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (Sigma + Sigma.transpose()));
  const VectorXd ev = es.eigenvalues();
  const double top = n > 0 ? ev(n - 1) : 0.0;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (top > 0 && ev(i) > 1e-12 * top) keep.push_back(i);
  }
  MomentReduction r;
  const int k = static_cast<int>(keep.size());
  r.full = k == n;
  if (r.full) {
    r.T = MatrixXd::Identity(n + 1, n + 1);
    r.Omega = Omega;
    return r;
  }
  r.T = MatrixXd::Zero(n + 1, k + 1);
  r.Omega = MatrixXd::Zero(k + 1, k + 1);
  for (int j = 0; j < k; ++j) {
    r.T.col(j).head(n) = es.eigenvectors().col(keep[static_cast<size_t>(j)]);
    r.Omega(j, j) = ev(keep[static_cast<size_t>(j)]);
  }
  r.T.col(k).head(n) = mu;
  r.T(n, k) = 1;
  r.Omega(k, k) = 1;
  return r;
}

/// T^T F T for a symmetric affine matrix F.
inline AffineMatrix congruence(const AffineMatrix& F, const MatrixXd& T) {
  const int m = F.size();
  const int k = static_cast<int>(T.cols());
  AffineMatrix R(k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      LinearForm& e = R.at(i, j);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const double coef = T(a, i) * T(b, j);
          if (coef != 0) e.add(F.at(std::min(a, b), std::max(a, b)), coef);
        }
      }
    }
  }
  return R;
}

/// Q PSD and Q - F + nu e e^T PSD, with F and Omega already reduced.
inline CvarRefs add_cvar_variables(ConicProgram& prog, const AffineMatrix& F, const std::string& name) {
  const int m = F.size();
  CvarRefs r;
  r.Q = prog.add_psd_block(name + ".Q", m, Field::Real);
  r.nu = prog.add_free(name + ".nu");
  AffineMatrix slack(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      LinearForm& e = slack.at(i, j);
      e.add(r.Q, sym_unit(m, i, j));
      e.add(F.at(i, j), -1.0);
      if (i == m - 1 && j == m - 1) e.add(r.nu, 1.0);
    }
  }
  prog.add_lmi(slack, name + ".slack");
  return r;
}

}  // namespace internal

/// Adds (Q, nu) with Q PSD, Q - F + nu e e^T PSD (e the last unit vector)
/// and nu + Tr(Omega Q)/eps <= 0, where F = [[A, b], [b^T, c]] is affine in
/// the program variables. Feasible iff the worst-case CVaR of
/// x^T A x + 2 b^T x + c at level eps over the moment set is <= 0. A
/// singular covariance is handled on its range, so Q may be smaller than F.
inline CvarRefs add_cvar_block(ConicProgram& prog, const AffineMatrix& F, const MatrixXd& Omega,
                               double eps, const std::string& name) {
  if (!(eps > 0 && eps < 1)) throw InvalidInput("add_cvar_block: eps must lie in (0, 1)");
  const int m = F.size();
  if (Omega.rows() != m || Omega.cols() != m) throw InvalidInput("add_cvar_block: Omega size mismatch");
  const internal::MomentReduction red = internal::reduce_moments(Omega);
  const CvarRefs r = internal::add_cvar_variables(prog, red.full ? F : internal::congruence(F, red.T), name);
  LinearForm cvar;
  cvar.add(r.nu, 1.0).add(r.Q, MatrixXd(red.Omega / eps));
  prog.add_constraint(cvar, Sense::Le, 0.0);
  return r;
}

/// Constant-data version: min nu + Tr(Omega Q)/eps s.t. Q PSD,
/// Q >= [[A, b], [b^T, c - nu]]. Returns the worst-case CVaR of f. The data
/// are normalized before solving; a solve that stalls short of `tol` is
/// retried at up to 100x looser tolerance.
inline double worst_case_cvar(const MatrixXd& A, const VectorXd& b, double c, const MatrixXd& Omega,
                              double eps, double tol = 1e-9) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != n) throw InvalidInput("worst_case_cvar: shape mismatch");
  if (Omega.rows() != n + 1 || Omega.cols() != n + 1) throw InvalidInput("worst_case_cvar: Omega size mismatch");
  if (!(eps > 0 && eps < 1)) throw InvalidInput("worst_case_cvar: eps must lie in (0, 1)");
  double scale = std::abs(c);
  if (n > 0) scale = std::max({scale, A.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  if (!(scale > 0)) return 0;
  AffineMatrix F(n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) F.at(i, j).add_constant(A(i, j) / scale);
    F.at(i, n).add_constant(b(i) / scale);
  }
  F.at(n, n).add_constant(c / scale);
  const internal::MomentReduction red = internal::reduce_moments(Omega);
  ConicProgram prog;
  const CvarRefs r = internal::add_cvar_variables(prog, red.full ? F : internal::congruence(F, red.T), "cvar");
  LinearForm obj;
  obj.add(r.nu, -1.0).add(r.Q, MatrixXd(-red.Omega / eps));
  prog.maximize(obj);
  ConicSolution sol;
  for (double t = tol; t <= 100 * tol * (1 + 1e-9); t *= 10) {
    SolveOptions so;
    so.tol = t;
    sol = solve(prog, so);
    if (sol.solved() || sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::Unbounded) break;
  }
  if (!sol.solved()) {
    throw SolverFailure(std::string("worst_case_cvar: conic solver returned ") + to_string(sol.status));
  }
  return -sol.objective * scale;
}

/// Problem data and variable handles of the fixed-eta robust SDP. Variables
/// are normalized: What = sigma^2 W~ / P, Phihat likewise, kap = sigma^2 kappa,
/// so the recovered design is W = P What / kap, Phi = P Phihat / kap.
struct DrbSdp {
  ConicProgram program;
  BlockRef W, Phi;
  CvarRefs sec, est;
  ScalarRef kappa;
  double eta = 0;
  double rho1 = 0;  // P beta1^2 / sigma^2
  double rho2 = 0;  // P beta2^2 / sigma^2
  double eta_max = 0;
};

inline double drb_eta_max(const ScenarioConfig& cfg, const ChannelSet& ch) {
  return cfg.N * ch.beta1_sq * cfg.P / ch.sigma2;
}

inline DrbSdp build_drb_sdp(const ScenarioConfig& cfg, const ChannelSet& ch, const MomentModel& model,
                            double eta, const std::vector<MatrixXcd>* g_coef = nullptr) {
  model.validate();
  const int N = cfg.N;
  if (model.N() != N) throw InvalidInput("build_drb_sdp: moment model size differs from N");
  DrbSdp s;
  s.eta = eta;
  s.rho1 = cfg.P * ch.beta1_sq / ch.sigma2;
  s.rho2 = cfg.P * ch.beta2_sq / ch.sigma2;
  s.eta_max = drb_eta_max(cfg, ch);
  if (!(eta >= 0) || eta > s.eta_max * (1 + 1e-12)) {
    throw InvalidInput("build_drb_sdp: eta outside [0, N beta1^2 P / sigma^2]");
  }
  const VectorXcd& h = ch.a1;
  const std::vector<MatrixXcd> local = g_coef ? std::vector<MatrixXcd>{} : g_coefficients(h);
  const std::vector<MatrixXcd>& E = g_coef ? *g_coef : local;

  auto& prog = s.program;
  s.W = prog.add_psd_block("W", N);
  s.Phi = prog.add_psd_block("Phi", N);
  s.kappa = prog.add_nonneg("kappa");

  const MatrixXcd A2 = ch.a2 * ch.a2.adjoint();
  const MatrixXcd H = h * h.adjoint();
  const MatrixXcd I = MatrixXcd::Identity(N, N);

  LinearForm obj;
  obj.add(s.kappa, 1.0).add(s.W, MatrixXcd(s.rho2 * A2)).add(s.Phi, MatrixXcd(s.rho2 * A2));
  prog.maximize(obj);

  LinearForm norm;
  norm.add(s.kappa, 1.0).add(s.Phi, MatrixXcd(s.rho2 * A2));
  prog.add_constraint(norm, Sense::Eq, 1.0 / (1.0 + eta));

  LinearForm power;
  power.add(s.W, I).add(s.Phi, I).add(s.kappa, -1.0);
  prog.add_constraint(power, Sense::Le, 0.0);

  const int m = N + 1;
  const MatrixXd Omega = model.Omega();
  const double zeta_n = zeta_bar(cfg, ch) / cfg.P;

  // Secrecy: G(W - eta Phi, c1) with c1 = h^H (W - eta Phi) h - eta kap / rho1.
  AffineMatrix Fs(m), Fe(m);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j, ++k) {
      if (i == m - 1 && j == m - 1) continue;
      const MatrixXcd& Ek = E[static_cast<size_t>(k)];
      Fs.at(i, j).add(s.W, Ek).add(s.Phi, MatrixXcd(-eta * Ek));
      // Estimation: -G(W + Phi, c2) with c2 = h^H (W + Phi) h - kap zeta_bar / P.
      Fe.at(i, j).add(s.W, MatrixXcd(-Ek)).add(s.Phi, MatrixXcd(-Ek));
    }
  }
  Fs.at(m - 1, m - 1).add(s.W, H).add(s.Phi, MatrixXcd(-eta * H)).add(s.kappa, -eta / s.rho1);
  Fe.at(m - 1, m - 1).add(s.W, MatrixXcd(-H)).add(s.Phi, MatrixXcd(-H)).add(s.kappa, zeta_n);
  s.sec = add_cvar_block(prog, Fs, Omega, model.eps_sec, "sec");
  s.est = add_cvar_block(prog, Fe, Omega, model.eps_est, "est");
  return s;
}

struct DrbOptions {
  double bisect_tol = 1e-3;  // relative width of the final eta bracket
  int grid_points = 32;
  int n_rand = 200;
  std::uint64_t seed = 1;
  double solver_tol = 1e-8;
  double rank_one_threshold = 1e-6;
  double certificate_tol = 1e-6;  // allowed CVaR violation relative to N P
};

struct DrbEvaluation {
  double eta = 0;
  SolveStatus status = SolveStatus::MaxIter;
  double value = -std::numeric_limits<double>::infinity();  // (1+SINR_cu)/(1+eta)
};

struct DrbResult {
  Design design;
  double eta_star = 0;
  double robust_secrecy_rate = 0;
  double relaxation_value = 0;
  double rank_ratio = 0;
  bool rank_one = true;
  MatrixXcd W;    // recovered information covariance, Tr(W) = p1
  MatrixXcd Phi;  // recovered AN covariance, Tr(Phi) = p2
  std::vector<DrbEvaluation> evaluations;
};

/// Worst-case CVaR of the two robust constraints for a fixed design (W with
/// power, Phi with power). Both <= 0 means the design is certified at eta.
struct DrbCertificate {
  double secrecy = 0;
  double estimation = 0;
};

inline DrbCertificate drb_certificate(const ScenarioConfig& cfg, const ChannelSet& ch,
                                      const MomentModel& model, const MatrixXcd& W,
                                      const MatrixXcd& Phi, double eta) {
  const MatrixXd Omega = model.Omega();
  const TaylorizedQuadratic ts = taylorize(W - eta * Phi, ch.a1, eta * ch.sigma2 / ch.beta1_sq);
  const TaylorizedQuadratic te = taylorize(W + Phi, ch.a1, zeta_bar(cfg, ch));
  DrbCertificate c;
  c.secrecy = worst_case_cvar(ts.Q_mat, ts.q_vec, ts.q_const, Omega, model.eps_sec);
  c.estimation = worst_case_cvar(-te.Q_mat, -te.q_vec, -te.q_const, Omega, model.eps_est);
  return c;
}

/// Design from relaxed covariances (W, Phi carrying power). Rank-one W
/// (lambda2/lambda1 < threshold) gives w as the principal eigenvector;
/// otherwise Gaussian randomization keeps the best sample that passes
/// `feasible` (by default: the nominal estimation-rate constraint). Powers are
/// p1 = Tr(W), p2 = Tr(Phi).
template <class Feasible>
Design recover_design(const MatrixXcd& W, const MatrixXcd& Phi, const ScenarioConfig& cfg,
                      const ChannelSet& ch, int n_rand, std::uint64_t seed, Feasible&& feasible,
                      double rank_one_threshold = 1e-6) {
  Design d;
  d.p1 = std::max(0.0, W.trace().real());
  d.p2 = std::max(0.0, Phi.trace().real());
  if (d.p2 > 1e-12 * cfg.P) d.phi = MatrixXcd(0.5 * (Phi + Phi.adjoint()) / d.p2);
  if (!(d.p1 > 0)) throw RecoveryFailure("recover_design: W is zero", 0.0);
  const MatrixXcd Wn = W / d.p1;
  const double phi_cu = d.phi ? internal::quad_form(*d.phi, ch.a2) : 0.0;
  const double phi_eve = d.phi ? internal::quad_form(*d.phi, ch.a1) : 0.0;
  const double relax =
      (1 + d.p1 * ch.beta2_sq * internal::quad_form(Wn, ch.a2) / (ch.sigma2 + d.p2 * ch.beta2_sq * phi_cu)) /
      (1 + d.p1 * ch.beta1_sq * internal::quad_form(Wn, ch.a1) / (ch.sigma2 + d.p2 * ch.beta1_sq * phi_eve));
  if (rank_ratio(Wn) < rank_one_threshold) {
    d.w = principal_eigenvector(Wn);
  } else {
    const auto res = gaussian_randomization(
        Wn, n_rand, seed, [&](const VectorXcd& w) { return feasible(w, d.p1, d.p2, d.phi); },
        [&](const VectorXcd& w) { return secrecy_ratio(ch, w, d.p1, d.p2, d.phi); });
    if (res.feasible_samples == 0) {
      throw RecoveryFailure("recover_design: no feasible randomized sample", relax);
    }
    d.w = res.w;
  }
  return fill_rates(cfg, ch, d);
}

inline Design recover_design(const MatrixXcd& W, const MatrixXcd& Phi, const ScenarioConfig& cfg,
                             const ChannelSet& ch, int n_rand, std::uint64_t seed = 1) {
  return recover_design(W, Phi, cfg, ch, n_rand, seed,
                        [&](const VectorXcd& w, double p1, double p2, const std::optional<MatrixXcd>& phi) {
                          return estimation_rate(cfg, ch, w, p1, p2, phi) >= cfg.zeta * (1 - 1e-9);
                        });
}

namespace internal {

struct DrbPoint {
  DrbEvaluation eval;
  MatrixXcd W, Phi;  // with power
};

inline DrbPoint drb_point(const ScenarioConfig& cfg, const ChannelSet& ch, const MomentModel& model,
                          double eta, const std::vector<MatrixXcd>& g_coef, double tol) {
  const DrbSdp sdp = build_drb_sdp(cfg, ch, model, eta, &g_coef);
  SolveOptions so;
  so.tol = tol;
  const ConicSolution sol = solve(sdp.program, so);
  DrbPoint p;
  p.eval.eta = eta;
  p.eval.status = sol.status;
  if (sol.solved()) {
    const double kap = sol.scalar(sdp.kappa);
    if (kap > 1e-14) {
      p.eval.value = sol.objective;
      p.W = cfg.P * sol.block(sdp.W) / kap;
      p.Phi = cfg.P * sol.block(sdp.Phi) / kap;
      p.W = 0.5 * (p.W + p.W.adjoint());
      p.Phi = 0.5 * (p.Phi + p.Phi.adjoint());
    } else {
      p.eval.status = SolveStatus::NumericalFailure;
    }
  }
  return p;
}

}  // namespace internal

/// Maximizes the relaxed value (1+SINR_cu)/(1+eta) over eta in
/// [0, N beta1^2 P / sigma^2]: a grid of {0} plus geometric points, then
/// golden-section refinement around the best grid point until the bracket
/// is narrower than bisect_tol relative to its upper end. Per-eta SDPs of the
/// grid are solved concurrently.
inline DrbResult drb_solve(const ScenarioConfig& cfg, const ChannelSet& ch, const MomentModel& model,
                           const DrbOptions& opt = {}) {
  model.validate();
  if (model.N() != cfg.N) throw InvalidInput("drb_solve: moment model size differs from N");
  if (zeta_bar(cfg, ch) > cfg.N * cfg.P * (1 + 1e-12)) {
    throw Infeasible("drb_solve: estimation-rate threshold exceeds what N*P can illuminate");
  }
  if (opt.grid_points < 3) throw InvalidInput("drb.grid_points: must be >= 3");
  if (!(opt.bisect_tol > 0)) throw InvalidInput("drb.bisect_tol: must be > 0");
  const double eta_max = drb_eta_max(cfg, ch);
  const std::vector<MatrixXcd> g_coef = g_coefficients(ch.a1);

  std::vector<double> grid{0.0};
  const int n_geo = opt.grid_points - 1;
  const double lo = eta_max * 1e-6;
  for (int i = 0; i < n_geo; ++i) {
    grid.push_back(lo * std::pow(eta_max / lo, static_cast<double>(i) / (n_geo - 1)));
  }
  grid.back() = eta_max;

  std::vector<internal::DrbPoint> pts(grid.size());
  parallel_for(grid.size(), [&](size_t i) {
    pts[i] = internal::drb_point(cfg, ch, model, grid[i], g_coef, opt.solver_tol);
  });

  DrbResult res;
  size_t best = pts.size();
  for (size_t i = 0; i < pts.size(); ++i) {
    res.evaluations.push_back(pts[i].eval);
    if (pts[i].eval.status != SolveStatus::Solved) continue;
    if (best == pts.size() || pts[i].eval.value > pts[best].eval.value) best = i;
  }
  if (best == pts.size()) {
    bool any_failure = false;
    double bad_eta = 0;
    for (const auto& p : pts) {
      if (p.eval.status != SolveStatus::Infeasible) {
        any_failure = true;
        bad_eta = p.eval.eta;
        break;
      }
    }
    if (any_failure) {
      throw SolverFailure("drb_solve: conic solver failed at eta = " + std::to_string(bad_eta));
    }
    throw Infeasible("drb_solve: robust problem infeasible for every eta");
  }

  internal::DrbPoint best_pt = pts[best];
  double a = best > 0 ? grid[best - 1] : grid[best];
  double b = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  auto eval = [&](double eta) {
    internal::DrbPoint p = internal::drb_point(cfg, ch, model, eta, g_coef, opt.solver_tol);
    res.evaluations.push_back(p.eval);
    if (p.eval.status == SolveStatus::Solved && p.eval.value > best_pt.eval.value) best_pt = p;
    return p.eval.status == SolveStatus::Solved ? p.eval.value
                                                : -std::numeric_limits<double>::infinity();
  };
  const double invphi = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > opt.bisect_tol * std::max(b, 1e-12)) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval(x2);
    }
  }

  res.eta_star = best_pt.eval.eta;
  res.relaxation_value = best_pt.eval.value;
  res.W = best_pt.W;
  res.Phi = best_pt.Phi;
  res.rank_ratio = rank_ratio(res.W);
  res.rank_one = res.rank_ratio < opt.rank_one_threshold;
  const double eta = res.eta_star;
  const double cert_tol = opt.certificate_tol * cfg.N * cfg.P;
  res.design = recover_design(
      res.W, res.Phi, cfg, ch, opt.n_rand, opt.seed,
      [&](const VectorXcd& w, double p1, double p2, const std::optional<MatrixXcd>& phi) {
        const MatrixXcd Wr = p1 * w * w.adjoint();
        const MatrixXcd Pr = phi ? MatrixXcd(p2 * *phi) : MatrixXcd::Zero(cfg.N, cfg.N);
        try {
          const DrbCertificate c = drb_certificate(cfg, ch, model, Wr, Pr, eta);
          return c.secrecy <= cert_tol && c.estimation <= cert_tol;
        } catch (const SolverFailure&) {
          return false;
        }
      },
      opt.rank_one_threshold);
  const Sinrs s = sinrs(ch, res.design.w, res.design.p1, res.design.p2, res.design.phi);
  res.robust_secrecy_rate =
      std::max(0.0, cfg.B * (internal::log2_1p(s.cu) - internal::log2_1p(eta)));
  return res;
}

/// Non-robust baseline for the phase-error experiments: the AO design for
/// the estimated angle, ignoring the error.
inline Design non_robust_design(const ScenarioConfig& cfg, const ChannelSet& ch, const AoOptions& opt = {}) {
  return ao_solve(cfg, ch, opt).design;
}

}  // namespace dfrc
