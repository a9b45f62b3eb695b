#pragma once

// Small dense semidefinite programming solver.
//
// Programs are written against Hermitian (or real symmetric) PSD block
// variables, nonnegative and free scalars, and real linear constraints of the
// form Re Tr(A X) + c^T s {=, <=, >=} rhs. Internally each complex block is
// mapped to a real 2n x 2n PSD block and the program is solved in standard
// form with an infeasible-start primal-dual interior-point method (HKM
// direction, Mehrotra predictor-corrector).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/errors.hpp"

namespace dfrc {

using ConicComplex = std::complex<double>;

enum class Field { Real, Complex };

struct BlockRef {
  int id = -1;
};

struct ScalarRef {
  int id = -1;
};

/// Real affine functional Re Tr(A_1 X_1) + ... + c_1 s_1 + ... + constant.
class LinearForm {
 public:
  LinearForm() = default;
  explicit LinearForm(double constant) : constant_(constant) {}

  LinearForm& add(BlockRef b, const Eigen::MatrixXcd& coef) {
    blocks_.emplace_back(b.id, coef);
    return *this;
  }
  LinearForm& add(BlockRef b, const Eigen::MatrixXd& coef) {
    blocks_.emplace_back(b.id, coef.cast<ConicComplex>());
    return *this;
  }
  LinearForm& add(ScalarRef s, double coef) {
    scalars_.emplace_back(s.id, coef);
    return *this;
  }
  LinearForm& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  /// Appends every term of `other` scaled by `scale`.
  LinearForm& add(const LinearForm& other, double scale = 1.0) {
    for (const auto& [id, m] : other.blocks_) blocks_.emplace_back(id, scale * m);
    for (const auto& [id, c] : other.scalars_) scalars_.emplace_back(id, scale * c);
    constant_ += scale * other.constant_;
    return *this;
  }

  const std::vector<std::pair<int, Eigen::MatrixXcd>>& block_terms() const { return blocks_; }
  const std::vector<std::pair<int, double>>& scalar_terms() const { return scalars_; }
  double constant() const { return constant_; }

 private:
  std::vector<std::pair<int, Eigen::MatrixXcd>> blocks_;
  std::vector<std::pair<int, double>> scalars_;
  double constant_ = 0;
};

/// Symmetric n x n matrix whose entries are affine forms; only the upper
/// triangle is stored.
class AffineMatrix {
 public:
  explicit AffineMatrix(int n) : n_(n), entries_(static_cast<size_t>(n * (n + 1) / 2)) {}

  int size() const { return n_; }
  LinearForm& at(int i, int j) {
    if (i > j) std::swap(i, j);
    return entries_[index(i, j)];
  }
  const LinearForm& at(int i, int j) const {
    if (i > j) std::swap(i, j);
    return entries_[index(i, j)];
  }

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
  }
  int n_;
  std::vector<LinearForm> entries_;
};

enum class Sense { Eq, Le, Ge };

/// Real 2n x 2n symmetric matrix [[Re H, -Im H], [Im H, Re H]]. Throws
/// InvalidInput when H is not Hermitian to 1e-12 (relative to its norm).
inline Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& H) {
  if (H.rows() != H.cols()) throw InvalidInput("hermitian_embed: matrix must be square");
  const double tol = 1e-12 * std::max(1.0, H.norm());
  if ((H - H.adjoint()).norm() > tol) throw InvalidInput("hermitian_embed: matrix is not Hermitian");
  const int n = static_cast<int>(H.rows());
  Eigen::MatrixXd E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  E.bottomRightCorner(n, n) = H.real();
  return E;
}

/// Hermitian matrices E_k with Tr(E_k X) = f(X)_k for every Hermitian X
/// (real symmetric E_k for Field::Real), obtained by probing the real-linear
/// map f : Hermitian n x n -> R^count on a basis.
inline std::vector<Eigen::MatrixXcd> functional_matrices(
    int n, Field field, int count,
    const std::function<Eigen::VectorXd(const Eigen::MatrixXcd&)>& f) {
  std::vector<Eigen::MatrixXcd> E(static_cast<size_t>(count), Eigen::MatrixXcd::Zero(n, n));
  Eigen::MatrixXcd probe = Eigen::MatrixXcd::Zero(n, n);
  auto eval = [&]() {
    Eigen::VectorXd v = f(probe);
    if (v.size() != count) throw InvalidInput("functional_matrices: wrong output size");
    return v;
  };
  for (int i = 0; i < n; ++i) {
    probe(i, i) = 1;
    const Eigen::VectorXd v = eval();
    probe(i, i) = 0;
    for (int k = 0; k < count; ++k) E[static_cast<size_t>(k)](i, i) = v(k);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      probe(i, j) = probe(j, i) = 1;
      const Eigen::VectorXd re = eval() / 2;
      probe(i, j) = probe(j, i) = 0;
      Eigen::VectorXd im = Eigen::VectorXd::Zero(count);
      if (field == Field::Complex) {
        probe(i, j) = ConicComplex(0, 1);
        probe(j, i) = ConicComplex(0, -1);
        im = -eval() / 2;
        probe(i, j) = probe(j, i) = 0;
      }
      for (int k = 0; k < count; ++k) {
        E[static_cast<size_t>(k)](j, i) = ConicComplex(re(k), im(k));
        E[static_cast<size_t>(k)](i, j) = ConicComplex(re(k), -im(k));
      }
    }
  }
  return E;
}

inline Eigen::MatrixXcd functional_matrix(int n, Field field,
                                          const std::function<double(const Eigen::MatrixXcd&)>& f) {
  return functional_matrices(n, field, 1, [&](const Eigen::MatrixXcd& X) {
    return Eigen::VectorXd::Constant(1, f(X)).eval();
  })[0];
}

enum class SolveStatus { Solved, Infeasible, Unbounded, MaxIter, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
  /// Farkas-ratio threshold used to declare infeasibility or unboundedness.
  double infeas_tol = 1e-8;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<Eigen::MatrixXcd> blocks;  // indexed by BlockRef::id
  std::vector<double> scalars;           // indexed by ScalarRef::id
  double objective = 0;                  // maximized objective
  double dual_objective = 0;             // upper bound on `objective`
  double primal_residual = 0;            // relative, scaled problem
  double dual_residual = 0;
  double gap = 0;
  int iterations = 0;

  bool solved() const { return status == SolveStatus::Solved; }
  const Eigen::MatrixXcd& block(BlockRef b) const { return blocks.at(static_cast<size_t>(b.id)); }
  double scalar(ScalarRef s) const { return scalars.at(static_cast<size_t>(s.id)); }

  double value(const LinearForm& f) const {
    double v = f.constant();
    for (const auto& [id, A] : f.block_terms()) {
      v += (A.cwiseProduct(blocks.at(static_cast<size_t>(id)).transpose())).sum().real();
    }
    for (const auto& [id, c] : f.scalar_terms()) v += c * scalars.at(static_cast<size_t>(id));
    return v;
  }
};

class ConicProgram {
 public:
  BlockRef add_psd_block(std::string name, int n, Field field = Field::Complex) {
    if (n < 1) throw InvalidInput("ConicProgram: block dimension must be >= 1");
    blocks_.push_back({std::move(name), n, field, false});
    return BlockRef{static_cast<int>(blocks_.size()) - 1};
  }
  ScalarRef add_nonneg(std::string name) {
    scalars_.push_back({std::move(name), true});
    return ScalarRef{static_cast<int>(scalars_.size()) - 1};
  }
  ScalarRef add_free(std::string name) {
    scalars_.push_back({std::move(name), false});
    return ScalarRef{static_cast<int>(scalars_.size()) - 1};
  }

  void maximize(LinearForm objective) {
    check(objective);
    objective_ = std::move(objective);
  }

  /// lhs (sense) rhs; the constant of lhs is moved to the right-hand side.
  void add_constraint(LinearForm lhs, Sense sense, double rhs) {
    check(lhs);
    if (!std::isfinite(rhs)) throw InvalidInput("ConicProgram: non-finite right-hand side");
    constraints_.push_back({std::move(lhs), sense, rhs});
  }

  /// F(x) is PSD. Implemented with a hidden real PSD slack block Z and the
  /// entrywise equalities Z = F(x).
  void add_lmi(const AffineMatrix& F, std::string name = "lmi") {
    const int n = F.size();
    const BlockRef Z = add_psd_block(std::move(name), n, Field::Real);
    blocks_.back().hidden = true;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
        if (i == j) {
          E(i, i) = 1;
        } else {
          E(i, j) = E(j, i) = 0.5;
        }
        LinearForm row;
        row.add(Z, E);
        row.add(F.at(i, j), -1.0);
        add_constraint(std::move(row), Sense::Eq, 0.0);
      }
    }
  }

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_scalars() const { return static_cast<int>(scalars_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int block_dim(BlockRef b) const { return blocks_.at(static_cast<size_t>(b.id)).n; }
  Field block_field(BlockRef b) const { return blocks_.at(static_cast<size_t>(b.id)).field; }

  friend ConicSolution solve(const ConicProgram& prog, const SolveOptions& opt);

 private:
  struct BlockInfo {
    std::string name;
    int n;
    Field field;
    bool hidden;
  };
  struct ScalarInfo {
    std::string name;
    bool nonneg;
  };
  struct Constraint {
    LinearForm lhs;
    Sense sense;
    double rhs;
  };

  void check(const LinearForm& f) const {
    for (const auto& [id, A] : f.block_terms()) {
      if (id < 0 || id >= num_blocks()) throw InvalidInput("ConicProgram: unknown block");
      const int n = blocks_[static_cast<size_t>(id)].n;
      if (A.rows() != n || A.cols() != n) {
        throw InvalidInput("ConicProgram: coefficient size mismatch for block " +
                           blocks_[static_cast<size_t>(id)].name);
      }
      if (!A.allFinite()) throw InvalidInput("ConicProgram: non-finite coefficient");
    }
    for (const auto& [id, c] : f.scalar_terms()) {
      if (id < 0 || id >= num_scalars()) throw InvalidInput("ConicProgram: unknown scalar");
      if (!std::isfinite(c)) throw InvalidInput("ConicProgram: non-finite coefficient");
    }
  }

  std::vector<BlockInfo> blocks_;
  std::vector<ScalarInfo> scalars_;
  LinearForm objective_;
  std::vector<Constraint> constraints_;
};

namespace internal {

/// Standard form: minimize sum <C_b, X_b> + cl.xl + cf.xf subject to
/// sum <A_ib, X_b> + Al_i.xl + Af_i.xf = b_i, X_b PSD, xl >= 0.
struct StandardForm {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> C;
  // Per block: (constraint index, coefficient) for constraints touching it.
  std::vector<std::vector<std::pair<int, Eigen::MatrixXd>>> A;
  Eigen::MatrixXd Al, Af;
  Eigen::VectorXd cl, cf, b;
  double obj_constant = 0;
};

inline Eigen::MatrixXd real_coefficient(const Eigen::MatrixXcd& A, Field field) {
  const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  if (field == Field::Real) return H.real();
  return 0.5 * hermitian_embed(H);
}

inline double frob_inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return A.cwiseProduct(B).sum();
}

/// Largest step a in (0, inf] with X + a dX PSD, given the Cholesky factor of X.
inline double max_psd_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& dX) {
  const Eigen::MatrixXd L = chol.matrixL();
  Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(dX);
  T = L.triangularView<Eigen::Lower>().solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_lp_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  }
  return a;
}

}  // namespace internal

inline ConicSolution solve(const ConicProgram& prog, const SolveOptions& opt = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  using internal::frob_inner;

  const int nb = prog.num_blocks();
  const int ncons = prog.num_constraints();

  // Scalar columns: nonneg scalars and inequality slacks are LP variables,
  // free scalars are free variables.
  std::vector<int> lp_col(static_cast<size_t>(prog.num_scalars()), -1);
  std::vector<int> free_col(static_cast<size_t>(prog.num_scalars()), -1);
  int nl = 0, nf = 0;
  for (int s = 0; s < prog.num_scalars(); ++s) {
    if (prog.scalars_[static_cast<size_t>(s)].nonneg) {
      lp_col[static_cast<size_t>(s)] = nl++;
    } else {
      free_col[static_cast<size_t>(s)] = nf++;
    }
  }
  const int n_user_lp = nl;
  for (const auto& c : prog.constraints_) {
    if (c.sense != Sense::Eq) ++nl;
  }

  internal::StandardForm sf;
  sf.dims.resize(static_cast<size_t>(nb));
  sf.C.resize(static_cast<size_t>(nb));
  sf.A.resize(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const auto& info = prog.blocks_[static_cast<size_t>(b)];
    const int dim = info.field == Field::Complex ? 2 * info.n : info.n;
    sf.dims[static_cast<size_t>(b)] = dim;
    sf.C[static_cast<size_t>(b)] = MatrixXd::Zero(dim, dim);
  }
  sf.Al = MatrixXd::Zero(ncons, nl);
  sf.Af = MatrixXd::Zero(ncons, nf);
  sf.cl = VectorXd::Zero(nl);
  sf.cf = VectorXd::Zero(nf);
  sf.b = VectorXd::Zero(ncons);

  auto field_of = [&](int b) { return prog.blocks_[static_cast<size_t>(b)].field; };

  // Objective: maximize f  <=>  minimize -f.
  for (const auto& [id, A] : prog.objective_.block_terms()) {
    sf.C[static_cast<size_t>(id)] -= internal::real_coefficient(A, field_of(id));
  }
  for (const auto& [id, c] : prog.objective_.scalar_terms()) {
    if (lp_col[static_cast<size_t>(id)] >= 0) {
      sf.cl(lp_col[static_cast<size_t>(id)]) -= c;
    } else {
      sf.cf(free_col[static_cast<size_t>(id)]) -= c;
    }
  }
  sf.obj_constant = prog.objective_.constant();

  int slack = n_user_lp;
  for (int i = 0; i < ncons; ++i) {
    const auto& con = prog.constraints_[static_cast<size_t>(i)];
    std::vector<MatrixXd> acc(static_cast<size_t>(nb));
    for (const auto& [id, A] : con.lhs.block_terms()) {
      MatrixXd R = internal::real_coefficient(A, field_of(id));
      auto& slot = acc[static_cast<size_t>(id)];
      if (slot.size() == 0) {
        slot = std::move(R);
      } else {
        slot += R;
      }
    }
    for (int b = 0; b < nb; ++b) {
      auto& slot = acc[static_cast<size_t>(b)];
      if (slot.size() != 0 && slot.cwiseAbs().maxCoeff() > 0) {
        sf.A[static_cast<size_t>(b)].emplace_back(i, std::move(slot));
      }
    }
    for (const auto& [id, c] : con.lhs.scalar_terms()) {
      if (lp_col[static_cast<size_t>(id)] >= 0) {
        sf.Al(i, lp_col[static_cast<size_t>(id)]) += c;
      } else {
        sf.Af(i, free_col[static_cast<size_t>(id)]) += c;
      }
    }
    if (con.sense == Sense::Le) sf.Al(i, slack++) = 1;
    if (con.sense == Sense::Ge) sf.Al(i, slack++) = -1;
    sf.b(i) = con.rhs - con.lhs.constant();
  }

  // Row equilibration and objective scaling.
  VectorXd row_norm = VectorXd::Zero(ncons);
  for (int b = 0; b < nb; ++b) {
    for (const auto& [i, A] : sf.A[static_cast<size_t>(b)]) row_norm(i) += A.squaredNorm();
  }
  for (int i = 0; i < ncons; ++i) {
    row_norm(i) += sf.Al.row(i).squaredNorm() + sf.Af.row(i).squaredNorm();
    row_norm(i) = std::sqrt(row_norm(i));
    if (!(row_norm(i) > 0)) {
      if (std::abs(sf.b(i)) > 0) {
        ConicSolution bad;
        bad.status = SolveStatus::Infeasible;
        return bad;
      }
      row_norm(i) = 1;
    }
  }
  for (int b = 0; b < nb; ++b) {
    for (auto& [i, A] : sf.A[static_cast<size_t>(b)]) A /= row_norm(i);
  }
  for (int i = 0; i < ncons; ++i) {
    sf.Al.row(i) /= row_norm(i);
    sf.Af.row(i) /= row_norm(i);
    sf.b(i) /= row_norm(i);
  }
  double c_norm = sf.cl.squaredNorm() + sf.cf.squaredNorm();
  for (const auto& C : sf.C) c_norm += C.squaredNorm();
  c_norm = std::sqrt(c_norm);
  const double c_scale = c_norm > 0 ? c_norm : 1.0;
  for (auto& C : sf.C) C /= c_scale;
  sf.cl /= c_scale;
  sf.cf /= c_scale;

  const double b_norm = sf.b.norm();

  // Initial point.
  double nu = nl;
  for (int d : sf.dims) nu += d;
  double xi = 10, eta = 10;
  for (int i = 0; i < ncons; ++i) xi = std::max(xi, (1 + std::abs(sf.b(i))));
  xi = std::max(xi, std::sqrt(nu));
  eta = std::max(eta, std::sqrt(nu));

  std::vector<MatrixXd> X(static_cast<size_t>(nb)), S(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const int d = sf.dims[static_cast<size_t>(b)];
    X[static_cast<size_t>(b)] = xi * MatrixXd::Identity(d, d);
    S[static_cast<size_t>(b)] = eta * MatrixXd::Identity(d, d);
  }
  VectorXd xl = VectorXd::Constant(nl, xi), sl = VectorXd::Constant(nl, eta);
  VectorXd xf = VectorXd::Zero(nf), y = VectorXd::Zero(ncons);

  auto apply_A = [&](const std::vector<MatrixXd>& Xs, const VectorXd& l, const VectorXd& f) {
    VectorXd r = sf.Al * l + sf.Af * f;
    for (int b = 0; b < nb; ++b) {
      for (const auto& [i, A] : sf.A[static_cast<size_t>(b)]) {
        r(i) += frob_inner(A, Xs[static_cast<size_t>(b)]);
      }
    }
    return r;
  };
  auto apply_At = [&](int b, const VectorXd& v) {
    const int d = sf.dims[static_cast<size_t>(b)];
    MatrixXd R = MatrixXd::Zero(d, d);
    for (const auto& [i, A] : sf.A[static_cast<size_t>(b)]) R += v(i) * A;
    return R;
  };

  ConicSolution sol;
  sol.status = SolveStatus::MaxIter;
  double C_total_norm = 0;
  for (const auto& C : sf.C) C_total_norm += C.squaredNorm();
  C_total_norm = std::sqrt(C_total_norm + sf.cl.squaredNorm() + sf.cf.squaredNorm());

  double relp = 0, reld = 0, relgap = 0, pobj = 0, dobj = 0;
  int it = 0;
  for (; it <= opt.max_iter; ++it) {
    // Residuals.
    const VectorXd Rp = sf.b - apply_A(X, xl, xf);
    std::vector<MatrixXd> Rd(static_cast<size_t>(nb));
    double rd_sq = 0;
    for (int b = 0; b < nb; ++b) {
      Rd[static_cast<size_t>(b)] = sf.C[static_cast<size_t>(b)] - apply_At(b, y) - S[static_cast<size_t>(b)];
      rd_sq += Rd[static_cast<size_t>(b)].squaredNorm();
    }
    const VectorXd rdl = sf.cl - sf.Al.transpose() * y - sl;
    const VectorXd rdf = sf.cf - sf.Af.transpose() * y;
    rd_sq += rdl.squaredNorm() + rdf.squaredNorm();

    pobj = sf.cl.dot(xl) + sf.cf.dot(xf);
    double comp = xl.dot(sl);
    for (int b = 0; b < nb; ++b) {
      pobj += frob_inner(sf.C[static_cast<size_t>(b)], X[static_cast<size_t>(b)]);
      comp += frob_inner(X[static_cast<size_t>(b)], S[static_cast<size_t>(b)]);
    }
    dobj = sf.b.dot(y);
    relp = Rp.norm() / (1 + b_norm);
    reld = std::sqrt(rd_sq) / (1 + C_total_norm);
    relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    const double relcomp = comp / (1 + std::abs(pobj) + std::abs(dobj));
    if (!std::isfinite(relp) || !std::isfinite(reld) || !std::isfinite(comp)) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }
    if (relp <= opt.tol && reld <= opt.tol && relgap <= opt.tol && relcomp <= opt.tol) {
      sol.status = SolveStatus::Solved;
      break;
    }
    // Farkas-type certificates.
    // A*(y) + S = C - Rd, so y / dobj certifies primal infeasibility once
    // ||C - Rd|| is negligible relative to dobj; symmetric test for x.
    if (dobj > 0 && relp > opt.tol &&
        (C_total_norm + std::sqrt(rd_sq)) / dobj < opt.infeas_tol) {
      sol.status = SolveStatus::Infeasible;
      break;
    }
    if (pobj < 0) {
      const double ax = (sf.b - Rp).norm();
      if (ax / -pobj < opt.infeas_tol && reld > opt.tol) {
        sol.status = SolveStatus::Unbounded;
        break;
      }
    }
    if (it == opt.max_iter) break;

    const double mu = comp / nu;

    // Factorizations.
    std::vector<MatrixXd> Sinv(static_cast<size_t>(nb));
    std::vector<Eigen::LLT<MatrixXd>> cholX(static_cast<size_t>(nb)), cholS(static_cast<size_t>(nb));
    bool ok = true;
    for (int b = 0; b < nb; ++b) {
      cholS[static_cast<size_t>(b)].compute(S[static_cast<size_t>(b)]);
      cholX[static_cast<size_t>(b)].compute(X[static_cast<size_t>(b)]);
      if (cholS[static_cast<size_t>(b)].info() != Eigen::Success ||
          cholX[static_cast<size_t>(b)].info() != Eigen::Success) {
        ok = false;
        break;
      }
      const int d = sf.dims[static_cast<size_t>(b)];
      Sinv[static_cast<size_t>(b)] = cholS[static_cast<size_t>(b)].solve(MatrixXd::Identity(d, d));
      Sinv[static_cast<size_t>(b)] = 0.5 * (Sinv[static_cast<size_t>(b)] + Sinv[static_cast<size_t>(b)].transpose());
    }
    if (!ok) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }

    // Schur complement.
    MatrixXd M = MatrixXd::Zero(ncons, ncons);
    for (int b = 0; b < nb; ++b) {
      const auto& list = sf.A[static_cast<size_t>(b)];
      const MatrixXd& Xb = X[static_cast<size_t>(b)];
      const MatrixXd& Si = Sinv[static_cast<size_t>(b)];
      for (size_t jj = 0; jj < list.size(); ++jj) {
        const MatrixXd G = Xb * list[jj].second * Si;
        for (size_t ii = 0; ii <= jj; ++ii) {
          const double v = frob_inner(list[ii].second, G);
          M(list[ii].first, list[jj].first) += v;
          if (ii != jj) M(list[jj].first, list[ii].first) += v;
        }
      }
    }
    const VectorXd D = xl.cwiseQuotient(sl);
    M += sf.Al * D.asDiagonal() * sf.Al.transpose();
    M = 0.5 * (M + M.transpose());

    const int K = ncons + nf;
    MatrixXd Kmat(K, K);
    Kmat.setZero();
    Kmat.topLeftCorner(ncons, ncons) = M;
    Kmat.topRightCorner(ncons, nf) = sf.Af;
    Kmat.bottomLeftCorner(nf, ncons) = sf.Af.transpose();
    Eigen::PartialPivLU<MatrixXd> lu(Kmat);

    struct Dir {
      std::vector<MatrixXd> dX, dS;
      VectorXd dxl, dsl, dxf, dy;
    };
    // Solves the Newton system for target sigma*mu with optional
    // second-order correction from a predictor direction.
    auto direction = [&](double target, const Dir* corr) {
      Dir d;
      d.dX.resize(static_cast<size_t>(nb));
      d.dS.resize(static_cast<size_t>(nb));
      std::vector<MatrixXd> Rc(static_cast<size_t>(nb));
      VectorXd rhs = VectorXd::Zero(K);
      rhs.head(ncons) = Rp;
      for (int b = 0; b < nb; ++b) {
        const int dim = sf.dims[static_cast<size_t>(b)];
        const MatrixXd& Si = Sinv[static_cast<size_t>(b)];
        MatrixXd T = target * MatrixXd::Identity(dim, dim);
        if (corr) T -= corr->dX[static_cast<size_t>(b)] * corr->dS[static_cast<size_t>(b)];
        Rc[static_cast<size_t>(b)] = T * Si - X[static_cast<size_t>(b)];
        const MatrixXd W = Rc[static_cast<size_t>(b)] - X[static_cast<size_t>(b)] * Rd[static_cast<size_t>(b)] * Si;
        for (const auto& [i, A] : sf.A[static_cast<size_t>(b)]) rhs(i) -= frob_inner(A, W);
      }
      VectorXd tl = VectorXd::Constant(nl, target);
      if (corr) tl -= corr->dxl.cwiseProduct(corr->dsl);
      const VectorXd rcl = tl.cwiseQuotient(sl) - xl;
      rhs.head(ncons) -= sf.Al * (rcl - D.cwiseProduct(rdl));
      rhs.tail(nf) = rdf;
      const VectorXd sol_vec = lu.solve(rhs);
      d.dy = sol_vec.head(ncons);
      d.dxf = sol_vec.tail(nf);
      for (int b = 0; b < nb; ++b) {
        d.dS[static_cast<size_t>(b)] = Rd[static_cast<size_t>(b)] - apply_At(b, d.dy);
        MatrixXd dX = Rc[static_cast<size_t>(b)] -
                      X[static_cast<size_t>(b)] * d.dS[static_cast<size_t>(b)] * Sinv[static_cast<size_t>(b)];
        d.dX[static_cast<size_t>(b)] = 0.5 * (dX + dX.transpose());
      }
      d.dsl = rdl - sf.Al.transpose() * d.dy;
      d.dxl = rcl - D.cwiseProduct(d.dsl);
      return d;
    };
    auto step_lengths = [&](const Dir& d) {
      double ap = internal::max_lp_step(xl, d.dxl);
      double ad = internal::max_lp_step(sl, d.dsl);
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, internal::max_psd_step(cholX[static_cast<size_t>(b)], d.dX[static_cast<size_t>(b)]));
        ad = std::min(ad, internal::max_psd_step(cholS[static_cast<size_t>(b)], d.dS[static_cast<size_t>(b)]));
      }
      return std::pair<double, double>{ap, ad};
    };

    const Dir pred = direction(0.0, nullptr);
    auto [ap_max, ad_max] = step_lengths(pred);
    const double ap = std::min(1.0, ap_max), ad = std::min(1.0, ad_max);
    double comp_aff = (xl + ap * pred.dxl).dot(sl + ad * pred.dsl);
    for (int b = 0; b < nb; ++b) {
      comp_aff += frob_inner(X[static_cast<size_t>(b)] + ap * pred.dX[static_cast<size_t>(b)],
                             S[static_cast<size_t>(b)] + ad * pred.dS[static_cast<size_t>(b)]);
    }
    const double ratio = std::clamp(comp_aff / comp, 0.0, 1.0);
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    const Dir dir = direction(sigma * mu, &pred);
    auto [p_max, d_max] = step_lengths(dir);
    const double gamma = 0.98;
    const double step_p = std::min(1.0, gamma * p_max);
    const double step_d = std::min(1.0, gamma * d_max);
    if (!std::isfinite(step_p) || !std::isfinite(step_d)) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }

    for (int b = 0; b < nb; ++b) {
      X[static_cast<size_t>(b)] += step_p * dir.dX[static_cast<size_t>(b)];
      S[static_cast<size_t>(b)] += step_d * dir.dS[static_cast<size_t>(b)];
      X[static_cast<size_t>(b)] = 0.5 * (X[static_cast<size_t>(b)] + X[static_cast<size_t>(b)].transpose());
      S[static_cast<size_t>(b)] = 0.5 * (S[static_cast<size_t>(b)] + S[static_cast<size_t>(b)].transpose());
    }
    xl += step_p * dir.dxl;
    xf += step_p * dir.dxf;
    sl += step_d * dir.dsl;
    y += step_d * dir.dy;
  }

  sol.iterations = std::min(it, opt.max_iter);
  sol.primal_residual = relp;
  sol.dual_residual = reld;
  sol.gap = relgap;
  sol.objective = -pobj * c_scale + sf.obj_constant;
  sol.dual_objective = -dobj * c_scale + sf.obj_constant;

  sol.blocks.resize(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const auto& info = prog.blocks_[static_cast<size_t>(b)];
    const MatrixXd& Y = X[static_cast<size_t>(b)];
    if (info.field == Field::Real) {
      sol.blocks[static_cast<size_t>(b)] = Y.cast<ConicComplex>();
    } else {
      const int n = info.n;
      Eigen::MatrixXcd Z(n, n);
      Z.real() = 0.5 * (Y.topLeftCorner(n, n) + Y.bottomRightCorner(n, n));
      Z.imag() = 0.5 * (Y.bottomLeftCorner(n, n) - Y.topRightCorner(n, n));
      sol.blocks[static_cast<size_t>(b)] = Z;
    }
  }
  sol.scalars.assign(static_cast<size_t>(prog.num_scalars()), 0.0);
  for (int s = 0; s < prog.num_scalars(); ++s) {
    if (lp_col[static_cast<size_t>(s)] >= 0) {
      sol.scalars[static_cast<size_t>(s)] = xl(lp_col[static_cast<size_t>(s)]);
    } else {
      sol.scalars[static_cast<size_t>(s)] = xf(free_col[static_cast<size_t>(s)]);
    }
  }
  return sol;
}

inline ConicSolution solve(const ConicProgram& prog, double tol) {
  SolveOptions opt;
  opt.tol = tol;
  return solve(prog, opt);
}

}  // namespace dfrc
