#pragma once

// Reproducible random streams, moment-matched phase-error samplers and
// Gaussian randomization for rank-one recovery.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dfrc/errors.hpp"

namespace dfrc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent generator for stream `index` of a run seeded with `seed`.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

enum class Family { Gaussian, Uniform, Laplacian, TwoPoint };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Uniform: return "uniform";
    case Family::Laplacian: return "laplacian";
    case Family::TwoPoint: return "two_point";
  }
  return "unknown";
}

inline Family parse_family(const std::string& s) {
  if (s == "gaussian") return Family::Gaussian;
  if (s == "uniform") return Family::Uniform;
  if (s == "laplacian") return Family::Laplacian;
  if (s == "two_point") return Family::TwoPoint;
  throw InvalidInput("unknown distribution family: " + s);
}

/// Draws x = mu + L z where L L^T = Sigma and z has i.i.d. zero-mean,
/// unit-variance entries from the chosen family. Every family therefore has
/// mean mu and covariance Sigma exactly.
class MomentSampler {
 public:
  MomentSampler(Eigen::VectorXd mu, const Eigen::MatrixXd& Sigma, Family family)
      : mu_(std::move(mu)), family_(family) {
    const auto n = mu_.size();
    if (Sigma.rows() != n || Sigma.cols() != n) throw InvalidInput("MomentSampler: shape mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Sigma + Sigma.transpose()));
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
      throw InvalidInput("MomentSampler: covariance is not PSD");
    }
    L_ = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  template <class Rng>
  Eigen::VectorXd operator()(Rng& rng) const {
    Eigen::VectorXd z(mu_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard(rng);
    return mu_ + L_ * z;
  }

  Family family() const { return family_; }

 private:
  template <class Rng>
  double standard(Rng& rng) const {
    switch (family_) {
      case Family::Gaussian: return normal_(rng);
      case Family::Uniform: {
        std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
        return u(rng);
      }
      case Family::Laplacian: {
        // Scale 1/sqrt(2) gives unit variance.
        std::exponential_distribution<double> e(std::sqrt(2.0));
        std::bernoulli_distribution s(0.5);
        const double v = e(rng);
        return s(rng) ? v : -v;
      }
      case Family::TwoPoint: {
        std::bernoulli_distribution s(0.5);
        return s(rng) ? 1.0 : -1.0;
      }
    }
    return 0;
  }

  Eigen::VectorXd mu_;
  Eigen::MatrixXd L_;
  Family family_;
  mutable std::normal_distribution<double> normal_{0.0, 1.0};
};

struct RandomizationResult {
  Eigen::VectorXcd w;  // unit norm
  double objective = -std::numeric_limits<double>::infinity();
  int feasible_samples = 0;
};

/// Draws `n` samples xi ~ CN(0, W), normalizes each to unit norm and keeps
/// the feasible one with the largest objective. `feasible(w)` and
/// `objective(w)` receive unit-norm vectors. feasible_samples = 0 when none
/// passed.
template <class Feasible, class Objective>
RandomizationResult gaussian_randomization(const Eigen::MatrixXcd& W, int n, std::uint64_t seed,
                                           Feasible&& feasible, Objective&& objective) {
  if (W.rows() != W.cols() || W.rows() == 0) throw InvalidInput("gaussian_randomization: bad W");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (W + W.adjoint()));
  const Eigen::MatrixXcd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::mt19937_64 rng = stream_rng(seed, 0);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  RandomizationResult best;
  const auto dim = W.rows();
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXcd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z(i) = std::complex<double>(nd(rng), nd(rng));
    Eigen::VectorXcd xi = root * z;
    const double nrm = xi.norm();
    if (!(nrm > 0)) continue;
    xi /= nrm;
    if (!feasible(xi)) continue;
    ++best.feasible_samples;
    const double v = objective(xi);
    if (v > best.objective) {
      best.objective = v;
      best.w = xi;
    }
  }
  return best;
}

/// lambda_2 / lambda_1 of a PSD matrix (0 for the zero matrix).
inline double rank_ratio(const Eigen::MatrixXcd& W) {
  if (W.rows() < 2) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (W + W.adjoint()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double l1 = ev(ev.size() - 1);
  if (!(l1 > 0)) return 0;
  return std::clamp(ev(ev.size() - 2) / l1, 0.0, 1.0);
}

/// Unit-norm principal eigenvector, phase-normalized so its first nonzero
/// entry is real positive.
inline Eigen::VectorXcd principal_eigenvector(const Eigen::MatrixXcd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (W + W.adjoint()));
  Eigen::VectorXcd v = es.eigenvectors().col(W.cols() - 1);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v.normalized();
}

}  // namespace dfrc
