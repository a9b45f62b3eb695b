#pragma once

// Physical scene of a dual-function radar-communication (DFRC) transmitter:
// one multi-antenna transmitter, one communication user (CU) and one radar
// target that may eavesdrop. Provides steering vectors, path losses, the
// secrecy and estimation rates of a transmit design, and the normalized
// secrecy-rate-maximization instance used by the solvers.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dfrc/errors.hpp"

namespace dfrc {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// All physical parameters of one scene. Angles in radians, distances in
/// meters, gains linear, rates in bits/s. Defaults reproduce the reference
/// simulation setting (N=10, B=10 MHz, T=10 us, P=1 kW, zeta=1 Kbps, ...).
struct ScenarioConfig {
  int N = 10;
  double d = 0.025;
  double lambda = 0.1;
  double theta1 = deg_to_rad(30.0);
  double theta2 = deg_to_rad(60.0);
  double d1 = 1000.0;
  double d2 = 500.0;
  double Gt = 10.0;
  double G1 = 1.0;
  double G2 = 1.0;
  double S = 1.0;
  double B = 10e6;
  double T = 10e-6;
  double delta = 0.5;
  double sigma2_proc = 4.44e-15;
  double gamma2 = (2.0 * kPi) * (2.0 * kPi) / 12.0;
  double P = 1000.0;
  double zeta = 1000.0;
  double sigma2_rel_dB = 0.0;

  /// Throws InvalidInput naming the first offending field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw InvalidInput("scenario." + field + ": " + why);
    };
    const double all[] = {d,  lambda, theta1, theta2, d1,    d2,
                          Gt, G1,     G2,     S,      B,     T,
                          delta, sigma2_proc, gamma2, P, zeta, sigma2_rel_dB};
    for (double v : all) {
      if (!std::isfinite(v)) fail("value", "non-finite parameter");
    }
    if (N < 1) fail("N", "must be >= 1");
    if (d <= 0) fail("d", "must be > 0");
    if (lambda <= 0) fail("lambda", "must be > 0");
    if (std::abs(theta1) > kPi / 2 + 1e-12) fail("theta1", "must lie in [-pi/2, pi/2]");
    if (std::abs(theta2) > kPi / 2 + 1e-12) fail("theta2", "must lie in [-pi/2, pi/2]");
    if (theta1 == theta2) fail("theta2", "must differ from theta1");
    if (d1 <= 0) fail("d1", "must be > 0");
    if (d2 <= 0) fail("d2", "must be > 0");
    if (Gt <= 0 || G1 <= 0 || G2 <= 0) fail("Gt/G1/G2", "gains must be > 0");
    if (S <= 0) fail("S", "must be > 0");
    if (B <= 0) fail("B", "must be > 0");
    if (T <= 0) fail("T", "must be > 0");
    if (!(delta > 0 && delta < 1)) fail("delta", "must lie in (0, 1)");
    if (sigma2_proc < 0) fail("sigma2_proc", "must be >= 0");
    if (gamma2 < 0) fail("gamma2", "must be >= 0");
    if (P <= 0) fail("P", "must be > 0");
    if (zeta < 0) fail("zeta", "must be >= 0");
  }
};

/// Path losses, noise power and steering vectors derived from a scene.
struct ChannelSet {
  double beta1_sq = 0;  // transmitter -> target
  double beta2_sq = 0;  // transmitter -> CU
  double beta3_sq = 0;  // round-trip radar echo
  double sigma2 = 0;
  VectorXcd a1;  // target steering vector
  VectorXcd a2;  // CU steering vector

  int N() const { return static_cast<int>(a1.size()); }
};

/// Entry k is exp(j (2 pi / lambda) k d sin(theta)), k = 0..N-1.
inline VectorXcd steering_vector(double theta, int N, double d, double lambda) {
  if (!std::isfinite(theta)) throw InvalidInput("steering_vector: non-finite angle");
  if (N < 1) throw InvalidInput("steering_vector: N must be >= 1");
  if (!(lambda > 0)) throw InvalidInput("steering_vector: lambda must be > 0");
  VectorXcd a(N);
  const double phase = 2.0 * kPi / lambda * d * std::sin(theta);
  for (int k = 0; k < N; ++k) a(k) = std::polar(1.0, phase * k);
  return a;
}

inline ChannelSet build_channels(const ScenarioConfig& cfg) {
  cfg.validate();
  const double four_pi = 4.0 * kPi;
  ChannelSet ch;
  const double l2 = cfg.lambda * cfg.lambda;
  ch.beta1_sq = cfg.Gt * cfg.G1 * l2 / (four_pi * four_pi * cfg.d1 * cfg.d1);
  ch.beta2_sq = cfg.Gt * cfg.G2 * l2 / (four_pi * four_pi * cfg.d2 * cfg.d2);
  ch.beta3_sq = cfg.Gt * cfg.Gt * l2 * cfg.S /
                (four_pi * four_pi * four_pi * std::pow(cfg.d1, 4));
  ch.sigma2 = ch.beta1_sq * db_to_linear(cfg.sigma2_rel_dB);
  ch.a1 = steering_vector(cfg.theta1, cfg.N, cfg.d, cfg.lambda);
  ch.a2 = steering_vector(cfg.theta2, cfg.N, cfg.d, cfg.lambda);
  return ch;
}

/// Optimal receive filter: the matched filter a1 / sqrt(N).
inline VectorXcd matched_filter(const ChannelSet& ch) {
  return ch.a1 / std::sqrt(static_cast<double>(ch.N()));
}

/// A complete transmit design. `w` is unit norm, `phi` (when present) is the
/// unit-trace AN covariance, p1/p2 the information and AN powers in watts.
struct Design {
  VectorXcd w;
  double p1 = 0;
  double p2 = 0;
  std::optional<MatrixXcd> phi;
  double secrecy_rate = 0;
  double estimation_rate = 0;
};

/// Echo SNR per watt of power focused on the target:
/// sigma2_proc gamma^2 T B^3 N |beta3|^2 / sigma^2.
inline double radar_gain(const ScenarioConfig& cfg, const ChannelSet& ch) {
  return cfg.sigma2_proc * cfg.gamma2 * cfg.T * std::pow(cfg.B, 3) * cfg.N *
         ch.beta3_sq / ch.sigma2;
}

/// Target-illumination level p1|a1^H w|^2 + p2 a1^H Phi a1 needed to meet the
/// estimation-rate threshold zeta.
inline double zeta_bar(const ScenarioConfig& cfg, const ChannelSet& ch) {
  const double g = radar_gain(cfg, ch);
  const double need = std::expm1(std::log(2.0) * cfg.T * cfg.zeta / cfg.delta);
  if (need == 0) return 0;
  if (g <= 0) return std::numeric_limits<double>::infinity();
  return need / g;
}

namespace internal {

inline double quad_form(const MatrixXcd& m, const VectorXcd& v) {
  return (v.adjoint() * m * v)(0, 0).real();
}

inline double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

}  // namespace internal

inline double estimation_rate(const ScenarioConfig& cfg, const ChannelSet& ch,
                              const VectorXcd& w, double p1, double p2,
                              const std::optional<MatrixXcd>& phi = std::nullopt) {
  double illum = p1 * std::norm(ch.a1.dot(w));
  if (phi) illum += p2 * internal::quad_form(*phi, ch.a1);
  illum = std::max(illum, 0.0);
  return cfg.delta / cfg.T * internal::log2_1p(radar_gain(cfg, ch) * illum);
}

struct Sinrs {
  double cu = 0;
  double eve = 0;
};

inline Sinrs sinrs(const ChannelSet& ch, const VectorXcd& w, double p1, double p2,
                   const std::optional<MatrixXcd>& phi) {
  const double an_cu = phi ? p2 * internal::quad_form(*phi, ch.a2) : 0.0;
  const double an_eve = phi ? p2 * internal::quad_form(*phi, ch.a1) : 0.0;
  Sinrs s;
  s.cu = p1 * ch.beta2_sq * std::norm(ch.a2.dot(w)) / (ch.sigma2 + ch.beta2_sq * an_cu);
  s.eve = p1 * ch.beta1_sq * std::norm(ch.a1.dot(w)) / (ch.sigma2 + ch.beta1_sq * an_eve);
  return s;
}

/// (1 + SINR_cu) / (1 + SINR_eve); the secrecy rate is B log2 of this ratio
/// clamped at 1.
inline double secrecy_ratio(const ChannelSet& ch, const VectorXcd& w, double p1,
                            double p2, const std::optional<MatrixXcd>& phi = std::nullopt) {
  const Sinrs s = sinrs(ch, w, p1, p2, phi);
  return (1.0 + s.cu) / (1.0 + s.eve);
}

inline double secrecy_rate_from_sinrs(double bandwidth, double sinr_cu, double sinr_eve) {
  const double r = bandwidth * (internal::log2_1p(sinr_cu) - internal::log2_1p(sinr_eve));
  return std::max(0.0, r);
}

inline double secrecy_rate(const ScenarioConfig& cfg, const ChannelSet& ch,
                           const VectorXcd& w, double p1, double p2,
                           const std::optional<MatrixXcd>& phi = std::nullopt) {
  const Sinrs s = sinrs(ch, w, p1, p2, phi);
  return secrecy_rate_from_sinrs(cfg.B, s.cu, s.eve);
}

/// Fills the two rate fields of `d` from its beamformer and power split.
inline Design& fill_rates(const ScenarioConfig& cfg, const ChannelSet& ch, Design& d) {
  d.secrecy_rate = secrecy_rate(cfg, ch, d.w, d.p1, d.p2, d.phi);
  d.estimation_rate = estimation_rate(cfg, ch, d.w, d.p1, d.p2, d.phi);
  return d;
}

/// Normalized no-AN problem: maximize (1+|h2^H w|^2)/(1+|h1^H w|^2) over unit
/// w subject to |h1^H w|^2 >= alpha.
struct SrmInstance {
  VectorXcd h1;
  VectorXcd h2;
  double alpha = 0;
};

inline SrmInstance build_srm_instance(const ScenarioConfig& cfg, const ChannelSet& ch) {
  SrmInstance inst;
  inst.h1 = std::sqrt(cfg.P * ch.beta1_sq / ch.sigma2) * ch.a1;
  inst.h2 = std::sqrt(cfg.P * ch.beta2_sq / ch.sigma2) * ch.a2;
  // alpha = P |beta1|^2 zeta_bar / (sigma^2 P), written out without P.
  const double need = std::expm1(std::log(2.0) * cfg.T * cfg.zeta / cfg.delta);
  const double den = cfg.N * cfg.sigma2_proc * ch.beta3_sq * cfg.gamma2 *
                     std::pow(cfg.B, 3) * cfg.T;
  if (need == 0) {
    inst.alpha = 0;
  } else if (den <= 0) {
    inst.alpha = std::numeric_limits<double>::infinity();
  } else {
    inst.alpha = ch.beta1_sq * need / den;
  }
  return inst;
}

/// Maximum-ratio transmission towards the CU with full power, no AN.
inline Design mrt_beamformer(const ScenarioConfig& cfg, const ChannelSet& ch) {
  Design d;
  d.w = ch.a2.normalized();
  d.p1 = cfg.P;
  d.p2 = 0;
  return fill_rates(cfg, ch, d);
}

}  // namespace dfrc
