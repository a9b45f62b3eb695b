// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dfrc/dfrc.hpp"

using namespace dfrc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

VectorXcd random_cvec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = {nd(rng), nd(rng)};
  return v;
}

MatrixXcd random_hermitian(std::mt19937_64& rng, int n) {
  MatrixXcd A(n, n);
  std::normal_distribution<double> nd;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = {nd(rng), nd(rng)};
  }
  return 0.5 * (A + A.adjoint());
}

MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
  MatrixXcd A(n, n);
  std::normal_distribution<double> nd;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = {nd(rng), nd(rng)};
  }
  return Eigen::HouseholderQR<MatrixXcd>(A).householderQ();
}

double min_eig(const MatrixXcd& X) {
  return Eigen::SelfAdjointEigenSolver<MatrixXcd>(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

/// Scene with a random geometry and an estimation threshold that is a
/// random fraction of what N P can illuminate.
ScenarioConfig random_scene(std::mt19937_64& rng, int N) {
  ScenarioConfig c;
  c.N = N;
  c.theta1 = deg_to_rad(uniform(rng, -70, 70));
  const double dtheta = uniform(rng, 5, 60) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1);
  c.theta2 = std::clamp(c.theta1 + deg_to_rad(dtheta), -kPi / 2 + 0.01, kPi / 2 - 0.01);
  c.d1 = uniform(rng, 500, 2000);
  c.d2 = uniform(rng, 200, 2000);
  c.P = std::pow(10.0, uniform(rng, 1, 3.7));
  const ChannelSet ch = build_channels(c);
  c.zeta = c.delta / c.T * std::log2(1 + radar_gain(c, ch) * uniform(rng, 0.0, 0.9) * c.N * c.P);
  return c;
}

OneDimInstance random_one_dim(std::mt19937_64& rng) {
  OneDimInstance in;
  in.mu1 = uniform(rng, 0.0, 5.0);
  in.mu2 = uniform(rng, 0.0, 5.0);
  in.mu3 = uniform(rng, 0.1, 5.0);
  in.alpha = uniform(rng, 0.0, 1.0) * in.mu3 * in.mu3;
  return in;
}

PowerAllocInstance random_power(std::mt19937_64& rng) {
  const double mu3 = uniform(rng, 0.5, 30);
  const double mu1 = uniform(rng, 0, 30);
  const double psi1 = uniform(rng, 0, mu3);
  const double psi2 = uniform(rng, 0, 30);
  const int N = 4 + static_cast<int>(rng() % 8);
  const double psi3 = uniform(rng, 0, std::sqrt(N - 0.5));
  const double P = std::pow(10.0, uniform(rng, 0, 3.5));
  const double zb = uniform(rng, 0, 0.9) * N * P;
  return PowerAllocInstance::make(psi1, psi2, psi3, mu1, mu3, N, zb, P);
}

/// The rank observations gathered by criteria 1 and 10.
struct RankRecord {
  double ratio = 0;
  double relaxation = 0;
  double extracted = 0;
};
std::vector<RankRecord> rank_records;

Outcome criterion1() {
  std::mt19937_64 rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  const int Ns[] = {4, 8, 10};
  int n = 0, bad = 0;
  double worst = 0;
  for (int t = 0; t < 120; ++t) {
    const ScenarioConfig c = random_scene(rng, Ns[t % 3]);
    const ChannelSet ch = build_channels(c);
    const double r_cf = closed_form_design(c, ch).secrecy_rate;
    SdrResult r;
    const double r_sdr = sdr_design(c, ch, &r).secrecy_rate;
    rank_records.push_back({r.rank_ratio, r.objective, r.extracted_objective});
    const double err = std::abs(r_cf - r_sdr) / std::max(r_sdr, 1e-6);
    worst = std::max(worst, err);
    if (err > 1e-4) ++bad;
    ++n;
  }
  const double secs = elapsed(t0);
  return {bad == 0 && n >= 100 && secs < 60,
          fmt("%d scenes, worst relative gap %.2e (limit 1e-4), %d over, %.1f s (limit 60 s)", n, worst, bad, secs)};
}

Outcome criterion2() {
  std::mt19937_64 rng(1002);
  const auto t0 = std::chrono::steady_clock::now();
  int bad_obj = 0, bad_root = 0, roots = 0;
  double worst_obj = 0, worst_root = 0;
  for (int t = 0; t < 1000; ++t) {
    const OneDimInstance in = random_one_dim(rng);
    const double f = one_dim_objective(in, one_dim_maximize(in));
    const double g = one_dim_objective(in, grid_oracle_one_dim(in, 1000000));
    const double short_by = (g - f) / std::max(1.0, g);
    worst_obj = std::max(worst_obj, short_by);
    if (short_by > 1e-8) ++bad_obj;
    for (double th : one_dim_stationary_points(in)) {
      if (th <= in.lower() || th >= 1) continue;
      const double res = std::abs(one_dim_gradient_residual(in, th));
      worst_root = std::max(worst_root, res);
      if (res > 1e-8) ++bad_root;
      ++roots;
    }
  }
  const double secs = elapsed(t0);
  return {bad_obj == 0 && bad_root == 0 && secs < 30,
          fmt("1000 instances, grid excess %.2e (limit 1e-8), %d interior roots with max residual %.2e "
              "(limit 1e-8), %.1f s (limit 30 s)",
              worst_obj, roots, worst_root, secs)};
}

Outcome criterion3() {
  std::mt19937_64 rng(1003);
  const auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const PowerAllocInstance in = random_power(rng);
    const double f = power_objective(in, power_allocation(in).second);
    const double g = power_objective(in, grid_oracle_power(in, 1000000));
    const double short_by = (g - f) / std::max(1.0, g);
    worst = std::max(worst, short_by);
    if (short_by > 1e-8) ++bad;
  }
  const double secs = elapsed(t0);
  return {bad == 0 && secs < 30,
          fmt("1000 instances, grid excess %.2e (limit 1e-8), %.1f s (limit 30 s)", worst, secs)};
}

Outcome criterion4() {
  int runs = 0, fast = 0;
  double worst_dec = 0;
  for (double P : {100.0, 1000.0, 5000.0}) {
    for (double zeta : {1000.0, 10000.0}) {
      ScenarioConfig c;
      c.P = P;
      c.zeta = zeta;
      const AoResult r = ao_solve(c, build_channels(c));
      for (size_t i = 1; i < r.objective.size(); ++i) {
        worst_dec = std::max(worst_dec, (r.objective[i - 1] - r.objective[i]) / std::max(1.0, r.objective[i - 1]));
      }
      if (r.converged && r.iterations <= 10) ++fast;
      ++runs;
    }
  }
  return {worst_dec <= 1e-10 && fast >= 0.9 * runs,
          fmt("%d/%d runs converge within 10 iterations (need 90%%), worst decrease %.2e (limit 1e-10)", fast, runs,
              worst_dec)};
}

Outcome criterion5() {
  int scenes = 0, dominated = 0, gap_up = 0, gap_pairs = 0;
  double worst = 0;
  auto check = [&](const ScenarioConfig& c) {
    const ChannelSet ch = build_channels(c);
    const double ao = ao_solve(c, ch).design.secrecy_rate;
    const double cf = closed_form_design(c, ch).secrecy_rate;
    worst = std::min(worst, ao - cf);
    if (ao < cf - 1e-6) ++dominated;
    ++scenes;
    return ao - cf;
  };
  for (double P : {100.0, 1000.0, 5000.0}) {
    ScenarioConfig c;
    c.P = P;
    c.zeta = 1000;
    const double g1 = check(c);
    c.zeta = 10000;
    const double g10 = check(c);
    if (g10 > g1) ++gap_up;
    ++gap_pairs;
  }
  std::mt19937_64 rng(1005);
  for (int t = 0; t < 30; ++t) check(random_scene(rng, 4 + t % 7));
  return {dominated == 0 && gap_up == gap_pairs,
          fmt("%d scenes, min(AO - closed form) %.3g b/s (limit -1e-6), gap rises 1->10 Kbps at %d/%d powers",
              scenes, worst, gap_up, gap_pairs)};
}

Outcome criterion6() {
  int below = 0;
  double cf1 = 0, cf10 = 0, mrt1 = 0, mrt10 = 0;
  for (int i = 0; i <= 9; ++i) {
    ScenarioConfig c;
    c.P = 1000.0 * (1 + i);
    const ChannelSet ch = build_channels(c);
    const double cf = closed_form_design(c, ch).secrecy_rate;
    const double mrt = mrt_beamformer(c, ch).secrecy_rate;
    if (cf < mrt) ++below;
    if (i == 0) {
      cf1 = cf;
      mrt1 = mrt;
    }
    cf10 = cf;
    mrt10 = mrt;
  }
  const double ratio = (mrt10 - mrt1) / (cf10 - cf1);
  return {below == 0 && ratio < 0.1,
          fmt("closed form below MRT at %d/10 powers, MRT gain / closed-form gain over 1-10 kW = %.4f (limit 0.1)",
              below, ratio)};
}

Outcome criterion7() {
  auto rate = [](const ScenarioConfig& c) { return ao_solve(c, build_channels(c)).design.secrecy_rate; };
  int p_bad = 0, z_bad = 0, d_bad = 0;
  double prev = -1;
  for (double P = 100; P <= 10000 * 1.0001; P *= 1.25) {
    ScenarioConfig c;
    c.P = P;
    const double r = rate(c);
    if (r < prev - 1e-8 * std::max(1.0, prev)) ++p_bad;
    prev = r;
  }
  double prev_cf = -1;
  for (double P = 100; P <= 10000 * 1.0001; P *= 1.25) {
    ScenarioConfig c;
    c.P = P;
    const double r = closed_form_design(c, build_channels(c)).secrecy_rate;
    if (r < prev_cf - 1e-8 * std::max(1.0, prev_cf)) ++p_bad;
    prev_cf = r;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double z = 1000; z <= 60000; z += 1000) {
    ScenarioConfig c;
    c.zeta = z;
    const double r = rate(c);
    if (r > prev + 1e-8 * std::max(1.0, prev)) ++z_bad;
    prev = r;
  }
  double frac_lo = 0, frac_hi = 0;
  prev = -1;
  for (int i = 1; i <= 20; ++i) {
    ScenarioConfig c;
    c.P = 100;
    c.zeta = 20000;
    c.d2 = 0.1 * i * c.d1;
    const Design d = ao_solve(c, build_channels(c)).design;
    const double f = d.p2 / c.P;
    if (f < prev - 1e-8) ++d_bad;
    if (i == 1) frac_lo = f;
    frac_hi = f;
    prev = f;
  }
  return {p_bad == 0 && z_bad == 0 && d_bad == 0,
          fmt("violations: P %d, zeta %d, d2/d1 %d; p2/P rises %.4f -> %.4f over d2/d1 0.1-2", p_bad, z_bad, d_bad,
              frac_lo, frac_hi)};
}

Outcome criterion8() {
  std::mt19937_64 rng(1008);
  int n = 0, bad = 0;
  double worst_obj = 0, worst_psd = 0;
  auto record = [&](double got, double expect, double psd) {
    const double err = std::abs(got - expect) / std::max(1.0, std::abs(expect));
    worst_obj = std::max(worst_obj, err);
    worst_psd = std::max(worst_psd, -psd);
    if (err > 1e-5 || psd < -1e-7) ++bad;
    ++n;
  };
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 7;
    const MatrixXcd C = random_hermitian(rng, dim);
    ConicProgram p;
    const BlockRef X = p.add_psd_block("X", dim);
    p.maximize(LinearForm().add(X, C));
    p.add_constraint(LinearForm().add(X, MatrixXcd(MatrixXcd::Identity(dim, dim))), Sense::Eq, 1.0);
    const ConicSolution s = solve(p);
    if (!s.solved()) {
      ++bad;
      ++n;
      continue;
    }
    record(s.objective, Eigen::SelfAdjointEigenSolver<MatrixXcd>(C).eigenvalues()(dim - 1), min_eig(s.block(X)));
  }
  for (int t = 0; t < 100; ++t) {
    // Planted optimum: complementary X*, S* and dual y* fix C and b.
    const int dim = 3 + t % 5;
    const int rank = 1 + t % 2;
    const int m = 1 + t % 4;
    const MatrixXcd Q = random_unitary(rng, dim);
    VectorXd xd = VectorXd::Zero(dim), sd = VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) (i < rank ? xd(i) : sd(i)) = uniform(rng, 0.5, 2.0);
    const MatrixXcd Xs = Q * xd.cast<Complex>().asDiagonal() * Q.adjoint();
    const MatrixXcd Ss = Q * sd.cast<Complex>().asDiagonal() * Q.adjoint();
    std::vector<MatrixXcd> A{MatrixXcd::Identity(dim, dim)};
    for (int i = 0; i < m; ++i) A.push_back(random_hermitian(rng, dim));
    MatrixXcd C = -Ss;
    double opt = 0;
    ConicProgram p;
    const BlockRef X = p.add_psd_block("X", dim);
    for (const auto& Ai : A) {
      const double y = uniform(rng, -1, 1);
      const double b = (Ai * Xs).trace().real();
      C += y * Ai;
      opt += y * b;
      p.add_constraint(LinearForm().add(X, Ai), Sense::Eq, b);
    }
    p.maximize(LinearForm().add(X, C));
    const ConicSolution s = solve(p);
    if (!s.solved()) {
      ++bad;
      ++n;
      continue;
    }
    record(s.objective, opt, min_eig(s.block(X)));
  }
  return {bad == 0 && n >= 200,
          fmt("%d programs, worst objective error %.2e (limit 1e-5), worst PSD violation %.2e (limit 1e-7)", n,
              worst_obj, worst_psd)};
}

Outcome criterion9() {
  std::mt19937_64 rng(1009);
  const Family families[] = {Family::Gaussian, Family::TwoPoint, Family::Uniform, Family::Laplacian};
  int instances = 0, bad = 0;
  double worst_margin = 1;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 4;
    MomentModel m;
    m.mu_bar = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) m.mu_bar(i) = uniform(rng, -0.05, 0.05);
    MatrixXd G(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) G(i, j) = uniform(rng, -1, 1);
    }
    m.Sigma = std::pow(uniform(rng, 0.02, 0.2), 2) * (G * G.transpose() / n + 0.1 * MatrixXd::Identity(n, n));
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = uniform(rng, -1, 1);
    }
    A = 0.5 * (A + A.transpose());
    VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = uniform(rng, -1, 1);
    for (double eps : {0.01, 0.05}) {
      // Shift c so the block is tight: worst-case CVaR exactly zero.
      const double c = -worst_case_cvar(A, b, 0.0, m.Omega(), eps);
      ++instances;
      for (Family f : families) {
        const MomentSampler s(m.mu_bar, m.Sigma, f);
        std::mt19937_64 r = stream_rng(static_cast<std::uint64_t>(t * 10 + (eps < 0.02 ? 0 : 1)),
                                       static_cast<std::uint64_t>(f));
        const long S = 100000;
        long ok = 0;
        for (long k = 0; k < S; ++k) {
          const VectorXd x = s(r);
          if (x.dot(A * x) + 2 * b.dot(x) + c <= 0) ++ok;
        }
        const double margin = static_cast<double>(ok) / S - (1 - eps - 0.005);
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0) ++bad;
      }
    }
  }
  return {bad == 0 && instances >= 50,
          fmt("%d instances x 4 families x 1e5 samples, %d violations, worst margin over 1-eps-0.005: %.4f", instances,
              bad, worst_margin)};
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  const MomentModel m = MomentModel::isotropic(c.N, 5 * kPi / 180, 0.01, 0.01);
  const DrbResult r = drb_solve(c, ch, m);
  rank_records.push_back({r.rank_ratio, r.relaxation_value, secrecy_ratio(ch, r.design.w, r.design.p1, r.design.p2,
                                                                          r.design.phi) /
                                                                (1 + r.eta_star)});
  const Design nr = non_robust_design(c, ch);
  double worst_drb = 0, best_nr = 1;
  std::string per;
  std::uint64_t seed = 10;
  for (Family f : {Family::Gaussian, Family::Uniform, Family::Laplacian}) {
    const OutageReport a = monte_carlo_outage(r.design, c, ch, m, f, 100000, r.robust_secrecy_rate, ++seed);
    const OutageReport b = monte_carlo_outage(nr, c, ch, m, f, 100000, nr.secrecy_rate, ++seed);
    worst_drb = std::max(worst_drb, a.empirical_outage);
    best_nr = std::min(best_nr, b.empirical_outage);
    per += fmt(" %s %.5f/%.5f", family_name(f).c_str(), a.empirical_outage, b.empirical_outage);
  }
  const double secs = elapsed(t0);
  return {worst_drb <= 0.01 && best_nr >= 0.99 && secs < 600,
          fmt("robust/non-robust outage:%s (limits <= 0.01 / >= 0.99), %.0f s (limit 600 s)", per.c_str(), secs)};
}

Outcome criterion11() {
  int rank_one = 0, bad_recovery = 0;
  for (const auto& r : rank_records) {
    if (r.ratio < 1e-4) {
      ++rank_one;
    } else if (r.extracted < 0.99 * r.relaxation) {
      ++bad_recovery;
    }
  }
  const int n = static_cast<int>(rank_records.size());
  return {n > 0 && rank_one >= 0.95 * n && bad_recovery == 0,
          fmt("%d/%d solutions with lambda2/lambda1 < 1e-4 (need 95%%), %d randomized recoveries below 99%%", rank_one,
              n, bad_recovery)};
}

Outcome criterion12() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1012);
  int subspace_bad = 0, phi_bad = 0, slope_bad = 0, dehom_bad = 0;
  double worst_slope = 1e9;
  for (int t = 0; t < 300; ++t) {
    const int n = 2 + t % 9;
    SrmInstance s;
    s.h1 = random_cvec(rng, n, uniform(rng, 0.2, 3.0));
    s.h2 = random_cvec(rng, n, uniform(rng, 0.2, 3.0));
    s.alpha = uniform(rng, 0, 1) * s.h1.squaredNorm();
    const ClosedFormSolution sol = closed_form_beamformer(s);
    const OrthoPair p = orthonormal_pair(s.h1, s.h2);
    const VectorXcd resid = sol.w - p.u1 * p.u1.dot(sol.w) - p.u2 * p.u2.dot(sol.w);
    if (resid.norm() > 1e-10 || std::abs(sol.w.norm() - 1) > 1e-12) ++subspace_bad;
  }
  for (int t = 0; t < 20; ++t) {
    const ScenarioConfig c = random_scene(rng, 4 + t % 7);
    const ChannelSet ch = build_channels(c);
    const Design d = ao_solve(c, ch).design;
    const VectorXcd u1 = ch.a1.normalized();
    if (!d.phi || (*d.phi - u1 * u1.adjoint()).norm() > 1e-12) ++phi_bad;
  }
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + t % 8;
    const MatrixXcd G = random_hermitian(rng, n);
    const MatrixXcd X = G * G.adjoint();
    const VectorXcd h = random_cvec(rng, n);
    const TaylorizedQuadratic q = taylorize(X, h);
    VectorXd dir(n);
    for (int k = 0; k < n; ++k) dir(k) = uniform(rng, -1, 1);
    dir.normalize();
    auto err = [&](double r) {
      VectorXcd g(n);
      for (int k = 0; k < n; ++k) g(k) = h(k) * std::polar(1.0, r * dir(k));
      return std::abs(q(r * dir) - (g.adjoint() * X * g)(0, 0).real());
    };
    const double slope = std::log10(err(0.1) / err(0.01));
    worst_slope = std::min(worst_slope, slope);
    if (!(slope >= 2.8)) ++slope_bad;
  }
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + t % 6;
    SrmInstance s;
    s.h1 = random_cvec(rng, n);
    s.h2 = random_cvec(rng, n);
    s.alpha = uniform(rng, 0, 1) * s.h1.squaredNorm();
    const SrmSdp sdp = build_srm_sdp(s);
    const ConicSolution sol = solve(sdp.program, 1e-9);
    if (!sol.solved()) {
      ++dehom_bad;
      continue;
    }
    const MatrixXcd& X = sol.block(sdp.X);
    const double kappa = sol.scalar(sdp.kappa);
    const MatrixXcd B = MatrixXcd::Identity(n, n) + s.h1 * s.h1.adjoint();
    const MatrixXcd W = X / kappa;
    // W = X / kappa is a unit-trace covariance with the same objective ratio.
    const double ratio = ((MatrixXcd::Identity(n, n) + s.h2 * s.h2.adjoint()) * W).trace().real() /
                         (B * W).trace().real();
    if (std::abs((B * X).trace().real() - 1) > 1e-7 || std::abs(W.trace().real() - 1) > 1e-7 ||
        std::abs(ratio - sol.objective) > 1e-7 * sol.objective) {
      ++dehom_bad;
    }
  }
  const double secs = elapsed(t0);
  return {subspace_bad + phi_bad + slope_bad + dehom_bad == 0 && secs < 60,
          fmt("subspace %d, AN structure %d, Taylor slope %d (min slope %.3f, limit 2.8), de-homogenization %d "
              "failures, %.1f s (limit 60 s)",
              subspace_bad, phi_bad, slope_bad, worst_slope, dehom_bad, secs)};
}

}  // namespace

int main() {
  parallel_threads() = 1;
  report(1, "closed form matches SDR", criterion1);
  report(2, "one-dimensional oracle", criterion2);
  report(3, "power-allocation oracle", criterion3);
  report(4, "AO monotone and fast", criterion4);
  report(5, "AN dominance", criterion5);
  report(6, "MRT baseline flat", criterion6);
  report(7, "monotone trends", criterion7);
  report(8, "conic solver accuracy", criterion8);
  report(9, "CVaR block safety", criterion9);
  report(10, "robust vs non-robust outage", criterion10);
  report(11, "rank-one relaxations", criterion11);
  report(12, "structural invariants", criterion12);
  std::printf("%s: %d of 12 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
