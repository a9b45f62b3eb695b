#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace dfrc;

TEST(Sdr, ZeroThresholdIsGeneralizedRayleigh) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    SrmInstance s = test::random_srm(rng, 5);
    s.alpha = 0;
    const int n = 5;
    const MatrixXcd A = MatrixXcd::Identity(n, n) + s.h2 * s.h2.adjoint();
    const MatrixXcd B = MatrixXcd::Identity(n, n) + s.h1 * s.h1.adjoint();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(A, B);
    const SdrResult r = solve_srm_sdr(s);
    EXPECT_NEAR(r.objective, ges.eigenvalues()(n - 1), 1e-6 * ges.eigenvalues()(n - 1));
  }
}

TEST(Sdr, IdenticalChannelsGiveUnitObjective) {
  std::mt19937_64 rng(42);
  const VectorXcd h = test::random_cvec(rng, 4);
  const SdrResult r = solve_srm_sdr(SrmInstance{h, h, 0.5 * h.squaredNorm()});
  EXPECT_NEAR(r.objective, 1.0, 1e-7);
}

TEST(Sdr, MatchesClosedFormAndIsRankOne) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 40; ++t) {
    const SrmInstance s = test::random_srm(rng, 2 + t % 9);
    const SdrResult r = solve_srm_sdr(s);
    const double cf = closed_form_beamformer(s).objective;
    EXPECT_GE(r.objective, cf * (1 - 1e-7));
    EXPECT_NEAR(r.objective, cf, 1e-4 * cf);
    EXPECT_LT(r.rank_ratio, 1e-6);
    EXPECT_NEAR(r.extracted_w.norm(), 1.0, 1e-12);
    EXPECT_GE(std::norm(s.h1.dot(r.extracted_w)), s.alpha - 1e-6);
    EXPECT_GE(r.extracted_objective, r.objective * (1 - 1e-4));
  }
}

TEST(Sdr, DehomogenizationIdentities) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 10; ++t) {
    const SrmInstance s = test::random_srm(rng, 6);
    const SrmSdp sdp = build_srm_sdp(s);
    const ConicSolution sol = solve(sdp.program, 1e-9);
    ASSERT_TRUE(sol.solved());
    const MatrixXcd& X = sol.block(sdp.X);
    const MatrixXcd B = MatrixXcd::Identity(6, 6) + s.h1 * s.h1.adjoint();
    EXPECT_NEAR((B * X).trace().real(), 1.0, 1e-7);
    EXPECT_NEAR(X.trace().real(), sol.scalar(sdp.kappa), 1e-7 * std::max(1.0, sol.scalar(sdp.kappa)));
  }
}

TEST(Sdr, InfeasibleThresholdThrows) {
  std::mt19937_64 rng(45);
  SrmInstance s = test::random_srm(rng, 4);
  s.alpha = 2 * s.h1.squaredNorm();
  EXPECT_THROW(solve_srm_sdr(s), Infeasible);
}

TEST(Sdr, DesignMatchesClosedFormOnDefaultScene) {
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  const Design a = sdr_design(c, ch);
  const Design b = closed_form_design(c, ch);
  EXPECT_NEAR(a.secrecy_rate, b.secrecy_rate, 1e-4 * b.secrecy_rate);
}

TEST(Randomization, FullRankInputStillGivesUnitVectors) {
  const MatrixXcd W = MatrixXcd::Identity(4, 4) / 4.0;
  int calls = 0;
  const RandomizationResult r = gaussian_randomization(
      W, 50, 3, [&](const VectorXcd& w) {
        EXPECT_NEAR(w.norm(), 1.0, 1e-12);
        ++calls;
        return true;
      },
      [](const VectorXcd& w) { return std::norm(w(0)); });
  EXPECT_EQ(calls, 50);
  EXPECT_EQ(r.feasible_samples, 50);
  EXPECT_NEAR(r.w.norm(), 1.0, 1e-12);
}

TEST(Randomization, ObjectiveBoundedByRelaxation) {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 20; ++t) {
    const SrmInstance s = test::random_srm(rng, 5);
    const SdrResult r = solve_srm_sdr(s);
    // Feasible randomized samples never beat the relaxed optimum.
    const RandomizationResult rr = gaussian_randomization(
        MatrixXcd(r.W + 0.1 * MatrixXcd::Identity(5, 5)), 100, 7,
        [&](const VectorXcd& w) { return std::norm(s.h1.dot(w)) >= s.alpha; },
        [&](const VectorXcd& w) { return internal::srm_objective(s, w); });
    EXPECT_LE(rr.objective, r.objective * (1 + 1e-8));
  }
}
