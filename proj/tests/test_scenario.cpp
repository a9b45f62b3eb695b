#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace dfrc;

namespace {

const Complex J(0, 1);

}  // namespace

TEST(SteeringVector, BroadsideIsAllOnes) {
  const VectorXcd a = steering_vector(0.0, 4, 0.025, 0.1);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(a(k) - Complex(1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, SingleAntenna) {
  const VectorXcd a = steering_vector(0.7, 1, 0.025, 0.1);
  ASSERT_EQ(a.size(), 1);
  EXPECT_NEAR(std::abs(a(0) - Complex(1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, QuarterWavelengthAtThirtyDegrees) {
  const VectorXcd a = steering_vector(deg_to_rad(30), 2, 0.025, 0.1);
  EXPECT_NEAR(std::abs(a(1) - std::exp(J * (kPi / 4))), 0.0, 1e-14);
}

TEST(SteeringVector, UnitModulusEverywhere) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int N = 1 + t % 16;
    const VectorXcd a = steering_vector(test::uniform(rng, -kPi / 2, kPi / 2), N, 0.025, 0.1);
    for (int k = 0; k < N; ++k) EXPECT_NEAR(std::abs(a(k)), 1.0, 1e-12);
  }
}

TEST(SteeringVector, RejectsNonFiniteAngle) {
  EXPECT_THROW(steering_vector(std::nan(""), 4, 0.025, 0.1), InvalidInput);
}

TEST(BuildChannels, UnitPathLossGeometry) {
  ScenarioConfig c;
  c.Gt = c.G1 = 1;
  c.lambda = 4 * kPi;
  c.d = c.lambda / 4;
  c.d1 = 1;
  EXPECT_NEAR(build_channels(c).beta1_sq, 1.0, 1e-15);
}

TEST(BuildChannels, DefaultPathLossesMatchReference) {
  const ChannelSet ch = build_channels(ScenarioConfig{});
  EXPECT_NEAR(ch.beta1_sq / 6.3325739776461103e-10, 1.0, 1e-13);
  EXPECT_NEAR(ch.beta2_sq / 2.5330295910584441e-09, 1.0, 1e-13);
  EXPECT_NEAR(ch.beta3_sq / 5.0393022551874206e-16, 1.0, 1e-13);
  EXPECT_NEAR(ch.sigma2 / ch.beta1_sq, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(ch.a1(0) - Complex(1, 0)), 0.0, 1e-15);
}

TEST(BuildChannels, DistanceLaws) {
  ScenarioConfig c;
  const ChannelSet a = build_channels(c);
  c.d1 *= 2;
  const ChannelSet b = build_channels(c);
  EXPECT_NEAR(a.beta1_sq / b.beta1_sq, 4.0, 1e-12);
  EXPECT_NEAR(a.beta3_sq / b.beta3_sq, 16.0, 1e-12);
}

TEST(BuildChannels, RejectsZeroDistance) {
  ScenarioConfig c;
  c.d1 = 0;
  EXPECT_THROW(build_channels(c), InvalidInput);
  c = ScenarioConfig{};
  c.d2 = 0;
  EXPECT_THROW(build_channels(c), InvalidInput);
}

TEST(ScenarioConfig, RejectsEqualAngles) {
  ScenarioConfig c;
  c.theta2 = c.theta1;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(MatchedFilter, BroadsideFourAntennas) {
  ScenarioConfig c;
  c.N = 4;
  c.theta1 = 0;
  const VectorXcd f = matched_filter(build_channels(c));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(f(k) - Complex(0.5, 0)), 0.0, 1e-15);
}

TEST(MatchedFilter, UnitNormAndCauchySchwarz) {
  const ChannelSet ch = build_channels(ScenarioConfig{});
  const VectorXcd f = matched_filter(ch);
  EXPECT_NEAR(f.norm(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.dot(ch.a1)), std::sqrt(10.0), 1e-12);
}

TEST(EstimationRate, ZeroPowerAndZeroProcessVariance) {
  ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  const VectorXcd w = ch.a1.normalized();
  EXPECT_EQ(estimation_rate(c, ch, w, 0, 0), 0.0);
  c.sigma2_proc = 0;
  EXPECT_EQ(estimation_rate(c, ch, w, c.P, 0), 0.0);
}

TEST(EstimationRate, MatchedBeamMatchesReference) {
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  EXPECT_NEAR(estimation_rate(c, ch, matched_filter(ch), c.P, 0) / 182904.24781830871, 1.0, 1e-12);
}

TEST(EstimationRate, NoAnCaseMatchesSingleTargetFormula) {
  std::mt19937_64 rng(11);
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  for (int t = 0; t < 50; ++t) {
    const VectorXcd w = test::random_cvec(rng, c.N).normalized();
    const double snr = c.sigma2_proc * c.gamma2 * c.T * std::pow(c.B, 3) * c.N * ch.beta3_sq *
                       c.P * std::norm(ch.a1.dot(w)) / ch.sigma2;
    const double ref = c.delta / c.T * std::log2(1 + snr);
    EXPECT_NEAR(estimation_rate(c, ch, w, c.P, 0), ref, 1e-10 * std::max(1.0, ref));
  }
}

TEST(SecrecyRate, IdenticalChannelsGiveZero) {
  ScenarioConfig c;
  c.theta2 = c.theta1 + 1e-3;
  c.d2 = c.d1;
  const ChannelSet ch = build_channels(c);
  ChannelSet same = ch;
  same.a2 = same.a1;
  EXPECT_EQ(secrecy_rate(c, same, same.a1.normalized(), c.P, 0), 0.0);
}

TEST(SecrecyRate, VanishingEavesdropperGain) {
  const ScenarioConfig c;
  ChannelSet ch = build_channels(c);
  const VectorXcd w = ch.a2.normalized();
  ch.beta1_sq = 0;
  const double cu = c.P * ch.beta2_sq * std::norm(ch.a2.dot(w)) / ch.sigma2;
  EXPECT_NEAR(secrecy_rate(c, ch, w, c.P, 0), c.B * std::log2(1 + cu), 1e-6);
}

TEST(SecrecyRate, ClampedWhenEavesdropperStronger) {
  const ScenarioConfig c;
  ChannelSet ch = build_channels(c);
  ch.beta2_sq = ch.beta1_sq * 1e-3;
  EXPECT_EQ(secrecy_rate(c, ch, ch.a1.normalized(), c.P, 0), 0.0);
}

TEST(SecrecyRate, GlobalPhaseInvariance) {
  std::mt19937_64 rng(5);
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  for (int t = 0; t < 50; ++t) {
    const VectorXcd w = test::random_cvec(rng, c.N).normalized();
    const Complex ph = std::polar(1.0, test::uniform(rng, 0, 2 * kPi));
    const double r0 = secrecy_rate(c, ch, w, c.P, 0);
    EXPECT_NEAR(secrecy_rate(c, ch, VectorXcd(ph * w), c.P, 0), r0, 1e-9 * std::max(1.0, r0));
  }
}

TEST(SecrecyRate, NonNegativeAndZeroWhenEveDominates) {
  std::mt19937_64 rng(8);
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  for (int t = 0; t < 200; ++t) {
    const VectorXcd w = test::random_cvec(rng, c.N).normalized();
    const Sinrs s = sinrs(ch, w, c.P, 0, std::nullopt);
    const double r = secrecy_rate(c, ch, w, c.P, 0);
    EXPECT_GE(r, 0.0);
    if (s.eve >= s.cu) EXPECT_EQ(r, 0.0);
  }
}

TEST(SrmInstance, ZeroThresholdGivesZeroAlpha) {
  ScenarioConfig c;
  c.zeta = 0;
  EXPECT_EQ(build_srm_instance(c, build_channels(c)).alpha, 0.0);
}

TEST(SrmInstance, NormOfScaledTargetChannel) {
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  const SrmInstance s = build_srm_instance(c, ch);
  EXPECT_NEAR(s.h1.squaredNorm() / (c.N * c.P * ch.beta1_sq / ch.sigma2), 1.0, 1e-13);
}

TEST(SrmInstance, AlphaMatchesReference) {
  const ScenarioConfig c;
  EXPECT_NEAR(build_srm_instance(c, build_channels(c)).alpha / 12.009298440943518, 1.0, 1e-12);
}

TEST(SrmInstance, ZetaBarMatchesReference) {
  ScenarioConfig c;
  c.zeta = 10000;
  EXPECT_NEAR(zeta_bar(c, build_channels(c)) / 127.92474717519761, 1.0, 1e-12);
}

TEST(SrmInstance, AlphaConstraintEquivalentToRateThreshold) {
  std::mt19937_64 rng(17);
  ScenarioConfig c;
  c.zeta = 20000;
  const ChannelSet ch = build_channels(c);
  const SrmInstance s = build_srm_instance(c, ch);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const VectorXcd w = test::random_cvec(rng, c.N).normalized();
    const double lhs = std::norm(s.h1.dot(w));
    const double rate = estimation_rate(c, ch, w, c.P, 0);
    if (std::abs(lhs - s.alpha) < 1e-9 * s.alpha) continue;
    EXPECT_EQ(lhs >= s.alpha, rate >= c.zeta) << "lhs=" << lhs << " alpha=" << s.alpha;
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Mrt, BroadsideIsUniform) {
  ScenarioConfig c;
  c.theta2 = 0;
  const Design d = mrt_beamformer(c, build_channels(c));
  for (int k = 0; k < c.N; ++k) {
    EXPECT_NEAR(std::abs(d.w(k) - Complex(1 / std::sqrt(10.0), 0)), 0.0, 1e-14);
  }
}

TEST(Mrt, SinrAtCommunicationUser) {
  const ScenarioConfig c;
  const ChannelSet ch = build_channels(c);
  const Design d = mrt_beamformer(c, ch);
  const Sinrs s = sinrs(ch, d.w, d.p1, d.p2, d.phi);
  EXPECT_NEAR(s.cu / (c.N * c.P * ch.beta2_sq / ch.sigma2), 1.0, 1e-12);
}

TEST(Mrt, DefaultRatesMatchReference) {
  const ScenarioConfig c;
  const Design d = mrt_beamformer(c, build_channels(c));
  EXPECT_NEAR(d.secrecy_rate / 88367513.219137728, 1.0, 1e-11);
  EXPECT_NEAR(d.estimation_rate / 6910.0277405805264, 1.0, 1e-10);
}

TEST(Mrt, NearlyFlatAtHighPower) {
  ScenarioConfig c;
  c.P = 1000;
  const double r1 = mrt_beamformer(c, build_channels(c)).secrecy_rate;
  c.P = 10000;
  const double r10 = mrt_beamformer(c, build_channels(c)).secrecy_rate;
  EXPECT_GE(r10, r1);
  EXPECT_LT((r10 - r1) / r1, 0.01);
}
