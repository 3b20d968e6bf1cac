#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"
#include "trials.hpp"
#include "vqf/basic.hpp"
#include "vqf/synth.hpp"
#include "vqf/vqf.hpp"

using namespace vqf;
using vqf::testing::bit_equal;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTs = 0.01;

synth::Dataset trial(std::uint64_t seed, double motion = 30.0, Vec3 bias = {0.01, -0.02, 0.015}) {
  vqf::testing::TrialOptions opt;
  opt.rest_before = 5;
  opt.motion = motion;
  opt.rest_after = 5;
  opt.bias = bias;
  return synth::generate(vqf::testing::make_trial(seed, opt), kTs);
}

TEST(Vqf, FreshStateIsIdentity) {
  Vqf f(kTs);
  EXPECT_TRUE(bit_equal(f.quat_6d(), Quaternion{}));
  EXPECT_TRUE(bit_equal(f.quat_9d(), Quaternion{}));
  const auto b = f.get_bias();
  EXPECT_TRUE(bit_equal(b.bias, Vec3{}));
  EXPECT_NEAR(b.sigma, 0.5 * kDeg, 1e-15);
}

TEST(Vqf, RejectsBadConstruction) {
  EXPECT_THROW(Vqf(0.0), std::invalid_argument);
  EXPECT_THROW(Vqf(-1.0), std::invalid_argument);
  VqfParams p;
  p.tau_acc = -1.0;
  try {
    Vqf f(kTs, p);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("tau_acc"), std::string::npos);
  }
}

TEST(Vqf, AllExtensionsOffReproducesBasicFilter) {
  const auto data = trial(1);
  Vqf full(kTs, VqfParams::basic());
  BasicVqf basic(kTs);
  for (std::size_t k = 0; k < data.samples.size(); ++k) {
    const auto& s = data.samples[k];
    const auto r = full.update(s.gyr, s.acc, s.mag);
    const auto e = basic.update(s.gyr, s.acc, s.mag);
    ASSERT_TRUE(bit_equal(r.q6, e.q6)) << k;
    ASSERT_TRUE(bit_equal(r.q9, e.q9)) << k;
    ASSERT_FALSE(r.mag_disturbed);
  }
}

TEST(Vqf, MagnetometerDoesNotTouchSixDOrBias) {
  for (std::uint64_t seed = 2; seed < 5; ++seed) {
    const auto data = trial(seed);
    Vqf with(kTs), without(kTs);
    for (const auto& s : data.samples) {
      const auto a = with.update(s.gyr, s.acc, s.mag);
      const auto b = without.update(s.gyr, s.acc);
      ASSERT_TRUE(bit_equal(a.q6, b.q6));
      ASSERT_TRUE(bit_equal(a.bias, b.bias));
      ASSERT_EQ(a.bias_sigma, b.bias_sigma);
      ASSERT_EQ(a.rest, b.rest);
    }
  }
}

TEST(Vqf, NineDDiffersOnlyByHeading) {
  const auto data = trial(5);
  Vqf f(kTs);
  for (const auto& s : data.samples) {
    const auto r = f.update(s.gyr, s.acc, s.mag);
    const Quaternion rel = r.q9 * inverse(r.q6);
    ASSERT_NEAR(rel.x, 0.0, 1e-9);
    ASSERT_NEAR(rel.y, 0.0, 1e-9);
    ASSERT_NEAR(norm(r.q6), 1.0, 1e-9);
    ASSERT_NEAR(norm(r.q9), 1.0, 1e-9);
  }
}

TEST(Vqf, StaticBiasLearnedAtRest) {
  const Vec3 bias{1 * kDeg, 0, 0};
  Vqf f(kTs);
  const Vec3 acc{0, 0, 9.81};
  for (int k = 1; k <= 650; ++k) {
    const auto r = f.update(bias, acc);
    EXPECT_EQ(r.rest, k >= 150) << k;
  }
  EXPECT_LT(norm(f.get_bias().bias - bias) / kDeg, 0.05);
}

TEST(Vqf, SigmaNonIncreasingDuringRest) {
  Vqf f(kTs);
  double prev = 1.0;
  for (int k = 0; k < 3000; ++k) {
    const auto r = f.update({0.002, -0.001, 0.003}, {0.1, 0, 9.8});
    if (r.rest) {
      EXPECT_LE(r.bias_sigma, prev + 1e-18);
      prev = r.bias_sigma;
    }
  }
}

TEST(Vqf, ZeroScaleFreezesHeading) {
  Vqf f(kTs);
  const Vec3 acc{0, 0, 9.81};
  const Vec3 field = synth::world_field(50, 68 * kDeg);
  for (int k = 0; k < 500; ++k) f.update({}, acc, field);
  // strong disturbance: 60 % norm increase, detector rejects
  const Vec3 disturbed = 1.6 * field + Vec3{20, 0, 0};
  double delta = f.basic().delta();
  for (int k = 0; k < 300; ++k) {
    const auto r = f.update({}, acc, disturbed);
    if (r.mag_disturbed) {
      EXPECT_EQ(r.delta, delta);
    }
    delta = r.delta;
  }
  EXPECT_TRUE(f.mag_detector().disturbed());
}

TEST(Vqf, RejectionDisabledNeverFlags) {
  VqfParams p;
  p.mag_dist_rejection = false;
  Vqf f(kTs, p);
  for (int k = 0; k < 500; ++k) {
    const auto r = f.update({}, {0, 0, 9.81}, Vec3{k % 2 ? 10.0 : 90.0, 5, -40});
    EXPECT_FALSE(r.mag_disturbed);
  }
}

TEST(Vqf, NonFiniteSampleIsSkipped) {
  Vqf f(kTs);
  const auto a = f.update({0.1, 0, 0}, {0, 0, 9.81});
  const auto b = f.update({std::nan(""), 0, 0}, {0, 0, 9.81});
  EXPECT_TRUE(b.skipped);
  EXPECT_TRUE(bit_equal(b.q6, a.q6));
  const auto c = f.update({0.1, 0, 0}, {0, 0, 9.81}, Vec3{0, std::numeric_limits<double>::infinity(), 0});
  EXPECT_TRUE(c.skipped);
  const auto d = f.update({0.1, 0, 0}, {0, 0, 9.81});
  EXPECT_FALSE(d.skipped);
  EXPECT_FALSE(bit_equal(d.q6, a.q6));
}

TEST(Batch, MatchesLoopBitwise) {
  std::mt19937_64 rng(51);
  std::vector<Vec3> gyr, acc, mag;
  for (int k = 0; k < 1000; ++k) {
    gyr.push_back(vqf::testing::random_vec(rng, 1.0));
    acc.push_back(Vec3{0, 0, 9.81} + vqf::testing::random_vec(rng, 2.0));
    mag.push_back(Vec3{0, 20, -45} + vqf::testing::random_vec(rng, 5.0));
  }
  Vqf a(kTs), b(kTs);
  const auto batch = a.update_batch(gyr, acc, mag);
  ASSERT_EQ(batch.size(), 1000u);
  for (int k = 0; k < 1000; ++k) {
    const auto r = b.update(gyr[k], acc[k], mag[k]);
    ASSERT_TRUE(bit_equal(r.q9, batch[k].q9));
    ASSERT_TRUE(bit_equal(r.bias, batch[k].bias));
    ASSERT_EQ(r.mag_disturbed, batch[k].mag_disturbed);
  }
}

TEST(Batch, EmptyAndMismatched) {
  Vqf f(kTs);
  EXPECT_TRUE(f.update_batch({}, {}).empty());
  std::vector<Vec3> two(2), three(3);
  EXPECT_THROW(f.update_batch(two, three), std::invalid_argument);
  EXPECT_THROW(f.update_batch(two, two, three), std::invalid_argument);
}

TEST(Batch, WithoutMagKeepsHeadingOffset) {
  const auto data = trial(6);
  Vqf f(kTs);
  const auto rec = f.update_batch(data.gyr(), data.acc());
  for (const auto& r : rec) {
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_TRUE(vqf::testing::quat_near(r.q9, r.q6, 0.0));
  }
}

TEST(SetBias, RoundTripAndValidation) {
  Vqf f(kTs);
  const Vec3 b{0.5 * kDeg, -1.0 * kDeg, 1.9 * kDeg};
  f.set_bias(b, 0.03 * kDeg);
  const auto got = f.get_bias();
  EXPECT_TRUE(bit_equal(got.bias, b));
  EXPECT_NEAR(got.sigma, 0.03 * kDeg, 1e-15);
  EXPECT_THROW(f.set_bias({3 * kDeg, 0, 0}, 0.1), std::invalid_argument);
  EXPECT_THROW(f.set_bias({0, 0, 0}, -1.0), std::invalid_argument);
}

TEST(SetBias, ConvergedStartAdoptsMotionBiasSlowly) {
  vqf::testing::TrialOptions opt;
  opt.motion = 60;
  opt.bias = {1 * kDeg, 1 * kDeg, 0};
  opt.noisy = false;
  const auto data = synth::generate(vqf::testing::make_trial(8, opt), kTs);
  Vqf fresh(kTs), converged(kTs);
  converged.set_bias({}, 0.03 * kDeg);
  for (const auto& s : data.samples) {
    fresh.update(s.gyr, s.acc);
    converged.update(s.gyr, s.acc);
  }
  const double e_fresh = norm(fresh.get_bias().bias - opt.bias);
  const double e_conv = norm(converged.get_bias().bias - opt.bias);
  EXPECT_LT(e_fresh, e_conv);
}

}  // namespace
