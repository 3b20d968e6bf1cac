#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"
#include "trials.hpp"
#include "vqf/basic.hpp"
#include "vqf/metrics.hpp"
#include "vqf/offline.hpp"
#include "vqf/vqf.hpp"

using namespace vqf;
using vqf::testing::bit_equal;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTs = 0.01;

TEST(Reverse, IsAnInvolution) {
  std::mt19937_64 rng(61);
  std::vector<Vec3> g, a, m;
  for (int k = 0; k < 50; ++k) {
    g.push_back(vqf::testing::random_vec(rng));
    a.push_back(vqf::testing::random_vec(rng));
    m.push_back(vqf::testing::random_vec(rng));
  }
  const auto once = reverse_run_transform(g, a, m);
  const auto twice = reverse_run_transform(once.gyr, once.acc, once.mag);
  for (int k = 0; k < 50; ++k) {
    EXPECT_TRUE(bit_equal(twice.gyr[k], g[k]));
    EXPECT_TRUE(bit_equal(twice.acc[k], a[k]));
    EXPECT_TRUE(bit_equal(twice.mag[k], m[k]));
  }
  EXPECT_TRUE(bit_equal(once.acc[0], a[49]));
}

TEST(Reverse, SingleSampleNegatesGyro) {
  const std::vector<Vec3> g{{1, -2, 3}}, a{{0, 0, 9.81}};
  const auto r = reverse_run_transform(g, a);
  EXPECT_TRUE(bit_equal(r.gyr[0], Vec3{-1, 2, -3}));
  EXPECT_TRUE(bit_equal(r.acc[0], a[0]));
  EXPECT_TRUE(r.mag.empty());
}

TEST(Reverse, StrapdownTimeReversal) {
  // integrating the transformed data walks back along the same path
  std::mt19937_64 rng(62);
  std::vector<Vec3> g;
  for (int k = 0; k < 500; ++k) g.push_back(vqf::testing::random_vec(rng, 2.0));
  BasicVqf fwd(kTs);
  std::vector<Quaternion> q(g.size() + 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    fwd.update_gyr(g[k]);
    q[k + 1] = fwd.strapdown_quat();
  }
  const auto rev = reverse_run_transform(g, std::vector<Vec3>(g.size()));
  BasicVqf bwd(kTs);
  bwd.set_strapdown_quat(q.back());
  for (std::size_t k = 0; k < g.size(); ++k) {
    bwd.update_gyr(rev.gyr[k]);
    EXPECT_TRUE(same_rotation(bwd.strapdown_quat(), q[g.size() - 1 - k], 1e-9));
  }
}

TEST(MergeBias, UninformativeBackwardPass) {
  const Vec3 b1{0.01, -0.02, 0.005}, b2{0.3, 0.3, 0.3};
  const Mat3 p1 = Mat3::diag(1e-6, 2e-6, 3e-6);
  const Mat3 p2 = Mat3::diag(1e12, 1e12, 1e12);
  EXPECT_TRUE(vqf::testing::vec_near(merge_bias(b1, p1, b2, p2), b1, 1e-9));
}

TEST(MergeBias, EqualCovariancesAverage) {
  const Vec3 b1{0.01, 0.02, 0.03}, b2{-0.03, -0.02, -0.01};
  const Mat3 p = Mat3::diag(1e-6, 1e-6, 1e-6);
  Mat3 cov;
  EXPECT_TRUE(vqf::testing::vec_near(merge_bias(b1, p, b2, p, 1e-12, &cov), {0.02, 0.02, 0.02}, 1e-15));
  // the 1e-12 floor shifts the merged variance by half the floor
  EXPECT_NEAR(cov(0, 0), 0.5e-6 + 0.5e-12, 1e-18);
}

TEST(Offline, Validation) {
  std::vector<Vec3> one(1, {0, 0, 9.81}), two(2, {0, 0, 9.81}), three(3, {0, 0, 9.81});
  EXPECT_THROW(offline_vqf(one, one, {}, kTs), std::invalid_argument);
  EXPECT_THROW(offline_vqf(two, three, {}, kTs), std::invalid_argument);
  EXPECT_THROW(offline_vqf(two, two, three, kTs), std::invalid_argument);
  auto bad = two;
  bad[1].x = std::nan("");
  EXPECT_THROW(offline_vqf(bad, two, {}, kTs), std::invalid_argument);
  EXPECT_NO_THROW(offline_vqf(two, two, {}, kTs));
}

TEST(Offline, NoiseFreeConstantRotationMatchesStrapdown) {
  // rotation about the vertical keeps gravity fixed, so no correction is needed
  const std::size_t n = 2000;
  const Vec3 w{0, 0, 0.5};
  std::vector<Vec3> gyr(n, w), acc(n, {0, 0, 9.81});
  const auto res = offline_vqf(gyr, acc, {}, kTs);
  for (std::size_t k = 0; k < n; ++k) {
    const Quaternion expected = from_angle_axis((k + 1) * kTs * norm(w), w);
    const Quaternion e = res.q6[k] * inverse(expected);
    ASSERT_LT(2 * std::acos(std::min(1.0, std::abs(e.w))), 1e-6) << k;
    ASSERT_NEAR(norm(res.q9[k]), 1.0, 1e-9);
  }
}

TEST(Offline, OutputsAreConsistent) {
  vqf::testing::TrialOptions opt;
  opt.rest_before = 5;
  opt.motion = 30;
  opt.rest_after = 5;
  opt.bias = {0.01, 0.01, -0.01};
  const auto data = synth::generate(vqf::testing::make_trial(63, opt), kTs);
  const auto res = offline_vqf(data.gyr(), data.acc(), data.mag(), kTs);
  ASSERT_EQ(res.q6.size(), data.samples.size());
  ASSERT_EQ(res.mag_disturbed.size(), data.samples.size());
  for (std::size_t k = 0; k < res.q6.size(); ++k) {
    ASSERT_NEAR(norm(res.q6[k]), 1.0, 1e-9);
    const Quaternion rel = res.q9[k] * inverse(res.q6[k]);
    ASSERT_NEAR(rel.x, 0.0, 1e-9);
    ASSERT_NEAR(rel.y, 0.0, 1e-9);
  }
}

TEST(Offline, SerialAndParallelIdentical) {
  vqf::testing::TrialOptions opt;
  opt.motion = 20;
  const auto data = synth::generate(vqf::testing::make_trial(64, opt), kTs);
  const auto a = offline_vqf(data.gyr(), data.acc(), data.mag(), kTs, {}, Execution::serial);
  const auto b = offline_vqf(data.gyr(), data.acc(), data.mag(), kTs, {}, Execution::parallel);
  for (std::size_t k = 0; k < a.q9.size(); ++k) {
    ASSERT_TRUE(bit_equal(a.q9[k], b.q9[k]));
    ASSERT_TRUE(bit_equal(a.bias[k], b.bias[k]));
  }
}

TEST(Offline, FlagsAreConjunctionOfBothPasses) {
  // field disturbance in the middle; the conjunction is never wider than the forward flags
  vqf::testing::TrialOptions opt;
  opt.motion = 60;
  opt.max_rate = 0.2;
  auto spec = vqf::testing::make_trial(65, opt);
  spec.disturbances.push_back({20.0, 15.0, {25, 0, 10}});
  const auto data = synth::generate(spec, kTs);
  const auto res = offline_vqf(data.gyr(), data.acc(), data.mag(), kTs);
  Vqf fwd(kTs);
  const auto rec = fwd.update_batch(data.gyr(), data.acc(), data.mag());
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    if (res.mag_disturbed[k]) {
      ++flagged;
      EXPECT_TRUE(rec[k].mag_disturbed);
    }
  }
  EXPECT_GT(flagged, 1000u);
}

TEST(Offline, MergedBiasNotWorseThanSinglePasses) {
  vqf::testing::TrialOptions opt;
  opt.rest_before = 10;
  opt.motion = 60;
  opt.rest_after = 10;
  opt.bias = {0.8 * kDeg, -0.6 * kDeg, 0.5 * kDeg};
  const auto data = synth::generate(vqf::testing::make_trial(66, opt), kTs);
  const auto g = data.gyr(), a = data.acc();
  const auto res = offline_vqf(g, a, {}, kTs);

  Vqf fwd(kTs);
  const auto f = fwd.update_batch(g, a);
  const auto rev = reverse_run_transform(g, a);
  Vqf bwd(kTs);
  const auto b = bwd.update_batch(rev.gyr, rev.acc);
  const std::size_t n = g.size();
  std::vector<Vec3> bf(n), bb(n);
  for (std::size_t k = 0; k < n; ++k) {
    bf[k] = f[k].bias;
    bb[k] = -b[n - 1 - k].bias;
  }
  const auto truth = data.truth.bias;
  const double merged = metrics::bias_residual_rms(res.bias, truth);
  EXPECT_LE(merged, metrics::bias_residual_rms(bf, truth));
  EXPECT_LE(merged, metrics::bias_residual_rms(bb, truth));
}

}  // namespace
