#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "test_util.hpp"
#include "vqf/bias.hpp"

using namespace vqf;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTs = 0.01;

Eigen::Matrix3d to_eigen(const Mat3& m) {
  Eigen::Matrix3d e;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) e(r, c) = m(r, c);
  }
  return e;
}

TEST(KfParams, ValuesAtTenMilliseconds) {
  const auto p = bias_kf_params(kTs);
  const double deg2 = kDeg * kDeg;
  EXPECT_NEAR(p.v / deg2, 1e-6, 1e-18);
  EXPECT_NEAR(p.w_rest / deg2, 0.8109, 1e-10);
  EXPECT_NEAR(p.w_motion / deg2, 100.01, 1e-8);
  EXPECT_NEAR(p.p0 / deg2, 0.25, 1e-15);
  EXPECT_THROW(bias_kf_params(0.0), std::invalid_argument);
}

TEST(BiasSigma, Examples) {
  const double d2 = kDeg * kDeg;
  EXPECT_NEAR(bias_sigma(Mat3::diag(4 * d2, d2, d2)) / kDeg, 2.0, 1e-12);
  EXPECT_EQ(bias_sigma(Mat3{}), 0.0);
}

TEST(BiasSigma, BoundsLargestEigenvalue) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a(r, c) = n(rng);
    }
    const Eigen::Matrix3d p = a * a.transpose();
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m(r, c) = p(r, c);
    }
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(p).eigenvalues().maxCoeff();
    EXPECT_GE(bias_sigma(m), std::sqrt(lmax) - 1e-12);
  }
}

TEST(Kalman, UncertaintyGrowsWithoutUpdates) {
  auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  f.set_state({}, Mat3{});
  for (int k = 0; k < 10000; ++k) f.predict();
  EXPECT_NEAR(std::sqrt(f.covariance()(0, 0)) / kDeg, 0.1, 1e-9);
}

TEST(Kalman, RestUpdatesConverge) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  const Vec3 y{1 * kDeg, 0, 0};
  for (int k = 0; k < 200000; ++k) {
    f.predict();
    ASSERT_TRUE(f.correct(y, Mat3::identity(), {kf.w_rest, kf.w_rest, kf.w_rest}));
  }
  EXPECT_TRUE(vqf::testing::vec_near(f.bias(), y, 1e-6 * kDeg));
  // steady-state Riccati solution is exactly sigma_rest^2 after each update
  EXPECT_NEAR(f.sigma() / kDeg, 0.03, 1e-6);
}

TEST(Kalman, MotionUpdatesConvergeHorizontally) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  const double wv = kf.w_motion / 1e-4;
  for (int k = 0; k < 200000; ++k) {
    f.predict();
    f.correct({0, 0, 0}, Mat3::identity(), {kf.w_motion, kf.w_motion, wv});
  }
  EXPECT_NEAR(std::sqrt(f.covariance()(0, 0)) / kDeg, 0.1, 1e-4);
  EXPECT_NEAR(std::sqrt(f.covariance()(1, 1)) / kDeg, 0.1, 1e-4);
  EXPECT_GT(f.covariance()(2, 2), f.covariance()(0, 0));
}

int steps_to_63_percent(double w, const Mat3& p_start) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  f.set_state({}, p_start);
  const Vec3 y{1 * kDeg, 0, 0};
  for (int k = 1; k < 10000000; ++k) {
    f.predict();
    f.correct(y, Mat3::identity(), {w, w, w});
    if (f.bias().x >= (1 - std::exp(-1.0)) * kDeg) return k;
  }
  return -1;
}

TEST(Kalman, RestAdoptsStepFasterThanMotion) {
  const auto kf = bias_kf_params(kTs);
  for (double sigma : {0.5, 0.1, 0.03}) {
    const double p = sigma * sigma * kDeg * kDeg;
    const int rest = steps_to_63_percent(kf.w_rest, Mat3::diag(p, p, p));
    const int motion = steps_to_63_percent(kf.w_motion, Mat3::diag(p, p, p));
    ASSERT_GT(rest, 0);
    ASSERT_GT(motion, 0);
    EXPECT_LT(rest, motion) << sigma;
  }
}

TEST(Kalman, RestShrinksTraceFasterThanMotion) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman rest(kf, 2 * kDeg), motion(kf, 2 * kDeg);
  for (int k = 0; k < 1000; ++k) {
    rest.predict();
    motion.predict();
    rest.correct({}, Mat3::identity(), {kf.w_rest, kf.w_rest, kf.w_rest});
    motion.correct({}, Mat3::identity(), {kf.w_motion, kf.w_motion, kf.w_motion});
    const auto tr = [](const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); };
    EXPECT_LT(tr(rest.covariance()), tr(motion.covariance()));
  }
}

TEST(Kalman, ClipsInnovationAndEstimate) {
  const auto kf = bias_kf_params(kTs);
  const double clip = 2 * kDeg;
  BiasKalman f(kf, clip);
  const double huge = 100 * kDeg;
  f.set_state({}, Mat3::diag(1.0, 1.0, 1.0));  // gain close to one
  f.correct({huge, -huge, huge}, Mat3::identity(), {1e-9, 1e-9, 1e-9});
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(f.bias()[i]), clip + 1e-15);
  // one update from zero moves at most by K * clip even though y is huge
  BiasKalman g(kf, clip);
  g.set_state({}, Mat3::diag(1e-6, 1e-6, 1e-6));
  g.correct({huge, 0, 0}, Mat3::identity(), {1e-6, 1e-6, 1e-6});
  EXPECT_NEAR(g.bias().x, 0.5 * clip, 1e-12);
}

TEST(Kalman, CovarianceStaysSymmetricPsd) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  std::mt19937_64 rng(32);
  for (int k = 0; k < 5000; ++k) {
    f.predict();
    const Mat3 c = to_rotation_matrix(vqf::testing::random_quat(rng));
    f.correct(vqf::testing::random_vec(rng, 0.1), c, {kf.w_motion, kf.w_rest, kf.w_motion / 1e-4});
    const Mat3& p = f.covariance();
    for (int r = 0; r < 3; ++r) {
      for (int cc = 0; cc < 3; ++cc) ASSERT_EQ(p(r, cc), p(cc, r));
    }
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(to_eigen(p)).eigenvalues().minCoeff();
    ASSERT_GE(lmin, -1e-12);
    for (int i = 0; i < 3; ++i) ASSERT_LE(std::abs(f.bias()[i]), 2 * kDeg);
  }
}

TEST(Kalman, SingularInnovationCovarianceSkipsUpdate) {
  const auto kf = bias_kf_params(kTs);
  BiasKalman f(kf, 2 * kDeg);
  const Mat3 p = f.covariance();
  EXPECT_FALSE(f.correct({0.01, 0, 0}, Mat3{}, {0, 0, 0}));
  EXPECT_EQ(f.covariance(), p);
  EXPECT_TRUE(vqf::testing::bit_equal(f.bias(), Vec3{}));
}

TEST(RestDetector, ConstantInputDetectedAfterMinTime) {
  RestDetector r(kTs, VqfParams{});
  for (int k = 1; k <= 200; ++k) {
    const bool rest = r.step({0.001, 0, -0.002}, {0.1, 0.2, 9.8});
    EXPECT_EQ(rest, k >= 150) << k;
  }
  EXPECT_NEAR(r.rest_time(), 2.0, 1e-12);
}

TEST(RestDetector, SpikeDelaysDetection) {
  const VqfParams params;
  RestDetector r(kTs, params);
  // oracle: replay the same 0.5 s filter on the spike alone
  const LpfDesign d = design_lowpass(params.rest_filter_tau, kTs);
  LpfState s;
  int last_loud = -1;
  std::vector<bool> got;
  for (int k = 0; k < 600; ++k) {
    const double g = k == 100 ? 10 * kDeg : 0.0;
    const double lp = lpf_step(s, d, g);
    if (std::abs(g - lp) >= 2 * kDeg) last_loud = k;
    got.push_back(r.step({g, 0, 0}, {0, 0, 9.81}));
  }
  ASSERT_EQ(last_loud, 100);
  for (int k = 0; k < 600; ++k) {
    const bool expected = (k < 100 && k + 1 >= 150) || (k > last_loud && k - last_loud >= 150);
    EXPECT_EQ(got[k], expected) << k;
  }
}

TEST(RestDetector, OscillatingAccelerationNeverRest) {
  RestDetector r(kTs, VqfParams{});
  for (int k = 0; k < 2000; ++k) {
    const double t = k * kTs;
    EXPECT_FALSE(r.step({0, 0, 0}, {std::sin(2 * std::numbers::pi * 2.0 * t), 0, 9.81}));
  }
}

TEST(RestDetector, NonFiniteResets) {
  RestDetector r(kTs, VqfParams{});
  for (int k = 0; k < 200; ++k) r.step({0, 0, 0}, {0, 0, 9.81});
  EXPECT_TRUE(r.at_rest());
  EXPECT_FALSE(r.step({std::nan(""), 0, 0}, {0, 0, 9.81}));
  EXPECT_EQ(r.rest_time(), 0.0);
}

TEST(RestDetector, ImplausibleRateIsNotRest) {
  // a constant 5 deg/s rotation has no deviation but cannot be a bias
  RestDetector r(kTs, VqfParams{});
  for (int k = 0; k < 500; ++k) EXPECT_FALSE(r.step({0, 0, 5 * kDeg}, {0, 0, 9.81}));
}

TEST(Estimator, RestModeUsesFilteredGyro) {
  BiasEstimator est(kTs, VqfParams{});
  const Vec3 g{1 * kDeg, -0.5 * kDeg, 0.2 * kDeg};
  for (int k = 0; k < 3000; ++k) {
    EXPECT_EQ(est.step(Quaternion{}, Vec3{0, 0, 1}, g, true), BiasEstimator::Mode::rest);
  }
  EXPECT_TRUE(vqf::testing::vec_near(est.bias(), g, 0.005 * kDeg));
}

TEST(Estimator, RespectsEnableFlags) {
  VqfParams p;
  p.rest_bias_est = false;
  BiasEstimator est(kTs, p);
  EXPECT_EQ(est.step(Quaternion{}, Vec3{0, 0, 1}, {}, true), BiasEstimator::Mode::motion);
  p.motion_bias_est = false;
  BiasEstimator none(kTs, p);
  EXPECT_EQ(none.step(Quaternion{}, Vec3{0, 0, 1}, {}, true), BiasEstimator::Mode::none);
  VqfParams q;
  q.motion_bias_est = false;
  BiasEstimator rest_only(kTs, q);
  EXPECT_EQ(rest_only.step(Quaternion{}, Vec3{0, 0, 1}, {}, false), BiasEstimator::Mode::none);
}

TEST(Estimator, SigmaNonIncreasingDuringRest) {
  BiasEstimator est(kTs, VqfParams{});
  double prev = est.sigma();
  for (int k = 0; k < 5000; ++k) {
    est.step(Quaternion{}, Vec3{0, 0, 1}, {0.3 * kDeg, 0, 0}, true);
    EXPECT_LE(est.sigma(), prev + 1e-18);
    prev = est.sigma();
  }
}

}  // namespace
