// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "illumdiff/ddim.hpp"
#include "illumdiff/error.hpp"
#include "illumdiff/presets.hpp"
#include "illumdiff/rng.hpp"
#include "illumdiff/sampler.hpp"
#include "illumdiff/schedule.hpp"
#include "illumdiff/score.hpp"

namespace illumdiff {
namespace {

const VpSchedule kSchedule(0.1, 20.0, 100);

// log of the unnormalized mixture density, summed term by term
double mixture_log_density(const std::vector<ImageTensor>& data, const ImageTensor& x, double t) {
  const double m = std::exp(-0.25 * t * t * (20.0 - 0.1) - 0.5 * t * 0.1);
  const double v = 1.0 - m * m;
  double s = 0.0;
  for (const auto& a : data) s += std::exp(-squared_norm(x - m * a) / (2 * v));
  return std::log(s);
}

TEST(Schedule, MeanCoefficientMatchesQuadrature) {
  // m(t) = exp(-1/2 * integral of beta over [0, t]); midpoint rule with many panels
  for (double t : {0.1, 0.5, 1.0}) {
    const int n = 20000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += kSchedule.beta((i + 0.5) * t / n) * t / n;
    EXPECT_NEAR(kSchedule.mean_coeff(t), std::exp(-0.5 * integral), 1e-12);
  }
  // integral of beta over [0, 1] is (0.1 + 20) / 2 = 10.05
  EXPECT_NEAR(kSchedule.mean_coeff(1.0), std::exp(-10.05 / 2), 1e-15);
  EXPECT_EQ(kSchedule.mean_coeff(0.0), 1.0);
  EXPECT_EQ(kSchedule.variance(0.0), 0.0);
}

TEST(Schedule, Monotone) {
  double prev_m = 1.0;
  double prev_v = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = k / 100.0;
    EXPECT_LT(kSchedule.mean_coeff(t), prev_m);
    EXPECT_GT(kSchedule.variance(t), prev_v);
    EXPECT_LT(kSchedule.variance(t), 1.0);
    EXPECT_NEAR(kSchedule.variance(t), 1.0 - std::pow(kSchedule.mean_coeff(t), 2), 1e-15);
    prev_m = kSchedule.mean_coeff(t);
    prev_v = kSchedule.variance(t);
  }
  EXPECT_GT(kSchedule.variance(1e-9), 0.0);
}

TEST(Schedule, Validation) {
  EXPECT_THROW(VpSchedule(-0.1, 20, 10), ParameterError);
  EXPECT_THROW(VpSchedule(0.1, 0.0, 10), ParameterError);
  EXPECT_THROW(VpSchedule(0.1, 20, -1), ParameterError);
}

TEST(Perturb, EndpointsAndDomain) {
  CounterRng rng(1, 0);
  const ImageTensor x0 = rng.uniform_image({3, 3, 3}, 0, 1);
  EXPECT_EQ(perturb(x0, 0.0, kSchedule, rng), x0);
  EXPECT_THROW(perturb(x0, 1.5, kSchedule, rng), ParameterError);
  EXPECT_THROW(perturb(x0, -0.1, kSchedule, rng), ParameterError);
}

TEST(Perturb, MonteCarloMoments) {
  const ImageTensor x0(1, 2, 1, 0.8);
  CounterRng rng(2, 0);
  const double t = 0.5;
  const int n = 100000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = perturb(x0, t, kSchedule, rng)[1];
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  const double vt = kSchedule.variance(t);
  EXPECT_NEAR(mean, kSchedule.mean_coeff(t) * 0.8, 4.0 * std::sqrt(vt / n));
  EXPECT_NEAR(var, vt, 0.05 * vt);
}

TEST(EmpiricalScore, SinglePointIsGaussianScore) {
  CounterRng rng(3, 0);
  const ImageTensor a = rng.uniform_image({2, 2, 3}, 0, 1);
  const ImageTensor x = rng.uniform_image({2, 2, 3}, -1, 1);
  const EmpiricalScore s({a}, kSchedule);
  const double t = 0.3;
  const double m = kSchedule.mean_coeff(t);
  const double v = kSchedule.variance(t);
  const ImageTensor got = s.score(x, t);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], (m * a[i] - x[i]) / v, 1e-12);
  const ImageTensor den = tweedie_denoise(x, t, s);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(den[i], a[i], 1e-12);
}

TEST(EmpiricalScore, SymmetricPairCancelsPerpendicular) {
  ImageTensor a(1, 2, 1);
  ImageTensor b(1, 2, 1);
  a[0] = 0.2;
  a[1] = 0.8;
  b[0] = 0.8;
  b[1] = 0.2;
  ImageTensor x(1, 2, 1, 0.3);
  const EmpiricalScore s({a, b}, kSchedule);
  const ImageTensor g = s.score(x, 0.4);
  EXPECT_NEAR(g[0], g[1], 1e-12);
}

TEST(EmpiricalScore, MatchesFiniteDifferenceOfDensity) {
  std::vector<ImageTensor> data;
  for (auto [p, q] : {std::pair{0.1, 0.9}, std::pair{0.5, 0.4}, std::pair{0.95, 0.2}}) {
    ImageTensor d(1, 2, 1);
    d[0] = p;
    d[1] = q;
    data.push_back(d);
  }
  const EmpiricalScore s(data, kSchedule);
  ImageTensor x(1, 2, 1);
  x[0] = 0.12;
  x[1] = -0.3;
  const double t = 0.5;
  const ImageTensor got = s.score(x, t);
  ImageTensor fd(1, 2, 1);
  const double h = 1e-5;
  for (std::size_t i = 0; i < 2; ++i) {
    ImageTensor xp = x;
    ImageTensor xm = x;
    xp[i] += h;
    xm[i] -= h;
    fd[i] = (mixture_log_density(data, xp, t) - mixture_log_density(data, xm, t)) / (2 * h);
  }
  EXPECT_LT(relative_l2_error(got, fd), 1e-5);
}

TEST(EmpiricalScore, StableFarFromData) {
  const ImageTensor a(8, 8, 3, 0.0);
  const ImageTensor b(8, 8, 3, 1.0);
  const EmpiricalScore s({a, b}, kSchedule);
  const ImageTensor x(8, 8, 3, 40.0);
  EXPECT_TRUE(s.score(x, 0.01).all_finite());
  const auto w = s.weights(x, 0.01);
  EXPECT_NEAR(w[1], 1.0, 1e-12);
}

TEST(EmpiricalScore, DenoiserNearAPointAtSmallTime) {
  CounterRng rng(5, 0);
  const ImageTensor a = rng.uniform_image({2, 2, 3}, 0, 1);
  const ImageTensor b = rng.uniform_image({2, 2, 3}, 0, 1);
  const EmpiricalScore s({a, b}, kSchedule);
  const double t = 0.02;
  ImageTensor x = kSchedule.mean_coeff(t) * a;
  x[0] += 0.01;
  const ImageTensor den = tweedie_denoise(x, t, s);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(den[i], a[i], 1e-3 + std::abs(x[i] - a[i]));
  EXPECT_LT(std::sqrt(squared_norm(den - a) / a.size()), 1e-2);
  EXPECT_NEAR(s.weights(x, t)[0], 1.0, 1e-6);
}

TEST(EmpiricalScore, SmallVarianceLimitIsIdentity) {
  const ImageTensor a(1, 1, 1, 0.4);
  const EmpiricalScore s({a}, kSchedule);
  ImageTensor x(1, 1, 1, 0.9);
  EXPECT_EQ(tweedie_denoise(x, 0.0, s), x);
}

TEST(EmpiricalScore, Validation) {
  EXPECT_THROW(EmpiricalScore({}, kSchedule), ParameterError);
  EXPECT_THROW(EmpiricalScore({ImageTensor(2, 2, 3), ImageTensor(2, 3, 3)}, kSchedule), ShapeError);
  const EmpiricalScore s({ImageTensor(2, 2, 3)}, kSchedule);
  EXPECT_THROW(s.score(ImageTensor(2, 2, 3), 0.0), ParameterError);
  EXPECT_THROW(s.score(ImageTensor(3, 2, 3), 0.5), ShapeError);
}

TEST(GaussianScore, ClosedForm) {
  const ImageTensor mean(2, 2, 1, 0.3);
  const GaussianScore s(mean, 0.04, kSchedule);
  const double t = 0.6;
  const double m = kSchedule.mean_coeff(t);
  const double v = kSchedule.variance(t);
  const ImageTensor x(2, 2, 1, -0.2);
  EXPECT_NEAR(s.score(x, t)[3], (m * 0.3 + 0.2) / (m * m * 0.04 + v), 1e-14);
}

TEST(Sampler, GaussianMoments) {
  const VpSchedule sched(0.1, 20.0, 500);
  CounterRng rng(6, 0);
  const ImageTensor a = rng.uniform_image({2, 2, 3}, 0.3, 0.7);
  const double sigma2 = 0.01;
  const GaussianScore s(a, sigma2, sched);
  const auto runs = sample_chains(s, nullptr, sched, 11, 256, 1);
  ImageTensor mean = ImageTensor::like(a);
  for (const auto& r : runs) mean += r.final;
  mean *= 1.0 / 256.0;
  double var = 0.0;
  for (const auto& r : runs) var += squared_norm(r.final - mean);
  var /= 255.0 * a.size();
  EXPECT_LT(relative_l2_error(mean, a), 0.05);
  const double target = sigma2 + sched.variance(1.0 / 500);
  EXPECT_NEAR(var, target, 0.15 * target);
}

TEST(Sampler, DeterministicAcrossThreadCounts) {
  const VpSchedule sched(0.1, 20.0, 40);
  const auto data = dataset_images(make_dataset(1, 8, desk_recipe()));
  const EmpiricalScore s(data, sched);
  const auto one = sample_chains(s, nullptr, sched, 5, 4, 1);
  const auto many = sample_chains(s, nullptr, sched, 5, 4, 3);
  ASSERT_EQ(one.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(one[i].final, many[i].final);
    EXPECT_EQ(one[i].chain, static_cast<std::uint64_t>(i));
  }
  EXPECT_NE(one[0].final, one[1].final);
  EXPECT_EQ(reverse_sample_guided(s, nullptr, sched, 5, 2).final, one[2].final);
}

TEST(Sampler, ZeroGuidanceIsBitwiseUnguided) {
  const VpSchedule sched(0.1, 20.0, 30);
  const auto data = dataset_images(make_dataset(1, 8, desk_recipe()));
  const EmpiricalScore s(data, sched);
  GuidanceConfig g;
  g.lambda_i = 0.0;
  g.lambda_r = 0.0;
  g.target_illum = compose_prompt(side_prompt(M_PI, 32, 32), 32, 32);
  const auto a = reverse_sample_guided(s, &g, sched, 3);
  const auto b = reverse_sample_guided(s, nullptr, sched, 3);
  EXPECT_EQ(a.final, b.final);
  EXPECT_TRUE(a.energy_trace.empty());
}

TEST(Sampler, GuidedRecordsTraceAndLowersIllumination) {
  const VpSchedule sched(0.1, 20.0, 60);
  const auto data = dataset_images(make_dataset(1, 32, desk_recipe()));
  const EmpiricalScore s(data, sched);
  GuidanceConfig g;
  g.lambda_r = 0.0;
  g.target_illum = compose_prompt(side_prompt(M_PI, 32, 32), 32, 32);
  double guided = 0.0;
  double plain = 0.0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto a = reverse_sample_guided(s, &g, sched, seed);
    ASSERT_EQ(a.energy_trace.size(), 60u);
    EXPECT_EQ(a.energy_trace.front().step, 0);
    EXPECT_DOUBLE_EQ(a.energy_trace.front().t, 1.0);
    guided += eval_energy(a.final, g).illum_term;
    plain += eval_energy(reverse_sample_guided(s, nullptr, sched, seed).final, g).illum_term;
  }
  EXPECT_LT(guided, plain);
}

TEST(Sampler, ClipsLargeGradients) {
  const VpSchedule sched(0.1, 20.0, 20);
  const auto data = dataset_images(make_dataset(1, 4, desk_recipe()));
  const EmpiricalScore s(data, sched);
  GuidanceConfig g;
  g.lambda_i = 1e7;
  g.lambda_r = 0.0;
  g.target_illum = ImageTensor(32, 32, 1, 1.0);
  const auto run = reverse_sample_guided(s, &g, sched, 1);
  EXPECT_GT(run.clipped_steps, 0);
  EXPECT_TRUE(run.final.all_finite());
}

TEST(Sampler, GuidanceGradientChainOnDenoised) {
  const VpSchedule sched(0.1, 20.0, 10);
  const ImageTensor a(4, 4, 3, 0.5);
  const GaussianScore s(a, 0.02, sched);
  GuidanceConfig g;
  g.lambda_r = 0.0;
  g.clip_factor = 0.0;
  g.target_illum = ImageTensor(4, 4, 1, 0.2);
  CounterRng rng(2, 0);
  const ImageTensor x = rng.normal_image({4, 4, 3});
  const double t = 0.4;
  const ImageTensor sc = s.score(x, t);
  const ImageTensor grad = guidance_gradient(x, t, sc, sched, g, nullptr, nullptr);
  const ImageTensor xhat = tweedie_denoise(x, t, s);
  const ImageTensor expect = (1.0 / sched.mean_coeff(t)) * grad_energy(xhat, g);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(grad[i], expect[i], 1e-12);
  g.eval_point = EvalPoint::on_sample;
  EXPECT_EQ(guidance_gradient(x, t, sc, sched, g, nullptr, nullptr), grad_energy(x, g));
}

class NanAfter final : public ScoreProvider {
 public:
  NanAfter(VpSchedule schedule, double t_bad) : ScoreProvider(schedule), t_bad_(t_bad) {}
  ImageTensor score(const ImageTensor& x, double t) const override {
    check_input(x, t);
    ImageTensor out = -1.0 * x;
    if (t < t_bad_) out[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  Shape shape() const override { return {2, 2, 3}; }

 private:
  double t_bad_;
};

TEST(Sampler, NanAbortsWithStepIndex) {
  const VpSchedule sched(0.1, 20.0, 10);
  const NanAfter s(sched, 0.55);
  try {
    reverse_sample_guided(s, nullptr, sched, 0);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.step(), 5);  // first step at t = 0.5
  }
  EXPECT_THROW(ddim_sample(s, sched, ImageTensor(2, 2, 3, 0.1)), NumericError);
}

TEST(Sampler, RejectsScheduleMismatch) {
  const GaussianScore s(ImageTensor(2, 2, 3), 0.1, VpSchedule(0.1, 20.0, 10));
  EXPECT_THROW(reverse_sample_guided(s, nullptr, VpSchedule(0.2, 20.0, 10), 0), ParameterError);
  EXPECT_THROW(reverse_sample_guided(s, nullptr, VpSchedule(0.1, 20.0, 0), 0), ParameterError);
}

TEST(Ddim, PointMassConverges) {
  CounterRng rng(8, 0);
  const ImageTensor a = rng.uniform_image({4, 4, 3}, 0, 1);
  const EmpiricalScore s({a}, kSchedule);
  const ImageTensor start = rng.normal_image(a.shape());
  const auto run = ddim_sample(s, kSchedule, start);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(run.final[i], a[i], 1e-3);
  EXPECT_EQ(ddim_sample(s, kSchedule, start).final, run.final);
}

TEST(Ddim, ZeroStepsIsIdentity) {
  const VpSchedule none(0.1, 20.0, 0);
  const ImageTensor x(2, 2, 3, 0.25);
  const GaussianScore s(x, 0.1, none);
  EXPECT_EQ(ddim_invert(x, s, none), x);
  EXPECT_EQ(ddim_sample(s, none, x).final, x);
}

TEST(Ddim, RoundTripOnDatasetMember) {
  const auto data = dataset_images(make_dataset(2, 16, desk_recipe()));
  const EmpiricalScore s(data, kSchedule);
  const ImageTensor latent = ddim_invert(data[5], s, kSchedule);
  EXPECT_GT(psnr(data[5], ddim_sample(s, kSchedule, latent).final), 40.0);
}

TEST(Ddim, RoundTripOnSmoothDensityHeldOut) {
  const auto data = dataset_images(make_dataset(2, 16, desk_recipe()));
  ImageTensor mean = ImageTensor::like(data[0]);
  for (const auto& d : data) mean.add_scaled(d, 1.0 / data.size());
  const GaussianScore s(mean, 0.05, kSchedule);
  const ImageTensor held_out = make_dataset(99, 3, desk_recipe())[2].image;
  const ImageTensor member = data[0];
  for (const ImageTensor& x : {held_out, member}) {
    EXPECT_GT(psnr(x, ddim_sample(s, kSchedule, ddim_invert(x, s, kSchedule)).final), 40.0);
  }
}

}  // namespace
}  // namespace illumdiff
