#include "sdme/mfa.hpp"
#include "sdme/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <iostream>

using namespace sdme;

namespace {

struct Series {
  std::vector<double> t;
  std::vector<MfaVector> k;
};

template <class F>
Series synthetic(F f, double t_end, double dt) {
  Series s;
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    MfaVector v = MfaVector::Zero();
    v(0) = f(t);
    v(5) = -1.0;
    s.t.push_back(t);
    s.k.push_back(v);
  }
  return s;
}

// local Bloch vectors of a two-qubit state
MfaVector local_bloch(const CMatrix& rho) {
  const Dims dims{2, 2};
  MfaVector out;
  for (std::size_t s = 0; s < 2; ++s) {
    out(3 * s + 0) = expectation(embed(pauli::x(), s, dims), rho);
    out(3 * s + 1) = expectation(embed(pauli::y(), s, dims), rho);
    out(3 * s + 2) = expectation(embed(pauli::z(), s, dims), rho);
  }
  return out;
}

}  // namespace

TEST(MfaParams, FromRates) {
  auto p = fig4_params();
  EXPECT_NEAR(p.T1a, 99.00990099009901, 1e-9);
  EXPECT_NEAR(p.T2a, 1.0 / ((0.005 + 0.001) * 1.01), 1e-9);
  EXPECT_NEAR(p.kz0a, -1.0 / 1.01, 1e-15);
  EXPECT_NEAR(p.T1b, 1.0 / (0.1 * 1.0002), 1e-9);
  EXPECT_NEAR(p.kz0b, -1.0 / 1.0002, 1e-15);
  EXPECT_NEAR(p.omega_R(), 1.0, 1e-15);
  EXPECT_TRUE(p.hartmann_hahn());
  p.Delta = 0.5;
  EXPECT_FALSE(p.hartmann_hahn());
  p.T1a = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(MfaRhs, DecouplesAtZeroCoupling) {
  auto p = fig4_params(0.0);
  Rng rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  MfaVector k;
  for (int i = 0; i < 6; ++i) k(i) = u(rng);
  MfaVector other = k;
  other.tail<3>() << u(rng), u(rng), u(rng);
  EXPECT_EQ((mfa_rhs(k, p).head<3>() - mfa_rhs(other, p).head<3>()).norm(), 0.0);
  other = k;
  other.head<3>() << u(rng), u(rng), u(rng);
  EXPECT_EQ((mfa_rhs(k, p).tail<3>() - mfa_rhs(other, p).tail<3>()).norm(), 0.0);
}

TEST(MfaRhs, SpinBFixedPoint) {
  for (double sign : {1.0, -1.0}) {
    auto p = fig4_params(0.0, sign);
    MfaVector k;
    k << 0.0, 0.0, p.kz0a, mfa_spin_b_fixed_point(p);
    EXPECT_LT(mfa_rhs(k, p).norm(), 1e-12);
    EXPECT_LE(k.tail<3>().norm(), 1.0);
  }
}

TEST(MfaRhs, MatchesFullModelOnProductStates) {
  auto p = fig4_params(0.3);
  auto eq = mfa_full_equation(p, fig4_channels(), 0.0);
  Rng rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int rep = 0; rep < 20; ++rep) {
    MfaVector k;
    for (int i = 0; i < 6; ++i) k(i) = u(rng);
    // on a product state the mean-field derivative is exact
    EXPECT_LT((local_bloch(eq.rhs(mfa_product_state(k).matrix())) - mfa_rhs(k, p)).norm(), 1e-12);
  }
}

TEST(DetectLimitCycle, SyntheticSine) {
  auto s = synthetic([](double t) { return 0.3 * std::sin(2.0 * t); }, 200.0, 0.05);
  auto r = detect_limit_cycle(s.t, s.k);
  EXPECT_EQ(r.verdict, Verdict::limit_cycle);
  EXPECT_NEAR(r.period, std::numbers::pi, 1e-3);
  EXPECT_NEAR(r.angular_frequency(), 2.0, 1e-3);
  EXPECT_NEAR(r.amplitude, 0.6, 1e-3);
  EXPECT_GE(r.periods, 10u);
}

TEST(DetectLimitCycle, ConstantIsFixedPoint) {
  auto s = synthetic([](double) { return 0.2; }, 100.0, 0.1);
  auto r = detect_limit_cycle(s.t, s.k);
  EXPECT_EQ(r.verdict, Verdict::fixed_point);
  EXPECT_STREQ(to_string(r.verdict), "fixed_point");
}

TEST(DetectLimitCycle, DecayingOscillationSettles) {
  auto s = synthetic([](double t) { return std::exp(-0.2 * t) * std::sin(t); }, 200.0, 0.05);
  EXPECT_EQ(detect_limit_cycle(s.t, s.k).verdict, Verdict::fixed_point);
}

TEST(DetectLimitCycle, TooFewPeriodsIsUndecided) {
  auto s = synthetic([](double t) { return std::sin(0.2 * t); }, 200.0, 0.05);
  auto r = detect_limit_cycle(s.t, s.k);
  EXPECT_EQ(r.verdict, Verdict::undecided);
  EXPECT_STREQ(to_string(r.verdict), "undecided");
}

TEST(DetectLimitCycle, IrregularIsUndecided) {
  auto s = synthetic([](double t) { return std::sin(t + 3.0 * std::sin(0.05 * t * t)); }, 200.0, 0.01);
  EXPECT_EQ(detect_limit_cycle(s.t, s.k).verdict, Verdict::undecided);
}

TEST(DetectLimitCycle, BadInput) {
  std::vector<double> t{0.0, 1.0};
  std::vector<MfaVector> k(2, MfaVector::Zero());
  EXPECT_THROW(detect_limit_cycle(t, k), std::invalid_argument);
  auto s = synthetic([](double) { return 0.0; }, 10.0, 0.1);
  EXPECT_THROW(detect_limit_cycle(s.t, s.k, {.settle_fraction = 1.0}), std::invalid_argument);
}

TEST(Fig4, CoupledRunIsLimitCycle) {
  auto p = fig4_params(0.1);
  auto tr = integrate_mfa(mfa_default_initial(p), p, 6000.0, 0.2);
  auto r = detect_limit_cycle(tr, {.settle_fraction = 0.6});
  EXPECT_EQ(r.verdict, Verdict::limit_cycle);
  EXPECT_NEAR(r.angular_frequency(), p.omega_a, 0.2 * p.omega_a);
  EXPECT_LE(tr.max_norm, 1.0 + 1e-6);
  std::cout << "[ info ] coupled: period " << r.period << ", k_ax peak-to-peak " << r.amplitude << "\n";
}

TEST(Fig4, UncoupledAndRedDetunedSettle) {
  for (auto p : {fig4_params(0.0), fig4_params(0.1, -1.0)}) {
    auto tr = integrate_mfa(mfa_default_initial(p), p, 6000.0, 0.2);
    auto r = detect_limit_cycle(tr, {.settle_fraction = 0.6});
    EXPECT_EQ(r.verdict, Verdict::fixed_point) << p.g << " " << p.Delta << " spread " << r.max_spread;
    EXPECT_LE(tr.max_norm, 1.0 + 1e-6);
  }
}

TEST(IntegrateMfa, NormBoundedFromRandomStarts) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto p = fig4_params(0.1);
  for (int rep = 0; rep < 10; ++rep) {
    MfaVector k;
    for (int i = 0; i < 6; ++i) k(i) = u(rng);
    k.head<3>() /= std::max(1.0, k.head<3>().norm());
    k.tail<3>() /= std::max(1.0, k.tail<3>().norm());
    EXPECT_LE(integrate_mfa(k, p, 500.0, 1.0).max_norm, 1.0 + 1e-6);
  }
}

TEST(IntegrateMfa, TableLayout) {
  auto p = fig4_params();
  auto tab = integrate_mfa(mfa_default_initial(p), p, 1.0, 0.5).table();
  EXPECT_EQ(tab.columns, (std::vector<std::string>{"t", "kax", "kay", "kaz", "kbx", "kby", "kbz"}));
  EXPECT_EQ(tab.rows.size(), 3u);
}

TEST(DetuningScan, PoliciesAndVerdicts) {
  auto tmpl = fig4_params();
  ScanSettings s;
  s.t_end = 3000.0;
  s.dt_out = 0.5;
  auto rows = detuning_scan(tmpl, {-0.2, 0.2}, {0.0}, s);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_EQ(r.report.verdict, Verdict::fixed_point);
  s.policy = ScanPolicy::fixed_omegaR;
  EXPECT_THROW(detuning_scan(tmpl, {1.5}, {0.0}, s), std::invalid_argument);
}

// Mean field factorises the state by hand; the full equation with a strong
// disentangling term should stay close to it. Only the trend is asserted.
TEST(FullModel, DisentanglementKeepsMeanFieldClose) {
  auto p = fig4_params(0.1);
  const auto ch = fig4_channels();
  MfaVector k0;
  k0 << 0.5, 0.0, -0.5, 0.3, 0.3, -0.5;
  const double t_end = 20.0;
  auto mfa = integrate_mfa(k0, p, t_end, t_end);
  IntegrationControls ctl;
  ctl.adaptive = {.atol = 1e-12, .rtol = 1e-10};
  double dev[2];
  const double gammas[] = {0.0, 5.0};
  for (int i = 0; i < 2; ++i) {
    auto full = integrate(mfa_product_state(k0), mfa_full_equation(p, ch, gammas[i]), t_end, ctl);
    dev[i] = (local_bloch(full.final_state) - mfa.k.back()).norm();
  }
  std::cout << "[ info ] |k_full - k_mfa| at t = 20: gamma_D = 0 " << dev[0] << ", gamma_D = 5 " << dev[1] << "\n";
  EXPECT_LT(dev[1], dev[0]);
}
