#include <gtest/gtest.h>

#include <cmath>

#include "strainlim/analysis.hpp"
#include "strainlim/errors.hpp"

using namespace strainlim;

namespace {

const SymTensor kStress = 0.5 * SymTensor::diag(1, 0.5, -0.25);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

FamilySpec density(FamilyKind kind) {
  FamilySpec f = kind == FamilyKind::density_modulus_reciprocal ? FamilySpec::density_reciprocal(1, 0.3, 0.3, 0.5, 1)
                                                                : FamilySpec::density_direct(1, 0.3, 0.3, 0.5, 1);
  f.delta_max = 1.0 / 64;
  return f;
}

ConvergenceOptions report_policy() {
  ConvergenceOptions o;
  o.domain = DomainPolicy::report;
  return o;
}

struct Reference {
  double full, lead, stress, strain;
};

}  // namespace

TEST(FitOrder, ExactPowerLaws) {
  std::vector<double> d, r2, r1;
  for (double x : default_delta_ladder()) {
    d.push_back(x);
    r2.push_back(x * x);
    r1.push_back(3 * x);
  }
  EXPECT_NEAR(fit_order(d, r2), 2.0, 1e-10);
  EXPECT_NEAR(fit_order(d, r1), 1.0, 1e-10);
}

TEST(FitOrder, PerturbedPowerLaw) {
  std::vector<double> d, r;
  for (double x : default_delta_ladder()) {
    d.push_back(x);
    r.push_back(x * x * (1 + 0.1 * std::sin(std::log(x))));
  }
  const double s = fit_order(d, r);
  EXPECT_GE(s, 1.8);
  EXPECT_LE(s, 2.2);
}

TEST(FitOrder, ZerosAndUnderdetermined) {
  const std::vector<double> d{0.1, 0.05, 0.025, 0.0125, 0.00625};
  EXPECT_EQ(code_of([&] { fit_order(d, std::vector<double>(5, 0.0)); }), ErrorCode::AllZeroResiduals);
  EXPECT_EQ(code_of([&] { fit_order(std::vector<double>{0.1, 0.05, 0.025}, std::vector<double>{1, 2, 3}); }),
            ErrorCode::FitUnderdetermined);
  EXPECT_EQ(code_of([&] { fit_order(d, std::vector<double>{0.01, 0, 0, 0, 1e-5}); }), ErrorCode::FitUnderdetermined);
  // A single exact zero is dropped, the rest still fit.
  EXPECT_NEAR(fit_order(d, std::vector<double>{0.01, 0.0025, 0, 0.0125 * 0.0125, 0.00625 * 0.00625}), 2.0, 1e-10);
  EXPECT_THROW(fit_order(d, std::vector<double>{1, 2, 3, 4}), Error);
  EXPECT_THROW(fit_order(d, std::vector<double>{1, -2, 3, 4, 5}), Error);
}

TEST(Richardson, PairwiseOrders) {
  const std::vector<double> d{0.1, 0.05, 0.025};
  const auto o = richardson_orders(d, std::vector<double>{0.01, 0.0025, 0.000625});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_NEAR(o[0], 2.0, 1e-12);
  EXPECT_NEAR(o[1], 2.0, 1e-12);
}

TEST(DeltaLadder, Default) {
  const auto d = default_delta_ladder();
  ASSERT_EQ(d.size(), 8u);
  EXPECT_EQ(d.front(), 1.0 / 64);
  EXPECT_EQ(d.back(), 1.0 / 8192);
}

TEST(RunConvergence, PowerLawOrderTwo) {
  FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  f.c = 2.0;  // room for |diag(1, 0.5, −0.25)| ≈ 1.146
  const auto ladder = default_delta_ladder();
  const ConvergenceReport r = run_convergence(f, SymTensor::diag(1, 0.5, -0.25), RotationSpec{}, ladder);
  ASSERT_EQ(r.successful_rows(), 8u);
  ASSERT_TRUE(r.fitted_order_full);
  EXPECT_GE(*r.fitted_order_full, 1.9);
  EXPECT_LE(*r.fitted_order_full, 2.1);
  EXPECT_GE(*r.fitted_order_stress, 0.9);
  EXPECT_LE(*r.fitted_order_stress, 1.1);
  for (double o : r.richardson_full) EXPECT_NEAR(std::exp2(o), 4.0, 0.4);
  for (std::size_t i = 1; i < r.records.size(); ++i) EXPECT_LT(r.records[i].delta, r.records[i - 1].delta);
  for (const auto& row : r.records) {
    EXPECT_EQ(row.residual_full, row.residual_leading);
    EXPECT_TRUE(row.in_domain);
    EXPECT_EQ(row.solver_iterations, 1);
  }
}

TEST(RunConvergence, MatchesIndependentPipeline) {
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  const ConvergenceReport r = run_convergence(f, kStress, RotationSpec{}, default_delta_ladder());
  EXPECT_NEAR(r.records.front().residual_full, 0.00022114133368230878, 1e-8 * 0.00022114133368230878);
  EXPECT_NEAR(r.records.back().residual_full, 1.3510088922724154e-08, 1e-8 * 1.3510088922724154e-08);
}

TEST(RunConvergence, FittedOrdersMatchReference) {
  const auto ladder = default_delta_ladder();
  struct Case {
    FamilySpec family;
    bool hencky;
    Reference want;
  };
  const std::vector<Case> cases{
      {FamilySpec::power_law(1, 2), false, {1.999837, 1.999837, 0.999593, 2.000362}},
      {FamilySpec::power_law(1, 2), true, {2.000021, 2.000021, 1.000081, 2.000556}},
      {density(FamilyKind::density_modulus_reciprocal), false, {1.999589, 1.99933, 0.999332, 1.999961}},
      {density(FamilyKind::density_modulus_reciprocal), true, {1.999879, 1.999854, 1.000159, 2.000256}},
      {density(FamilyKind::density_modulus_direct), false, {1.999401, 1.999391, 0.999388, 2.000025}},
      {density(FamilyKind::density_modulus_direct), true, {1.999873, 1.999865, 1.00018, 2.000279}},
  };
  for (const Case& c : cases) {
    const ConvergenceReport r = c.hencky ? run_convergence_hencky(c.family, kStress, RotationSpec{}, ladder, report_policy())
                                         : run_convergence(c.family, kStress, RotationSpec{}, ladder, report_policy());
    SCOPED_TRACE(to_string(c.family.kind) + (c.hencky ? " hencky" : " green"));
    ASSERT_EQ(r.successful_rows(), 8u);
    EXPECT_NEAR(*r.fitted_order_full, c.want.full, 1e-4);
    EXPECT_NEAR(*r.fitted_order_leading, c.want.lead, 1e-4);
    EXPECT_NEAR(*r.fitted_order_stress, c.want.stress, 1e-4);
    EXPECT_NEAR(*r.fitted_order_strain, c.want.strain, 1e-4);
  }
}

TEST(RunConvergence, DensityFixedPointLeavesStrainBall) {
  const ConvergenceReport r = run_convergence(density(FamilyKind::density_modulus_reciprocal), kStress, RotationSpec{},
                                              default_delta_ladder(), report_policy());
  for (const auto& row : r.records) {
    EXPECT_FALSE(row.in_domain);
    EXPECT_NEAR(row.solution_norm / row.delta, 0.649, 2e-3);
  }
  // Under enforcement every row fails and the study cannot be fitted.
  EXPECT_EQ(code_of([&] {
              run_convergence(density(FamilyKind::density_modulus_reciprocal), kStress, RotationSpec{},
                              default_delta_ladder());
            }),
            ErrorCode::FitUnderdetermined);
}

TEST(RunConvergence, DensityInsideDomainWithWiderBall) {
  for (FamilyKind k : {FamilyKind::density_modulus_reciprocal, FamilyKind::density_modulus_direct}) {
    FamilySpec f = density(k);
    f.b = 1.5;
    const ConvergenceReport r = run_convergence(f, kStress, RotationSpec{}, default_delta_ladder());
    ASSERT_EQ(r.successful_rows(), 8u);
    for (const auto& row : r.records) {
      EXPECT_TRUE(row.in_domain);
      EXPECT_TRUE(row.interior_ball_ok);
    }
    EXPECT_NEAR(*r.fitted_order_full, 2.0, 0.1);
  }
}

TEST(RunConvergence, HydrostaticWithoutRotation) {
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  const ConvergenceReport r =
      run_convergence(f, 0.3 * SymTensor::identity(), RotationSpec{{0, 0, 1}, 0.0}, default_delta_ladder());
  EXPECT_GE(*r.fitted_order_full, 1.9);
  for (const auto& row : r.records) {
    // F = (1 + 2e)^{1/2} I with e the hydrostatic solution.
    const double e = row.delta * 0.3 / std::sqrt(1 + 0.09 * 3);
    EXPECT_NEAR(row.delta0, std::sqrt(3.0) * (std::sqrt(1 + 2 * e) - 1), 1e-15);
  }
}

TEST(RunConvergenceHencky, ZeroStressWithoutRotationIsExact) {
  const ConvergenceReport r = run_convergence_hencky(FamilySpec::power_law(1, 2), SymTensor::zero(),
                                                     RotationSpec{{0, 0, 1}, 0.0}, default_delta_ladder());
  EXPECT_FALSE(r.fitted_order_full.has_value());
  EXPECT_FALSE(r.fitted_order_stress.has_value());
  for (const auto& row : r.records) EXPECT_EQ(row.residual_full, 0.0);
}

TEST(RunConvergenceHencky, HydrostaticScalarReduction) {
  FamilySpec f = density(FamilyKind::density_modulus_reciprocal);
  const double s = 0.2;
  ConvergenceOptions tight;
  tight.solver.tol_abs = 1e-17;
  const ConvergenceReport r = run_convergence_hencky(f, s * SymTensor::identity(), RotationSpec{{0, 0, 1}, 0.0},
                                                     default_delta_ladder(), tight);
  for (const auto& row : r.records) {
    // h = (1−2ν)s/E_δ(hI) by bisection.
    const double d = row.delta;
    auto g = [&](double h) { return h - 0.4 * s * d / (1 + 0.3 / d * (std::pow(1 + 2 * h, -1.5) - 1)); };
    double lo = 0, hi = 0.5 * d;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      (g(lo) * g(m) <= 0 ? hi : lo) = m;
    }
    EXPECT_NEAR(row.solution_norm, std::sqrt(3.0) * lo, 1e-13 * row.delta);
  }
}

TEST(RunConvergence, Delta0Coupling) {
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  const auto ladder = default_delta_ladder();
  const double C0 = certify_constants(f, ladder, 1000, 3).C0_hat;
  const RotationSpec rot{};
  const ConvergenceReport r = run_convergence(f, kStress, rot, ladder);
  for (const auto& row : r.records) {
    const double C2 = rotation_bound(rot, row.delta) / row.delta;
    EXPECT_LE(row.delta0, green_gradient_bound(C0, C2, row.delta));
  }
  const ConvergenceReport h = run_convergence_hencky(f, kStress, rot, ladder);
  for (const auto& row : h.records) {
    EXPECT_LE(row.delta0, hencky_gradient_bound(C0, rotation_bound(rot, row.delta) / row.delta, row.delta));
  }
}

TEST(RunConvergence, MonotoneRefinement) {
  auto ladder = default_delta_ladder();
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  for (int k = 14; k <= 16; ++k) ladder.push_back(std::ldexp(1.0, -k));
  const ConvergenceReport r = run_convergence(f, kStress, RotationSpec{}, ladder);
  EXPECT_GE(*r.fitted_order_full, 1.9);
  EXPECT_LE(*r.fitted_order_full, 2.1);
}

TEST(RunConvergence, LadderValidation) {
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  EXPECT_EQ(code_of([&] { run_convergence(f, kStress, RotationSpec{}, std::vector<double>{0.01, 0.005, 0.001}); }),
            ErrorCode::FitUnderdetermined);
  EXPECT_EQ(code_of([&] {
              run_convergence(f, kStress, RotationSpec{}, std::vector<double>{0.01, 0.02, 0.005, 0.001});
            }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] {
              run_convergence(f, kStress, RotationSpec{}, std::vector<double>{0.5, 0.02, 0.005, 0.001});
            }),
            ErrorCode::InadmissibleDelta);
  EXPECT_EQ(code_of([&] {
              run_convergence(f, SymTensor::diag(3, 0, 0), RotationSpec{}, default_delta_ladder());
            }),
            ErrorCode::OutOfDomain);
}

TEST(CertifyConstants, PowerLaw) {
  const FamilySpec f = FamilySpec::power_law(1.0, 2.0);
  const CertificateReport r = certify_constants(f, default_delta_ladder(), 2000, 99);
  EXPECT_LE(r.C0_hat, 1.0);
  EXPECT_GT(r.C0_hat, 0.6);
  EXPECT_EQ(r.C1_hat, 0.0);
  EXPECT_LE(r.D0_hat, 2.0 * (1 + 1e-6));
  EXPECT_EQ(r.C3_hat, 0.0);
  EXPECT_EQ(r.rows.size(), 8u);
}

TEST(CertifyConstants, ReciprocalWithinClosedFormBounds) {
  const FamilySpec f = FamilySpec::density_reciprocal(1, 0.3, 0.3, 0.5, 1);
  const CertificateReport r = certify_constants(f, std::vector<double>{0.01, 0.005, 0.001}, 2000, 5);
  EXPECT_LE(r.C0_hat, density_bound_C0(f));
  EXPECT_LE(r.C1_hat, density_lipschitz_E(f));
  EXPECT_LE(r.D0_hat, density_lipschitz_S(f));
  EXPECT_GT(r.C3_hat, 0.0);
  EXPECT_TRUE(std::isfinite(r.C3_hat));
}

TEST(CertifyConstants, ZeroBase) {
  FamilySpec s;
  s.kind = FamilyKind::scaled_base;
  s.bind_base();
  const CertificateReport r = certify_constants(s, std::vector<double>{0.01, 0.001}, 100, 1);
  EXPECT_EQ(r.C0_hat, 0.0);
  EXPECT_EQ(r.C1_hat, 0.0);
  EXPECT_EQ(r.D0_hat, 0.0);
  EXPECT_EQ(r.C3_hat, 0.0);
}

TEST(CertifyConstants, DeterministicForSeed) {
  const FamilySpec f = FamilySpec::density_direct(1, 0.3, 0.3, 0.5, 1);
  const std::vector<double> d{0.01, 0.002};
  const CertificateReport a = certify_constants(f, d, 500, 1234);
  const CertificateReport b = certify_constants(f, d, 500, 1234);
  const CertificateReport c = certify_constants(f, d, 500, 1235);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].C0_hat, b.rows[i].C0_hat);
    EXPECT_EQ(a.rows[i].C1_hat, b.rows[i].C1_hat);
    EXPECT_EQ(a.rows[i].D0_hat, b.rows[i].D0_hat);
    EXPECT_EQ(a.rows[i].C3_hat, b.rows[i].C3_hat);
  }
  EXPECT_NE(a.C0_hat, c.C0_hat);
}

TEST(CertifyConstants, Validation) {
  EXPECT_THROW(certify_constants(FamilySpec::power_law(1, 2), std::vector<double>{0.01}, 99, 1), Error);
  EXPECT_THROW(certify_constants(FamilySpec::power_law(1, 2), std::vector<double>{}, 100, 1), Error);
}

TEST(LeastSquaresSlope, Basics) {
  EXPECT_NEAR(least_squares_slope(std::vector<double>{1, 2, 4}, std::vector<double>{1, 8, 64}), 3.0, 1e-14);
  EXPECT_THROW(least_squares_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(least_squares_slope(std::vector<double>{1, 0}, std::vector<double>{1, 2}), Error);
}

TEST(RunConvergenceHencky, RigidRotationAloneIsSecondOrder) {
  const ConvergenceReport r =
      run_convergence_hencky(FamilySpec::power_law(1, 2), SymTensor::zero(), RotationSpec{}, default_delta_ladder());
  EXPECT_NEAR(*r.fitted_order_full, 2.0, 1e-3);
  for (const auto& row : r.records) EXPECT_EQ(row.solution_norm, 0.0);
}

TEST(CertifyConstants, ReplayedSamplesReproduceRows) {
  const FamilySpec f = FamilySpec::density_reciprocal(1, 0.3, 0.3, 0.5, 1);
  const std::vector<double> d{0.01, 0.002};
  const CertificateReport r = certify_constants(f, d, 300, 77);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto draws = certification_samples(f, d[k], k, 300, 77);
    ASSERT_EQ(draws.size(), 300u);
    double c0 = 0, c3 = 0;
    for (const auto& s : draws) {
      EXPECT_LT(frobenius(s.E2), 0.5);
      EXPECT_LT(frobenius(s.S2), 1.0);
      c0 = std::max(c0, frobenius(family_eval(f, d[k], s.E, s.S)) / d[k]);
      c3 = std::max(c3, leading_gap(f, d[k], s.E, s.S) / (d[k] * d[k]));
    }
    EXPECT_EQ(c0, r.rows[k].C0_hat);
    EXPECT_EQ(c3, r.rows[k].C3_hat);
  }
}
