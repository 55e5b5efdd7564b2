#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "delam/materials.hpp"

using namespace delam;

TEST(Materials, TensorOnIdentity)
{
    EXPECT_TRUE(isotropic_tensor(0.0, 1.0).apply(Sym2::Identity()).isApprox(2.0 * Sym2::Identity()));
    EXPECT_TRUE(isotropic_tensor(1.0, 1.0).apply(Sym2::Identity()).isApprox(4.0 * Sym2::Identity()));
}

TEST(Materials, RejectsNonCoerciveModuli)
{
    EXPECT_THROW(isotropic_tensor(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(isotropic_tensor(-2.0, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(isotropic_tensor(-0.5, 1.0));
}

TEST(Materials, CoercivityBoundsOnRandomStrains)
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto [l, m] : {std::pair{2.0, 3.0}, std::pair{-0.5, 1.0}, std::pair{0.0, 0.2}}) {
        const IsotropicTensor C = isotropic_tensor(l, m);
        for (int it = 0; it < 200; ++it) {
            Sym2 e;
            e(0, 0) = n(rng);
            e(1, 1) = n(rng);
            e(0, 1) = e(1, 0) = n(rng);
            const double q = C.contract(e);
            const double norm2 = (e.array() * e.array()).sum();
            EXPECT_GE(q, C.lower_bound() * norm2 * (1.0 - 1e-10));
            EXPECT_LE(q, C.upper_bound() * norm2 * (1.0 + 1e-10));
        }
        // The Mandel matrix is the tensor as a symmetric operator; its
        // eigenvalues are 2mu (twice) and 2mu + 2lambda.
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(C.mandel());
        EXPECT_NEAR(es.eigenvalues().minCoeff(), std::min(2.0 * m, 2.0 * m + 2.0 * l), 1e-12);
        EXPECT_NEAR(es.eigenvalues().maxCoeff(), std::max(2.0 * m, 2.0 * m + 2.0 * l), 1e-12);
    }
}

TEST(Materials, VoigtMatchesContraction)
{
    const IsotropicTensor C = isotropic_tensor(2.0, 3.0);
    Sym2 e;
    e << 0.3, -0.2, -0.2, 0.7;
    const Eigen::Vector3d v(e(0, 0), e(1, 1), 2.0 * e(0, 1));
    EXPECT_NEAR(v.dot(C.voigt() * v), C.contract(e), 1e-14);
}

TEST(Materials, EffectiveCoefficients)
{
    ModelParams p;
    p.a0 = p.a1 = p.b = 1.0;
    p.k = 100.0;
    p.scaling = CoefficientScaling::Constant;
    auto c = effective_coeffs(p);
    EXPECT_EQ(c.a0, 1.0);
    EXPECT_EQ(c.a1, 1.0);
    EXPECT_EQ(c.b, 1.0);
    p.scaling = CoefficientScaling::OneOverK;
    c = effective_coeffs(p);
    EXPECT_DOUBLE_EQ(c.a0, 0.01);
    EXPECT_DOUBLE_EQ(c.a1, 0.01);
    EXPECT_DOUBLE_EQ(c.b, 0.01);
    p.k = 1.0;
    c = effective_coeffs(p);
    EXPECT_EQ(c.a0, 1.0);
    EXPECT_EQ(c.b, 1.0);
    const auto br = brittle_coeffs(p);
    EXPECT_EQ(br.a0, 0.0);
    EXPECT_EQ(br.a1, 0.0);
    EXPECT_EQ(br.b, 0.0);
}

TEST(Materials, ValidateRejectsBadParameters)
{
    ModelParams p;
    EXPECT_NO_THROW(validate(p));
    p.k = 0.5;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = ModelParams{};
    p.rho = 0.0;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p = ModelParams{};
    p.a1 = -1.0;
    EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Materials, ScalingNames)
{
    EXPECT_EQ(scaling_from_string("constant"), CoefficientScaling::Constant);
    EXPECT_EQ(scaling_from_string("one_over_k"), CoefficientScaling::OneOverK);
    EXPECT_EQ(to_string(CoefficientScaling::OneOverK), "one_over_k");
    EXPECT_THROW(scaling_from_string("linear"), std::invalid_argument);
}

TEST(Materials, LoadRateMatchesCentralDifference)
{
    const LoadSchedule load({LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.0, 1.0), TimeProfile::sine(2.0, 3.0, 0.4)},
                             LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(1.0, 0.0), TimeProfile::ramp(0.5)},
                             LoadTerm{BodyTarget{Block::Minus}, Vec2(0.0, -1.0), TimeProfile::constant(1.5)}});
    for (double t : {0.0, 0.3, 1.7}) {
        double prev_err = 0.0;
        for (double h : {1e-2, 5e-3}) {
            const Vec2 fd = (load.traction(t + h, EdgeTag::LeftPlus) - load.traction(t - h, EdgeTag::LeftPlus)) / (2 * h);
            const double err = (fd - load.traction_rate(t, EdgeTag::LeftPlus)).norm();
            if (prev_err > 1e-12) {
                EXPECT_NEAR(prev_err / err, 4.0, 0.1);  // second order
            }
            prev_err = err;
        }
        EXPECT_EQ(load.body_force_rate(t, Block::Minus).norm(), 0.0);
        EXPECT_EQ(load.body_force(t, Block::Plus).norm(), 0.0);
        EXPECT_DOUBLE_EQ(load.body_force(t, Block::Minus).y(), -1.5);
    }
}
