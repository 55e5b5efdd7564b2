#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "delam/energies.hpp"
#include "delam/limits.hpp"

using namespace delam;

namespace {

/// Distance from the bonded set of a to the bonded set of b by sampling each
/// bonded facet of a at many points.
double sampled_distance(const InterfaceField& a, const InterfaceField& b, int per_facet = 400)
{
    std::vector<std::pair<double, double>> target;
    std::vector<double> x{0.0};
    for (int i = 0; i < a.size(); ++i)
        x.push_back(x.back() + a.lengths()[static_cast<std::size_t>(i)]);
    for (int i = 0; i < b.size(); ++i)
        if (b.bonded(i))
            target.emplace_back(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i) + 1]);
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        if (!a.bonded(i))
            continue;
        for (int s = 0; s <= per_facet; ++s) {
            const double p = x[static_cast<std::size_t>(i)] +
                             (x[static_cast<std::size_t>(i) + 1] - x[static_cast<std::size_t>(i)]) * s / per_facet;
            double d = std::numeric_limits<double>::infinity();
            for (const auto& [lo, hi] : target)
                d = std::min(d, p < lo ? lo - p : (p > hi ? p - hi : 0.0));
            worst = std::max(worst, d);
        }
    }
    return worst;
}

SweepSetup pull_setup(int nx, int ny, double tau, double T, CoefficientScaling scaling)
{
    SweepSetup s;
    s.mesh = MeshSpec{1.0, 0.5, nx, ny, {EdgeTag::Top, EdgeTag::Bottom}, {EdgeTag::LeftPlus, EdgeTag::LeftMinus}};
    s.params.elastic = isotropic_tensor(1.0, 1.0);
    s.params.viscous = isotropic_tensor(0.0, 1.0);
    s.params.a0 = s.params.a1 = s.params.b = 0.5;
    s.params.scaling = scaling;
    s.params.load =
        LoadSchedule({LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.0, 1.0), TimeProfile::ramp(1.0)},
                      LoadTerm{TractionTarget{EdgeTag::LeftMinus}, Vec2(0.0, -1.0), TimeProfile::ramp(1.0)}});
    s.evolution.tau = tau;
    s.evolution.horizon = T;
    return s;
}

}  // namespace

TEST(Limits, SupportDistanceExamples)
{
    const std::vector<double> l(8, 0.125);
    const auto z = [&](std::vector<int> v) { return InterfaceField::from_ints(v, l); };
    EXPECT_EQ(support_distance(z({0, 0, 0, 0, 0, 0, 0, 0}), z({1, 0, 0, 0, 0, 0, 0, 0})), ExtReal(0.0));
    EXPECT_EQ(support_distance(z({0, 0, 0, 0, 0, 0, 0, 0}), z({0, 0, 0, 0, 0, 0, 0, 0})), ExtReal(0.0));
    EXPECT_TRUE(support_distance(z({0, 1, 0, 0, 0, 0, 0, 0}), z({0, 0, 0, 0, 0, 0, 0, 0})).is_infinite());
    EXPECT_EQ(support_distance(z({1, 1, 0, 0, 0, 0, 0, 0}), z({1, 1, 1, 0, 0, 0, 0, 0})), ExtReal(0.0));
    EXPECT_DOUBLE_EQ(support_distance(z({1, 1, 1, 0, 0, 0, 0, 0}), z({1, 0, 0, 0, 0, 0, 0, 0})).value(), 0.25);
    // Gap of three facets between two bonded facets: the middle is 3/16 away.
    EXPECT_DOUBLE_EQ(support_distance(z({1, 1, 1, 1, 1, 0, 0, 0}), z({1, 0, 0, 0, 1, 0, 0, 0})).value(), 0.1875);
    EXPECT_THROW(support_distance(z({1, 0, 0, 0, 0, 0, 0, 0}), InterfaceField::constant(std::vector<double>(3, 0.1), true)),
                 std::invalid_argument);
}

TEST(Limits, SupportDistanceMatchesSampling)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> len(0.05, 0.3);
    std::bernoulli_distribution coin(0.4);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> l(10);
        for (auto& x : l)
            x = len(rng);
        std::vector<int> a(10), b(10);
        for (int i = 0; i < 10; ++i) {
            a[static_cast<std::size_t>(i)] = coin(rng);
            b[static_cast<std::size_t>(i)] = coin(rng);
        }
        b[static_cast<std::size_t>(it % 10)] = 1;
        const auto za = InterfaceField::from_ints(a, l), zb = InterfaceField::from_ints(b, l);
        const ExtReal d = support_distance(za, zb);
        ASSERT_TRUE(d.is_finite());
        EXPECT_NEAR(d.value(), sampled_distance(za, zb), 0.3 / 400 + 1e-12);
        EXPECT_EQ(support_distance(za, za), ExtReal(0.0));
    }
}

TEST(Limits, BrittleResidualsFollowLedger)
{
    const SweepSetup s = pull_setup(8, 2, 0.05, 1.0, CoefficientScaling::OneOverK);
    const SweepReport rep = run_sweep(s, {100.0}, SweepOptions{4, 1, 1});
    ASSERT_TRUE(rep.complete);
    const SweepMember& m = rep.members.front();
    Trajectory tr;
    tr.ledger = m.ledger;
    const auto br = brittle_residuals(tr);
    ASSERT_EQ(br.size(), m.ledger.size());
    double sup = 0.0;
    for (std::size_t n = 0; n < br.size(); ++n) {
        EXPECT_EQ(br[n].adhesive, m.ledger[n].adhesive);
        EXPECT_EQ(br[n].max_jump, m.ledger[n].max_bonded_jump);
        sup = std::max(sup, br[n].adhesive);
    }
    EXPECT_EQ(m.sup_adhesive, sup);
}

TEST(Limits, SingletonSweep)
{
    const SweepSetup s = pull_setup(8, 2, 0.05, 1.0, CoefficientScaling::OneOverK);
    const SweepReport rep = run_sweep(s, {100.0}, SweepOptions{5, 0, 1});
    ASSERT_TRUE(rep.complete);
    EXPECT_EQ(rep.reference_index, 0);
    EXPECT_EQ(rep.sample_steps, (std::vector<int>{4, 8, 12, 16, 20}));
    const SweepAssessment a = assess_sweep(rep);
    EXPECT_TRUE(a.energy_bounded);
    EXPECT_TRUE(a.jump_decay);
    for (const SweepSample& smp : rep.members.front().samples)
        EXPECT_EQ(smp.support_distance, ExtReal(0.0));
    EXPECT_EQ(a.energy_gaps.size(), 0u);
    EXPECT_EQ(a.jump_slope, 0.0);
}

TEST(Limits, TinyLoadKeepsEverythingBonded)
{
    SweepSetup s = pull_setup(8, 2, 0.05, 1.0, CoefficientScaling::OneOverK);
    s.params.load = LoadSchedule({LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.0, 1e-6), TimeProfile::ramp(1.0)}});
    const SweepReport rep = run_sweep(s, {10.0, 100.0, 1000.0}, SweepOptions{5, 2, 2});
    ASSERT_TRUE(rep.complete);
    const SweepAssessment a = assess_sweep(rep);
    EXPECT_TRUE(a.ok());
    EXPECT_EQ(a.excluded_samples, 0);
    for (const SweepMember& m : rep.members) {
        EXPECT_TRUE(m.change_steps.empty());
        for (const SweepSample& smp : m.samples) {
            EXPECT_EQ(smp.support_distance, ExtReal(0.0));
            EXPECT_DOUBLE_EQ(smp.bonded_length, 1.0);
        }
    }
}

TEST(Limits, QuasiStaticJumpScalesLikeOneOverK)
{
    // Nearly static loading with a bond too strong to break: the interface
    // traction converges as k grows, so the jump behaves like sigma/k and the
    // adhesive energy like |sigma|^2 / (2k).
    SweepSetup s = pull_setup(8, 2, 50.0, 50.0, CoefficientScaling::Constant);
    s.params.a0 = s.params.a1 = 100.0;
    s.params.b = 0.0;
    s.params.load = LoadSchedule({LoadTerm{BodyTarget{Block::Plus}, Vec2(0.0, 1.0), TimeProfile::constant(1.0)},
                                  LoadTerm{BodyTarget{Block::Minus}, Vec2(0.0, -1.0), TimeProfile::constant(1.0)}});
    const std::vector<double> ks{1e3, 1e4, 1e5};
    const SweepReport rep = run_sweep(s, ks, SweepOptions{1, 0, 1});
    ASSERT_TRUE(rep.complete);
    std::vector<double> kj, kjump;
    for (const SweepMember& m : rep.members) {
        EXPECT_TRUE(m.change_steps.empty());
        kj.push_back(m.k * m.sup_adhesive);
        kjump.push_back(m.k * m.sup_max_jump);
    }
    EXPECT_LT(std::abs(kj[2] - kj[1]), std::abs(kj[1] - kj[0]));
    EXPECT_NEAR(kj[2] / kj[1], 1.0, 0.01);
    EXPECT_NEAR(kjump[2] / kjump[1], 1.0, 0.01);
    EXPECT_GT(kj[2], 0.0);
    const SweepAssessment a = assess_sweep(rep);
    EXPECT_NEAR(a.jump_slope, -1.0, 0.01);
}

TEST(Limits, PeelSweepIsDeterministic)
{
    const SweepSetup s = pull_setup(16, 4, 0.01, 3.0, CoefficientScaling::OneOverK);
    const std::vector<double> ks{10.0, 100.0, 1000.0};
    const SweepReport a = run_sweep(s, ks, SweepOptions{10, 2, 3});
    const SweepReport b = run_sweep(s, ks, SweepOptions{10, 2, 1});
    const SweepAssessment aa = assess_sweep(a), ab = assess_sweep(b);
    EXPECT_EQ(sweep_report_json(a, aa), sweep_report_json(b, ab));
    EXPECT_EQ(sweep_report_csv(a), sweep_report_csv(b));
    EXPECT_TRUE(aa.energy_bounded);
    EXPECT_TRUE(aa.jump_decay);
    EXPECT_LT(aa.jump_slope, -0.5);
    for (const SweepMember& m : a.members) {
        EXPECT_TRUE(m.semistable_all);
        EXPECT_TRUE(m.unidirectional);
        EXPECT_LE(m.sup_adhesive, m.energy_bound);
    }
}

TEST(Limits, FailedMemberMarksReportIncomplete)
{
    SweepSetup s = pull_setup(4, 1, 0.05, 0.2, CoefficientScaling::OneOverK);
    s.z0 = {1, 1};  // wrong length
    const SweepReport rep = run_sweep(s, {10.0, 100.0}, SweepOptions{2, 0, 1});
    EXPECT_FALSE(rep.complete);
    for (const SweepMember& m : rep.members) {
        EXPECT_FALSE(m.ok);
        EXPECT_FALSE(m.error.empty());
    }
    EXPECT_FALSE(assess_sweep(rep).ok());
}
