#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "delam/energies.hpp"
#include "delam/evolution.hpp"
#include "oracles.hpp"

using namespace delam;

namespace {

ModelParams peel_params(double k = 100.0)
{
    ModelParams p;
    p.elastic = isotropic_tensor(1.0, 1.0);
    p.viscous = isotropic_tensor(0.0, 1.0);
    p.a0 = p.a1 = p.b = 0.5;
    p.k = k;
    p.scaling = CoefficientScaling::OneOverK;
    p.load = LoadSchedule({LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.0, 1.0), TimeProfile::ramp(1.0)},
                           LoadTerm{TractionTarget{EdgeTag::LeftMinus}, Vec2(0.0, -1.0), TimeProfile::ramp(1.0)}});
    return p;
}

Discretization peel_disc(int nx = 16, int ny = 4, ModelParams p = peel_params())
{
    return Discretization(build_two_block_mesh(1.0, 0.5, nx, ny, {EdgeTag::Top, EdgeTag::Bottom},
                                               {EdgeTag::LeftPlus, EdgeTag::LeftMinus}),
                          std::move(p));
}

EvolutionOptions opts(double tau, double T)
{
    EvolutionOptions o;
    o.tau = tau;
    o.horizon = T;
    return o;
}

Trajectory run(const Discretization& d, EvolutionOptions o, InterfaceField z0 = {})
{
    if (z0.size() == 0)
        z0 = InterfaceField::constant(d.mesh(), true);
    const Vec zero = Vec::Zero(d.num_dofs());
    Evolution ev(d, std::move(o), zero, zero, std::move(z0));
    ev.run();
    return ev.take_trajectory();
}

}  // namespace

TEST(Evolution, ZeroDataStaysAtRest)
{
    ModelParams p = peel_params();
    p.load = LoadSchedule{};
    const Discretization d = peel_disc(8, 2, p);
    const Trajectory tr = run(d, opts(0.1, 1.0));
    ASSERT_EQ(tr.num_steps(), 10);
    const double surface = -effective_coeffs(p).a0 * d.mesh().interface_length();
    for (int n = 0; n <= 10; ++n) {
        EXPECT_EQ(tr.displacements[static_cast<std::size_t>(n)].norm(), 0.0);
        EXPECT_EQ(tr.interface_states[static_cast<std::size_t>(n)], InterfaceField::constant(d.mesh(), true));
        const LedgerRow& r = tr.ledger[static_cast<std::size_t>(n)];
        EXPECT_EQ(r.step, n);
        EXPECT_NEAR(r.t, 0.1 * n, 1e-15);
        EXPECT_EQ(r.kinetic, 0.0);
        EXPECT_EQ(r.viscous_increment, 0.0);
        EXPECT_EQ(r.ri_increment, 0.0);
        EXPECT_EQ(r.power_integral, 0.0);
        EXPECT_NEAR(r.stored_total, surface, 1e-15);
    }
    const AuditSummary a = audit_all_pairs(tr.ledger);
    EXPECT_EQ(a.max_abs_residual, 0.0);
}

TEST(Evolution, StepCountFollowsHorizon)
{
    const Discretization d = peel_disc(4, 1);
    EXPECT_EQ(run(d, opts(0.1, 0.3)).num_steps(), 3);
    EXPECT_EQ(run(d, opts(0.25, 1.0)).num_steps(), 4);
    EXPECT_EQ(run(d, opts(0.3, 1.0)).num_steps(), 3);
    EXPECT_THROW(run(d, opts(0.0, 1.0)), std::invalid_argument);
}

TEST(Evolution, StrictAndRepairInitialization)
{
    ModelParams p = peel_params();
    p.scaling = CoefficientScaling::Constant;
    p.a0 = p.a1 = 0.01;
    p.b = 0.0;
    const Discretization d = peel_disc(4, 2, p);
    Vec u0 = Vec::Zero(d.num_dofs());
    const auto plus = d.mesh().interface_nodes(Block::Plus);
    u0[Mesh2D::dof(plus.front(), 1)] = 0.5;  // opens the leftmost facet
    const Vec zero = Vec::Zero(d.num_dofs());
    const auto z0 = InterfaceField::constant(d.mesh(), true);
    EXPECT_THROW(Evolution(d, opts(0.1, 0.2), u0, zero, z0), InitError);

    EvolutionOptions o = opts(0.1, 0.2);
    o.init_mode = InitMode::Repair;
    Evolution ev(d, o, u0, zero, z0);
    EXPECT_TRUE(ev.repaired_initial_state());
    EXPECT_FALSE(ev.interface_state().bonded(0));
    EXPECT_TRUE(ev.interface_state().is_below(z0));
    EXPECT_TRUE(certify_semistability(d, 0.0, u0, ev.interface_state()).ok);

    Evolution fine(d, o, zero, zero, z0);
    EXPECT_FALSE(fine.repaired_initial_state());

    Vec bad = zero;
    bad[d.mesh().dirichlet_dofs().front()] = 1.0;
    EXPECT_THROW(Evolution(d, o, bad, zero, z0), std::invalid_argument);
    EXPECT_THROW(Evolution(d, o, zero, zero, InterfaceField::constant(std::vector<double>(3, 0.25), true)),
                 std::invalid_argument);
}

TEST(Evolution, DebondedStartIsDecoupled)
{
    ModelParams p = peel_params();
    p.load = LoadSchedule({LoadTerm{BodyTarget{Block::Minus}, Vec2(1.0, -1.0), TimeProfile::ramp(1.0)}});
    const Discretization d = peel_disc(8, 2, p);
    const Trajectory tr = run(d, opts(0.1, 0.5), InterfaceField::constant(d.mesh(), false));
    for (const Vec& u : tr.displacements)
        for (int n = 0; n < d.mesh().num_nodes(); ++n)
            if (d.mesh().node_blocks()[static_cast<std::size_t>(n)] == Block::Plus) {
                EXPECT_EQ(u[Mesh2D::dof(n, 0)], 0.0);
                EXPECT_EQ(u[Mesh2D::dof(n, 1)], 0.0);
            }
    for (const LedgerRow& r : tr.ledger) {
        EXPECT_EQ(r.ri_increment, 0.0);
        EXPECT_EQ(r.adhesive, 0.0);
        EXPECT_EQ(r.bonded_length, 0.0);
    }
}

TEST(Evolution, PeelDebondsAndKeepsInvariants)
{
    const Discretization d = peel_disc();
    const Trajectory tr = run(d, opts(0.02, 3.0));
    const InterfaceCoefficients c = effective_coeffs(d.params());
    double ri_total = 0.0;
    for (std::size_t n = 1; n < tr.ledger.size(); ++n) {
        EXPECT_TRUE(tr.interface_states[n].is_below(tr.interface_states[n - 1]));
        const double lost = tr.ledger[n - 1].bonded_length - tr.ledger[n].bonded_length;
        EXPECT_NEAR(tr.ledger[n].ri_increment, c.a1 * lost, 1e-15);
        ri_total += tr.ledger[n].ri_increment;
    }
    EXPECT_LT(tr.ledger.back().bonded_length, d.mesh().interface_length());
    EXPECT_NEAR(ri_total, c.a1 * (d.mesh().interface_length() - tr.ledger.back().bonded_length), 1e-13);

    const TrajectoryCheck check = check_trajectory(d, tr);
    EXPECT_TRUE(check.history_available);
    EXPECT_TRUE(check.ok());
    EXPECT_LE(check.max_exact_residual, 0.0 + 1e-12);
    EXPECT_EQ(check.max_ledger_mismatch, 0.0);
}

TEST(Evolution, LedgerMatchesIndependentEnergies)
{
    const Discretization d = peel_disc(8, 2);
    const Trajectory tr = run(d, opts(0.05, 1.0));
    const ModelParams& p = d.params();
    for (std::size_t n = 1; n < tr.ledger.size(); ++n) {
        const Vec& u = tr.displacements[n];
        const Vec v = (u - tr.displacements[n - 1]) / tr.tau;
        const LedgerRow& r = tr.ledger[n];
        EXPECT_NEAR(r.kinetic, 0.5 * p.rho * oracle::l2_product(d.mesh(), v, v), 1e-12);
        EXPECT_NEAR(r.viscous_increment, tr.tau * oracle::bilinear(d.mesh(), p.viscous, v, v), 1e-12);
        EXPECT_NEAR(r.stored_bulk, 0.5 * oracle::bilinear(d.mesh(), p.elastic, u, u), 1e-12);
        EXPECT_NEAR(r.load_potential, -oracle::load_pairing(d.mesh(), p.load, r.t, u), 1e-12);
        EXPECT_NEAR(r.adhesive, 0.5 * p.k * oracle::interface_product(d.mesh(), tr.interface_states[n], u, u), 1e-12);
    }
}

TEST(Evolution, AuditHandExample)
{
    EnergyLedger l(3);
    l[0].kinetic = 1.0;
    l[0].stored_total = 2.0;
    l[1].kinetic = 0.5;
    l[1].stored_total = 2.0;
    l[1].viscous_increment = 0.3;
    l[1].ri_increment = 0.1;
    l[1].power_integral = 0.05;
    l[2].kinetic = 0.25;
    l[2].stored_total = 2.5;
    l[2].viscous_increment = 0.1;
    l[2].power_integral = 0.55;
    AuditResult r = audit_energy(l, 0, 1);
    EXPECT_DOUBLE_EQ(r.lhs, 2.9);
    EXPECT_DOUBLE_EQ(r.rhs, 3.05);
    EXPECT_DOUBLE_EQ(r.residual, 2.9 - 3.05);
    r = audit_energy(l, 1, 2);
    EXPECT_DOUBLE_EQ(r.lhs, 0.25 + 0.1 + 2.5);
    EXPECT_DOUBLE_EQ(r.rhs, 0.5 + 2.0 + 0.5);
    EXPECT_EQ(audit_energy(l, 2, 2).residual, 0.0);
    EXPECT_THROW(audit_energy(l, 2, 1), std::out_of_range);
    EXPECT_THROW(audit_energy(l, 0, 3), std::out_of_range);
}

TEST(Evolution, AllPairsMatchesBruteForce)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 20; ++it) {
        EnergyLedger l(15);
        double pi = 0.0, w = 0.0;
        for (std::size_t m = 0; m < l.size(); ++m) {
            l[m].kinetic = u(rng);
            l[m].stored_total = u(rng) - 0.5;
            if (m > 0) {
                l[m].viscous_increment = 0.1 * u(rng);
                l[m].ri_increment = 0.1 * u(rng);
                pi += 0.2 * (u(rng) - 0.5);
                w += 0.2 * (u(rng) - 0.5);
            }
            l[m].power_integral = pi;
            l[m].work_exact = w;
        }
        double max_res = 0.0, max_abs = 0.0;
        for (int s = 0; s < 15; ++s)
            for (int n = s; n < 15; ++n) {
                const double res = audit_energy(l, s, n).residual;
                max_res = std::max(max_res, res);
                max_abs = std::max(max_abs, std::abs(res));
            }
        const AuditSummary a = audit_all_pairs(l);
        EXPECT_NEAR(a.max_residual, max_res, 1e-13);
        EXPECT_NEAR(a.max_abs_residual, max_abs, 1e-13);
    }
}

TEST(Evolution, CheckpointRestartIsBitIdentical)
{
    const Discretization d = peel_disc(8, 2);
    const Trajectory full = run(d, opts(0.05, 2.0));

    const Vec zero = Vec::Zero(d.num_dofs());
    Evolution first(d, opts(0.05, 2.0), zero, zero, InterfaceField::constant(d.mesh(), true));
    for (int n = 0; n < 17; ++n)
        first.step();
    const std::string text = checkpoint_to_json(first.checkpoint());
    Evolution second = Evolution::resume(d, opts(0.05, 2.0), checkpoint_from_json(text));
    second.run();
    const Trajectory& tail = second.trajectory();
    ASSERT_EQ(tail.ledger.front().step, 17);
    ASSERT_EQ(static_cast<int>(tail.ledger.size()), full.num_steps() - 17 + 1);
    for (std::size_t i = 0; i < tail.ledger.size(); ++i) {
        const std::size_t n = 17 + i;
        EXPECT_EQ(tail.displacements[i], full.displacements[n]);
        EXPECT_EQ(tail.interface_states[i], full.interface_states[n]);
        EXPECT_EQ(tail.ledger[i].stored_total, full.ledger[n].stored_total);
        EXPECT_EQ(tail.ledger[i].power_integral, full.ledger[n].power_integral);
        EXPECT_EQ(tail.ledger[i].work_exact, full.ledger[n].work_exact);
        if (i > 0) {
            EXPECT_EQ(tail.ledger[i].kinetic, full.ledger[n].kinetic);
            EXPECT_EQ(tail.ledger[i].viscous_increment, full.ledger[n].viscous_increment);
        }
    }
    EXPECT_THROW(Evolution::resume(d, opts(0.1, 2.0), checkpoint_from_json(text)), std::invalid_argument);
    EXPECT_THROW(checkpoint_from_json("{\"format\":\"other\"}"), std::exception);
}

TEST(Evolution, StreamingKeepsLedgerOnly)
{
    const Discretization d = peel_disc(8, 2);
    const Trajectory full = run(d, opts(0.05, 1.0));
    EvolutionOptions o = opts(0.05, 1.0);
    o.keep_history = false;
    int rows = 0;
    o.on_row = [&rows](const LedgerRow& r) { EXPECT_EQ(r.step, rows++); };
    const Trajectory lean = run(d, o);
    EXPECT_EQ(rows, full.num_steps() + 1);
    ASSERT_EQ(lean.ledger.size(), full.ledger.size());
    EXPECT_LE(lean.displacements.size(), 1u);
    for (std::size_t n = 0; n < full.ledger.size(); ++n)
        EXPECT_EQ(lean.ledger[n].stored_total, full.ledger[n].stored_total);
    EXPECT_EQ(lean.displacements.back(), full.displacements.back());
    EXPECT_FALSE(check_trajectory(d, lean).history_available);
}

TEST(Evolution, StepOrderVariants)
{
    const Discretization d = peel_disc(16, 4, peel_params(1000.0));
    EvolutionOptions o = opts(0.02, 2.0);
    const Trajectory a = run(d, o);
    o.order = StepOrder::ZThenU;
    const Trajectory b = run(d, o);
    // z_n minimizes against u_{n-1} in this order, so that is where it is semistable.
    const TrajectoryCheck cb = check_trajectory(d, b);
    EXPECT_TRUE(cb.unidirectional);
    EXPECT_TRUE(cb.dirichlet_zero);
    EXPECT_TRUE(cb.ledger_consistent);
    for (std::size_t n = 1; n < b.interface_states.size(); ++n) {
        EXPECT_TRUE(b.interface_states[n].is_below(b.interface_states[n - 1]));
        EXPECT_TRUE(certify_semistability(d, b.times[n], b.displacements[n - 1], b.interface_states[n]).ok);
    }
    EXPECT_TRUE(cb.energy_inequality);
    const auto ra = replay_displacements(d, a, StepOrder::UThenZ);
    const auto rb = replay_displacements(d, b, StepOrder::ZThenU);
    for (std::size_t n = 0; n < ra.size(); ++n) {
        EXPECT_LT((ra[n] - a.displacements[n]).norm(), 1e-12 * std::max(1.0, a.displacements[n].norm()));
        EXPECT_LT((rb[n] - b.displacements[n]).norm(), 1e-12 * std::max(1.0, b.displacements[n].norm()));
    }
    EXPECT_EQ(to_string(StepOrder::ZThenU), "z_then_u");
    EXPECT_EQ(step_order_from_string("u_then_z"), StepOrder::UThenZ);
    EXPECT_THROW(step_order_from_string("both"), std::invalid_argument);
}

TEST(Evolution, RecomputedLedgerMatches)
{
    const Discretization d = peel_disc(8, 2);
    const Trajectory tr = run(d, opts(0.05, 1.5));
    const EnergyLedger again = recompute_ledger(d, tr);
    ASSERT_EQ(again.size(), tr.ledger.size());
    for (std::size_t n = 0; n < again.size(); ++n) {
        EXPECT_EQ(again[n].stored_total, tr.ledger[n].stored_total);
        EXPECT_EQ(again[n].kinetic, tr.ledger[n].kinetic);
        EXPECT_EQ(again[n].power_integral, tr.ledger[n].power_integral);
    }
}
