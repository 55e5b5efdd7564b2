#include "delam/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "delam/energies.hpp"
#include "delam/interface.hpp"
#include "delam/momentum.hpp"

namespace delam {

namespace {

void record(SuiteResult& r, bool ok, const std::string& what)
{
    if (ok) {
        ++r.passed;
        return;
    }
    if (r.failed == 0)
        r.first_failure = what;
    ++r.failed;
}

FacetCosts random_costs(std::mt19937_64& rng, int n, InterfaceField& z_prev, double& b)
{
    std::uniform_real_distribution<double> len(0.1, 1.0), g(0.0, 4.0), coef(0.0, 1.0);
    std::bernoulli_distribution bonded(0.75);
    std::vector<double> lengths(static_cast<std::size_t>(n)), integrals(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        lengths[i] = len(rng);
        integrals[i] = g(rng) * lengths[i];
        bits[i] = bonded(rng) ? 1 : 0;
    }
    z_prev = InterfaceField(bits, lengths);
    const InterfaceCoefficients c{coef(rng), coef(rng), 0.0};
    b = coef(rng);
    return facet_costs_from_integrals(integrals, z_prev, c, 1.0 + 3.0 * coef(rng));
}

Discretization small_problem(std::mt19937_64& rng)
{
    MeshSpec spec;
    spec.width = 1.0;
    spec.height = 0.5;
    spec.nx = 4;
    spec.ny = 2;
    spec.neumann = {EdgeTag::LeftPlus, EdgeTag::RightMinus};
    std::uniform_real_distribution<double> u(0.5, 1.5);
    ModelParams p;
    p.rho = u(rng);
    p.elastic = isotropic_tensor(u(rng), u(rng));
    p.viscous = isotropic_tensor(0.1 * u(rng), 0.1 * u(rng));
    p.k = 10.0 * u(rng);
    p.load = LoadSchedule({LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.3, 1.0), TimeProfile::sine(u(rng), 2.0)},
                           LoadTerm{BodyTarget{Block::Minus}, Vec2(-1.0, 0.2), TimeProfile::ramp(u(rng))}});
    return Discretization(build_two_block_mesh(spec), p);
}

Vec random_free_field(const Discretization& disc, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec free(disc.num_free());
    for (Eigen::Index i = 0; i < free.size(); ++i)
        free[i] = n(rng);
    return disc.prolong(free);
}

}  // namespace

SuiteResult selfcheck_dp_bruteforce(std::uint64_t seed, int instances)
{
    SuiteResult r;
    r.name = "dp_bruteforce";
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(1, 12);
    for (int it = 0; it < instances; ++it) {
        const int n = size(rng);
        InterfaceField z_prev;
        double b = 0.0;
        const FacetCosts costs = random_costs(rng, n, z_prev, b);
        double best = std::numeric_limits<double>::infinity();
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            InterfaceField z = InterfaceField::constant(costs.lengths, false);
            for (int i = 0; i < n; ++i)
                z.set(i, (mask >> i) & 1u);
            const ExtReal v = chain_objective(costs, b, z);
            if (v.is_finite())
                best = std::min(best, v.value());
        }
        const ChainMinimum m = minimize_z_dp(costs, b);
        const double attained = chain_objective(costs, b, m.z).value_or(std::numeric_limits<double>::infinity());
        record(r, std::abs(m.value - best) <= 1e-12 && std::abs(attained - best) <= 1e-12,
               "instance " + std::to_string(it));
    }
    return r;
}

SuiteResult selfcheck_certificate(std::uint64_t seed, int instances)
{
    SuiteResult r;
    r.name = "certificate";
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> size(1, 15);
    for (int it = 0; it < instances; ++it) {
        const int n = size(rng);
        InterfaceField z_prev;
        double b = 0.0;
        const FacetCosts costs = random_costs(rng, n, z_prev, b);
        const ChainMinimum m = minimize_z_dp(costs, b);
        // Recompute the chain objective with the minimizer as reference state.
        FacetCosts again = costs;
        for (int i = 0; i < n; ++i) {
            const auto s = static_cast<std::size_t>(i);
            const double a1l = z_prev.bonded(i) ? costs.unbonded[s] : 0.0;
            again.unbonded[s] = m.z.bonded(i) ? a1l : 0.0;
            again.frozen_zero[s] = !m.z.bonded(i);
        }
        const ChainMinimum self = minimize_z_dp(again, b);
        const double violation = self.value - chain_objective(again, b, m.z).value();
        record(r, violation >= -1e-12 && m.z.is_below(z_prev), "instance " + std::to_string(it));
    }
    return r;
}

SuiteResult selfcheck_gradient(std::uint64_t seed, int directions)
{
    SuiteResult r;
    r.name = "gradient_fd";
    std::mt19937_64 rng(seed + 17);
    const Discretization disc = small_problem(rng);
    const double tau = 0.05;
    KinematicState state;
    state.u = random_free_field(disc, rng);
    state.u_prev = random_free_field(disc, rng);
    state.u_prev2 = state.u_prev;
    const InterfaceField z = InterfaceField::from_ints({1, 0, 1, 1}, disc.mesh().facet_lengths());
    const Vec u = random_free_field(disc, rng);
    const Vec grad = disc.restrict(incremental_gradient(disc, z, tau, state, 0.3, u));
    for (int d = 0; d < directions; ++d) {
        Vec dir = random_free_field(disc, rng);
        dir /= dir.norm();
        const double h = 1e-5;
        const double fd = (incremental_functional(disc, z, tau, state, 0.3, u + h * dir) -
                           incremental_functional(disc, z, tau, state, 0.3, u - h * dir)) /
                          (2.0 * h);
        const double an = grad.dot(disc.restrict(dir));
        const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
        record(r, rel <= 1e-6, "direction " + std::to_string(d));
    }
    return r;
}

SuiteResult selfcheck_power(std::uint64_t seed, int samples)
{
    SuiteResult r;
    r.name = "power_fd";
    std::mt19937_64 rng(seed + 29);
    const Discretization disc = small_problem(rng);
    const InterfaceField z = InterfaceField::constant(disc.mesh(), true);
    std::uniform_real_distribution<double> time(0.0, 2.0);
    for (int s = 0; s < samples; ++s) {
        const Vec u = random_free_field(disc, rng);
        const double t = time(rng);
        const double h = 1e-5;
        const double fd = (stored_energy(disc, t + h, u, z) - stored_energy(disc, t - h, u, z)) / (2.0 * h);
        const double an = power(disc, t, u);
        record(r, std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)), "sample " + std::to_string(s));
    }
    return r;
}

std::vector<SuiteResult> run_selfchecks(std::uint64_t seed)
{
    return {selfcheck_dp_bruteforce(seed), selfcheck_certificate(seed), selfcheck_gradient(seed),
            selfcheck_power(seed)};
}

}  // namespace delam
