#include "delam/interface.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "delam/energies.hpp"

namespace delam {

FacetCosts facet_costs_from_integrals(const std::vector<double>& jump_integrals, const InterfaceField& z_prev,
                                      const InterfaceCoefficients& coeffs, double k)
{
    if (static_cast<int>(jump_integrals.size()) != z_prev.size())
        throw std::invalid_argument("facet_costs: jump integrals do not match the facet chain");
    FacetCosts c;
    const int n = z_prev.size();
    c.unbonded.resize(static_cast<std::size_t>(n));
    c.bonded.resize(static_cast<std::size_t>(n));
    c.frozen_zero.resize(static_cast<std::size_t>(n));
    c.lengths = z_prev.lengths();
    for (int i = 0; i < n; ++i) {
        const auto s = static_cast<std::size_t>(i);
        const double len = c.lengths[s];
        c.unbonded[s] = len * coeffs.a1 * z_prev[i];
        c.bonded[s] = 0.5 * k * jump_integrals[s] - len * coeffs.a0;
        c.frozen_zero[s] = !z_prev.bonded(i);
    }
    return c;
}

FacetCosts facet_costs(const Mesh2D& mesh, const Vec& u, const InterfaceField& z_prev,
                       const InterfaceCoefficients& coeffs, double k)
{
    if (z_prev.size() != mesh.num_facets())
        throw std::invalid_argument("facet_costs: field does not match the facet chain");
    return facet_costs_from_integrals(facet_jump_integrals(mesh, u), z_prev, coeffs, k);
}

ExtReal chain_objective(const FacetCosts& costs, double b, const InterfaceField& z)
{
    if (z.size() != costs.size())
        throw std::invalid_argument("chain_objective: field does not match the costs");
    double total = 0.0;
    for (int i = 0; i < z.size(); ++i) {
        const auto s = static_cast<std::size_t>(i);
        if (z.bonded(i)) {
            if (costs.frozen_zero[s])
                return ExtReal::infinity();
            total += costs.bonded[s];
        } else {
            total += costs.unbonded[s];
        }
    }
    return total + b * perimeter(z);
}

ChainMinimum minimize_z_dp(const FacetCosts& costs, double b)
{
    const int n = costs.size();
    if (n == 0)
        return {InterfaceField{}, 0.0};
    if (b < 0.0)
        throw std::invalid_argument("minimize_z_dp: perimeter coefficient must be non-negative");

    // value[i][s]: best objective of facets 0..i with z_i = s; reachable[i][s]
    // is false when s = 1 is forbidden on a frozen facet.
    std::vector<std::array<double, 2>> value(static_cast<std::size_t>(n));
    std::vector<std::array<bool, 2>> reachable(static_cast<std::size_t>(n));
    std::vector<std::array<std::uint8_t, 2>> pred(static_cast<std::size_t>(n));

    auto state_cost = [&](int i, int s) {
        return s == 1 ? costs.bonded[static_cast<std::size_t>(i)] : costs.unbonded[static_cast<std::size_t>(i)];
    };

    for (int s = 0; s < 2; ++s) {
        reachable[0][s] = s == 0 || !costs.frozen_zero[0];
        value[0][s] = reachable[0][s] ? state_cost(0, s) : 0.0;
    }
    for (int i = 1; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        for (int s = 0; s < 2; ++s) {
            reachable[si][s] = s == 0 || !costs.frozen_zero[si];
            if (!reachable[si][s])
                continue;
            bool have = false;
            double best = 0.0;
            std::uint8_t arg = 0;
            // Visit the bonded predecessor first so that it wins ties.
            for (int p : {1, 0}) {
                if (!reachable[si - 1][p])
                    continue;
                const double cand = value[si - 1][p] + (p != s ? b : 0.0);
                if (!have || cand < best) {
                    best = cand;
                    arg = static_cast<std::uint8_t>(p);
                    have = true;
                }
            }
            value[si][s] = best + state_cost(i, s);
            pred[si][s] = arg;
        }
    }

    const auto last = static_cast<std::size_t>(n - 1);
    int s = 0;
    if (reachable[last][1] && value[last][1] <= value[last][0])
        s = 1;
    const double optimum = value[last][s];
    std::vector<std::uint8_t> z(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        z[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(s);
        if (i > 0)
            s = pred[static_cast<std::size_t>(i)][s];
    }
    return {InterfaceField(std::move(z), costs.lengths), optimum};
}

InterfaceField update_interface(const Discretization& disc, const Vec& u, const InterfaceField& z_prev)
{
    const InterfaceCoefficients c = effective_coeffs(disc.params());
    const FacetCosts costs = facet_costs(disc.mesh(), u, z_prev, c, disc.params().k);
    return minimize_z_dp(costs, c.b).z;
}

double default_semistab_tol(const Discretization& disc)
{
    const InterfaceCoefficients c = effective_coeffs(disc.params());
    return 1e-10 * disc.mesh().interface_length() * (c.a0 + c.a1);
}

SemistabilityReport certify_semistability(const Discretization& disc, double t, const Vec& u, const InterfaceField& z,
                                          double tol)
{
    (void)t;  // the z-dependent part of E_k does not depend on time
    const InterfaceCoefficients c = effective_coeffs(disc.params());
    const FacetCosts costs = facet_costs(disc.mesh(), u, z, c, disc.params().k);
    const ChainMinimum best = minimize_z_dp(costs, c.b);

    SemistabilityReport r;
    r.tolerance = tol < 0.0 ? default_semistab_tol(disc) : tol;
    r.worst_violation = best.value - chain_objective(costs, c.b, z).value();
    r.ok = r.worst_violation >= -r.tolerance;

    const double own = c.b * perimeter(z);
    const double rate = c.a0 + c.a1;
    r.empty_competitor_margin = rate * z.bonded_length() - own;
    r.perimeter_margin = r.empty_competitor_margin;
    InterfaceField competitor = z;
    for (int i = 0; i < z.size(); ++i) {
        if (!z.bonded(i))
            continue;
        competitor.set(i, false);
        const double margin = c.b * perimeter(competitor) + rate * z.lengths()[static_cast<std::size_t>(i)] - own;
        r.perimeter_margin = std::min(r.perimeter_margin, margin);
        competitor.set(i, true);
    }
    return r;
}

}  // namespace delam
