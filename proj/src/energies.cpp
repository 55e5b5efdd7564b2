#include "delam/energies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace delam {

double kinetic(const Discretization& disc, const Vec& velocity)
{
    return 0.5 * disc.params().rho * velocity.dot(disc.mass() * velocity);
}

double viscous_rate(const Discretization& disc, const Vec& velocity)
{
    return 0.5 * velocity.dot(disc.viscous_stiffness() * velocity);
}

ExtReal ri_dissipation(const InterfaceField& z_new, const InterfaceField& z_old, double a1)
{
    require_same_chain(z_new, z_old, "ri_dissipation");
    double total = 0.0;
    for (int i = 0; i < z_new.size(); ++i) {
        const int drop = z_old[i] - z_new[i];
        if (drop < 0)
            return ExtReal::infinity();
        total += a1 * z_new.lengths()[static_cast<std::size_t>(i)] * drop;
    }
    return total;
}

ExtReal ri_variation(const std::vector<InterfaceField>& path, double a1)
{
    ExtReal total = 0.0;
    for (std::size_t n = 1; n < path.size(); ++n)
        total = total + ri_dissipation(path[n], path[n - 1], a1);
    return total;
}

int perimeter(const InterfaceField& z)
{
    int changes = 0;
    for (int i = 1; i < z.size(); ++i)
        changes += z[i] != z[i - 1] ? 1 : 0;
    return changes;
}

std::vector<double> facet_jump_integrals(const Mesh2D& mesh, const Vec& u)
{
    std::vector<double> out(static_cast<std::size_t>(mesh.num_facets()));
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const auto ends = jump(mesh, u, f);
        const double len = mesh.interface_facets()[static_cast<std::size_t>(f)].length;
        // Simpson's rule, exact for the quadratic integrand of a linear jump.
        const Vec2 mid = 0.5 * (ends[0] + ends[1]);
        out[static_cast<std::size_t>(f)] =
            len / 6.0 * (ends[0].squaredNorm() + 4.0 * mid.squaredNorm() + ends[1].squaredNorm());
    }
    return out;
}

double adhesive_energy(const Mesh2D& mesh, const Vec& u, const InterfaceField& z, double k)
{
    if (z.size() != mesh.num_facets())
        throw std::invalid_argument("adhesive_energy: field does not match the facet chain");
    const auto g = facet_jump_integrals(mesh, u);
    double total = 0.0;
    for (int f = 0; f < z.size(); ++f) {
        if (z.bonded(f))
            total += 0.5 * k * g[static_cast<std::size_t>(f)];
    }
    return total;
}

double max_bonded_jump_norm(const Mesh2D& mesh, const Vec& u, const InterfaceField& z)
{
    const auto g = facet_jump_integrals(mesh, u);
    double worst = 0.0;
    for (int f = 0; f < z.size(); ++f) {
        if (z.bonded(f))
            worst = std::max(worst, std::sqrt(g[static_cast<std::size_t>(f)]));
    }
    return worst;
}

namespace {

StoredEnergyParts parts_with(const Discretization& disc, double t, const Vec& u, const InterfaceField& z,
                             const InterfaceCoefficients& coeffs)
{
    StoredEnergyParts p;
    p.bulk = 0.5 * u.dot(disc.elastic_stiffness() * u);
    p.load_potential = -disc.load(t).dot(u);
    p.surface_linear = -coeffs.a0 * z.bonded_length();
    p.perimeter_term = coeffs.b * perimeter(z);
    return p;
}

}  // namespace

StoredEnergyParts stored_energy_parts(const Discretization& disc, double t, const Vec& u, const InterfaceField& z)
{
    StoredEnergyParts p = parts_with(disc, t, u, z, effective_coeffs(disc.params()));
    p.adhesive = adhesive_energy(disc.mesh(), u, z, disc.params().k);
    return p;
}

double stored_energy(const Discretization& disc, double t, const Vec& u, const InterfaceField& z)
{
    return stored_energy_parts(disc, t, u, z).total();
}

ExtReal stored_energy_brittle(const Discretization& disc, double t, const Vec& u, const InterfaceField& z,
                              double brittle_tol)
{
    if (max_bonded_jump_norm(disc.mesh(), u, z) > brittle_tol)
        return ExtReal::infinity();
    return parts_with(disc, t, u, z, brittle_coeffs(disc.params())).total();
}

double power(const Discretization& disc, double t, const Vec& u)
{
    return -disc.load_rate(t).dot(u);
}

double korn_poincare_constant(const Discretization& disc)
{
    const Eigen::MatrixXd K = Eigen::MatrixXd(disc.restrict(disc.elastic_stiffness()));
    const Eigen::MatrixXd M = Eigen::MatrixXd(disc.restrict(disc.mass()));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("korn_poincare_constant: eigensolver failed");
    return solver.eigenvalues().minCoeff();
}

double stored_energy_lower_bound(const Discretization& disc, double t, double korn)
{
    const Vec f = disc.restrict(disc.load(t));
    const Eigen::MatrixXd M = Eigen::MatrixXd(disc.restrict(disc.mass()));
    const double dual_sq = f.dot(M.llt().solve(f));
    const InterfaceCoefficients c = effective_coeffs(disc.params());
    return -dual_sq / (2.0 * korn) - (c.a0 + c.b) * disc.mesh().interface_length();
}

double h1_norm(const Discretization& disc, const Vec& w)
{
    return std::sqrt(w.dot(disc.mass() * w) + w.dot(disc.gradient_form() * w));
}

}  // namespace delam
