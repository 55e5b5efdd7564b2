#pragma once

#include <vector>

#include "delam/assembly.hpp"
#include "delam/ext_real.hpp"
#include "delam/interface_field.hpp"

namespace delam {

/// Default absolute tolerance on the facet-wise L2 jump norm below which the
/// brittle constraint counts as satisfied.
inline constexpr double default_brittle_tol = 1e-9;

/// 1/2 rho int |v|^2 with the consistent mass matrix.
double kinetic(const Discretization& disc, const Vec& velocity);

/// V(v) = int 1/2 D e(v) : e(v).
double viscous_rate(const Discretization& disc, const Vec& velocity);

/// R_k(z_new - z_old) = a1 * sum_i l_i (z_old_i - z_new_i) for a
/// componentwise non-increasing change, +infinity otherwise.
ExtReal ri_dissipation(const InterfaceField& z_new, const InterfaceField& z_old, double a1);

/// Total variation induced by R along a sequence of interface states.
ExtReal ri_variation(const std::vector<InterfaceField>& path, double a1);

/// Relative perimeter of the bonded set in the open contact surface: the
/// number of interior sign changes along the facet chain.
int perimeter(const InterfaceField& z);

/// int_facet |[[u]]|^2 for every facet, integrated exactly for the P1 jump.
std::vector<double> facet_jump_integrals(const Mesh2D& mesh, const Vec& u);

/// J_k(u, z) = int (k/2) z |[[u]]|^2.
double adhesive_energy(const Mesh2D& mesh, const Vec& u, const InterfaceField& z, double k);

/// Largest facet-wise L2 jump norm sqrt(int_facet |[[u]]|^2) over bonded facets.
double max_bonded_jump_norm(const Mesh2D& mesh, const Vec& u, const InterfaceField& z);

/// Additive pieces of the stored energy; total() is E_k.
struct StoredEnergyParts {
    double bulk = 0.0;            // 1/2 int C e(u) : e(u)
    double load_potential = 0.0;  // -<f(t), u>
    double surface_linear = 0.0;  // -a0_k int z
    double perimeter_term = 0.0;  // b_k P(Z)
    double adhesive = 0.0;        // J_k(u, z)

    double total() const { return bulk + load_potential + surface_linear + perimeter_term + adhesive; }
};

StoredEnergyParts stored_energy_parts(const Discretization& disc, double t, const Vec& u, const InterfaceField& z);

/// E_k(t, u, z).
double stored_energy(const Discretization& disc, double t, const Vec& u, const InterfaceField& z);

/// E_infinity(t, u, z): the adhesive term is replaced by the brittle indicator
/// and the coefficients by their brittle limits.
ExtReal stored_energy_brittle(const Discretization& disc, double t, const Vec& u, const InterfaceField& z,
                              double brittle_tol = default_brittle_tol);

/// Partial time derivative of the stored energy, -<f'(t), u>.
double power(const Discretization& disc, double t, const Vec& u);

/// Smallest generalized eigenvalue of the elastic stiffness against the unit
/// mass on the free dofs (discrete Korn-Poincare constant). Dense; intended
/// for meshes with at most a few thousand dofs.
double korn_poincare_constant(const Discretization& disc);

/// Lower bound of E_k(t, ., .) from coercivity:
/// -|f(t)|^2_{M^-1} / (2 korn) - (a0_k + b_k) |Gamma_C|.
double stored_energy_lower_bound(const Discretization& disc, double t, double korn);

/// sqrt(w^T M w + w^T L w), the H1 norm of a P1 field on the cut domain.
double h1_norm(const Discretization& disc, const Vec& w);

}  // namespace delam
