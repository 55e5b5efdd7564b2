#pragma once

#include <vector>

#include "delam/assembly.hpp"
#include "delam/ext_real.hpp"
#include "delam/interface_field.hpp"

namespace delam {

/// Per-facet cost of the two states in the z-minimization. A facet whose
/// previous value is 0 cannot return to 1 (frozen_zero).
struct FacetCosts {
    std::vector<double> unbonded;  // c0_i = l_i a1_k z_prev_i
    std::vector<double> bonded;    // c1_i = l_i ((k/2) g_i - a0_k)
    std::vector<bool> frozen_zero;
    std::vector<double> lengths;

    int size() const { return static_cast<int>(unbonded.size()); }
};

/// g_i is the mean squared jump on facet i.
FacetCosts facet_costs(const Mesh2D& mesh, const Vec& u, const InterfaceField& z_prev,
                       const InterfaceCoefficients& coeffs, double k);

/// Same costs from precomputed facet integrals int_facet |[[u]]|^2.
FacetCosts facet_costs_from_integrals(const std::vector<double>& jump_integrals, const InterfaceField& z_prev,
                                      const InterfaceCoefficients& coeffs, double k);

/// Objective sum_i c_{z_i,i} + b * (interior sign changes of z); +infinity
/// when z sets a frozen facet to 1.
ExtReal chain_objective(const FacetCosts& costs, double b, const InterfaceField& z);

struct ChainMinimum {
    InterfaceField z;
    double value = 0.0;
};

/// Exact global minimizer of the chain objective by a two-state forward
/// dynamic program with backtracking. Ties are broken toward z = 1.
ChainMinimum minimize_z_dp(const FacetCosts& costs, double b);

/// The z half-step: global minimizer of E_k(t, u, .) + R_k(. - z_prev).
InterfaceField update_interface(const Discretization& disc, const Vec& u, const InterfaceField& z_prev);

struct SemistabilityReport {
    bool ok = false;
    /// min over z~ <= z of [E_k(z~) + R_k(z~ - z)] - E_k(z); <= 0, and
    /// negative values are violations.
    double worst_violation = 0.0;
    /// Smallest margin of b P(Z~) + (a0+a1)|Z \ Z~| - b P(Z) over Z~ = empty and
    /// Z minus one facet; negative values violate the perimeter inequality.
    double perimeter_margin = 0.0;
    /// Margin of the empty competitor alone: (a0+a1)|Z| - b P(Z).
    double empty_competitor_margin = 0.0;
    double tolerance = 0.0;
};

/// Default certification tolerance: 1e-10 * sum_i l_i (a0_k + a1_k).
double default_semistab_tol(const Discretization& disc);

/// tol < 0 selects default_semistab_tol.
SemistabilityReport certify_semistability(const Discretization& disc, double t, const Vec& u, const InterfaceField& z,
                                          double tol = -1.0);

}  // namespace delam
