#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "delam/geometry.hpp"
#include "delam/interface_field.hpp"
#include "delam/materials.hpp"

namespace delam {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// P1 finite element discretization of the two-block problem: consistent mass,
/// elastic and viscous stiffness, gradient (Laplacian) form for H1 norms, load
/// vectors, and the interface jump form. All matrices act on the full dof
/// vector; restrict() maps to the free (non-Dirichlet) dofs.
class Discretization {
public:
    /// element_order, when non-empty, is a permutation of the triangles that
    /// fixes the order in which element contributions are summed.
    Discretization(Mesh2D mesh, ModelParams params, std::span<const int> element_order = {});

    const Mesh2D& mesh() const { return mesh_; }
    const ModelParams& params() const { return params_; }

    /// Mass matrix for unit density.
    const SparseMatrix& mass() const { return mass_; }
    const SparseMatrix& elastic_stiffness() const { return elastic_; }
    const SparseMatrix& viscous_stiffness() const { return viscous_; }
    /// Vector Laplacian: w^T L w = int |grad w|^2.
    const SparseMatrix& gradient_form() const { return gradient_; }

    /// sum over bonded facets of int_facet [[u]].[[v]]  (no factor k).
    SparseMatrix interface_matrix(const InterfaceField& z) const;
    /// Same form restricted to a single facet, as a dense 8x8 block over the
    /// facet dofs returned by facet_dofs().
    static Eigen::Matrix<double, 8, 8> facet_matrix(double length);
    std::array<int, 8> facet_dofs(int facet) const;

    /// Nodal load vector <f(t), .> and its time derivative.
    Vec load(double t) const;
    Vec load_rate(double t) const;

    int num_dofs() const { return mesh_.num_dofs(); }
    int num_free() const { return static_cast<int>(mesh_.free_dofs().size()); }
    Vec restrict(const Vec& full) const;
    Vec prolong(const Vec& free) const;
    SparseMatrix restrict(const SparseMatrix& full) const;

private:
    Mesh2D mesh_;
    ModelParams params_;
    SparseMatrix mass_;
    SparseMatrix elastic_;
    SparseMatrix viscous_;
    SparseMatrix gradient_;
    SparseMatrix selector_;  // num_free x num_dofs
    std::vector<Vec> term_vectors_;  // load vector of each load term at unit profile
};

/// Strain (e11, e22, 2 e12) of a P1 field on one triangle, and the 3x6
/// strain-displacement matrix.
Eigen::Matrix<double, 3, 6> strain_displacement(const Mesh2D& mesh, int tri);

}  // namespace delam
