#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "delam/assembly.hpp"
#include "delam/interface_field.hpp"

namespace delam {

/// Displacement history window. At the start of a time step `u` is the most
/// recent solution u_{n-1}, `u_prev` is u_{n-2} and `u_prev2` is u_{n-3}.
/// Initial data (u0, u1) is encoded as u = u0, u_prev = u0 - tau u1.
struct KinematicState {
    Vec u;
    Vec u_prev;
    Vec u_prev2;
    double t = 0.0;

    static KinematicState from_initial(const Vec& u0, const Vec& u1, double tau, double t0 = 0.0);
    Vec velocity(double tau) const { return (u - u_prev) / tau; }
    /// Shifts the window and stores the new displacement at time t_new.
    void advance(Vec u_new, double t_new);
};

/// Symmetric positive definite matrix on the free dofs.
struct SparseSPD {
    SparseMatrix matrix;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct SolveOptions {
    double tolerance = 1e-10;   // relative residual
    int max_iterations = 20000; // PCG cap
    int dense_threshold = 2000; // dense Cholesky below this many unknowns
};

/// Solves A x = rhs. Dense Cholesky below the threshold, Jacobi-preconditioned
/// CG above it. Throws SolverError when the relative residual exceeds the
/// tolerance or the matrix is not positive definite.
Vec solve_spd(const SparseSPD& A, const Vec& rhs, const SolveOptions& options = {});

/// Linear system of one implicit step on the free dofs:
///   A   = (rho/tau^2) M + (1/tau) K_D + K_C + k K_z
///   rhs = f(t_new) + (rho/tau^2) M (2 u_{n-1} - u_{n-2}) + (1/tau) K_D u_{n-1}
/// Its solution minimizes the incremental functional
///   (rho/2tau^2)|u - 2u_{n-1} + u_{n-2}|_M^2 + tau V((u - u_{n-1})/tau) + E_k(t_new, u, z).
struct StepSystem {
    SparseSPD A;
    Vec rhs;
};

StepSystem assemble_step_system(const Discretization& disc, const InterfaceField& z, double tau,
                                const KinematicState& state, double t_new);

/// Value of the incremental functional at u (full dof vector).
double incremental_functional(const Discretization& disc, const InterfaceField& z, double tau,
                              const KinematicState& state, double t_new, const Vec& u);

/// Gradient of the incremental functional on the full dofs (A u - rhs,
/// including Dirichlet rows).
Vec incremental_gradient(const Discretization& disc, const InterfaceField& z, double tau,
                         const KinematicState& state, double t_new, const Vec& u);

/// Solves the displacement half-step with the step matrix factorization cached
/// for as long as the interface state stays the same.
class MomentumStepper {
public:
    MomentumStepper(const Discretization& disc, double tau, SolveOptions options = {});

    /// Returns the full displacement vector at t_new for frozen z.
    Vec solve(const InterfaceField& z, const KinematicState& state, double t_new);

    double tau() const { return tau_; }

private:
    const Discretization* disc_;
    double tau_;
    SolveOptions options_;
    SparseMatrix base_;  // z-independent part of A on the free dofs
    std::optional<InterfaceField> cached_z_;
    SparseSPD cached_A_;
    std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> dense_factor_;
};

/// Recovery lift v_sym + xi v_anti where the cutoff xi vanishes within
/// rho = widen * facet length of the bonded set of `support` and rises
/// linearly to 1 at distance 2 rho. Requires v to have zero jump (within
/// 1e-9) on the support facets.
Vec recovery_lift(const Mesh2D& mesh, const Vec& v, const InterfaceField& support, double widen);

/// Nodewise cutoff used by recovery_lift.
Vec recovery_cutoff(const Mesh2D& mesh, const InterfaceField& support, double radius);

/// Writes A in MatrixMarket coordinate format.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

}  // namespace delam
