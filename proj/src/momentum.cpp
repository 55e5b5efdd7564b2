#include "delam/momentum.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/IterativeLinearSolvers>
#include <unsupported/Eigen/SparseExtra>

#include "delam/energies.hpp"

namespace delam {

KinematicState KinematicState::from_initial(const Vec& u0, const Vec& u1, double tau, double t0)
{
    KinematicState s;
    s.u = u0;
    s.u_prev = u0 - tau * u1;
    s.u_prev2 = u0 - 2.0 * tau * u1;
    s.t = t0;
    return s;
}

void KinematicState::advance(Vec u_new, double t_new)
{
    u_prev2 = std::move(u_prev);
    u_prev = std::move(u);
    u = std::move(u_new);
    t = t_new;
}

namespace {

double relative_residual(const SparseMatrix& A, const Vec& x, const Vec& rhs)
{
    const double bnorm = rhs.norm();
    const double rnorm = (A * x - rhs).norm();
    return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

}  // namespace

Vec solve_spd(const SparseSPD& A, const Vec& rhs, const SolveOptions& options)
{
    const auto n = A.matrix.rows();
    if (A.matrix.cols() != n || rhs.size() != n)
        throw std::invalid_argument("solve_spd: dimension mismatch");
    if (rhs.squaredNorm() == 0.0)
        return Vec::Zero(n);

    Vec x;
    if (n < options.dense_threshold) {
        Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(A.matrix));
        if (llt.info() != Eigen::Success)
            throw SolverError("solve_spd: matrix is not positive definite", std::numeric_limits<double>::quiet_NaN());
        x = llt.solve(rhs);
    } else {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(0.5 * options.tolerance);
        cg.setMaxIterations(options.max_iterations);
        cg.compute(A.matrix);
        x = cg.solve(rhs);
        if (cg.info() != Eigen::Success) {
            throw SolverError("solve_spd: PCG did not converge in " + std::to_string(cg.iterations()) +
                                  " iterations",
                              relative_residual(A.matrix, x, rhs));
        }
    }
    const double res = relative_residual(A.matrix, x, rhs);
    if (!(res <= options.tolerance))
        throw SolverError("solve_spd: relative residual " + std::to_string(res) + " above tolerance", res);
    return x;
}

namespace {

SparseMatrix base_step_matrix(const Discretization& disc, double tau)
{
    const double rho = disc.params().rho;
    const SparseMatrix full = (rho / (tau * tau)) * disc.mass() + (1.0 / tau) * disc.viscous_stiffness() +
                              disc.elastic_stiffness();
    return disc.restrict(full);
}

Vec step_rhs_full(const Discretization& disc, double tau, const KinematicState& state, double t_new)
{
    const double rho = disc.params().rho;
    return disc.load(t_new) + (rho / (tau * tau)) * (disc.mass() * (2.0 * state.u - state.u_prev)) +
           (1.0 / tau) * (disc.viscous_stiffness() * state.u);
}

void require_step_inputs(const Discretization& disc, double tau, const KinematicState& state)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("time step must be positive");
    if (state.u.size() != disc.num_dofs() || state.u_prev.size() != disc.num_dofs())
        throw std::invalid_argument("kinematic state does not match the dof count");
    if (disc.mesh().dirichlet_dofs().empty())
        throw SolverError("step system is singular: empty Dirichlet set", std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

StepSystem assemble_step_system(const Discretization& disc, const InterfaceField& z, double tau,
                                const KinematicState& state, double t_new)
{
    require_step_inputs(disc, tau, state);
    StepSystem sys;
    sys.A.matrix = base_step_matrix(disc, tau) + disc.params().k * disc.restrict(disc.interface_matrix(z));
    sys.rhs = disc.restrict(step_rhs_full(disc, tau, state, t_new));
    return sys;
}

double incremental_functional(const Discretization& disc, const InterfaceField& z, double tau,
                              const KinematicState& state, double t_new, const Vec& u)
{
    const double rho = disc.params().rho;
    const Vec second = u - 2.0 * state.u + state.u_prev;
    const Vec incr = u - state.u;
    return rho / (2.0 * tau * tau) * second.dot(disc.mass() * second) +
           tau * viscous_rate(disc, incr / tau) + stored_energy(disc, t_new, u, z);
}

Vec incremental_gradient(const Discretization& disc, const InterfaceField& z, double tau,
                         const KinematicState& state, double t_new, const Vec& u)
{
    const double rho = disc.params().rho;
    const SparseMatrix A = (rho / (tau * tau)) * disc.mass() + (1.0 / tau) * disc.viscous_stiffness() +
                           disc.elastic_stiffness() + disc.params().k * disc.interface_matrix(z);
    return A * u - step_rhs_full(disc, tau, state, t_new);
}

MomentumStepper::MomentumStepper(const Discretization& disc, double tau, SolveOptions options)
    : disc_(&disc), tau_(tau), options_(options)
{
    if (!(tau > 0.0))
        throw std::invalid_argument("time step must be positive");
    base_ = base_step_matrix(disc, tau);
}

Vec MomentumStepper::solve(const InterfaceField& z, const KinematicState& state, double t_new)
{
    require_step_inputs(*disc_, tau_, state);
    if (!cached_z_ || !(*cached_z_ == z)) {
        cached_A_.matrix = base_ + disc_->params().k * disc_->restrict(disc_->interface_matrix(z));
        cached_z_ = z;
        dense_factor_.reset();
        if (cached_A_.matrix.rows() < options_.dense_threshold) {
            dense_factor_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(Eigen::MatrixXd(cached_A_.matrix));
            if (dense_factor_->info() != Eigen::Success)
                throw SolverError("step matrix is not positive definite", std::numeric_limits<double>::quiet_NaN());
        }
    }
    const Vec rhs = disc_->restrict(step_rhs_full(*disc_, tau_, state, t_new));
    Vec x;
    if (dense_factor_) {
        x = dense_factor_->solve(rhs);
        const double res = relative_residual(cached_A_.matrix, x, rhs);
        if (!(res <= options_.tolerance))
            throw SolverError("step solve: relative residual " + std::to_string(res) + " above tolerance", res);
    } else {
        x = solve_spd(cached_A_, rhs, options_);
    }
    return disc_->prolong(x);
}

Vec recovery_cutoff(const Mesh2D& mesh, const InterfaceField& support, double radius)
{
    if (support.size() != mesh.num_facets())
        throw std::invalid_argument("recovery_cutoff: support does not match the facet chain");
    if (!(radius > 0.0))
        throw std::invalid_argument("recovery_cutoff: radius must be positive");
    Vec xi = Vec::Ones(mesh.num_nodes());
    if (support.bonded_count() == 0)
        return xi;
    const auto& facets = mesh.interface_facets();
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        const Point& p = mesh.nodes()[static_cast<std::size_t>(n)];
        double dx = std::numeric_limits<double>::max();
        for (int f = 0; f < support.size(); ++f) {
            if (!support.bonded(f))
                continue;
            const auto& seg = facets[static_cast<std::size_t>(f)];
            const double d = p.x < seg.x0 ? seg.x0 - p.x : (p.x > seg.x1 ? p.x - seg.x1 : 0.0);
            dx = std::min(dx, d);
        }
        const double dist = std::hypot(dx, p.y);
        // Relative slack absorbs rounding in node coordinates at exactly rho.
        const double excess = dist - radius * (1.0 + 1e-12);
        xi[n] = excess <= 0.0 ? 0.0 : std::min(excess / radius, 1.0);
    }
    return xi;
}

Vec recovery_lift(const Mesh2D& mesh, const Vec& v, const InterfaceField& support, double widen)
{
    if (support.size() != mesh.num_facets())
        throw std::invalid_argument("recovery_lift: support does not match the facet chain");
    for (int f = 0; f < support.size(); ++f) {
        if (!support.bonded(f))
            continue;
        const auto ends = jump(mesh, v, f);
        if (ends[0].norm() > 1e-9 || ends[1].norm() > 1e-9)
            throw std::invalid_argument("recovery_lift: field jumps on support facet " + std::to_string(f));
    }
    const double radius = widen * mesh.interface_facets().front().length;
    const Vec xi = recovery_cutoff(mesh, support, radius);
    auto [sym, anti] = sym_anti_split(mesh, v);
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        for (int c = 0; c < 2; ++c)
            sym[Mesh2D::dof(n, c)] += xi[n] * anti[Mesh2D::dof(n, c)];
    }
    return sym;
}

void write_matrix_market(const SparseMatrix& A, const std::string& path)
{
    if (!Eigen::saveMarket(A, path))
        throw std::runtime_error("could not write " + path);
}

}  // namespace delam
