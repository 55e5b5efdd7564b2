#include "delam/assembly.hpp"

#include <numeric>
#include <stdexcept>

namespace delam {

Eigen::Matrix<double, 3, 6> strain_displacement(const Mesh2D& mesh, int tri)
{
    const auto& t = mesh.triangles()[static_cast<std::size_t>(tri)];
    const Point& p0 = mesh.nodes()[t[0]];
    const Point& p1 = mesh.nodes()[t[1]];
    const Point& p2 = mesh.nodes()[t[2]];
    const double two_area = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const std::array<double, 3> dndx{(p1.y - p2.y) / two_area, (p2.y - p0.y) / two_area, (p0.y - p1.y) / two_area};
    const std::array<double, 3> dndy{(p2.x - p1.x) / two_area, (p0.x - p2.x) / two_area, (p1.x - p0.x) / two_area};
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int a = 0; a < 3; ++a) {
        B(0, 2 * a) = dndx[a];
        B(1, 2 * a + 1) = dndy[a];
        B(2, 2 * a) = dndy[a];
        B(2, 2 * a + 1) = dndx[a];
    }
    return B;
}

Eigen::Matrix<double, 8, 8> Discretization::facet_matrix(double length)
{
    // Jump operator: rows (endpoint, component), columns facet dofs
    // [p0x p0y p1x p1y m0x m0y m1x m1y].
    Eigen::Matrix<double, 4, 8> J = Eigen::Matrix<double, 4, 8>::Zero();
    for (int e = 0; e < 2; ++e) {
        for (int c = 0; c < 2; ++c) {
            J(2 * e + c, 2 * e + c) = 1.0;
            J(2 * e + c, 4 + 2 * e + c) = -1.0;
        }
    }
    Eigen::Matrix4d line_mass = Eigen::Matrix4d::Zero();
    for (int c = 0; c < 2; ++c) {
        line_mass(c, c) = 2.0;
        line_mass(2 + c, 2 + c) = 2.0;
        line_mass(c, 2 + c) = 1.0;
        line_mass(2 + c, c) = 1.0;
    }
    line_mass *= length / 6.0;
    return J.transpose() * line_mass * J;
}

std::array<int, 8> Discretization::facet_dofs(int facet) const
{
    const auto& f = mesh_.interface_facets()[static_cast<std::size_t>(facet)];
    return {Mesh2D::dof(f.plus[0], 0), Mesh2D::dof(f.plus[0], 1), Mesh2D::dof(f.plus[1], 0),
            Mesh2D::dof(f.plus[1], 1), Mesh2D::dof(f.minus[0], 0), Mesh2D::dof(f.minus[0], 1),
            Mesh2D::dof(f.minus[1], 0), Mesh2D::dof(f.minus[1], 1)};
}

Discretization::Discretization(Mesh2D mesh, ModelParams params, std::span<const int> element_order)
    : mesh_(std::move(mesh)), params_(std::move(params))
{
    validate(params_);
    const int n_tri = static_cast<int>(mesh_.triangles().size());
    std::vector<int> order(static_cast<std::size_t>(n_tri));
    if (element_order.empty()) {
        std::iota(order.begin(), order.end(), 0);
    } else {
        if (static_cast<int>(element_order.size()) != n_tri)
            throw std::invalid_argument("element_order must be a permutation of the triangles");
        std::vector<bool> seen(order.size(), false);
        for (std::size_t i = 0; i < order.size(); ++i) {
            const int e = element_order[i];
            if (e < 0 || e >= n_tri || seen[static_cast<std::size_t>(e)])
                throw std::invalid_argument("element_order must be a permutation of the triangles");
            seen[static_cast<std::size_t>(e)] = true;
            order[i] = e;
        }
    }

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> m_trip, c_trip, d_trip, g_trip;
    const Eigen::Matrix3d c_mat = params_.elastic.voigt();
    const Eigen::Matrix3d d_mat = params_.viscous.voigt();
    for (int tri : order) {
        const auto& t = mesh_.triangles()[static_cast<std::size_t>(tri)];
        const double area = mesh_.triangle_area(tri);
        const Eigen::Matrix<double, 3, 6> B = strain_displacement(mesh_, tri);
        const Eigen::Matrix<double, 6, 6> kc = area * B.transpose() * c_mat * B;
        const Eigen::Matrix<double, 6, 6> kd = area * B.transpose() * d_mat * B;
        // Scalar gradients sit in rows 0 (d/dx, even columns) and 1 (d/dy, odd columns).
        Eigen::Matrix3d grad;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b)
                grad(a, b) = area * (B(0, 2 * a) * B(0, 2 * b) + B(1, 2 * a + 1) * B(1, 2 * b + 1));
        }
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const double m = area / 12.0 * (a == b ? 2.0 : 1.0);
                for (int ca = 0; ca < 2; ++ca) {
                    const int row = Mesh2D::dof(t[a], ca);
                    m_trip.emplace_back(row, Mesh2D::dof(t[b], ca), m);
                    g_trip.emplace_back(row, Mesh2D::dof(t[b], ca), grad(a, b));
                    for (int cb = 0; cb < 2; ++cb) {
                        const int col = Mesh2D::dof(t[b], cb);
                        c_trip.emplace_back(row, col, kc(2 * a + ca, 2 * b + cb));
                        d_trip.emplace_back(row, col, kd(2 * a + ca, 2 * b + cb));
                    }
                }
            }
        }
    }
    const int n = mesh_.num_dofs();
    auto build = [n](SparseMatrix& out, const std::vector<Triplet>& trip) {
        out.resize(n, n);
        out.setFromTriplets(trip.begin(), trip.end());
    };
    build(mass_, m_trip);
    build(elastic_, c_trip);
    build(viscous_, d_trip);
    build(gradient_, g_trip);

    std::vector<Triplet> sel;
    const auto& free = mesh_.free_dofs();
    for (std::size_t i = 0; i < free.size(); ++i)
        sel.emplace_back(static_cast<int>(i), free[i], 1.0);
    selector_.resize(static_cast<int>(free.size()), n);
    selector_.setFromTriplets(sel.begin(), sel.end());

    for (const auto& term : params_.load.terms()) {
        Vec g = Vec::Zero(n);
        if (const auto* body = std::get_if<BodyTarget>(&term.target)) {
            for (int tri = 0; tri < n_tri; ++tri) {
                if (mesh_.triangle_blocks()[static_cast<std::size_t>(tri)] != body->block)
                    continue;
                const double share = mesh_.triangle_area(tri) / 3.0;
                for (int node : mesh_.triangles()[static_cast<std::size_t>(tri)]) {
                    for (int c = 0; c < 2; ++c)
                        g[Mesh2D::dof(node, c)] += share * term.direction[c];
                }
            }
        } else {
            const EdgeTag edge = std::get<TractionTarget>(term.target).edge;
            bool found = false;
            for (const auto& e : mesh_.neumann_edges()) {
                if (e.tag != edge)
                    continue;
                found = true;
                for (int node : e.nodes) {
                    for (int c = 0; c < 2; ++c)
                        g[Mesh2D::dof(node, c)] += 0.5 * e.length * term.direction[c];
                }
            }
            if (!found)
                throw std::invalid_argument("traction load on edge '" + to_string(edge) +
                                            "' which is not a Neumann edge of the mesh");
        }
        term_vectors_.push_back(std::move(g));
    }
}

SparseMatrix Discretization::interface_matrix(const InterfaceField& z) const
{
    if (z.size() != mesh_.num_facets())
        throw std::invalid_argument("interface_matrix: field does not match the facet chain");
    std::vector<Eigen::Triplet<double>> trip;
    for (int f = 0; f < z.size(); ++f) {
        if (!z.bonded(f))
            continue;
        const auto block = facet_matrix(mesh_.interface_facets()[static_cast<std::size_t>(f)].length);
        const auto dofs = facet_dofs(f);
        for (int a = 0; a < 8; ++a) {
            for (int b = 0; b < 8; ++b) {
                if (block(a, b) != 0.0)
                    trip.emplace_back(dofs[a], dofs[b], block(a, b));
            }
        }
    }
    SparseMatrix out(mesh_.num_dofs(), mesh_.num_dofs());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Vec Discretization::load(double t) const
{
    Vec f = Vec::Zero(mesh_.num_dofs());
    const auto& terms = params_.load.terms();
    for (std::size_t i = 0; i < terms.size(); ++i)
        f += terms[i].profile.value(t) * term_vectors_[i];
    return f;
}

Vec Discretization::load_rate(double t) const
{
    Vec f = Vec::Zero(mesh_.num_dofs());
    const auto& terms = params_.load.terms();
    for (std::size_t i = 0; i < terms.size(); ++i)
        f += terms[i].profile.rate(t) * term_vectors_[i];
    return f;
}

Vec Discretization::restrict(const Vec& full) const
{
    return selector_ * full;
}

Vec Discretization::prolong(const Vec& free) const
{
    return selector_.transpose() * free;
}

SparseMatrix Discretization::restrict(const SparseMatrix& full) const
{
    return selector_ * full * selector_.transpose();
}

}  // namespace delam
