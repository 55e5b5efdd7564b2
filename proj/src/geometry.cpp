#include "delam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace delam {

std::string to_string(EdgeTag tag)
{
    switch (tag) {
    case EdgeTag::Top: return "top";
    case EdgeTag::Bottom: return "bottom";
    case EdgeTag::LeftPlus: return "left_plus";
    case EdgeTag::LeftMinus: return "left_minus";
    case EdgeTag::RightPlus: return "right_plus";
    case EdgeTag::RightMinus: return "right_minus";
    }
    return "unknown";
}

EdgeTag edge_tag_from_string(const std::string& name)
{
    for (EdgeTag tag : {EdgeTag::Top, EdgeTag::Bottom, EdgeTag::LeftPlus, EdgeTag::LeftMinus,
                        EdgeTag::RightPlus, EdgeTag::RightMinus}) {
        if (to_string(tag) == name)
            return tag;
    }
    throw GeometryError("unknown edge tag '" + name + "'");
}

namespace {

bool touches_contact_surface(EdgeTag tag)
{
    // Side edges end at the contact surface corners (0,0) and (W,0).
    return tag != EdgeTag::Top && tag != EdgeTag::Bottom;
}

Block block_of(EdgeTag tag)
{
    switch (tag) {
    case EdgeTag::Top:
    case EdgeTag::LeftPlus:
    case EdgeTag::RightPlus: return Block::Plus;
    default: return Block::Minus;
    }
}

}  // namespace

Mesh2D build_two_block_mesh(const MeshSpec& spec)
{
    if (spec.nx < 1 || spec.ny < 1)
        throw GeometryError("nx and ny must be at least 1");
    if (!(spec.width > 0.0) || !(spec.height > 0.0))
        throw GeometryError("block width and height must be positive");

    bool plus_clamped = false;
    bool minus_clamped = false;
    for (EdgeTag tag : spec.dirichlet) {
        if (touches_contact_surface(tag))
            throw GeometryError("Dirichlet edge '" + to_string(tag) +
                                "' touches the closure of the contact surface");
        (block_of(tag) == Block::Plus ? plus_clamped : minus_clamped) = true;
    }
    if (!plus_clamped || !minus_clamped)
        throw GeometryError("Dirichlet set must have positive length on both blocks");
    for (EdgeTag tag : spec.neumann) {
        if (spec.dirichlet.count(tag))
            throw GeometryError("edge '" + to_string(tag) + "' is both Dirichlet and Neumann");
    }

    Mesh2D mesh;
    mesh.spec_ = spec;
    const int nx = spec.nx;
    const int ny = spec.ny;
    const int per_block = (nx + 1) * (ny + 1);
    auto node_index = [&](Block side, int i, int j) {
        return (side == Block::Plus ? 0 : per_block) + j * (nx + 1) + i;
    };

    mesh.nodes_.resize(static_cast<std::size_t>(2 * per_block));
    mesh.node_blocks_.resize(mesh.nodes_.size());
    mesh.mirror_.resize(mesh.nodes_.size());
    for (int j = 0; j <= ny; ++j) {
        const double y = spec.height * j / ny;
        for (int i = 0; i <= nx; ++i) {
            const double x = spec.width * i / nx;
            const int p = node_index(Block::Plus, i, j);
            const int m = node_index(Block::Minus, i, j);
            mesh.nodes_[p] = {x, y};
            mesh.nodes_[m] = {x, -y};
            mesh.node_blocks_[p] = Block::Plus;
            mesh.node_blocks_[m] = Block::Minus;
            mesh.mirror_[p] = m;
            mesh.mirror_[m] = p;
        }
    }

    for (Block side : {Block::Plus, Block::Minus}) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int a = node_index(side, i, j);
                const int b = node_index(side, i + 1, j);
                const int c = node_index(side, i + 1, j + 1);
                const int d = node_index(side, i, j + 1);
                // The minus block is the reflection of the plus block; swap two
                // vertices there to keep counter-clockwise orientation.
                if (side == Block::Plus) {
                    mesh.triangles_.push_back({a, b, c});
                    mesh.triangles_.push_back({a, c, d});
                } else {
                    mesh.triangles_.push_back({a, c, b});
                    mesh.triangles_.push_back({a, d, c});
                }
                mesh.triangle_blocks_.push_back(side);
                mesh.triangle_blocks_.push_back(side);
            }
        }
    }

    auto add_edges = [&](EdgeTag tag, std::vector<std::array<int, 2>>& out) {
        const Block side = block_of(tag);
        switch (tag) {
        case EdgeTag::Top:
        case EdgeTag::Bottom:
            for (int i = 0; i < nx; ++i)
                out.push_back({node_index(side, i, ny), node_index(side, i + 1, ny)});
            break;
        case EdgeTag::LeftPlus:
        case EdgeTag::LeftMinus:
            for (int j = 0; j < ny; ++j)
                out.push_back({node_index(side, 0, j), node_index(side, 0, j + 1)});
            break;
        case EdgeTag::RightPlus:
        case EdgeTag::RightMinus:
            for (int j = 0; j < ny; ++j)
                out.push_back({node_index(side, nx, j), node_index(side, nx, j + 1)});
            break;
        }
    };
    auto outward_normal = [](EdgeTag tag) -> Point {
        switch (tag) {
        case EdgeTag::Top: return {0.0, 1.0};
        case EdgeTag::Bottom: return {0.0, -1.0};
        case EdgeTag::LeftPlus:
        case EdgeTag::LeftMinus: return {-1.0, 0.0};
        default: return {1.0, 0.0};
        }
    };

    mesh.dirichlet_mask_.assign(static_cast<std::size_t>(mesh.num_dofs()), false);
    for (EdgeTag tag : spec.dirichlet) {
        std::vector<std::array<int, 2>> edges;
        add_edges(tag, edges);
        for (const auto& e : edges) {
            for (int n : e) {
                for (int c = 0; c < Mesh2D::dofs_per_node; ++c)
                    mesh.dirichlet_mask_[Mesh2D::dof(n, c)] = true;
            }
        }
    }
    for (int d = 0; d < mesh.num_dofs(); ++d)
        (mesh.dirichlet_mask_[d] ? mesh.dirichlet_dofs_ : mesh.free_dofs_).push_back(d);

    for (EdgeTag tag : spec.neumann) {
        std::vector<std::array<int, 2>> edges;
        add_edges(tag, edges);
        for (const auto& e : edges) {
            const Point& p = mesh.nodes_[e[0]];
            const Point& q = mesh.nodes_[e[1]];
            mesh.neumann_edges_.push_back({e, tag, outward_normal(tag), std::hypot(q.x - p.x, q.y - p.y)});
        }
    }

    for (int i = 0; i < nx; ++i) {
        InterfaceFacet f;
        f.plus = {node_index(Block::Plus, i, 0), node_index(Block::Plus, i + 1, 0)};
        f.minus = {node_index(Block::Minus, i, 0), node_index(Block::Minus, i + 1, 0)};
        f.x0 = mesh.nodes_[f.plus[0]].x;
        f.x1 = mesh.nodes_[f.plus[1]].x;
        f.length = f.x1 - f.x0;
        mesh.facets_.push_back(f);
    }
    return mesh;
}

std::vector<double> Mesh2D::facet_lengths() const
{
    std::vector<double> out;
    out.reserve(facets_.size());
    for (const auto& f : facets_)
        out.push_back(f.length);
    return out;
}

double Mesh2D::interface_length() const
{
    double total = 0.0;
    for (const auto& f : facets_)
        total += f.length;
    return total;
}

double Mesh2D::triangle_area(int tri) const
{
    const auto& t = triangles_[static_cast<std::size_t>(tri)];
    const Point& a = nodes_[t[0]];
    const Point& b = nodes_[t[1]];
    const Point& c = nodes_[t[2]];
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double Mesh2D::area() const
{
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(triangles_.size()); ++t)
        total += triangle_area(t);
    return total;
}

std::vector<int> Mesh2D::interface_nodes(Block side) const
{
    std::vector<int> out;
    for (const auto& f : facets_) {
        const auto& pair = side == Block::Plus ? f.plus : f.minus;
        if (out.empty())
            out.push_back(pair[0]);
        out.push_back(pair[1]);
    }
    return out;
}

std::array<Vec2, 2> jump(const Mesh2D& mesh, const Vec& u, int facet)
{
    if (facet < 0 || facet >= mesh.num_facets())
        throw std::out_of_range("jump: facet index " + std::to_string(facet) + " out of range");
    if (u.size() != mesh.num_dofs())
        throw std::invalid_argument("jump: displacement size does not match dof count");
    const auto& f = mesh.interface_facets()[static_cast<std::size_t>(facet)];
    std::array<Vec2, 2> out;
    for (int e = 0; e < 2; ++e) {
        for (int c = 0; c < 2; ++c)
            out[e][c] = u[Mesh2D::dof(f.plus[e], c)] - u[Mesh2D::dof(f.minus[e], c)];
    }
    return out;
}

std::pair<Vec, Vec> sym_anti_split(const Mesh2D& mesh, const Vec& v)
{
    const auto& mirror = mesh.mirror_map();
    if (mirror.size() != static_cast<std::size_t>(mesh.num_nodes()))
        throw GeometryError("sym_anti_split: mesh has no mirror map");
    if (v.size() != mesh.num_dofs())
        throw std::invalid_argument("sym_anti_split: field size does not match dof count");
    Vec sym(v.size());
    Vec anti(v.size());
    for (int n = 0; n < mesh.num_nodes(); ++n) {
        const int m = mirror[n];
        for (int c = 0; c < 2; ++c) {
            const double here = v[Mesh2D::dof(n, c)];
            const double there = v[Mesh2D::dof(m, c)];
            sym[Mesh2D::dof(n, c)] = 0.5 * (here + there);
            anti[Mesh2D::dof(n, c)] = 0.5 * (here - there);
        }
    }
    return {sym, anti};
}

std::string mesh_to_json(const Mesh2D& mesh)
{
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& p : mesh.nodes())
        j["nodes"].push_back({p.x, p.y});
    j["triangles"] = mesh.triangles();
    j["facets"] = nlohmann::json::array();
    for (const auto& f : mesh.interface_facets())
        j["facets"].push_back({{"plus", f.plus}, {"minus", f.minus}, {"length", f.length}});
    j["dirichlet_dofs"] = mesh.dirichlet_dofs();
    return j.dump();
}

}  // namespace delam
