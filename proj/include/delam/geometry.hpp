#pragma once

#include <array>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace delam {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Which block a node or triangle belongs to. Plus is above the contact
/// surface (y > 0), Minus below (y < 0).
enum class Block { Plus, Minus };

/// Outer boundary pieces of the two-block domain. The side tags touch the
/// contact surface at their lower/upper end.
enum class EdgeTag { Top, Bottom, LeftPlus, LeftMinus, RightPlus, RightMinus };

std::string to_string(EdgeTag tag);
EdgeTag edge_tag_from_string(const std::string& name);

struct BoundaryEdge {
    std::array<int, 2> nodes{};
    EdgeTag tag{};
    Point normal;  // outward unit normal
    double length = 0.0;
};

/// One segment of the contact surface. The plus and minus node pairs sit at
/// identical coordinates but carry distinct dofs.
struct InterfaceFacet {
    std::array<int, 2> plus{};
    std::array<int, 2> minus{};
    double x0 = 0.0;
    double x1 = 0.0;
    double length = 0.0;
};

struct MeshSpec {
    double width = 1.0;
    double height = 1.0;
    int nx = 1;
    int ny = 1;
    std::set<EdgeTag> dirichlet{EdgeTag::Top, EdgeTag::Bottom};
    std::set<EdgeTag> neumann{};
};

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Structured P1 triangulation of two stacked rectangles
/// (0,W)x(0,H) and (0,W)x(-H,0) glued along the contact surface y = 0.
/// Immutable after construction.
class Mesh2D {
public:
    static constexpr int dofs_per_node = 2;

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<Block>& triangle_blocks() const { return triangle_blocks_; }
    const std::vector<Block>& node_blocks() const { return node_blocks_; }
    const std::vector<int>& dirichlet_dofs() const { return dirichlet_dofs_; }
    const std::vector<BoundaryEdge>& neumann_edges() const { return neumann_edges_; }
    const std::vector<InterfaceFacet>& interface_facets() const { return facets_; }
    const std::vector<int>& mirror_map() const { return mirror_; }
    const MeshSpec& spec() const { return spec_; }

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_dofs() const { return dofs_per_node * num_nodes(); }
    int num_facets() const { return static_cast<int>(facets_.size()); }
    static int dof(int node, int component) { return dofs_per_node * node + component; }

    bool is_dirichlet_dof(int d) const { return dirichlet_mask_[static_cast<std::size_t>(d)]; }
    /// Dofs not constrained by the homogeneous Dirichlet condition, ascending.
    const std::vector<int>& free_dofs() const { return free_dofs_; }

    std::vector<double> facet_lengths() const;
    double interface_length() const;
    /// Area of one triangle (positive).
    double triangle_area(int tri) const;
    double area() const;

    /// Nodes on the contact surface, left to right, for the given block.
    std::vector<int> interface_nodes(Block side) const;

    friend Mesh2D build_two_block_mesh(const MeshSpec& spec);

private:
    Mesh2D() = default;

    MeshSpec spec_;
    std::vector<Point> nodes_;
    std::vector<Block> node_blocks_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Block> triangle_blocks_;
    std::vector<int> dirichlet_dofs_;
    std::vector<bool> dirichlet_mask_;
    std::vector<int> free_dofs_;
    std::vector<BoundaryEdge> neumann_edges_;
    std::vector<InterfaceFacet> facets_;
    std::vector<int> mirror_;
};

/// Builds the two-block mesh. Throws GeometryError when the Dirichlet set
/// touches the closure of the contact surface, misses one of the blocks, or
/// overlaps the Neumann set.
Mesh2D build_two_block_mesh(const MeshSpec& spec);

inline Mesh2D build_two_block_mesh(double width, double height, int nx, int ny,
                                   std::set<EdgeTag> dirichlet = {EdgeTag::Top, EdgeTag::Bottom},
                                   std::set<EdgeTag> neumann = {})
{
    return build_two_block_mesh(MeshSpec{width, height, nx, ny, std::move(dirichlet), std::move(neumann)});
}

/// Displacement jump u+ - u- at the two endpoints of a facet.
std::array<Vec2, 2> jump(const Mesh2D& mesh, const Vec& u, int facet);

/// Nodewise split v = v_sym + v_anti with respect to the reflection across
/// the contact surface.
std::pair<Vec, Vec> sym_anti_split(const Mesh2D& mesh, const Vec& v);

/// Mesh as JSON text (nodes, triangles, facets); debugging aid.
std::string mesh_to_json(const Mesh2D& mesh);

}  // namespace delam
