#pragma once

#include "hpmin/quadrature.hpp"
#include "hpmin/reference_basis.hpp"

#include <Eigen/Core>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpmin {

using Index = Eigen::Index;
using IndexMatrixX4 = Eigen::Matrix<Index, Eigen::Dynamic, 4, Eigen::RowMajor>;
using IndexMatrixX2 = Eigen::Matrix<Index, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Raised when an element map has non-positive Jacobian determinant.
class DegenerateElementError : public std::runtime_error {
public:
    DegenerateElementError(Index element, const std::string& what)
        : std::runtime_error(what), element_(element) {}
    [[nodiscard]] Index element() const { return element_; }

private:
    Index element_;
};

/// Straight-sided quadrilateral mesh. Elements are counterclockwise; local edge s
/// joins local nodes s and (s+1) mod 4. Edges are stored with ascending node indices,
/// sorted lexicographically, which fixes the global edge direction.
struct QuadMesh {
    Eigen::MatrixX2d nodes;
    IndexMatrixX4 elems2nodes;
    IndexMatrixX2 edges2nodes;
    IndexMatrixX4 elems2edges;
    std::vector<Index> boundary_nodes;
    std::vector<Index> boundary_edges;
    /// Boundary labels ("boundary", "left", "hole", ...) as per-node flags.
    std::map<std::string, std::vector<bool>> node_tags;

    [[nodiscard]] Index num_nodes() const { return nodes.rows(); }
    [[nodiscard]] Index num_edges() const { return edges2nodes.rows(); }
    [[nodiscard]] Index num_elems() const { return elems2nodes.rows(); }

    [[nodiscard]] bool has_tag(const std::string& tag) const { return node_tags.count(tag) != 0; }
    /// True when edge e lies on the boundary and both end nodes carry `tag`.
    [[nodiscard]] bool edge_has_tag(Index edge, const std::string& tag) const;
    [[nodiscard]] std::vector<bool> boundary_edge_flags() const;
};

/// Builds edges and boundary sets from node coordinates and element connectivity.
/// Tags are left empty.
QuadMesh build_mesh(Eigen::MatrixX2d nodes, IndexMatrixX4 elems);

/// Tags every boundary node with "boundary", plus "left"/"right"/"bottom"/"top" for nodes
/// on the bounding box sides.
void tag_box_sides(QuadMesh& mesh, double tol = 1e-12);

/// Structured grid of [x0,x1] x [y0,y1] with nx x ny cells.
QuadMesh make_rectangle(double x0, double x1, double y0, double y1, Index nx, Index ny);

/// L-shaped domain (0,2)^2 minus [1,2]x[0,1], squares of side 1/2, refined `level` times.
QuadMesh make_lshape(int level);

/// Square [0,2]^2 with a disk of radius 1/3 removed at (1,1), meshed as four blocks (one
/// per side) blending the hole arc into the square side. Each block has 8 * 2^level cells
/// along the side and 4 * 2^level across, so |T| = 128 * 4^level. Hole nodes lie on the circle.
QuadMesh make_perforated_square(int level);

/// Splits each quad into four through edge midpoints and the bilinear centroid.
QuadMesh refine_uniform(const QuadMesh& mesh);

/// Determinant of the bilinear map of element e at each of its four corners.
Eigen::Vector4d corner_jacobians(const QuadMesh& mesh, Index e);

/// Area of the bilinear element e.
double element_area(const QuadMesh& mesh, Index e);
double mesh_area(const QuadMesh& mesh);

/// Per-element, per-quadrature-point physical shape gradients and integration weights.
/// dphi_x, dphi_y hold element e in columns [e*n_ip, (e+1)*n_ip).
struct GeometryFactors {
    Index n_ip = 0;
    Index n_elems = 0;
    Eigen::MatrixXd dphi_x;
    Eigen::MatrixXd dphi_y;
    Eigen::MatrixXd wdetj;  // n_ip x n_elems
    Eigen::MatrixXd phi;    // n_shapes x n_ip (reference values, shared by all elements)

    [[nodiscard]] auto dx(Index e) const { return dphi_x.middleCols(e * n_ip, n_ip); }
    [[nodiscard]] auto dy(Index e) const { return dphi_y.middleCols(e * n_ip, n_ip); }
};

GeometryFactors geometry_factors(const QuadMesh& mesh, const QuadRule& rule, const ShapeTable& table);

}  // namespace hpmin
