#include "hpmin/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace hpmin {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_orientation(const QuadMesh& mesh)
{
    for (Index e = 0; e < mesh.num_elems(); ++e) {
        if ((corner_jacobians(mesh, e).array() <= 0.0).any())
            throw DegenerateElementError(e, "element " + std::to_string(e) + " is not counterclockwise or is degenerate");
    }
}

}  // namespace

bool QuadMesh::edge_has_tag(Index edge, const std::string& tag) const
{
    auto it = node_tags.find(tag);
    if (it == node_tags.end())
        return false;
    if (!std::binary_search(boundary_edges.begin(), boundary_edges.end(), edge))
        return false;
    const auto& flags = it->second;
    return flags[static_cast<std::size_t>(edges2nodes(edge, 0))] && flags[static_cast<std::size_t>(edges2nodes(edge, 1))];
}

std::vector<bool> QuadMesh::boundary_edge_flags() const
{
    std::vector<bool> flags(static_cast<std::size_t>(num_edges()), false);
    for (Index e : boundary_edges)
        flags[static_cast<std::size_t>(e)] = true;
    return flags;
}

QuadMesh build_mesh(Eigen::MatrixX2d nodes, IndexMatrixX4 elems)
{
    QuadMesh mesh;
    mesh.nodes = std::move(nodes);
    mesh.elems2nodes = std::move(elems);

    // (lo, hi, element, local edge)
    std::vector<std::array<Index, 4>> sides;
    sides.reserve(static_cast<std::size_t>(4 * mesh.num_elems()));
    for (Index e = 0; e < mesh.num_elems(); ++e) {
        for (Index s = 0; s < 4; ++s) {
            const Index a = mesh.elems2nodes(e, s);
            const Index b = mesh.elems2nodes(e, (s + 1) % 4);
            if (a < 0 || b < 0 || a >= mesh.num_nodes() || b >= mesh.num_nodes())
                throw std::invalid_argument("build_mesh: node index out of range in element " + std::to_string(e));
            sides.push_back({std::min(a, b), std::max(a, b), e, s});
        }
    }
    std::sort(sides.begin(), sides.end());

    std::vector<std::array<Index, 2>> edges;
    std::vector<int> multiplicity;
    mesh.elems2edges.resize(mesh.num_elems(), 4);
    for (const auto& side : sides) {
        if (edges.empty() || edges.back()[0] != side[0] || edges.back()[1] != side[1]) {
            edges.push_back({side[0], side[1]});
            multiplicity.push_back(0);
        }
        const auto edge = static_cast<Index>(edges.size() - 1);
        if (++multiplicity.back() > 2)
            throw std::invalid_argument("build_mesh: edge shared by more than two elements");
        mesh.elems2edges(side[2], side[3]) = edge;
    }

    mesh.edges2nodes.resize(static_cast<Index>(edges.size()), 2);
    std::vector<bool> on_boundary(static_cast<std::size_t>(mesh.num_nodes()), false);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        mesh.edges2nodes(static_cast<Index>(i), 0) = edges[i][0];
        mesh.edges2nodes(static_cast<Index>(i), 1) = edges[i][1];
        if (multiplicity[i] == 1) {
            mesh.boundary_edges.push_back(static_cast<Index>(i));
            on_boundary[static_cast<std::size_t>(edges[i][0])] = true;
            on_boundary[static_cast<std::size_t>(edges[i][1])] = true;
        }
    }
    for (Index n = 0; n < mesh.num_nodes(); ++n)
        if (on_boundary[static_cast<std::size_t>(n)])
            mesh.boundary_nodes.push_back(n);

    check_orientation(mesh);
    return mesh;
}

void tag_box_sides(QuadMesh& mesh, double tol)
{
    const Eigen::Vector2d lo = mesh.nodes.colwise().minCoeff();
    const Eigen::Vector2d hi = mesh.nodes.colwise().maxCoeff();
    const auto n = static_cast<std::size_t>(mesh.num_nodes());
    for (const char* tag : {"boundary", "left", "right", "bottom", "top"})
        mesh.node_tags[tag] = std::vector<bool>(n, false);
    for (Index i : mesh.boundary_nodes) {
        const auto k = static_cast<std::size_t>(i);
        const double x = mesh.nodes(i, 0), y = mesh.nodes(i, 1);
        mesh.node_tags["boundary"][k] = true;
        mesh.node_tags["left"][k] = std::abs(x - lo.x()) < tol;
        mesh.node_tags["right"][k] = std::abs(x - hi.x()) < tol;
        mesh.node_tags["bottom"][k] = std::abs(y - lo.y()) < tol;
        mesh.node_tags["top"][k] = std::abs(y - hi.y()) < tol;
    }
}

QuadMesh make_rectangle(double x0, double x1, double y0, double y1, Index nx, Index ny)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("make_rectangle: need at least one cell per direction");
    Eigen::MatrixX2d nodes((nx + 1) * (ny + 1), 2);
    for (Index j = 0; j <= ny; ++j)
        for (Index i = 0; i <= nx; ++i)
            nodes.row(j * (nx + 1) + i) << x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(nx),
                y0 + (y1 - y0) * static_cast<double>(j) / static_cast<double>(ny);
    IndexMatrixX4 elems(nx * ny, 4);
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            const Index a = j * (nx + 1) + i;
            elems.row(j * nx + i) << a, a + 1, a + nx + 2, a + nx + 1;
        }
    QuadMesh mesh = build_mesh(std::move(nodes), std::move(elems));
    tag_box_sides(mesh);
    return mesh;
}

QuadMesh make_lshape(int level)
{
    if (level < 0)
        throw std::invalid_argument("make_lshape: level must be >= 0");
    // 5x5 grid of spacing 1/2 without the nodes strictly inside the removed quadrant's closure
    constexpr Index n = 4;
    auto removed_node = [](Index i, Index j) { return i > 2 && j < 2; };
    auto removed_cell = [](Index i, Index j) { return i >= 2 && j < 2; };

    Eigen::Matrix<Index, n + 1, n + 1> id;
    id.setConstant(-1);
    std::vector<Eigen::Vector2d> coords;
    for (Index j = 0; j <= n; ++j)
        for (Index i = 0; i <= n; ++i)
            if (!removed_node(i, j)) {
                id(i, j) = static_cast<Index>(coords.size());
                coords.emplace_back(0.5 * static_cast<double>(i), 0.5 * static_cast<double>(j));
            }
    Eigen::MatrixX2d nodes(static_cast<Index>(coords.size()), 2);
    for (std::size_t k = 0; k < coords.size(); ++k)
        nodes.row(static_cast<Index>(k)) = coords[k].transpose();

    std::vector<std::array<Index, 4>> cells;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (!removed_cell(i, j))
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    IndexMatrixX4 elems(static_cast<Index>(cells.size()), 4);
    for (std::size_t k = 0; k < cells.size(); ++k)
        for (Index s = 0; s < 4; ++s)
            elems(static_cast<Index>(k), s) = cells[k][static_cast<std::size_t>(s)];

    QuadMesh mesh = build_mesh(std::move(nodes), std::move(elems));
    tag_box_sides(mesh);
    for (int l = 0; l < level; ++l)
        mesh = refine_uniform(mesh);
    return mesh;
}

QuadMesh make_perforated_square(int level)
{
    if (level < 0)
        throw std::invalid_argument("make_perforated_square: level must be >= 0");
    const Index along = Index{8} << level;   // cells per square side
    const Index radial = Index{4} << level;  // cells between hole and outer side
    const Index around = 4 * along;
    const double radius = 1.0 / 3.0;
    const double pi = std::numbers::pi;
    const Eigen::Vector2d center(1.0, 1.0);
    const std::array<Eigen::Vector2d, 5> corners{
        Eigen::Vector2d(2, 0), Eigen::Vector2d(2, 2), Eigen::Vector2d(0, 2), Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0)};

    // node (a, j): a-th position counterclockwise from the (2,0) diagonal, j-th ring from the hole
    auto id = [&](Index a, Index j) { return j * around + (a % around); };
    Eigen::MatrixX2d nodes(around * (radial + 1), 2);
    for (Index a = 0; a < around; ++a) {
        const auto block = static_cast<std::size_t>(a / along);
        const double s = static_cast<double>(a % along) / static_cast<double>(along);
        const Eigen::Vector2d outer = corners[block] + s * (corners[block + 1] - corners[block]);
        const double theta = -0.25 * pi + (static_cast<double>(block) + s) * 0.5 * pi;
        const Eigen::Vector2d inner = center + radius * Eigen::Vector2d(std::cos(theta), std::sin(theta));
        for (Index j = 0; j <= radial; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(radial);
            nodes.row(id(a, j)) = ((1.0 - t) * inner + t * outer).transpose();
        }
    }
    IndexMatrixX4 elems(around * radial, 4);
    for (Index j = 0; j < radial; ++j)
        for (Index a = 0; a < around; ++a)
            elems.row(j * around + a) << id(a, j), id(a, j + 1), id(a + 1, j + 1), id(a + 1, j);

    QuadMesh mesh = build_mesh(std::move(nodes), std::move(elems));
    tag_box_sides(mesh);
    auto& hole = mesh.node_tags["hole"];
    hole.assign(static_cast<std::size_t>(mesh.num_nodes()), false);
    for (Index a = 0; a < around; ++a)
        hole[static_cast<std::size_t>(id(a, 0))] = true;
    return mesh;
}

QuadMesh refine_uniform(const QuadMesh& mesh)
{
    const Index nn = mesh.num_nodes();
    const Index ne = mesh.num_edges();
    const Index nt = mesh.num_elems();

    Eigen::MatrixX2d nodes(nn + ne + nt, 2);
    nodes.topRows(nn) = mesh.nodes;
    for (Index e = 0; e < ne; ++e)
        nodes.row(nn + e) = 0.5 * (mesh.nodes.row(mesh.edges2nodes(e, 0)) + mesh.nodes.row(mesh.edges2nodes(e, 1)));
    for (Index t = 0; t < nt; ++t) {
        Eigen::RowVector2d c = Eigen::RowVector2d::Zero();
        for (Index s = 0; s < 4; ++s)
            c += mesh.nodes.row(mesh.elems2nodes(t, s));
        nodes.row(nn + ne + t) = 0.25 * c;
    }

    IndexMatrixX4 elems(4 * nt, 4);
    for (Index t = 0; t < nt; ++t) {
        const auto v = [&](Index s) { return mesh.elems2nodes(t, s); };
        const auto m = [&](Index s) { return nn + mesh.elems2edges(t, s); };
        const Index c = nn + ne + t;
        elems.row(4 * t + 0) << v(0), m(0), c, m(3);
        elems.row(4 * t + 1) << m(0), v(1), m(1), c;
        elems.row(4 * t + 2) << c, m(1), v(2), m(2);
        elems.row(4 * t + 3) << m(3), c, m(2), v(3);
    }

    QuadMesh fine = build_mesh(std::move(nodes), std::move(elems));
    for (const auto& [tag, flags] : mesh.node_tags) {
        std::vector<bool> refined(static_cast<std::size_t>(fine.num_nodes()), false);
        std::copy(flags.begin(), flags.end(), refined.begin());
        for (Index e : mesh.boundary_edges)
            if (mesh.edge_has_tag(e, tag))
                refined[static_cast<std::size_t>(nn + e)] = true;
        fine.node_tags.emplace(tag, std::move(refined));
    }
    return fine;
}

Eigen::Vector4d corner_jacobians(const QuadMesh& mesh, Index e)
{
    Eigen::Vector4d det;
    for (Index s = 0; s < 4; ++s) {
        const Eigen::Vector2d x = mesh.nodes.row(mesh.elems2nodes(e, s)).transpose();
        const Eigen::Vector2d next = mesh.nodes.row(mesh.elems2nodes(e, (s + 1) % 4)).transpose();
        const Eigen::Vector2d prev = mesh.nodes.row(mesh.elems2nodes(e, (s + 3) % 4)).transpose();
        det(s) = 0.25 * cross(next - x, prev - x);
    }
    return det;
}

double element_area(const QuadMesh& mesh, Index e)
{
    double twice = 0.0;
    for (Index s = 0; s < 4; ++s) {
        const Eigen::Vector2d a = mesh.nodes.row(mesh.elems2nodes(e, s)).transpose();
        const Eigen::Vector2d b = mesh.nodes.row(mesh.elems2nodes(e, (s + 1) % 4)).transpose();
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

double mesh_area(const QuadMesh& mesh)
{
    double area = 0.0;
    for (Index e = 0; e < mesh.num_elems(); ++e)
        area += element_area(mesh, e);
    return area;
}

GeometryFactors geometry_factors(const QuadMesh& mesh, const QuadRule& rule, const ShapeTable& table)
{
    if (table.n_points() != rule.n_ip())
        throw std::invalid_argument("geometry_factors: shape table not tabulated at the rule's points");
    const Index nip = rule.n_ip();
    const Index nt = mesh.num_elems();
    const Index nshape = table.n_shapes();

    GeometryFactors g;
    g.n_ip = nip;
    g.n_elems = nt;
    g.phi = table.values;
    g.dphi_x.resize(nshape, nip * nt);
    g.dphi_y.resize(nshape, nip * nt);
    g.wdetj.resize(nip, nt);

    // rows 0..3 of the table are the bilinear nodal functions
    const auto nodal_dxi = table.dxi.topRows(4);
    const auto nodal_deta = table.deta.topRows(4);
    for (Index e = 0; e < nt; ++e) {
        Eigen::Matrix<double, 2, 4> x;
        for (Index s = 0; s < 4; ++s)
            x.col(s) = mesh.nodes.row(mesh.elems2nodes(e, s)).transpose();
        for (Index q = 0; q < nip; ++q) {
            const Eigen::Vector2d d_xi = x * nodal_dxi.col(q);
            const Eigen::Vector2d d_eta = x * nodal_deta.col(q);
            const double det = d_xi.x() * d_eta.y() - d_eta.x() * d_xi.y();
            if (!(det > 0.0))
                throw DegenerateElementError(e, "degenerate element " + std::to_string(e) + ": det J <= 0 at a quadrature point");
            const Index col = e * nip + q;
            g.dphi_x.col(col) = (d_eta.y() * table.dxi.col(q) - d_xi.y() * table.deta.col(q)) / det;
            g.dphi_y.col(col) = (-d_eta.x() * table.dxi.col(q) + d_xi.x() * table.deta.col(q)) / det;
            g.wdetj(q, e) = rule.weights(q) * det;
        }
    }
    return g;
}

}  // namespace hpmin
