#include "hpmin/vtk.hpp"

#include "hpmin/energy.hpp"

#include <iomanip>
#include <ostream>

namespace hpmin {

namespace {

void header(std::ostream& os, const char* title)
{
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
}

void quad_cells(std::ostream& os, Index n_cells)
{
    os << "CELLS " << n_cells << ' ' << 5 * n_cells << '\n';
    for (Index c = 0; c < n_cells; ++c)
        os << "4 " << 4 * c << ' ' << 4 * c + 1 << ' ' << 4 * c + 2 << ' ' << 4 * c + 3 << '\n';
    os << "CELL_TYPES " << n_cells << '\n';
    for (Index c = 0; c < n_cells; ++c)
        os << "9\n";
}

void mesh_cells(std::ostream& os, const QuadMesh& mesh)
{
    const Index nt = mesh.num_elems();
    os << "CELLS " << nt << ' ' << 5 * nt << '\n';
    for (Index e = 0; e < nt; ++e)
        os << "4 " << mesh.elems2nodes(e, 0) << ' ' << mesh.elems2nodes(e, 1) << ' ' << mesh.elems2nodes(e, 2) << ' '
           << mesh.elems2nodes(e, 3) << '\n';
    os << "CELL_TYPES " << nt << '\n';
    for (Index e = 0; e < nt; ++e)
        os << "9\n";
}

void cell_scalars(std::ostream& os, const std::string& name, const Eigen::VectorXd& values)
{
    os << "CELL_DATA " << values.size() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index i = 0; i < values.size(); ++i)
        os << values(i) << '\n';
}

}  // namespace

void write_vtk_mesh(std::ostream& os, const QuadMesh& mesh, const std::string& cell_field, const Eigen::VectorXd& cell_values)
{
    os << std::setprecision(12);
    header(os, "hpmin mesh");
    os << "POINTS " << mesh.num_nodes() << " double\n";
    for (Index n = 0; n < mesh.num_nodes(); ++n)
        os << mesh.nodes(n, 0) << ' ' << mesh.nodes(n, 1) << " 0\n";
    mesh_cells(os, mesh);
    if (!cell_field.empty()) {
        if (cell_values.size() != mesh.num_elems())
            throw std::invalid_argument("write_vtk_mesh: one value per element expected");
        cell_scalars(os, cell_field, cell_values);
    }
}

void write_vtk_sampled(std::ostream& os, const QuadMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v_full,
                       const std::string& name)
{
    if (dofs.components != 1 || v_full.size() != dofs.n_dofs())
        throw std::invalid_argument("write_vtk_sampled: scalar coefficient vector expected");
    const int cells = dofs.p + 1;
    const auto kinds = shape_kinds(dofs.p);
    const Index nt = mesh.num_elems();
    const Index n_sub = nt * cells * cells;

    Eigen::MatrixX2d points(4 * n_sub, 2);
    Eigen::VectorXd values(4 * n_sub);
    Index k = 0;
    auto sample = [&](Index e, const Eigen::VectorXd& u, double xi, double eta) {
        Eigen::Vector2d x = Eigen::Vector2d::Zero();
        double value = 0.0;
        for (std::size_t m = 0; m < kinds.size(); ++m) {
            const ShapeSample s = evaluate_shape(kinds[m], xi, eta);
            if (m < 4)
                x += s.value * mesh.nodes.row(mesh.elems2nodes(e, static_cast<Index>(m))).transpose();
            value += s.value * u(static_cast<Index>(m));
        }
        points.row(k) = x.transpose();
        values(k++) = value;
    };
    for (Index e = 0; e < nt; ++e) {
        const Eigen::VectorXd u = gather(dofs, e, 0, v_full);
        for (int j = 0; j < cells; ++j)
            for (int i = 0; i < cells; ++i) {
                const double x0 = -1.0 + 2.0 * i / cells, x1 = -1.0 + 2.0 * (i + 1) / cells;
                const double y0 = -1.0 + 2.0 * j / cells, y1 = -1.0 + 2.0 * (j + 1) / cells;
                sample(e, u, x0, y0);
                sample(e, u, x1, y0);
                sample(e, u, x1, y1);
                sample(e, u, x0, y1);
            }
    }

    os << std::setprecision(12);
    header(os, "hpmin sampled solution");
    os << "POINTS " << points.rows() << " double\n";
    for (Index i = 0; i < points.rows(); ++i)
        os << points(i, 0) << ' ' << points(i, 1) << " 0\n";
    quad_cells(os, n_sub);
    os << "POINT_DATA " << values.size() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index i = 0; i < values.size(); ++i)
        os << values(i) << '\n';
}

void write_vtk_deformed(std::ostream& os, const QuadMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v_full,
                        const Eigen::VectorXd& cell_density)
{
    if (dofs.components != 2 || v_full.size() != dofs.n_dofs())
        throw std::invalid_argument("write_vtk_deformed: two-component coefficient vector expected");
    if (cell_density.size() != mesh.num_elems())
        throw std::invalid_argument("write_vtk_deformed: one density per element expected");
    os << std::setprecision(12);
    header(os, "hpmin deformed mesh");
    os << "POINTS " << mesh.num_nodes() << " double\n";
    for (Index n = 0; n < mesh.num_nodes(); ++n)
        os << v_full(dofs.global(n, 0)) << ' ' << v_full(dofs.global(n, 1)) << " 0\n";
    mesh_cells(os, mesh);
    cell_scalars(os, "W", cell_density);
}

}  // namespace hpmin
