#pragma once

#include "hpmin/dofmap.hpp"
#include "hpmin/mesh.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace hpmin {

/// Legacy ASCII unstructured grid of the mesh (QUAD cells), optionally with one cell scalar.
void write_vtk_mesh(std::ostream& os, const QuadMesh& mesh, const std::string& cell_field = {},
                    const Eigen::VectorXd& cell_values = {});

/// Samples a scalar hierarchical expansion on an (p+1) x (p+1) sub-grid of every element and
/// writes the sub-cells as independent QUADs with POINT_DATA `name`.
void write_vtk_sampled(std::ostream& os, const QuadMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v_full,
                       const std::string& name = "u");

/// Mesh with nodes moved to the nodal values of a deformation and CELL_DATA `W`.
void write_vtk_deformed(std::ostream& os, const QuadMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v_full,
                        const Eigen::VectorXd& cell_density);

}  // namespace hpmin
