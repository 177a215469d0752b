#pragma once

#include "hpmin/mesh.hpp"
#include "hpmin/reference_basis.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hpmin {

/// Unknown boundary tag, bad degree or component count.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeDof {
    Index node;
};
struct EdgeDof {
    Index edge;
    int degree;
};
struct BubbleDof {
    Index element;
    int i;
    int j;
};
using DofKind = std::variant<NodeDof, EdgeDof, BubbleDof>;

/// Boundary value g(x, component).
using BoundaryFunction = std::function<double(const Eigen::Vector2d&, int)>;

/// Which boundary parts are clamped and to what.
struct DirichletSpec {
    std::vector<std::string> tags;
    BoundaryFunction value = [](const Eigen::Vector2d&, int) { return 0.0; };
};

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Global numbering of hierarchical DOFs.
///
/// Scalar layout: nodal DOFs by node index, then edge modes by (edge, degree), then bubbles
/// by (element, local bubble order). Vector problems repeat the scalar layout per component,
/// so DOF (c, i) has global index c * n_scalar + i.
struct DofMap {
    int p = 1;
    int components = 1;
    Index n_scalar = 0;
    std::vector<DofKind> dof_kind;  // scalar layout
    IndexMatrix elems2dofs;         // |T| x n_shapes, scalar layout, ShapeTable order
    Eigen::MatrixXd signs;          // |T| x n_shapes, entries +-1
    std::vector<Index> free_dofs;   // ascending, all components
    std::vector<Index> fixed_dofs;  // ascending, all components
    Eigen::VectorXd fixed_values;   // aligned with fixed_dofs
    std::vector<Index> free_index;  // global -> position in free_dofs, or -1

    // scalar DOF -> incident elements (CSR)
    std::vector<Index> dof_elem_start;
    std::vector<Index> dof_elems;

    [[nodiscard]] Index n_dofs() const { return n_scalar * components; }
    [[nodiscard]] Index n_free() const { return static_cast<Index>(free_dofs.size()); }
    [[nodiscard]] Index n_shapes() const { return elems2dofs.cols(); }
    [[nodiscard]] Index n_elems() const { return elems2dofs.rows(); }
    /// Global index of scalar DOF `scalar` for component c.
    [[nodiscard]] Index global(Index scalar, int c) const { return c * n_scalar + scalar; }
};

/// Global DOF count of the trunk space, per component.
Index scalar_dof_count(const QuadMesh& mesh, int p);

DofMap build_dofmap(const QuadMesh& mesh, int p, int components, const DirichletSpec& dirichlet);

/// Free-DOF vector -> full coefficient vector with the fixed values inserted.
Eigen::VectorXd expand_solution(const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& free);

/// Full coefficient vector -> free entries.
Eigen::VectorXd restrict_to_free(const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& full);

/// Structurally nonzero pattern of a symmetric n x n matrix in CSR form, columns sorted.
struct SparsityPattern {
    Index n = 0;
    std::vector<Index> row_start{0};
    std::vector<Index> cols;

    [[nodiscard]] Index nnz() const { return static_cast<Index>(cols.size()); }
    [[nodiscard]] bool contains(Index i, Index j) const;
    [[nodiscard]] auto row(Index i) const
    {
        return std::span<const Index>(cols.data() + row_start[static_cast<std::size_t>(i)],
                                      static_cast<std::size_t>(row_start[static_cast<std::size_t>(i) + 1] - row_start[static_cast<std::size_t>(i)]));
    }
    friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;
};

/// Builds a pattern from per-row column lists (sorted and deduplicated here).
SparsityPattern make_pattern(std::vector<std::vector<Index>> rows);

/// Hessian pattern over free DOFs: (i, j) present iff both occur in some element.
SparsityPattern sparsity_pattern(const DofMap& dofs);

}  // namespace hpmin
