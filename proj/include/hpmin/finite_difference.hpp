#pragma once

#include "hpmin/dofmap.hpp"
#include "hpmin/energy.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <span>

namespace hpmin {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;
using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Step used for coordinate i: rel_step * max(1, |v_i|).
inline double scaled_step(double rel_step, double value) { return rel_step * std::max(1.0, std::abs(value)); }

/// Central differences of `energy` along the listed coordinates by full re-evaluation.
/// Other entries of the result are zero. Throws BarrierError on a non-finite probe.
Eigen::VectorXd gradient_central(const ScalarFunction& energy, const Eigen::VectorXd& v, std::span<const Index> coords,
                                 double rel_step = 1e-6);

/// Central-difference gradient of a discrete energy over its free DOFs. Only the elements
/// containing the perturbed DOF are re-evaluated. Fixed entries of the result are zero.
Eigen::VectorXd gradient_central(const EnergyModel& model, const Eigen::VectorXd& v_full, double rel_step = 1e-6);

/// Distance-2 coloring: columns in one group never share a row of the pattern.
struct ColoredPattern {
    SparsityPattern pattern;
    std::vector<Index> groups;
    Index n_groups = 0;
};

/// Sequential greedy distance-2 coloring in natural column order.
ColoredPattern greedy_coloring(SparsityPattern pattern);

/// Sparse Hessian by forward differences of `grad`, one evaluation per color group, scattered
/// into the pattern and symmetrized. Storage order of the values follows the pattern's CSR.
SparseMatrix hessian_fd(const VectorFunction& grad, const Eigen::VectorXd& v, const ColoredPattern& colored, double h);

/// Same, reusing a gradient already computed at v.
SparseMatrix hessian_fd(const VectorFunction& grad, const Eigen::VectorXd& v, const Eigen::VectorXd& grad_at_v,
                        const ColoredPattern& colored, double h);

/// Zero-valued matrix with the pattern's structure.
SparseMatrix pattern_matrix(const SparsityPattern& pattern);

}  // namespace hpmin
