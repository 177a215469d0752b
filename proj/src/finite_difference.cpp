#include "hpmin/finite_difference.hpp"

#include <cmath>
#include <string>

namespace hpmin {

namespace {

double probe(double value)
{
    if (!std::isfinite(value))
        throw BarrierError("finite-difference probe left the energy domain");
    return value;
}

}  // namespace

Eigen::VectorXd gradient_central(const ScalarFunction& energy, const Eigen::VectorXd& v, std::span<const Index> coords,
                                 double rel_step)
{
    if (!(rel_step > 0.0))
        throw std::invalid_argument("gradient_central: step must be positive");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
    Eigen::VectorXd x = v;
    for (Index i : coords) {
        const double h = scaled_step(rel_step, v(i));
        x(i) = v(i) + h;
        const double plus = probe(energy(x));
        x(i) = v(i) - h;
        const double minus = probe(energy(x));
        x(i) = v(i);
        g(i) = (plus - minus) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd gradient_central(const EnergyModel& model, const Eigen::VectorXd& v_full, double rel_step)
{
    if (!(rel_step > 0.0))
        throw std::invalid_argument("gradient_central: step must be positive");
    const DofMap& dofs = model.dofs();
    if (v_full.size() != dofs.n_dofs())
        throw std::invalid_argument("gradient_central: coefficient vector length mismatch");
    Eigen::VectorXd steps(v_full.size());
    for (Index i = 0; i < v_full.size(); ++i)
        steps(i) = scaled_step(rel_step, v_full(i));

    // Perturbing DOF i only changes the elements that contain it, so accumulate the
    // element-level differences instead of re-evaluating the whole energy.
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(v_full.size());
    for (Index e = 0; e < dofs.n_elems(); ++e) {
        const Eigen::MatrixXd local = model.element_central_differences(e, v_full, steps);
        if (!local.allFinite())
            throw BarrierError("finite-difference probe left the energy domain");
        for (int c = 0; c < dofs.components; ++c)
            for (Index m = 0; m < dofs.n_shapes(); ++m)
                diff(dofs.global(dofs.elems2dofs(e, m), c)) += local(m, c);
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(v_full.size());
    for (Index i : dofs.free_dofs)
        g(i) = diff(i) / (2.0 * steps(i)) - model.load()(i);
    return g;
}

ColoredPattern greedy_coloring(SparsityPattern pattern)
{
    ColoredPattern colored;
    const Index n = pattern.n;
    colored.groups.assign(static_cast<std::size_t>(n), -1);
    // forbidden[c] == j marks color c as taken by a distance-2 neighbor of column j
    std::vector<Index> forbidden;
    for (Index j = 0; j < n; ++j) {
        for (Index i : pattern.row(j))
            for (Index k : pattern.row(i)) {
                const Index c = colored.groups[static_cast<std::size_t>(k)];
                if (c >= 0)
                    forbidden[static_cast<std::size_t>(c)] = j;
            }
        Index color = 0;
        while (color < static_cast<Index>(forbidden.size()) && forbidden[static_cast<std::size_t>(color)] == j)
            ++color;
        if (color == static_cast<Index>(forbidden.size()))
            forbidden.push_back(-1);
        colored.groups[static_cast<std::size_t>(j)] = color;
        colored.n_groups = std::max(colored.n_groups, color + 1);
    }
    colored.pattern = std::move(pattern);
    return colored;
}

SparseMatrix pattern_matrix(const SparsityPattern& pattern)
{
    SparseMatrix m(pattern.n, pattern.n);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(pattern.cols.size());
    for (Index i = 0; i < pattern.n; ++i)
        for (Index j : pattern.row(i))
            entries.emplace_back(static_cast<int>(i), static_cast<int>(j), 0.0);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

SparseMatrix hessian_fd(const VectorFunction& grad, const Eigen::VectorXd& v, const ColoredPattern& colored, double h)
{
    return hessian_fd(grad, v, grad(v), colored, h);
}

SparseMatrix hessian_fd(const VectorFunction& grad, const Eigen::VectorXd& v, const Eigen::VectorXd& grad_at_v,
                        const ColoredPattern& colored, double h)
{
    if (!(h > 0.0))
        throw std::invalid_argument("hessian_fd: step must be positive");
    const SparsityPattern& pattern = colored.pattern;
    if (v.size() != pattern.n)
        throw std::invalid_argument("hessian_fd: point dimension does not match pattern");

    std::vector<std::vector<Index>> members(static_cast<std::size_t>(colored.n_groups));
    for (Index j = 0; j < pattern.n; ++j)
        members[static_cast<std::size_t>(colored.groups[static_cast<std::size_t>(j)])].push_back(j);

    SparseMatrix H = pattern_matrix(pattern);
    double* values = H.valuePtr();
    Eigen::VectorXd x = v;
    for (const auto& group : members) {
        for (Index j : group)
            x(j) = v(j) + h;
        const Eigen::VectorXd g = grad(x);
        for (Index j : group)
            x(j) = v(j);
        for (Index i = 0; i < g.size(); ++i)
            if (!std::isfinite(g(i)))
                throw BarrierError("hessian_fd: non-finite gradient at a probe point");
        // each row i meets at most one column of this group
        for (Index j : group)
            for (Index i : pattern.row(j)) {
                const auto r = pattern.row(i);
                const auto pos = std::lower_bound(r.begin(), r.end(), j) - r.begin();
                values[pattern.row_start[static_cast<std::size_t>(i)] + pos] = (g(i) - grad_at_v(i)) / h;
            }
    }
    SparseMatrix Ht = H.transpose();
    SparseMatrix sym = 0.5 * (H + Ht);
    sym.makeCompressed();
    return sym;
}

}  // namespace hpmin
