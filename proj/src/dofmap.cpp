#include "hpmin/dofmap.hpp"

#include <algorithm>

namespace hpmin {

Index scalar_dof_count(const QuadMesh& mesh, int p)
{
    return mesh.num_nodes() + (p - 1) * mesh.num_edges() + mesh.num_elems() * bubble_count(p);
}

DofMap build_dofmap(const QuadMesh& mesh, int p, int components, const DirichletSpec& dirichlet)
{
    if (p < 1)
        throw ConfigError("build_dofmap: degree must be >= 1");
    if (components != 1 && components != 2)
        throw ConfigError("build_dofmap: components must be 1 or 2");
    for (const auto& tag : dirichlet.tags)
        if (!mesh.has_tag(tag))
            throw ConfigError("build_dofmap: unknown boundary tag '" + tag + "'");

    const Index nn = mesh.num_nodes();
    const Index ne = mesh.num_edges();
    const Index nt = mesh.num_elems();
    const Index nb = bubble_count(p);
    const Index edge_base = nn;
    const Index bubble_base = nn + (p - 1) * ne;

    DofMap dofs;
    dofs.p = p;
    dofs.components = components;
    dofs.n_scalar = scalar_dof_count(mesh, p);

    dofs.dof_kind.reserve(static_cast<std::size_t>(dofs.n_scalar));
    for (Index v = 0; v < nn; ++v)
        dofs.dof_kind.emplace_back(NodeDof{v});
    for (Index e = 0; e < ne; ++e)
        for (int k = 2; k <= p; ++k)
            dofs.dof_kind.emplace_back(EdgeDof{e, k});
    const auto kinds = shape_kinds(p);
    for (Index t = 0; t < nt; ++t)
        for (const auto& kind : kinds)
            if (const auto* b = std::get_if<BubbleMode>(&kind))
                dofs.dof_kind.emplace_back(BubbleDof{t, b->i, b->j});

    const auto nshape = static_cast<Index>(kinds.size());
    dofs.elems2dofs.resize(nt, nshape);
    dofs.signs.setOnes(nt, nshape);
    for (Index t = 0; t < nt; ++t) {
        Index bubble = 0;
        for (Index m = 0; m < nshape; ++m) {
            const auto& kind = kinds[static_cast<std::size_t>(m)];
            if (const auto* nm = std::get_if<NodalMode>(&kind)) {
                dofs.elems2dofs(t, m) = mesh.elems2nodes(t, nm->node);
            } else if (const auto* em = std::get_if<EdgeMode>(&kind)) {
                const Index edge = mesh.elems2edges(t, em->edge);
                dofs.elems2dofs(t, m) = edge_base + edge * (p - 1) + (em->degree - 2);
                // local direction runs from local node s to s+1; global from lower to higher index
                const bool reversed = mesh.elems2nodes(t, em->edge) > mesh.elems2nodes(t, (em->edge + 1) % 4);
                if (reversed && em->degree % 2 == 1)
                    dofs.signs(t, m) = -1.0;
            } else {
                dofs.elems2dofs(t, m) = bubble_base + t * nb + bubble++;
            }
        }
    }

    // Dirichlet sets: tagged nodes take g, tagged boundary edges have their modes zeroed.
    std::vector<bool> fixed_node(static_cast<std::size_t>(nn), false);
    std::vector<bool> fixed_edge(static_cast<std::size_t>(ne), false);
    for (const auto& tag : dirichlet.tags) {
        const auto& flags = mesh.node_tags.at(tag);
        for (Index v = 0; v < nn; ++v)
            if (flags[static_cast<std::size_t>(v)])
                fixed_node[static_cast<std::size_t>(v)] = true;
        for (Index e : mesh.boundary_edges)
            if (mesh.edge_has_tag(e, tag))
                fixed_edge[static_cast<std::size_t>(e)] = true;
    }

    std::vector<double> values;
    dofs.free_index.assign(static_cast<std::size_t>(dofs.n_dofs()), -1);
    for (int c = 0; c < components; ++c) {
        for (Index i = 0; i < dofs.n_scalar; ++i) {
            const Index gi = dofs.global(i, c);
            bool fixed = false;
            double value = 0.0;
            const auto& kind = dofs.dof_kind[static_cast<std::size_t>(i)];
            if (const auto* nd = std::get_if<NodeDof>(&kind)) {
                if (fixed_node[static_cast<std::size_t>(nd->node)]) {
                    fixed = true;
                    value = dirichlet.value(mesh.nodes.row(nd->node).transpose(), c);
                }
            } else if (const auto* ed = std::get_if<EdgeDof>(&kind)) {
                fixed = fixed_edge[static_cast<std::size_t>(ed->edge)];
            }
            if (fixed) {
                dofs.fixed_dofs.push_back(gi);
                values.push_back(value);
            } else {
                dofs.free_index[static_cast<std::size_t>(gi)] = static_cast<Index>(dofs.free_dofs.size());
                dofs.free_dofs.push_back(gi);
            }
        }
    }
    dofs.fixed_values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));

    std::vector<Index> count(static_cast<std::size_t>(dofs.n_scalar) + 1, 0);
    for (Index t = 0; t < nt; ++t)
        for (Index m = 0; m < nshape; ++m)
            ++count[static_cast<std::size_t>(dofs.elems2dofs(t, m)) + 1];
    for (std::size_t i = 1; i < count.size(); ++i)
        count[i] += count[i - 1];
    dofs.dof_elem_start = count;
    dofs.dof_elems.resize(static_cast<std::size_t>(count.back()));
    for (Index t = 0; t < nt; ++t)
        for (Index m = 0; m < nshape; ++m)
            dofs.dof_elems[static_cast<std::size_t>(count[static_cast<std::size_t>(dofs.elems2dofs(t, m))]++)] = t;
    return dofs;
}

Eigen::VectorXd expand_solution(const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& free)
{
    if (free.size() != dofs.n_free())
        throw std::invalid_argument("expand_solution: expected " + std::to_string(dofs.n_free()) + " free values, got " +
                                    std::to_string(free.size()));
    Eigen::VectorXd full(dofs.n_dofs());
    for (std::size_t k = 0; k < dofs.free_dofs.size(); ++k)
        full(dofs.free_dofs[k]) = free(static_cast<Index>(k));
    for (std::size_t k = 0; k < dofs.fixed_dofs.size(); ++k)
        full(dofs.fixed_dofs[k]) = dofs.fixed_values(static_cast<Index>(k));
    return full;
}

Eigen::VectorXd restrict_to_free(const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& full)
{
    if (full.size() != dofs.n_dofs())
        throw std::invalid_argument("restrict_to_free: length mismatch");
    Eigen::VectorXd free(dofs.n_free());
    for (std::size_t k = 0; k < dofs.free_dofs.size(); ++k)
        free(static_cast<Index>(k)) = full(dofs.free_dofs[k]);
    return free;
}

bool SparsityPattern::contains(Index i, Index j) const
{
    const auto r = row(i);
    return std::binary_search(r.begin(), r.end(), j);
}

SparsityPattern make_pattern(std::vector<std::vector<Index>> rows)
{
    SparsityPattern pattern;
    pattern.n = static_cast<Index>(rows.size());
    pattern.row_start.assign(1, 0);
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        pattern.cols.insert(pattern.cols.end(), r.begin(), r.end());
        pattern.row_start.push_back(static_cast<Index>(pattern.cols.size()));
    }
    return pattern;
}

SparsityPattern sparsity_pattern(const DofMap& dofs)
{
    std::vector<std::vector<Index>> rows(static_cast<std::size_t>(dofs.n_free()));
    std::vector<Index> local;
    for (Index t = 0; t < dofs.n_elems(); ++t) {
        local.clear();
        for (int c = 0; c < dofs.components; ++c)
            for (Index m = 0; m < dofs.n_shapes(); ++m) {
                const Index f = dofs.free_index[static_cast<std::size_t>(dofs.global(dofs.elems2dofs(t, m), c))];
                if (f >= 0)
                    local.push_back(f);
            }
        for (Index i : local) {
            auto& r = rows[static_cast<std::size_t>(i)];
            r.insert(r.end(), local.begin(), local.end());
        }
    }
    return make_pattern(std::move(rows));
}

}  // namespace hpmin
