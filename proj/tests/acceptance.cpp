// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.
#include "hpmin/bench.hpp"
#include "hpmin/finite_difference.hpp"
#include "hpmin/trust_region.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hpmin;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates sub-checks; the first failures are kept for the report line.
class Checker {
public:
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass_ = false;
            if (failures_++ < 3)
                detail_ += (detail_.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& text) { notes_ += (notes_.empty() ? "" : ", ") + text; }
    [[nodiscard]] Outcome outcome() const
    {
        if (pass_)
            return {true, notes_};
        return {false, detail_ + (failures_ > 3 ? " (+" + std::to_string(failures_ - 3) + " more)" : "")};
    }

private:
    bool pass_ = true;
    int failures_ = 0;
    std::string detail_, notes_;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::VectorXd uniform_vector(Index n, double amplitude, std::mt19937& rng)
{
    std::uniform_real_distribution<double> unif(-amplitude, amplitude);
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = unif(rng);
    return v;
}

DirichletSpec clamp_left_bottom()
{
    return {{"left", "bottom"}, [](const Eigen::Vector2d& x, int c) { return x(c); }};
}

BenchConfig plaplace_config(int p, std::vector<int> levels)
{
    BenchConfig c;
    c.p = p;
    c.alpha = 3.0;
    c.f = -10.0;
    c.levels = std::move(levels);
    return c;
}

// --- 1, 2: energy regression and gradient-option equivalence -------------------------------

const double expected_energy[] = {-7.9209, -7.9488, -7.9562, -7.9587};

std::vector<ConvergenceRow> explicit_rows;

Outcome energy_regression()
{
    Checker check;
    const auto start = std::chrono::steady_clock::now();
    explicit_rows = run_plaplace(plaplace_config(2, {1, 2, 3, 4}));
    const double elapsed = seconds_since(start);
    for (std::size_t k = 0; k < 4; ++k) {
        const double J = explicit_rows[k].energy;
        check.require(explicit_rows[k].converged, "level " + std::to_string(k + 1) + " not converged");
        check.require(std::abs(J - expected_energy[k]) <= 5e-4,
                      fmt("level %.0f: J=%.6f vs %.4f", static_cast<double>(k + 1), J, expected_energy[k]));
        check.note(fmt("J%.0f=%.6f", static_cast<double>(k + 1), J));
    }
    check.require(explicit_rows[3].dofs == 8961, "level 4 has " + std::to_string(explicit_rows[3].dofs) + " free DOFs");
    check.require(elapsed < 60.0, fmt("runtime %.1f s >= 60 s", elapsed));

    // quadrature refinement: re-evaluating a minimizer with a richer rule barely moves J
    const PLaplaceRun run = solve_plaplace(plaplace_config(2, {2}), 2);
    const QuadRule rich = tensor_gauss_rule(6);
    const ShapeTable table = tabulate(2, rich.points);
    const GeometryFactors geo = geometry_factors(run.disc->mesh, rich, table);
    const PLaplaceModel model(geo, run.disc->dofs, 3.0, -10.0);
    const double shift = std::abs(model.energy(run.solution) - run.row.energy);
    check.require(shift < 5e-5, fmt("quadrature refinement moves J by %.2e", shift));
    check.note(fmt("%.2f s", elapsed));
    check.note(fmt("rich-rule shift %.1e", shift));
    return check.outcome();
}

Outcome gradient_option_equivalence()
{
    Checker check;
    BenchConfig c = plaplace_config(2, {1, 2, 3, 4});
    c.gradient_mode = GradientMode::central_diff;
    const auto fd_rows = run_plaplace(c);
    double worst = 0.0;
    for (std::size_t k = 0; k < fd_rows.size(); ++k) {
        const double diff = std::abs(fd_rows[k].energy - explicit_rows.at(k).energy);
        worst = std::max(worst, diff);
        check.require(diff <= 1e-6, fmt("level %.0f: |dJ| = %.2e", static_cast<double>(k + 1), diff));
        check.require(fd_rows[k].converged, "fd run not converged");
    }
    check.note(fmt("max |J_explicit - J_fd| = %.2e", worst));
    return check.outcome();
}

// --- 3, 4: DOF bookkeeping and sparsity nesting ---------------------------------------------

Outcome dof_bookkeeping()
{
    Checker check;
    const QuadMesh m0 = make_lshape(0);
    const DofMap d = build_dofmap(m0, 2, 1, {});
    Index nodal = 0, edge = 0;
    for (const auto& kind : d.dof_kind) {
        nodal += std::holds_alternative<NodeDof>(kind);
        edge += std::holds_alternative<EdgeDof>(kind);
    }
    check.require(d.n_scalar == 53, "n_p = " + std::to_string(d.n_scalar));
    check.require(nodal == 21 && edge == 32, "nodal/edge split " + std::to_string(nodal) + "/" + std::to_string(edge));
    const DofMap d1 = build_dofmap(make_lshape(1), 2, 1, {{"boundary"}});
    check.require(d1.n_free() == 113, "level 1 free DOFs = " + std::to_string(d1.n_free()));
    check.note("n_p=" + std::to_string(d.n_scalar) + " (" + std::to_string(nodal) + "+" + std::to_string(edge) +
               "), free=" + std::to_string(d1.n_free()));
    return check.outcome();
}

Outcome sparsity_nesting()
{
    Checker check;
    for (const auto& mesh : {make_lshape(0), make_lshape(2), make_perforated_square(0)}) {
        const DofMap q1 = build_dofmap(mesh, 1, 1, {});
        const DofMap q2 = build_dofmap(mesh, 2, 1, {});
        const SparsityPattern p1 = sparsity_pattern(q1), p2 = sparsity_pattern(q2);
        // nodal DOFs are the first num_nodes entries of both numberings
        std::vector<std::vector<Index>> restricted(static_cast<std::size_t>(mesh.num_nodes()));
        for (Index i = 0; i < mesh.num_nodes(); ++i)
            for (Index j : p2.row(i))
                if (j < mesh.num_nodes())
                    restricted[static_cast<std::size_t>(i)].push_back(j);
        check.require(make_pattern(restricted) == p1, "restricted p=2 pattern differs from p=1");
    }
    return check.outcome();
}

// --- 5: gradient correctness ---------------------------------------------------------------

double relative_free_error(const DofMap& dofs, const Eigen::VectorXd& exact, const Eigen::VectorXd& approx)
{
    double err = 0.0, scale = 0.0;
    for (Index i : dofs.free_dofs) {
        err = std::max(err, std::abs(exact(i) - approx(i)));
        scale = std::max(scale, std::abs(exact(i)));
    }
    return err / scale;
}

Eigen::MatrixXd q1_stiffness(const QuadMesh& mesh)
{
    const Index n = mesh.num_nodes();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    const double g = 1.0 / std::sqrt(3.0);
    const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
    for (Index e = 0; e < mesh.num_elems(); ++e)
        for (double xi : {-g, g})
            for (double eta : {-g, g}) {
                Eigen::Matrix<double, 4, 2> dref, xy;
                for (int a = 0; a < 4; ++a) {
                    dref.row(a) << sx[a] * (1 + sy[a] * eta) / 4, sy[a] * (1 + sx[a] * xi) / 4;
                    xy.row(a) = mesh.nodes.row(mesh.elems2nodes(e, a));
                }
                const Eigen::Matrix2d J = xy.transpose() * dref;
                const Eigen::Matrix<double, 4, 2> dphys = dref * J.inverse();
                const Eigen::Matrix4d local = dphys * dphys.transpose() * J.determinant();
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        K(mesh.elems2nodes(e, a), mesh.elems2nodes(e, b)) += local(a, b);
            }
    return K;
}

Outcome gradient_correctness()
{
    Checker check;
    std::mt19937 rng(2024);
    double worst = 0.0;
    const NeoHookeMaterial material = NeoHookeMaterial::from_young_poisson(2e8, 0.3);
    const Eigen::Vector2d force(-3.5e7, -3.5e7);
    for (const auto& mesh : {make_lshape(1), make_perforated_square(1)}) {
        // p-Laplace, homogeneous Dirichlet on the whole boundary
        const auto sd = make_discretization(mesh, 2, 1, {{"boundary"}});
        const PLaplaceModel pl(sd->geometry, sd->dofs, 3.0, -10.0);
        // Neo-Hooke, clamped on left and bottom
        const auto vd = make_discretization(mesh, 2, 2, clamp_left_bottom());
        const NeoHookeModel nh(vd->geometry, vd->dofs, material, force);
        const Eigen::VectorXd identity = identity_deformation(vd->mesh, vd->dofs);
        for (int sample = 0; sample < 5; ++sample) {
            const Eigen::VectorXd vs = expand_solution(sd->dofs, uniform_vector(sd->dofs.n_free(), 1.0, rng));
            const Eigen::VectorXd gs = gradient_central([&](const Eigen::VectorXd& x) { return pl.energy(x); }, vs,
                                                        sd->dofs.free_dofs, 1e-6);
            const double es = relative_free_error(sd->dofs, pl.gradient(vs), gs);

            Eigen::VectorXd vv = identity;
            const Eigen::VectorXd noise = uniform_vector(vd->dofs.n_free(), 2e-3, rng);
            for (Index k = 0; k < vd->dofs.n_free(); ++k)
                vv(vd->dofs.free_dofs[static_cast<std::size_t>(k)]) += noise(k);
            check.require(min_jacobian(vd->geometry, vd->dofs, vv) > 0.0, "random deformation not admissible");
            const Eigen::VectorXd gv = gradient_central([&](const Eigen::VectorXd& x) { return nh.energy(x); }, vv,
                                                        vd->dofs.free_dofs, 1e-6);
            const double ev = relative_free_error(vd->dofs, nh.gradient(vv), gv);
            check.require(es < 1e-6, fmt("p-Laplace gradient rel. error %.2e", es));
            check.require(ev < 1e-6, fmt("Neo-Hooke gradient rel. error %.2e", ev));
            worst = std::max({worst, es, ev});
        }
    }
    check.note(fmt("max gradient rel. error %.2e", worst));

    double worst_h = 0.0;
    for (const auto& mesh : {make_lshape(1), make_perforated_square(0)}) {
        const auto d = make_discretization(mesh, 1, 1, {});
        const PLaplaceModel model(d->geometry, d->dofs, 2.0, -10.0);
        const ColoredPattern colored = greedy_coloring(sparsity_pattern(d->dofs));
        const VectorFunction grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return model.gradient(x); };
        const Eigen::MatrixXd H(hessian_fd(grad, uniform_vector(d->dofs.n_dofs(), 1.0, rng), colored, 1e-6));
        const Eigen::MatrixXd K = q1_stiffness(d->mesh);
        const double rel = (H - K).cwiseAbs().maxCoeff() / K.cwiseAbs().maxCoeff();
        check.require(rel < 1e-5, fmt("FD Hessian vs stiffness rel. error %.2e", rel));
        worst_h = std::max(worst_h, rel);
    }
    check.note(fmt("Hessian rel. error %.2e", worst_h));
    return check.outcome();
}

// --- 6: basis and continuity invariants ------------------------------------------------------

Eigen::Vector2d edge_point(int s, double t)
{
    switch (s) {
    case 0: return {t, -1.0};
    case 1: return {1.0, t};
    case 2: return {-t, 1.0};
    default: return {-1.0, -t};
    }
}

Outcome basis_properties()
{
    Checker check;
    for (int p = 1; p <= 8; ++p) {
        const auto kinds = shape_kinds(p);
        check.require(static_cast<int>(kinds.size()) == local_shape_count(p), "shape count");
        // traces
        for (const auto& kind : kinds)
            for (int s = 0; s < 4; ++s)
                for (double t : {-1.0, -0.6, 0.05, 0.7, 1.0}) {
                    const Eigen::Vector2d x = edge_point(s, t);
                    const double value = evaluate_shape(kind, x.x(), x.y()).value;
                    const auto* em = std::get_if<EdgeMode>(&kind);
                    if ((em && em->edge != s) || std::holds_alternative<BubbleMode>(kind))
                        check.require(std::abs(value) < 1e-12, "trace does not vanish");
                    if (em && em->edge == s)
                        check.require(std::abs(value - kernel(em->degree, t).first) < 1e-13, "edge trace is not the kernel");
                }
        // partition of unity at the quadrature points
        const QuadRule rule = rule_for_degree(p);
        const ShapeTable table = tabulate(p, rule.points);
        check.require((table.values.topRows(4).colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14,
                      "nodal functions are not a partition of unity");
    }
    for (int k = 2; k <= 10; ++k)
        for (double t : {0.1, 0.45, 0.8}) {
            const double parity = k % 2 ? -1.0 : 1.0;
            check.require(std::abs(kernel(k, -t).first - parity * kernel(k, t).first) < 1e-14, "kernel parity");
        }

    // signs and continuity across interior edges on both benchmark meshes
    std::mt19937 rng(99);
    double worst = 0.0;
    for (const auto& mesh : {make_lshape(1), make_perforated_square(0)})
        for (int p = 1; p <= 5; ++p) {
            const DofMap d = build_dofmap(mesh, p, 1, {});
            const auto kinds = shape_kinds(p);
            for (Index e = 0; e < mesh.num_elems(); ++e)
                for (Index m = 0; m < d.n_shapes(); ++m) {
                    const auto* em = std::get_if<EdgeMode>(&kinds[static_cast<std::size_t>(m)]);
                    const bool flip = em && em->degree % 2 &&
                                      mesh.elems2nodes(e, em->edge) > mesh.elems2nodes(e, (em->edge + 1) % 4);
                    check.require(d.signs(e, m) == (flip ? -1.0 : 1.0), "edge sign convention");
                }
            const Eigen::VectorXd v = uniform_vector(d.n_scalar, 1.0, rng);
            auto value = [&](Index e, const Eigen::Vector2d& ref) {
                double sum = 0.0;
                for (Index m = 0; m < d.n_shapes(); ++m)
                    sum += d.signs(e, m) * v(d.elems2dofs(e, m)) *
                           evaluate_shape(kinds[static_cast<std::size_t>(m)], ref.x(), ref.y()).value;
                return sum;
            };
            std::vector<std::vector<std::pair<Index, int>>> incident(static_cast<std::size_t>(mesh.num_edges()));
            for (Index e = 0; e < mesh.num_elems(); ++e)
                for (int s = 0; s < 4; ++s)
                    incident[static_cast<std::size_t>(mesh.elems2edges(e, s))].push_back({e, s});
            for (const auto& inc : incident) {
                if (inc.size() != 2)
                    continue;
                for (double t : {-0.9, -0.3, 0.2, 0.65})
                    worst = std::max(worst, std::abs(value(inc[0].first, edge_point(inc[0].second, t)) -
                                                     value(inc[1].first, edge_point(inc[1].second, -t))));
            }
        }
    check.require(worst < 1e-12, fmt("continuity jump %.2e", worst));
    check.note(fmt("max interface jump %.1e", worst));
    return check.outcome();
}

// --- 7: monotonicity in h and p ------------------------------------------------------------

Outcome nested_monotonicity()
{
    Checker check;
    const int max_level = 3;
    std::vector<std::vector<double>> J(5, std::vector<double>(max_level + 1));
    for (int p = 1; p <= 4; ++p) {
        std::vector<int> levels(max_level + 1);
        std::iota(levels.begin(), levels.end(), 0);
        const auto rows = run_plaplace(plaplace_config(p, levels));
        for (int l = 0; l <= max_level; ++l) {
            J[static_cast<std::size_t>(p)][static_cast<std::size_t>(l)] = rows[static_cast<std::size_t>(l)].energy;
            check.require(rows[static_cast<std::size_t>(l)].converged, "run not converged");
        }
    }
    int pairs = 0;
    for (int p = 1; p <= 3; ++p)
        for (int l = 0; l <= max_level; ++l) {
            const double here = J[static_cast<std::size_t>(p)][static_cast<std::size_t>(l)];
            if (l < max_level) {
                const double finer = J[static_cast<std::size_t>(p)][static_cast<std::size_t>(l + 1)];
                check.require(finer <= here + 1e-10, fmt("h-refinement raised J at p=%.0f, level %.0f", p, l));
                ++pairs;
            }
            const double richer = J[static_cast<std::size_t>(p + 1)][static_cast<std::size_t>(l)];
            check.require(richer <= here + 1e-10, fmt("p-enrichment raised J at p=%.0f, level %.0f", p, l));
            ++pairs;
        }
    check.note(std::to_string(pairs) + " nested pairs");
    return check.outcome();
}

// --- 8: hyperelasticity properties ----------------------------------------------------------

Outcome hyperelasticity()
{
    Checker check;
    const std::pair<int, int> cases[] = {{2, 2}, {3, 1}};  // (p, level)
    for (const auto& [p, level] : cases) {
        BenchConfig c;
        c.problem = ProblemKind::hyperelasticity;
        c.p = p;
        c.young = 2e8;
        c.poisson = 0.3;
        c.force = Eigen::Vector2d(-3.5e7, -3.5e7);
        const auto start = std::chrono::steady_clock::now();
        const HyperRun run = solve_hyperelasticity(c, level);
        const double elapsed = seconds_since(start);
        const std::string tag = "p=" + std::to_string(p) + " level " + std::to_string(level);
        const Index n = run.row.nelems;
        check.require(n >= 500 && n <= 2200, tag + ": element count " + std::to_string(n));
        check.require(run.trace.converged, tag + ": not converged");
        check.require(run.min_det_f > 0.0, tag + fmt(": min det F = %.3e", run.min_det_f));
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& it : run.trace.history)
            if (it.accepted) {
                check.require(it.energy < prev, tag + ": accepted energy did not decrease");
                prev = it.energy;
            }
        check.require(run.mean_displacement.x() < 0.0 && run.mean_displacement.y() < 0.0, tag + ": mean displacement sign");
        check.require(elapsed < 600.0, tag + fmt(": runtime %.0f s", elapsed));
        check.note(tag + fmt(": |T|=%.0f, %.0f iters, min det F=%.3f", static_cast<double>(n), run.row.iters, run.min_det_f) +
                   fmt(", mean u=(%.4f, %.4f)", run.mean_displacement.x(), run.mean_displacement.y()));
    }
    return check.outcome();
}

// --- 9: solver oracles ----------------------------------------------------------------------

ColoredPattern dense_colors(Index n)
{
    std::vector<std::vector<Index>> rows(static_cast<std::size_t>(n), std::vector<Index>(static_cast<std::size_t>(n)));
    for (auto& r : rows)
        std::iota(r.begin(), r.end(), Index(0));
    return greedy_coloring(make_pattern(rows));
}

Outcome solver_oracles()
{
    Checker check;
    std::mt19937 rng(7);
    const Index n = 10;
    const Eigen::MatrixXd B = uniform_vector(n * n, 1.0, rng).reshaped(n, n);
    const Eigen::MatrixXd A = B * B.transpose() + Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd b = uniform_vector(n, 1.0, rng);
    MinimizationProblem quad;
    quad.energy = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(A * x) - b.dot(x); };
    quad.gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; };
    quad.hessian_pattern = dense_colors(n);
    quad.x0 = Eigen::VectorXd::Zero(n);
    TrOptions opt;
    opt.grad_tol = 1e-10;
    opt.initial_radius = 100.0;
    const TrSolution qs = minimize(quad, opt);
    check.require(qs.converged && qs.grad_norm < 1e-10, fmt("quadratic |g| = %.2e", qs.grad_norm));

    MinimizationProblem rb;
    rb.energy = [](const Eigen::VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
    rb.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return Eigen::Vector2d(-400 * x(0) * (x(1) - x(0) * x(0)) - 2 * (1 - x(0)), 200 * (x(1) - x(0) * x(0)));
    };
    rb.hessian_pattern = dense_colors(2);
    rb.x0 = Eigen::Vector2d(-1.2, 1.0);
    TrOptions ropt;
    ropt.grad_tol = 1e-10;
    const TrSolution rs = minimize(rb, ropt);
    const double dist = (rs.x - Eigen::Vector2d(1.0, 1.0)).norm();
    check.require(dist < 1e-8, fmt("Rosenbrock distance %.2e", dist));

    // boundary case: small radius on an SPD model
    const SparseMatrix As = A.sparseView();
    const SteihaugResult small = steihaug_cg(As, b, 1e-3);
    check.require(small.hit_boundary && std::abs(small.step.norm() - 1e-3) < 1e-15, "boundary case");
    // interior case equals the Newton step
    const SteihaugResult big = steihaug_cg(As, b, 1e6, 1e-12);
    check.require(!big.hit_boundary && (big.step + A.ldlt().solve(b)).norm() < 1e-9 * big.step.norm(), "interior case");
    // negative curvature
    Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
    indefinite(1, 1) = -1.0;
    const SteihaugResult neg = steihaug_cg(SparseMatrix(indefinite.sparseView()), Eigen::Vector3d(0.3, 0.1, -0.2), 2.0);
    check.require(neg.hit_boundary && std::abs(neg.step.norm() - 2.0) < 1e-12, "negative-curvature case");
    check.require(predicted_reduction(SparseMatrix(indefinite.sparseView()), Eigen::Vector3d(0.3, 0.1, -0.2), neg.step) > 0.0,
                  "negative-curvature step does not reduce the model");
    check.note(fmt("quadratic %.0f iters, Rosenbrock %.0f iters, dist %.1e", qs.iterations, rs.iterations, dist));
    return check.outcome();
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 p-Laplace energy regression, L-shape p=2 levels 1-4", energy_regression},
        {"2 explicit vs central-difference gradient energies", gradient_option_equivalence},
        {"3 DOF bookkeeping", dof_bookkeeping},
        {"4 sparsity nesting p=1 in p=2", sparsity_nesting},
        {"5 gradient and FD-Hessian correctness", gradient_correctness},
        {"6 basis and continuity invariants", basis_properties},
        {"7 energy monotone under h- and p-refinement", nested_monotonicity},
        {"8 hyperelasticity properties", hyperelasticity},
        {"9 solver oracles", solver_oracles},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            outcome = run();
        }
        catch (const std::exception& ex) {
            outcome = {false, std::string("exception: ") + ex.what()};
        }
        failed += !outcome.pass;
        std::printf("%s  %s  [%s]\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
