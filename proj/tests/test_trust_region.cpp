#include "hpmin/trust_region.hpp"

#include <Eigen/Cholesky>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

using namespace hpmin;

namespace {

Eigen::MatrixXd random_spd(Index n, unsigned seed, double shift)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < a.size(); ++i)
        a.data()[i] = unif(rng);
    return a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

ColoredPattern dense(Index n)
{
    std::vector<std::vector<Index>> rows(static_cast<std::size_t>(n), std::vector<Index>(static_cast<std::size_t>(n)));
    for (auto& r : rows)
        std::iota(r.begin(), r.end(), Index(0));
    return greedy_coloring(make_pattern(rows));
}

SparseMatrix to_sparse(const Eigen::MatrixXd& a) { return a.sparseView(); }

MinimizationProblem rosenbrock()
{
    MinimizationProblem p;
    p.energy = [](const Eigen::VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
    p.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return Eigen::Vector2d(-400 * x(0) * (x(1) - x(0) * x(0)) - 2 * (1 - x(0)), 200 * (x(1) - x(0) * x(0)));
    };
    p.hessian_pattern = dense(2);
    p.x0 = Eigen::Vector2d(-1.2, 1.0);
    return p;
}

void check_monotone(const TrSolution& sol, double J0)
{
    double prev = J0;
    for (const auto& it : sol.history) {
        if (it.accepted) {
            CHECK(it.energy < prev);
            prev = it.energy;
        }
        else {
            CHECK(it.energy == prev);
        }
    }
}

}  // namespace

TEST_CASE("Steihaug-CG: interior Newton step")
{
    const Eigen::MatrixXd A = random_spd(8, 1, 8.0);
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(8, -1.0, 1.0);
    const SteihaugResult r = steihaug_cg(to_sparse(A), g, 1e3, 1e-12);
    CHECK_FALSE(r.hit_boundary);
    const Eigen::VectorXd newton = A.ldlt().solve(-g);
    CHECK((r.step - newton).norm() < 1e-10 * newton.norm());
    CHECK(r.iterations <= 8);
    CHECK(predicted_reduction(to_sparse(A), g, r.step) == doctest::Approx(-0.5 * g.dot(newton)).epsilon(1e-10));
}

TEST_CASE("Steihaug-CG: step truncated at the radius")
{
    const Eigen::MatrixXd A = random_spd(8, 2, 1.0);
    const Eigen::VectorXd g = Eigen::VectorXd::Constant(8, 1.0);
    const double radius = 1e-3;
    const SteihaugResult r = steihaug_cg(to_sparse(A), g, radius);
    CHECK(r.hit_boundary);
    CHECK(r.step.norm() == doctest::Approx(radius).epsilon(1e-12));
    CHECK(r.step.dot(g) < 0.0);
    // the first CG iterate is the Cauchy direction, so a tiny radius gives -radius * g/|g|
    CHECK((r.step + radius * g.normalized()).norm() < 1e-12);
}

TEST_CASE("Steihaug-CG: negative curvature goes to the boundary")
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    A(2, 2) = -2.0;
    const Eigen::Vector3d g(0.1, 0.2, 0.3);
    const SteihaugResult r = steihaug_cg(to_sparse(A), g, 5.0);
    CHECK(r.hit_boundary);
    CHECK(r.step.norm() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(predicted_reduction(to_sparse(A), g, r.step) > 0.0);
}

TEST_CASE("Steihaug-CG: zero gradient gives a zero step")
{
    const SteihaugResult r = steihaug_cg(to_sparse(Eigen::MatrixXd::Identity(4, 4)), Eigen::VectorXd::Zero(4), 1.0);
    CHECK(r.step.norm() == 0.0);
    CHECK_FALSE(r.hit_boundary);
}

TEST_CASE("predicted reduction is positive for random subproblems")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd B(6, 6);
        for (Index i = 0; i < B.size(); ++i)
            B.data()[i] = unif(rng);
        const Eigen::MatrixXd A = 0.5 * (B + B.transpose());  // indefinite in general
        Eigen::VectorXd g(6);
        for (Index i = 0; i < 6; ++i)
            g(i) = unif(rng);
        const double radius = 0.1 + 2.0 * std::abs(unif(rng));
        const SteihaugResult r = steihaug_cg(to_sparse(A), g, radius);
        CHECK(predicted_reduction(to_sparse(A), g, r.step) > 0.0);
        CHECK(r.step.norm() <= radius * (1 + 1e-12));
    }
}

TEST_CASE("minimize: SPD quadratic")
{
    const Index n = 10;
    const Eigen::MatrixXd A = random_spd(n, 3, 1.0);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    MinimizationProblem p;
    p.energy = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(A * x) - b.dot(x); };
    p.gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x - b; };
    p.hessian_pattern = dense(n);
    p.x0 = Eigen::VectorXd::Zero(n);
    TrOptions opt;
    opt.grad_tol = 1e-10;
    opt.initial_radius = 100.0;
    const TrSolution sol = minimize(p, opt);
    CHECK(sol.converged);
    CHECK(sol.grad_norm < 1e-10);
    CHECK(sol.iterations <= 10);
    CHECK((sol.x - A.ldlt().solve(b)).norm() < 1e-9);
    check_monotone(sol, 0.0);
}

TEST_CASE("minimize: Rosenbrock")
{
    const MinimizationProblem p = rosenbrock();
    TrOptions opt;
    opt.grad_tol = 1e-10;
    const TrSolution sol = minimize(p, opt);
    CHECK(sol.converged);
    CHECK((sol.x - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-8);
    CHECK(sol.accepted < sol.iterations + 1);
    check_monotone(sol, p.energy(p.x0));
    CHECK(sol.history.back().rho == sol.history.back().rho);
}

TEST_CASE("minimize: infinite trial energies are rejected")
{
    // x - log x with a barrier at 0, started near the barrier with a large radius
    MinimizationProblem p;
    p.energy = [](const Eigen::VectorXd& x) { return x(0) > 0 ? x(0) - std::log(x(0)) : std::numeric_limits<double>::infinity(); };
    p.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(1, 1.0 - 1.0 / x(0)); };
    p.hessian_pattern = dense(1);
    p.x0 = Eigen::VectorXd::Constant(1, 3.0);
    TrOptions opt;
    opt.initial_radius = 50.0;
    opt.grad_tol = 1e-12;
    const TrSolution sol = minimize(p, opt);
    CHECK(sol.converged);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-10));
    check_monotone(sol, p.energy(p.x0));
}

TEST_CASE("minimize: iteration cap and log output")
{
    const MinimizationProblem p = rosenbrock();
    TrOptions opt;
    opt.max_iters = 3;
    std::ostringstream log;
    opt.log = &log;
    const TrSolution sol = minimize(p, opt);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 3);
    std::istringstream lines(log.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("energy"));
        CHECK(j.at("iter").get<int>() == ++count);
    }
    CHECK(count == 3);
}

TEST_CASE("options are validated")
{
    TrOptions opt;
    opt.eta_accept = 0.9;
    opt.shrink_threshold = 0.25;
    CHECK_THROWS(opt.validate());
    TrOptions neg;
    neg.initial_radius = -1.0;
    CHECK_THROWS(neg.validate());
    CHECK_NOTHROW(TrOptions{}.validate());
}

TEST_CASE("energy problem over free DOFs: explicit and FD gradients agree")
{
    const QuadMesh mesh = make_lshape(1);
    const QuadRule rule = rule_for_degree(2);
    const ShapeTable table = tabulate(2, rule.points);
    const GeometryFactors geo = geometry_factors(mesh, rule, table);
    const DofMap dofs = build_dofmap(mesh, 2, 1, {{"boundary"}});
    const PLaplaceModel model(geo, dofs, 3.0, -10.0);
    const Eigen::VectorXd start = Eigen::VectorXd::Zero(dofs.n_dofs());
    const MinimizationProblem pe = make_energy_problem(model, start, GradientMode::explicit_form);
    const MinimizationProblem pf = make_energy_problem(model, start, GradientMode::central_diff);
    CHECK(pe.x0.size() == dofs.n_free());
    CHECK(pe.hessian_pattern.pattern == sparsity_pattern(dofs));
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(dofs.n_free(), -0.3, 0.4);
    CHECK((pe.gradient(x) - pf.gradient(x)).lpNorm<Eigen::Infinity>() < 1e-6 * pe.gradient(x).lpNorm<Eigen::Infinity>());
    CHECK(pe.energy(x) == doctest::Approx(model.energy(expand_solution(dofs, x))));
}
