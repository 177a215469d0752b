#include "hpmin/trust_region.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <ostream>

namespace hpmin {

namespace {

// tau >= 0 with |z + tau d| = radius
double to_boundary(const Eigen::VectorXd& z, const Eigen::VectorXd& d, double radius)
{
    const double dd = d.squaredNorm();
    const double zd = z.dot(d);
    const double zz = z.squaredNorm();
    const double disc = std::max(0.0, zd * zd + dd * (radius * radius - zz));
    return (-zd + std::sqrt(disc)) / dd;
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

void TrOptions::validate() const
{
    if (!(0.0 < eta_accept && eta_accept < shrink_threshold && shrink_threshold < expand_threshold && expand_threshold < 1.0))
        throw std::invalid_argument("TrOptions: need 0 < eta_accept < shrink_threshold < expand_threshold < 1");
    if (!(initial_radius > 0.0) || !(max_radius >= initial_radius))
        throw std::invalid_argument("TrOptions: bad radius bounds");
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0) || !(expand_factor > 1.0))
        throw std::invalid_argument("TrOptions: bad radius factors");
}

MinimizationProblem make_energy_problem(const EnergyModel& model, const Eigen::VectorXd& initial_full, GradientMode mode,
                                        double fd_step)
{
    const DofMap& dofs = model.dofs();
    MinimizationProblem problem;
    problem.energy = [&model, &dofs](const Eigen::VectorXd& x) { return model.energy(expand_solution(dofs, x)); };
    if (mode == GradientMode::explicit_form) {
        problem.gradient = [&model, &dofs](const Eigen::VectorXd& x) {
            return restrict_to_free(dofs, model.gradient(expand_solution(dofs, x)));
        };
    } else {
        problem.gradient = [&model, &dofs, fd_step](const Eigen::VectorXd& x) {
            return restrict_to_free(dofs, gradient_central(model, expand_solution(dofs, x), fd_step));
        };
    }
    problem.hessian_pattern = greedy_coloring(sparsity_pattern(dofs));
    problem.x0 = restrict_to_free(dofs, initial_full);
    return problem;
}

double predicted_reduction(const SparseMatrix& H, const Eigen::VectorXd& g, const Eigen::VectorXd& s)
{
    return -(g.dot(s) + 0.5 * s.dot(H * s));
}

SteihaugResult steihaug_cg(const SparseMatrix& H, const Eigen::VectorXd& g, double radius, double cg_tol, int max_iters)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("steihaug_cg: radius must be positive");
    SteihaugResult result;
    const Index n = g.size();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = g;
    Eigen::VectorXd d = -g;
    const double g_norm = g.norm();
    double rr = r.squaredNorm();
    if (g_norm == 0.0) {
        result.step = z;
        return result;
    }
    Eigen::VectorXd Hd(n);
    for (int it = 0; it < max_iters; ++it) {
        result.iterations = it + 1;
        Hd.noalias() = H * d;
        const double curvature = d.dot(Hd);
        if (curvature <= 0.0) {
            result.step = z + to_boundary(z, d, radius) * d;
            result.hit_boundary = true;
            return result;
        }
        const double alpha = rr / curvature;
        Eigen::VectorXd z_next = z + alpha * d;
        if (z_next.norm() >= radius) {
            result.step = z + to_boundary(z, d, radius) * d;
            result.hit_boundary = true;
            return result;
        }
        z = std::move(z_next);
        r.noalias() += alpha * Hd;
        const double rr_next = r.squaredNorm();
        if (std::sqrt(rr_next) <= cg_tol * g_norm) {
            result.step = z;
            return result;
        }
        d = -r + (rr_next / rr) * d;
        rr = rr_next;
    }
    result.step = z;
    return result;
}

TrSolution minimize(const MinimizationProblem& problem, const TrOptions& options)
{
    options.validate();
    TrSolution sol;
    Eigen::VectorXd x = problem.x0;
    double J = problem.energy(x);
    if (!std::isfinite(J))
        throw std::domain_error("minimize: initial point has non-finite energy");
    Eigen::VectorXd g = problem.gradient(x);
    if (!all_finite(g))
        throw std::domain_error("minimize: non-finite gradient at the initial point");

    double radius = options.initial_radius;
    SparseMatrix H;
    bool stale_hessian = true;
    double g_norm = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;

    while (true) {
        if (g_norm < options.grad_tol) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= options.max_iters || radius < options.min_radius)
            break;
        if (stale_hessian) {
            const double h = options.hessian_step * std::max(1.0, x.lpNorm<Eigen::Infinity>());
            H = hessian_fd(problem.gradient, x, g, problem.hessian_pattern, h);
            stale_hessian = false;
        }
        const SteihaugResult sub = steihaug_cg(H, g, radius, options.cg_tol, options.cg_max_iters);
        const double predicted = predicted_reduction(H, g, sub.step);
        const Eigen::VectorXd trial = x + sub.step;
        const double J_trial = problem.energy(trial);

        double rho = -std::numeric_limits<double>::infinity();
        if (std::isfinite(J_trial) && predicted > 0.0)
            rho = (J - J_trial) / predicted;
        const bool accepted = rho > options.eta_accept && J_trial < J;
        ++sol.iterations;

        if (accepted) {
            Eigen::VectorXd g_trial = problem.gradient(trial);
            if (!all_finite(g_trial))
                throw std::domain_error("minimize: non-finite gradient at an accepted point");
            x = trial;
            J = J_trial;
            g = std::move(g_trial);
            g_norm = g.lpNorm<Eigen::Infinity>();
            stale_hessian = true;
            ++sol.accepted;
        }
        sol.history.push_back({J, g_norm, radius, rho, accepted});
        if (options.log) {
            nlohmann::json line{{"iter", sol.iterations}, {"energy", J},       {"grad_inf", g_norm},
                                {"radius", radius},       {"accepted", accepted}, {"cg_iters", sub.iterations}};
            line["rho"] = std::isfinite(rho) ? nlohmann::json(rho) : nlohmann::json(nullptr);
            *options.log << line.dump() << '\n';
        }

        if (rho < options.shrink_threshold)
            radius *= options.shrink_factor;
        else if (rho > options.expand_threshold && sub.hit_boundary)
            radius = std::min(options.expand_factor * radius, options.max_radius);
    }

    sol.x = std::move(x);
    sol.energy = J;
    sol.grad_norm = g_norm;
    return sol;
}

}  // namespace hpmin
