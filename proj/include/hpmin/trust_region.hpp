#pragma once

#include "hpmin/finite_difference.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace hpmin {

enum class GradientMode { explicit_form, central_diff };

struct TrOptions {
    double grad_tol = 1e-6;  // on the infinity norm of the free gradient
    int max_iters = 200;
    double initial_radius = 1.0;
    double max_radius = 1e6;
    double min_radius = 1e-14;  // stagnation stop
    double eta_accept = 0.05;
    double shrink_threshold = 0.25;
    double shrink_factor = 0.25;
    double expand_threshold = 0.75;
    double expand_factor = 2.0;
    double cg_tol = 1e-8;
    int cg_max_iters = 5000;
    double hessian_step = 1e-7;  // scaled by max(1, |x|_inf)
    GradientMode gradient_mode = GradientMode::explicit_form;
    std::ostream* log = nullptr;  // one JSON object per iteration when set

    void validate() const;
};

struct TrIteration {
    double energy;
    double grad_norm;
    double radius;
    double rho;
    bool accepted;
};

struct TrSolution {
    Eigen::VectorXd x;
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;  // accepted + rejected trial steps
    int accepted = 0;
    bool converged = false;
    std::vector<TrIteration> history;
};

/// Unconstrained problem in the free variables.
struct MinimizationProblem {
    ScalarFunction energy;
    VectorFunction gradient;
    ColoredPattern hessian_pattern;
    Eigen::VectorXd x0;
};

/// Wraps a discrete energy as a problem over its free DOFs, starting from `initial_full`.
/// The gradient is explicit or element-local central differences according to `mode`.
MinimizationProblem make_energy_problem(const EnergyModel& model, const Eigen::VectorXd& initial_full, GradientMode mode,
                                        double fd_step = 1e-6);

struct SteihaugResult {
    Eigen::VectorXd step;
    bool hit_boundary = false;
    int iterations = 0;
};

/// Truncated CG for min g.s + s.H.s/2 subject to |s| <= radius.
SteihaugResult steihaug_cg(const SparseMatrix& H, const Eigen::VectorXd& g, double radius, double cg_tol = 1e-8,
                           int max_iters = 5000);

/// Quadratic model reduction -(g.s + s.H.s/2).
double predicted_reduction(const SparseMatrix& H, const Eigen::VectorXd& g, const Eigen::VectorXd& s);

/// Trust-region Newton with a finite-difference sparse Hessian rebuilt after each accepted step.
TrSolution minimize(const MinimizationProblem& problem, const TrOptions& options);

}  // namespace hpmin
