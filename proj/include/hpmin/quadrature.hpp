#pragma once

#include "hpmin/reference_basis.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hpmin {

template <typename Scalar>
struct GaussRule1D {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> points;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// n-point Gauss-Legendre rule on [-1,1], nodes ascending. Exact up to degree 2n-1.
template <typename Scalar = double>
GaussRule1D<Scalar> gauss_1d(int n)
{
    if (n < 1)
        throw std::domain_error("gauss_1d: point count must be >= 1");
    using std::abs;
    using std::cos;
    GaussRule1D<Scalar> rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    for (int i = 1; i <= n; ++i) {
        Scalar x = cos(pi * (Scalar(i) - Scalar(0.25)) / (Scalar(n) + Scalar(0.5)));
        Scalar dl(0);
        for (int it = 0; it < 100; ++it) {
            auto [l, d] = legendre_with_derivative(n, x);
            const Scalar dx = l / d;
            x -= dx;
            dl = d;
            if (abs(dx) < Scalar(1e-15))
                break;
        }
        dl = legendre_with_derivative(n, x).second;
        // cosine guesses are descending; store ascending
        rule.points(n - i) = x;
        rule.weights(n - i) = Scalar(2) / ((Scalar(1) - x * x) * dl * dl);
    }
    return rule;
}

/// Tensor-product rule on the reference square.
struct QuadRule {
    Eigen::MatrixX2d points;
    Eigen::VectorXd weights;

    [[nodiscard]] Eigen::Index n_ip() const { return weights.size(); }
};

/// Tensor product of the n-point Gauss rule with itself; xi varies fastest.
QuadRule tensor_gauss_rule(int n);

/// The rule used for degree-p elements: (p+1) x (p+1) Gauss points.
inline QuadRule rule_for_degree(int p)
{
    if (p < 1)
        throw std::domain_error("rule_for_degree: degree must be >= 1");
    return tensor_gauss_rule(p + 1);
}

}  // namespace hpmin
