#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace hpmin {

/// Legendre polynomial L_k(xi) by the three-term recurrence.
template <typename Scalar>
Scalar legendre(int k, Scalar xi)
{
    if (k < 0)
        throw std::domain_error("legendre: negative degree");
    Scalar prev(1);
    if (k == 0)
        return prev;
    Scalar curr = xi;
    for (int n = 1; n < k; ++n) {
        Scalar next = (Scalar(2 * n + 1) * xi * curr - Scalar(n) * prev) / Scalar(n + 1);
        prev = curr;
        curr = next;
    }
    return curr;
}

/// Returns (L_k(xi), L_k'(xi)). The derivative uses L'_{n+1} = L'_{n-1} + (2n+1) L_n,
/// which stays finite at the endpoints.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre_with_derivative(int k, Scalar xi)
{
    if (k < 0)
        throw std::domain_error("legendre: negative degree");
    if (k == 0)
        return {Scalar(1), Scalar(0)};
    Scalar l_prev(1), l_curr = xi;
    Scalar d_prev(0), d_curr(1);
    for (int n = 1; n < k; ++n) {
        Scalar l_next = (Scalar(2 * n + 1) * xi * l_curr - Scalar(n) * l_prev) / Scalar(n + 1);
        Scalar d_next = d_prev + Scalar(2 * n + 1) * l_curr;
        l_prev = l_curr;
        l_curr = l_next;
        d_prev = d_curr;
        d_curr = d_next;
    }
    return {l_curr, d_curr};
}

/// Integrated-Legendre kernel phi_k = (L_k - L_{k-2}) / sqrt(4k-2), k >= 2, and its derivative.
/// Vanishes at +-1 and has the parity of k.
template <typename Scalar>
std::pair<Scalar, Scalar> kernel(int k, Scalar xi)
{
    if (k < 2)
        throw std::domain_error("kernel: degree must be >= 2");
    using std::sqrt;
    const Scalar scale = Scalar(1) / sqrt(Scalar(4 * k - 2));
    const Scalar value = (legendre(k, xi) - legendre(k - 2, xi)) * scale;
    // phi_k' = L_{k-1} * (2k-1) / sqrt(4k-2)
    const Scalar derivative = Scalar(2 * k - 1) * legendre(k - 1, xi) * scale;
    return {value, derivative};
}

struct NodalMode {
    int node;  // 0..3, counterclockwise from (-1,-1)
    friend bool operator==(const NodalMode&, const NodalMode&) = default;
};

struct EdgeMode {
    int edge;  // local edge s joins local nodes s and (s+1) mod 4
    int degree;
    friend bool operator==(const EdgeMode&, const EdgeMode&) = default;
};

struct BubbleMode {
    int i;
    int j;
    friend bool operator==(const BubbleMode&, const BubbleMode&) = default;
};

using ShapeKind = std::variant<NodalMode, EdgeMode, BubbleMode>;

/// Number of trunk-space bubbles phi_i(xi) phi_j(eta) with i, j >= 2 and i + j <= p.
constexpr int bubble_count(int p) { return p < 4 ? 0 : (p - 2) * (p - 3) / 2; }

/// Local shape function count on the reference square for degree p.
constexpr int local_shape_count(int p) { return 4 + 4 * (p - 1) + bubble_count(p); }

/// Shape functions in canonical order: nodal, then edge modes by (degree, edge), then
/// bubbles by (i + j, i).
std::vector<ShapeKind> shape_kinds(int p);

/// Edge-local coordinate t in [-1,1] of the point (xi, eta), running counterclockwise
/// along local edge s.
double edge_coordinate(int edge, double xi, double eta);

/// Value and reference gradient of one shape function at (xi, eta).
struct ShapeSample {
    double value;
    double dxi;
    double deta;
};

ShapeSample evaluate_shape(const ShapeKind& kind, double xi, double eta);

/// Values and reference derivatives of every local shape function at a point set.
/// Rows follow `kinds`, columns follow the points.
struct ShapeTable {
    int p = 0;
    std::vector<ShapeKind> kinds;
    Eigen::MatrixXd values;
    Eigen::MatrixXd dxi;
    Eigen::MatrixXd deta;

    [[nodiscard]] int n_shapes() const { return static_cast<int>(kinds.size()); }
    [[nodiscard]] Eigen::Index n_points() const { return values.cols(); }
};

/// Tabulates all degree-p shape functions at `points` (one (xi, eta) row per point).
ShapeTable tabulate(int p, const Eigen::Ref<const Eigen::MatrixX2d>& points);

}  // namespace hpmin
