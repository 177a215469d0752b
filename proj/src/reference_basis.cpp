#include "hpmin/reference_basis.hpp"

#include <array>

namespace hpmin {

namespace {

// Reference corners, counterclockwise.
constexpr std::array<double, 4> kCornerXi{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kCornerEta{-1.0, -1.0, 1.0, 1.0};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::vector<ShapeKind> shape_kinds(int p)
{
    if (p < 1)
        throw std::domain_error("shape_kinds: degree must be >= 1");
    std::vector<ShapeKind> kinds;
    kinds.reserve(static_cast<std::size_t>(local_shape_count(p)));
    for (int s = 0; s < 4; ++s)
        kinds.emplace_back(NodalMode{s});
    for (int k = 2; k <= p; ++k)
        for (int s = 0; s < 4; ++s)
            kinds.emplace_back(EdgeMode{s, k});
    for (int total = 4; total <= p; ++total)
        for (int i = 2; i <= total - 2; ++i)
            kinds.emplace_back(BubbleMode{i, total - i});
    return kinds;
}

double edge_coordinate(int edge, double xi, double eta)
{
    switch (edge) {
    case 0: return xi;
    case 1: return eta;
    case 2: return -xi;
    case 3: return -eta;
    default: throw std::out_of_range("edge_coordinate: local edge must be 0..3");
    }
}

ShapeSample evaluate_shape(const ShapeKind& kind, double xi, double eta)
{
    return std::visit(
        Overloaded{
            [&](const NodalMode& m) {
                const double sx = kCornerXi[static_cast<std::size_t>(m.node)];
                const double sy = kCornerEta[static_cast<std::size_t>(m.node)];
                return ShapeSample{0.25 * (1 + sx * xi) * (1 + sy * eta),
                                   0.25 * sx * (1 + sy * eta),
                                   0.25 * sy * (1 + sx * xi)};
            },
            [&](const EdgeMode& m) {
                // kernel along the edge times a linear blend that is 1 on the edge, 0 opposite
                switch (m.edge) {
                case 0: {
                    auto [f, df] = kernel(m.degree, xi);
                    const double b = 0.5 * (1 - eta);
                    return ShapeSample{f * b, df * b, -0.5 * f};
                }
                case 1: {
                    auto [f, df] = kernel(m.degree, eta);
                    const double b = 0.5 * (1 + xi);
                    return ShapeSample{f * b, 0.5 * f, df * b};
                }
                case 2: {
                    auto [f, df] = kernel(m.degree, -xi);
                    const double b = 0.5 * (1 + eta);
                    return ShapeSample{f * b, -df * b, 0.5 * f};
                }
                case 3: {
                    auto [f, df] = kernel(m.degree, -eta);
                    const double b = 0.5 * (1 - xi);
                    return ShapeSample{f * b, -0.5 * f, -df * b};
                }
                default: throw std::out_of_range("evaluate_shape: local edge must be 0..3");
                }
            },
            [&](const BubbleMode& m) {
                auto [fx, dfx] = kernel(m.i, xi);
                auto [fy, dfy] = kernel(m.j, eta);
                return ShapeSample{fx * fy, dfx * fy, fx * dfy};
            }},
        kind);
}

ShapeTable tabulate(int p, const Eigen::Ref<const Eigen::MatrixX2d>& points)
{
    if (p < 1)
        throw std::domain_error("tabulate: degree must be >= 1");
    ShapeTable table;
    table.p = p;
    table.kinds = shape_kinds(p);
    const auto n = static_cast<Eigen::Index>(table.kinds.size());
    table.values.resize(n, points.rows());
    table.dxi.resize(n, points.rows());
    table.deta.resize(n, points.rows());
    for (Eigen::Index q = 0; q < points.rows(); ++q) {
        for (Eigen::Index m = 0; m < n; ++m) {
            const ShapeSample s = evaluate_shape(table.kinds[static_cast<std::size_t>(m)], points(q, 0), points(q, 1));
            table.values(m, q) = s.value;
            table.dxi(m, q) = s.dxi;
            table.deta(m, q) = s.deta;
        }
    }
    return table;
}

}  // namespace hpmin
