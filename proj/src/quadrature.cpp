#include "hpmin/quadrature.hpp"

namespace hpmin {

QuadRule tensor_gauss_rule(int n)
{
    const auto line = gauss_1d<double>(n);
    QuadRule rule;
    rule.points.resize(n * n, 2);
    rule.weights.resize(n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int q = j * n + i;
            rule.points(q, 0) = line.points(i);
            rule.points(q, 1) = line.points(j);
            rule.weights(q) = line.weights(i) * line.weights(j);
        }
    }
    return rule;
}

}  // namespace hpmin
