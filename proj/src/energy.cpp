#include "hpmin/energy.hpp"

#include <Eigen/LU>

#include <cmath>

namespace hpmin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |x|^alpha from sq = |x|^2
double power_of_square(double sq, double alpha)
{
    if (alpha == 2.0)
        return sq;
    if (alpha == 3.0)
        return sq * std::sqrt(sq);
    if (alpha == 4.0)
        return sq * sq;
    return std::pow(sq, 0.5 * alpha);
}

void scatter(const DofMap& dofs, Index e, int c, const Eigen::Ref<const Eigen::VectorXd>& local, Eigen::VectorXd& full)
{
    for (Index m = 0; m < dofs.n_shapes(); ++m)
        full(dofs.global(dofs.elems2dofs(e, m), c)) += dofs.signs(e, m) * local(m);
}

}  // namespace

Eigen::VectorXd gather(const DofMap& dofs, Index e, int c, const Eigen::Ref<const Eigen::VectorXd>& v_full)
{
    Eigen::VectorXd local(dofs.n_shapes());
    for (Index m = 0; m < dofs.n_shapes(); ++m)
        local(m) = dofs.signs(e, m) * v_full(dofs.global(dofs.elems2dofs(e, m), c));
    return local;
}

Eigen::VectorXd assemble_load(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& f)
{
    if (f.size() != dofs.components)
        throw std::invalid_argument("assemble_load: one source value per component expected");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dofs.n_dofs());
    for (Index e = 0; e < dofs.n_elems(); ++e) {
        const Eigen::VectorXd integrated = geometry.phi * geometry.wdetj.col(e);
        for (int c = 0; c < dofs.components; ++c)
            scatter(dofs, e, c, f(c) * integrated, b);
    }
    return b;
}

GaussField evaluate_gradfield(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& v_full)
{
    if (v_full.size() != dofs.n_dofs())
        throw std::invalid_argument("evaluate_gradfield: coefficient vector length mismatch");
    const Index nip = geometry.n_ip;
    const Index nt = dofs.n_elems();
    GaussField field;
    if (dofs.components == 1) {
        field.vx.resize(nip, nt);
        field.vy.resize(nip, nt);
        for (Index e = 0; e < nt; ++e) {
            const Eigen::VectorXd u = gather(dofs, e, 0, v_full);
            field.vx.col(e).noalias() = geometry.dx(e).transpose() * u;
            field.vy.col(e).noalias() = geometry.dy(e).transpose() * u;
        }
    } else {
        field.f11.resize(nip, nt);
        field.f12.resize(nip, nt);
        field.f21.resize(nip, nt);
        field.f22.resize(nip, nt);
        for (Index e = 0; e < nt; ++e) {
            const Eigen::VectorXd u1 = gather(dofs, e, 0, v_full);
            const Eigen::VectorXd u2 = gather(dofs, e, 1, v_full);
            field.f11.col(e).noalias() = geometry.dx(e).transpose() * u1;
            field.f12.col(e).noalias() = geometry.dy(e).transpose() * u1;
            field.f21.col(e).noalias() = geometry.dx(e).transpose() * u2;
            field.f22.col(e).noalias() = geometry.dy(e).transpose() * u2;
        }
    }
    return field;
}

void EnergyModel::check_length(const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    if (v_full.size() != dofs_->n_dofs())
        throw std::invalid_argument("EnergyModel: coefficient vector length mismatch");
}

Eigen::VectorXd EnergyModel::element_energies(const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    check_length(v_full);
    Eigen::VectorXd out(dofs_->n_elems());
    for (Index e = 0; e < dofs_->n_elems(); ++e)
        out(e) = element_energy(e, v_full);
    return out;
}

Eigen::MatrixXd EnergyModel::element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                         const Eigen::Ref<const Eigen::VectorXd>& steps) const
{
    const DofMap& d = *dofs_;
    Eigen::MatrixXd diff(d.n_shapes(), d.components);
    Eigen::VectorXd x = v_full;
    for (int c = 0; c < d.components; ++c)
        for (Index m = 0; m < d.n_shapes(); ++m) {
            const Index i = d.global(d.elems2dofs(e, m), c);
            x(i) = v_full(i) + steps(i);
            const double plus = element_energy(e, x);
            x(i) = v_full(i) - steps(i);
            const double minus = element_energy(e, x);
            x(i) = v_full(i);
            diff(m, c) = plus - minus;
        }
    return diff;
}

double EnergyModel::energy(const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    check_length(v_full);
    double total = 0.0;
    for (Index e = 0; e < dofs_->n_elems(); ++e) {
        const double part = element_energy(e, v_full);
        if (!std::isfinite(part))
            return kInf;
        total += part;
    }
    return total - load_.dot(v_full);
}

// ---------------------------------------------------------------------------------------

PLaplaceModel::PLaplaceModel(const GeometryFactors& geometry, const DofMap& dofs, double alpha, double f)
    : EnergyModel(geometry, dofs, assemble_load(geometry, dofs, Eigen::VectorXd::Constant(1, f))), alpha_(alpha), f_(f)
{
    if (!(alpha > 1.0))
        throw ConfigError("PLaplaceModel: alpha must be > 1");
    if (dofs.components != 1)
        throw ConfigError("PLaplaceModel: scalar DOF map required");
}

double PLaplaceModel::element_energy(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    const auto& g = geometry();
    const Eigen::VectorXd u = gather(dofs(), e, 0, v_full);
    const Eigen::VectorXd vx = g.dx(e).transpose() * u;
    const Eigen::VectorXd vy = g.dy(e).transpose() * u;
    double sum = 0.0;
    for (Index q = 0; q < g.n_ip; ++q)
        sum += g.wdetj(q, e) * power_of_square(vx(q) * vx(q) + vy(q) * vy(q), alpha_);
    return sum / alpha_;
}

Eigen::VectorXd PLaplaceModel::gradient(const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    check_length(v_full);
    const auto& g = geometry();
    const auto& d = dofs();
    Eigen::VectorXd grad = -load();
    Eigen::VectorXd sx(g.n_ip), sy(g.n_ip);
    for (Index e = 0; e < d.n_elems(); ++e) {
        const Eigen::VectorXd u = gather(d, e, 0, v_full);
        const Eigen::VectorXd vx = g.dx(e).transpose() * u;
        const Eigen::VectorXd vy = g.dy(e).transpose() * u;
        for (Index q = 0; q < g.n_ip; ++q) {
            const double sq = vx(q) * vx(q) + vy(q) * vy(q);
            double factor;
            if (sq > 0.0)
                factor = alpha_ == 3.0 ? std::sqrt(sq) : std::pow(sq, 0.5 * (alpha_ - 2.0));
            else if (alpha_ > 2.0)
                factor = 0.0;
            else if (alpha_ == 2.0)
                factor = 1.0;
            else
                throw SingularGradientError("p-Laplace gradient undefined at |grad v| = 0 for alpha < 2");
            sx(q) = g.wdetj(q, e) * factor * vx(q);
            sy(q) = g.wdetj(q, e) * factor * vy(q);
        }
        const Eigen::VectorXd local = g.dx(e) * sx + g.dy(e) * sy;
        scatter(d, e, 0, local, grad);
    }
    return grad;
}

Eigen::MatrixXd PLaplaceModel::element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                           const Eigen::Ref<const Eigen::VectorXd>& steps) const
{
    const auto& g = geometry();
    const auto& d = dofs();
    const Eigen::VectorXd u = gather(d, e, 0, v_full);
    const auto dx = g.dx(e);
    const auto dy = g.dy(e);
    const Eigen::VectorXd vx = dx.transpose() * u;
    const Eigen::VectorXd vy = dy.transpose() * u;
    Eigen::MatrixXd diff(d.n_shapes(), 1);
    for (Index m = 0; m < d.n_shapes(); ++m) {
        // moving the global coefficient by h moves the local one by sign * h
        const double h = d.signs(e, m) * steps(d.elems2dofs(e, m));
        double plus = 0.0, minus = 0.0;
        for (Index q = 0; q < g.n_ip; ++q) {
            const double px = vx(q) + h * dx(m, q), py = vy(q) + h * dy(m, q);
            const double mx = vx(q) - h * dx(m, q), my = vy(q) - h * dy(m, q);
            plus += g.wdetj(q, e) * power_of_square(px * px + py * py, alpha_);
            minus += g.wdetj(q, e) * power_of_square(mx * mx + my * my, alpha_);
        }
        diff(m, 0) = (plus - minus) / alpha_;
    }
    return diff;
}

// ---------------------------------------------------------------------------------------

NeoHookeMaterial NeoHookeMaterial::from_young_poisson(double young, double poisson)
{
    if (!(young > 0.0) || !(poisson > -1.0 && poisson < 0.5))
        throw ConfigError("NeoHookeMaterial: need E > 0 and -1 < nu < 0.5");
    const double mu = young / (2.0 * (1.0 + poisson));
    const double bulk = young / (3.0 * (1.0 - 2.0 * poisson));
    return {mu / 2.0, bulk / 2.0};
}

double neohooke_density(const Eigen::Matrix2d& F, const NeoHookeMaterial& material)
{
    const double det = F.determinant();
    if (!(det > 0.0))
        return kInf;
    return material.c1 * (F.squaredNorm() - 2.0 - 2.0 * std::log(det)) + material.d1 * (det - 1.0) * (det - 1.0);
}

Eigen::Matrix2d neohooke_stress(const Eigen::Matrix2d& F, const NeoHookeMaterial& material)
{
    const double det = F.determinant();
    if (!(det > 0.0))
        throw BarrierError("Neo-Hookean stress requested at det F <= 0");
    Eigen::Matrix2d inv_t;
    inv_t << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
    inv_t /= det;
    return 2.0 * material.c1 * (F - inv_t) + 2.0 * material.d1 * (det - 1.0) * det * inv_t;
}

NeoHookeModel::NeoHookeModel(const GeometryFactors& geometry, const DofMap& dofs, NeoHookeMaterial material, const Eigen::Vector2d& force)
    : EnergyModel(geometry, dofs, assemble_load(geometry, dofs, force)), material_(material), force_(force)
{
    if (dofs.components != 2)
        throw ConfigError("NeoHookeModel: two-component DOF map required");
    if (!(material.c1 > 0.0) || !(material.d1 > 0.0))
        throw ConfigError("NeoHookeModel: C1 and D1 must be positive");
}

double NeoHookeModel::element_energy(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    const auto& g = geometry();
    const Eigen::VectorXd u1 = gather(dofs(), e, 0, v_full);
    const Eigen::VectorXd u2 = gather(dofs(), e, 1, v_full);
    const auto dx = g.dx(e);
    const auto dy = g.dy(e);
    double sum = 0.0;
    for (Index q = 0; q < g.n_ip; ++q) {
        Eigen::Matrix2d F;
        F << dx.col(q).dot(u1), dy.col(q).dot(u1), dx.col(q).dot(u2), dy.col(q).dot(u2);
        const double w = neohooke_density(F, material_);
        if (!std::isfinite(w))
            return kInf;
        sum += g.wdetj(q, e) * w;
    }
    return sum;
}

Eigen::VectorXd NeoHookeModel::gradient(const Eigen::Ref<const Eigen::VectorXd>& v_full) const
{
    check_length(v_full);
    const auto& g = geometry();
    const auto& d = dofs();
    Eigen::VectorXd grad = -load();
    Eigen::VectorXd p11(g.n_ip), p12(g.n_ip), p21(g.n_ip), p22(g.n_ip);
    for (Index e = 0; e < d.n_elems(); ++e) {
        const Eigen::VectorXd u1 = gather(d, e, 0, v_full);
        const Eigen::VectorXd u2 = gather(d, e, 1, v_full);
        const auto dx = g.dx(e);
        const auto dy = g.dy(e);
        for (Index q = 0; q < g.n_ip; ++q) {
            Eigen::Matrix2d F;
            F << dx.col(q).dot(u1), dy.col(q).dot(u1), dx.col(q).dot(u2), dy.col(q).dot(u2);
            const Eigen::Matrix2d P = g.wdetj(q, e) * neohooke_stress(F, material_);
            p11(q) = P(0, 0);
            p12(q) = P(0, 1);
            p21(q) = P(1, 0);
            p22(q) = P(1, 1);
        }
        scatter(d, e, 0, dx * p11 + dy * p12, grad);
        scatter(d, e, 1, dx * p21 + dy * p22, grad);
    }
    return grad;
}

Eigen::MatrixXd NeoHookeModel::element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                           const Eigen::Ref<const Eigen::VectorXd>& steps) const
{
    const auto& g = geometry();
    const auto& d = dofs();
    const Eigen::VectorXd u1 = gather(d, e, 0, v_full);
    const Eigen::VectorXd u2 = gather(d, e, 1, v_full);
    const auto dx = g.dx(e);
    const auto dy = g.dy(e);
    std::vector<Eigen::Matrix2d> base(static_cast<std::size_t>(g.n_ip));
    for (Index q = 0; q < g.n_ip; ++q)
        base[static_cast<std::size_t>(q)] << dx.col(q).dot(u1), dy.col(q).dot(u1), dx.col(q).dot(u2), dy.col(q).dot(u2);

    Eigen::MatrixXd diff(d.n_shapes(), 2);
    for (int c = 0; c < 2; ++c)
        for (Index m = 0; m < d.n_shapes(); ++m) {
            const double h = d.signs(e, m) * steps(d.global(d.elems2dofs(e, m), c));
            double plus = 0.0, minus = 0.0;
            for (Index q = 0; q < g.n_ip; ++q) {
                // perturbing component c changes row c of F
                Eigen::Matrix2d fp = base[static_cast<std::size_t>(q)];
                Eigen::Matrix2d fm = fp;
                fp(c, 0) += h * dx(m, q);
                fp(c, 1) += h * dy(m, q);
                fm(c, 0) -= h * dx(m, q);
                fm(c, 1) -= h * dy(m, q);
                plus += g.wdetj(q, e) * neohooke_density(fp, material_);
                minus += g.wdetj(q, e) * neohooke_density(fm, material_);
            }
            diff(m, c) = plus - minus;
        }
    return diff;
}

// ---------------------------------------------------------------------------------------

Eigen::VectorXd identity_deformation(const QuadMesh& mesh, const DofMap& dofs)
{
    if (dofs.components != 2)
        throw std::invalid_argument("identity_deformation: two-component DOF map required");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.n_dofs());
    for (Index n = 0; n < mesh.num_nodes(); ++n)
        for (int c = 0; c < 2; ++c)
            v(dofs.global(n, c)) = mesh.nodes(n, c);
    return v;
}

Eigen::VectorXd nodal_interpolant(const QuadMesh& mesh, const DofMap& dofs, const std::function<double(const Eigen::Vector2d&)>& fn)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.n_dofs());
    for (Index n = 0; n < mesh.num_nodes(); ++n)
        v(n) = fn(mesh.nodes.row(n).transpose());
    return v;
}

double min_jacobian(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& v_full)
{
    const GaussField F = evaluate_gradfield(geometry, dofs, v_full);
    return (F.f11.array() * F.f22.array() - F.f12.array() * F.f21.array()).minCoeff();
}

}  // namespace hpmin
