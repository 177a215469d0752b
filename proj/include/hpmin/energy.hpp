#pragma once

#include "hpmin/dofmap.hpp"
#include "hpmin/mesh.hpp"

#include <Eigen/Core>

#include <limits>
#include <stdexcept>

namespace hpmin {

/// Gradient evaluation hit a point outside the energy's domain (det F <= 0).
class BarrierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |grad v| = 0 at a quadrature point with alpha < 2.
class SingularGradientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gradient of the discrete field at every quadrature point of every element (n_ip x |T|).
/// Scalar fields fill vx, vy; deformations fill the four entries of F.
struct GaussField {
    Eigen::MatrixXd vx, vy;
    Eigen::MatrixXd f11, f12, f21, f22;
};

/// b_i = sum_e sum_q wdetj * f_c * phi_i for every DOF of component c.
Eigen::VectorXd assemble_load(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& f);

/// Signed local coefficients of element e for component c.
Eigen::VectorXd gather(const DofMap& dofs, Index e, int c, const Eigen::Ref<const Eigen::VectorXd>& v_full);

GaussField evaluate_gradfield(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& v_full);

/// Discrete energy J(v) = sum_e E_e(v) - b.v over full coefficient vectors.
class EnergyModel {
public:
    EnergyModel(const GeometryFactors& geometry, const DofMap& dofs, Eigen::VectorXd load)
        : geometry_(&geometry), dofs_(&dofs), load_(std::move(load))
    {
        if (load_.size() != dofs.n_dofs())
            throw std::invalid_argument("EnergyModel: load vector length mismatch");
    }
    virtual ~EnergyModel() = default;

    /// Integrated density over element e (no load term); +inf outside the domain.
    [[nodiscard]] virtual double element_energy(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full) const = 0;

    /// Full-length explicit gradient, load included.
    [[nodiscard]] virtual Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& v_full) const = 0;

    /// Entry (m, c): E_e(v + h_i e_i) - E_e(v - h_i e_i) for the global DOF i of local shape m,
    /// component c, with h_i = steps(i). The default re-evaluates element_energy on copies.
    [[nodiscard]] virtual Eigen::MatrixXd element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                                      const Eigen::Ref<const Eigen::VectorXd>& steps) const;

    /// Energy density integrated per element.
    [[nodiscard]] Eigen::VectorXd element_energies(const Eigen::Ref<const Eigen::VectorXd>& v_full) const;

    [[nodiscard]] double energy(const Eigen::Ref<const Eigen::VectorXd>& v_full) const;

    [[nodiscard]] const GeometryFactors& geometry() const { return *geometry_; }
    [[nodiscard]] const DofMap& dofs() const { return *dofs_; }
    [[nodiscard]] const Eigen::VectorXd& load() const { return load_; }

protected:
    void check_length(const Eigen::Ref<const Eigen::VectorXd>& v_full) const;

private:
    const GeometryFactors* geometry_;
    const DofMap* dofs_;
    Eigen::VectorXd load_;
};

/// (1/alpha) int |grad v|^alpha - int f v with constant f.
class PLaplaceModel final : public EnergyModel {
public:
    PLaplaceModel(const GeometryFactors& geometry, const DofMap& dofs, double alpha, double f);

    [[nodiscard]] double element_energy(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full) const override;
    [[nodiscard]] Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& v_full) const override;
    [[nodiscard]] Eigen::MatrixXd element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                              const Eigen::Ref<const Eigen::VectorXd>& steps) const override;

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double source() const { return f_; }

private:
    double alpha_;
    double f_;
};

struct NeoHookeMaterial {
    double c1;
    double d1;

    /// C1 = mu/2, D1 = K/2 with mu = E/(2(1+nu)), K = E/(3(1-2nu)).
    static NeoHookeMaterial from_young_poisson(double young, double poisson);
};

/// W(F) = C1 (|F|^2 - 2 - 2 log det F) + D1 (det F - 1)^2; +inf for det F <= 0.
double neohooke_density(const Eigen::Matrix2d& F, const NeoHookeMaterial& material);

/// First Piola stress dW/dF. Requires det F > 0.
Eigen::Matrix2d neohooke_stress(const Eigen::Matrix2d& F, const NeoHookeMaterial& material);

/// int W(grad v) - int f.v over deformations v (two components).
class NeoHookeModel final : public EnergyModel {
public:
    NeoHookeModel(const GeometryFactors& geometry, const DofMap& dofs, NeoHookeMaterial material, const Eigen::Vector2d& force);

    [[nodiscard]] double element_energy(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full) const override;
    [[nodiscard]] Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& v_full) const override;
    [[nodiscard]] Eigen::MatrixXd element_central_differences(Index e, const Eigen::Ref<const Eigen::VectorXd>& v_full,
                                                              const Eigen::Ref<const Eigen::VectorXd>& steps) const override;

    [[nodiscard]] const NeoHookeMaterial& material() const { return material_; }

private:
    NeoHookeMaterial material_;
    Eigen::Vector2d force_;
};

/// Identity deformation: nodal coefficients are the node coordinates, higher modes zero.
Eigen::VectorXd identity_deformation(const QuadMesh& mesh, const DofMap& dofs);

/// Nodal interpolant of a scalar function (higher modes zero).
Eigen::VectorXd nodal_interpolant(const QuadMesh& mesh, const DofMap& dofs, const std::function<double(const Eigen::Vector2d&)>& fn);

/// Smallest det F over all quadrature points.
double min_jacobian(const GeometryFactors& geometry, const DofMap& dofs, const Eigen::Ref<const Eigen::VectorXd>& v_full);

}  // namespace hpmin
