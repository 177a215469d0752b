#pragma once

#include "hpmin/dofmap.hpp"
#include "hpmin/energy.hpp"
#include "hpmin/mesh.hpp"
#include "hpmin/quadrature.hpp"
#include "hpmin/trust_region.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hpmin {

enum class ProblemKind { plaplace, hyperelasticity };

struct BenchConfig {
    ProblemKind problem = ProblemKind::plaplace;
    int p = 2;
    std::vector<int> levels{1};
    // p-Laplace
    double alpha = 3.0;
    double f = -10.0;
    // hyperelasticity
    double young = 2e8;
    double poisson = 0.3;
    Eigen::Vector2d force{-3.5e7, -3.5e7};

    GradientMode gradient_mode = GradientMode::explicit_form;
    std::optional<double> grad_tol;  // default depends on the problem scale
    int max_iters = 200;
    std::filesystem::path out_dir;   // empty: no files
    bool write_vtk = false;
    bool parallel = false;           // independent levels concurrently, no timing
    std::ostream* log = nullptr;

    void validate() const;
};

/// One line of a convergence table.
struct ConvergenceRow {
    int level = 0;
    Index nelems = 0;
    Index dofs = 0;  // free DOFs
    double time_s = 0.0;
    int iters = 0;
    double energy = 0.0;
    bool converged = true;  // not part of the CSV schema

    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

/// Mesh, quadrature, basis, geometry and DOFs for one run. Models keep references into it,
/// so it must stay in place while they are used.
struct Discretization {
    QuadMesh mesh;
    QuadRule rule;
    ShapeTable table;
    GeometryFactors geometry;
    DofMap dofs;
};

std::unique_ptr<Discretization> make_discretization(QuadMesh mesh, int p, int components, const DirichletSpec& dirichlet);

/// Solver defaults for the benchmarks. grad_tol = 1e-6 max(1, |J0|) / diam.
TrOptions default_tr_options(ProblemKind problem, double initial_energy, double diameter);

double mesh_diameter(const QuadMesh& mesh);

struct PLaplaceRun {
    ConvergenceRow row;
    std::unique_ptr<Discretization> disc;
    Eigen::VectorXd solution;  // full coefficients
    TrSolution trace;
};

struct HyperRun {
    ConvergenceRow row;
    std::unique_ptr<Discretization> disc;
    Eigen::VectorXd solution;  // full deformation coefficients
    TrSolution trace;
    double min_det_f = 0.0;
    Eigen::Vector2d mean_displacement = Eigen::Vector2d::Zero();
    Eigen::VectorXd cell_density;  // mean W per element
};

/// Minimizes the L-shape p-Laplace energy on one level from the zero initial guess.
PLaplaceRun solve_plaplace(const BenchConfig& config, int level);

/// Minimizes the perforated-square Neo-Hookean energy on one level from the identity.
HyperRun solve_hyperelasticity(const BenchConfig& config, int level);

/// All configured levels; writes plaplace.csv (and VTK files) into out_dir when set.
std::vector<ConvergenceRow> run_plaplace(const BenchConfig& config);
std::vector<ConvergenceRow> run_hyperelasticity(const BenchConfig& config);

void write_rows_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> read_rows_csv(std::istream& is);

struct CompareRow {
    int p = 0;
    ConvergenceRow row;
    double error = 0.0;  // J(u) - J_ref
};

/// Per-degree level lists for compare_elements.
struct CompareSpec {
    BenchConfig base;
    std::map<int, std::vector<int>> levels_by_degree;
};

/// J_ref = min J(u) - 1e-4 over all rows; error = J(u) - J_ref.
std::vector<CompareRow> reference_errors(const std::vector<std::pair<int, ConvergenceRow>>& runs);

std::vector<CompareRow> compare_elements(const CompareSpec& spec);

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

/// Log-log interpolation of the error of degree p at a given DOF count.
double error_at_dofs(const std::vector<CompareRow>& rows, int p, double dofs);

// --- configuration ---

using KeyValues = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment.
KeyValues parse_key_values(std::istream& is);

/// "1..4", "2", or "1,3,5".
std::vector<int> parse_int_list(const std::string& text);

/// Applies recognized keys to the config; unknown keys throw ConfigError.
void apply_config(BenchConfig& config, const KeyValues& values);

CompareSpec parse_compare_spec(const KeyValues& values);

}  // namespace hpmin
