#include "hpmin/bench.hpp"

#include "hpmin/vtk.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hpmin {

namespace {

constexpr const char* kCsvHeader = "level,nelems,dofs,time_s,iters,energy";

double parse_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': " + text);
    }
}

int parse_int(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for '" + key + "': " + text);
    }
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "1" || text == "true" || text == "yes" || text == "on")
        return true;
    if (text == "0" || text == "false" || text == "no" || text == "off")
        return false;
    throw ConfigError("invalid boolean for '" + key + "': " + text);
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename Clock = std::chrono::steady_clock>
double seconds_since(typename Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

TrOptions options_for(const BenchConfig& config, double initial_energy, const QuadMesh& mesh)
{
    TrOptions opts = default_tr_options(config.problem, initial_energy, mesh_diameter(mesh));
    if (config.grad_tol)
        opts.grad_tol = *config.grad_tol;
    opts.max_iters = config.max_iters;
    opts.gradient_mode = config.gradient_mode;
    opts.log = config.log;
    return opts;
}

template <typename Run, typename Solve>
std::vector<Run> run_levels(const BenchConfig& config, Solve solve)
{
    std::vector<Run> runs;
    if (config.parallel) {
        std::vector<std::future<Run>> pending;
        for (int level : config.levels)
            pending.push_back(std::async(std::launch::async, [&config, level, &solve] {
                Run run = solve(config, level);
                run.row.time_s = 0.0;
                return run;
            }));
        for (auto& f : pending)
            runs.push_back(f.get());
    } else {
        for (int level : config.levels)
            runs.push_back(solve(config, level));
    }
    return runs;
}

}  // namespace

void BenchConfig::validate() const
{
    if (p < 1)
        throw ConfigError("degree p must be >= 1");
    if (levels.empty())
        throw ConfigError("level list must not be empty");
    if (std::any_of(levels.begin(), levels.end(), [](int l) { return l < 0; }))
        throw ConfigError("levels must be >= 0");
    if (problem == ProblemKind::plaplace && !(alpha > 1.0))
        throw ConfigError("alpha must be > 1");
    if (max_iters < 0)
        throw ConfigError("max_iters must be >= 0");
}

std::unique_ptr<Discretization> make_discretization(QuadMesh mesh, int p, int components, const DirichletSpec& dirichlet)
{
    auto disc = std::make_unique<Discretization>();
    disc->mesh = std::move(mesh);
    disc->rule = rule_for_degree(p);
    disc->table = tabulate(p, disc->rule.points);
    disc->geometry = geometry_factors(disc->mesh, disc->rule, disc->table);
    disc->dofs = build_dofmap(disc->mesh, p, components, dirichlet);
    return disc;
}

double mesh_diameter(const QuadMesh& mesh)
{
    const Eigen::Vector2d lo = mesh.nodes.colwise().minCoeff();
    const Eigen::Vector2d hi = mesh.nodes.colwise().maxCoeff();
    return (hi - lo).norm();
}

TrOptions default_tr_options(ProblemKind problem, double initial_energy, double diameter)
{
    TrOptions opts;
    opts.grad_tol = 1e-6 * std::max(1.0, std::abs(initial_energy)) / diameter;
    opts.initial_radius = problem == ProblemKind::plaplace ? 1.0 : 0.1 * diameter;
    return opts;
}

PLaplaceRun solve_plaplace(const BenchConfig& config, int level)
{
    config.validate();
    PLaplaceRun run;
    run.disc = make_discretization(make_lshape(level), config.p, 1, DirichletSpec{{"boundary"}});
    const Discretization& d = *run.disc;
    const PLaplaceModel model(d.geometry, d.dofs, config.alpha, config.f);

    const Eigen::VectorXd v0 = Eigen::VectorXd::Zero(d.dofs.n_dofs());
    const MinimizationProblem problem = make_energy_problem(model, v0, config.gradient_mode);
    const TrOptions opts = options_for(config, model.energy(v0), d.mesh);

    const auto start = std::chrono::steady_clock::now();
    run.trace = minimize(problem, opts);
    run.row.time_s = seconds_since(start);

    run.solution = expand_solution(d.dofs, run.trace.x);
    run.row.level = level;
    run.row.nelems = d.mesh.num_elems();
    run.row.dofs = d.dofs.n_free();
    run.row.iters = run.trace.iterations;
    run.row.energy = run.trace.energy;
    run.row.converged = run.trace.converged;
    return run;
}

HyperRun solve_hyperelasticity(const BenchConfig& config, int level)
{
    config.validate();
    HyperRun run;
    DirichletSpec clamp{{"left", "bottom"}, [](const Eigen::Vector2d& x, int c) { return x(c); }};
    run.disc = make_discretization(make_perforated_square(level), config.p, 2, clamp);
    const Discretization& d = *run.disc;
    const NeoHookeModel model(d.geometry, d.dofs, NeoHookeMaterial::from_young_poisson(config.young, config.poisson),
                              config.force);

    const Eigen::VectorXd v0 = identity_deformation(d.mesh, d.dofs);
    const MinimizationProblem problem = make_energy_problem(model, v0, config.gradient_mode);
    const TrOptions opts = options_for(config, model.energy(v0), d.mesh);

    const auto start = std::chrono::steady_clock::now();
    run.trace = minimize(problem, opts);
    run.row.time_s = seconds_since(start);

    run.solution = expand_solution(d.dofs, run.trace.x);
    run.row.level = level;
    run.row.nelems = d.mesh.num_elems();
    run.row.dofs = d.dofs.n_free();
    run.row.iters = run.trace.iterations;
    run.row.energy = run.trace.energy;
    run.row.converged = run.trace.converged;

    run.min_det_f = min_jacobian(d.geometry, d.dofs, run.solution);
    const Eigen::VectorXd reference = identity_deformation(d.mesh, d.dofs);
    for (Index n = 0; n < d.mesh.num_nodes(); ++n)
        for (int c = 0; c < 2; ++c)
            run.mean_displacement(c) += run.solution(d.dofs.global(n, c)) - reference(d.dofs.global(n, c));
    run.mean_displacement /= static_cast<double>(d.mesh.num_nodes());
    run.cell_density = model.element_energies(run.solution).cwiseQuotient(d.geometry.wdetj.colwise().sum().transpose());
    return run;
}

std::vector<ConvergenceRow> run_plaplace(const BenchConfig& config)
{
    config.validate();
    auto runs = run_levels<PLaplaceRun>(config, solve_plaplace);
    std::vector<ConvergenceRow> rows;
    for (const auto& run : runs) {
        rows.push_back(run.row);
        if (!config.out_dir.empty() && config.write_vtk) {
            std::ofstream vtk(config.out_dir / ("plaplace_p" + std::to_string(config.p) + "_level" + std::to_string(run.row.level) + ".vtk"));
            write_vtk_sampled(vtk, run.disc->mesh, run.disc->dofs, run.solution, "u");
        }
    }
    if (!config.out_dir.empty()) {
        std::ofstream csv(config.out_dir / "plaplace.csv");
        write_rows_csv(csv, rows);
    }
    return rows;
}

std::vector<ConvergenceRow> run_hyperelasticity(const BenchConfig& config)
{
    config.validate();
    auto runs = run_levels<HyperRun>(config, solve_hyperelasticity);
    std::vector<ConvergenceRow> rows;
    for (const auto& run : runs) {
        rows.push_back(run.row);
        if (!config.out_dir.empty() && config.write_vtk) {
            std::ofstream vtk(config.out_dir / ("hyper_p" + std::to_string(config.p) + "_level" + std::to_string(run.row.level) + ".vtk"));
            write_vtk_deformed(vtk, run.disc->mesh, run.disc->dofs, run.solution, run.cell_density);
        }
    }
    if (!config.out_dir.empty()) {
        std::ofstream csv(config.out_dir / "hyper.csv");
        write_rows_csv(csv, rows);
    }
    return rows;
}

void write_rows_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << kCsvHeader << '\n' << std::setprecision(10);
    for (const auto& r : rows)
        os << r.level << ',' << r.nelems << ',' << r.dofs << ',' << r.time_s << ',' << r.iters << ',' << r.energy << '\n';
}

std::vector<ConvergenceRow> read_rows_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || trim(line) != kCsvHeader)
        throw std::runtime_error("read_rows_csv: unexpected header");
    std::vector<ConvergenceRow> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty())
            continue;
        std::stringstream ss(line);
        std::vector<std::string> fields;
        for (std::string field; std::getline(ss, field, ',');)
            fields.push_back(trim(field));
        if (fields.size() != 6)
            throw std::runtime_error("read_rows_csv: expected 6 fields in '" + line + "'");
        ConvergenceRow r;
        r.level = std::stoi(fields[0]);
        r.nelems = std::stoll(fields[1]);
        r.dofs = std::stoll(fields[2]);
        r.time_s = std::stod(fields[3]);
        r.iters = std::stoi(fields[4]);
        r.energy = std::stod(fields[5]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<CompareRow> reference_errors(const std::vector<std::pair<int, ConvergenceRow>>& runs)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [p, row] : runs)
        best = std::min(best, row.energy);
    const double j_ref = best - 1e-4;
    std::vector<CompareRow> out;
    for (const auto& [p, row] : runs)
        out.push_back({p, row, row.energy - j_ref});
    return out;
}

std::vector<CompareRow> compare_elements(const CompareSpec& spec)
{
    if (spec.levels_by_degree.empty())
        throw ConfigError("compare: no element configurations given");
    std::vector<std::pair<int, ConvergenceRow>> runs;
    for (const auto& [p, levels] : spec.levels_by_degree) {
        BenchConfig config = spec.base;
        config.p = p;
        config.levels = levels;
        config.out_dir.clear();
        const auto rows = config.problem == ProblemKind::plaplace ? run_plaplace(config) : run_hyperelasticity(config);
        for (const auto& row : rows)
            runs.emplace_back(p, row);
    }
    auto result = reference_errors(runs);
    if (!spec.base.out_dir.empty()) {
        std::ofstream csv(spec.base.out_dir / "compare.csv");
        write_compare_csv(csv, result);
    }
    return result;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows)
{
    os << "p,level,nelems,dofs,time_s,iters,energy,error\n" << std::setprecision(10);
    for (const auto& r : rows)
        os << r.p << ',' << r.row.level << ',' << r.row.nelems << ',' << r.row.dofs << ',' << r.row.time_s << ','
           << r.row.iters << ',' << r.row.energy << ',' << r.error << '\n';
}

double error_at_dofs(const std::vector<CompareRow>& rows, int p, double dofs)
{
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.p == p)
            pts.emplace_back(std::log(static_cast<double>(r.row.dofs)), std::log(r.error));
    std::sort(pts.begin(), pts.end());
    const double x = std::log(dofs);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (x >= pts[i - 1].first && x <= pts[i].first) {
            const double t = (x - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
            return std::exp(pts[i - 1].second + t * (pts[i].second - pts[i - 1].second));
        }
    }
    throw std::out_of_range("error_at_dofs: DOF count outside the sampled range");
}

KeyValues parse_key_values(std::istream& is)
{
    KeyValues values;
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected key=value");
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = parse_int("levels", trim(text.substr(0, dots)));
        const int hi = parse_int("levels", trim(text.substr(dots + 2)));
        if (hi < lo)
            throw ConfigError("empty range: " + text);
        for (int i = lo; i <= hi; ++i)
            out.push_back(i);
        return out;
    }
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        out.push_back(parse_int("list", trim(item)));
    if (out.empty())
        throw ConfigError("empty list");
    return out;
}

void apply_config(BenchConfig& config, const KeyValues& values)
{
    for (const auto& [key, value] : values) {
        if (key == "problem") {
            if (value == "plaplace")
                config.problem = ProblemKind::plaplace;
            else if (value == "hyper" || value == "hyperelasticity")
                config.problem = ProblemKind::hyperelasticity;
            else
                throw ConfigError("unknown problem '" + value + "'");
        } else if (key == "p") {
            config.p = parse_int(key, value);
        } else if (key == "levels" || key == "level") {
            config.levels = parse_int_list(value);
        } else if (key == "alpha") {
            config.alpha = parse_double(key, value);
        } else if (key == "f") {
            config.f = parse_double(key, value);
        } else if (key == "E") {
            config.young = parse_double(key, value);
        } else if (key == "nu") {
            config.poisson = parse_double(key, value);
        } else if (key == "fx") {
            config.force.x() = parse_double(key, value);
        } else if (key == "fy") {
            config.force.y() = parse_double(key, value);
        } else if (key == "grad") {
            if (value == "explicit")
                config.gradient_mode = GradientMode::explicit_form;
            else if (value == "fd")
                config.gradient_mode = GradientMode::central_diff;
            else
                throw ConfigError("grad must be 'explicit' or 'fd'");
        } else if (key == "grad_tol") {
            config.grad_tol = parse_double(key, value);
        } else if (key == "max_iters") {
            config.max_iters = parse_int(key, value);
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "vtk") {
            config.write_vtk = parse_bool(key, value);
        } else if (key == "parallel") {
            config.parallel = parse_bool(key, value);
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
}

CompareSpec parse_compare_spec(const KeyValues& values)
{
    CompareSpec spec;
    KeyValues base;
    std::vector<int> degrees;
    std::map<int, std::vector<int>> explicit_levels;
    for (const auto& [key, value] : values) {
        if (key == "p") {
            degrees = parse_int_list(value);
        } else if (key.rfind("levels.", 0) == 0) {
            explicit_levels[parse_int(key, key.substr(7))] = parse_int_list(value);
        } else {
            base[key] = value;
        }
    }
    apply_config(spec.base, base);
    for (const auto& [p, levels] : explicit_levels)
        if (std::find(degrees.begin(), degrees.end(), p) == degrees.end())
            degrees.push_back(p);
    if (degrees.size() < 2)
        throw ConfigError("compare: at least two element degrees are required");
    for (int p : degrees) {
        auto it = explicit_levels.find(p);
        spec.levels_by_degree[p] = it != explicit_levels.end() ? it->second : spec.base.levels;
    }
    return spec;
}

}  // namespace hpmin
