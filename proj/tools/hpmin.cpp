// hpmin: benchmark driver for the hp-FEM energy minimizers.
//
//   hpmin plaplace --p 2 --alpha 3 --f -10 --levels 1..6 --grad explicit --out DIR
//   hpmin hyper --p 3 --level 2 --E 2e8 --nu 0.3 --fx -3.5e7 --fy -3.5e7 --out DIR
//   hpmin compare --spec FILE
//
// Exit codes: 0 success, 2 solver failure, 3 configuration error.

#include "hpmin/bench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kSolverFailure = 2;
constexpr int kConfigError = 3;

hpmin::KeyValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw hpmin::ConfigError("cannot open config file " + path);
    return hpmin::parse_key_values(in);
}

void print_table(const std::vector<hpmin::ConvergenceRow>& rows)
{
    std::printf("%5s %8s %8s %10s %6s %14s\n", "level", "|T|", "dofs", "time[s]", "iters", "J(u)");
    for (const auto& r : rows)
        std::printf("%5d %8lld %8lld %10.3f %6d %14.6f%s\n", r.level, static_cast<long long>(r.nelems),
                    static_cast<long long>(r.dofs), r.time_s, r.iters, r.energy, r.converged ? "" : "  (not converged)");
}

int finish(const std::vector<hpmin::ConvergenceRow>& rows)
{
    print_table(rows);
    for (const auto& r : rows)
        if (!r.converged) {
            std::cerr << "hpmin: solver did not converge on level " << r.level << '\n';
            return kSolverFailure;
        }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hp-FEM energy minimization benchmarks"};
    app.require_subcommand(1);

    // Options shared by the run subcommands; only flags actually given override the config.
    hpmin::KeyValues overrides;
    std::string config_file;
    bool verbose = false;
    auto add_value = [&overrides](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key=value configuration file");
        add_value(cmd, "--p", "p", "polynomial degree");
        add_value(cmd, "--grad", "grad", "gradient: explicit | fd");
        add_value(cmd, "--grad-tol", "grad_tol", "gradient infinity-norm tolerance");
        add_value(cmd, "--max-iters", "max_iters", "trust-region iteration limit");
        add_value(cmd, "--out", "out", "output directory for CSV/VTK");
        cmd->add_flag_function("--vtk", [&overrides](std::int64_t) { overrides["vtk"] = "1"; }, "write VTK files");
        cmd->add_flag_function("--parallel", [&overrides](std::int64_t) { overrides["parallel"] = "1"; },
                               "run levels concurrently (timing disabled)");
        cmd->add_flag("--verbose", verbose, "per-iteration JSON log on stderr");
    };

    auto* plaplace = app.add_subcommand("plaplace", "p-Laplace on the L-shape domain");
    add_common(plaplace);
    add_value(plaplace, "--alpha", "alpha", "power alpha > 1");
    add_value(plaplace, "--f", "f", "constant source");
    add_value(plaplace, "--levels", "levels", "levels, e.g. 1..4 or 1,3");

    auto* hyper = app.add_subcommand("hyper", "Neo-Hookean perforated square");
    add_common(hyper);
    add_value(hyper, "--level", "levels", "refinement level");
    add_value(hyper, "--levels", "levels", "levels, e.g. 0..2");
    add_value(hyper, "--E", "E", "Young modulus");
    add_value(hyper, "--nu", "nu", "Poisson ratio");
    add_value(hyper, "--fx", "fx", "body force x");
    add_value(hyper, "--fy", "fy", "body force y");

    auto* compare = app.add_subcommand("compare", "element comparison with J_ref errors");
    std::string spec_file;
    std::string compare_out;
    compare->add_option("--spec", spec_file, "key=value comparison spec")->required();
    compare->add_option("--out", compare_out, "output directory (overrides spec)");
    compare->add_flag("--verbose", verbose, "per-iteration JSON log on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (compare->parsed()) {
            hpmin::KeyValues values = read_config_file(spec_file);
            if (!compare_out.empty())
                values["out"] = compare_out;
            hpmin::CompareSpec spec = hpmin::parse_compare_spec(values);
            if (verbose)
                spec.base.log = &std::cerr;
            if (!spec.base.out_dir.empty())
                std::filesystem::create_directories(spec.base.out_dir);
            const auto rows = hpmin::compare_elements(spec);
            hpmin::write_compare_csv(std::cout, rows);
            for (const auto& r : rows)
                if (!r.row.converged)
                    return kSolverFailure;
            return 0;
        }

        hpmin::BenchConfig config;
        config.problem = hyper->parsed() ? hpmin::ProblemKind::hyperelasticity : hpmin::ProblemKind::plaplace;
        if (hyper->parsed())
            config.p = 3;
        if (!config_file.empty())
            hpmin::apply_config(config, read_config_file(config_file));
        hpmin::apply_config(config, overrides);
        config.validate();
        if (verbose)
            config.log = &std::cerr;
        if (!config.out_dir.empty())
            std::filesystem::create_directories(config.out_dir);

        const auto rows = config.problem == hpmin::ProblemKind::plaplace ? hpmin::run_plaplace(config)
                                                                         : hpmin::run_hyperelasticity(config);
        return finish(rows);
    } catch (const hpmin::ConfigError& e) {
        std::cerr << "hpmin: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "hpmin: " << e.what() << '\n';
        return kSolverFailure;
    }
}
