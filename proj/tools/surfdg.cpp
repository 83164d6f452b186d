#include "surfdg/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace surfdg;

void print_report(const ConvergenceReport& report)
{
    std::printf("surface %s, choice %s, degree %d, sigma %g, solver %s, tol %g\n",
                report.surface.c_str(), report.choice.c_str(), report.degree, report.sigma,
                report.solver.c_str(), report.tol);
    std::printf("%10s %12s %14s %8s %14s %8s %8s\n", "elements", "h", "L2 error", "eoc",
                "DG error", "eoc", "its");
    for (const auto& r : report.rows) {
        auto eoc = [](const std::optional<double>& v) {
            char buf[32];
            if (v) {
                std::snprintf(buf, sizeof buf, "%8.2f", *v);
            } else {
                std::snprintf(buf, sizeof buf, "%8s", "-");
            }
            return std::string(buf);
        };
        std::printf("%10zu %12.6g %14.6g %s %14.6g %s %8zu\n", r.elements, r.h, r.l2_error,
                    eoc(r.l2_eoc).c_str(), r.dg_error, eoc(r.dg_eoc).c_str(), r.iterations);
    }
    if (report.non_convergent) {
        std::printf("non-convergent: %s\n", report.diagnostic.c_str());
    }
}

std::vector<ConormalChoice> parse_choice_list(const std::string& text)
{
    std::vector<ConormalChoice> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse_choice(item));
        }
    }
    return out;
}

nlohmann::json projection_json(const ProjectionResult& r)
{
    return {{"point", {r.point[0], r.point[1], r.point[2]}},
            {"normal", {r.normal[0], r.normal[1], r.normal[2]}},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"normal_check_dropped", r.normal_check_dropped}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interior penalty DG for -lap u + u = f on implicit surfaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string csv_path;
    std::string vtk_path;
    bool verbose = false;
    auto* run = app.add_subcommand("run", "Convergence study over a refinement ladder");
    run->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    run->add_option("--csv", csv_path, "Write the report as CSV (overrides output_csv)");
    run->add_option("--vtk", vtk_path, "Write the finest solution as VTK (overrides output_vtk)");
    run->add_flag("-v,--verbose", verbose, "Progress on stderr");

    std::string choices_text = "1,2,3,4";
    auto* compare = app.add_subcommand("compare", "Error ratios of several choices against Choice 2");
    compare->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    compare->add_option("--choices", choices_text, "Comma separated list, e.g. 1,3,4");

    std::string surface_name = "sphere";
    std::vector<double> point;
    double tol = kDefaultProjectionTol;
    int max_iter = kDefaultProjectionMaxIter;
    auto* project = app.add_subcommand("project", "Project one point with both algorithms");
    project->add_option("--surface", surface_name, "sphere, dziuk, enzensberger-stern or plane");
    project->add_option("point", point, "x y z")->required()->expected(3);
    project->add_option("--tol", tol, "Stopping tolerance");
    project->add_option("--max-iter", max_iter, "Iteration cap");

    std::string out_path;
    auto* exp = app.add_subcommand("export", "Solve the finest level of a configuration, write VTK");
    exp->add_option("config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    exp->add_option("-o,--output", out_path, "VTK file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunConfig config = load_config(config_path);
            if (!csv_path.empty()) {
                config.output_csv = csv_path;
            }
            if (!vtk_path.empty()) {
                config.output_vtk = vtk_path;
            }
            config.verbose = config.verbose || verbose;
            print_report(run_convergence(config));
        } else if (compare->parsed()) {
            const RunConfig config = load_config(config_path);
            const auto table = compare_choices(config, parse_choice_list(choices_text));
            write_comparison_csv(table, std::cout);
        } else if (project->parsed()) {
            const LevelSetSurface surface = make_surface(surface_name);
            const Vec3 x0(point[0], point[1], point[2]);
            nlohmann::json out;
            out["first_order"] = projection_json(project_first_order(surface, x0, tol, max_iter));
            out["newton"] = projection_json(project_newton(surface, x0, tol, max_iter));
            std::cout << out.dump(2) << '\n';
        } else if (exp->parsed()) {
            const RunConfig config = load_config(config_path);
            const TestProblem problem = make_problem(config.surface, config.forcing);
            const SurfaceMesh mesh = build_ladder(config, problem.surface).back();
            const DgSpace space(mesh, config.degree);
            LevelSolution sol = solve_level(space, problem, config);
            export_vtk(mesh, DgFunction(space, std::move(sol.solve.solution)),
                       std::filesystem::path(out_path));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
