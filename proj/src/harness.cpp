#include "surfdg/harness.hpp"

#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

namespace surfdg {

namespace {

using Clock = std::chrono::steady_clock;

double sum_sequential(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s;
}

std::string format_g6(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_g6(*v) : std::string();
}

SurfaceMesh seed_mesh(const RunConfig& config, const LevelSetSurface& surface)
{
    if (config.seed == "icosahedron") {
        return initial_mesh(surface, SeedKind::Icosahedron, config.seed_level);
    }
    if (config.seed == "octahedron") {
        return initial_mesh(surface, SeedKind::Octahedron, config.seed_level);
    }
    return initial_mesh(surface, std::filesystem::path(config.seed));
}

std::vector<int> marked_elements(const SurfaceMesh& mesh, const RunConfig& config, int step)
{
    std::vector<int> marked;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        bool mark = true;
        if (config.marking == "halfspace-x" && step == 1) {
            const auto p = mesh.corners(static_cast<int>(t));
            mark = (p[0][0] + p[1][0] + p[2][0]) > 0.0;
        }
        if (mark) {
            marked.push_back(static_cast<int>(t));
        }
    }
    return marked;
}

SurfaceMesh refine_step(const SurfaceMesh& mesh, const RunConfig& config,
                        const LevelSetSurface& surface, int step)
{
    if (!config.nonconforming) {
        return refine_uniform(mesh, surface);
    }
    return refine_nonconforming(mesh, marked_elements(mesh, config, step), surface);
}

template <class Fn>
auto staged(const char* stage, int level, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const SolverBreakdown&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, level, e.what());
    }
}

PenaltyParams penalty_of(const RunConfig& config)
{
    PenaltyParams p;
    p.sigma = config.sigma;
    p.mode = config.penalty_mode;
    p.omega = config.omega;
    return p;
}

std::string default_solver(ConormalChoice choice)
{
    return choice == ConormalChoice::Planar ? "bicgstab" : "cg";
}

} // namespace

StageError::StageError(std::string stage, int level, const std::string& what)
    : Error("[" + stage + ", level " + std::to_string(level) + "] " + what),
      stage_(std::move(stage)), level_(level)
{
}

double ErrorNorms::broken_h1() const
{
    return std::sqrt(l2 * l2 + h1_semi * h1_semi);
}

double ErrorNorms::dg() const
{
    return std::sqrt(l2 * l2 + h1_semi * h1_semi + jump * jump);
}

ErrorNorms compute_errors(const DgFunction& u_h, const TestProblem& problem)
{
    if (!u_h.space) {
        throw InvalidArgument("DG function without a space");
    }
    const DgSpace& space = *u_h.space;
    const SurfaceMesh& mesh = space.mesh();
    const int degree = space.degree();
    const int n = space.dofs_per_element();
    const auto& rule = triangle_quadrature(6);
    std::vector<double> l2(space.num_elements());
    std::vector<double> h1(space.num_elements());
    detail::parallel_for(space.num_elements(), [&](std::size_t e) {
        const auto& geo = space.geometry(e);
        const auto c = u_h.coefficients.segment(static_cast<Eigen::Index>(space.dof(e, 0)), n);
        double a = 0.0;
        double b = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double w = 2.0 * geo.area * rule.weights[q];
            const ExactTrace ex = exact_u_on_gammah(problem, geo.map(rule.points[q]));
            const double uh = basis_eval(degree, rule.points[q]).dot(c);
            const Vec3 grad_uh = tangential_basis_gradient(geo, degree, rule.points[q]) * c;
            const Vec3 g = ex.tangential_gradient;
            const Vec3 g_plane = g - g.dot(geo.normal) * geo.normal;
            a += w * (ex.value - uh) * (ex.value - uh);
            b += w * (g_plane - grad_uh).squaredNorm();
        }
        l2[e] = a;
        h1[e] = b;
    });

    const auto& edges = mesh.edges();
    const auto& seg = segment_quadrature(7);
    std::vector<double> jump(edges.size());
    detail::parallel_for(edges.size(), [&](std::size_t id) {
        const auto& is = edges[id];
        const auto cm = u_h.coefficients.segment(
            static_cast<Eigen::Index>(space.dof(is.minus_element, 0)), n);
        const auto cp = u_h.coefficients.segment(
            static_cast<Eigen::Index>(space.dof(is.plus_element, 0)), n);
        double s = 0.0;
        for (std::size_t q = 0; q < seg.points.size(); ++q) {
            const double t = seg.points[q];
            Vec3 bm = (1.0 - t) * is.bary_minus[0] + t * is.bary_minus[1];
            Vec3 bp = (1.0 - t) * is.bary_plus[0] + t * is.bary_plus[1];
            bm /= bm.sum();
            bp /= bp.sum();
            const double d = basis_eval(degree, bm).dot(cm) - basis_eval(degree, bp).dot(cp);
            s += seg.weights[q] * is.length * d * d;
        }
        jump[id] = s / is.length;
    });

    ErrorNorms norms;
    norms.l2 = std::sqrt(sum_sequential(l2));
    norms.h1_semi = std::sqrt(sum_sequential(h1));
    norms.jump = std::sqrt(sum_sequential(jump));
    return norms;
}

double compute_l2_error(const DgFunction& u_h, const TestProblem& problem)
{
    return compute_errors(u_h, problem).l2;
}

double compute_dg_error(const DgFunction& u_h, const TestProblem& problem)
{
    return compute_errors(u_h, problem).dg();
}

std::vector<std::optional<double>> compute_eoc(const std::vector<double>& errors,
                                               const std::vector<double>& hs)
{
    if (errors.size() != hs.size()) {
        throw InvalidArgument("compute_eoc: errors and mesh sizes differ in length");
    }
    std::vector<std::optional<double>> eoc(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double e0 = errors[k - 1];
        const double e1 = errors[k];
        const double h0 = hs[k - 1];
        const double h1 = hs[k];
        if (e0 > 0.0 && e1 > 0.0 && h0 > 0.0 && h1 > 0.0 && h0 != h1 && std::isfinite(e0) &&
            std::isfinite(e1)) {
            eoc[k] = std::log(e0 / e1) / std::log(h0 / h1);
        }
    }
    return eoc;
}

std::string RunConfig::solver_name() const
{
    return solver.empty() ? default_solver(choice) : solver;
}

RunConfig parse_config(const std::string& json_text)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("invalid JSON configuration: ") + e.what());
    }
    if (!j.is_object()) {
        throw InvalidArgument("configuration must be a JSON object");
    }
    static const std::set<std::string> known{
        "surface",  "choice",      "degree",        "refinements", "seed",    "seed_level",
        "sigma",    "penalty_mode", "omega",        "solver",      "tol",     "max_iter",
        "preconditioner", "forcing", "nonconforming", "marking", "output_csv", "output_vtk",
        "verbose"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw InvalidArgument("unknown configuration key '" + item.key() + "'");
        }
    }
    RunConfig c;
    try {
        c.surface = j.value("surface", c.surface);
        if (j.contains("choice")) {
            const auto& v = j["choice"];
            c.choice = parse_choice(v.is_string() ? v.get<std::string>()
                                                  : std::to_string(v.get<int>()));
        }
        c.degree = j.value("degree", c.degree);
        c.refinements = j.value("refinements", c.refinements);
        c.seed = j.value("seed", c.seed);
        c.seed_level = j.value("seed_level", c.seed_level);
        c.sigma = j.value("sigma", c.sigma);
        if (j.contains("penalty_mode")) {
            const auto mode = j["penalty_mode"].get<std::string>();
            if (mode == "global") {
                c.penalty_mode = PenaltyMode::Global;
            } else if (mode == "per-intersection") {
                c.penalty_mode = PenaltyMode::PerIntersection;
            } else {
                throw InvalidArgument("penalty_mode must be \"global\" or \"per-intersection\"");
            }
        }
        if (j.contains("omega") && !j["omega"].is_null()) {
            c.omega = j["omega"].get<double>();
        }
        c.solver = j.value("solver", c.solver);
        c.tol = j.value("tol", c.tol);
        c.max_iter = j.value("max_iter", c.max_iter);
        if (j.contains("preconditioner")) {
            const auto p = j["preconditioner"].get<std::string>();
            if (p == "jacobi") {
                c.precond = Preconditioner::Jacobi;
            } else if (p == "none") {
                c.precond = Preconditioner::None;
            } else {
                throw InvalidArgument("preconditioner must be \"jacobi\" or \"none\"");
            }
        }
        if (j.contains("forcing")) {
            const auto f = j["forcing"].get<std::string>();
            if (f == "analytic") {
                c.forcing = ForcingMode::Analytic;
            } else if (f == "generic") {
                c.forcing = ForcingMode::GenericLaplaceBeltrami;
            } else {
                throw InvalidArgument("forcing must be \"analytic\" or \"generic\"");
            }
        }
        c.nonconforming = j.value("nonconforming", c.nonconforming);
        c.marking = j.value("marking", c.marking);
        c.output_csv = j.value("output_csv", c.output_csv);
        c.output_vtk = j.value("output_vtk", c.output_vtk);
        c.verbose = j.value("verbose", c.verbose);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("configuration has a value of the wrong type: ") +
                              e.what());
    }
    if (c.degree != 1 && c.degree != 2) {
        throw InvalidArgument("degree must be 1 or 2");
    }
    if (c.refinements < 0 || c.seed_level < 0) {
        throw InvalidArgument("refinements and seed_level must be non-negative");
    }
    if (!(c.sigma >= 1.0)) {
        throw InvalidArgument("sigma must be at least 1");
    }
    if (!(c.tol > 0.0)) {
        throw InvalidArgument("tol must be positive");
    }
    if (!c.solver.empty() && c.solver != "cg" && c.solver != "bicgstab") {
        throw InvalidArgument("solver must be \"cg\" or \"bicgstab\"");
    }
    if (c.marking != "halfspace-x" && c.marking != "all") {
        throw InvalidArgument("marking must be \"halfspace-x\" or \"all\"");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read configuration " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::optional<double> ConvergenceReport::terminal_l2_eoc() const
{
    return rows.empty() ? std::nullopt : rows.back().l2_eoc;
}

std::optional<double> ConvergenceReport::terminal_dg_eoc() const
{
    return rows.empty() ? std::nullopt : rows.back().dg_eoc;
}

std::vector<SurfaceMesh> build_ladder(const RunConfig& config, const LevelSetSurface& surface)
{
    std::vector<SurfaceMesh> ladder;
    ladder.push_back(seed_mesh(config, surface));
    for (int step = 1; step <= config.refinements; ++step) {
        ladder.push_back(refine_step(ladder.back(), config, surface, step));
    }
    return ladder;
}

LevelSolution solve_level(const DgSpace& space, const TestProblem& problem, const RunConfig& config)
{
    LevelSolution out;
    out.system.matrix = assemble_system(space, config.choice, penalty_of(config));
    out.system.rhs = assemble_rhs(space, problem.surface, problem.f);
    SolverOptions opts;
    opts.tol = config.tol;
    opts.max_iter = config.max_iter;
    opts.precond = config.precond;
    out.solve = config.solver_name() == "cg" ? cg(out.system, opts) : bicgstab(out.system, opts);
    return out;
}

ConvergenceReport run_convergence(const RunConfig& config)
{
    ConvergenceReport report;
    report.surface = config.surface;
    report.choice = to_string(config.choice);
    report.degree = config.degree;
    report.sigma = config.sigma;
    report.solver = config.solver_name();
    report.tol = config.tol;

    const TestProblem problem =
        staged("setup", 0, [&] { return make_problem(config.surface, config.forcing); });
    SurfaceMesh mesh = staged("mesh", 0, [&] { return seed_mesh(config, problem.surface); });
    std::vector<double> l2;
    std::vector<double> dg;
    std::vector<double> hs;
    std::optional<DgFunction> last_solution;
    std::optional<DgSpace> last_space;

    for (int level = 0; level <= config.refinements; ++level) {
        if (level > 0) {
            mesh = staged("mesh", level,
                          [&] { return refine_step(mesh, config, problem.surface, level); });
        }
        const auto start = Clock::now();
        last_solution.reset();
        last_space.emplace(mesh, config.degree);
        const DgSpace& space = *last_space;
        LevelSolution sol;
        try {
            sol = staged("solve", level, [&] { return solve_level(space, problem, config); });
        } catch (const SolverBreakdown& e) {
            report.non_convergent = true;
            report.diagnostic = "level " + std::to_string(level) + ": " + e.what();
            break;
        }
        if (!sol.solve.converged) {
            report.non_convergent = true;
            report.diagnostic = "level " + std::to_string(level) + ": solver stopped after " +
                                std::to_string(sol.solve.iterations) +
                                " iterations at relative residual " +
                                format_g6(sol.solve.final_relative_residual);
            break;
        }
        DgFunction u_h(space, std::move(sol.solve.solution));
        const ErrorNorms norms =
            staged("errors", level, [&] { return compute_errors(u_h, problem); });

        ConvergenceRow row;
        row.elements = mesh.num_triangles();
        row.h = mesh_width(mesh);
        row.norms = norms;
        row.l2_error = norms.l2;
        row.dg_error = norms.dg();
        row.iterations = sol.solve.iterations;
        row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        l2.push_back(row.l2_error);
        dg.push_back(row.dg_error);
        hs.push_back(row.h);
        const auto l2_eoc = compute_eoc(l2, hs);
        const auto dg_eoc = compute_eoc(dg, hs);
        row.l2_eoc = l2_eoc.back();
        row.dg_eoc = dg_eoc.back();
        report.rows.push_back(row);
        last_solution.emplace(std::move(u_h));
        if (config.verbose) {
            std::cerr << "level " << level << ": elements " << row.elements << ", h "
                      << format_g6(row.h) << ", L2 " << format_g6(row.l2_error) << " ("
                      << format_optional(row.l2_eoc) << "), DG " << format_g6(row.dg_error)
                      << " (" << format_optional(row.dg_eoc) << "), " << row.iterations
                      << " iterations, " << format_g6(row.seconds) << " s\n";
        }
    }
    if (!report.non_convergent) {
        const auto eoc = report.terminal_l2_eoc();
        if (eoc && *eoc < 1.0) {
            report.non_convergent = true;
            report.diagnostic = "terminal L2 EOC " + format_g6(*eoc) + " below 1";
        }
    }
    staged("output", config.refinements, [&] {
        if (!config.output_csv.empty()) {
            write_csv(report, std::filesystem::path(config.output_csv));
        }
        if (!config.output_vtk.empty() && last_solution) {
            export_vtk(mesh, *last_solution, std::filesystem::path(config.output_vtk));
        }
        return 0;
    });
    return report;
}

ChoiceComparison compare_choices(const RunConfig& config, const std::vector<ConormalChoice>& choices)
{
    if (choices.size() < 2) {
        throw InvalidArgument("compare_choices needs at least two choices");
    }
    ChoiceComparison table;
    std::vector<ConormalChoice> list = choices;
    if (std::find(list.begin(), list.end(), ConormalChoice::Analysis) == list.end()) {
        list.push_back(ConormalChoice::Analysis);
    }
    const std::size_t ref = static_cast<std::size_t>(
        std::find(list.begin(), list.end(), ConormalChoice::Analysis) - list.begin());
    for (auto c : list) {
        table.choices.push_back(to_string(c));
    }
    table.l2_errors.resize(list.size());
    table.dg_errors.resize(list.size());

    const TestProblem problem = make_problem(config.surface, config.forcing);
    SurfaceMesh mesh = staged("mesh", 0, [&] { return seed_mesh(config, problem.surface); });
    for (int level = 0; level <= config.refinements; ++level) {
        if (level > 0) {
            mesh = staged("mesh", level,
                          [&] { return refine_step(mesh, config, problem.surface, level); });
        }
        const DgSpace space(mesh, config.degree);
        table.elements.push_back(mesh.num_triangles());
        table.h.push_back(mesh_width(mesh));
        for (std::size_t i = 0; i < list.size(); ++i) {
            RunConfig c = config;
            c.choice = list[i];
            if (list[i] == ConormalChoice::Planar || config.solver.empty()) {
                c.solver = default_solver(list[i]);
            }
            const LevelSolution sol =
                staged("solve", level, [&] { return solve_level(space, problem, c); });
            if (!sol.solve.converged) {
                throw StageError("solve", level,
                                 "choice " + table.choices[i] + " did not converge");
            }
            const DgFunction u_h(space, sol.solve.solution);
            const ErrorNorms norms =
                staged("errors", level, [&] { return compute_errors(u_h, problem); });
            table.l2_errors[i].push_back(norms.l2);
            table.dg_errors[i].push_back(norms.dg());
        }
    }
    table.l2_ratio.resize(list.size());
    table.dg_ratio.resize(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t k = 0; k < table.h.size(); ++k) {
            table.l2_ratio[i].push_back(table.l2_errors[i][k] / table.l2_errors[ref][k]);
            table.dg_ratio[i].push_back(table.dg_errors[i][k] / table.dg_errors[ref][k]);
        }
    }
    return table;
}

void write_csv(const ConvergenceReport& report, std::ostream& out)
{
    out << "elements,h,l2_error,l2_eoc,dg_error,dg_eoc\n";
    for (const auto& row : report.rows) {
        out << row.elements << ',' << format_g6(row.h) << ',' << format_g6(row.l2_error) << ','
            << format_optional(row.l2_eoc) << ',' << format_g6(row.dg_error) << ','
            << format_optional(row.dg_eoc) << '\n';
    }
}

void write_csv(const ConvergenceReport& report, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_csv(report, out);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_comparison_csv(const ChoiceComparison& table, std::ostream& out)
{
    out << "elements,h";
    for (const auto& c : table.choices) {
        out << ",l2_ratio_" << c << ",dg_ratio_" << c;
    }
    out << '\n';
    for (std::size_t k = 0; k < table.h.size(); ++k) {
        out << table.elements[k] << ',' << format_g6(table.h[k]);
        for (std::size_t i = 0; i < table.choices.size(); ++i) {
            out << ',' << format_g6(table.l2_ratio[i][k]) << ',' << format_g6(table.dg_ratio[i][k]);
        }
        out << '\n';
    }
}

void export_vtk(const SurfaceMesh& mesh, const DgFunction& u_h, std::ostream& out)
{
    if (!u_h.space || u_h.space->num_elements() != mesh.num_triangles()) {
        throw InvalidArgument("DG function does not live on this mesh");
    }
    const DgSpace& space = *u_h.space;
    const int n = space.dofs_per_element();
    const auto& rule = triangle_quadrature(4);

    std::vector<double> vertex_sum(mesh.num_vertices(), 0.0);
    std::vector<int> vertex_count(mesh.num_vertices(), 0);
    std::vector<double> cell_mean(mesh.num_triangles(), 0.0);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto c = u_h.coefficients.segment(static_cast<Eigen::Index>(space.dof(t, 0)), n);
        for (int k = 0; k < 3; ++k) {
            vertex_sum[tri[k]] += c[k];
            ++vertex_count[tri[k]];
        }
        double mean = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            mean += 2.0 * rule.weights[q] * basis_eval(space.degree(), rule.points[q]).dot(c);
        }
        cell_mean[t] = mean;
    }

    out << "# vtk DataFile Version 3.0\nsurfdg solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out.precision(17);
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices()) {
        out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
    out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& tri : mesh.triangles()) {
        out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
    out << "CELL_TYPES " << mesh.num_triangles() << '\n';
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        out << "5\n";
    }
    out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS u_h double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        out << (vertex_count[v] ? vertex_sum[v] / vertex_count[v] : 0.0) << '\n';
    }
    out << "CELL_DATA " << mesh.num_triangles()
        << "\nSCALARS u_h_mean double 1\nLOOKUP_TABLE default\n";
    for (double m : cell_mean) {
        out << m << '\n';
    }
}

void export_vtk(const SurfaceMesh& mesh, const DgFunction& u_h, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    export_vtk(mesh, u_h, out);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace surfdg
