#pragma once

#include "surfdg/assembly.hpp"
#include "surfdg/dgspace.hpp"
#include "surfdg/errors.hpp"
#include "surfdg/mesh.hpp"
#include "surfdg/problems.hpp"
#include "surfdg/solvers.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace surfdg {

/// Error raised inside run_convergence, tagged with the failing stage
/// ("mesh", "assemble", "solve", "errors", "output") and refinement level.
class StageError : public Error {
public:
    StageError(std::string stage, int level, const std::string& what);
    const std::string& stage() const noexcept { return stage_; }
    int level() const noexcept { return level_; }

private:
    std::string stage_;
    int level_;
};

/// Parts of e = u o xi - u_h on Gamma_h.
struct ErrorNorms {
    double l2 = 0.0;
    /// Broken gradient seminorm.
    double h1_semi = 0.0;
    /// (sum_e h_e^{-1} ||[u_h]||^2)^{1/2}
    double jump = 0.0;

    double broken_h1() const;
    double dg() const;
};

ErrorNorms compute_errors(const DgFunction& u_h, const TestProblem& problem);
double compute_l2_error(const DgFunction& u_h, const TestProblem& problem);
double compute_dg_error(const DgFunction& u_h, const TestProblem& problem);

/// eoc_k = ln(e_{k-1}/e_k) / ln(h_{k-1}/h_k) for k >= 1; entry 0 is empty, as
/// is every entry involving a non-positive error or step. Throws
/// InvalidArgument for mismatched lengths.
std::vector<std::optional<double>> compute_eoc(const std::vector<double>& errors,
                                               const std::vector<double>& hs);

struct RunConfig {
    std::string surface = "dziuk";
    ConormalChoice choice = ConormalChoice::Analysis;
    int degree = 1;
    int refinements = 5;
    /// "icosahedron", "octahedron" or a path to an OFF file.
    std::string seed = "icosahedron";
    int seed_level = 1;
    double sigma = 2.0;
    PenaltyMode penalty_mode = PenaltyMode::Global;
    std::optional<double> omega;
    /// "cg" or "bicgstab"; empty selects bicgstab for Choice 1 and cg otherwise.
    std::string solver;
    double tol = 1e-10;
    std::size_t max_iter = 0;
    Preconditioner precond = Preconditioner::Jacobi;
    std::optional<ForcingMode> forcing;
    bool nonconforming = false;
    /// "halfspace-x": the first refinement quadrisects the elements whose
    /// centroid has x1 > 0 and every later refinement quadrisects all
    /// elements, which keeps one hanging level. "all": every element.
    std::string marking = "halfspace-x";
    std::string output_csv;
    std::string output_vtk;
    bool verbose = false;

    std::string solver_name() const;
};

/// Parses the JSON configuration. Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

struct ConvergenceRow {
    std::size_t elements = 0;
    double h = 0.0;
    double l2_error = 0.0;
    std::optional<double> l2_eoc;
    double dg_error = 0.0;
    std::optional<double> dg_eoc;
    ErrorNorms norms;
    std::size_t iterations = 0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::string surface;
    std::string choice;
    int degree = 1;
    double sigma = 2.0;
    std::string solver;
    double tol = 1e-10;
    std::vector<ConvergenceRow> rows;
    /// The ladder stopped early (solver breakdown or no convergence) or the
    /// terminal L2 EOC fell below 1.
    bool non_convergent = false;
    std::string diagnostic;

    std::optional<double> terminal_l2_eoc() const;
    std::optional<double> terminal_dg_eoc() const;
};

/// Mesh ladder of the configuration: seed followed by `refinements` steps.
std::vector<SurfaceMesh> build_ladder(const RunConfig& config, const LevelSetSurface& surface);

struct LevelSolution {
    SparseSystem system;
    SolveReport solve;
};

/// Assemble and solve one level.
LevelSolution solve_level(const DgSpace& space, const TestProblem& problem, const RunConfig& config);

ConvergenceReport run_convergence(const RunConfig& config);

struct ChoiceComparison {
    std::vector<std::string> choices;
    std::vector<std::size_t> elements;
    std::vector<double> h;
    /// [choice][level]
    std::vector<std::vector<double>> l2_errors;
    std::vector<std::vector<double>> dg_errors;
    /// Err_choice / Err_2, [choice][level].
    std::vector<std::vector<double>> l2_ratio;
    std::vector<std::vector<double>> dg_ratio;
};

/// Needs at least two choices; Choice 2 is added as reference when absent.
ChoiceComparison compare_choices(const RunConfig& config, const std::vector<ConormalChoice>& choices);

void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_csv(const ConvergenceReport& report, const std::filesystem::path& path);
void write_comparison_csv(const ChoiceComparison& table, std::ostream& out);

/// Legacy ASCII VTK: vertex values averaged over the incident elements,
/// cell values are element means.
void export_vtk(const SurfaceMesh& mesh, const DgFunction& u_h, std::ostream& out);
void export_vtk(const SurfaceMesh& mesh, const DgFunction& u_h, const std::filesystem::path& path);

} // namespace surfdg
