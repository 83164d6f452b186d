#include "surfdg/assembly.hpp"

#include "parallel.hpp"
#include "surfdg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace surfdg {

namespace {

using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxLocalDofs,
                                  kMaxLocalDofs>;

Vec3 checked_unit(const Vec3& v, const char* what)
{
    if (std::abs(v.norm() - 1.0) > 1e-10) {
        throw InvalidArgument(std::string(what) + " is not a unit vector");
    }
    return v;
}

double element_bound(const SurfaceMesh& mesh, int t)
{
    const auto p = mesh.corners(t);
    const double edges = (p[1] - p[0]).squaredNorm() + (p[2] - p[1]).squaredNorm() +
                         (p[0] - p[2]).squaredNorm();
    const double area = mesh.area(t);
    if (!(area > 1e-14)) {
        throw InvalidArgument("degenerate element in penalty bound");
    }
    return 0.5 * edges / area;
}

// Element-block CSR layout: the rows of element e hold one dense block per
// coupled element, in ascending element order.
struct BlockLayout {
    int n = 0;
    std::vector<std::vector<int>> coupled;
    CsrMatrix matrix;

    BlockLayout(const DgSpace& space)
        : n(space.dofs_per_element()), coupled(space.num_elements())
    {
        const auto& mesh = space.mesh();
        for (std::size_t e = 0; e < coupled.size(); ++e) {
            auto& list = coupled[e];
            list.push_back(static_cast<int>(e));
            for (int id : mesh.element_edges(static_cast<int>(e))) {
                const auto& is = mesh.edges()[id];
                list.push_back(is.minus_element == static_cast<int>(e) ? is.plus_element
                                                                        : is.minus_element);
            }
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        auto& A = matrix;
        A.rows = A.cols = space.total_dofs();
        A.row_offsets.assign(A.rows + 1, 0);
        for (std::size_t e = 0; e < coupled.size(); ++e) {
            for (int i = 0; i < n; ++i) {
                const std::size_t row = e * n + i;
                A.row_offsets[row + 1] = A.row_offsets[row] + coupled[e].size() * n;
            }
        }
        A.columns.resize(A.row_offsets.back());
        A.values.assign(A.row_offsets.back(), 0.0);
        for (std::size_t e = 0; e < coupled.size(); ++e) {
            for (int i = 0; i < n; ++i) {
                std::size_t pos = A.row_offsets[e * n + i];
                for (int c : coupled[e]) {
                    for (int j = 0; j < n; ++j) {
                        A.columns[pos++] = static_cast<std::size_t>(c) * n + j;
                    }
                }
            }
        }
    }

    void add(int row_element, int col_element, const LocalMatrix& block)
    {
        const auto& list = coupled[row_element];
        const auto k = std::lower_bound(list.begin(), list.end(), col_element) - list.begin();
        for (int i = 0; i < n; ++i) {
            double* dst = matrix.values.data() +
                          matrix.row_offsets[static_cast<std::size_t>(row_element) * n + i] +
                          static_cast<std::size_t>(k) * n;
            for (int j = 0; j < n; ++j) {
                dst[j] += block(i, j);
            }
        }
    }
};

struct SideTrace {
    BasisValues values;
    BasisGradients gradients;
};

SideTrace side_trace(const DgSpace& space, int element, const std::array<Vec3, 2>& ends,
                     double s)
{
    Vec3 bary = (1.0 - s) * ends[0] + s * ends[1];
    bary /= bary.sum();
    return {basis_eval(space.degree(), bary),
            tangential_basis_gradient(space.geometry(element), space.degree(), bary)};
}

} // namespace

ConormalChoice parse_choice(std::string_view tag)
{
    if (tag == "1") {
        return ConormalChoice::Planar;
    }
    if (tag == "2") {
        return ConormalChoice::Analysis;
    }
    if (tag == "3") {
        return ConormalChoice::Average;
    }
    if (tag == "4") {
        return ConormalChoice::ArnoldModified;
    }
    if (tag == "4T" || tag == "4t") {
        return ConormalChoice::ArnoldTrue;
    }
    throw InvalidArgument("unknown conormal choice '" + std::string(tag) + "'");
}

std::string to_string(ConormalChoice choice)
{
    switch (choice) {
    case ConormalChoice::Planar:
        return "1";
    case ConormalChoice::Analysis:
        return "2";
    case ConormalChoice::Average:
        return "3";
    case ConormalChoice::ArnoldModified:
        return "4";
    case ConormalChoice::ArnoldTrue:
        return "4T";
    }
    return "?";
}

ConormalTriple resolve_conormal_choice(ConormalChoice choice, const Vec3& n_minus,
                                       const Vec3& n_plus)
{
    checked_unit(n_minus, "n_minus");
    checked_unit(n_plus, "n_plus");
    switch (choice) {
    case ConormalChoice::Planar:
        return {n_minus, n_minus, -n_minus};
    case ConormalChoice::Analysis:
        return {n_minus, n_minus, n_plus};
    case ConormalChoice::Average: {
        const Vec3 d = n_minus - n_plus;
        if (d.norm() < 1e-12) {
            return {n_minus, n_minus, n_plus};
        }
        const Vec3 m = d.normalized();
        return {m, m, -m};
    }
    case ConormalChoice::ArnoldModified:
    case ConormalChoice::ArnoldTrue:
        return {n_minus, -n_plus, -n_minus};
    }
    throw InvalidArgument("invalid conormal choice");
}

double penalty_lower_bound(const SurfaceMesh& mesh, const EdgeIntersection& e, int degree)
{
    const double scale = dofs_per_element(degree) / 3.0;
    return scale * std::max(element_bound(mesh, e.minus_element),
                            element_bound(mesh, e.plus_element));
}

std::vector<double> penalty_weights(const SurfaceMesh& mesh, int degree,
                                    const PenaltyParams& params)
{
    const auto& edges = mesh.edges();
    std::vector<double> bounds(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        bounds[i] = penalty_lower_bound(mesh, edges[i], degree);
    }
    std::vector<double> omega(edges.size());
    if (params.omega) {
        std::fill(omega.begin(), omega.end(), *params.omega);
    } else if (params.mode == PenaltyMode::Global) {
        const double max_bound = bounds.empty() ? 0.0 : *std::max_element(bounds.begin(), bounds.end());
        std::fill(omega.begin(), omega.end(), params.sigma * max_bound);
    } else {
        for (std::size_t i = 0; i < edges.size(); ++i) {
            omega[i] = params.sigma * bounds[i];
        }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (omega[i] < bounds[i]) {
            throw PenaltyTooSmall("penalty weight " + std::to_string(omega[i]) +
                                  " below the coercivity bound " + std::to_string(bounds[i]) +
                                  " on intersection " + std::to_string(i));
        }
    }
    return omega;
}

CsrMatrix assemble_system(const DgSpace& space, ConormalChoice choice,
                          const PenaltyParams& penalty, const AssemblyOptions& options)
{
    const auto& mesh = space.mesh();
    const int degree = space.degree();
    const int n = space.dofs_per_element();
    const std::vector<double> omega = penalty_weights(mesh, degree, penalty);
    BlockLayout layout(space);

    if (options.terms & kVolumeTerms) {
        const auto& rule =
            triangle_quadrature(options.triangle_exactness ? options.triangle_exactness
                                                           : (degree == 1 ? 4 : 6));
        detail::parallel_for(space.num_elements(), [&](std::size_t e) {
            const auto& geo = space.geometry(e);
            LocalMatrix local = LocalMatrix::Zero(n, n);
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double w = 2.0 * geo.area * rule.weights[q];
                const BasisValues phi = basis_eval(degree, rule.points[q]);
                const BasisGradients grad = tangential_basis_gradient(geo, degree, rule.points[q]);
                local.noalias() += w * (grad.transpose() * grad + phi * phi.transpose());
            }
            layout.add(static_cast<int>(e), static_cast<int>(e), local);
        });
    }

    if (options.terms & (kConsistencyTerms | kPenaltyTerms)) {
        const bool consistency = options.terms & kConsistencyTerms;
        const bool with_penalty = options.terms & kPenaltyTerms;
        const auto& rule =
            segment_quadrature(options.segment_exactness ? options.segment_exactness
                                                         : (degree == 1 ? 5 : 7));
        const auto& edges = mesh.edges();
        for (std::size_t id = 0; id < edges.size(); ++id) {
            const auto& is = edges[id];
            const double beta = omega[id] / is.length;
            const int elem[2] = {is.minus_element, is.plus_element};
            const Vec3 conormals[2] = {is.conormal_minus, is.conormal_plus};
            ConormalTriple triple[2];
            double coupling[2];
            for (int side = 0; side < 2; ++side) {
                triple[side] = resolve_conormal_choice(choice, conormals[side], conormals[1 - side]);
                coupling[side] = choice == ConormalChoice::ArnoldTrue
                                     ? conormals[0].dot(conormals[1])
                                     : -1.0;
            }
            LocalMatrix diag[2] = {LocalMatrix::Zero(n, n), LocalMatrix::Zero(n, n)};
            LocalMatrix off[2] = {LocalMatrix::Zero(n, n), LocalMatrix::Zero(n, n)};
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double w = rule.weights[q] * is.length;
                const SideTrace tr[2] = {side_trace(space, elem[0], is.bary_minus, rule.points[q]),
                                         side_trace(space, elem[1], is.bary_plus, rule.points[q])};
                for (int x = 0; x < 2; ++x) {
                    const int y = 1 - x;
                    const auto& own = tr[x];
                    const auto& other = tr[y];
                    if (consistency) {
                        const BasisValues g_diag = own.gradients.transpose() * triple[x].diagonal;
                        const BasisValues g_minus = own.gradients.transpose() * triple[x].minus;
                        const BasisValues g_plus = other.gradients.transpose() * triple[x].plus;
                        diag[x].noalias() -= 0.5 * w *
                                             (g_diag * own.values.transpose() +
                                              own.values * g_diag.transpose());
                        off[x].noalias() += 0.5 * w *
                                            (g_minus * other.values.transpose() +
                                             own.values * g_plus.transpose());
                    }
                    if (with_penalty) {
                        diag[x].noalias() += w * beta * own.values * own.values.transpose();
                        off[x].noalias() +=
                            w * beta * coupling[x] * own.values * other.values.transpose();
                    }
                }
            }
            for (int x = 0; x < 2; ++x) {
                layout.add(elem[x], elem[x], diag[x]);
                layout.add(elem[x], elem[1 - x], off[x]);
            }
        }
    }
    return std::move(layout.matrix);
}

Eigen::VectorXd assemble_rhs(const DgSpace& space, const LevelSetSurface& surface,
                             const ScalarFn& f_on_surface, int triangle_exactness)
{
    const int degree = space.degree();
    const int n = space.dofs_per_element();
    const auto& rule = triangle_quadrature(triangle_exactness ? triangle_exactness
                                                              : (degree == 1 ? 4 : 6));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.total_dofs()));
    detail::parallel_for(space.num_elements(), [&](std::size_t e) {
        const auto& geo = space.geometry(e);
        auto local = rhs.segment(static_cast<Eigen::Index>(space.dof(e, 0)), n);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec3 xi = project_first_order(surface, geo.map(rule.points[q])).point;
            const double f = f_on_surface(xi);
            if (!std::isfinite(f)) {
                throw EvaluationError("non-finite forcing value");
            }
            local += (2.0 * geo.area * rule.weights[q] * f) * basis_eval(degree, rule.points[q]);
        }
    });
    return rhs;
}

double check_symmetry(const CsrMatrix& A)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            worst = std::max(worst, std::abs(A.values[k] - A.at(A.columns[k], i)));
        }
    }
    return worst;
}

void write_matrix_market(const CsrMatrix& A, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.rows << ' ' << A.cols << ' ' << A.nonzeros() << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            out << i + 1 << ' ' << A.columns[k] + 1 << ' ' << A.values[k] << '\n';
        }
    }
}

} // namespace surfdg
