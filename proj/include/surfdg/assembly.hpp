#pragma once

#include "surfdg/dgspace.hpp"
#include "surfdg/geometry.hpp"
#include "surfdg/mesh.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace surfdg {

/// Which vectors stand in for the surface conormals in the face terms.
///
///   Planar          (n-, n-, -n-)          non-symmetric
///   Analysis        (n-, n-,  n+)
///   Average         (m,  m,  -m), m = (n- - n+)/|n- - n+|
///   ArnoldModified  (n-, -n+, -n-)
///   ArnoldTrue      as ArnoldModified, penalty coupling weighted by n+ . n-
///
/// Triples are (n_D^-, n_e^-, n_e^+) as seen from the element being assembled.
enum class ConormalChoice { Planar, Analysis, Average, ArnoldModified, ArnoldTrue };

/// "1", "2", "3", "4", "4T".
ConormalChoice parse_choice(std::string_view tag);
std::string to_string(ConormalChoice choice);

struct ConormalTriple {
    Vec3 diagonal;
    Vec3 minus;
    Vec3 plus;
};

/// `n_minus` belongs to the element being assembled, `n_plus` to its neighbour.
ConormalTriple resolve_conormal_choice(ConormalChoice choice, const Vec3& n_minus,
                                       const Vec3& n_plus);

enum class PenaltyMode { Global, PerIntersection };

struct PenaltyParams {
    /// Safety factor on the coercivity bound.
    double sigma = 2.0;
    PenaltyMode mode = PenaltyMode::Global;
    /// Explicit omega for every intersection; overrides sigma and mode.
    std::optional<double> omega;
};

/// max over the two incident elements of (1/2) sum_{edges} |e|^2 / |K|, using
/// full element edges. For degree 2 the value is scaled by 2, the ratio of the
/// trace-inverse constants (p+1)(p+2)/2.
double penalty_lower_bound(const SurfaceMesh& mesh, const EdgeIntersection& e, int degree = 1);

/// omega per intersection. Throws PenaltyTooSmall if any omega is below its
/// bound.
std::vector<double> penalty_weights(const SurfaceMesh& mesh, int degree,
                                    const PenaltyParams& params);

/// Compressed sparse row matrix with strictly increasing columns per row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<std::size_t> columns;
    std::vector<double> values;

    std::size_t nonzeros() const noexcept { return values.size(); }
    /// y = A x
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    /// Stored value or 0.
    double at(std::size_t i, std::size_t j) const;
    Eigen::VectorXd diagonal() const;
    double max_abs() const;
    Eigen::MatrixXd to_dense() const;
};

struct SparseSystem {
    CsrMatrix matrix;
    Eigen::VectorXd rhs;
};

enum AssemblyTerm : unsigned {
    kVolumeTerms = 1u,
    kConsistencyTerms = 2u,
    kPenaltyTerms = 4u,
    kAllTerms = 7u,
};

struct AssemblyOptions {
    unsigned terms = kAllTerms;
    /// 0 selects the default: 4 (P1) or 6 (P2).
    int triangle_exactness = 0;
    /// 0 selects the default: 5 (3 Gauss points, P1) or 7 (4 points, P2).
    int segment_exactness = 0;
};

/// Interior penalty matrix. Every intersection is visited once and fills the
/// two diagonal and two off-diagonal element blocks.
CsrMatrix assemble_system(const DgSpace& space, ConormalChoice choice,
                          const PenaltyParams& penalty, const AssemblyOptions& options = {});

/// Load vector for f_h(x) = f(xi(x)): each quadrature point of a flat
/// triangle is projected onto the surface and f is evaluated there.
Eigen::VectorXd assemble_rhs(const DgSpace& space, const LevelSetSurface& surface,
                             const ScalarFn& f_on_surface, int triangle_exactness = 0);

/// max |A - A^T|.
double check_symmetry(const CsrMatrix& matrix);

void write_matrix_market(const CsrMatrix& matrix, const std::filesystem::path& path);

} // namespace surfdg
