#pragma once

#include "surfdg/geometry.hpp"
#include "surfdg/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace surfdg {

inline constexpr int kMaxLocalDofs = 6;

using BasisValues = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxLocalDofs, 1>;
/// One column per local basis function.
using BasisGradients = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, kMaxLocalDofs>;

/// Triangle rule on the reference triangle in barycentric coordinates;
/// weights sum to 1/2.
struct TriangleRule {
    int exactness = 0;
    std::vector<Vec3> points;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct SegmentRule {
    int exactness = 0;
    std::vector<double> points;
    std::vector<double> weights;
};

/// Exactness 1: centroid, 2: 3 points, 3-4: 6 points, 5-6: 12 points.
const TriangleRule& triangle_quadrature(int exactness);
/// ceil((exactness + 1) / 2) Gauss points, exactness in [1, 7].
const SegmentRule& segment_quadrature(int exactness);

int dofs_per_element(int degree);

/// P1: the barycentric coordinates. P2: vertex functions then edge-midpoint
/// functions for edges (0,1), (1,2), (2,0).
BasisValues basis_eval(int degree, const Vec3& bary);

/// Barycentric coordinates of the local Lagrange nodes.
std::vector<Vec3> lagrange_nodes(int degree);

/// Per-element affine data on the flat triangle.
struct ElementGeometry {
    std::array<Vec3, 3> vertices;
    Vec3 normal = Vec3::Zero();
    double area = 0.0;
    /// Tangential gradients of the three barycentric coordinates.
    std::array<Vec3, 3> grad_lambda;

    Vec3 map(const Vec3& bary) const
    {
        return bary[0] * vertices[0] + bary[1] * vertices[1] + bary[2] * vertices[2];
    }
};

ElementGeometry element_geometry(const std::array<Vec3, 3>& vertices);

BasisGradients tangential_basis_gradient(const ElementGeometry& geo, int degree, const Vec3& bary);
BasisGradients tangential_basis_gradient(const std::array<Vec3, 3>& vertices, int degree,
                                         const Vec3& bary);

/// Fully discontinuous Lagrange space of degree 1 or 2 with element-major
/// numbering: dof(e, i) = e * dofs_per_element + i. Holds a reference to the
/// mesh, which must outlive it.
class DgSpace {
public:
    DgSpace(const SurfaceMesh& mesh, int degree);

    const SurfaceMesh& mesh() const noexcept { return *mesh_; }
    int degree() const noexcept { return degree_; }
    int dofs_per_element() const noexcept { return local_dofs_; }
    std::size_t num_elements() const noexcept { return geometry_.size(); }
    std::size_t total_dofs() const noexcept { return geometry_.size() * local_dofs_; }
    std::size_t dof(std::size_t element, int local) const { return element * local_dofs_ + local; }
    const ElementGeometry& geometry(std::size_t element) const { return geometry_.at(element); }

private:
    const SurfaceMesh* mesh_;
    int degree_;
    int local_dofs_;
    std::vector<ElementGeometry> geometry_;
};

struct DgFunction {
    const DgSpace* space = nullptr;
    Eigen::VectorXd coefficients;

    DgFunction() = default;
    DgFunction(const DgSpace& s, Eigen::VectorXd c);
    explicit DgFunction(const DgSpace& s);
};

double evaluate(const DgFunction& f, std::size_t element, const Vec3& bary);
Vec3 evaluate_gradient(const DgFunction& f, std::size_t element, const Vec3& bary);

/// Nodal interpolation at the Lagrange nodes of the flat triangles.
DgFunction interpolate(const DgSpace& space, const ScalarFn& g);
DgFunction interpolate(const DgSpace& space, const ScalarField3& g);

} // namespace surfdg
