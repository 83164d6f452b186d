#include "surfdg/dgspace.hpp"

#include "surfdg/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>

namespace surfdg {

namespace {

void check_degree(int degree)
{
    if (degree != 1 && degree != 2) {
        throw InvalidArgument("polynomial degree must be 1 or 2");
    }
}

void check_bary(const Vec3& b)
{
    if (std::abs(b.sum() - 1.0) > 1e-12 || b.minCoeff() < -1e-12) {
        throw InvalidArgument("invalid barycentric coordinates");
    }
}

// d N_i / d lambda_k, row i.
Eigen::Matrix<double, Eigen::Dynamic, 3, 0, kMaxLocalDofs, 3> basis_bary_derivatives(
    int degree, const Vec3& l)
{
    Eigen::Matrix<double, Eigen::Dynamic, 3, 0, kMaxLocalDofs, 3> d(dofs_per_element(degree), 3);
    d.setZero();
    if (degree == 1) {
        d(0, 0) = d(1, 1) = d(2, 2) = 1.0;
        return d;
    }
    for (int i = 0; i < 3; ++i) {
        d(i, i) = 4.0 * l[i] - 1.0;
    }
    for (int k = 0; k < 3; ++k) {
        const int a = k;
        const int b = (k + 1) % 3;
        d(3 + k, a) = 4.0 * l[b];
        d(3 + k, b) = 4.0 * l[a];
    }
    return d;
}

} // namespace

int dofs_per_element(int degree)
{
    check_degree(degree);
    return degree == 1 ? 3 : 6;
}

BasisValues basis_eval(int degree, const Vec3& l)
{
    check_degree(degree);
    check_bary(l);
    BasisValues v(dofs_per_element(degree));
    if (degree == 1) {
        v << l[0], l[1], l[2];
        return v;
    }
    v << l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1], 4.0 * l[1] * l[2], 4.0 * l[2] * l[0];
    return v;
}

std::vector<Vec3> lagrange_nodes(int degree)
{
    check_degree(degree);
    std::vector<Vec3> nodes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    if (degree == 2) {
        nodes.insert(nodes.end(), {Vec3{0.5, 0.5, 0}, Vec3{0, 0.5, 0.5}, Vec3{0.5, 0, 0.5}});
    }
    return nodes;
}

ElementGeometry element_geometry(const std::array<Vec3, 3>& v)
{
    ElementGeometry g;
    g.vertices = v;
    const Vec3 e1 = v[1] - v[0];
    const Vec3 e2 = v[2] - v[0];
    const Vec3 n = e1.cross(e2);
    g.area = 0.5 * n.norm();
    if (!(g.area > 1e-14)) {
        throw InvalidArgument("degenerate triangle");
    }
    g.normal = n.normalized();
    Eigen::Matrix<double, 3, 2> J;
    J << e1, e2;
    const Eigen::Matrix2d G = J.transpose() * J;
    const Eigen::Matrix<double, 3, 2> dual = J * G.inverse();
    g.grad_lambda[1] = dual.col(0);
    g.grad_lambda[2] = dual.col(1);
    g.grad_lambda[0] = -g.grad_lambda[1] - g.grad_lambda[2];
    return g;
}

BasisGradients tangential_basis_gradient(const ElementGeometry& geo, int degree, const Vec3& bary)
{
    check_bary(bary);
    const auto d = basis_bary_derivatives(degree, bary);
    BasisGradients grads(3, d.rows());
    for (int i = 0; i < d.rows(); ++i) {
        grads.col(i) = d(i, 0) * geo.grad_lambda[0] + d(i, 1) * geo.grad_lambda[1] +
                       d(i, 2) * geo.grad_lambda[2];
    }
    return grads;
}

BasisGradients tangential_basis_gradient(const std::array<Vec3, 3>& vertices, int degree,
                                         const Vec3& bary)
{
    return tangential_basis_gradient(element_geometry(vertices), degree, bary);
}

DgSpace::DgSpace(const SurfaceMesh& mesh, int degree)
    : mesh_(&mesh), degree_(degree), local_dofs_(surfdg::dofs_per_element(degree))
{
    geometry_.reserve(mesh.num_triangles());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        geometry_.push_back(element_geometry(mesh.corners(static_cast<int>(t))));
    }
}

DgFunction::DgFunction(const DgSpace& s, Eigen::VectorXd c) : space(&s), coefficients(std::move(c))
{
    if (static_cast<std::size_t>(coefficients.size()) != s.total_dofs()) {
        throw InvalidArgument("coefficient vector does not match the space");
    }
}

DgFunction::DgFunction(const DgSpace& s)
    : space(&s), coefficients(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.total_dofs())))
{
}

double evaluate(const DgFunction& f, std::size_t element, const Vec3& bary)
{
    const DgSpace& s = *f.space;
    if (element >= s.num_elements()) {
        throw InvalidArgument("element index out of range");
    }
    const BasisValues phi = basis_eval(s.degree(), bary);
    return phi.dot(f.coefficients.segment(static_cast<Eigen::Index>(s.dof(element, 0)),
                                          s.dofs_per_element()));
}

Vec3 evaluate_gradient(const DgFunction& f, std::size_t element, const Vec3& bary)
{
    const DgSpace& s = *f.space;
    if (element >= s.num_elements()) {
        throw InvalidArgument("element index out of range");
    }
    const BasisGradients g = tangential_basis_gradient(s.geometry(element), s.degree(), bary);
    return g * f.coefficients.segment(static_cast<Eigen::Index>(s.dof(element, 0)),
                                      s.dofs_per_element());
}

DgFunction interpolate(const DgSpace& space, const ScalarFn& g)
{
    DgFunction f(space);
    const auto nodes = lagrange_nodes(space.degree());
    for (std::size_t e = 0; e < space.num_elements(); ++e) {
        const auto& geo = space.geometry(e);
        for (int i = 0; i < space.dofs_per_element(); ++i) {
            const double v = g(geo.map(nodes[i]));
            if (!std::isfinite(v)) {
                throw EvaluationError("interpolated function is not finite");
            }
            f.coefficients[static_cast<Eigen::Index>(space.dof(e, i))] = v;
        }
    }
    return f;
}

DgFunction interpolate(const DgSpace& space, const ScalarField3& g)
{
    return interpolate(space, g.value);
}

} // namespace surfdg
