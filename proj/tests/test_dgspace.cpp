#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "surfdg/dgspace.hpp"
#include "surfdg/errors.hpp"

#include <cmath>

using namespace surfdg;

namespace {

double factorial(int n)
{
    return n <= 1 ? 1.0 : n * factorial(n - 1);
}

} // namespace

TEST_CASE("triangle rules integrate monomials up to their exactness")
{
    for (int exactness = 1; exactness <= 6; ++exactness) {
        const auto& rule = triangle_quadrature(exactness);
        CHECK(rule.exactness >= exactness);
        double wsum = 0.0;
        for (double w : rule.weights) {
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(0.5).epsilon(1e-15));
        for (int a = 0; a <= rule.exactness; ++a) {
            for (int b = 0; a + b <= rule.exactness; ++b) {
                double q = 0.0;
                for (std::size_t k = 0; k < rule.points.size(); ++k) {
                    q += rule.weights[k] * std::pow(rule.points[k][1], a) *
                         std::pow(rule.points[k][2], b);
                }
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                CAPTURE(exactness);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(std::abs(q - exact) < 1e-15);
            }
        }
    }
    CHECK_THROWS_AS(triangle_quadrature(7), InvalidArgument);
    CHECK_THROWS_AS(triangle_quadrature(0), InvalidArgument);
}

TEST_CASE("segment rules integrate powers up to their exactness")
{
    for (int exactness = 1; exactness <= 7; ++exactness) {
        const auto& rule = segment_quadrature(exactness);
        CHECK(rule.exactness >= exactness);
        for (int k = 0; k <= rule.exactness; ++k) {
            double q = 0.0;
            for (std::size_t i = 0; i < rule.points.size(); ++i) {
                q += rule.weights[i] * std::pow(rule.points[i], k);
            }
            CHECK(std::abs(q - 1.0 / (k + 1)) < 1e-15);
        }
    }
    CHECK(segment_quadrature(5).points.size() == 3);
    CHECK(segment_quadrature(7).points.size() == 4);
    CHECK_THROWS_AS(segment_quadrature(8), InvalidArgument);
}

TEST_CASE("Lagrange bases are nodal and sum to one")
{
    for (int degree : {1, 2}) {
        const auto nodes = lagrange_nodes(degree);
        CHECK(static_cast<int>(nodes.size()) == dofs_per_element(degree));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto phi = basis_eval(degree, nodes[i]);
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                CHECK(phi[static_cast<Eigen::Index>(j)] == doctest::Approx(i == j ? 1.0 : 0.0));
            }
        }
        const Vec3 b(0.2, 0.3, 0.5);
        CHECK(basis_eval(degree, b).sum() == doctest::Approx(1.0).epsilon(1e-15));
        const auto geo = element_geometry({Vec3(0, 0, 0), Vec3(2, 0, 1), Vec3(0, 1, 0)});
        CHECK(tangential_basis_gradient(geo, degree, b).rowwise().sum().norm() < 1e-14);
    }
    CHECK(basis_eval(2, Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3))[0] == doctest::Approx(-1.0 / 9));
    CHECK_THROWS_AS(basis_eval(3, Vec3(1, 0, 0)), InvalidArgument);
    CHECK_THROWS_AS(basis_eval(1, Vec3(0.5, 0.6, -0.1)), InvalidArgument);
    CHECK_THROWS_AS(basis_eval(1, Vec3(0.5, 0.6, 0.0)), InvalidArgument);
}

TEST_CASE("element geometry of a tilted triangle")
{
    const std::array<Vec3, 3> v{Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    const auto geo = element_geometry(v);
    CHECK(geo.area == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK((geo.normal - Vec3(1, 1, 1).normalized()).norm() < 1e-15);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(geo.grad_lambda[i].dot(geo.normal)) < 1e-14);
        for (int j = 0; j < 3; ++j) {
            // grad lambda_i . (v_j - v_0) = delta_ij - delta_i0
            const double expected = (i == j) - (i == 0);
            CHECK(geo.grad_lambda[i].dot(v[j] - v[0]) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    CHECK((geo.map(Vec3(0.2, 0.3, 0.5)) - Vec3(0.2, 0.3, 0.5)).norm() < 1e-15);
    CHECK_THROWS_AS(element_geometry({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}),
                    InvalidArgument);
}

TEST_CASE("interpolation reproduces polynomials of the space degree")
{
    const auto sphere = make_sphere_surface();
    const auto mesh = initial_mesh(sphere, SeedKind::Icosahedron, 1);
    const Vec3 a(0.3, -1.2, 0.7);
    const ScalarFn linear = [a](const Vec3& x) { return 2.0 + a.dot(x); };
    const ScalarFn quadratic = [](const Vec3& x) { return x[0] * x[1] - x[2] * x[2] + x[0]; };
    for (int degree : {1, 2}) {
        const DgSpace space(mesh, degree);
        CHECK(space.total_dofs() == mesh.num_triangles() * dofs_per_element(degree));
        CHECK(space.dof(3, 1) == static_cast<std::size_t>(3 * dofs_per_element(degree) + 1));
        const auto f = interpolate(space, degree == 1 ? linear : quadratic);
        for (std::size_t e = 0; e < space.num_elements(); e += 7) {
            const auto& geo = space.geometry(e);
            for (const Vec3& b : triangle_quadrature(4).points) {
                const Vec3 x = geo.map(b);
                CHECK(evaluate(f, e, b) == doctest::Approx((degree == 1 ? linear : quadratic)(x)));
                if (degree == 1) {
                    const Vec3 g = a - a.dot(geo.normal) * geo.normal;
                    CHECK((evaluate_gradient(f, e, b) - g).norm() < 1e-12);
                }
            }
        }
        CHECK_THROWS_AS(evaluate(f, space.num_elements(), Vec3(1, 0, 0)), InvalidArgument);
    }
    const DgSpace space(mesh, 1);
    CHECK_THROWS_AS(DgFunction(space, Eigen::VectorXd::Zero(5)), InvalidArgument);
}
