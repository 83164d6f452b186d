#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "surfdg/errors.hpp"
#include "surfdg/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace surfdg;

namespace {

Vec3 random_direction(std::mt19937& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 d(n(rng), n(rng), n(rng));
    return d.normalized();
}

// Surface point along a random ray, pushed off by t along the normal.
Vec3 tube_point(const LevelSetSurface& s, std::mt19937& rng, double delta)
{
    std::uniform_real_distribution<double> u(-delta, delta);
    const Vec3 p = radial_surface_point(s, random_direction(rng));
    return p + u(rng) * grad_phi(s, p).normalized();
}

} // namespace

TEST_CASE("sphere projection of an outside and an inside point")
{
    const auto s = make_sphere_surface();
    for (const Vec3& x0 : {Vec3(2, 0, 0), Vec3(0.5, 0, 0)}) {
        const auto a = project_first_order(s, x0);
        const auto b = project_newton(s, x0);
        CHECK((a.point - Vec3(1, 0, 0)).norm() < 1e-10);
        CHECK((b.point - Vec3(1, 0, 0)).norm() < 1e-10);
        CHECK((a.normal - Vec3(1, 0, 0)).norm() < 1e-10);
        CHECK((b.normal - Vec3(1, 0, 0)).norm() < 1e-10);
    }
}

TEST_CASE("point on the surface is a fixed point")
{
    const auto s = make_sphere_surface();
    const Vec3 x0 = Vec3(1, 2, 2) / 3.0;
    const auto r = project_first_order(s, x0);
    CHECK(r.iterations == 0);
    CHECK((r.point - x0).norm() == 0.0);
}

TEST_CASE("stopping residual is evaluated literally")
{
    const auto s = make_sphere_surface();
    CHECK(stopping_residual(s, Vec3(1, 0, 0), Vec3(2, 0, 0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(stopping_residual(s, Vec3(1, 0, 0), Vec3(0.5, 0, 0)) == doctest::Approx(0.0));
    CHECK(stopping_residual(s, Vec3(1, 0, 0), Vec3(1, 0, 0)) == 0.0);
    // Pure distance part when x = x0.
    CHECK(stopping_residual(s, Vec3(2, 0, 0), Vec3(2, 0, 0)) == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("critical points and invalid input are reported")
{
    const auto s = make_sphere_surface();
    CHECK_THROWS_AS(grad_phi(s, Vec3::Zero()), DegenerateGradient);
    CHECK_THROWS_AS(project_first_order(s, Vec3::Zero()), DegenerateGradient);
    CHECK_THROWS_AS(project_first_order(s, Vec3(2, 0, 0), 0.0), InvalidArgument);

    LevelSetSurface bad;
    bad.phi = [](const Vec3&) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(eval_phi(bad, Vec3(1, 0, 0)), EvaluationError);
    CHECK_THROWS_AS(make_surface("torus"), InvalidArgument);
}

TEST_CASE("a level set without zeros cannot be projected onto")
{
    LevelSetSurface s;
    s.phi = [](const Vec3& x) { return x.squaredNorm() + 1.0; };
    CHECK_THROWS_AS(project_first_order(s, Vec3(1, 0.5, 0.2)), Error);
}

TEST_CASE("finite-difference gradient and Hessian of phi")
{
    auto s = make_dziuk_surface();
    const Vec3 x(0.3, -0.4, 0.7);
    LevelSetSurface fd;
    fd.phi = s.phi;
    CHECK((grad_phi(fd, x) - grad_phi(s, x)).norm() < 1e-8);
    CHECK((hess_phi(fd, x) - hess_phi(s, x)).norm() < 1e-5);
}

TEST_CASE("Dziuk analytic normal is unit and parallel to grad phi on the surface")
{
    const auto s = make_dziuk_surface();
    std::mt19937 rng(7);
    for (int k = 0; k < 50; ++k) {
        const Vec3 p = radial_surface_point(s, random_direction(rng));
        const Vec3 n = s.analytic_normal(p);
        CHECK(std::abs(n.norm() - 1.0) < 1e-12);
        CHECK((n - grad_phi(s, p).normalized()).norm() < 1e-12);
    }
}

TEST_CASE("projection suite: both algorithms agree on tube points")
{
    struct Case {
        const char* name;
        double delta;
    };
    for (const Case c : {Case{"sphere", 0.1}, Case{"dziuk", 0.05}, Case{"enzensberger-stern", 0.01}}) {
        CAPTURE(c.name);
        const auto s = make_surface(c.name);
        std::mt19937 rng(42);
        for (int k = 0; k < 100; ++k) {
            const Vec3 x0 = tube_point(s, rng, c.delta);
            const auto a = project_first_order(s, x0);
            const auto b = project_newton(s, x0);
            const double phi_a = std::abs(eval_phi(s, a.point)) / grad_phi(s, a.point).norm();
            const double phi_b = std::abs(eval_phi(s, b.point)) / grad_phi(s, b.point).norm();
            CHECK(((a.residual < 1e-10) || (a.normal_check_dropped && phi_a < 1e-10)));
            CHECK(((b.residual < 1e-10) || (b.normal_check_dropped && phi_b < 1e-10)));
            CHECK((a.point - b.point).norm() < 1e-8);
        }
    }
}

TEST_CASE("projection normal agrees with the normal of the projected point")
{
    const auto s = make_dziuk_surface();
    std::mt19937 rng(3);
    for (int k = 0; k < 30; ++k) {
        const Vec3 x0 = tube_point(s, rng, 0.05);
        const auto r = project_first_order(s, x0);
        CHECK((r.normal - s.analytic_normal(r.point)).norm() < 1e-8);
        CHECK((approx_normal(s, x0) - s.analytic_normal(r.point)).norm() < 1e-8);
    }
}

TEST_CASE("grad_normal trace equals the mean curvature")
{
    const auto sphere = make_sphere_surface(2.0);
    const Vec3 p = Vec3(1, -1, 1).normalized() * 2.0;
    CHECK(grad_normal(sphere, p).trace() == doctest::Approx(1.0).epsilon(1e-6));

    // Oracle: divergence of grad phi / |grad phi| from the analytic gradient.
    const auto s = make_dziuk_surface();
    std::mt19937 rng(11);
    for (int k = 0; k < 20; ++k) {
        const Vec3 x = radial_surface_point(s, random_direction(rng));
        const double h = 1e-5;
        double div = 0.0;
        for (int j = 0; j < 3; ++j) {
            Vec3 xp = x;
            Vec3 xm = x;
            xp[j] += h;
            xm[j] -= h;
            div += (s.grad_phi(xp).normalized()[j] - s.grad_phi(xm).normalized()[j]) / (2 * h);
        }
        CHECK(grad_normal(s, x).trace() == doctest::Approx(div).epsilon(1e-5));
    }
}

TEST_CASE("Laplace-Beltrami of x1 x2 on the unit sphere is -6 x1 x2")
{
    const auto s = make_sphere_surface();
    ScalarField3 u;
    u.value = [](const Vec3& x) { return x[0] * x[1]; };
    std::mt19937 rng(5);
    for (int k = 0; k < 20; ++k) {
        const Vec3 p = random_direction(rng);
        CHECK(laplace_beltrami_levelset(s, u, p) == doctest::Approx(-6 * p[0] * p[1]).epsilon(1e-6));
    }
    CHECK_THROWS_AS(laplace_beltrami_levelset(s, u, Vec3(1.1, 0, 0)), InvalidArgument);
}

TEST_CASE("field derivatives fall back to central differences")
{
    const auto s = make_sphere_surface();
    ScalarField3 u;
    u.value = [](const Vec3& x) { return x[0] * x[0] * x[1] + x[2]; };
    const Vec3 x(0.2, 0.3, -0.5);
    CHECK((field_gradient(s, u, x) - Vec3(2 * 0.2 * 0.3, 0.04, 1.0)).norm() < 1e-8);
    Mat3 H = Mat3::Zero();
    H(0, 0) = 2 * 0.3;
    H(0, 1) = H(1, 0) = 2 * 0.2;
    CHECK((field_hessian(s, u, x) - H).norm() < 1e-6);
}

TEST_CASE("Enzensberger-Stern surface is reachable along rays from the origin")
{
    const auto s = make_enzensberger_stern_surface();
    CHECK(eval_phi(s, Vec3::Zero()) < 0.0);
    std::mt19937 rng(9);
    for (int k = 0; k < 50; ++k) {
        const Vec3 p = radial_surface_point(s, random_direction(rng));
        CHECK(std::abs(eval_phi(s, p)) / grad_phi(s, p).norm() < 1e-12);
        CHECK(p.norm() > 0.7);
        CHECK(p.norm() < 2.2);
    }
}

TEST_CASE("plane projection is orthogonal projection")
{
    const auto s = make_plane_surface();
    const auto r = project_newton(s, Vec3(0.3, 0.4, -0.2));
    CHECK((r.point - Vec3(0.3, 0.4, 0)).norm() < 1e-14);
}
