#include "surfdg/problems.hpp"

#include "surfdg/errors.hpp"

namespace surfdg {

namespace {

ScalarField3 product_x1x2()
{
    ScalarField3 u;
    u.value = [](const Vec3& x) { return x[0] * x[1]; };
    u.gradient = [](const Vec3& x) -> Vec3 { return {x[1], x[0], 0.0}; };
    u.hessian = [](const Vec3&) -> Mat3 {
        Mat3 H = Mat3::Zero();
        H(0, 1) = H(1, 0) = 1.0;
        return H;
    };
    return u;
}

ScalarFn generic_forcing(const LevelSetSurface& surface, const ScalarField3& u)
{
    return [surface, u](const Vec3& x) {
        return field_value(u, x) - laplace_beltrami_levelset(surface, u, x);
    };
}

} // namespace

TestProblem make_problem(std::string_view name, std::optional<ForcingMode> forcing)
{
    TestProblem p;
    p.name = std::string(name);
    p.surface = make_surface(name);
    p.exact_u = product_x1x2();
    if (name == "sphere" && forcing.value_or(ForcingMode::Analytic) == ForcingMode::Analytic) {
        p.forcing_mode = ForcingMode::Analytic;
        p.f = [](const Vec3& x) { return 7.0 * x[0] * x[1]; };
    } else if (name == "plane") {
        p.forcing_mode = ForcingMode::Analytic;
        p.f = p.exact_u.value;
    } else {
        if (forcing == ForcingMode::Analytic) {
            throw InvalidArgument("no analytic forcing for surface '" + p.name + "'");
        }
        p.forcing_mode = ForcingMode::GenericLaplaceBeltrami;
        p.f = generic_forcing(p.surface, p.exact_u);
    }
    return p;
}

ExactTrace exact_u_on_gammah(const TestProblem& problem, const Vec3& x)
{
    const ProjectionResult proj = project_first_order(problem.surface, x);
    ExactTrace t;
    t.xi = proj.point;
    t.value = field_value(problem.exact_u, t.xi);
    const Vec3 nu = approx_normal(problem.surface, t.xi);
    const Vec3 g = field_gradient(problem.surface, problem.exact_u, t.xi);
    t.tangential_gradient = g - g.dot(nu) * nu;
    return t;
}

} // namespace surfdg
