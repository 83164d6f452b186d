#include "surfdg/geometry.hpp"

#include "surfdg/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <vector>

namespace surfdg {

namespace {

constexpr double kZeroGradient = 1e-14;
constexpr double kCoincident = 1e-14;
constexpr int kStagnationWindow = 10;
constexpr double kStagnationDecrease = 1e-3;
constexpr int kSurfaceSteps = 50;

Vec3 unit(const Vec3& v) { return v / v.norm(); }

Vec3 raw_gradient(const LevelSetSurface& s, const Vec3& x)
{
    if (s.grad_phi) {
        return s.grad_phi(x);
    }
    const double h = s.fd_step;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (eval_phi(s, xp) - eval_phi(s, xm)) / (2.0 * h);
    }
    return g;
}

Vec3 checked_gradient(const LevelSetSurface& s, const Vec3& x)
{
    const Vec3 g = raw_gradient(s, x);
    if (!g.allFinite()) {
        throw EvaluationError("non-finite level-set gradient");
    }
    if (g.norm() < kZeroGradient) {
        throw DegenerateGradient("level-set gradient vanishes (critical point)");
    }
    return g;
}

double distance_term(const LevelSetSurface& s, const Vec3& x)
{
    return std::abs(eval_phi(s, x)) / checked_gradient(s, x).norm();
}

// Once the direction term is abandoned the iterate only has to reach the
// surface, so plain Newton steps on phi finish the projection.
Vec3 level_set_step(const LevelSetSurface& s, const Vec3& x)
{
    const Vec3 g = checked_gradient(s, x);
    return x - eval_phi(s, x) * g / g.squaredNorm();
}

double residual(const LevelSetSurface& s, const Vec3& x, const Vec3& x0, bool drop_direction)
{
    return drop_direction ? distance_term(s, x) : stopping_residual(s, x, x0);
}

// Bookkeeping shared by both projection algorithms: residual history,
// stagnation detection and the exit test.
class ProjectionMonitor {
public:
    ProjectionMonitor(const LevelSetSurface& s, const Vec3& x0, double tol)
        : s_(s), x0_(x0), tol_(tol)
    {
        if (!(tol > 0.0)) {
            throw InvalidArgument("projection tolerance must be positive");
        }
    }

    // Returns true when x satisfies the (possibly reduced) stopping criterion.
    bool accept(const Vec3& x, int iteration)
    {
        double r = residual(s_, x, x0_, dropped_);
        history_.push_back(r);
        if (!dropped_ && iteration >= kStagnationWindow &&
            r > (1.0 - kStagnationDecrease) * history_[iteration - kStagnationWindow]) {
            dropped_ = true;
            r = residual(s_, x, x0_, true);
        }
        last_ = r;
        return r < tol_;
    }

    bool dropped() const noexcept { return dropped_; }

    ProjectionResult finish(const Vec3& x, const Vec3& normal, int iterations) const
    {
        return {x, unit(normal), iterations, last_, dropped_};
    }

    // Iteration cap reached: treated like stagnation, the iterate is moved
    // onto the surface.
    ProjectionResult fail(Vec3 x, int iterations)
    {
        dropped_ = true;
        for (int k = 0; k < kSurfaceSteps; ++k) {
            last_ = distance_term(s_, x);
            if (last_ < tol_) {
                return {x, unit(checked_gradient(s_, x)), iterations + k, last_, true};
            }
            x = level_set_step(s_, x);
        }
        throw NonConvergence("closest-point projection did not converge in " +
                             std::to_string(iterations) + " iterations");
    }

private:
    const LevelSetSurface& s_;
    Vec3 x0_;
    double tol_;
    bool dropped_ = false;
    double last_ = 0.0;
    std::vector<double> history_;
};

struct FirstOrderStep {
    Vec3 x;
    Vec3 normal;
};

FirstOrderStep first_order_step(const LevelSetSurface& s, const Vec3& x, const Vec3& x0,
                                double sign0)
{
    const Vec3 g = checked_gradient(s, x);
    const Vec3 x_tilde = x - eval_phi(s, x) * g / g.squaredNorm();
    const double dist = sign0 * (x_tilde - x0).norm();
    const Vec3 n = unit(checked_gradient(s, x_tilde));
    return {x0 - dist * n, n};
}

double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

double eval_phi(const LevelSetSurface& surface, const Vec3& x)
{
    const double v = surface.phi(x);
    if (!std::isfinite(v)) {
        throw EvaluationError("non-finite level-set value");
    }
    return v;
}

Vec3 grad_phi(const LevelSetSurface& surface, const Vec3& x)
{
    return checked_gradient(surface, x);
}

Mat3 hess_phi(const LevelSetSurface& surface, const Vec3& x)
{
    if (surface.hess_phi) {
        return surface.hess_phi(x);
    }
    const double h = surface.normal_fd_step;
    Mat3 H;
    for (int j = 0; j < 3; ++j) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[j] += h;
        xm[j] -= h;
        H.col(j) = (raw_gradient(surface, xp) - raw_gradient(surface, xm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

double stopping_residual(const LevelSetSurface& surface, const Vec3& x, const Vec3& x0)
{
    const Vec3 g = checked_gradient(surface, x);
    const double gn = g.norm();
    const double phi = eval_phi(surface, x);
    double direction = 0.0;
    const Vec3 d = x - x0;
    if (d.norm() >= kCoincident) {
        direction = (g / gn - d / d.norm()).squaredNorm();
    }
    return std::sqrt(phi * phi / (gn * gn) + direction);
}

ProjectionResult project_first_order(const LevelSetSurface& surface, const Vec3& x0, double tol,
                                     int max_iter)
{
    ProjectionMonitor monitor(surface, x0, tol);
    const double sign0 = sign_of(eval_phi(surface, x0));
    Vec3 x = x0;
    Vec3 normal = checked_gradient(surface, x0);
    if (monitor.accept(x, 0)) {
        return monitor.finish(x, normal, 0);
    }
    for (int it = 1; it <= max_iter; ++it) {
        if (monitor.dropped()) {
            x = level_set_step(surface, x);
            normal = checked_gradient(surface, x);
        } else {
            const FirstOrderStep step = first_order_step(surface, x, x0, sign0);
            x = step.x;
            normal = step.normal;
        }
        if (monitor.accept(x, it)) {
            return monitor.finish(x, normal, it);
        }
    }
    return monitor.fail(x, max_iter);
}

ProjectionResult project_newton(const LevelSetSurface& surface, const Vec3& x0, double tol,
                                int max_iter)
{
    ProjectionMonitor monitor(surface, x0, tol);
    const double sign0 = sign_of(eval_phi(surface, x0));
    Vec3 x = x0;
    Vec3 g = checked_gradient(surface, x0);
    double lambda = 2.0 * eval_phi(surface, x0) / g.squaredNorm();
    if (monitor.accept(x, 0)) {
        return monitor.finish(x, g, 0);
    }
    for (int it = 1; it <= max_iter; ++it) {
        if (monitor.dropped()) {
            x = level_set_step(surface, x);
            g = checked_gradient(surface, x);
            if (monitor.accept(x, it)) {
                return monitor.finish(x, g, it);
            }
            continue;
        }
        g = checked_gradient(surface, x);
        Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
        J.topLeftCorner<3, 3>() = 2.0 * Mat3::Identity() + lambda * hess_phi(surface, x);
        J.topRightCorner<3, 1>() = g;
        J.bottomLeftCorner<1, 3>() = g.transpose();
        Eigen::Vector4d F;
        F.head<3>() = 2.0 * (x - x0) + lambda * g;
        F[3] = eval_phi(surface, x);

        const Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
        if (lu.isInvertible()) {
            const Eigen::Vector4d delta = lu.solve(-F);
            x += delta.head<3>();
            lambda += delta[3];
        } else {
            x = first_order_step(surface, x, x0, sign0).x;
            const Vec3 gx = checked_gradient(surface, x);
            lambda = -2.0 * (x - x0).dot(gx) / gx.squaredNorm();
        }
        g = checked_gradient(surface, x);
        if (monitor.accept(x, it)) {
            return monitor.finish(x, g, it);
        }
    }
    return monitor.fail(x, max_iter);
}

Vec3 approx_normal(const LevelSetSurface& surface, const Vec3& x0, double tol)
{
    const double phi = eval_phi(surface, x0);
    if (std::abs(phi) < tol) {
        if (surface.analytic_normal) {
            return surface.analytic_normal(x0);
        }
        return unit(checked_gradient(surface, x0));
    }
    // The first-order iterate lies on the line x0 - t*n(x~), so the returned
    // step normal is exactly the direction of sign(phi(x0))*(x0 - xi~(x0)).
    return project_first_order(surface, x0, tol).normal;
}

Mat3 grad_normal(const LevelSetSurface& surface, const Vec3& x)
{
    const double h = surface.normal_fd_step;
    Mat3 G;
    for (int j = 0; j < 3; ++j) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[j] += h;
        xm[j] -= h;
        G.col(j) = (approx_normal(surface, xp) - approx_normal(surface, xm)) / (2.0 * h);
    }
    return G;
}

double field_value(const ScalarField3& u, const Vec3& x)
{
    const double v = u.value(x);
    if (!std::isfinite(v)) {
        throw EvaluationError("non-finite field value");
    }
    return v;
}

Vec3 field_gradient(const LevelSetSurface& surface, const ScalarField3& u, const Vec3& x)
{
    if (u.gradient) {
        return u.gradient(x);
    }
    const double h = surface.fd_step;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (field_value(u, xp) - field_value(u, xm)) / (2.0 * h);
    }
    return g;
}

Mat3 field_hessian(const LevelSetSurface& surface, const ScalarField3& u, const Vec3& x)
{
    if (u.hessian) {
        return u.hessian(x);
    }
    const double h = surface.normal_fd_step;
    Mat3 H;
    for (int j = 0; j < 3; ++j) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[j] += h;
        xm[j] -= h;
        H.col(j) = (field_gradient(surface, u, xp) - field_gradient(surface, u, xm)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

double laplace_beltrami_levelset(const LevelSetSurface& surface, const ScalarField3& u,
                                 const Vec3& x)
{
    const double dist = std::abs(eval_phi(surface, x)) / checked_gradient(surface, x).norm();
    if (dist >= 1e-8) {
        throw InvalidArgument("laplace_beltrami_levelset: point is not on the surface");
    }
    const Vec3 nu = approx_normal(surface, x);
    const Mat3 dnu = grad_normal(surface, x);
    const Mat3 H = field_hessian(surface, u, x);
    const Vec3 g = field_gradient(surface, u, x);
    return H.trace() - nu.dot(H * nu) - dnu.trace() * g.dot(nu);
}

Vec3 radial_surface_point(const LevelSetSurface& surface, const Vec3& direction, double r_max)
{
    const Vec3 d = unit(direction);
    if (!(eval_phi(surface, Vec3::Zero()) < 0.0)) {
        throw InvalidArgument("radial seeding needs the origin strictly inside the surface");
    }
    constexpr int kSteps = 400;
    double lo = 0.0;
    double hi = -1.0;
    for (int k = 1; k <= kSteps; ++k) {
        const double t = r_max * k / kSteps;
        if (eval_phi(surface, t * d) >= 0.0) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi < 0.0) {
        throw NonConvergence("no surface crossing along seeding ray");
    }
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (eval_phi(surface, mid * d) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * d;
}

LevelSetSurface make_sphere_surface(double radius)
{
    LevelSetSurface s;
    s.name = "sphere";
    const double r2 = radius * radius;
    s.phi = [r2](const Vec3& x) { return x.squaredNorm() - r2; };
    s.grad_phi = [](const Vec3& x) -> Vec3 { return 2.0 * x; };
    s.hess_phi = [](const Vec3&) -> Mat3 { return 2.0 * Mat3::Identity(); };
    s.analytic_normal = [](const Vec3& x) -> Vec3 { return x / x.norm(); };
    return s;
}

LevelSetSurface make_dziuk_surface()
{
    LevelSetSurface s;
    s.name = "dziuk";
    s.phi = [](const Vec3& x) {
        const double a = x[0] - x[2] * x[2];
        return a * a + x[1] * x[1] + x[2] * x[2] - 1.0;
    };
    s.grad_phi = [](const Vec3& x) -> Vec3 {
        const double a = x[0] - x[2] * x[2];
        return {2.0 * a, 2.0 * x[1], 2.0 * x[2] * (1.0 - 2.0 * a)};
    };
    s.hess_phi = [](const Vec3& x) -> Mat3 {
        const double a = x[0] - x[2] * x[2];
        Mat3 H = Mat3::Zero();
        H(0, 0) = 2.0;
        H(1, 1) = 2.0;
        H(0, 2) = H(2, 0) = -4.0 * x[2];
        H(2, 2) = 2.0 - 4.0 * a + 8.0 * x[2] * x[2];
        return H;
    };
    // Unit only on the surface itself, where 1 + 4 x3^2 (1 - x1 - x2^2)
    // coincides with |grad phi / 2|^2.
    s.analytic_normal = [](const Vec3& x) -> Vec3 {
        const double a = x[0] - x[2] * x[2];
        const double den = std::sqrt(1.0 + 4.0 * x[2] * x[2] * (1.0 - x[0] - x[1] * x[1]));
        return Vec3{a, x[1], x[2] * (1.0 - 2.0 * a)} / den;
    };
    s.sphere_chart = [](const Vec3& y) -> Vec3 { return {y[0] + y[2] * y[2], y[1], y[2]}; };
    return s;
}

LevelSetSurface make_enzensberger_stern_surface()
{
    LevelSetSurface s;
    s.name = "enzensberger-stern";
    s.phi = [](const Vec3& p) {
        const double x2 = p[0] * p[0];
        const double y2 = p[1] * p[1];
        const double z2 = p[2] * p[2];
        const double c = 1.0 - x2 - y2 - z2;
        return 400.0 * (x2 * y2 + y2 * z2 + x2 * z2) - c * c * c - 40.0;
    };
    return s;
}

LevelSetSurface make_plane_surface()
{
    LevelSetSurface s;
    s.name = "plane";
    s.phi = [](const Vec3& x) { return x[2]; };
    s.grad_phi = [](const Vec3&) -> Vec3 { return Vec3::UnitZ(); };
    s.hess_phi = [](const Vec3&) -> Mat3 { return Mat3::Zero(); };
    s.analytic_normal = [](const Vec3&) -> Vec3 { return Vec3::UnitZ(); };
    return s;
}

LevelSetSurface make_surface(std::string_view name)
{
    if (name == "sphere") {
        return make_sphere_surface();
    }
    if (name == "dziuk") {
        return make_dziuk_surface();
    }
    if (name == "enzensberger-stern") {
        return make_enzensberger_stern_surface();
    }
    if (name == "plane") {
        return make_plane_surface();
    }
    throw InvalidArgument("unknown surface '" + std::string(name) + "'");
}

} // namespace surfdg
