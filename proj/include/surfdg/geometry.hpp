#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <string_view>

namespace surfdg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using ScalarFn = std::function<double(const Vec3&)>;
using VectorFn = std::function<Vec3(const Vec3&)>;
using MatrixFn = std::function<Mat3(const Vec3&)>;

/// Implicit surface {phi = 0}, phi < 0 inside. Only `phi` is mandatory; every
/// other member is optional and replaced by central differences when empty.
struct LevelSetSurface {
    std::string name;
    ScalarFn phi;
    VectorFn grad_phi;
    MatrixFn hess_phi;
    /// Unit outward normal, trusted only on the surface itself.
    VectorFn analytic_normal;
    /// Optional map from the unit sphere onto the surface, used to place seed
    /// meshes. Without it seeds are placed along rays from the origin.
    VectorFn sphere_chart;
    /// Step for first derivatives of phi and of scalar fields.
    double fd_step = 1e-5;
    /// Step for differencing normals and gradients (second derivatives).
    double normal_fd_step = 1e-4;
};

/// Ambient scalar field with optional analytic derivatives.
struct ScalarField3 {
    ScalarFn value;
    VectorFn gradient;
    MatrixFn hessian;
};

struct ProjectionResult {
    Vec3 point = Vec3::Zero();
    /// Unit normal at `point`, oriented along increasing phi.
    Vec3 normal = Vec3::Zero();
    int iterations = 0;
    double residual = 0.0;
    /// The direction term of the stopping criterion was abandoned after
    /// stagnation; only the distance term was required at exit.
    bool normal_check_dropped = false;
};

inline constexpr double kDefaultProjectionTol = 1e-10;
inline constexpr int kDefaultProjectionMaxIter = 100;

double eval_phi(const LevelSetSurface& surface, const Vec3& x);

/// Throws DegenerateGradient if |grad phi| < 1e-14.
Vec3 grad_phi(const LevelSetSurface& surface, const Vec3& x);

Mat3 hess_phi(const LevelSetSurface& surface, const Vec3& x);

/// sqrt(phi^2/|grad phi|^2 + |grad phi/|grad phi| - (x-x0)/|x-x0||^2), evaluated
/// verbatim; the direction term is 0 when |x - x0| < 1e-14.
double stopping_residual(const LevelSetSurface& surface, const Vec3& x, const Vec3& x0);

/// Ad-hoc first-order closest-point iteration: a Newton step onto the level
/// set gives x~, then x is placed at distance |x~ - x0| from x0 along the
/// normal at x~. Falls back to the distance-only criterion on stagnation.
ProjectionResult project_first_order(const LevelSetSurface& surface, const Vec3& x0,
                                     double tol = kDefaultProjectionTol,
                                     int max_iter = kDefaultProjectionMaxIter);

/// Newton iteration on the stationarity conditions of |x - x0|^2 + lambda*phi(x).
ProjectionResult project_newton(const LevelSetSurface& surface, const Vec3& x0,
                                double tol = kDefaultProjectionTol,
                                int max_iter = kDefaultProjectionMaxIter);

/// Normal of the surface at the projection of x0.
Vec3 approx_normal(const LevelSetSurface& surface, const Vec3& x0,
                   double tol = kDefaultProjectionTol);

/// Central-difference Jacobian of approx_normal, entry (i, j) = d nu_i / d x_j.
Mat3 grad_normal(const LevelSetSurface& surface, const Vec3& x);

double field_value(const ScalarField3& u, const Vec3& x);
Vec3 field_gradient(const LevelSetSurface& surface, const ScalarField3& u, const Vec3& x);
Mat3 field_hessian(const LevelSetSurface& surface, const ScalarField3& u, const Vec3& x);

/// Laplace-Beltrami of an ambient field at a surface point:
///   lap u - nu . hess(u) nu - tr(grad nu) grad u . nu
double laplace_beltrami_levelset(const LevelSetSurface& surface, const ScalarField3& u,
                                 const Vec3& x);

/// First zero of phi along the ray t*direction, t in (0, r_max]. Requires
/// phi(0) < 0. Throws NonConvergence if no sign change is found.
Vec3 radial_surface_point(const LevelSetSurface& surface, const Vec3& direction,
                          double r_max = 4.0);

LevelSetSurface make_sphere_surface(double radius = 1.0);
LevelSetSurface make_dziuk_surface();
LevelSetSurface make_enzensberger_stern_surface();
/// The plane x3 = 0; projection is the orthogonal projection.
LevelSetSurface make_plane_surface();

/// "sphere", "dziuk", "enzensberger-stern" (and "plane"). Throws InvalidArgument.
LevelSetSurface make_surface(std::string_view name);

} // namespace surfdg
