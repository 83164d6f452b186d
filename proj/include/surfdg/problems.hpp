#pragma once

#include "surfdg/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace surfdg {

enum class ForcingMode { Analytic, GenericLaplaceBeltrami };

/// -lap_Gamma u + u = f on a level-set surface, with u an ambient field
/// restricted to the surface.
struct TestProblem {
    std::string name;
    LevelSetSurface surface;
    ScalarField3 exact_u;
    ForcingMode forcing_mode = ForcingMode::GenericLaplaceBeltrami;
    /// Evaluated at points on the surface.
    ScalarFn f;
};

/// u = x1 x2 on "sphere", "dziuk", "enzensberger-stern" or "plane". The sphere
/// uses f = 7 x1 x2 unless `forcing` asks for the generic Laplace-Beltrami
/// path; the other surfaces always use f = u - lap_Gamma u evaluated through
/// laplace_beltrami_levelset (the plane has f = u).
TestProblem make_problem(std::string_view name, std::optional<ForcingMode> forcing = {});

struct ExactTrace {
    Vec3 xi = Vec3::Zero();
    double value = 0.0;
    /// P grad u at xi, P = I - nu nu^T.
    Vec3 tangential_gradient = Vec3::Zero();
};

/// u and its surface gradient at the projection xi(x) of a point x near the
/// surface.
ExactTrace exact_u_on_gammah(const TestProblem& problem, const Vec3& x);

} // namespace surfdg
