#include "surfdg/dgspace.hpp"
#include "surfdg/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <utility>

namespace surfdg {

namespace {

void add_orbit3(TriangleRule& r, double a, double w)
{
    const double b = 1.0 - 2.0 * a;
    r.points.insert(r.points.end(), {Vec3{a, a, b}, Vec3{a, b, a}, Vec3{b, a, a}});
    r.weights.insert(r.weights.end(), {w, w, w});
}

void add_orbit6(TriangleRule& r, double a, double b, double w)
{
    const double c = 1.0 - a - b;
    r.points.insert(r.points.end(), {Vec3{a, b, c}, Vec3{a, c, b}, Vec3{b, a, c},
                                     Vec3{b, c, a}, Vec3{c, a, b}, Vec3{c, b, a}});
    r.weights.insert(r.weights.end(), {w, w, w, w, w, w});
}

// Symmetric Dunavant rules, weights scaled to the reference area 1/2.
std::array<TriangleRule, 4> make_triangle_rules()
{
    TriangleRule r1{1, {Vec3{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {0.5}};

    TriangleRule r2{2, {}, {}};
    add_orbit3(r2, 1.0 / 6.0, 1.0 / 6.0);

    TriangleRule r4{4, {}, {}};
    add_orbit3(r4, 0.4459484909159648863183293, 0.1116907948390057328475035);
    add_orbit3(r4, 0.09157621350977074345957146, 0.05497587182766093381916316);

    TriangleRule r6{6, {}, {}};
    add_orbit3(r6, 0.2492867451709104212916386, 0.05839313786318968301264481);
    add_orbit3(r6, 0.0630890144915022283403316, 0.0254224531851034084604684);
    add_orbit6(r6, 0.05314504984481694735324967, 0.3103524510337844054166077,
               0.04142553780918678759677673);
    return {r1, r2, r4, r6};
}

SegmentRule gauss(int n, std::initializer_list<std::pair<double, double>> pw)
{
    SegmentRule r;
    r.exactness = 2 * n - 1;
    for (const auto& [p, w] : pw) {
        r.points.push_back(p);
        r.weights.push_back(w);
    }
    return r;
}

std::array<SegmentRule, 4> make_segment_rules()
{
    const double s3 = std::sqrt(3.0) / 6.0;
    const double s35 = 0.5 * std::sqrt(0.6);
    return {
        gauss(1, {{0.5, 1.0}}),
        gauss(2, {{0.5 - s3, 0.5}, {0.5 + s3, 0.5}}),
        gauss(3, {{0.5 - s35, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + s35, 5.0 / 18.0}}),
        gauss(4, {{0.06943184420297371238803, 0.1739274225687269286865},
                  {0.3300094782075718675987, 0.3260725774312730713135},
                  {0.6699905217924281324013, 0.3260725774312730713135},
                  {0.930568155797026287612, 0.1739274225687269286865}}),
    };
}

} // namespace

const TriangleRule& triangle_quadrature(int exactness)
{
    static const auto rules = make_triangle_rules();
    switch (exactness) {
    case 1:
        return rules[0];
    case 2:
        return rules[1];
    case 3:
    case 4:
        return rules[2];
    case 5:
    case 6:
        return rules[3];
    default:
        throw InvalidArgument("unsupported triangle quadrature exactness " +
                              std::to_string(exactness));
    }
}

const SegmentRule& segment_quadrature(int exactness)
{
    static const auto rules = make_segment_rules();
    if (exactness < 1 || exactness > 7) {
        throw InvalidArgument("unsupported segment quadrature exactness " +
                              std::to_string(exactness));
    }
    return rules[exactness / 2];
}

} // namespace surfdg
