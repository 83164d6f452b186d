#include "surfdg/mesh.hpp"

#include "surfdg/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <set>

namespace surfdg {

namespace {

constexpr double kMinArea = 1e-14;

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct EdgeUse {
    int triangle;
    int local_edge;
};

Vec3 vertex_bary(int local)
{
    Vec3 b = Vec3::Zero();
    b[local] = 1.0;
    return b;
}

int local_index(const Triangle& tri, int v)
{
    for (int k = 0; k < 3; ++k) {
        if (tri[k] == v) {
            return k;
        }
    }
    throw InvalidArgument("vertex does not belong to triangle");
}

// Flip faces whose normal points towards the origin (seeds are centred there).
void orient_outward(const std::vector<Vec3>& v, std::vector<Triangle>& tris)
{
    for (auto& t : tris) {
        const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
        if (n.dot(v[t[0]] + v[t[1]] + v[t[2]]) < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
}

void icosahedron(std::vector<Vec3>& v, std::vector<Triangle>& t)
{
    const double g = 0.5 * (1.0 + std::sqrt(5.0));
    v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
         {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
    t = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
         {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& p : v) {
        p.normalize();
    }
}

void octahedron(std::vector<Vec3>& v, std::vector<Triangle>& t)
{
    v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    t = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
         {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
}

void subdivide_on_sphere(std::vector<Vec3>& v, std::vector<Triangle>& tris)
{
    std::map<EdgeKey, int> mid;
    auto midpoint = [&](int a, int b) {
        const auto key = edge_key(a, b);
        if (auto it = mid.find(key); it != mid.end()) {
            return it->second;
        }
        v.push_back((v[a] + v[b]).normalized());
        const int id = static_cast<int>(v.size()) - 1;
        mid.emplace(key, id);
        return id;
    };
    std::vector<Triangle> out;
    out.reserve(4 * tris.size());
    for (const auto& t : tris) {
        const int m01 = midpoint(t[0], t[1]);
        const int m12 = midpoint(t[1], t[2]);
        const int m20 = midpoint(t[2], t[0]);
        out.push_back({t[0], m01, m20});
        out.push_back({m01, t[1], m12});
        out.push_back({m20, m12, t[2]});
        out.push_back({m01, m12, m20});
    }
    tris = std::move(out);
}

Vec3 place_on_surface(const LevelSetSurface& surface, const Vec3& p, bool radial)
{
    const Vec3 start = radial ? radial_surface_point(surface, p) : p;
    return project_first_order(surface, start).point;
}

void check_triangles(const std::vector<Vec3>& v, const std::vector<Triangle>& tris)
{
    const int nv = static_cast<int>(v.size());
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                throw InvalidArgument("triangle references a missing vertex");
            }
        }
        const double a = 0.5 * (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]).norm();
        if (!(a > kMinArea)) {
            throw InvalidArgument("degenerate triangle");
        }
    }
}

// Midpoints whose parent edge is still an edge of some triangle.
std::set<int> hanging_midpoints(const std::vector<Triangle>& tris,
                                const SurfaceMesh::MidpointMap& midpoints)
{
    std::set<EdgeKey> edges;
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) {
            edges.insert(edge_key(t[k], t[(k + 1) % 3]));
        }
    }
    std::set<int> out;
    for (const auto& [key, id] : midpoints) {
        if (edges.count(key)) {
            out.insert(id);
        }
    }
    return out;
}

// A hanging midpoint sits on the flat parent edge so that both sides of every
// intersection describe the same segment; it moves onto the surface once the
// coarse neighbour is refined as well.
SurfaceMesh refine_marked(const SurfaceMesh& mesh, const std::vector<int>& marked,
                          const LevelSetSurface& surface)
{
    std::vector<Vec3> vertices = mesh.vertices();
    SurfaceMesh::MidpointMap midpoints = mesh.midpoints();
    const std::size_t old_vertices = vertices.size();
    auto midpoint = [&](int a, int b) {
        const auto key = edge_key(a, b);
        if (auto it = midpoints.find(key); it != midpoints.end()) {
            return it->second;
        }
        vertices.push_back(0.5 * (vertices[a] + vertices[b]));
        const int id = static_cast<int>(vertices.size()) - 1;
        midpoints.emplace(key, id);
        return id;
    };

    std::vector<char> is_marked(mesh.num_triangles(), 0);
    for (int t : marked) {
        is_marked[t] = 1;
    }
    std::vector<Triangle> tris;
    std::vector<int> levels;
    tris.reserve(mesh.num_triangles() + 3 * marked.size());
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
        const Triangle& t = mesh.triangles()[i];
        const int level = mesh.levels()[i];
        if (!is_marked[i]) {
            tris.push_back(t);
            levels.push_back(level);
            continue;
        }
        const int m01 = midpoint(t[0], t[1]);
        const int m12 = midpoint(t[1], t[2]);
        const int m20 = midpoint(t[2], t[0]);
        for (const Triangle& child : {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12},
                                      Triangle{m20, m12, t[2]}, Triangle{m01, m12, m20}}) {
            tris.push_back(child);
            levels.push_back(level + 1);
        }
    }

    const std::set<int> was_hanging = hanging_midpoints(mesh.triangles(), mesh.midpoints());
    const std::set<int> now_hanging = hanging_midpoints(tris, midpoints);
    std::vector<std::pair<int, EdgeKey>> order;
    order.reserve(midpoints.size());
    for (const auto& [key, id] : midpoints) {
        order.emplace_back(id, key);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [id, key] : order) {
        const bool fresh = static_cast<std::size_t>(id) >= old_vertices;
        if (now_hanging.count(id)) {
            vertices[id] = 0.5 * (vertices[key.first] + vertices[key.second]);
        } else if (fresh || was_hanging.count(id)) {
            vertices[id] = project_first_order(
                surface, 0.5 * (vertices[key.first] + vertices[key.second])).point;
        }
    }

    check_triangles(vertices, tris);
    return build_edges(SurfaceMesh(std::move(vertices), std::move(tris), std::move(levels),
                                   std::move(midpoints), mesh.allow_boundary(),
                                   mesh.generation() + 1));
}

} // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                         std::vector<int> levels, MidpointMap midpoints, bool allow_boundary,
                         int generation)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      levels_(std::move(levels)),
      midpoints_(std::move(midpoints)),
      allow_boundary_(allow_boundary),
      generation_(generation)
{
    if (levels_.empty()) {
        levels_.assign(triangles_.size(), 0);
    }
    if (levels_.size() != triangles_.size()) {
        throw InvalidArgument("one level per triangle expected");
    }
}

const std::vector<EdgeIntersection>& SurfaceMesh::edges() const
{
    if (!edges_built_) {
        throw EdgesNotBuilt("mesh intersections have not been built");
    }
    return edges_;
}

const std::vector<int>& SurfaceMesh::element_edges(int t) const
{
    if (!edges_built_) {
        throw EdgesNotBuilt("mesh intersections have not been built");
    }
    return element_edges_.at(t);
}

bool SurfaceMesh::conforming() const
{
    return std::none_of(edges().begin(), edges().end(),
                        [](const EdgeIntersection& e) { return e.hanging; });
}

std::array<Vec3, 3> SurfaceMesh::corners(int t) const
{
    const Triangle& tri = triangles_.at(t);
    return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double SurfaceMesh::area(int t) const
{
    const auto p = corners(t);
    return 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
}

Vec3 SurfaceMesh::normal(int t) const
{
    const auto p = corners(t);
    return (p[1] - p[0]).cross(p[2] - p[0]).normalized();
}

Vec3 conormal(const std::array<Vec3, 3>& triangle, const Vec3& a, const Vec3& b)
{
    const Vec3 n = (triangle[1] - triangle[0]).cross(triangle[2] - triangle[0]);
    if (!(0.5 * n.norm() > kMinArea)) {
        throw InvalidArgument("conormal of a degenerate triangle");
    }
    const Vec3 tangent = b - a;
    if (tangent.norm() < 1e-14) {
        throw InvalidArgument("conormal of a zero-length segment");
    }
    Vec3 c = tangent.cross(n).normalized();
    const Vec3 centroid = (triangle[0] + triangle[1] + triangle[2]) / 3.0;
    if (c.dot(centroid - 0.5 * (a + b)) > 0.0) {
        c = -c;
    }
    return c;
}

SurfaceMesh build_edges(const SurfaceMesh& mesh)
{
    SurfaceMesh out = mesh;
    out.edges_.clear();
    out.element_edges_.assign(mesh.num_triangles(), {});

    std::map<EdgeKey, std::vector<EdgeUse>> uses;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const Triangle& tri = mesh.triangles()[t];
        for (int k = 0; k < 3; ++k) {
            uses[edge_key(tri[k], tri[(k + 1) % 3])].push_back({static_cast<int>(t), k});
        }
    }

    auto add = [&](int va, int vb, const EdgeUse& s1, const Vec3& b1a, const Vec3& b1b,
                   const EdgeUse& s2, const Vec3& b2a, const Vec3& b2b, bool hanging) {
        EdgeIntersection e;
        const bool first_minus = s1.triangle < s2.triangle;
        const EdgeUse& m = first_minus ? s1 : s2;
        const EdgeUse& p = first_minus ? s2 : s1;
        e.minus_element = m.triangle;
        e.plus_element = p.triangle;
        e.minus_local_edge = m.local_edge;
        e.plus_local_edge = p.local_edge;
        e.bary_minus = first_minus ? std::array<Vec3, 2>{b1a, b1b} : std::array<Vec3, 2>{b2a, b2b};
        e.bary_plus = first_minus ? std::array<Vec3, 2>{b2a, b2b} : std::array<Vec3, 2>{b1a, b1b};
        e.endpoints = {mesh.vertices()[va], mesh.vertices()[vb]};
        e.length = (e.endpoints[1] - e.endpoints[0]).norm();
        e.hanging = hanging;
        auto side_conormal = [&](const EdgeUse& s) {
            const auto c = mesh.corners(s.triangle);
            return conormal(c, c[s.local_edge], c[(s.local_edge + 1) % 3]);
        };
        e.conormal_minus = side_conormal(m);
        e.conormal_plus = side_conormal(p);
        const int id = static_cast<int>(out.edges_.size());
        out.edges_.push_back(e);
        out.element_edges_[e.minus_element].push_back(id);
        out.element_edges_[e.plus_element].push_back(id);
    };

    std::set<EdgeKey> consumed;
    for (const auto& [key, list] : uses) {
        if (list.size() > 2) {
            throw NonManifold("edge (" + std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") has " +
                              std::to_string(list.size()) + " incident triangles");
        }
        if (list.size() == 2) {
            const auto& t1 = mesh.triangles()[list[0].triangle];
            const auto& t2 = mesh.triangles()[list[1].triangle];
            add(key.first, key.second, list[0], vertex_bary(local_index(t1, key.first)),
                vertex_bary(local_index(t1, key.second)), list[1],
                vertex_bary(local_index(t2, key.first)), vertex_bary(local_index(t2, key.second)),
                false);
            consumed.insert(key);
        }
    }

    // Unmatched full edges: either split by a hanging midpoint or boundary.
    for (const auto& [key, list] : uses) {
        if (list.size() != 1 || consumed.count(key)) {
            continue;
        }
        const auto mid = mesh.midpoints().find(key);
        if (mid == mesh.midpoints().end()) {
            continue;
        }
        const int a = key.first;
        const int b = key.second;
        const int m = mid->second;
        const auto half_a = uses.find(edge_key(a, m));
        const auto half_b = uses.find(edge_key(m, b));
        if (half_a == uses.end() || half_b == uses.end() || half_a->second.size() != 1 ||
            half_b->second.size() != 1) {
            continue;
        }
        const EdgeUse coarse = list[0];
        const auto& ct = mesh.triangles()[coarse.triangle];
        const Vec3 ca = vertex_bary(local_index(ct, a));
        const Vec3 cb = vertex_bary(local_index(ct, b));
        const Vec3 cm = 0.5 * (ca + cb);
        for (const auto& [end, fine_it, coarse_end] :
             {std::tuple{a, half_a, ca}, std::tuple{b, half_b, cb}}) {
            const EdgeUse fine = fine_it->second[0];
            const auto& ft = mesh.triangles()[fine.triangle];
            add(end, m, coarse, coarse_end, cm, fine, vertex_bary(local_index(ft, end)),
                vertex_bary(local_index(ft, m)), true);
        }
        consumed.insert(key);
        consumed.insert(half_a->first);
        consumed.insert(half_b->first);
    }

    if (!mesh.allow_boundary()) {
        for (const auto& [key, list] : uses) {
            if (!consumed.count(key)) {
                throw NonManifold("edge (" + std::to_string(key.first) + ", " +
                                  std::to_string(key.second) +
                                  ") has a single incident triangle on a closed mesh");
            }
        }
    }

    for (auto& list : out.element_edges_) {
        std::sort(list.begin(), list.end());
    }
    out.edges_built_ = true;
    return out;
}

SurfaceMesh initial_mesh(const LevelSetSurface& surface, SeedKind kind, int seed_level)
{
    if (seed_level < 0) {
        throw InvalidArgument("seed level must be non-negative");
    }
    std::vector<Vec3> v;
    std::vector<Triangle> t;
    if (kind == SeedKind::Icosahedron) {
        icosahedron(v, t);
    } else {
        octahedron(v, t);
    }
    orient_outward(v, t);
    for (int i = 0; i < seed_level; ++i) {
        subdivide_on_sphere(v, t);
    }
    const bool radial = eval_phi(surface, Vec3::Zero()) < 0.0;
    for (auto& p : v) {
        p = surface.sphere_chart ? project_first_order(surface, surface.sphere_chart(p)).point
                                 : place_on_surface(surface, p, radial);
    }
    check_triangles(v, t);
    return build_edges(SurfaceMesh(std::move(v), std::move(t)));
}

SurfaceMesh initial_mesh(const LevelSetSurface& surface, const std::filesystem::path& off_file)
{
    const SurfaceMesh raw = read_off(off_file);
    std::vector<Vec3> v = raw.vertices();
    for (auto& p : v) {
        p = project_first_order(surface, p).point;
    }
    std::vector<Triangle> t = raw.triangles();
    check_triangles(v, t);
    return build_edges(SurfaceMesh(std::move(v), std::move(t), {}, {}, true));
}

std::vector<int> closure_marking(const SurfaceMesh& mesh, const std::vector<int>& marked)
{
    std::vector<char> flag(mesh.num_triangles(), 0);
    for (int t : marked) {
        if (t < 0 || static_cast<std::size_t>(t) >= mesh.num_triangles()) {
            throw InvalidArgument("marked triangle index out of range");
        }
        flag[t] = 1;
    }
    const auto& levels = mesh.levels();
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : mesh.edges()) {
            if (!e.hanging) {
                continue;
            }
            const int coarse = levels[e.minus_element] < levels[e.plus_element] ? e.minus_element
                                                                                : e.plus_element;
            const int fine = coarse == e.minus_element ? e.plus_element : e.minus_element;
            if (flag[fine] && !flag[coarse]) {
                flag[coarse] = 1;
                changed = true;
            }
        }
    }
    std::vector<int> out;
    for (std::size_t t = 0; t < flag.size(); ++t) {
        if (flag[t]) {
            out.push_back(static_cast<int>(t));
        }
    }
    return out;
}

SurfaceMesh refine_uniform(const SurfaceMesh& mesh, const LevelSetSurface& surface)
{
    if (!mesh.conforming()) {
        throw InvalidArgument("refine_uniform requires a conforming mesh");
    }
    std::vector<int> all(mesh.num_triangles());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = static_cast<int>(i);
    }
    return refine_marked(mesh, all, surface);
}

SurfaceMesh refine_nonconforming(const SurfaceMesh& mesh, const std::vector<int>& marked,
                                 const LevelSetSurface& surface)
{
    if (marked.empty()) {
        throw InvalidArgument("refine_nonconforming needs at least one marked triangle");
    }
    return refine_marked(mesh, closure_marking(mesh, marked), surface);
}

double mesh_width(const SurfaceMesh& mesh)
{
    double h = 0.0;
    for (const auto& e : mesh.edges()) {
        h = std::max(h, e.length);
    }
    return h;
}

double total_area(const SurfaceMesh& mesh)
{
    double a = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        a += mesh.area(static_cast<int>(t));
    }
    return a;
}

int euler_characteristic(const SurfaceMesh& mesh)
{
    std::set<EdgeKey> edges;
    for (const auto& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            edges.insert(edge_key(t[k], t[(k + 1) % 3]));
        }
    }
    return static_cast<int>(mesh.num_vertices()) - static_cast<int>(edges.size()) +
           static_cast<int>(mesh.num_triangles());
}

SurfaceMesh make_flat_square_mesh(int n)
{
    if (n < 1) {
        throw InvalidArgument("flat square needs n >= 1");
    }
    std::vector<Vec3> v;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            v.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0);
        }
    }
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<Triangle> t;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_edges(SurfaceMesh(std::move(v), std::move(t), {}, {}, true));
}

} // namespace surfdg
