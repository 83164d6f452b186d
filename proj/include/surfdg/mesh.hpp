#pragma once

#include "surfdg/geometry.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

namespace surfdg {

using Triangle = std::array<int, 3>;

/// One codimension-one intersection between two triangles. On a conforming
/// mesh it is a full shared edge; across a hanging node it is the half of the
/// coarse edge that coincides with a full edge of the fine neighbour.
///
/// Local edge k of a triangle joins its local vertices k and (k+1)%3. The
/// endpoints of the intersection are given in the barycentric coordinates of
/// each side, in the same order, so a segment parameter s maps to
/// (1-s)*bary[0] + s*bary[1] on either side.
struct EdgeIntersection {
    std::array<Vec3, 2> endpoints;
    /// K^-: always the smaller element index.
    int minus_element = -1;
    int plus_element = -1;
    int minus_local_edge = -1;
    int plus_local_edge = -1;
    double length = 0.0;
    Vec3 conormal_minus = Vec3::Zero();
    Vec3 conormal_plus = Vec3::Zero();
    std::array<Vec3, 2> bary_minus;
    std::array<Vec3, 2> bary_plus;
    /// One side only covers half of its own edge.
    bool hanging = false;
};

/// Flat triangulation with vertices on the surface. Immutable: refinement and
/// build_edges return new meshes.
class SurfaceMesh {
public:
    using MidpointMap = std::map<std::pair<int, int>, int>;

    SurfaceMesh() = default;
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                std::vector<int> levels = {}, MidpointMap midpoints = {},
                bool allow_boundary = false, int generation = 0);

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<int>& levels() const noexcept { return levels_; }
    const std::vector<EdgeIntersection>& edges() const;
    /// Intersection indices touching element t, ascending.
    const std::vector<int>& element_edges(int t) const;
    const MidpointMap& midpoints() const noexcept { return midpoints_; }

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_triangles() const noexcept { return triangles_.size(); }
    bool edges_built() const noexcept { return edges_built_; }
    bool allow_boundary() const noexcept { return allow_boundary_; }
    int generation() const noexcept { return generation_; }
    /// False once any hanging intersection exists. Requires edges.
    bool conforming() const;

    std::array<Vec3, 3> corners(int t) const;
    double area(int t) const;
    /// Unit normal from the vertex orientation.
    Vec3 normal(int t) const;

private:
    friend SurfaceMesh build_edges(const SurfaceMesh& mesh);

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<int> levels_;
    MidpointMap midpoints_;
    std::vector<EdgeIntersection> edges_;
    std::vector<std::vector<int>> element_edges_;
    bool edges_built_ = false;
    bool allow_boundary_ = false;
    int generation_ = 0;
};

enum class SeedKind { Icosahedron, Octahedron };

/// Platonic seed on the unit sphere, subdivided `seed_level` times on the
/// sphere, then placed on the surface through the surface's sphere chart if it
/// has one, otherwise along the ray from the origin when the origin is inside.
/// A first-order projection polishes every vertex.
SurfaceMesh initial_mesh(const LevelSetSurface& surface, SeedKind kind, int seed_level = 0);

/// OFF mesh whose vertices are projected onto the surface. Open boundaries
/// are kept; no face terms are assembled there.
SurfaceMesh initial_mesh(const LevelSetSurface& surface, const std::filesystem::path& off_file);

/// Quadrisect every triangle; edge midpoints are projected onto the surface.
SurfaceMesh refine_uniform(const SurfaceMesh& mesh, const LevelSetSurface& surface);

/// Quadrisect the marked triangles plus the closure needed to keep the level
/// jump across every intersection at most one. A hanging vertex stays at the
/// midpoint of the flat coarse edge and is projected once that edge is split.
SurfaceMesh refine_nonconforming(const SurfaceMesh& mesh, const std::vector<int>& marked,
                                 const LevelSetSurface& surface);

/// Marked set extended until no marked element has an unmarked coarser
/// neighbour. Sorted, unique.
std::vector<int> closure_marking(const SurfaceMesh& mesh, const std::vector<int>& marked);

/// Topology pass: finds all intersections, orients them and computes both
/// conormals. Throws NonManifold for edges shared by more than two triangles,
/// or for unmatched edges unless the mesh allows a boundary.
SurfaceMesh build_edges(const SurfaceMesh& mesh);

/// In-plane unit vector orthogonal to the segment [a, b] on the boundary of
/// the triangle, pointing out of it.
Vec3 conormal(const std::array<Vec3, 3>& triangle, const Vec3& a, const Vec3& b);

/// Largest intersection length.
double mesh_width(const SurfaceMesh& mesh);

double total_area(const SurfaceMesh& mesh);

/// V - E + F using full edges (conforming meshes only).
int euler_characteristic(const SurfaceMesh& mesh);

/// Unit square [0,1]^2 x {0} split into n x n cells of two triangles each,
/// diagonal from (i,j) to (i+1,j+1). Open mesh, edges built.
SurfaceMesh make_flat_square_mesh(int n);

SurfaceMesh read_off(std::istream& in);
SurfaceMesh read_off(const std::filesystem::path& path);
void write_off(const SurfaceMesh& mesh, std::ostream& out);
void write_off(const SurfaceMesh& mesh, const std::filesystem::path& path);

} // namespace surfdg
