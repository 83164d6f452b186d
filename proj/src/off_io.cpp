#include "surfdg/errors.hpp"
#include "surfdg/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace surfdg {

namespace {

// Next line that is neither blank nor a '#' comment; tracks line numbers.
bool next_content_line(std::istream& in, std::string& line, int& number)
{
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

SurfaceMesh read_off(std::istream& in)
{
    std::string line;
    int number = 0;
    if (!next_content_line(in, line, number)) {
        throw ParseError("empty OFF input", number);
    }
    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") {
        throw ParseError("expected 'OFF' header", number);
    }
    // Counts may share the header line.
    std::string rest;
    std::getline(header, rest);
    if (rest.find_first_not_of(" \t\r") == std::string::npos) {
        if (!next_content_line(in, line, number)) {
            throw ParseError("missing counts line", number);
        }
        rest = line;
    }
    std::istringstream counts(rest);
    long nv = -1;
    long nf = -1;
    if (!(counts >> nv >> nf) || nv < 0 || nf < 0) {
        throw ParseError("malformed counts line", number);
    }

    std::vector<Vec3> vertices;
    vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, number)) {
            throw ParseError("unexpected end of file in vertex list", number);
        }
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p[0] >> p[1] >> p[2])) {
            throw ParseError("malformed vertex line", number);
        }
        vertices.push_back(p);
    }

    std::vector<Triangle> triangles;
    triangles.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        if (!next_content_line(in, line, number)) {
            throw ParseError("unexpected end of file in face list", number);
        }
        std::istringstream ls(line);
        int arity = 0;
        Triangle t{};
        if (!(ls >> arity)) {
            throw ParseError("malformed face line", number);
        }
        if (arity != 3) {
            throw ParseError("only triangular faces are supported", number);
        }
        if (!(ls >> t[0] >> t[1] >> t[2])) {
            throw ParseError("malformed face line", number);
        }
        for (int v : t) {
            if (v < 0 || v >= nv) {
                throw ParseError("face references vertex " + std::to_string(v), number);
            }
        }
        triangles.push_back(t);
    }
    return SurfaceMesh(std::move(vertices), std::move(triangles));
}

SurfaceMesh read_off(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_off(in);
}

void write_off(const SurfaceMesh& mesh, std::ostream& out)
{
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
    out << std::setprecision(17);
    for (const auto& p : mesh.vertices()) {
        out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

void write_off(const SurfaceMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_off(mesh, out);
}

} // namespace surfdg
