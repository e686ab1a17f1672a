#include "rfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <tuple>

namespace rfv {

// ---------------------------------------------------------------------------
// Grid1D
// ---------------------------------------------------------------------------

Grid1D::Grid1D(std::vector<double> interfaces) : x_(std::move(interfaces)) {
    if (x_.size() < 2) throw GeometryError("Grid1D needs at least one cell");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        if (!(x_[i + 1] > x_[i])) {
            std::ostringstream msg;
            msg << "Grid1D interfaces not strictly increasing at cell " << i;
            throw GeometryError(msg.str());
        }
    }
}

Grid1D Grid1D::uniform(int n, double a, double b) {
    if (n < 1) throw ArgumentError("Grid1D::uniform needs n >= 1");
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = a + (b - a) * i / n;
    return Grid1D(std::move(x));
}

double Grid1D::min_dx() const {
    double m = dx(0);
    for (int i = 1; i < size(); ++i) m = std::min(m, dx(i));
    return m;
}

// ---------------------------------------------------------------------------
// Edge bookkeeping shared by triangles and polygons
// ---------------------------------------------------------------------------

namespace {

using EdgeKey = std::tuple<int, int, long long, long long>;

long long quantize(double v) { return std::llround(v * 1e6); }

/// Key of the undirected edge a->b; `forward` tells whether a < b ordering was kept.
EdgeKey edge_key(int a, int b, const Vec2& sa, const Vec2& sb, bool& forward) {
    forward = a < b || (a == b && (sa.x() < sb.x() || (sa.x() == sb.x() && sa.y() <= sb.y())));
    if (forward) return {a, b, quantize(sb.x() - sa.x()), quantize(sb.y() - sa.y())};
    return {b, a, quantize(sa.x() - sb.x()), quantize(sa.y() - sb.y())};
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace

// ---------------------------------------------------------------------------
// TriMesh
// ---------------------------------------------------------------------------

Vec2 TriMesh::position(int t, int k) const {
    Vec2 x = vertices[triangles[t][k]];
    if (!shifts.empty()) x += shifts[t][k];
    return x;
}

double TriMesh::perimeter(int t) const {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (position(t, (k + 1) % 3) - position(t, k)).norm();
    return s;
}

void TriMesh::finalize() {
    const int nt = num_triangles();
    area.assign(nt, 0.0);
    normals.assign(nt, {});
    dual_area.assign(num_vertices(), 0.0);
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            if (triangles[t][k] < 0 || triangles[t][k] >= num_vertices()) {
                throw GeometryError("triangle " + std::to_string(t) + " references a missing vertex");
            }
        }
        const Vec2 x0 = position(t, 0), x1 = position(t, 1), x2 = position(t, 2);
        const double a = 0.5 * cross(x1 - x0, x2 - x0);
        if (!(a > 0.0)) {
            throw GeometryError("triangle " + std::to_string(t) + " has nonpositive area");
        }
        area[t] = a;
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = position(t, (k + 2) % 3) - position(t, (k + 1) % 3);
            normals[t][k] = Vec2(-e.y(), e.x());
            dual_area[triangles[t][k]] += a / 3.0;
        }
    }
}

void canonicalize_ccw(TriMesh& mesh) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec2 x0 = mesh.position(t, 0), x1 = mesh.position(t, 1), x2 = mesh.position(t, 2);
        const double a = cross(x1 - x0, x2 - x0);
        if (a == 0.0) throw GeometryError("triangle " + std::to_string(t) + " is degenerate");
        if (a < 0.0) {
            std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
            if (!mesh.shifts.empty()) std::swap(mesh.shifts[t][1], mesh.shifts[t][2]);
        }
    }
}

TriMesh make_tri_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                      std::vector<std::array<Vec2, 3>> shifts) {
    TriMesh m;
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);
    m.shifts = std::move(shifts);
    if (!m.shifts.empty() && m.shifts.size() != m.triangles.size()) {
        throw GeometryError("shift table does not match the triangle list");
    }
    for (int t = 0; t < m.num_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) {
            if (m.triangles[t][k] < 0 || m.triangles[t][k] >= m.num_vertices()) {
                throw GeometryError("triangle " + std::to_string(t) + " references a missing vertex");
            }
        }
    }
    canonicalize_ccw(m);
    m.finalize();
    return m;
}

namespace {

/// Vertex grid shared by the structured generators.
struct LatticeIndex {
    int n_x, n_y;
    bool periodic;
    int id(int i, int j) const {
        if (periodic) return (j % n_y) * n_x + (i % n_x);
        return j * (n_x + 1) + i;
    }
};

std::vector<Vec2> lattice_vertices(int nx, int ny, double lx, double ly, bool periodic,
                                   double jitter, std::uint64_t seed) {
    const int vx = periodic ? nx : nx + 1;
    const int vy = periodic ? ny : ny + 1;
    const double hx = lx / nx, hy = ly / ny;
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(vx) * vy);
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int j = 0; j < vy; ++j) {
        for (int i = 0; i < vx; ++i) {
            Vec2 x(i * hx, j * hy);
            const bool interior = periodic || (i > 0 && i < nx && j > 0 && j < ny);
            if (jitter > 0.0 && interior) {
                x.x() += jitter * hx * uni(rng);
                x.y() += jitter * hy * uni(rng);
            }
            v.push_back(x);
        }
    }
    return v;
}

Vec2 lattice_shift(int i, int j, int nx, int ny, double lx, double ly, bool periodic) {
    if (!periodic) return Vec2::Zero();
    return Vec2(i >= nx ? lx : 0.0, j >= ny ? ly : 0.0);
}

}  // namespace

TriMesh structured_tri_mesh(int n, double length, bool periodic, double jitter, std::uint64_t seed) {
    if (n < (periodic ? 2 : 1)) throw ArgumentError("structured_tri_mesh: too few cells");
    if (jitter < 0.0 || jitter >= 0.5) throw ArgumentError("structured_tri_mesh: jitter must be in [0, 0.5)");
    const LatticeIndex idx{n, n, periodic};
    std::vector<Vec2> v = lattice_vertices(n, n, length, length, periodic, jitter, seed);
    std::vector<std::array<int, 3>> tris;
    std::vector<std::array<Vec2, 3>> shifts;
    auto corner = [&](int i, int j) {
        return std::make_pair(idx.id(i, j), lattice_shift(i, j, n, n, length, length, periodic));
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto a = corner(i, j), b = corner(i + 1, j), c = corner(i + 1, j + 1), d = corner(i, j + 1);
            if ((i + j) % 2 == 0) {
                tris.push_back({a.first, b.first, c.first});
                shifts.push_back({a.second, b.second, c.second});
                tris.push_back({a.first, c.first, d.first});
                shifts.push_back({a.second, c.second, d.second});
            } else {
                tris.push_back({a.first, b.first, d.first});
                shifts.push_back({a.second, b.second, d.second});
                tris.push_back({b.first, c.first, d.first});
                shifts.push_back({b.second, c.second, d.second});
            }
        }
    }
    if (!periodic) shifts.clear();
    return make_tri_mesh(std::move(v), std::move(tris), std::move(shifts));
}

DualCells build_dual_cells(const TriMesh& mesh) {
    DualCells d;
    const int nt = mesh.num_triangles();
    d.area.assign(mesh.num_vertices(), 0.0);
    d.interface_normal.assign(nt, {});
    d.boundary_normal.assign(nt, {});

    std::map<EdgeKey, std::vector<int>> edge_use;  // signed (t+1) per use
    for (int t = 0; t < nt; ++t) {
        const Vec2 x0 = mesh.position(t, 0), x1 = mesh.position(t, 1), x2 = mesh.position(t, 2);
        const double a = 0.5 * cross(x1 - x0, x2 - x0);
        if (!(a > 0.0)) throw GeometryError("triangle " + std::to_string(t) + " is inverted or degenerate");
        std::array<Vec2, 3> n;
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = mesh.position(t, (k + 2) % 3) - mesh.position(t, (k + 1) % 3);
            n[k] = Vec2(-e.y(), e.x());
        }
        for (int k = 0; k < 3; ++k) {
            d.area[mesh.triangles[t][k]] += a / 3.0;
            d.interface_normal[t][k] = (n[(k + 1) % 3] - n[k]) / 6.0;
            d.boundary_normal[t][k] = 0.5 * n[k];

            const int kb = (k + 1) % 3;
            const Vec2 sa = mesh.shifts.empty() ? Vec2::Zero() : mesh.shifts[t][k];
            const Vec2 sb = mesh.shifts.empty() ? Vec2::Zero() : mesh.shifts[t][kb];
            bool fwd = true;
            const EdgeKey key = edge_key(mesh.triangles[t][k], mesh.triangles[t][kb], sa, sb, fwd);
            edge_use[key].push_back(fwd ? t + 1 : -(t + 1));
        }
    }
    for (const auto& [key, uses] : edge_use) {
        const bool bad_count = uses.size() > 2;
        const bool bad_orient = uses.size() == 2 && (uses[0] > 0) == (uses[1] > 0);
        if (bad_count || bad_orient) {
            const int t = std::abs(uses.back()) - 1;
            throw GeometryError("non-conforming triangulation at triangle " + std::to_string(t));
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// PolyMesh
// ---------------------------------------------------------------------------

Vec2 PolyMesh::position(int c, int k) const {
    Vec2 x = vertices[cells[c][k]];
    if (!shifts.empty()) x += shifts[c][k];
    return x;
}

double polygon_volume(const std::vector<Vec2>& x) {
    double v = 0.0;
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < n; ++k) v += 0.5 * cross(x[k], x[(k + 1) % n]);
    return v;
}

double PolyMesh::volume(int c) const {
    // Fan formula around the first vertex keeps the value translation-invariant
    // to roundoff for cells far from the origin.
    const int n = static_cast<int>(cells[c].size());
    const Vec2 o = position(c, 0);
    double v = 0.0;
    for (int k = 0; k < n; ++k) v += 0.5 * cross(position(c, k) - o, position(c, (k + 1) % n) - o);
    return v;
}

double PolyMesh::perimeter(int c) const {
    const int n = static_cast<int>(cells[c].size());
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += (position(c, (k + 1) % n) - position(c, k)).norm();
    return s;
}

Vec2 PolyMesh::centroid(int c) const {
    const int n = static_cast<int>(cells[c].size());
    const Vec2 o = position(c, 0);
    Vec2 s = Vec2::Zero();
    double a = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2 p = position(c, k) - o, q = position(c, (k + 1) % n) - o;
        const double w = cross(p, q);
        a += w;
        s += w * (p + q);
    }
    return o + s / (3.0 * a);
}

void PolyMesh::finalize() {
    node_cells.assign(num_vertices(), {});
    for (int c = 0; c < num_cells(); ++c) {
        if (cells[c].size() < 3) throw GeometryError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (int k = 0; k < static_cast<int>(cells[c].size()); ++k) {
            const int p = cells[c][k];
            if (p < 0 || p >= num_vertices()) {
                throw GeometryError("cell " + std::to_string(c) + " references a missing vertex");
            }
            node_cells[p].emplace_back(c, k);
        }
        if (!(volume(c) > 0.0)) throw GeometryError("cell " + std::to_string(c) + " has nonpositive volume");
    }
}

PolyMesh make_poly_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                        std::vector<std::vector<Vec2>> shifts) {
    PolyMesh m;
    m.vertices = std::move(vertices);
    m.cells = std::move(cells);
    m.shifts = std::move(shifts);
    if (!m.shifts.empty() && m.shifts.size() != m.cells.size()) {
        throw GeometryError("shift table does not match the cell list");
    }
    for (int c = 0; c < m.num_cells(); ++c) {
        if (m.cells[c].size() < 3) throw GeometryError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (int p : m.cells[c]) {
            if (p < 0 || p >= m.num_vertices()) {
                throw GeometryError("cell " + std::to_string(c) + " references a missing vertex");
            }
        }
        const double v = m.volume(c);
        if (v == 0.0) throw GeometryError("cell " + std::to_string(c) + " is degenerate");
        if (v < 0.0) {
            std::reverse(m.cells[c].begin(), m.cells[c].end());
            if (!m.shifts.empty()) std::reverse(m.shifts[c].begin(), m.shifts[c].end());
        }
    }
    m.finalize();
    return m;
}

PolyMesh cartesian_poly_mesh(int nx, int ny, double lx, double ly, bool periodic, double jitter,
                             std::uint64_t seed) {
    if (nx < (periodic ? 2 : 1) || ny < (periodic ? 2 : 1)) throw ArgumentError("cartesian_poly_mesh: too few cells");
    if (jitter < 0.0 || jitter >= 0.5) throw ArgumentError("cartesian_poly_mesh: jitter must be in [0, 0.5)");
    const LatticeIndex idx{nx, ny, periodic};
    std::vector<Vec2> v = lattice_vertices(nx, ny, lx, ly, periodic, jitter, seed);
    std::vector<std::vector<int>> cells;
    std::vector<std::vector<Vec2>> shifts;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int ii[4] = {i, i + 1, i + 1, i};
            const int jj[4] = {j, j, j + 1, j + 1};
            std::vector<int> cell;
            std::vector<Vec2> sh;
            for (int k = 0; k < 4; ++k) {
                cell.push_back(idx.id(ii[k], jj[k]));
                sh.push_back(lattice_shift(ii[k], jj[k], nx, ny, lx, ly, periodic));
            }
            cells.push_back(std::move(cell));
            shifts.push_back(std::move(sh));
        }
    }
    if (!periodic) shifts.clear();
    return make_poly_mesh(std::move(v), std::move(cells), std::move(shifts));
}

CornerGeometry corner_geometry(const PolyMesh& mesh) {
    CornerGeometry g;
    g.corners.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int n = static_cast<int>(mesh.cells[c].size());
        g.corners[c].resize(n);
        for (int k = 0; k < n; ++k) {
            const Vec2 xm = mesh.position(c, (k + n - 1) % n);
            const Vec2 x = mesh.position(c, k);
            const Vec2 xp = mesh.position(c, (k + 1) % n);
            const Vec2 d0 = x - xm, d1 = xp - x;
            const double l0 = d0.norm(), l1 = d1.norm();
            if (!(l0 > 0.0) || !(l1 > 0.0)) {
                throw GeometryError("cell " + std::to_string(c) + " has a zero-length edge");
            }
            Corner& cr = g.corners[c][k];
            cr.node = mesh.cells[c][k];
            cr.ln = 0.5 * cross_ez(xp - xm);
            cr.sub[0] = {0.5 * l0, cross_ez(d0) / l0};
            cr.sub[1] = {0.5 * l1, cross_ez(d1) / l1};
        }
    }
    return g;
}

std::vector<std::vector<NodeFace>> node_faces(const PolyMesh& mesh) {
    std::map<EdgeKey, std::vector<std::pair<int, int>>> edges;  // key -> (cell, local start)
    auto shift = [&](int c, int k) { return mesh.shifts.empty() ? Vec2(Vec2::Zero()) : mesh.shifts[c][k]; };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int n = static_cast<int>(mesh.cells[c].size());
        for (int k = 0; k < n; ++k) {
            const int kb = (k + 1) % n;
            bool fwd = true;
            edges[edge_key(mesh.cells[c][k], mesh.cells[c][kb], shift(c, k), shift(c, kb), fwd)].emplace_back(c, k);
        }
    }
    std::vector<std::vector<NodeFace>> faces(mesh.num_vertices());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int n = static_cast<int>(mesh.cells[c].size());
        for (int k = 0; k < n; ++k) {
            const int p = mesh.cells[c][k];
            bool fwd = true;
            // side 1: edge (p, p+)
            {
                const int kb = (k + 1) % n;
                const auto& use = edges.at(edge_key(p, mesh.cells[c][kb], shift(c, k), shift(c, kb), fwd));
                if (use.size() > 2) throw GeometryError("edge shared by more than two cells at cell " + std::to_string(c));
                NodeFace f{c, k, 1};
                for (const auto& [d, kd] : use) {
                    if (d == c && kd == k) continue;
                    const int nd = static_cast<int>(mesh.cells[d].size());
                    f.nb_cell = d;
                    f.nb_local = (kd + 1) % nd;
                    f.nb_side = 0;
                }
                faces[p].push_back(f);
            }
            // side 0: edge (p-, p), listed only on the boundary
            {
                const int ka = (k + n - 1) % n;
                const auto& use = edges.at(edge_key(mesh.cells[c][ka], p, shift(c, ka), shift(c, k), fwd));
                if (use.size() == 1) faces[p].push_back(NodeFace{c, k, 0});
            }
        }
    }
    return faces;
}

// ---------------------------------------------------------------------------
// Mesh files
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> read_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
    std::vector<std::string> tok;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string t;
        while (ls >> t) tok.push_back(t);
    }
    return tok;
}

class TokenStream {
public:
    TokenStream(std::vector<std::string> tok, std::string path) : tok_(std::move(tok)), path_(std::move(path)) {}
    double real() { return std::stod(next()); }
    int integer() {
        const std::string s = next();
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw GeometryError(path_ + ": expected an integer, got '" + s + "'");
        return v;
    }
    bool done() const { return pos_ == tok_.size(); }
    std::string word() { return next(); }

private:
    std::string next() {
        if (pos_ >= tok_.size()) throw GeometryError(path_ + ": unexpected end of file");
        return tok_[pos_++];
    }
    std::vector<std::string> tok_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace

TriMesh read_tri_mesh(const std::string& path) {
    TokenStream ts(read_tokens(path), path);
    try {
        const int nv = ts.integer(), nt = ts.integer();
        if (nv < 3 || nt < 1) throw GeometryError(path + ": bad header");
        std::vector<Vec2> v(nv);
        for (auto& x : v) {
            x.x() = ts.real();
            x.y() = ts.real();
        }
        std::vector<std::array<int, 3>> t(nt);
        for (auto& tri : t) {
            for (int& i : tri) i = ts.integer();
        }
        std::vector<std::array<Vec2, 3>> sh;
        if (!ts.done()) {
            if (ts.word() != "shifts") throw GeometryError(path + ": trailing data after connectivity");
            sh.resize(nt);
            for (auto& a : sh) {
                for (Vec2& d : a) {
                    d.x() = ts.real();
                    d.y() = ts.real();
                }
            }
            if (!ts.done()) throw GeometryError(path + ": trailing data after shifts");
        }
        return make_tri_mesh(std::move(v), std::move(t), std::move(sh));
    } catch (const std::invalid_argument&) {
        throw GeometryError(path + ": malformed number");
    } catch (const std::out_of_range&) {
        throw GeometryError(path + ": number out of range");
    }
}

PolyMesh read_poly_mesh(const std::string& path) {
    TokenStream ts(read_tokens(path), path);
    try {
        const int nv = ts.integer(), nc = ts.integer();
        if (nv < 3 || nc < 1) throw GeometryError(path + ": bad header");
        std::vector<Vec2> v(nv);
        for (auto& x : v) {
            x.x() = ts.real();
            x.y() = ts.real();
        }
        std::vector<std::vector<int>> cells(nc);
        for (auto& cell : cells) {
            const int n = ts.integer();
            if (n < 3) throw GeometryError(path + ": polygon with fewer than 3 vertices");
            cell.resize(n);
            for (int& i : cell) i = ts.integer();
        }
        std::vector<std::vector<Vec2>> sh;
        if (!ts.done()) {
            if (ts.word() != "shifts") throw GeometryError(path + ": trailing data after connectivity");
            sh.resize(nc);
            for (int c = 0; c < nc; ++c) {
                sh[c].resize(cells[c].size());
                for (Vec2& d : sh[c]) {
                    d.x() = ts.real();
                    d.y() = ts.real();
                }
            }
            if (!ts.done()) throw GeometryError(path + ": trailing data after shifts");
        }
        return make_poly_mesh(std::move(v), std::move(cells), std::move(sh));
    } catch (const std::invalid_argument&) {
        throw GeometryError(path + ": malformed number");
    } catch (const std::out_of_range&) {
        throw GeometryError(path + ": number out of range");
    }
}

void write_tri_mesh(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write mesh file '" + path + "'");
    out << std::setprecision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
    for (const auto& x : mesh.vertices) out << x.x() << ' ' << x.y() << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (mesh.shifts.empty()) return;
    out << "shifts\n";
    for (const auto& a : mesh.shifts) {
        out << a[0].x() << ' ' << a[0].y() << ' ' << a[1].x() << ' ' << a[1].y() << ' ' << a[2].x() << ' ' << a[2].y()
            << '\n';
    }
}

void write_poly_mesh(const std::string& path, const PolyMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write mesh file '" + path + "'");
    out << std::setprecision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const auto& x : mesh.vertices) out << x.x() << ' ' << x.y() << '\n';
    for (const auto& c : mesh.cells) {
        out << c.size();
        for (int p : c) out << ' ' << p;
        out << '\n';
    }
    if (mesh.shifts.empty()) return;
    out << "shifts\n";
    for (const auto& a : mesh.shifts) {
        for (std::size_t k = 0; k < a.size(); ++k) out << (k ? " " : "") << a[k].x() << ' ' << a[k].y();
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Oriented graphs
// ---------------------------------------------------------------------------

Eigen::MatrixXd OrientedGraph::incidence() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_nodes, num_edges());
    for (int e = 0; e < num_edges(); ++e) {
        a(edges[e].first, e) += 1.0;
        a(edges[e].second, e) -= 1.0;
    }
    return a;
}

Eigen::MatrixXd OrientedGraph::laplacian() const {
    const Eigen::MatrixXd a = incidence();
    return a * a.transpose();
}

std::vector<std::vector<int>> OrientedGraph::components() const {
    std::vector<std::vector<int>> adj(num_nodes);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> seen(num_nodes, 0);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < num_nodes; ++s) {
        if (seen[s]) continue;
        comps.emplace_back();
        std::queue<int> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            comps.back().push_back(u);
            for (int w : adj[u]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push(w);
                }
            }
        }
    }
    return comps;
}

OrientedGraph element_graph(GraphKind kind, int k) {
    OrientedGraph g;
    // Edge lists are written 1-based to match the usual node numbering.
    auto from_one_based = [&g](std::initializer_list<std::pair<int, int>> list) {
        for (const auto& [a, b] : list) g.edges.emplace_back(a - 1, b - 1);
    };
    switch (kind) {
    case GraphKind::triangle_p1:
        g.name = "triangle-P1";
        g.num_nodes = 3;
        from_one_based({{1, 2}, {2, 3}, {3, 1}});
        break;
    case GraphKind::triangle_p2:
        // nodes 1-3 vertices, 4 = mid(1,2), 5 = mid(2,3), 6 = mid(3,1)
        g.name = "triangle-P2-lattice";
        g.num_nodes = 6;
        from_one_based({{1, 4}, {1, 6}, {4, 6}, {5, 4}, {4, 2}, {2, 5}, {5, 3}, {6, 3}, {6, 5}});
        break;
    case GraphKind::quad_dg:
        g.name = "quad-dG-P3-lattice";
        g.num_nodes = 9;
        from_one_based({{1, 5}, {5, 2}, {2, 6}, {6, 3}, {3, 7}, {7, 4},
                        {4, 8}, {8, 1}, {7, 9}, {9, 8}, {6, 9}, {5, 9}});
        break;
    case GraphKind::node_cycle:
        if (k < 3) throw ArgumentError("node-cycle graph needs K >= 3, got " + std::to_string(k));
        g.name = "node-cycle(" + std::to_string(k) + ")";
        g.num_nodes = k;
        g.circulant = true;
        // edge j joins cell j-1 to cell j
        for (int j = 0; j < k; ++j) g.edges.emplace_back((j + k - 1) % k, j);
        break;
    }
    return g;
}

}  // namespace rfv
