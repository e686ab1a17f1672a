/// @file mesh.hpp
/// @brief 1D grids, triangulations, polygonal meshes, corner geometry and element graphs.
#pragma once

#include "rfv/core.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rfv {

// ---------------------------------------------------------------------------
// 1D
// ---------------------------------------------------------------------------

class Grid1D {
public:
    /// Throws GeometryError unless the interfaces are strictly increasing.
    explicit Grid1D(std::vector<double> interfaces);
    static Grid1D uniform(int n, double a, double b);

    int size() const { return static_cast<int>(x_.size()) - 1; }
    double dx(int i) const { return x_[i + 1] - x_[i]; }
    double center(int i) const { return 0.5 * (x_[i] + x_[i + 1]); }
    double left() const { return x_.front(); }
    double right() const { return x_.back(); }
    double min_dx() const;
    const std::vector<double>& interfaces() const { return x_; }

private:
    std::vector<double> x_;
};

// ---------------------------------------------------------------------------
// Triangulations
// ---------------------------------------------------------------------------

/// Conforming triangulation. Optional per-corner offsets make periodic
/// meshes possible: the position of vertex k of triangle t is
/// vertices[tri[t][k]] + shifts[t][k].
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<Vec2, 3>> shifts;

    // derived by finalize()
    std::vector<double> area;
    std::vector<std::array<Vec2, 3>> normals;  ///< scaled inward normal of the edge opposite each vertex
    std::vector<double> dual_area;             ///< |C_sigma| (median dual)

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    Vec2 position(int t, int k) const;
    double perimeter(int t) const;

    /// Computes areas, normals and dual areas. Throws GeometryError naming the
    /// first triangle with nonpositive area.
    void finalize();
};

/// Flips clockwise triangles to counterclockwise; zero-area triangles throw.
void canonicalize_ccw(TriMesh& mesh);

/// Builds a validated mesh (orientation canonicalized, derived data filled).
TriMesh make_tri_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                      std::vector<std::array<Vec2, 3>> shifts = {});

/// n x n squares on [0,L]^2 split into two triangles each. With `periodic`
/// the opposite sides are identified. `jitter` moves interior (or, when
/// periodic, all) vertices by up to jitter*h in each direction.
TriMesh structured_tri_mesh(int n, double length, bool periodic, double jitter = 0.0,
                            std::uint64_t seed = 1);

struct DualCells {
    std::vector<double> area;  ///< |C_sigma|
    /// interface_normal[t][k]: normal of the dual interface between the cells
    /// of local vertices k and k+1 (mod 3) inside triangle t, pointing out of
    /// the cell of vertex k. Equals (n_{k+1} - n_k)/6 with inward n.
    std::vector<std::array<Vec2, 3>> interface_normal;
    /// Outward boundary normal of C_sigma ∩ K on ∂K; equals n_sigma/2.
    std::vector<std::array<Vec2, 3>> boundary_normal;
};

/// Median-dual cells. Throws GeometryError for inverted triangles or edges
/// shared by more than two triangles or with inconsistent orientation.
DualCells build_dual_cells(const TriMesh& mesh);

// ---------------------------------------------------------------------------
// Polygonal meshes
// ---------------------------------------------------------------------------

struct PolyMesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> cells;
    std::vector<std::vector<Vec2>> shifts;  ///< optional periodic offsets, same layout as cells

    /// node_cells[p] lists (cell, local index) pairs; built by finalize().
    std::vector<std::vector<std::pair<int, int>>> node_cells;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    Vec2 position(int c, int k) const;
    double volume(int c) const;
    double perimeter(int c) const;
    Vec2 centroid(int c) const;

    void finalize();
};

/// Validates, orients counterclockwise and finalizes.
PolyMesh make_poly_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells,
                        std::vector<std::vector<Vec2>> shifts = {});

/// nx x ny quadrilaterals on [0,lx]x[0,ly]; same periodic/jitter rules as
/// structured_tri_mesh.
PolyMesh cartesian_poly_mesh(int nx, int ny, double lx, double ly, bool periodic,
                             double jitter = 0.0, std::uint64_t seed = 1);

/// Volume of a polygon from its counterclockwise vertex list.
double polygon_volume(const std::vector<Vec2>& x);

struct Subface {
    double length = 0.0;  ///< l_pcf
    Vec2 normal;          ///< unit outward n_pcf
};

struct Corner {
    int node = -1;
    Vec2 ln;                     ///< l_pc n_pc
    std::array<Subface, 2> sub;  ///< [0]: half of edge (p-, p); [1]: half of edge (p, p+)
    double length() const { return ln.norm(); }
};

/// corners[c][k] is the corner of cell c at its local vertex k.
struct CornerGeometry {
    std::vector<std::vector<Corner>> corners;
};

/// l_pc n_pc = ½ (x_{p+} - x_{p-}) × e_z plus both subfaces.
/// Throws GeometryError on zero-length edges.
CornerGeometry corner_geometry(const PolyMesh& mesh);

/// One half-face seen from node p: the subface of corner (p, c) and, unless it
/// lies on the boundary, the matching subface of the neighbour corner (p, d).
struct NodeFace {
    int cell = -1, local = -1, side = -1;             ///< left corner and its subface slot
    int nb_cell = -1, nb_local = -1, nb_side = -1;    ///< right corner, -1 on boundary
    bool boundary() const { return nb_cell < 0; }
};

/// node_faces[p] lists every half-face touching p.
std::vector<std::vector<NodeFace>> node_faces(const PolyMesh& mesh);

// ---------------------------------------------------------------------------
// Mesh files
// ---------------------------------------------------------------------------

/// Plain text: "nv nc", nv vertex lines "x y", then one line per cell
/// ("i j k" for triangles, "m i_1 .. i_m" for polygons). An optional
/// "shifts" section gives the periodic offset "dx dy" of every cell corner.
/// Malformed files throw GeometryError.
TriMesh read_tri_mesh(const std::string& path);
PolyMesh read_poly_mesh(const std::string& path);
void write_tri_mesh(const std::string& path, const TriMesh& mesh);
void write_poly_mesh(const std::string& path, const PolyMesh& mesh);

// ---------------------------------------------------------------------------
// Oriented graphs
// ---------------------------------------------------------------------------

enum class GraphKind { triangle_p1, triangle_p2, quad_dg, node_cycle };

/// Edge e = (a, b) has A(a, e) = +1 and A(b, e) = -1.
struct OrientedGraph {
    std::string name;
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    bool circulant = false;

    int num_edges() const { return static_cast<int>(edges.size()); }
    Eigen::MatrixXd incidence() const;
    Eigen::MatrixXd laplacian() const;
    /// Connected components by breadth-first traversal.
    std::vector<std::vector<int>> components() const;
};

/// `k` is the cycle length for node_cycle; throws ArgumentError if k < 3.
OrientedGraph element_graph(GraphKind kind, int k = 0);

}  // namespace rfv
