#pragma once

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

class MeshError : public std::runtime_error {
public:
    explicit MeshError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;  // sorted vertex pair

/// Orthonormal tangent frame of one triangle and the chart coordinates of
/// its vertices (vertex 0 sits at the chart origin).
struct TriangleFrame {
    Eigen::MatrixXd basis;                // N x 2, orthonormal columns
    std::array<Eigen::Vector2d, 3> local;  // chart coordinates of the corners
    Eigen::VectorXd centroid;             // in R^N
    double area = 0.0;                    // Euclidean area
};

/// Closed triangulated surface embedded in R^N with its adjacency tables.
/// Construction validates the surface and throws MeshError listing every
/// violated invariant.
class SurfaceMesh {
public:
    SurfaceMesh(Eigen::MatrixXd points, std::vector<Triangle> triangles);

    int ambient_dim() const { return static_cast<int>(points_.rows()); }
    int num_vertices() const { return static_cast<int>(points_.cols()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }
    bool orientable() const { return orientable_; }

    const Eigen::MatrixXd& points() const { return points_; }
    Eigen::VectorXd point(int v) const { return points_.col(v); }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::array<int, 2>>& edge_triangles() const { return edge_triangles_; }
    const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
    const std::vector<std::vector<int>>& vertex_triangles() const { return vertex_triangles_; }
    const std::vector<std::vector<int>>& vertex_neighbors() const { return vertex_neighbors_; }
    const std::vector<TriangleFrame>& frames() const { return frames_; }

    /// Triangles sharing at least one vertex with t (t included).
    std::vector<int> triangle_star(int t) const;

    /// Euclidean surface area.
    double area() const;

    /// Smallest edge length in R^N.
    double min_edge_length() const;
    double mean_edge_length() const;

private:
    Eigen::MatrixXd points_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<std::vector<int>> vertex_triangles_;
    std::vector<std::vector<int>> vertex_neighbors_;
    std::vector<TriangleFrame> frames_;
    bool orientable_ = false;
};

/// ASCII OFF reader. "OFF" headers carry 3D points; "nOFF" is followed by
/// the ambient dimension. Faces must be triangles ("3 a b c").
SurfaceMesh load_mesh(const std::filesystem::path& path);
SurfaceMesh parse_mesh(const std::string& text);
void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const SurfaceMesh& mesh);

/// Raw point/triangle soup without validation (for constructing broken
/// inputs and refinements).
struct MeshData {
    Eigen::MatrixXd points;
    std::vector<Triangle> triangles;
};

MeshData parse_mesh_data(const std::string& text);
MeshData mesh_data(const SurfaceMesh& mesh);

/// Icosahedron with vertices at the poles, subdivided `level` times and
/// projected onto the unit sphere.
SurfaceMesh make_sphere(int level);
SurfaceMesh make_octahedron();
/// Flat torus of unit area: product of two regular m-gons in R^4, every
/// triangle is a right isosceles triangle with legs 1/m.
SurfaceMesh make_flat_torus(int m);
/// Antipodal quotient of make_sphere(level) embedded in R^6 by the
/// Veronese map. Level 0 is the six-vertex projective plane.
SurfaceMesh make_projective_plane(int level);

/// Midpoint 1-to-4 subdivision in the ambient space (no projection).
SurfaceMesh refine(const SurfaceMesh& mesh);

/// Generator keyed by shape name: sphere | torus | rp2 | octahedron.
/// For the torus, refine level L gives an (8·2^L)-gon product.
SurfaceMesh generate_mesh(const std::string& shape, int refine_level);

}  // namespace nehari
