#include "nehari/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>

namespace nehari {

namespace {

std::string join_problems(const std::vector<std::string>& problems)
{
    std::string out = "invalid mesh";
    for (const auto& p : problems) {
        out += "; " + p;
    }
    return out;
}

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

TriangleFrame build_frame(const Eigen::MatrixXd& pts, const Triangle& t)
{
    TriangleFrame f;
    const Eigen::VectorXd p0 = pts.col(t[0]);
    const Eigen::VectorXd a = pts.col(t[1]) - p0;
    const Eigen::VectorXd b = pts.col(t[2]) - p0;
    const Eigen::Index n = pts.rows();
    f.basis.resize(n, 2);
    const double la = a.norm();
    Eigen::VectorXd e1 = la > 0 ? Eigen::VectorXd(a / la) : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = b - b.dot(e1) * e1;
    const double lw = w.norm();
    Eigen::VectorXd e2 = lw > 0 ? Eigen::VectorXd(w / lw) : Eigen::VectorXd::Zero(n);
    f.basis.col(0) = e1;
    f.basis.col(1) = e2;
    f.local[0] = Eigen::Vector2d::Zero();
    f.local[1] = Eigen::Vector2d(la, 0.0);
    f.local[2] = Eigen::Vector2d(b.dot(e1), b.dot(e2));
    f.centroid = (pts.col(t[0]) + pts.col(t[1]) + pts.col(t[2])) / 3.0;
    f.area = 0.5 * la * lw;
    return f;
}

}  // namespace

MeshError::MeshError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems))
{
}

SurfaceMesh::SurfaceMesh(Eigen::MatrixXd points, std::vector<Triangle> triangles)
    : points_(std::move(points)), triangles_(std::move(triangles))
{
    std::vector<std::string> problems;
    const int nv = num_vertices();
    if (points_.rows() < 2) {
        problems.push_back("ambient dimension must be at least 2");
    }
    if (nv == 0 || triangles_.empty()) {
        problems.push_back("empty mesh");
        throw MeshError(problems);
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || v >= nv) {
                problems.push_back("triangle " + std::to_string(t) + " references missing vertex " + std::to_string(v));
                throw MeshError(problems);
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            problems.push_back("triangle " + std::to_string(t) + " repeats a vertex");
            throw MeshError(problems);
        }
    }

    std::map<Edge, int> edge_index;
    triangle_edges_.resize(triangles_.size());
    std::vector<std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const Edge e = make_edge(tri[(k + 1) % 3], tri[(k + 2) % 3]);
            auto [it, inserted] = edge_index.try_emplace(e, static_cast<int>(edges_.size()));
            if (inserted) {
                edges_.push_back(e);
                edge_tris.emplace_back();
            }
            triangle_edges_[t][k] = it->second;  // edge opposite corner k
            edge_tris[it->second].push_back(static_cast<int>(t));
        }
    }

    int boundary = 0;
    int nonmanifold = 0;
    edge_triangles_.resize(edges_.size(), {-1, -1});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edge_tris[e].size() == 1) {
            ++boundary;
        } else if (edge_tris[e].size() > 2) {
            ++nonmanifold;
        }
        for (std::size_t k = 0; k < std::min<std::size_t>(2, edge_tris[e].size()); ++k) {
            edge_triangles_[e][k] = edge_tris[e][k];
        }
    }
    if (boundary > 0) {
        problems.push_back("non-closed: " + std::to_string(boundary) + " boundary edges");
    }
    if (nonmanifold > 0) {
        problems.push_back("non-manifold: " + std::to_string(nonmanifold) + " edges shared by more than 2 triangles");
    }

    vertex_triangles_.assign(static_cast<std::size_t>(nv), {});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int v : triangles_[t]) {
            vertex_triangles_[v].push_back(static_cast<int>(t));
        }
    }
    vertex_neighbors_.assign(static_cast<std::size_t>(nv), {});
    DisjointSets components(nv);
    for (const auto& e : edges_) {
        vertex_neighbors_[e[0]].push_back(e[1]);
        vertex_neighbors_[e[1]].push_back(e[0]);
        components.unite(e[0], e[1]);
    }
    int isolated = 0;
    for (int v = 0; v < nv; ++v) {
        if (vertex_triangles_[v].empty()) {
            ++isolated;
        }
    }
    if (isolated > 0) {
        problems.push_back("unused vertices: " + std::to_string(isolated));
    }
    int num_components = 0;
    for (int v = 0; v < nv; ++v) {
        if (components.find(v) == v) {
            ++num_components;
        }
    }
    if (num_components > 1) {
        problems.push_back("disconnected: " + std::to_string(num_components) + " components");
    }

    frames_.reserve(triangles_.size());
    int degenerate = 0;
    for (const auto& tri : triangles_) {
        frames_.push_back(build_frame(points_, tri));
        if (!(frames_.back().area > 1e-12)) {
            ++degenerate;
        }
    }
    if (degenerate > 0) {
        problems.push_back("degenerate: " + std::to_string(degenerate) + " triangles with area <= 1e-12");
    }

    if (!problems.empty()) {
        throw MeshError(problems);
    }

    // Orientability: propagate a consistent winding across shared edges.
    std::vector<int> sign(triangles_.size(), 0);
    orientable_ = true;
    for (std::size_t start = 0; start < triangles_.size(); ++start) {
        if (sign[start] != 0) continue;
        sign[start] = 1;
        std::queue<int> pending;
        pending.push(static_cast<int>(start));
        while (!pending.empty()) {
            const int t = pending.front();
            pending.pop();
            const auto& tri = triangles_[t];
            for (int k = 0; k < 3; ++k) {
                const int a = tri[(k + 1) % 3];
                const int b = tri[(k + 2) % 3];
                const int e = triangle_edges_[t][k];
                const int other = edge_triangles_[e][0] == t ? edge_triangles_[e][1] : edge_triangles_[e][0];
                // Directed edge a->b in t; a consistent neighbour traverses b->a.
                const auto& ot = triangles_[other];
                bool same_direction = false;
                for (int j = 0; j < 3; ++j) {
                    if (ot[j] == a && ot[(j + 1) % 3] == b) same_direction = true;
                }
                const int wanted = same_direction ? -sign[t] : sign[t];
                if (sign[other] == 0) {
                    sign[other] = wanted;
                    pending.push(other);
                } else if (sign[other] != wanted) {
                    orientable_ = false;
                }
            }
        }
    }
}

std::vector<int> SurfaceMesh::triangle_star(int t) const
{
    std::vector<int> star;
    for (int v : triangles_[t]) {
        star.insert(star.end(), vertex_triangles_[v].begin(), vertex_triangles_[v].end());
    }
    std::sort(star.begin(), star.end());
    star.erase(std::unique(star.begin(), star.end()), star.end());
    return star;
}

double SurfaceMesh::area() const
{
    double total = 0.0;
    for (const auto& f : frames_) total += f.area;
    return total;
}

double SurfaceMesh::min_edge_length() const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : edges_) best = std::min(best, (points_.col(e[0]) - points_.col(e[1])).norm());
    return best;
}

double SurfaceMesh::mean_edge_length() const
{
    double total = 0.0;
    for (const auto& e : edges_) total += (points_.col(e[0]) - points_.col(e[1])).norm();
    return total / static_cast<double>(edges_.size());
}

// ---------------------------------------------------------------------------
// OFF input/output

MeshData parse_mesh_data(const std::string& text)
{
    std::istringstream raw(text);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(raw, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    std::size_t pos = 0;
    auto next = [&](const char* what) -> const std::string& {
        if (pos >= tokens.size()) throw MeshError({std::string("parse failure: unexpected end of file reading ") + what});
        return tokens[pos++];
    };
    auto next_int = [&](const char* what) {
        const std::string& tok = next(what);
        try {
            std::size_t used = 0;
            long value = std::stol(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return static_cast<int>(value);
        } catch (const std::exception&) {
            throw MeshError({std::string("parse failure: expected integer for ") + what + ", got '" + tok + "'"});
        }
    };
    auto next_double = [&](const char* what) {
        const std::string& tok = next(what);
        try {
            std::size_t used = 0;
            double value = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return value;
        } catch (const std::exception&) {
            throw MeshError({std::string("parse failure: expected number for ") + what + ", got '" + tok + "'"});
        }
    };

    const std::string header = next("header");
    int dim = 3;
    if (header == "nOFF") {
        dim = next_int("dimension");
    } else if (header != "OFF") {
        throw MeshError({"parse failure: header must be OFF or nOFF, got '" + header + "'"});
    }
    if (dim < 2) throw MeshError({"parse failure: dimension must be >= 2"});
    const int nv = next_int("vertex count");
    const int nf = next_int("face count");
    next_int("edge count");
    if (nv < 0 || nf < 0) throw MeshError({"parse failure: negative counts"});

    MeshData data;
    data.points.resize(dim, nv);
    for (int v = 0; v < nv; ++v) {
        for (int d = 0; d < dim; ++d) data.points(d, v) = next_double("vertex coordinate");
    }
    data.triangles.reserve(static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
        const int arity = next_int("face arity");
        if (arity != 3) throw MeshError({"parse failure: face " + std::to_string(f) + " is not a triangle"});
        Triangle t{next_int("face index"), next_int("face index"), next_int("face index")};
        data.triangles.push_back(t);
    }
    if (pos != tokens.size()) throw MeshError({"parse failure: trailing tokens after faces"});
    return data;
}

SurfaceMesh parse_mesh(const std::string& text)
{
    MeshData data = parse_mesh_data(text);
    return SurfaceMesh(std::move(data.points), std::move(data.triangles));
}

SurfaceMesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError({"cannot open mesh file '" + path.string() + "'"});
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_mesh(buffer.str());
}

MeshData mesh_data(const SurfaceMesh& mesh) { return {mesh.points(), mesh.triangles()}; }

std::string format_mesh(const SurfaceMesh& mesh)
{
    std::ostringstream out;
    out << std::setprecision(17);
    if (mesh.ambient_dim() == 3) {
        out << "OFF\n";
    } else {
        out << "nOFF\n" << mesh.ambient_dim() << "\n";
    }
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges() << '\n';
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        for (int d = 0; d < mesh.ambient_dim(); ++d) out << (d ? " " : "") << mesh.points()(d, v);
        out << '\n';
    }
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    return out.str();
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file '" + path.string() + "'");
    out << format_mesh(mesh);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

MeshData subdivide(const MeshData& in, bool project_to_sphere)
{
    MeshData out;
    std::vector<Eigen::VectorXd> pts;
    for (Eigen::Index v = 0; v < in.points.cols(); ++v) pts.push_back(in.points.col(v));
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
        const Edge e = make_edge(a, b);
        if (auto it = midpoint.find(e); it != midpoint.end()) return it->second;
        Eigen::VectorXd m = 0.5 * (pts[e[0]] + pts[e[1]]);
        if (project_to_sphere) m.normalize();
        pts.push_back(m);
        const int idx = static_cast<int>(pts.size()) - 1;
        midpoint.emplace(e, idx);
        return idx;
    };
    for (const auto& t : in.triangles) {
        const int ab = mid(t[0], t[1]);
        const int bc = mid(t[1], t[2]);
        const int ca = mid(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    out.points.resize(in.points.rows(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t v = 0; v < pts.size(); ++v) out.points.col(static_cast<Eigen::Index>(v)) = pts[v];
    return out;
}

MeshData icosahedron_data()
{
    MeshData d;
    d.points.resize(3, 12);
    const double z = 1.0 / std::sqrt(5.0);
    const double rho = 2.0 / std::sqrt(5.0);
    d.points.col(0) << 0.0, 0.0, 1.0;
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 5.0;
        const double b = a + std::numbers::pi / 5.0;
        d.points.col(1 + k) << rho * std::cos(a), rho * std::sin(a), z;
        d.points.col(6 + k) << rho * std::cos(b), rho * std::sin(b), -z;
    }
    d.points.col(11) << 0.0, 0.0, -1.0;
    for (int k = 0; k < 5; ++k) {
        const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
        const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
        d.triangles.push_back({0, u0, u1});
        d.triangles.push_back({u0, l0, u1});
        d.triangles.push_back({u1, l0, l1});
        d.triangles.push_back({11, l1, l0});
    }
    return d;
}

void orient_outward(MeshData& d)
{
    for (auto& t : d.triangles) {
        const Eigen::Vector3d a = d.points.col(t[0]);
        const Eigen::Vector3d b = d.points.col(t[1]);
        const Eigen::Vector3d c = d.points.col(t[2]);
        if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(t[1], t[2]);
    }
}

MeshData sphere_data(int level)
{
    MeshData d = icosahedron_data();
    for (int i = 0; i < level; ++i) d = subdivide(d, true);
    orient_outward(d);
    return d;
}

}  // namespace

SurfaceMesh make_sphere(int level)
{
    if (level < 0) throw std::invalid_argument("sphere refine level must be >= 0");
    MeshData d = sphere_data(level);
    return SurfaceMesh(std::move(d.points), std::move(d.triangles));
}

SurfaceMesh make_octahedron()
{
    Eigen::MatrixXd pts(3, 6);
    pts << 1, -1, 0, 0, 0, 0,
           0, 0, 1, -1, 0, 0,
           0, 0, 0, 0, 1, -1;
    std::vector<Triangle> tris{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                               {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh make_flat_torus(int m)
{
    if (m < 4) throw std::invalid_argument("flat torus needs at least 4 subdivisions per side");
    const double side = 1.0 / m;
    const double radius = side / (2.0 * std::sin(std::numbers::pi / m));
    Eigen::MatrixXd pts(4, m * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double a = 2.0 * std::numbers::pi * i / m;
            const double b = 2.0 * std::numbers::pi * j / m;
            pts.col(i * m + j) << radius * std::cos(a), radius * std::sin(a), radius * std::cos(b), radius * std::sin(b);
        }
    }
    std::vector<Triangle> tris;
    auto id = [m](int i, int j) { return ((i + m) % m) * m + (j + m) % m; };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh make_projective_plane(int level)
{
    if (level < 0) throw std::invalid_argument("rp2 refine level must be >= 0");
    const MeshData s = sphere_data(level);
    const auto nv = static_cast<int>(s.points.cols());
    std::vector<int> antipode(static_cast<std::size_t>(nv), -1);
    for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nv; ++w) {
            if ((s.points.col(v) + s.points.col(w)).norm() < 1e-9) {
                antipode[v] = w;
                break;
            }
        }
        if (antipode[v] < 0) throw std::logic_error("sphere mesh is not centrally symmetric");
    }
    std::vector<int> rep_index(static_cast<std::size_t>(nv), -1);
    std::vector<int> reps;
    for (int v = 0; v < nv; ++v) {
        const int r = std::min(v, antipode[v]);
        if (rep_index[r] < 0) {
            rep_index[r] = static_cast<int>(reps.size());
            reps.push_back(r);
        }
        rep_index[v] = rep_index[r];
    }
    Eigen::MatrixXd pts(6, static_cast<Eigen::Index>(reps.size()));
    const double root2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const Eigen::Vector3d x = s.points.col(reps[i]);
        pts.col(static_cast<Eigen::Index>(i)) << x(0) * x(0), x(1) * x(1), x(2) * x(2), root2 * x(0) * x(1),
            root2 * x(0) * x(2), root2 * x(1) * x(2);
    }
    std::map<std::array<int, 3>, bool> seen;
    std::vector<Triangle> tris;
    for (const auto& t : s.triangles) {
        Triangle q{rep_index[t[0]], rep_index[t[1]], rep_index[t[2]]};
        std::array<int, 3> key = q;
        std::sort(key.begin(), key.end());
        if (seen.emplace(key, true).second) tris.push_back(q);
    }
    return SurfaceMesh(std::move(pts), std::move(tris));
}

SurfaceMesh refine(const SurfaceMesh& mesh)
{
    MeshData d = subdivide(mesh_data(mesh), false);
    return SurfaceMesh(std::move(d.points), std::move(d.triangles));
}

SurfaceMesh generate_mesh(const std::string& shape, int refine_level)
{
    if (refine_level < 0) throw std::invalid_argument("refine level must be >= 0");
    if (shape == "sphere") return make_sphere(refine_level);
    if (shape == "torus") return make_flat_torus(8 << refine_level);
    if (shape == "rp2") return make_projective_plane(refine_level);
    if (shape == "octahedron") {
        SurfaceMesh m = make_octahedron();
        for (int i = 0; i < refine_level; ++i) m = refine(m);
        return m;
    }
    throw std::invalid_argument("unknown shape '" + shape + "' (expected sphere, torus, rp2 or octahedron)");
}

}  // namespace nehari
