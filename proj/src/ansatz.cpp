#include "nehari/ansatz.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace nehari {

double cutoff(double t, double radius)
{
    if (t <= 0.5 * radius) return 1.0;
    if (t >= radius) return 0.0;
    const double s = (t - 0.5 * radius) / (0.5 * radius);
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

double cutoff_slope(double t, double radius)
{
    if (t <= 0.5 * radius || t >= radius) return 0.0;
    const double s = (t - 0.5 * radius) / (0.5 * radius);
    return -6.0 * s * (1.0 - s) / (0.5 * radius);
}

double default_cutoff_radius(const EnergySetting& s, int q)
{
    return 0.8 * injectivity_estimate(*s.mesh, s.metric, q);
}

SpikeAnsatz build_ansatz(const EnergySetting& s, const RadialProfile& profile, int q, double radius)
{
    if (radius <= 0.0) radius = default_cutoff_radius(s, q);
    const std::vector<double> dist = geodesic_ball(*s.mesh, s.metric, q, radius);
    SpikeAnsatz w;
    w.center = q;
    w.eps = s.eps;
    w.radius = radius;
    w.field = Eigen::VectorXd::Zero(s.size());
    for (int v = 0; v < s.size(); ++v) {
        if (dist[v] < radius) w.field(v) = scale_profile(profile, s.eps, dist[v]) * cutoff(dist[v], radius);
    }
    w.t = nehari_t(s, w.field);
    w.energy_after_projection = energy(s, w.projected());
    return w;
}

Eigen::VectorXd phi(const EnergySetting& s, const RadialProfile& profile, int q, double radius)
{
    return build_ansatz(s, profile, q, radius).projected();
}

namespace {

// Closest point on triangle abc to x; only dot products, so any R^N works.
Eigen::VectorXd closest_on_triangle(const Eigen::VectorXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c)
{
    const Eigen::VectorXd ab = b - a, ac = c - a, ap = x - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    const Eigen::VectorXd bp = x - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
    const Eigen::VectorXd cp = x - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

double distance_to_mesh(const SurfaceMesh& mesh, const Eigen::VectorXd& x)
{
    double best = std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd& pts = mesh.points();
    for (const auto& tri : mesh.triangles()) {
        const Eigen::VectorXd a = pts.col(tri[0]), b = pts.col(tri[1]), c = pts.col(tri[2]);
        // cheap reject: the triangle lies within its circumscribing ball around a
        const double reach = std::max((b - a).norm(), (c - a).norm());
        if ((x - a).norm() - reach >= best) continue;
        best = std::min(best, (x - closest_on_triangle(x, a, b, c)).norm());
    }
    return best;
}

Barycenter barycenter(const EnergySetting& s, const SurfaceMesh& mesh, const Eigen::VectorXd& u)
{
    const Eigen::VectorXd w = s.mass.cwiseProduct(
        u.unaryExpr([p = s.params.p](double x) { return x > 0.0 ? std::pow(x, p) : 0.0; }));
    const double total = w.sum();
    if (!(total > 0.0)) throw std::domain_error("barycenter undefined: u⁺ = 0");
    Barycenter b;
    b.point = mesh.points() * w / total;
    b.distance_to_mesh = distance_to_mesh(mesh, b.point);
    return b;
}

bool in_tubular_neighborhood(const Barycenter& b, double r)
{
    if (!(r > 0.0)) throw std::invalid_argument("tubular radius must be positive");
    return b.distance_to_mesh < r;
}

double reach_proxy(const SurfaceMesh& mesh)
{
    const int nv = mesh.num_vertices();
    const int dim = mesh.ambient_dim();
    std::vector<Eigen::MatrixXd> tangent(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        const auto& star = mesh.vertex_triangles()[v];
        Eigen::MatrixXd stacked(dim, 2 * static_cast<Eigen::Index>(star.size()));
        for (std::size_t k = 0; k < star.size(); ++k) {
            stacked.middleCols(2 * static_cast<Eigen::Index>(k), 2) = mesh.frames()[star[k]].basis;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
        tangent[v] = svd.matrixU().leftCols(2);
    }
    double radius = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.edges()) {
        for (int side = 0; side < 2; ++side) {
            const int v = e[side], w = e[1 - side];
            const Eigen::VectorXd d = mesh.point(w) - mesh.point(v);
            const Eigen::VectorXd normal = d - tangent[v] * (tangent[v].transpose() * d);
            const double off = normal.norm();
            if (off > 1e-14 * d.norm()) radius = std::min(radius, d.squaredNorm() / (2.0 * off));
        }
    }
    return 0.5 * radius;
}

double concentrated_energy(const EnergySetting& s, const Eigen::VectorXd& u, double radius)
{
    Eigen::Index q = 0;
    u.maxCoeff(&q);
    const DistanceField field = fast_marching(*s.mesh, s.metric, static_cast<int>(q), radius);
    const double p = s.params.p;
    double total = 0.0;
    for (int v = 0; v < s.size(); ++v) {
        if (field.distance[v] < radius && u(v) > 0.0) total += s.mass(v) * std::pow(u(v), p);
    }
    return (0.5 - 1.0 / p) * s.scale * total;
}

}  // namespace nehari
