#include "nehari/geodesic.hpp"

#include <cmath>
#include <optional>
#include <queue>
#include <sstream>

namespace nehari {

namespace {

constexpr double kInjectivitySafety = 0.8;
// Adjacent accepted vertices whose arrival directions differ by more than
// 120 degrees sit on opposite sides of the cut locus.
constexpr double kCollisionCosine = -0.5;

struct Arrival {
    double distance;
    Eigen::Vector2d direction;  // unit, isometric chart of the triangle
};

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

// Distance at C from a virtual point source consistent with the known
// distances at A and B, provided the ray from that source to C crosses AB.
std::optional<Arrival> two_point_update(const Eigen::Vector2d& qa, double da, const Eigen::Vector2d& qb, double db,
                                        const Eigen::Vector2d& qc)
{
    const Eigen::Vector2d ab = qb - qa;
    const double c = ab.norm();
    if (!(c > 0.0)) return std::nullopt;
    const Eigen::Vector2d ux = ab / c;
    Eigen::Vector2d uy = perp(ux);
    if ((qc - qa).dot(uy) < 0.0) uy = -uy;
    const double xc = (qc - qa).dot(ux);
    const double yc = (qc - qa).dot(uy);
    const double xs = (da * da - db * db + c * c) / (2.0 * c);
    const double ys2 = da * da - xs * xs;
    if (ys2 < 0.0) return std::nullopt;
    const double ys = -std::sqrt(ys2);
    const double t = -ys / (yc - ys);
    const double xh = xs + t * (xc - xs);
    if (xh < 0.0 || xh > c) return std::nullopt;
    const Eigen::Vector2d ray = (xc - xs) * ux + (yc - ys) * uy;
    const double d = ray.norm();
    if (d < std::max(da, db)) return std::nullopt;
    return Arrival{d, ray / d};
}

struct TriangleGeometry {
    std::array<Eigen::Vector2d, 3> corners;
    Eigen::Matrix2d to_chart;  // isometric vector -> chart vector
};

}  // namespace

InjectivityError::InjectivityError(double radius, double estimate)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "radius " << radius << " exceeds the injectivity radius estimate " << estimate;
          return msg.str();
      }()),
      estimate_(estimate)
{
}

static DistanceField fast_marching_impl(const SurfaceMesh& mesh, const MetricField& metric, int source, double stop_radius,
                                 bool stop_on_collision)
{
    const int nv = mesh.num_vertices();
    if (source < 0 || source >= nv) throw std::out_of_range("fast_marching: source vertex out of range");
    const auto& tris = mesh.triangles();
    const auto& frames = mesh.frames();

    auto geometry = [&](int t) {
        TriangleGeometry g;
        const Eigen::Matrix2d u = metric[static_cast<std::size_t>(t)].llt().matrixU();
        g.corners = {u * frames[t].local[0], u * frames[t].local[1], u * frames[t].local[2]};
        g.to_chart = u.inverse();
        return g;
    };
    auto ambient = [&](int t, const TriangleGeometry& g, const Eigen::Vector2d& iso) {
        Eigen::VectorXd v = frames[t].basis * (g.to_chart * iso);
        const double len = v.norm();
        return len > 0 ? Eigen::VectorXd(v / len) : v;
    };

    DistanceField field;
    field.distance.assign(static_cast<std::size_t>(nv), std::numeric_limits<double>::infinity());
    field.direction = Eigen::MatrixXd::Zero(mesh.ambient_dim(), nv);
    std::vector<char> accepted(static_cast<std::size_t>(nv), 0);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    field.distance[source] = 0.0;
    heap.emplace(0.0, source);
    std::vector<char> ring(static_cast<std::size_t>(nv), 0);
    ring[source] = 1;
    for (int w : mesh.vertex_neighbors()[source]) ring[w] = 1;

    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (accepted[v] || d > field.distance[v]) continue;
        if (d > stop_radius) break;
        accepted[v] = 1;

        if (!ring[v]) {
            for (int w : mesh.vertex_neighbors()[v]) {
                if (ring[w] || !accepted[w]) continue;
                if (field.direction.col(v).dot(field.direction.col(w)) < kCollisionCosine) {
                    field.first_collision = std::min(field.first_collision, std::min(d, field.distance[w]));
                }
            }
            if (stop_on_collision && std::isfinite(field.first_collision)) break;
        }

        for (int t : mesh.vertex_triangles()[v]) {
            const auto& tri = tris[t];
            int iv = 0;
            while (tri[iv] != v) ++iv;
            const TriangleGeometry g = geometry(t);
            for (int step = 1; step <= 2; ++step) {
                const int ia = (iv + step) % 3;
                const int ib = (iv + 3 - step) % 3;
                const int a = tri[ia];
                const int b = tri[ib];
                if (accepted[a]) continue;
                std::optional<Arrival> best;
                if (accepted[b]) {
                    best = two_point_update(g.corners[iv], d, g.corners[ib], field.distance[b], g.corners[ia]);
                }
                auto consider_edge = [&](int from_corner, double from_distance) {
                    const Eigen::Vector2d e = g.corners[ia] - g.corners[from_corner];
                    const double cand = from_distance + e.norm();
                    if (!best || cand < best->distance) best = Arrival{cand, e / e.norm()};
                };
                if (!best) {
                    consider_edge(iv, d);
                    if (accepted[b]) consider_edge(ib, field.distance[b]);
                }
                if (best->distance < field.distance[a]) {
                    field.distance[a] = best->distance;
                    field.direction.col(a) = ambient(t, g, best->direction);
                    heap.emplace(best->distance, a);
                }
            }
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (!accepted[v]) {
            field.distance[v] = std::numeric_limits<double>::infinity();
            field.direction.col(v).setZero();
        }
    }
    return field;
}

DistanceField fast_marching(const SurfaceMesh& mesh, const MetricField& metric, int source, double stop_radius)
{
    return fast_marching_impl(mesh, metric, source, stop_radius, false);
}

double injectivity_estimate(const SurfaceMesh& mesh, const MetricField& metric, int source)
{
    const DistanceField field =
        fast_marching_impl(mesh, metric, source, std::numeric_limits<double>::infinity(), true);
    if (std::isfinite(field.first_collision)) return kInjectivitySafety * field.first_collision;
    double far = 0.0;
    for (double d : field.distance) {
        if (std::isfinite(d)) far = std::max(far, d);
    }
    return kInjectivitySafety * far;
}

namespace {

DistanceField guarded_ball(const SurfaceMesh& mesh, const MetricField& metric, int q, double radius)
{
    if (!(radius > 0.0)) throw std::invalid_argument("geodesic ball radius must be positive");
    const double horizon = radius / kInjectivitySafety;
    DistanceField field = fast_marching_impl(mesh, metric, q, horizon, false);
    if (field.first_collision < horizon) {
        throw InjectivityError(radius, kInjectivitySafety * field.first_collision);
    }
    return field;
}

}  // namespace

std::vector<PolarEntry> exp_map(const SurfaceMesh& mesh, const MetricField& metric, int q, double radius)
{
    const DistanceField field = guarded_ball(mesh, metric, q, radius);
    std::vector<PolarEntry> chart;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (field.distance[v] < radius) chart.push_back({v, field.distance[v], field.direction.col(v)});
    }
    return chart;
}

std::vector<double> geodesic_ball(const SurfaceMesh& mesh, const MetricField& metric, int q, double radius)
{
    DistanceField field = guarded_ball(mesh, metric, q, radius);
    for (double& d : field.distance) {
        if (!(d < radius)) d = std::numeric_limits<double>::infinity();
    }
    return field.distance;
}

}  // namespace nehari
