#pragma once

#include "nehari/mesh.hpp"
#include "nehari/metric.hpp"

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <vector>

namespace nehari {

class InjectivityError : public std::runtime_error {
public:
    InjectivityError(double radius, double estimate);
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

/// First-arrival distances from a vertex source under a per-triangle
/// metric. Each vertex also carries the unit ambient direction of the
/// arriving characteristic.
struct DistanceField {
    std::vector<double> distance;   // +inf where the front never arrived
    Eigen::MatrixXd direction;      // N x V, zero at the source and unreached vertices
    double first_collision = std::numeric_limits<double>::infinity();
};

/// Fast marching with virtual-source triangle updates; the one-ring of the
/// source is initialized with exact edge lengths. Marching stops once the
/// accepted distance exceeds `stop_radius`.
DistanceField fast_marching(const SurfaceMesh& mesh, const MetricField& metric, int source,
                            double stop_radius = std::numeric_limits<double>::infinity());

/// Conservative injectivity radius at q: 0.8 times the distance at which
/// the marching front first collides with itself.
double injectivity_estimate(const SurfaceMesh& mesh, const MetricField& metric, int source);

struct PolarEntry {
    int vertex = 0;
    double distance = 0.0;
    Eigen::VectorXd direction;
};

/// Discrete normal polar coordinates on B_g(q, R). Throws InjectivityError
/// when R exceeds the injectivity estimate at q.
std::vector<PolarEntry> exp_map(const SurfaceMesh& mesh, const MetricField& metric, int q, double radius);

/// Geodesic distances to all vertices inside B_g(q, R) (inf elsewhere),
/// with the same injectivity guard as exp_map.
std::vector<double> geodesic_ball(const SurfaceMesh& mesh, const MetricField& metric, int q, double radius);

}  // namespace nehari
