#pragma once

#include "nehari/mesh.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nehari {

/// Low-order harmonic of one normalized coordinate y in [-1, 1]:
/// cos(order·π·y) or sin(order·π·y).
struct HarmonicFactor {
    int coordinate = 0;
    int order = 1;
    bool sine = false;

    double operator()(double y) const;
};

/// One smooth mode of an ambient symmetric tensor field:
/// phi(x) * A, where phi is a product of up to three coordinate harmonics
/// and A is a symmetric N x N matrix.
struct PerturbationMode {
    std::vector<HarmonicFactor> factors;  // at most 3
    Eigen::MatrixXd matrix;               // symmetric, N x N
};

/// Symmetric 2-tensor h on the surface, given as the tangential restriction
/// of an ambient field. Coordinates enter normalized as (x_c - center_c) / scale_c.
struct PerturbationTensor {
    std::vector<PerturbationMode> modes;
    Eigen::VectorXd center;
    Eigen::VectorXd scale;
    int k = 2;
    double rho = 0.0;
    std::uint64_t seed = 0;

    bool is_zero() const { return modes.empty(); }
    /// Ambient tensor at x.
    Eigen::MatrixXd ambient(const Eigen::VectorXd& x) const;
    /// Components in the orthonormal frame of triangle t, evaluated at x.
    Eigen::Matrix2d components(const TriangleFrame& frame, const Eigen::VectorXd& x) const;
    PerturbationTensor scaled(double factor) const;
};

/// Zero tensor sized for the mesh (normalization constants from the
/// bounding box).
PerturbationTensor zero_perturbation(const SurfaceMesh& mesh);

/// Per-triangle metric g = g0 + h in the triangle's orthonormal frame
/// (so the induced metric g0 is the identity in every chart).
class MetricField {
public:
    MetricField() = default;
    explicit MetricField(std::vector<Eigen::Matrix2d> tensors, bool perturbed);

    const Eigen::Matrix2d& operator[](std::size_t t) const { return tensors_[t]; }
    std::size_t size() const { return tensors_.size(); }
    bool perturbed() const { return perturbed_; }

    /// sqrt(det g) per triangle.
    double volume_factor(std::size_t t) const;

    /// c, C with c|ξ|^2 <= g(ξ,ξ) <= C|ξ|^2 on every triangle.
    struct Equivalence {
        double c = 0.0;
        double C = 0.0;
    };
    Equivalence equivalence() const;

private:
    std::vector<Eigen::Matrix2d> tensors_;
    bool perturbed_ = false;
};

MetricField induced_metric(const SurfaceMesh& mesh);
/// g0 + h with h evaluated at triangle centroids. Throws std::domain_error
/// when g0 + h fails to be positive definite somewhere.
MetricField perturbed_metric(const SurfaceMesh& mesh, const PerturbationTensor& h);

/// Discrete ||h||_k: per-triangle chart components with derivatives up to
/// order k from least-squares quadratic fits over the triangle star,
/// summed over multi-indices and components of the supremum over charts.
double tensor_norm(const PerturbationTensor& h, const SurfaceMesh& mesh, int k = 2);

/// Random smooth h with ||h||_k <= rho, rescaled after sampling. Harmonic
/// orders are drawn from 1..max_order.
PerturbationTensor sample_perturbation(const SurfaceMesh& mesh, double rho, std::uint64_t seed, int k = 2,
                                       int num_modes = 3, int max_order = 3);

/// Lumped vertex masses ∫ φ_i dμ_g.
Eigen::VectorXd lumped_mass(const SurfaceMesh& mesh, const MetricField& metric);

/// ∫_M f dμ_g for a piecewise-linear f given by vertex values.
double quadrature(const SurfaceMesh& mesh, const MetricField& metric, std::span<const double> integrand);
double quadrature(const SurfaceMesh& mesh, const MetricField& metric, const Eigen::VectorXd& integrand);

/// Isometric 2D coordinates of the three corners of triangle t under g.
std::array<Eigen::Vector2d, 3> isometric_corners(const TriangleFrame& frame, const Eigen::Matrix2d& g);

std::string perturbation_to_json(const PerturbationTensor& h);
PerturbationTensor perturbation_from_json(const std::string& text);

}  // namespace nehari
