#pragma once

#include "nehari/functional.hpp"
#include "nehari/geodesic.hpp"
#include "nehari/limit_profile.hpp"

#include <Eigen/Dense>

namespace nehari {

/// Cutoff χ_R: 1 on [0, R/2], 0 on [R, ∞), cubic Hermite blend between.
/// The blend is C¹ and monotone with max |χ'| = 3/R.
double cutoff(double t, double radius);
double cutoff_slope(double t, double radius);

struct SpikeAnsatz {
    int center = 0;
    double eps = 0.0;
    double radius = 0.0;
    Eigen::VectorXd field;  // w = U_eps(d(q,·)) χ_R(d(q,·))
    double t = 1.0;         // Nehari factor of w
    double energy_after_projection = 0.0;

    Eigen::VectorXd projected() const { return t * field; }
};

/// 0.8 times the injectivity estimate at q.
double default_cutoff_radius(const EnergySetting& s, int q);

/// Spike ansatz centered at vertex q. radius <= 0 selects the default.
/// Throws InjectivityError when the radius is too large.
SpikeAnsatz build_ansatz(const EnergySetting& s, const RadialProfile& profile, int q, double radius = 0.0);

/// Φ(q) = t(w) w.
Eigen::VectorXd phi(const EnergySetting& s, const RadialProfile& profile, int q, double radius = 0.0);

struct Barycenter {
    Eigen::VectorXd point;
    double distance_to_mesh = 0.0;
};

/// Euclidean distance from x in R^N to the triangulated surface.
double distance_to_mesh(const SurfaceMesh& mesh, const Eigen::VectorXd& x);

/// (u⁺)^p-weighted mean of the embedding coordinates. Throws
/// std::domain_error when u⁺ = 0.
Barycenter barycenter(const EnergySetting& s, const SurfaceMesh& mesh, const Eigen::VectorXd& u);

bool in_tubular_neighborhood(const Barycenter& b, double r);

/// Tubular-neighborhood radius used in place of r(M): half the smallest
/// normal-curvature radius seen along mesh edges.
double reach_proxy(const SurfaceMesh& mesh);

/// (1/2 − 1/p) eps^{-n} ∫_{B_g(q, radius)} (u⁺)^p with q = argmax u.
double concentrated_energy(const EnergySetting& s, const Eigen::VectorXd& u, double radius);

}  // namespace nehari
