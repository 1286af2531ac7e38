#pragma once

#include "nehari/limit_profile.hpp"
#include "nehari/mesh.hpp"
#include "nehari/metric.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nehari {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete J_{eps,g} on P1 elements. The quadratic mass term and the
/// nonlinearity both use the lumped mass, so gradient and Hessian are the
/// exact derivatives of the discrete energy.
struct EnergySetting {
    const SurfaceMesh* mesh = nullptr;
    MetricField metric;
    ProblemParams params;
    double eps = 1.0;
    SparseMatrix stiffness;  // ∫ g(∇φ_i, ∇φ_j) dμ_g
    Eigen::VectorXd mass;    // lumped ∫ φ_i dμ_g
    double scale = 1.0;      // 1 / eps^n, kept outside the operators

    int size() const { return static_cast<int>(mass.size()); }
    double volume() const { return mass.sum(); }
};

SparseMatrix assemble_stiffness(const SurfaceMesh& mesh, const MetricField& metric);
EnergySetting make_setting(const SurfaceMesh& mesh, MetricField metric, const ProblemParams& params, double eps);

Eigen::VectorXd positive_part(const Eigen::VectorXd& u);

double energy(const EnergySetting& s, const Eigen::VectorXd& u);
Eigen::VectorXd gradient(const EnergySetting& s, const Eigen::VectorXd& u);
Eigen::VectorXd hessian_apply(const EnergySetting& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
SparseMatrix hessian(const EnergySetting& s, const Eigen::VectorXd& u);

/// |||u|||^2 = eps^{-n} (eps^2 uᵀSu + uᵀMu), the matrix of which is
/// returned by norm_matrix.
double eps_norm_sq(const EnergySetting& s, const Eigen::VectorXd& u);
SparseMatrix norm_matrix(const EnergySetting& s);
/// |u⁺|_{p,eps}^p = eps^{-n} Σ m_i (u_i⁺)^p.
double lp_term(const EnergySetting& s, const Eigen::VectorXd& u);
/// J'(u)[u].
double nehari_derivative(const EnergySetting& s, const Eigen::VectorXd& u);

/// Nehari factor t with t·u on the Nehari manifold. Throws
/// std::domain_error when u⁺ vanishes.
double nehari_t(const EnergySetting& s, const Eigen::VectorXd& u);
Eigen::VectorXd nehari_project(const EnergySetting& s, const Eigen::VectorXd& u);

struct LowEnergyTolerances {
    double nehari = 1e-10;      // |J'(u)[u]| < nehari·|||u|||^2
    double separation = 1e-3;   // |||u − 1||| must exceed this
};

bool in_low_energy_set(const EnergySetting& s, const Eigen::VectorXd& u, double bound,
                       const LowEnergyTolerances& tol = {});

/// eps below which the constant solution is excluded from the low-energy
/// set. Conservative by a factor 2 in volume, so that perturbed metrics are
/// covered: J(1) = (1/2 − 1/p) vol / eps^n equals 4 m_∞ at the threshold.
double constant_exclusion_eps(const ProblemParams& params, double volume, double m_infty);

/// Bounds c1 ≤ |||u|||^2_{g} / |||u|||^2_{g0} ≤ C1 valid for every P1 field
/// and every eps, from per-triangle eigenvalues of g.
struct NormEquivalence {
    double c1 = 1.0;
    double C1 = 1.0;
};
NormEquivalence norm_equivalence(const SurfaceMesh& mesh, const MetricField& metric);

/// Every field on the Nehari manifold with J ≤ 2 m_∞ satisfies
/// |||u|||^2_{g0,eps} ≤ (2p/(p−2)) · 2 m_∞ / c1; this returns that bound.
double low_energy_radius_sq(const ProblemParams& params, double m_infty, double c1);

}  // namespace nehari
