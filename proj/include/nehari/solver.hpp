#pragma once

#include "nehari/ansatz.hpp"
#include "nehari/functional.hpp"
#include "nehari/limit_profile.hpp"
#include "nehari/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

struct SolveOptions {
    double tol = 1e-9;              // ‖∇J‖ / (1 + ‖u‖)
    int max_iterations = 100;
    int nehari_iterations = 3;      // leading iterates re-projected onto the Nehari manifold
    double step_cap = 0.25;         // max |||step||| / |||u|||
    double constant_tol = 1e-3;     // |||u − ū||| below this is a constant
    double distinct_factor = 1e-2;  // deflation threshold relative to |U|_2
};

class SolveError : public std::runtime_error {
public:
    enum class Reason { max_iterations, collapse_deflated, collapse_constant, breakdown };
    SolveError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
    Reason reason() const { return reason_; }

private:
    Reason reason_;
};

std::string to_string(SolveError::Reason reason);

struct SolutionRecord {
    Eigen::VectorXd field;
    double energy = 0.0;
    double grad_norm = 0.0;        // ‖∇J‖ / (1 + ‖u‖)
    double nehari_residual = 0.0;  // |J'(u)[u]| / |||u|||^2
    double level_residual = 0.0;   // |J − (1/2 − 1/p)|||u|||^2| / J
    int morse_index = -1;
    double min_abs_eig = 0.0;
    double tol_eig = 0.0;
    bool degenerate = false;
    Barycenter barycenter;
    int seed_center = -1;
    int newton_iters = 0;
    double min_value = 0.0;
    double smoothed_min = 0.0;     // min of (eps^2 S + M)^{-1} M (u⁺)^{p−1}
};

/// Deflated L2 distance eps^{-n/2} ‖u − v‖_{L2}.
double scaled_l2_distance(const EnergySetting& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Step-capped Newton on G(u) = Π_j (1 + 1/‖u − u_j‖²) ∇J(u). The record carries
/// energy and residuals; the Morse fields are filled by morse_index.
/// distinct_scale is |U|_2 (threshold = distinct_factor · distinct_scale).
SolutionRecord newton_solve(const EnergySetting& s, const Eigen::VectorXd& seed,
                            const std::vector<Eigen::VectorXd>& deflation, double distinct_scale,
                            const SolveOptions& options = {});

/// Minimizer of J on the Nehari manifold near the seed: descent along
/// −B⁻¹∇J with re-projection and Armijo backtracking, then Newton polish.
/// Unlike newton_solve this cannot stop on a saddle of the pinning landscape.
SolutionRecord nehari_minimize(const EnergySetting& s, const Eigen::VectorXd& seed, double distinct_scale,
                               const SolveOptions& options = {}, int max_descent = 2000);

struct MorseResult {
    int index = 0;
    double min_abs_eig = 0.0;
    double tol_eig = 0.0;
    double lambda_max = 0.0;
    bool degenerate = false;
};

/// Inertia of the pencil (J''(u), B) with B the |||·||| Gram matrix:
/// index = #eigenvalues below −tol_eig by Sylvester's law on
/// LDLᵀ(H + tol_eig·B); min |λ| by shift-invert subspace iteration.
/// tol_eig <= 0 selects 1e-6 · λ_max.
MorseResult morse_index(const EnergySetting& s, const Eigen::VectorXd& u, double tol_eig = 0.0);

/// Dense generalized eigenvalues of (J''(u), B), ascending; for oracles
/// on small meshes.
Eigen::VectorXd dense_spectrum(const EnergySetting& s, const Eigen::VectorXd& u);

/// Farthest-point sample of vertex ids (Euclidean in R^N) starting at vertex 0.
std::vector<int> farthest_point_centers(const SurfaceMesh& mesh, int count);

struct Attempt {
    int center = 0;
    std::string outcome;  // "converged", "rejected: ...", failure reason
    int iterations = 0;
};

struct RunOptions {
    double delta = 0.0;  // <= 0 selects 0.1 m_∞
    std::vector<int> seed_centers;  // empty selects 4·P1 farthest points
    int characteristic = 2;
    int max_solutions_per_seed = 2;
    double radius = 0.0;  // cutoff radius; <= 0 selects the default per center
    SolveOptions solve;
};

struct SolveReport {
    std::vector<SolutionRecord> records;  // nonconstant, distinct, J < 2 m_∞
    std::vector<Attempt> attempts;
    double eps = 0.0;
    double delta = 0.0;
    double m_infty = 0.0;
    double eps_threshold = 0.0;  // constants excluded below this eps
    bool in_regime = true;       // eps < eps_threshold
    std::int64_t p1_target = 0;
    int distinct_count = 0;
    int band_count = 0;          // records with |J − m_∞| < δ
    bool pass = false;           // distinct_count ≥ P1 (meaningful only in regime)
    std::vector<int> band_indices;  // nondegenerate band records
    int degenerate_count = 0;
    MorseCheck morse;
    bool morse_applicable = false;  // every band record nondegenerate
    double reach = 0.0;
    std::string verdict;
};

SolveReport multiplicity_run(const SurfaceMesh& mesh, const MetricField& metric, const RadialProfile& profile,
                             double eps, const RunOptions& options = {});

struct GenericitySample {
    double eps = 0.0;
    std::uint64_t h_seed = 0;
    int records = 0;
    double min_margin = 0.0;  // min over records of min_abs_eig / tol_eig
    bool nondegenerate = false;
    std::vector<double> margins;
};

struct GenericitySummary {
    std::vector<GenericitySample> samples;
    double fraction_nondegenerate = 0.0;
};

GenericitySummary genericity_probe(const SurfaceMesh& mesh, const RadialProfile& profile, double eps_lo,
                                   double eps_hi, double rho, int num_samples, std::uint64_t seed,
                                   const RunOptions& options = {});

/// Margin of the spike solved at the vertex nearest `center` on successively
/// halved meshes of the unperturbed surface. A kernel of the continuum
/// Hessian shows up as margins that converge to zero: the extrapolated margin
/// is within max(tol_eig, its own error estimate) of 0.
struct KernelProbe {
    std::vector<double> mesh_size;
    std::vector<double> margins;
    double tol_eig = 0.0;
    double extrapolated = 0.0;
    double error = 0.0;
    bool kernel = false;
};

KernelProbe refinement_kernel_probe(const std::vector<SurfaceMesh>& levels, const RadialProfile& profile, double eps,
                                    const Eigen::VectorXd& center, const SolveOptions& options = {});

}  // namespace nehari
