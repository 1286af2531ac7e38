#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace nehari {

/// Dimension and exponent of the limit problem -ΔU + U = U^{p-1} in R^n.
struct ProblemParams {
    int n = 2;
    double p = 4.0;

    /// Throws std::invalid_argument unless 1 <= n <= 3, p > 2 and p is
    /// subcritical (p < 2n/(n-2) when n = 3).
    void validate() const;
};

class ShootingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sampled positive radial ground state together with its integral
/// constants. Integrals are over R^n (the radial measure includes the
/// surface area of the unit sphere).
struct RadialProfile {
    ProblemParams params;
    std::vector<double> radii;   // increasing, radii.front() == 0
    std::vector<double> values;  // U(r)
    std::vector<double> slopes;  // U'(r)
    double u0 = 0.0;
    double m_infty = 0.0;
    double l2sq = 0.0;    // |U|_2^2
    double gradsq = 0.0;  // |∇U|_2^2
    double lp = 0.0;      // |U|_p^p
    double ode_residual = 0.0;

    /// U(r) by monotone cubic Hermite interpolation; 0 beyond the grid.
    double value_at(double r) const;
    double r_max() const { return radii.back(); }
};

struct ProfileIntegrals {
    double l2sq = 0.0;
    double gradsq = 0.0;
    double lp = 0.0;
};

/// Surface area of the unit sphere in R^n times the 1D symmetry factor
/// (2 for n = 1, 2π for n = 2, 4π for n = 3).
double radial_measure(int n);

/// Integrals recomputed from the stored samples; never uses cached fields.
ProfileIntegrals integrate_profile(const RadialProfile& profile);

/// Builds a profile from externally supplied samples and fills in the
/// integral constants (used for closed-form profiles and corrupted inputs).
RadialProfile make_profile(const ProblemParams& params, std::vector<double> radii,
                           std::vector<double> values, std::vector<double> slopes);

/// Shooting on U(0) with an adaptive Dormand-Prince integrator.
RadialProfile shoot_ground_state(const ProblemParams& params, double tol = 1e-6,
                                 double r_max = 20.0);

/// U_eps(x) = U(x / eps).
double scale_profile(const RadialProfile& profile, double eps, double x);

/// Normalized Pohozaev residual
/// |(n-2)/2 |∇U|^2 + n/2 |U|^2 - n/p |U|_p^p| / |U|_p^p.
double pohozaev_check(const RadialProfile& profile);

/// Normalized Nehari residual |(|∇U|^2 + |U|^2) - |U|_p^p| / |U|_p^p.
double nehari_residual(const RadialProfile& profile);

/// Sup norm of U'' + (n-1)/r U' - U + U^{p-1} over interior grid points,
/// with U'' from fourth-order differences of the stored slopes.
double radial_ode_residual(const RadialProfile& profile);

/// Closed-form 1D soliton (p/2)^{1/(p-2)} sech^{2/(p-2)}((p-2)x/2).
double soliton_1d(double p, double x);
double soliton_1d_slope(double p, double x);

}  // namespace nehari
