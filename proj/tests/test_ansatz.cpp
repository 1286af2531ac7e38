#include "nehari/ansatz.hpp"

#include "doctest.h"

#include <cmath>

using namespace nehari;

namespace {

const RadialProfile& planar()
{
    static const RadialProfile prof = shoot_ground_state(ProblemParams{});
    return prof;
}

}  // namespace

TEST_CASE("cutoff")
{
    const double r = 0.4;
    CHECK(cutoff(0.0, r) == 1.0);
    CHECK(cutoff(0.2, r) == 1.0);
    CHECK(cutoff(0.4, r) == 0.0);
    CHECK(cutoff(1.0, r) == 0.0);
    double worst = 0.0, prev = 1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = r * i / 4000.0;
        const double c = cutoff(t, r);
        REQUIRE(c <= prev + 1e-15);
        prev = c;
        worst = std::max(worst, std::abs(cutoff_slope(t, r)));
        if (t > 0.21 && t < 0.39) {
            const double fd = (cutoff(t + 1e-7, r) - cutoff(t - 1e-7, r)) / 2e-7;
            REQUIRE(std::abs(fd - cutoff_slope(t, r)) < 1e-5);
        }
    }
    CHECK(worst == doctest::Approx(3.0 / r).epsilon(1e-6));
}

TEST_CASE("spike ansatz on the flat torus")
{
    const SurfaceMesh torus = make_flat_torus(128);
    const double eps = 0.1;
    const EnergySetting s = make_setting(torus, induced_metric(torus), planar().params, eps);
    const SpikeAnsatz w = build_ansatz(s, planar(), 0, 0.35);
    CHECK(w.field.maxCoeff() == doctest::Approx(planar().u0));
    // (1/eps^n)|w|_p^p within 5% of |U|_p^p
    CHECK(std::abs(lp_term(s, w.field) - planar().lp) / planar().lp < 0.05);
    CHECK(std::abs(w.t - 1.0) < 0.05);
    CHECK(std::abs(w.energy_after_projection - planar().m_infty) / planar().m_infty < 0.05);
    // default radius respects the injectivity guard; too large a radius is refused
    CHECK(default_cutoff_radius(s, 0) < 0.5);
    CHECK_THROWS_AS(build_ansatz(s, planar(), 0, 0.49), InjectivityError);
}

TEST_CASE("barycenter")
{
    const SurfaceMesh sphere = make_sphere(5);
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), planar().params, 0.1);
    const Eigen::VectorXd u = phi(s, planar(), 0);
    const Barycenter b = barycenter(s, sphere, u);
    // symmetric spike at the pole: barycenter on the axis, just inside the sphere
    CHECK(b.point.head(2).norm() < 1e-3);
    CHECK(b.point(2) < 1.0);
    CHECK(b.distance_to_mesh == doctest::Approx(1.0 - b.point.norm()).epsilon(0.05));
    CHECK(in_tubular_neighborhood(b, reach_proxy(sphere)));
    CHECK_THROWS_AS(in_tubular_neighborhood(b, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(barycenter(s, sphere, -u), std::domain_error);

    const Eigen::VectorXd far = Eigen::Vector3d(0, 0, 3);
    CHECK(distance_to_mesh(sphere, far) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("reach proxy")
{
    const double sphere = reach_proxy(make_sphere(4));
    CHECK(sphere > 0.35);
    CHECK(sphere < 0.5);  // half the curvature radius 1
    const double torus = reach_proxy(make_flat_torus(64));
    CHECK(torus > 0.05);
    // half the circle radius 1/(2π); chords read slightly flatter
    CHECK(torus == doctest::Approx(0.5 / (2 * 3.141592653589793)).epsilon(0.01));
}

TEST_CASE("concentrated energy of a spike")
{
    const SurfaceMesh torus = make_flat_torus(64);
    const EnergySetting s = make_setting(torus, induced_metric(torus), planar().params, 0.08);
    const Eigen::VectorXd u = phi(s, planar(), 100, 0.35);
    const double total = energy(s, u);
    CHECK(concentrated_energy(s, u, 0.3) == doctest::Approx(total).epsilon(0.01));
    CHECK(concentrated_energy(s, u, 0.05) < 0.8 * total);
}
