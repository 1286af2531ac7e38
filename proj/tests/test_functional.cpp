#include "nehari/ansatz.hpp"
#include "nehari/functional.hpp"

#include "doctest.h"

#include <random>

using namespace nehari;

namespace {

const RadialProfile& planar()
{
    static const RadialProfile prof = shoot_ground_state(ProblemParams{});
    return prof;
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * normal(rng);
    return v;
}

}  // namespace

TEST_CASE("J(1) on the flat unit-area torus")
{
    const SurfaceMesh torus = make_flat_torus(16);
    const EnergySetting s = make_setting(torus, induced_metric(torus), ProblemParams{}, 1.0);
    CHECK(std::abs(energy(s, Eigen::VectorXd::Ones(s.size())) - 0.25) < 1e-10);
    // the constant is a critical point
    CHECK(gradient(s, Eigen::VectorXd::Ones(s.size())).norm() < 1e-12);
    // (1/2 - 1/p) vol / eps^n in general
    const EnergySetting s2 = make_setting(torus, induced_metric(torus), ProblemParams{2, 3.0}, 0.5);
    CHECK(energy(s2, Eigen::VectorXd::Ones(s2.size())) == doctest::Approx((0.5 - 1.0 / 3.0) * 4.0).epsilon(1e-12));
}

TEST_CASE("operators")
{
    const SurfaceMesh sphere = make_sphere(3);
    const MetricField g = perturbed_metric(sphere, sample_perturbation(sphere, 0.02, 3));
    const SparseMatrix st = assemble_stiffness(sphere, g);
    CHECK((Eigen::MatrixXd(st) - Eigen::MatrixXd(st).transpose()).norm() < 1e-12);
    CHECK((st * Eigen::VectorXd::Ones(sphere.num_vertices())).norm() < 1e-10);
    const Eigen::VectorXd m = lumped_mass(sphere, g);
    CHECK(m.minCoeff() > 0.0);
    // positive semidefinite with kernel = constants
    std::mt19937_64 rng(1);
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd v = random_vector(sphere.num_vertices(), rng, 1.0);
        v.array() -= v.mean();
        CHECK(v.dot(st * v) > 0.0);
    }
    CHECK_THROWS_AS(make_setting(sphere, g, ProblemParams{}, 0.0), std::invalid_argument);
}

TEST_CASE("gradient and Hessian against finite differences")
{
    const SurfaceMesh sphere = make_sphere(4);
    const EnergySetting s =
        make_setting(sphere, perturbed_metric(sphere, sample_perturbation(sphere, 0.02, 5)), ProblemParams{}, 0.3);
    std::mt19937_64 rng(2);
    Eigen::VectorXd u = phi(s, planar(), 7) + random_vector(s.size(), rng, 0.05);
    const Eigen::VectorXd g = gradient(s, u);
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd d = random_vector(s.size(), rng, 1.0);
        const double t = 1e-5;
        const double fd = (energy(s, u + t * d) - energy(s, u - t * d)) / (2 * t);
        CHECK(std::abs(fd - g.dot(d)) / std::abs(g.dot(d)) < 1e-5);
        const Eigen::VectorXd hd = hessian_apply(s, u, d);
        const Eigen::VectorXd fdh = (gradient(s, u + t * d) - gradient(s, u - t * d)) / (2 * t);
        CHECK((fdh - hd).norm() / hd.norm() < 1e-4);
        CHECK((hessian(s, u) * d - hd).norm() < 1e-10 * hd.norm());
    }
}

TEST_CASE("Nehari projection")
{
    const SurfaceMesh sphere = make_sphere(3);
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), ProblemParams{}, 0.3);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd u = random_vector(s.size(), rng, 1.0);
        const Eigen::VectorXd w = nehari_project(s, u);
        CHECK(std::abs(nehari_derivative(s, w)) < 1e-10 * eps_norm_sq(s, w));
        // on the Nehari manifold J = (1/2 - 1/p)|||u|||^2
        CHECK(energy(s, w) == doctest::Approx(0.25 * eps_norm_sq(s, w)).epsilon(1e-10));
        // t maximizes J along the ray
        const double t = nehari_t(s, u);
        CHECK(energy(s, w) >= energy(s, 0.99 * t * u));
        CHECK(energy(s, w) >= energy(s, 1.01 * t * u));
    }
    CHECK_THROWS_AS(nehari_t(s, -Eigen::VectorXd::Ones(s.size())), std::domain_error);
}

TEST_CASE("constant exclusion threshold")
{
    const SurfaceMesh torus = make_flat_torus(16);
    const double m = planar().m_infty;
    const double eps_hat = constant_exclusion_eps(planar().params, 1.0, m);
    CHECK(eps_hat == doctest::Approx(std::sqrt(2.0 / (32.0 * m))));
    const auto j1 = [&](double eps) {
        const EnergySetting s = make_setting(torus, induced_metric(torus), planar().params, eps);
        return energy(s, Eigen::VectorXd::Ones(s.size()));
    };
    CHECK(j1(0.9 * eps_hat) > 2 * m);
    CHECK(j1(eps_hat) == doctest::Approx(4 * m));
    CHECK_FALSE(j1(1.1 * eps_hat) < 2 * m);
    CHECK(j1(2.0 * eps_hat) < 2 * m);
}

TEST_CASE("norm equivalence constants bound the ratio for every eps")
{
    const SurfaceMesh sphere = make_sphere(3);
    const MetricField g0 = induced_metric(sphere);
    const MetricField g = perturbed_metric(sphere, sample_perturbation(sphere, 0.05, 8));
    const NormEquivalence ne = norm_equivalence(sphere, g);
    CHECK(ne.c1 > 0.0);
    CHECK(ne.c1 <= ne.C1);
    std::mt19937_64 rng(4);
    for (double eps : {0.05, 0.2, 0.9}) {
        const EnergySetting a = make_setting(sphere, g, ProblemParams{}, eps);
        const EnergySetting b = make_setting(sphere, g0, ProblemParams{}, eps);
        for (int k = 0; k < 5; ++k) {
            const Eigen::VectorXd u = random_vector(a.size(), rng, 1.0);
            const double ratio = eps_norm_sq(a, u) / eps_norm_sq(b, u);
            CHECK(ratio >= ne.c1 - 1e-12);
            CHECK(ratio <= ne.C1 + 1e-12);
        }
    }
}

TEST_CASE("low-energy set membership")
{
    const SurfaceMesh torus = make_flat_torus(64);
    const EnergySetting s = make_setting(torus, induced_metric(torus), planar().params, 0.08);
    const Eigen::VectorXd spike = phi(s, planar(), 0, 0.35);
    CHECK(in_low_energy_set(s, spike, 2 * planar().m_infty));
    CHECK_FALSE(in_low_energy_set(s, spike, 0.5 * planar().m_infty));
    CHECK_FALSE(in_low_energy_set(s, 3.0 * spike, 2 * planar().m_infty));  // off the Nehari manifold
    const double r2 = low_energy_radius_sq(planar().params, planar().m_infty, 1.0);
    CHECK(eps_norm_sq(s, spike) <= r2);
}
