#include "nehari/solver.hpp"

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

TEST_CASE("Newton from a spike ansatz converges to a positive critical point")
{
    const SurfaceMesh sphere = make_sphere(4);
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), planar().params, 0.2);
    const SolutionRecord rec = newton_solve(s, phi(s, planar(), 0), {}, std::sqrt(planar().l2sq));
    CHECK(rec.grad_norm < 1e-9);
    CHECK(rec.nehari_residual < 1e-8);
    CHECK(rec.level_residual < 1e-8);
    CHECK(rec.energy < 2 * planar().m_infty);
    CHECK(std::abs(rec.energy - planar().m_infty) < 0.1 * planar().m_infty);
    CHECK(rec.min_value > -1e-8);
    CHECK(rec.smoothed_min > -1e-8);
    CHECK(rec.barycenter.point.dot(sphere.point(0)) > 0.9);
}

TEST_CASE("deflation rejects a known solution and the constant is detected")
{
    const SurfaceMesh sphere = make_sphere(3);
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), planar().params, 0.3);
    const double scale = std::sqrt(planar().l2sq);
    const SolutionRecord first = newton_solve(s, phi(s, planar(), 0), {}, scale);
    SolveOptions options;
    options.max_iterations = 30;
    try {
        newton_solve(s, first.field, {first.field}, scale, options);
        FAIL("seed equal to a deflated solution must not be accepted");
    } catch (const SolveError& e) {
        CHECK(e.reason() != SolveError::Reason::breakdown);
    }
    try {
        newton_solve(s, Eigen::VectorXd::Constant(s.size(), 1.01), {}, scale);
        FAIL("expected collapse onto the constant");
    } catch (const SolveError& e) {
        CHECK(e.reason() == SolveError::Reason::collapse_constant);
        CHECK(to_string(e.reason()).find("constant") != std::string::npos);
    }
}

TEST_CASE("sparse Morse data agree with the dense spectrum")
{
    const SurfaceMesh sphere = make_sphere(3);  // 642 vertices
    const MetricField g = perturbed_metric(sphere, sample_perturbation(sphere, 0.02, 4));
    const EnergySetting s = make_setting(sphere, g, planar().params, 0.3);
    const SolveReport report = multiplicity_run(sphere, g, planar(), 0.3);
    REQUIRE(!report.records.empty());
    for (const SolutionRecord& rec : report.records) {
        const Eigen::VectorXd ev = dense_spectrum(s, rec.field);
        // tol_eig is relative to a 60-step power-iteration estimate of λ_max
        CHECK(ev.maxCoeff() == doctest::Approx(rec.tol_eig * 1e6).epsilon(1e-2));
        CHECK(rec.morse_index == static_cast<int>((ev.array() < -rec.tol_eig).count()));
        CHECK(rec.min_abs_eig == doctest::Approx(ev.cwiseAbs().minCoeff()).epsilon(1e-6));
    }
}

TEST_CASE("Nehari minimizer has Morse index 1")
{
    const SurfaceMesh sphere = make_sphere(3);
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), planar().params, 0.3);
    Eigen::VectorXd seed = phi(s, planar(), 5);
    for (int i = 0; i < s.size(); ++i) seed(i) *= 1.0 + 0.03 * std::sin(7.0 * i);
    const SolutionRecord rec = nehari_minimize(s, seed, std::sqrt(planar().l2sq));
    const MorseResult m = morse_index(s, rec.field);
    CHECK(m.index == 1);
    CHECK_FALSE(m.degenerate);
    const Eigen::VectorXd ev = dense_spectrum(s, rec.field);
    CHECK(ev(0) < -m.tol_eig);
    CHECK(ev(1) > m.tol_eig);
}

TEST_CASE("multiplicity on the sphere meets P1")
{
    const SurfaceMesh sphere = make_sphere(4);
    const SolveReport report = multiplicity_run(sphere, induced_metric(sphere), planar(), 0.15);
    CHECK(report.in_regime);
    CHECK(report.p1_target == 2);
    CHECK(report.distinct_count >= 2);
    CHECK(report.pass);
    CHECK(report.verdict.find("consistent") == 0);
    for (const auto& rec : report.records) CHECK(rec.energy < 2 * planar().m_infty);
    // pairwise distinct in the deflation metric
    const EnergySetting s = make_setting(sphere, induced_metric(sphere), planar().params, 0.15);
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        for (std::size_t j = i + 1; j < report.records.size(); ++j) {
            CHECK(scaled_l2_distance(s, report.records[i].field, report.records[j].field) >
                  1e-2 * std::sqrt(planar().l2sq));
        }
    }
}

TEST_CASE("runs outside the regime make no claim")
{
    const SurfaceMesh sphere = make_sphere(3);
    RunOptions options;
    options.seed_centers = {0};
    const SolveReport report = multiplicity_run(sphere, induced_metric(sphere), planar(), 0.5, options);
    CHECK_FALSE(report.in_regime);
    CHECK(report.verdict.find("no claim") != std::string::npos);
    options.delta = planar().m_infty;
    CHECK_THROWS_AS(multiplicity_run(sphere, induced_metric(sphere), planar(), 0.3, options), std::invalid_argument);
}

TEST_CASE("refinement probe separates the round sphere from an ellipsoid")
{
    std::vector<SurfaceMesh> round, oblate;
    for (int level = 4; level <= 6; ++level) {
        round.push_back(make_sphere(level));
        MeshData d = mesh_data(round.back());
        d.points.row(2) *= 0.8;
        oblate.emplace_back(d.points, d.triangles);
    }
    const KernelProbe a = refinement_kernel_probe(round, planar(), 0.3, round.front().point(0));
    CHECK(a.kernel);
    CHECK(a.margins[0] > a.margins[1]);
    CHECK(a.margins[1] > a.margins[2]);
    const KernelProbe b = refinement_kernel_probe(oblate, planar(), 0.3, oblate.front().point(0));
    CHECK_FALSE(b.kernel);
    CHECK(b.extrapolated > 10 * b.tol_eig);
}

TEST_CASE("genericity probe is deterministic per seed")
{
    const SurfaceMesh sphere = make_sphere(3);
    RunOptions options;
    options.seed_centers = {0, 100};
    options.max_solutions_per_seed = 1;
    const GenericitySummary a = genericity_probe(sphere, planar(), 0.25, 0.3, 0.02, 2, 9, options);
    const GenericitySummary b = genericity_probe(sphere, planar(), 0.25, 0.3, 0.02, 2, 9, options);
    REQUIRE(a.samples.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a.samples[i].eps == b.samples[i].eps);
        CHECK(a.samples[i].eps >= 0.25);
        CHECK(a.samples[i].eps <= 0.3);
        CHECK(a.samples[i].h_seed == b.samples[i].h_seed);
        CHECK(a.samples[i].margins == b.samples[i].margins);
    }
    CHECK_THROWS_AS(genericity_probe(sphere, planar(), 0.3, 0.2, 0.02, 2, 9), std::invalid_argument);
}
