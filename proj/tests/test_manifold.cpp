#include "nehari/geodesic.hpp"
#include "nehari/mesh.hpp"
#include "nehari/metric.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace nehari;

namespace {

const std::string kData = NEHARI_TEST_DATA;

// Same formula as tensor_norm, but chart derivatives by central differences
// along the exact unit sphere, through the gnomonic chart at each triangle
// (its Christoffel symbols vanish at the center, so derivatives up to second
// order agree with normal coordinates there).
double brute_force_norm(const PerturbationTensor& h, const SurfaceMesh& mesh, int k)
{
    std::array<Eigen::Matrix2d, 6> sup;
    for (auto& s : sup) s.setZero();
    const double d = 1e-3;
    for (const TriangleFrame& f : mesh.frames()) {
        const auto at = [&](double x, double y) {
            const Eigen::VectorXd c = f.centroid.normalized();
            return h.components(f, (c + f.basis.col(0) * x + f.basis.col(1) * y).normalized());
        };
        const Eigen::Matrix2d c = at(0, 0);
        std::array<Eigen::Matrix2d, 6> deriv = {
            c,
            (at(d, 0) - at(-d, 0)) / (2 * d),
            (at(0, d) - at(0, -d)) / (2 * d),
            (at(d, 0) - 2 * c + at(-d, 0)) / (d * d),
            (at(d, d) - at(d, -d) - at(-d, d) + at(-d, -d)) / (4 * d * d),
            (at(0, d) - 2 * c + at(0, -d)) / (d * d),
        };
        for (int b = 0; b < 6; ++b) sup[b] = sup[b].cwiseMax(deriv[b].cwiseAbs());
    }
    const int count = k == 0 ? 1 : (k == 1 ? 3 : 6);
    double total = 0.0;
    for (int b = 0; b < count; ++b) total += sup[b].sum();
    return total;
}

}  // namespace

TEST_CASE("mesh files load and report Euler characteristic")
{
    const SurfaceMesh oct = load_mesh(kData + "/octahedron.off");
    CHECK(oct.num_vertices() == 6);
    CHECK(oct.num_triangles() == 8);
    CHECK(oct.euler_characteristic() == 2);
    CHECK(oct.orientable());

    const SurfaceMesh torus = load_mesh(kData + "/torus64.off");
    CHECK(torus.num_vertices() == 64);
    CHECK(torus.euler_characteristic() == 0);
    CHECK(torus.ambient_dim() == 4);
}

TEST_CASE("mesh validation enumerates violations")
{
    MeshData data = mesh_data(make_octahedron());
    data.triangles.pop_back();
    try {
        SurfaceMesh broken(data.points, data.triangles);
        FAIL("expected MeshError");
    } catch (const MeshError& e) {
        CHECK(std::string(e.what()).find("non-closed: 3 boundary edges") != std::string::npos);
    }

    MeshData two = mesh_data(make_octahedron());
    const MeshData other = mesh_data(make_octahedron());
    Eigen::MatrixXd pts(3, 12);
    pts << two.points, other.points.array() + 5.0;
    for (const auto& t : other.triangles) two.triangles.push_back({t[0] + 6, t[1] + 6, t[2] + 6});
    CHECK_THROWS_WITH_AS(SurfaceMesh(pts, two.triangles), doctest::Contains("disconnected"), MeshError);

    CHECK_THROWS(parse_mesh("OFF\n3 1 0\n0 0 0\n"));
    CHECK_THROWS(load_mesh(kData + "/does_not_exist.off"));
}

TEST_CASE("OFF round trip")
{
    const SurfaceMesh torus = make_flat_torus(8);
    const SurfaceMesh again = parse_mesh(format_mesh(torus));
    CHECK(again.num_vertices() == torus.num_vertices());
    CHECK((again.points() - torus.points()).norm() == 0.0);
}

TEST_CASE("tensor_norm")
{
    // On coarser spheres the star fits under-resolve order-3 harmonics.
    const SurfaceMesh sphere = make_sphere(5);
    CHECK(tensor_norm(zero_perturbation(sphere), sphere, 2) == 0.0);
    CHECK_THROWS_AS(tensor_norm(sample_perturbation(sphere, 0.05, 1), sphere, 3), std::invalid_argument);

    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const PerturbationTensor h = sample_perturbation(sphere, 0.05, seed);
        const double n = tensor_norm(h, sphere, 2);
        CHECK(tensor_norm(h.scaled(2.5), sphere, 2) == doctest::Approx(2.5 * n).epsilon(1e-12));
        CHECK(tensor_norm(h.scaled(-2.5), sphere, 2) == doctest::Approx(2.5 * n).epsilon(1e-12));
        // independent stencil
        for (int k = 0; k <= 2; ++k) {
            const double brute = brute_force_norm(h, sphere, k);
            CHECK(std::abs(tensor_norm(h, sphere, k) - brute) / brute < 0.05);
        }
    }
}

TEST_CASE("tensor_norm triangle inequality on random triples")
{
    const SurfaceMesh sphere = make_sphere(2);
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        PerturbationTensor a = sample_perturbation(sphere, 0.03, seed);
        const PerturbationTensor b = sample_perturbation(sphere, 0.03, seed + 100);
        PerturbationTensor sum = a;
        sum.modes.insert(sum.modes.end(), b.modes.begin(), b.modes.end());
        CHECK(tensor_norm(sum, sphere) <= tensor_norm(a, sphere) + tensor_norm(b, sphere) + 1e-10);
    }
}

TEST_CASE("sample_perturbation")
{
    const SurfaceMesh sphere = make_sphere(3);
    CHECK(sample_perturbation(sphere, 0.0, 4).is_zero());
    CHECK_THROWS_AS(sample_perturbation(sphere, -1.0, 4), std::invalid_argument);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const PerturbationTensor h = sample_perturbation(sphere, 0.05, seed);
        const double n = tensor_norm(h, sphere, 2);
        CHECK(n > 0.045);
        CHECK(n <= 0.05);
        const MetricField g = perturbed_metric(sphere, h);
        for (std::size_t t = 0; t < g.size(); ++t) {
            REQUIRE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g[t]).eigenvalues().minCoeff() > 0.0);
        }
    }
    CHECK(perturbation_to_json(sample_perturbation(sphere, 0.05, 9)) ==
          perturbation_to_json(sample_perturbation(sphere, 0.05, 9)));
    const PerturbationTensor h = sample_perturbation(sphere, 0.05, 9);
    const PerturbationTensor back = perturbation_from_json(perturbation_to_json(h));
    CHECK(tensor_norm(back, sphere) == tensor_norm(h, sphere));
}

TEST_CASE("metric equivalence constants")
{
    const SurfaceMesh sphere = make_sphere(3);
    const MetricField g0 = induced_metric(sphere);
    CHECK(g0.equivalence().c == doctest::Approx(1.0));
    CHECK(g0.equivalence().C == doctest::Approx(1.0));
    const MetricField g = perturbed_metric(sphere, sample_perturbation(sphere, 0.05, 2));
    const auto eq = g.equivalence();
    CHECK(eq.c > 0.9);
    CHECK(eq.c <= eq.C);
    CHECK(eq.C < 1.1);
}

TEST_CASE("quadrature")
{
    const SurfaceMesh torus = make_flat_torus(16);
    const MetricField gt = induced_metric(torus);
    CHECK(std::abs(quadrature(torus, gt, Eigen::VectorXd::Ones(torus.num_vertices())) - 1.0) < 1e-12);

    const SurfaceMesh sphere = make_sphere(4);
    const MetricField gs = induced_metric(sphere);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(sphere.num_vertices());
    CHECK(std::abs(quadrature(sphere, gs, one) - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi) < 0.005);

    const Eigen::VectorXd u = sphere.points().row(2).transpose();
    const Eigen::VectorXd v = sphere.points().row(0).transpose().array().square();
    const double lhs = quadrature(sphere, gs, Eigen::VectorXd(2.0 * u - 3.0 * v));
    CHECK(std::abs(lhs - (2.0 * quadrature(sphere, gs, u) - 3.0 * quadrature(sphere, gs, v))) < 1e-12);
}

TEST_CASE("geodesic distances on the refined sphere")
{
    const SurfaceMesh sphere = make_sphere(5);  // 10242 vertices
    const MetricField g = induced_metric(sphere);
    const DistanceField f = fast_marching(sphere, g, 0);
    CHECK(f.distance[0] == 0.0);
    const Eigen::VectorXd pole = sphere.point(0);
    for (int v = 0; v < sphere.num_vertices(); ++v) {
        if (std::abs(sphere.point(v).dot(pole)) < 1e-9) {
            REQUIRE(std::abs(f.distance[v] - std::numbers::pi / 2) / (std::numbers::pi / 2) < 0.02);
        }
    }
    // triangle inequality on sampled triples
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> pick(0, sphere.num_vertices() - 1);
    for (int i = 0; i < 5; ++i) {
        const int a = pick(rng), b = pick(rng), c = pick(rng);
        const DistanceField fa = fast_marching(sphere, g, a), fb = fast_marching(sphere, g, b);
        CHECK(fa.distance[c] <= fa.distance[b] + fb.distance[c] + 1e-3);
    }
}

TEST_CASE("flat torus distances are Euclidean in the fundamental domain")
{
    const SurfaceMesh torus = make_flat_torus(64);
    const MetricField g = induced_metric(torus);
    const std::vector<PolarEntry> ball = exp_map(torus, g, 0, 0.35);
    // vertex (i, j) sits at angles (2π i/m, 2π j/m) of the two circles
    const double circumference = 1.0, h = circumference / 64;
    int checked = 0;
    for (const PolarEntry& e : ball) {
        const int i = e.vertex / 64, j = e.vertex % 64;
        const double dx = std::min(i, 64 - i) * h, dy = std::min(j, 64 - j) * h;
        const double exact = std::hypot(dx, dy);
        if (exact > 0.05) {
            ++checked;
            REQUIRE(std::abs(e.distance - exact) / exact < 0.01);
            REQUIRE(std::abs(e.direction.norm() - 1.0) < 1e-9);
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("injectivity guard")
{
    const SurfaceMesh torus = make_flat_torus(64);
    const MetricField g = induced_metric(torus);
    const double est = injectivity_estimate(torus, g, 0);
    CHECK(est > 0.3);
    CHECK(est < 0.5);
    try {
        exp_map(torus, g, 0, 0.45);
        FAIL("expected InjectivityError");
    } catch (const InjectivityError& e) {
        CHECK(e.estimate() == doctest::Approx(est));
    }
}
