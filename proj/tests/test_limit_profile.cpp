#include "nehari/limit_profile.hpp"
#include "nehari/oracles.hpp"

#include "doctest.h"

#include <cmath>

using namespace nehari;

namespace {

const RadialProfile& planar()
{
    static const RadialProfile prof = shoot_ground_state(ProblemParams{});
    return prof;
}

RadialProfile soliton_profile(double p)
{
    std::vector<double> r, v, s;
    for (int i = 0; i <= 20000; ++i) {
        const double x = 20.0 * i / 20000.0;
        r.push_back(x);
        v.push_back(soliton_1d(p, x));
        s.push_back(soliton_1d_slope(p, x));
    }
    return make_profile({1, p}, r, v, s);
}

}  // namespace

TEST_CASE("1D closed-form family is reproduced by shooting")
{
    for (double p : {3.0, 4.0, 6.0}) {
        const RadialProfile prof = shoot_ground_state({1, p});
        CHECK(prof.u0 == doctest::Approx(std::pow(p / 2.0, 1.0 / (p - 2.0))).epsilon(1e-6));
    }
    const RadialProfile quartic = shoot_ground_state({1, 4.0});
    CHECK(quartic.u0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(quartic.m_infty - 4.0 / 3.0) < 1e-6);
}

TEST_CASE("planar ground state agrees with the collocation oracle")
{
    const BvpGroundState oracle = collocation_ground_state(2, 4.0, 20.0, 2000);
    CHECK(oracle.newton_residual < 1e-8);
    CHECK(std::abs(planar().u0 - oracle.u0) / oracle.u0 < 1e-6);
    CHECK(std::abs(planar().m_infty - oracle.m_infty) / oracle.m_infty < 1e-6);
}

TEST_CASE("collocation oracle on the 1D soliton")
{
    const BvpGroundState oracle = collocation_ground_state(1, 4.0, 20.0, 2000);
    CHECK(oracle.u0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    CHECK(oracle.m_infty == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("scale_profile")
{
    const RadialProfile& prof = planar();
    CHECK(scale_profile(prof, 1.0, 0.0) == prof.u0);
    CHECK(scale_profile(prof, 0.5, 25.0) == 0.0);

    const RadialProfile one_d = shoot_ground_state({1, 4.0});
    CHECK(std::abs(scale_profile(one_d, 0.5, 1.0) - std::sqrt(2.0) / std::cosh(2.0)) < 1e-6);

    // |U_eps|_2^2 = eps^n |U|_2^2, by trapezoid quadrature in r
    const double eps = 0.3;
    double integral = 0.0;
    const int m = 200000;
    const double h = 20.0 * eps / m;
    for (int i = 0; i <= m; ++i) {
        const double r = i * h;
        const double u = scale_profile(prof, eps, r);
        integral += (i == 0 || i == m ? 0.5 : 1.0) * u * u * r;
    }
    integral *= h * radial_measure(2);
    CHECK(integral == doctest::Approx(eps * eps * prof.l2sq).epsilon(1e-6));
}

TEST_CASE("Pohozaev gate")
{
    CHECK(pohozaev_check(soliton_profile(4.0)) < 1e-8);
    CHECK(pohozaev_check(planar()) < 1e-5);

    std::vector<double> v = planar().values, s = planar().slopes;
    for (auto& x : v) x *= 2.0;
    for (auto& x : s) x *= 2.0;
    const RadialProfile doubled = make_profile(planar().params, planar().radii, v, s);
    CHECK(pohozaev_check(doubled) > 0.1);
}

TEST_CASE("profile invariants")
{
    for (const ProblemParams& params : {ProblemParams{1, 3.0}, ProblemParams{2, 4.0}, ProblemParams{2, 3.0},
                                        ProblemParams{3, 4.0}}) {
        const RadialProfile prof = shoot_ground_state(params);
        CAPTURE(params.n);
        CAPTURE(params.p);
        for (std::size_t i = 1; i < prof.values.size(); ++i) REQUIRE(prof.values[i] < prof.values[i - 1]);
        CHECK(std::abs(prof.slopes.front()) < 1e-8);
        CHECK(nehari_residual(prof) < 1e-5);
        CHECK(prof.m_infty == doctest::Approx((0.5 - 1.0 / params.p) * prof.lp).epsilon(1e-14));
        CHECK(radial_ode_residual(prof) < 1e-4);
        const ProfileIntegrals again = integrate_profile(prof);
        CHECK(again.lp == doctest::Approx(prof.lp).epsilon(1e-12));
    }
}

TEST_CASE("invalid parameters")
{
    CHECK_THROWS_AS(shoot_ground_state({2, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(shoot_ground_state({3, 6.0}), std::invalid_argument);
    CHECK_THROWS_AS(shoot_ground_state({0, 4.0}), std::invalid_argument);
}
