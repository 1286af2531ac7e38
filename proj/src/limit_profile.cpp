#include "nehari/limit_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nehari {

void ProblemParams::validate() const
{
    if (n < 1 || n > 3) {
        throw std::invalid_argument("dimension n must be 1, 2 or 3 (got " + std::to_string(n) + ")");
    }
    if (!(p > 2.0)) {
        throw std::invalid_argument("exponent p must exceed 2");
    }
    if (n == 3 && !(p < 6.0)) {
        throw std::invalid_argument("exponent p must be subcritical (p < 2n/(n-2) = 6) for n = 3");
    }
}

double radial_measure(int n)
{
    switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw std::invalid_argument("radial_measure: unsupported dimension");
    }
}

namespace {

using State = std::array<double, 2>;

struct RadialOde {
    int n;
    double p;

    State operator()(double r, const State& y) const
    {
        const double u = y[0];
        const double du = y[1];
        const double nonlinear = std::pow(std::abs(u), p - 2.0) * u;
        return {du, u - nonlinear - (n - 1) / r * du};
    }

    double second_derivative(double r, double u, double du) const
    {
        if (r == 0.0) {
            return (u - std::pow(u, p - 1.0)) / n;
        }
        return u - std::pow(std::abs(u), p - 2.0) * u - (n - 1) / r * du;
    }
};

enum class StopReason { reached_end, crossed_zero, turned_up };

// Dormand-Prince 5(4) with a standard PI-free step controller. Stops early
// when an event fires and reports which one.
class DormandPrince {
public:
    DormandPrince(RadialOde ode, double tol) : ode_(ode), tol_(tol) {}

    StopReason advance(State& y, double r0, double r1, bool watch_events)
    {
        double r = r0;
        double h = std::min(step_, r1 - r0);
        while (r < r1) {
            if (r + h > r1) {
                h = r1 - r;
            }
            State y5;
            double err = try_step(y, r, h, y5);
            if (err <= 1.0) {
                r += h;
                y = y5;
                if (watch_events) {
                    if (y[0] < 0.0) {
                        return StopReason::crossed_zero;
                    }
                    if (y[1] > 0.0) {
                        return StopReason::turned_up;
                    }
                }
                double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                h *= grow;
                if (r < r1) {
                    step_ = h;
                }
            } else {
                h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
                if (h < 1e-14) {
                    throw ShootingError("radial integrator step size underflow");
                }
            }
        }
        return StopReason::reached_end;
    }

private:
    double try_step(const State& y, double r, double h, State& out) const
    {
        static constexpr double a21 = 1.0 / 5.0;
        static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                                a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                                a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
        static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                                b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                                e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        auto add = [](const State& base, double h, std::initializer_list<std::pair<double, State>> terms) {
            State s = base;
            for (const auto& [c, k] : terms) {
                s[0] += h * c * k[0];
                s[1] += h * c * k[1];
            }
            return s;
        };

        const State k1 = ode_(r, y);
        const State k2 = ode_(r + h / 5.0, add(y, h, {{a21, k1}}));
        const State k3 = ode_(r + 3.0 * h / 10.0, add(y, h, {{a31, k1}, {a32, k2}}));
        const State k4 = ode_(r + 4.0 * h / 5.0, add(y, h, {{a41, k1}, {a42, k2}, {a43, k3}}));
        const State k5 = ode_(r + 8.0 * h / 9.0, add(y, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
        const State k6 = ode_(r + h, add(y, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}));
        out = add(y, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
        const State k7 = ode_(r + h, out);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double scale = tol_ * (1e-3 + std::max(std::abs(y[i]), std::abs(out[i])));
            err = std::max(err, std::abs(e) / scale);
        }
        return err;
    }

    RadialOde ode_;
    double tol_;
    double step_ = 1e-3;
};

constexpr double kSeriesRadius = 1e-3;

State series_start(const RadialOde& ode, double u0, double r)
{
    const double c = (u0 - std::pow(u0, ode.p - 1.0)) / ode.n;
    return {u0 + c * r * r / 2.0, c * r};
}

enum class Shot { overshoot, undershoot };

Shot classify(const RadialOde& ode, double u0, double r_max, double tol)
{
    DormandPrince rk(ode, tol);
    State y = series_start(ode, u0, kSeriesRadius);
    StopReason why = rk.advance(y, kSeriesRadius, r_max, true);
    return why == StopReason::crossed_zero ? Shot::overshoot : Shot::undershoot;
}

// Decaying solution of the linearized tail equation U'' + (n-1)/r U' - U = 0.
State tail_shape(int n, double r)
{
    switch (n) {
    case 1: return {std::exp(-r), -std::exp(-r)};
    case 2: return {std::cyl_bessel_k(0.0, r), -std::cyl_bessel_k(1.0, r)};
    default: {
        double e = std::exp(-r);
        return {e / r, -e * (1.0 / r + 1.0 / (r * r))};
    }
    }
}

std::vector<double> hybrid_grid(double r_max, double spacing)
{
    std::vector<double> grid{0.0};
    for (int k = 8; k >= 1; --k) {
        grid.push_back(spacing * std::ldexp(1.0, -k));
    }
    const auto count = static_cast<long>(std::llround(r_max / spacing));
    for (long i = 1; i <= count; ++i) {
        grid.push_back(r_max * static_cast<double>(i) / static_cast<double>(count));
    }
    return grid;
}

}  // namespace

double RadialProfile::value_at(double r) const
{
    if (r <= 0.0) {
        return values.front();
    }
    if (r >= radii.back()) {
        return 0.0;
    }
    auto it = std::upper_bound(radii.begin(), radii.end(), r);
    const auto i = static_cast<std::size_t>(std::distance(radii.begin(), it)) - 1;
    const double h = radii[i + 1] - radii[i];
    const double s = (r - radii[i]) / h;
    const double y0 = values[i];
    const double y1 = values[i + 1];
    // Fritsch-Carlson limiting keeps each cell monotone.
    double d0 = slopes[i] * h;
    double d1 = slopes[i + 1] * h;
    const double delta = y1 - y0;
    if (delta == 0.0) {
        d0 = d1 = 0.0;
    } else {
        const double a = d0 / delta;
        const double b = d1 / delta;
        if (a < 0.0) d0 = 0.0;
        if (b < 0.0) d1 = 0.0;
        const double mag = a * a + b * b;
        if (mag > 9.0) {
            const double tau = 3.0 / std::sqrt(mag);
            d0 = tau * a * delta;
            d1 = tau * b * delta;
        }
    }
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
}

ProfileIntegrals integrate_profile(const RadialProfile& profile)
{
    const int n = profile.params.n;
    const double p = profile.params.p;
    const RadialOde ode{n, p};
    const double omega = radial_measure(n);
    const auto& r = profile.radii;
    const auto& u = profile.values;
    const auto& du = profile.slopes;

    // Endpoint-corrected trapezoid: h/2 (f_a + f_b) + h^2/12 (f'_a - f'_b).
    auto weight = [n](double rr) { return n == 1 ? 1.0 : std::pow(rr, n - 1); };
    auto weight_slope = [n](double rr) { return n == 1 ? 0.0 : (n - 1) * std::pow(rr, n - 2); };

    ProfileIntegrals out;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double h = r[i + 1] - r[i];
        auto cell = [&](auto f, auto fprime) {
            return h / 2.0 * (f(i) + f(i + 1)) + h * h / 12.0 * (fprime(i) - fprime(i + 1));
        };
        auto d2 = [&](std::size_t j) { return ode.second_derivative(r[j], u[j], du[j]); };
        out.l2sq += cell([&](std::size_t j) { return weight(r[j]) * u[j] * u[j]; },
                         [&](std::size_t j) {
                             return weight_slope(r[j]) * u[j] * u[j] + weight(r[j]) * 2.0 * u[j] * du[j];
                         });
        out.gradsq += cell([&](std::size_t j) { return weight(r[j]) * du[j] * du[j]; },
                           [&](std::size_t j) {
                               return weight_slope(r[j]) * du[j] * du[j] + weight(r[j]) * 2.0 * du[j] * d2(j);
                           });
        out.lp += cell([&](std::size_t j) { return weight(r[j]) * std::pow(std::abs(u[j]), p); },
                       [&](std::size_t j) {
                           const double a = std::abs(u[j]);
                           return weight_slope(r[j]) * std::pow(a, p) +
                                  weight(r[j]) * p * std::pow(a, p - 2.0) * u[j] * du[j];
                       });
    }
    out.l2sq *= omega;
    out.gradsq *= omega;
    out.lp *= omega;
    return out;
}

double radial_ode_residual(const RadialProfile& profile)
{
    const int n = profile.params.n;
    const double p = profile.params.p;
    const auto& r = profile.radii;
    const auto& u = profile.values;
    const auto& du = profile.slopes;
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < r.size(); ++i) {
        const double h = r[i + 1] - r[i];
        bool uniform = true;
        for (std::size_t j = i - 2; j < i + 2; ++j) {
            if (std::abs((r[j + 1] - r[j]) - h) > 1e-9 * h) {
                uniform = false;
            }
        }
        if (!uniform) {
            continue;
        }
        const double d2 = (-du[i + 2] + 8.0 * du[i + 1] - 8.0 * du[i - 1] + du[i - 2]) / (12.0 * h);
        const double res = d2 + (n - 1) / r[i] * du[i] - u[i] + std::pow(std::abs(u[i]), p - 2.0) * u[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

RadialProfile make_profile(const ProblemParams& params, std::vector<double> radii,
                           std::vector<double> values, std::vector<double> slopes)
{
    params.validate();
    if (radii.size() < 5 || radii.size() != values.size() || radii.size() != slopes.size()) {
        throw std::invalid_argument("make_profile: inconsistent sample arrays");
    }
    if (radii.front() != 0.0 || !std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("make_profile: radii must start at 0 and increase");
    }
    RadialProfile profile;
    profile.params = params;
    profile.radii = std::move(radii);
    profile.values = std::move(values);
    profile.slopes = std::move(slopes);
    profile.u0 = profile.values.front();
    const ProfileIntegrals ints = integrate_profile(profile);
    profile.l2sq = ints.l2sq;
    profile.gradsq = ints.gradsq;
    profile.lp = ints.lp;
    profile.m_infty = (0.5 - 1.0 / params.p) * ints.lp;
    profile.ode_residual = radial_ode_residual(profile);
    return profile;
}

RadialProfile shoot_ground_state(const ProblemParams& params, double tol, double r_max)
{
    params.validate();
    if (!(tol > 0.0)) {
        throw std::invalid_argument("shoot_ground_state: tol must be positive");
    }
    const RadialOde ode{params.n, params.p};
    const double rk_tol = 1e-13;

    double lo = 1.0;
    double hi = 5.0;
    for (int widen = 0; classify(ode, lo, r_max, rk_tol) == Shot::overshoot; ++widen) {
        if (widen > 60) throw ShootingError("no undershoot found below u0 = " + std::to_string(lo));
        lo *= 0.5;
    }
    for (int widen = 0; classify(ode, hi, r_max, rk_tol) == Shot::undershoot; ++widen) {
        if (widen > 60) throw ShootingError("no overshoot found below u0 = " + std::to_string(hi));
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (classify(ode, mid, r_max, rk_tol) == Shot::overshoot ? hi : lo) = mid;
    }
    const double u0 = lo;

    const std::vector<double> grid = hybrid_grid(r_max, 0.002);
    std::vector<double> values(grid.size());
    std::vector<double> slopes(grid.size());
    values[0] = u0;
    slopes[0] = 0.0;

    // The shooting trajectory is unstable in the far field; hand over to the
    // linearized decaying tail once U has dropped by five orders of magnitude.
    DormandPrince rk(ode, rk_tol);
    State y{};
    std::size_t junction = grid.size();
    bool started = false;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= kSeriesRadius) {
            y = series_start(ode, u0, grid[i]);
        } else {
            if (!started) {
                y = series_start(ode, u0, kSeriesRadius);
                rk.advance(y, kSeriesRadius, grid[i], false);
            } else {
                rk.advance(y, grid[i - 1], grid[i], false);
            }
            started = true;
        }
        if (y[0] <= 0.0 || y[1] >= 0.0) {
            throw ShootingError("shooting trajectory left the ground-state branch at r = " +
                                std::to_string(grid[i]));
        }
        values[i] = y[0];
        slopes[i] = y[1];
        if (y[0] < 1e-5 * u0) {
            junction = i;
            break;
        }
    }
    if (junction == grid.size()) {
        throw ShootingError("profile did not decay below the tail threshold before r_max; increase r_max");
    }
    const State anchor = tail_shape(params.n, grid[junction]);
    const double amplitude = values[junction] / anchor[0];
    for (std::size_t i = junction + 1; i < grid.size(); ++i) {
        const State t = tail_shape(params.n, grid[i]);
        values[i] = amplitude * t[0];
        slopes[i] = amplitude * t[1];
    }

    RadialProfile profile = make_profile(params, grid, std::move(values), std::move(slopes));
    if (!(profile.ode_residual < tol)) {
        std::ostringstream msg;
        msg << "radial ODE residual " << profile.ode_residual << " exceeds tolerance " << tol;
        throw ShootingError(msg.str());
    }
    return profile;
}

double scale_profile(const RadialProfile& profile, double eps, double x)
{
    return profile.value_at(x / eps);
}

double pohozaev_check(const RadialProfile& profile)
{
    const ProfileIntegrals ints = integrate_profile(profile);
    const double n = profile.params.n;
    const double p = profile.params.p;
    const double identity = (n - 2.0) / 2.0 * ints.gradsq + n / 2.0 * ints.l2sq - n / p * ints.lp;
    return std::abs(identity) / ints.lp;
}

double nehari_residual(const RadialProfile& profile)
{
    const ProfileIntegrals ints = integrate_profile(profile);
    return std::abs(ints.gradsq + ints.l2sq - ints.lp) / ints.lp;
}

double soliton_1d(double p, double x)
{
    const double a = std::pow(p / 2.0, 1.0 / (p - 2.0));
    return a * std::pow(1.0 / std::cosh((p - 2.0) * x / 2.0), 2.0 / (p - 2.0));
}

double soliton_1d_slope(double p, double x)
{
    const double k = (p - 2.0) / 2.0;
    return -soliton_1d(p, x) * (2.0 / (p - 2.0)) * k * std::tanh(k * x);
}

}  // namespace nehari
