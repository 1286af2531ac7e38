#include "nehari/oracles.hpp"

#include "nehari/limit_profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nehari {

namespace {

struct GridSolution {
    double u0 = 0.0;
    double lp = 0.0;
    double residual = 0.0;
};

GridSolution solve_grid(int n, double p, double r_max, int nodes)
{
    const int m = nodes;  // unknowns U_0 .. U_{m-1}, U_m = 0
    const double h = r_max / m;
    std::vector<double> u(static_cast<std::size_t>(m));
    // 1D soliton shape as the initial guess, lifted to the n-dimensional height.
    const double a0 = std::pow(p / 2.0, 1.0 / (p - 2.0)) * (n == 1 ? 1.0 : 1.6);
    for (int i = 0; i < m; ++i) {
        u[static_cast<std::size_t>(i)] = a0 * std::pow(1.0 / std::cosh(0.5 * (p - 2.0) * i * h), 2.0 / (p - 2.0));
    }

    const auto residual = [&](const std::vector<double>& v, std::vector<double>& f) {
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            const double ui = v[static_cast<std::size_t>(i)];
            const double up = i + 1 < m ? v[static_cast<std::size_t>(i + 1)] : 0.0;
            const double um = i > 0 ? v[static_cast<std::size_t>(i - 1)] : up;
            double lap = (up - 2.0 * ui + um) / (h * h);
            if (i == 0) lap *= n;  // (n−1)/r U' → (n−1) U''(0)
            else lap += (n - 1) / (i * h) * (up - um) / (2.0 * h);
            f[static_cast<std::size_t>(i)] = lap - ui + std::pow(std::max(ui, 0.0), p - 1.0);
            worst = std::max(worst, std::abs(f[static_cast<std::size_t>(i)]));
        }
        return worst;
    };

    std::vector<double> f(u.size()), lower(u.size()), diag(u.size()), upper(u.size()), step(u.size());
    double res = residual(u, f);
    for (int it = 0; it < 100 && res > 1e-12; ++it) {
        for (int i = 0; i < m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double ui = u[k];
            const double drift = i == 0 ? 0.0 : (n - 1) / (i * h) / (2.0 * h);
            double d = -2.0 / (h * h) - 1.0 + (p - 1.0) * std::pow(std::max(ui, 0.0), p - 2.0);
            if (i == 0) {
                d = -2.0 * n / (h * h) - 1.0 + (p - 1.0) * std::pow(std::max(ui, 0.0), p - 2.0);
                upper[k] = 2.0 * n / (h * h);
                lower[k] = 0.0;
            } else {
                upper[k] = 1.0 / (h * h) + drift;
                lower[k] = 1.0 / (h * h) - drift;
            }
            diag[k] = d;
            step[k] = -f[k];
        }
        // Thomas algorithm
        for (int i = 1; i < m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double w = lower[k] / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            step[k] -= w * step[k - 1];
        }
        step[static_cast<std::size_t>(m - 1)] /= diag[static_cast<std::size_t>(m - 1)];
        for (int i = m - 2; i >= 0; --i) {
            const auto k = static_cast<std::size_t>(i);
            step[k] = (step[k] - upper[k] * step[k + 1]) / diag[k];
        }
        double lambda = 1.0;
        std::vector<double> trial(u.size());
        double trial_res = 0.0;
        for (int back = 0; back < 30; ++back, lambda *= 0.5) {
            for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] + lambda * step[k];
            trial_res = residual(trial, f);
            if (trial_res < res) break;
        }
        u = trial;
        res = residual(u, f);
    }
    if (!(res < 1e-8)) throw std::runtime_error("collocation oracle: Newton did not converge");
    if (u[0] < 0.5) throw std::runtime_error("collocation oracle: converged to the trivial solution");

    // Trapezoid rule for ∫ U^p r^{n-1} dr (U_m = 0).
    double lp = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = i * h;
        const double w = i == 0 ? 0.5 : 1.0;
        lp += w * std::pow(u[static_cast<std::size_t>(i)], p) * std::pow(r, n - 1);
    }
    lp *= h * radial_measure(n);
    return {u[0], lp, res};
}

}  // namespace

BvpGroundState collocation_ground_state(int n, double p, double r_max, int nodes)
{
    if (nodes < 10) throw std::invalid_argument("collocation oracle needs more nodes");
    const GridSolution coarse = solve_grid(n, p, r_max, nodes);
    const GridSolution fine = solve_grid(n, p, r_max, 2 * nodes);
    BvpGroundState out;
    out.u0 = (4.0 * fine.u0 - coarse.u0) / 3.0;
    out.m_infty = (0.5 - 1.0 / p) * (4.0 * fine.lp - coarse.lp) / 3.0;
    out.newton_residual = std::max(coarse.residual, fine.residual);
    return out;
}

DenseIntMatrix dense_boundary(const SurfaceMesh& mesh, int k)
{
    std::map<std::pair<int, int>, int> edge_id;
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles()) {
        for (int a = 0; a < 3; ++a) {
            int u = t[a], v = t[(a + 1) % 3];
            if (u > v) std::swap(u, v);
            if (edge_id.emplace(std::make_pair(u, v), static_cast<int>(edges.size())).second) edges.emplace_back(u, v);
        }
    }
    if (k == 1) {
        DenseIntMatrix a(static_cast<std::size_t>(mesh.num_vertices()), std::vector<std::int64_t>(edges.size(), 0));
        for (std::size_t j = 0; j < edges.size(); ++j) {
            a[static_cast<std::size_t>(edges[j].first)][j] = -1;
            a[static_cast<std::size_t>(edges[j].second)][j] = 1;
        }
        return a;
    }
    if (k == 2) {
        DenseIntMatrix a(edges.size(), std::vector<std::int64_t>(mesh.triangles().size(), 0));
        for (std::size_t j = 0; j < mesh.triangles().size(); ++j) {
            auto t = mesh.triangles()[j];
            std::sort(t.begin(), t.end());
            a[static_cast<std::size_t>(edge_id.at({t[1], t[2]}))][j] += 1;
            a[static_cast<std::size_t>(edge_id.at({t[0], t[2]}))][j] -= 1;
            a[static_cast<std::size_t>(edge_id.at({t[0], t[1]}))][j] += 1;
        }
        return a;
    }
    throw std::invalid_argument("dense_boundary: k must be 1 or 2");
}

int dense_rank_mod(DenseIntMatrix a, int q)
{
    const auto norm = [q](std::int64_t x) { return ((x % q) + q) % q; };
    const auto inverse = [&](std::int64_t x) {
        for (std::int64_t y = 1; y < q; ++y) {
            if (norm(x * y) == 1) return y;
        }
        throw std::invalid_argument("no inverse modulo q");
    };
    if (a.empty()) return 0;
    const std::size_t rows = a.size(), cols = a[0].size();
    for (auto& row : a) {
        for (auto& x : row) x = norm(x);
    }
    int rank = 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && a[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[r]);
        const std::int64_t inv = inverse(a[r][c]);
        for (auto& x : a[r]) x = norm(x * inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const std::int64_t f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] = norm(a[i][j] - f * a[r][j]);
        }
        ++r;
        ++rank;
    }
    return rank;
}

}  // namespace nehari
