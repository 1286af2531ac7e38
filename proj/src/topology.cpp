#include "nehari/topology.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace nehari {

bool is_prime(int q)
{
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d) {
        if (q % d == 0) return false;
    }
    return true;
}

namespace {

std::int64_t mod(std::int64_t a, std::int64_t q) { return ((a % q) + q) % q; }

std::int64_t inverse_mod(std::int64_t a, std::int64_t q)
{
    // Fermat: a^(q-2) mod q
    std::int64_t result = 1, base = mod(a, q), e = q - 2;
    while (e > 0) {
        if (e & 1) result = result * base % q;
        base = base * base % q;
        e >>= 1;
    }
    return result;
}

}  // namespace

SparseColumns boundary_matrix(const SurfaceMesh& mesh, int k)
{
    SparseColumns m;
    if (k == 1) {
        m.rows = mesh.num_vertices();
        for (const auto& e : mesh.edges()) m.columns.push_back({{e[0], -1}, {e[1], 1}});
        return m;
    }
    if (k == 2) {
        m.rows = mesh.num_edges();
        std::map<Edge, int> index;
        for (int i = 0; i < mesh.num_edges(); ++i) index[mesh.edges()[i]] = i;
        for (Triangle t : mesh.triangles()) {
            std::sort(t.begin(), t.end());
            std::vector<std::pair<int, std::int64_t>> col = {
                {index.at({t[1], t[2]}), 1}, {index.at({t[0], t[2]}), -1}, {index.at({t[0], t[1]}), 1}};
            std::sort(col.begin(), col.end());
            m.columns.push_back(std::move(col));
        }
        return m;
    }
    throw std::invalid_argument("boundary_matrix: k must be 1 or 2");
}

int rank_mod(const SparseColumns& matrix, int q)
{
    if (!is_prime(q)) throw std::invalid_argument("field characteristic must be prime");
    using Column = std::vector<std::pair<int, std::int64_t>>;
    std::unordered_map<int, Column> pivots;  // lowest row -> reduced column with that low
    int rank = 0;
    for (const Column& original : matrix.columns) {
        Column col;
        for (const auto& [row, value] : original) {
            const std::int64_t v = mod(value, q);
            if (v != 0) col.emplace_back(row, v);
        }
        while (!col.empty()) {
            const auto it = pivots.find(col.back().first);
            if (it == pivots.end()) break;
            const Column& pivot = it->second;
            const std::int64_t factor = col.back().second * inverse_mod(pivot.back().second, q) % q;
            Column merged;
            merged.reserve(col.size() + pivot.size());
            std::size_t a = 0, b = 0;
            while (a < col.size() || b < pivot.size()) {
                if (b == pivot.size() || (a < col.size() && col[a].first < pivot[b].first)) {
                    merged.push_back(col[a++]);
                } else if (a == col.size() || pivot[b].first < col[a].first) {
                    merged.emplace_back(pivot[b].first, mod(-factor * pivot[b].second, q));
                    ++b;
                } else {
                    const std::int64_t v = mod(col[a].second - factor * pivot[b].second, q);
                    if (v != 0) merged.emplace_back(col[a].first, v);
                    ++a;
                    ++b;
                }
            }
            col = std::move(merged);
        }
        if (!col.empty()) {
            ++rank;
            pivots.emplace(col.back().first, std::move(col));
        }
    }
    return rank;
}

PoincarePolynomial betti(const SurfaceMesh& mesh, int characteristic)
{
    if (!is_prime(characteristic)) {
        throw std::invalid_argument("field characteristic " + std::to_string(characteristic) + " is not prime");
    }
    const int r1 = rank_mod(boundary_matrix(mesh, 1), characteristic);
    const int r2 = rank_mod(boundary_matrix(mesh, 2), characteristic);
    PoincarePolynomial poly;
    poly.characteristic = characteristic;
    poly.coeffs = {mesh.num_vertices() - r1, mesh.num_edges() - r1 - r2, mesh.num_triangles() - r2};
    return poly;
}

std::int64_t p1(const PoincarePolynomial& poly)
{
    std::int64_t total = 0;
    for (auto c : poly.coeffs) total += c;
    return total;
}

std::int64_t euler_from_betti(const PoincarePolynomial& poly)
{
    std::int64_t total = 0;
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k) total += (k % 2 == 0 ? 1 : -1) * poly.coeffs[k];
    return total;
}

MorseCheck morse_relation_check(const std::vector<int>& indices, const PoincarePolynomial& poly)
{
    MorseCheck check;
    if (std::any_of(indices.begin(), indices.end(), [](int mu) { return mu <= 0; })) {
        check.index_zero = true;
        check.message = "band solution with Morse index 0: the t factor cannot be divided out";
        return check;
    }
    std::size_t len = poly.coeffs.size();
    for (int mu : indices) len = std::max(len, static_cast<std::size_t>(mu));
    check.z.assign(len, 0);
    for (int mu : indices) ++check.z[static_cast<std::size_t>(mu - 1)];
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k) check.z[k] -= poly.coeffs[k];
    check.pass = std::all_of(check.z.begin(), check.z.end(), [](std::int64_t c) { return c >= 0; });
    check.message = check.pass ? "Z(t) has nonnegative coefficients" : "Z(t) has a negative coefficient";
    return check;
}

}  // namespace nehari
