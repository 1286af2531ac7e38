#pragma once

#include "nehari/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nehari {

/// Betti numbers b_k as coefficients of t^k, together with the prime
/// characteristic of the coefficient field.
struct PoincarePolynomial {
    std::vector<std::int64_t> coeffs;
    int characteristic = 2;
};

bool is_prime(int q);

/// Column-sparse integer matrix; entries are reduced modulo the field
/// characteristic before elimination.
struct SparseColumns {
    int rows = 0;
    std::vector<std::vector<std::pair<int, std::int64_t>>> columns;  // sorted by row
};

/// ∂_1 (edges -> vertices) and ∂_2 (triangles -> edges) with the orientation
/// induced by increasing vertex order.
SparseColumns boundary_matrix(const SurfaceMesh& mesh, int k);

/// Rank over GF(q) by column reduction on pivot rows.
int rank_mod(const SparseColumns& matrix, int q);

/// Throws std::invalid_argument for a non-prime characteristic.
PoincarePolynomial betti(const SurfaceMesh& mesh, int characteristic = 2);

std::int64_t p1(const PoincarePolynomial& poly);
std::int64_t euler_from_betti(const PoincarePolynomial& poly);

struct MorseCheck {
    std::vector<std::int64_t> z;  // Σ t^{μ−1} − P_t(M)
    bool pass = false;
    bool index_zero = false;  // a band solution had μ = 0; no division by t possible
    std::string message;
};

MorseCheck morse_relation_check(const std::vector<int>& indices, const PoincarePolynomial& poly);

}  // namespace nehari
