#pragma once

#include "nehari/mesh.hpp"

#include <cstdint>
#include <vector>

namespace nehari {

/// Ground state from a boundary-value solve of the radial ODE on [0, r_max]
/// with U'(0) = 0, U(r_max) = 0: central-difference collocation on `nodes`
/// and 2·nodes uniform points, Newton on the tridiagonal system, then
/// Richardson extrapolation of the O(h²) results. Shares no code with the
/// shooting solver.
struct BvpGroundState {
    double u0 = 0.0;
    double m_infty = 0.0;
    double newton_residual = 0.0;
};

BvpGroundState collocation_ground_state(int n, double p, double r_max = 20.0, int nodes = 2000);

using DenseIntMatrix = std::vector<std::vector<std::int64_t>>;  // row major

/// Dense boundary matrices built from the triangle list alone.
DenseIntMatrix dense_boundary(const SurfaceMesh& mesh, int k);

/// Gaussian elimination over GF(q) on a dense copy.
int dense_rank_mod(DenseIntMatrix a, int q);

}  // namespace nehari
