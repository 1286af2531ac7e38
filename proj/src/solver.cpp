#include "nehari/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>
#include <sstream>

namespace nehari {

std::string to_string(SolveError::Reason reason)
{
    switch (reason) {
    case SolveError::Reason::max_iterations: return "max iterations exceeded";
    case SolveError::Reason::collapse_deflated: return "collapsed onto a deflated solution";
    case SolveError::Reason::collapse_constant: return "collapsed onto a constant";
    case SolveError::Reason::breakdown: return "breakdown";
    }
    return "unknown";
}

double scaled_l2_distance(const EnergySetting& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    const Eigen::VectorXd d = u - v;
    return std::sqrt(s.scale * s.mass.dot(d.cwiseProduct(d)));
}

namespace {

// Solves H y = g, falling back to LU when LDLᵀ without pivoting breaks down.
Eigen::VectorXd solve_symmetric(const SparseMatrix& h, const Eigen::VectorXd& g)
{
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(h);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd y = ldlt.solve(g);
        if (ldlt.info() == Eigen::Success && y.allFinite()) return y;
    }
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(h);
    lu.factorize(h);
    if (lu.info() != Eigen::Success) throw SolveError(SolveError::Reason::breakdown, "singular Newton system");
    Eigen::VectorXd y = lu.solve(g);
    if (!y.allFinite()) throw SolveError(SolveError::Reason::breakdown, "non-finite Newton step");
    return y;
}

struct Deflation {
    const EnergySetting& s;
    const std::vector<Eigen::VectorXd>& fields;

    double eta(const Eigen::VectorXd& u) const
    {
        double value = 1.0;
        for (const auto& f : fields) {
            const double d = scaled_l2_distance(s, u, f);
            value *= 1.0 / (d * d) + 1.0;
        }
        return value;
    }

    // aᵀy / η with a = ∇η.
    double log_derivative(const Eigen::VectorXd& u, const Eigen::VectorXd& y) const
    {
        double total = 0.0;
        for (const auto& f : fields) {
            const Eigen::VectorXd diff = u - f;
            const double d2 = s.scale * s.mass.dot(diff.cwiseProduct(diff));
            const double dir = s.scale * s.mass.dot(diff.cwiseProduct(y));
            total += (-2.0 * dir / (d2 * d2)) / (1.0 / d2 + 1.0);
        }
        return total;
    }
};

double relative_residual(const Eigen::VectorXd& g, const Eigen::VectorXd& u) { return g.norm() / (1.0 + u.norm()); }

}  // namespace

SolutionRecord newton_solve(const EnergySetting& s, const Eigen::VectorXd& seed,
                            const std::vector<Eigen::VectorXd>& deflation, double distinct_scale,
                            const SolveOptions& options)
{
    if (seed.size() != s.size()) throw std::invalid_argument("seed size does not match the mesh");
    if (!(lp_term(s, seed) > 0.0)) throw std::domain_error("seed has vanishing positive part");
    const Deflation defl{s, deflation};
    Eigen::VectorXd u = seed;
    int iterations = 0;
    bool converged = false;
    for (; iterations <= options.max_iterations; ++iterations) {
        if (iterations < options.nehari_iterations) {
            if (!(lp_term(s, u) > 0.0)) {
                throw SolveError(SolveError::Reason::breakdown, "positive part vanished during Nehari projection");
            }
            u = nehari_project(s, u);
        }
        const Eigen::VectorXd g = gradient(s, u);
        if (relative_residual(g, u) < options.tol) {
            converged = true;
            break;
        }
        if (iterations == options.max_iterations) break;
        const Eigen::VectorXd y = solve_symmetric(hessian(s, u), g);
        double tau = 1.0;
        if (!deflation.empty()) {
            const double denom = 1.0 + defl.log_derivative(u, y);
            if (denom > 0.0) tau = 1.0 / denom;
        }
        // Spikes can only travel about eps per step before the linearization
        // breaks down, so long Newton steps are capped in the |||.||| norm
        // instead of line-searched.
        Eigen::VectorXd step = -tau * y;
        const double step_norm = std::sqrt(eps_norm_sq(s, step));
        const double cap = options.step_cap * std::sqrt(eps_norm_sq(s, u));
        if (step_norm > cap) step *= cap / step_norm;
        u += step;
        if (!u.allFinite()) throw SolveError(SolveError::Reason::breakdown, "iterate became non-finite");
    }
    if (!converged) {
        throw SolveError(SolveError::Reason::max_iterations,
                         "no convergence in " + std::to_string(options.max_iterations) + " iterations");
    }

    const double mean = s.mass.dot(u) / s.mass.sum();
    const Eigen::VectorXd centered = u - Eigen::VectorXd::Constant(u.size(), mean);
    if (std::sqrt(eps_norm_sq(s, centered)) < options.constant_tol) {
        std::ostringstream msg;
        msg << "converged to the constant " << mean;
        throw SolveError(SolveError::Reason::collapse_constant, msg.str());
    }
    const double threshold = options.distinct_factor * distinct_scale;
    for (std::size_t j = 0; j < deflation.size(); ++j) {
        if (scaled_l2_distance(s, u, deflation[j]) < threshold) {
            throw SolveError(SolveError::Reason::collapse_deflated,
                             "converged onto deflated solution " + std::to_string(j));
        }
    }

    SolutionRecord rec;
    rec.field = u;
    rec.energy = energy(s, u);
    rec.grad_norm = relative_residual(gradient(s, u), u);
    const double norm_sq = eps_norm_sq(s, u);
    rec.nehari_residual = std::abs(nehari_derivative(s, u)) / norm_sq;
    const double level = (0.5 - 1.0 / s.params.p) * norm_sq;
    rec.level_residual = std::abs(rec.energy - level) / std::abs(rec.energy);
    rec.newton_iters = iterations;
    rec.min_value = u.minCoeff();
    rec.barycenter = barycenter(s, *s.mesh, u);

    SparseMatrix a = (s.eps * s.eps) * s.stiffness;
    for (int i = 0; i < s.size(); ++i) a.coeffRef(i, i) += s.mass(i);
    Eigen::SimplicialLLT<SparseMatrix> llt(a);
    const Eigen::VectorXd rhs = s.mass.cwiseProduct(
        u.unaryExpr([p = s.params.p](double x) { return x > 0.0 ? std::pow(x, p - 1.0) : 0.0; }));
    rec.smoothed_min = llt.solve(rhs).minCoeff();
    return rec;
}

SolutionRecord nehari_minimize(const EnergySetting& s, const Eigen::VectorXd& seed, double distinct_scale,
                               const SolveOptions& options, int max_descent)
{
    Eigen::SimplicialLLT<SparseMatrix> b_chol(norm_matrix(s));
    if (b_chol.info() != Eigen::Success) throw std::runtime_error("norm matrix is not positive definite");
    Eigen::VectorXd u = nehari_project(s, seed);
    double j = energy(s, u);
    for (int it = 0; it < max_descent; ++it) {
        const Eigen::VectorXd g = gradient(s, u);
        const Eigen::VectorXd d = b_chol.solve(g);
        const double slope = g.dot(d);
        if (std::sqrt(slope / eps_norm_sq(s, u)) < 1e-5) break;
        double alpha = 1.0;
        for (; alpha > 1e-8; alpha *= 0.5) {
            const Eigen::VectorXd v = u - alpha * d;
            if (!(lp_term(s, v) > 0.0)) continue;
            const Eigen::VectorXd w = nehari_project(s, v);
            const double jw = energy(s, w);
            if (jw < j - 1e-4 * alpha * slope) {
                u = w;
                j = jw;
                break;
            }
        }
        if (!(alpha > 1e-8)) break;  // no further decrease available
    }
    return newton_solve(s, u, {}, distinct_scale, options);
}

MorseResult morse_index(const EnergySetting& s, const Eigen::VectorXd& u, double tol_eig)
{
    const SparseMatrix h = hessian(s, u);
    const SparseMatrix b = norm_matrix(s);
    Eigen::SimplicialLLT<SparseMatrix> b_chol(b);
    if (b_chol.info() != Eigen::Success) throw std::runtime_error("norm matrix is not positive definite");
    const int n = s.size();

    MorseResult result;
    // λ(B⁻¹H) ⊂ [1 − max w, 1] with w = (p−1)(u⁺)^{p−2}; shifting by max w
    // makes the power iteration find the top of the spectrum.
    const double w_max = (s.params.p - 1.0) * std::pow(std::max(u.maxCoeff(), 0.0), s.params.p - 2.0);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
    for (int it = 0; it < 60; ++it) {
        x = b_chol.solve(h * x) + w_max * x;
        x /= x.norm();
    }
    result.lambda_max = x.dot(h * x) / x.dot(b * x);
    result.tol_eig = tol_eig > 0.0 ? tol_eig : 1e-6 * result.lambda_max;

    const SparseMatrix shifted = h + result.tol_eig * b;
    Eigen::SimplicialLDLT<SparseMatrix> inertia(shifted);
    if (inertia.info() != Eigen::Success) throw std::runtime_error("eigen-solver non-convergence: LDLT failed");
    const Eigen::VectorXd d = inertia.vectorD();
    result.index = static_cast<int>((d.array() < 0.0).count());

    // Shift-invert block iteration with H⁻¹B for the eigenvalues nearest 0.
    Eigen::SimplicialLDLT<SparseMatrix> h_fact(h);
    if (h_fact.info() != Eigen::Success) throw std::runtime_error("eigen-solver non-convergence: H factorization");
    const int k = std::min(8, n);
    Eigen::MatrixXd block(n, k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) block(i, j) = normal(rng);
    }
    double previous = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int it = 0; it < 500; ++it) {
        Eigen::MatrixXd y = h_fact.solve(b * block);
        const Eigen::MatrixXd gram = y.transpose() * (b * y);
        const Eigen::MatrixXd hs = y.transpose() * (h * y);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (hs + hs.transpose()),
                                                                       0.5 * (gram + gram.transpose()));
        if (ritz.info() != Eigen::Success) throw std::runtime_error("eigen-solver non-convergence: Ritz step");
        block = y * ritz.eigenvectors();
        for (int j = 0; j < k; ++j) block.col(j) /= std::sqrt(block.col(j).dot(b * block.col(j)));
        const double smallest = ritz.eigenvalues().cwiseAbs().minCoeff();
        if (std::abs(smallest - previous) <= 1e-3 * result.tol_eig + 1e-10 * smallest) {
            previous = smallest;
            settled = true;
            break;
        }
        previous = smallest;
    }
    if (!settled) throw std::runtime_error("eigen-solver non-convergence: subspace iteration");
    result.min_abs_eig = previous;
    result.degenerate = result.min_abs_eig < result.tol_eig;
    return result;
}

Eigen::VectorXd dense_spectrum(const EnergySetting& s, const Eigen::VectorXd& u)
{
    const Eigen::MatrixXd h = Eigen::MatrixXd(hessian(s, u));
    const Eigen::MatrixXd b = Eigen::MatrixXd(norm_matrix(s));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(h, b, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense generalized eigensolver failed");
    return es.eigenvalues();
}

std::vector<int> farthest_point_centers(const SurfaceMesh& mesh, int count)
{
    const int nv = mesh.num_vertices();
    count = std::min(count, nv);
    std::vector<int> centers;
    if (count <= 0) return centers;
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
    int next = 0;
    for (int c = 0; c < count; ++c) {
        centers.push_back(next);
        dist = dist.cwiseMin((mesh.points().colwise() - mesh.points().col(next)).colwise().norm().transpose());
        dist.maxCoeff(&next);
    }
    return centers;
}

SolveReport multiplicity_run(const SurfaceMesh& mesh, const MetricField& metric, const RadialProfile& profile,
                             double eps, const RunOptions& options)
{
    const EnergySetting s = make_setting(mesh, metric, profile.params, eps);
    SolveReport report;
    report.eps = eps;
    report.m_infty = profile.m_infty;
    report.delta = options.delta > 0.0 ? options.delta : 0.1 * profile.m_infty;
    if (!(report.delta < 0.25 * profile.m_infty)) {
        throw std::invalid_argument("delta must lie in (0, m_infty/4)");
    }
    report.eps_threshold = constant_exclusion_eps(profile.params, s.volume(), profile.m_infty);
    report.in_regime = eps < report.eps_threshold;
    const PoincarePolynomial poly = betti(mesh, options.characteristic);
    report.p1_target = p1(poly);
    report.reach = reach_proxy(mesh);

    const std::vector<int> centers = options.seed_centers.empty()
                                         ? farthest_point_centers(mesh, static_cast<int>(4 * report.p1_target))
                                         : options.seed_centers;
    const double distinct_scale = std::sqrt(profile.l2sq);
    const double ceiling = 2.0 * profile.m_infty;
    std::vector<Eigen::VectorXd> found;

    for (int center : centers) {
        Eigen::VectorXd seed;
        try {
            seed = build_ansatz(s, profile, center, options.radius).projected();
        } catch (const InjectivityError& e) {
            report.attempts.push_back({center, std::string("rejected: ") + e.what(), 0});
            continue;
        }
        for (int k = 0; k < options.max_solutions_per_seed; ++k) {
            SolutionRecord rec;
            try {
                rec = newton_solve(s, seed, found, distinct_scale, options.solve);
            } catch (const SolveError& e) {
                report.attempts.push_back({center, e.what(), 0});
                break;
            }
            found.push_back(rec.field);
            if (!(rec.energy < ceiling)) {
                report.attempts.push_back({center, "rejected: energy above 2 m_infty", rec.newton_iters});
                continue;
            }
            const MorseResult morse = morse_index(s, rec.field);
            rec.morse_index = morse.index;
            rec.min_abs_eig = morse.min_abs_eig;
            rec.tol_eig = morse.tol_eig;
            rec.degenerate = morse.degenerate;
            rec.seed_center = center;
            report.attempts.push_back({center, "converged", rec.newton_iters});
            report.records.push_back(std::move(rec));
        }
    }

    report.distinct_count = static_cast<int>(report.records.size());
    bool all_nondegenerate = true;
    for (const auto& rec : report.records) {
        if (std::abs(rec.energy - profile.m_infty) >= report.delta) continue;
        ++report.band_count;
        if (rec.degenerate) {
            ++report.degenerate_count;
            all_nondegenerate = false;
        } else {
            report.band_indices.push_back(rec.morse_index);
        }
    }
    report.morse_applicable = all_nondegenerate && report.band_count > 0;
    report.morse = morse_relation_check(report.band_indices, poly);
    report.pass = report.distinct_count >= report.p1_target;

    std::ostringstream verdict;
    if (!report.in_regime) {
        verdict << "eps = " << eps << " is outside (0, " << report.eps_threshold << "): no claim";
    } else if (report.pass) {
        verdict << "consistent with the multiplicity bound at (eps, h): " << report.distinct_count
                << " distinct nonconstant solutions below 2 m_infty, P1 = " << report.p1_target;
    } else {
        verdict << "not consistent at (eps, h): " << report.distinct_count << " distinct solutions found, P1 = "
                << report.p1_target;
    }
    report.verdict = verdict.str();
    return report;
}

GenericitySummary genericity_probe(const SurfaceMesh& mesh, const RadialProfile& profile, double eps_lo,
                                   double eps_hi, double rho, int num_samples, std::uint64_t seed,
                                   const RunOptions& options)
{
    if (num_samples < 1) throw std::invalid_argument("genericity probe needs at least one sample");
    if (!(eps_lo > 0.0 && eps_lo <= eps_hi)) throw std::invalid_argument("invalid eps range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GenericitySummary summary;
    int good = 0;
    for (int i = 0; i < num_samples; ++i) {
        GenericitySample sample;
        sample.eps = std::exp(std::log(eps_lo) + unit(rng) * (std::log(eps_hi) - std::log(eps_lo)));
        sample.h_seed = rng();
        const PerturbationTensor h = sample_perturbation(mesh, rho, sample.h_seed);
        const SolveReport report = multiplicity_run(mesh, perturbed_metric(mesh, h), profile, sample.eps, options);
        sample.records = static_cast<int>(report.records.size());
        sample.min_margin = std::numeric_limits<double>::infinity();
        for (const auto& rec : report.records) {
            const double margin = rec.min_abs_eig / rec.tol_eig;
            sample.margins.push_back(margin);
            sample.min_margin = std::min(sample.min_margin, margin);
        }
        sample.nondegenerate = sample.records > 0 && sample.min_margin > 1.0;
        if (sample.nondegenerate) ++good;
        summary.samples.push_back(std::move(sample));
    }
    summary.fraction_nondegenerate = static_cast<double>(good) / num_samples;
    return summary;
}

KernelProbe refinement_kernel_probe(const std::vector<SurfaceMesh>& levels, const RadialProfile& profile, double eps,
                                    const Eigen::VectorXd& center, const SolveOptions& options)
{
    if (levels.size() < 3) throw std::invalid_argument("kernel probe needs three refinement levels");
    KernelProbe probe;
    for (const SurfaceMesh& mesh : levels) {
        const EnergySetting s = make_setting(mesh, induced_metric(mesh), profile.params, eps);
        Eigen::Index q = 0;
        (mesh.points().colwise() - center).colwise().squaredNorm().minCoeff(&q);
        const Eigen::VectorXd seed = build_ansatz(s, profile, static_cast<int>(q)).projected();
        const SolutionRecord rec = newton_solve(s, seed, {}, std::sqrt(profile.l2sq), options);
        const MorseResult morse = morse_index(s, rec.field);
        probe.mesh_size.push_back(mesh.mean_edge_length());
        probe.margins.push_back(morse.min_abs_eig);
        probe.tol_eig = morse.tol_eig;
    }
    // P1 eigenvalue errors are O(h^2): under halving, λ(h/2) + (λ(h/2) − λ(h))/3
    // estimates the continuum value; the last two estimates bound its error.
    const auto richardson = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
    const std::size_t n = probe.margins.size();
    probe.extrapolated = richardson(probe.margins[n - 2], probe.margins[n - 1]);
    probe.error = std::abs(probe.extrapolated - richardson(probe.margins[n - 3], probe.margins[n - 2]));
    probe.kernel = std::abs(probe.extrapolated) <= std::max(probe.tol_eig, probe.error);
    return probe;
}

}  // namespace nehari
