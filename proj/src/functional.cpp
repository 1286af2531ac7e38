#include "nehari/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace nehari {

SparseMatrix assemble_stiffness(const SurfaceMesh& mesh, const MetricField& metric)
{
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(9 * mesh.num_triangles()));
    const auto& frames = mesh.frames();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriangleFrame& f = frames[t];
        Eigen::Matrix2d edges;
        edges.col(0) = f.local[1] - f.local[0];
        edges.col(1) = f.local[2] - f.local[0];
        Eigen::Matrix<double, 2, 3> ref;
        ref << -1, 1, 0, -1, 0, 1;
        // chart gradients of the three hat functions
        const Eigen::Matrix<double, 2, 3> grad = edges.transpose().inverse() * ref;
        const Eigen::Matrix2d& g = metric[static_cast<std::size_t>(t)];
        const Eigen::Matrix3d local = f.area * std::sqrt(g.determinant()) * grad.transpose() * g.inverse() * grad;
        const auto& tri = mesh.triangles()[t];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) entries.emplace_back(tri[a], tri[b], local(a, b));
        }
    }
    SparseMatrix s(mesh.num_vertices(), mesh.num_vertices());
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

EnergySetting make_setting(const SurfaceMesh& mesh, MetricField metric, const ProblemParams& params, double eps)
{
    params.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    EnergySetting s;
    s.mesh = &mesh;
    s.params = params;
    s.eps = eps;
    s.stiffness = assemble_stiffness(mesh, metric);
    s.mass = lumped_mass(mesh, metric);
    s.metric = std::move(metric);
    s.scale = std::pow(eps, -params.n);
    return s;
}

Eigen::VectorXd positive_part(const Eigen::VectorXd& u) { return u.cwiseMax(0.0); }

namespace {

Eigen::VectorXd positive_power(const Eigen::VectorXd& u, double e)
{
    return u.unaryExpr([e](double x) { return x > 0.0 ? std::pow(x, e) : 0.0; });
}

}  // namespace

double energy(const EnergySetting& s, const Eigen::VectorXd& u)
{
    const double p = s.params.p;
    const double grad = u.dot(s.stiffness * u);
    const double l2 = s.mass.dot(u.cwiseProduct(u));
    const double nonlinear = s.mass.dot(positive_power(u, p));
    return s.scale * (0.5 * s.eps * s.eps * grad + 0.5 * l2 - nonlinear / p);
}

Eigen::VectorXd gradient(const EnergySetting& s, const Eigen::VectorXd& u)
{
    const double p = s.params.p;
    return s.scale * (s.eps * s.eps * (s.stiffness * u) + s.mass.cwiseProduct(u - positive_power(u, p - 1.0)));
}

Eigen::VectorXd hessian_apply(const EnergySetting& s, const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    const double p = s.params.p;
    const Eigen::VectorXd weight = s.mass.cwiseProduct(Eigen::VectorXd::Ones(u.size()) - (p - 1.0) * positive_power(u, p - 2.0));
    return s.scale * (s.eps * s.eps * (s.stiffness * v) + weight.cwiseProduct(v));
}

SparseMatrix hessian(const EnergySetting& s, const Eigen::VectorXd& u)
{
    const double p = s.params.p;
    const Eigen::VectorXd weight = s.mass.cwiseProduct(Eigen::VectorXd::Ones(u.size()) - (p - 1.0) * positive_power(u, p - 2.0));
    SparseMatrix h = (s.scale * s.eps * s.eps) * s.stiffness;
    for (int i = 0; i < s.size(); ++i) h.coeffRef(i, i) += s.scale * weight(i);
    return h;
}

double eps_norm_sq(const EnergySetting& s, const Eigen::VectorXd& u)
{
    return s.scale * (s.eps * s.eps * u.dot(s.stiffness * u) + s.mass.dot(u.cwiseProduct(u)));
}

SparseMatrix norm_matrix(const EnergySetting& s)
{
    SparseMatrix b = (s.scale * s.eps * s.eps) * s.stiffness;
    for (int i = 0; i < s.size(); ++i) b.coeffRef(i, i) += s.scale * s.mass(i);
    return b;
}

double lp_term(const EnergySetting& s, const Eigen::VectorXd& u)
{
    return s.scale * s.mass.dot(positive_power(u, s.params.p));
}

double nehari_derivative(const EnergySetting& s, const Eigen::VectorXd& u) { return eps_norm_sq(s, u) - lp_term(s, u); }

double nehari_t(const EnergySetting& s, const Eigen::VectorXd& u)
{
    const double lp = lp_term(s, u);
    if (!(lp > 0.0)) throw std::domain_error("Nehari projection undefined: u⁺ = 0");
    return std::pow(eps_norm_sq(s, u) / lp, 1.0 / (s.params.p - 2.0));
}

Eigen::VectorXd nehari_project(const EnergySetting& s, const Eigen::VectorXd& u) { return nehari_t(s, u) * u; }

bool in_low_energy_set(const EnergySetting& s, const Eigen::VectorXd& u, double bound, const LowEnergyTolerances& tol)
{
    const double norm_sq = eps_norm_sq(s, u);
    if (!(norm_sq > 0.0)) return false;
    if (!(std::abs(nehari_derivative(s, u)) < tol.nehari * norm_sq)) return false;
    if (!(energy(s, u) <= bound)) return false;
    const Eigen::VectorXd shifted = u - Eigen::VectorXd::Ones(u.size());
    return std::sqrt(eps_norm_sq(s, shifted)) > tol.separation;
}

double constant_exclusion_eps(const ProblemParams& params, double volume, double m_infty)
{
    return std::pow((params.p - 2.0) * volume / (8.0 * params.p * m_infty), 1.0 / params.n);
}

NormEquivalence norm_equivalence(const SurfaceMesh& mesh, const MetricField& metric)
{
    NormEquivalence eq{std::numeric_limits<double>::infinity(), 0.0};
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Matrix2d& g = metric[static_cast<std::size_t>(t)];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
        const double vol = std::sqrt(g.determinant());
        const double lo = vol / es.eigenvalues()(1);
        const double hi = vol / es.eigenvalues()(0);
        eq.c1 = std::min({eq.c1, lo, vol});
        eq.C1 = std::max({eq.C1, hi, vol});
    }
    return eq;
}

double low_energy_radius_sq(const ProblemParams& params, double m_infty, double c1)
{
    return 2.0 * params.p / (params.p - 2.0) * 2.0 * m_infty / c1;
}

}  // namespace nehari
