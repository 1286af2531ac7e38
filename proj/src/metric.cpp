#include "nehari/metric.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nehari {

double HarmonicFactor::operator()(double y) const
{
    const double arg = order * M_PI * y;
    return sine ? std::sin(arg) : std::cos(arg);
}

Eigen::MatrixXd PerturbationTensor::ambient(const Eigen::VectorXd& x) const
{
    const Eigen::Index n = x.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const auto& mode : modes) {
        double phi = 1.0;
        for (const auto& f : mode.factors) phi *= f((x(f.coordinate) - center(f.coordinate)) / scale(f.coordinate));
        out += phi * mode.matrix;
    }
    return out;
}

Eigen::Matrix2d PerturbationTensor::components(const TriangleFrame& frame, const Eigen::VectorXd& x) const
{
    if (modes.empty()) return Eigen::Matrix2d::Zero();
    return frame.basis.transpose() * ambient(x) * frame.basis;
}

PerturbationTensor PerturbationTensor::scaled(double factor) const
{
    PerturbationTensor out = *this;
    for (auto& mode : out.modes) mode.matrix *= factor;
    return out;
}

PerturbationTensor zero_perturbation(const SurfaceMesh& mesh)
{
    PerturbationTensor h;
    const Eigen::VectorXd lo = mesh.points().rowwise().minCoeff();
    const Eigen::VectorXd hi = mesh.points().rowwise().maxCoeff();
    h.center = 0.5 * (lo + hi);
    h.scale = (0.5 * (hi - lo)).cwiseMax(1e-12);
    return h;
}

MetricField::MetricField(std::vector<Eigen::Matrix2d> tensors, bool perturbed)
    : tensors_(std::move(tensors)), perturbed_(perturbed)
{
}

double MetricField::volume_factor(std::size_t t) const { return std::sqrt(tensors_[t].determinant()); }

MetricField::Equivalence MetricField::equivalence() const
{
    Equivalence eq{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& g : tensors_) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
        eq.c = std::min(eq.c, es.eigenvalues()(0));
        eq.C = std::max(eq.C, es.eigenvalues()(1));
    }
    return eq;
}

MetricField induced_metric(const SurfaceMesh& mesh)
{
    return MetricField(std::vector<Eigen::Matrix2d>(static_cast<std::size_t>(mesh.num_triangles()),
                                                    Eigen::Matrix2d::Identity()),
                       false);
}

MetricField perturbed_metric(const SurfaceMesh& mesh, const PerturbationTensor& h)
{
    if (h.is_zero()) return induced_metric(mesh);
    std::vector<Eigen::Matrix2d> g;
    g.reserve(static_cast<std::size_t>(mesh.num_triangles()));
    int bad = 0;
    for (const auto& frame : mesh.frames()) {
        Eigen::Matrix2d m = Eigen::Matrix2d::Identity() + h.components(frame, frame.centroid);
        m = 0.5 * (m + m.transpose());
        if (!(m.determinant() > 0.0 && m.trace() > 0.0)) ++bad;
        g.push_back(m);
    }
    if (bad > 0) {
        throw std::domain_error("g0 + h is not positive definite on " + std::to_string(bad) + " triangles");
    }
    return MetricField(std::move(g), true);
}

double tensor_norm(const PerturbationTensor& h, const SurfaceMesh& mesh, int k)
{
    if (k < 0 || k > 2) throw std::invalid_argument("tensor_norm supports k in {0, 1, 2}");
    if (h.is_zero()) return 0.0;

    // sup over charts for each (multi-index, component) pair; multi-indices
    // ordered (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
    std::array<Eigen::Matrix2d, 6> sup;
    for (auto& s : sup) s.setZero();

    const auto& frames = mesh.frames();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const TriangleFrame& ft = frames[t];
        const Eigen::Matrix2d here = h.components(ft, ft.centroid);
        sup[0] = sup[0].cwiseMax(here.cwiseAbs());
        if (k == 0) continue;

        const std::vector<int> star = mesh.triangle_star(t);
        const auto rows = static_cast<Eigen::Index>(star.size() - 1);
        Eigen::MatrixXd design(rows, 5);
        Eigen::MatrixXd rhs(rows, 3);
        Eigen::Index r = 0;
        for (int s : star) {
            if (s == t) continue;
            const Eigen::VectorXd offset = frames[s].centroid - ft.centroid;
            const double x = ft.basis.col(0).dot(offset);
            const double y = ft.basis.col(1).dot(offset);
            design.row(r) << x, y, 0.5 * x * x, x * y, 0.5 * y * y;
            const Eigen::Matrix2d there = h.components(ft, frames[s].centroid) - here;
            rhs.row(r) << there(0, 0), there(0, 1), there(1, 1);
            ++r;
        }
        const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(rhs);
        for (int beta = 0; beta < (k == 1 ? 2 : 5); ++beta) {
            Eigen::Matrix2d d;
            d << coef(beta, 0), coef(beta, 1), coef(beta, 1), coef(beta, 2);
            sup[1 + beta] = sup[1 + beta].cwiseMax(d.cwiseAbs());
        }
    }
    const int count = k == 0 ? 1 : (k == 1 ? 3 : 6);
    double total = 0.0;
    for (int b = 0; b < count; ++b) total += sup[b].sum();
    return total;
}

PerturbationTensor sample_perturbation(const SurfaceMesh& mesh, double rho, std::uint64_t seed, int k,
                                       int num_modes, int max_order)
{
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be non-negative");
    PerturbationTensor h = zero_perturbation(mesh);
    h.k = k;
    h.rho = rho;
    h.seed = seed;
    if (rho == 0.0) return h;

    const int n = mesh.ambient_dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> degree(1, 3);
    std::uniform_int_distribution<int> coordinate(0, n - 1);
    std::uniform_int_distribution<int> order(1, std::max(1, max_order));
    std::bernoulli_distribution sine(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int m = 0; m < num_modes; ++m) {
        PerturbationMode mode;
        const int d = degree(rng);
        for (int f = 0; f < d; ++f) {
            HarmonicFactor factor;
            factor.coordinate = coordinate(rng);
            factor.order = order(rng);
            factor.sine = sine(rng);
            mode.factors.push_back(factor);
        }
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
        }
        mode.matrix = 0.5 * (a + a.transpose());
        h.modes.push_back(std::move(mode));
    }
    const double raw = tensor_norm(h, mesh, k);
    if (!(raw > 0.0)) {
        throw std::logic_error("sampled perturbation has zero norm");
    }
    h = h.scaled(rho / raw * (1.0 - 1e-12));
    h.rho = rho;
    perturbed_metric(mesh, h);  // throws if g0 + h leaves the SPD cone
    return h;
}

Eigen::VectorXd lumped_mass(const SurfaceMesh& mesh, const MetricField& metric)
{
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.num_vertices());
    const auto& frames = mesh.frames();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double a = frames[t].area * metric.volume_factor(static_cast<std::size_t>(t)) / 3.0;
        for (int v : mesh.triangles()[t]) mass(v) += a;
    }
    return mass;
}

double quadrature(const SurfaceMesh& mesh, const MetricField& metric, std::span<const double> integrand)
{
    if (static_cast<int>(integrand.size()) != mesh.num_vertices()) {
        throw std::invalid_argument("quadrature: integrand size does not match vertex count");
    }
    const auto& frames = mesh.frames();
    double total = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const double mean = (integrand[tri[0]] + integrand[tri[1]] + integrand[tri[2]]) / 3.0;
        total += frames[t].area * metric.volume_factor(static_cast<std::size_t>(t)) * mean;
    }
    return total;
}

double quadrature(const SurfaceMesh& mesh, const MetricField& metric, const Eigen::VectorXd& integrand)
{
    return quadrature(mesh, metric, std::span<const double>(integrand.data(), static_cast<std::size_t>(integrand.size())));
}

std::array<Eigen::Vector2d, 3> isometric_corners(const TriangleFrame& frame, const Eigen::Matrix2d& g)
{
    const Eigen::Matrix2d lt = g.llt().matrixU();  // g = U^T U, |p|_g = |U p|
    return {lt * frame.local[0], lt * frame.local[1], lt * frame.local[2]};
}

std::string perturbation_to_json(const PerturbationTensor& h)
{
    nlohmann::json j;
    j["seed"] = h.seed;
    j["rho"] = h.rho;
    j["k"] = h.k;
    j["center"] = std::vector<double>(h.center.data(), h.center.data() + h.center.size());
    j["scale"] = std::vector<double>(h.scale.data(), h.scale.data() + h.scale.size());
    j["modes"] = nlohmann::json::array();
    for (const auto& mode : h.modes) {
        nlohmann::json m;
        m["factors"] = nlohmann::json::array();
        for (const auto& f : mode.factors) {
            m["factors"].push_back({{"coordinate", f.coordinate}, {"order", f.order}, {"sine", f.sine}});
        }
        m["dim"] = mode.matrix.rows();
        m["coefficients"] = std::vector<double>(mode.matrix.data(), mode.matrix.data() + mode.matrix.size());
        j["modes"].push_back(m);
    }
    return j.dump(2);
}

PerturbationTensor perturbation_from_json(const std::string& text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    PerturbationTensor h;
    h.seed = j.at("seed").get<std::uint64_t>();
    h.rho = j.at("rho").get<double>();
    h.k = j.at("k").get<int>();
    const auto center = j.at("center").get<std::vector<double>>();
    const auto scale = j.at("scale").get<std::vector<double>>();
    h.center = Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size()));
    h.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    for (const auto& m : j.at("modes")) {
        PerturbationMode mode;
        for (const auto& f : m.at("factors")) {
            mode.factors.push_back(
                {f.at("coordinate").get<int>(), f.at("order").get<int>(), f.at("sine").get<bool>()});
        }
        const auto dim = m.at("dim").get<Eigen::Index>();
        const auto coeffs = m.at("coefficients").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(coeffs.size()) != dim * dim) {
            throw std::invalid_argument("perturbation mode has wrong coefficient count");
        }
        mode.matrix = Eigen::Map<const Eigen::MatrixXd>(coeffs.data(), dim, dim);
        h.modes.push_back(std::move(mode));
    }
    return h;
}

}  // namespace nehari
