#include "nehari/experiment.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace nehari {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string field_name(int q)
{
    return "GF(" + std::to_string(q) + ")";
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

Json profile_json(const RadialProfile& profile)
{
    Json j;
    j["params"] = {{"n", profile.params.n}, {"p", profile.params.p}};
    j["u0"] = profile.u0;
    j["m_infty"] = profile.m_infty;
    j["l2sq"] = profile.l2sq;
    j["gradsq"] = profile.gradsq;
    j["lp"] = profile.lp;
    j["grid"] = {{"points", profile.radii.size()}, {"r_max", profile.r_max()}};
    j["residuals"] = {{"ode", profile.ode_residual},
                      {"nehari", nehari_residual(profile)},
                      {"pohozaev", pohozaev_check(profile)}};
    return j;
}

std::string profile_csv(const RadialProfile& profile)
{
    std::ostringstream os;
    os << std::setprecision(17) << "r,U\n";
    for (std::size_t i = 0; i < profile.radii.size(); ++i) os << profile.radii[i] << "," << profile.values[i] << "\n";
    return os.str();
}

Json homology_json(const SurfaceMesh& mesh, const PoincarePolynomial& poly)
{
    Json j;
    j["field"] = field_name(poly.characteristic);
    j["betti"] = poly.coeffs;
    j["poincare_coeffs"] = poly.coeffs;
    j["p1"] = p1(poly);
    j["euler"] = euler_from_betti(poly);
    j["euler_vef"] = mesh.euler_characteristic();
    j["orientable"] = mesh.orientable();
    return j;
}

Json ansatz_json(const SurfaceMesh& mesh, const EnergySetting& s, const SpikeAnsatz& w)
{
    const Eigen::VectorXd u = w.projected();
    const Barycenter b = barycenter(s, mesh, u);
    Json j;
    j["center"] = w.center;
    j["eps"] = w.eps;
    j["radius"] = w.radius;
    j["t"] = w.t;
    j["energy"] = w.energy_after_projection;
    j["barycenter"] = {{"point", to_vector(b.point)}, {"distance_to_mesh", b.distance_to_mesh}};
    j["gap_to_center"] = (b.point - mesh.point(w.center)).norm();
    return j;
}

Json record_json(const SolutionRecord& r)
{
    Json j;
    j["energy"] = r.energy;
    j["grad_norm"] = r.grad_norm;
    j["nehari_residual"] = r.nehari_residual;
    j["level_residual"] = r.level_residual;
    j["morse_index"] = r.morse_index;
    j["min_abs_eig"] = r.min_abs_eig;
    j["tol_eig"] = r.tol_eig;
    j["degenerate"] = r.degenerate;
    j["barycenter"] = {{"point", to_vector(r.barycenter.point)}, {"distance_to_mesh", r.barycenter.distance_to_mesh}};
    j["seed_center"] = r.seed_center;
    j["newton_iters"] = r.newton_iters;
    j["min_value"] = r.min_value;
    j["smoothed_min"] = r.smoothed_min;
    return j;
}

Json solve_report_json(const SolveReport& report, const SurfaceMesh& mesh, const MetricField& metric)
{
    Json j;
    j["eps"] = report.eps;
    j["delta"] = report.delta;
    j["m_infty"] = report.m_infty;
    j["eps_threshold"] = report.eps_threshold;
    j["in_regime"] = report.in_regime;
    j["p1_target"] = report.p1_target;
    j["distinct_count"] = report.distinct_count;
    j["band_count"] = report.band_count;
    j["pass"] = report.pass;
    j["degenerate_count"] = report.degenerate_count;
    j["morse"] = {{"applicable", report.morse_applicable},
                  {"band_indices", report.band_indices},
                  {"z", report.morse.z},
                  {"pass", report.morse.pass},
                  {"index_zero", report.morse.index_zero},
                  {"message", report.morse.message}};
    const auto eq = metric.equivalence();
    const NormEquivalence ne = norm_equivalence(mesh, metric);
    Json constants;
    constants["metric_c"] = eq.c;
    constants["metric_C"] = eq.C;
    constants["norm_c1"] = ne.c1;
    constants["norm_C1"] = ne.C1;
    constants["reach_proxy"] = report.reach;
    const int q = report.attempts.empty() ? 0 : report.attempts.front().center;
    constants["injectivity_estimate"] = injectivity_estimate(mesh, metric, q);
    constants["injectivity_vertex"] = q;
    j["constants"] = constants;
    j["verdict"] = report.verdict;
    Json records = Json::array();
    for (const auto& r : report.records) records.push_back(record_json(r));
    j["records"] = records;
    Json attempts = Json::array();
    for (const auto& a : report.attempts) {
        attempts.push_back({{"center", a.center}, {"outcome", a.outcome}, {"iterations", a.iterations}});
    }
    j["attempts"] = attempts;
    return j;
}

std::string records_csv(const SolveReport& report)
{
    std::ostringstream os;
    os << std::setprecision(17) << "energy,morse_index,min_abs_eig,tol_eig,degenerate,seed_center";
    const int dim = report.records.empty() ? 0 : static_cast<int>(report.records.front().barycenter.point.size());
    for (int d = 0; d < dim; ++d) os << ",beta" << d;
    os << "\n";
    for (const auto& r : report.records) {
        os << r.energy << "," << r.morse_index << "," << r.min_abs_eig << "," << r.tol_eig << ","
           << (r.degenerate ? 1 : 0) << "," << r.seed_center;
        for (int d = 0; d < dim; ++d) os << "," << r.barycenter.point(d);
        os << "\n";
    }
    return os.str();
}

Json genericity_json(const GenericitySummary& summary)
{
    Json j;
    j["fraction_nondegenerate"] = summary.fraction_nondegenerate;
    Json samples = Json::array();
    for (const auto& s : summary.samples) {
        samples.push_back({{"eps", s.eps},
                           {"h_seed", s.h_seed},
                           {"records", s.records},
                           {"min_margin", s.records > 0 ? Json(s.min_margin) : Json(nullptr)},
                           {"nondegenerate", s.nondegenerate},
                           {"margins", s.margins}});
    }
    j["samples"] = samples;
    return j;
}

std::string field_csv(const Eigen::VectorXd& field)
{
    std::ostringstream os;
    os << std::setprecision(17) << "vertex,u\n";
    for (Eigen::Index i = 0; i < field.size(); ++i) os << i << "," << field(i) << "\n";
    return os.str();
}

SurfaceMesh config_mesh(const RunConfig& config)
{
    if (!config.mesh_file.empty()) {
        if (!std::filesystem::exists(config.mesh_file)) throw ConfigError("mesh file not found: " + config.mesh_file);
        return load_mesh(config.mesh_file);
    }
    return generate_mesh(config.shape, config.refine);
}

Manifest run_experiment(const RunConfig& config, const std::filesystem::path& directory)
{
    validate(config);
    Manifest manifest;
    manifest.directory = directory;
    std::filesystem::create_directories(directory);
    const std::string hash = config_hash(config);
    Json timestamps;
    using Clock = std::chrono::steady_clock;

    const auto stamp = [&](Json j) {
        Json out;
        out["config_hash"] = hash;
        out["version"] = kVersion;
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
        return out;
    };
    const auto emit = [&](const std::string& name, const std::string& text) {
        write_text(directory / name, text);
        manifest.artifacts.push_back(name);
    };
    const auto emit_csv = [&](const std::string& name, const std::string& text) {
        emit(name, "# config_hash=" + hash + " version=" + kVersion + "\n" + text);
    };
    // Runs one stage, rethrowing any failure tagged with its name.
    const auto stage = [&](const std::string& name, auto&& body) {
        const auto t0 = Clock::now();
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        timestamps[name] = seconds;
        std::clog << "[nehari] " << name << ": " << std::fixed << std::setprecision(2) << seconds << " s\n";
    };

    emit("config.txt", format_config(config));

    std::optional<SurfaceMesh> mesh;
    stage("mesh", [&] { mesh.emplace(config_mesh(config)); });

    RadialProfile profile;
    stage("profile", [&] {
        profile = shoot_ground_state(config.params, config.profile_tol);
        validate_delta(config, profile.m_infty);
        emit("profile.json", stamp(profile_json(profile)).dump(2) + "\n");
        emit_csv("profile.csv", profile_csv(profile));
    });

    PoincarePolynomial poly;
    stage("homology", [&] {
        poly = betti(*mesh, config.characteristic);
        emit("homology.json", stamp(homology_json(*mesh, poly)).dump(2) + "\n");
    });

    RunOptions options;
    options.delta = config.delta;
    options.characteristic = config.characteristic;
    options.max_solutions_per_seed = config.max_solutions_per_seed;
    options.radius = config.radius;
    options.solve = config.solve;

    Json verdicts = Json::array();
    stage("solve", [&] {
        std::vector<std::uint64_t> seeds = {0};
        seeds.insert(seeds.end(), config.h_seeds.begin(), config.h_seeds.end());
        for (std::size_t i = 0; i < config.eps_list.size(); ++i) {
            const double eps = config.eps_list[i];
            for (std::uint64_t seed : seeds) {
                MetricField metric = induced_metric(*mesh);
                Json h = nullptr;
                if (seed != 0) {
                    const PerturbationTensor pert = sample_perturbation(*mesh, config.rho, seed, config.k);
                    metric = perturbed_metric(*mesh, pert);
                    h = Json::parse(perturbation_to_json(pert));
                }
                const SolveReport report = multiplicity_run(*mesh, metric, profile, eps, options);
                const std::string base = "solve_eps" + std::to_string(i) + "_h" + std::to_string(seed);
                Json j = solve_report_json(report, *mesh, metric);
                j["h_seed"] = seed;
                j["perturbation"] = h;
                emit(base + ".json", stamp(j).dump(2) + "\n");
                emit_csv(base + "_records.csv", records_csv(report));
                manifest.verdicts.push_back(report.verdict);
                if (report.in_regime && !report.pass) manifest.all_consistent = false;
                verdicts.push_back({{"eps", eps},
                                    {"h_seed", seed},
                                    {"distinct_count", report.distinct_count},
                                    {"p1", report.p1_target},
                                    {"in_regime", report.in_regime},
                                    {"verdict", report.verdict}});
            }
        }
    });

    if (config.genericity_samples > 0) {
        stage("genericity", [&] {
            const GenericitySummary summary =
                genericity_probe(*mesh, profile, config.genericity_eps_lo, config.genericity_eps_hi, config.rho,
                                 config.genericity_samples, config.genericity_seed, options);
            emit("genericity.json", stamp(genericity_json(summary)).dump(2) + "\n");
        });
    }

    Json verdict;
    verdict["runs"] = verdicts;
    verdict["summary"] = manifest.all_consistent
                             ? "every in-regime (eps, h) run is consistent with the multiplicity bound"
                             : "at least one in-regime (eps, h) run found fewer than P1 solutions";
    emit("verdict.json", stamp(verdict).dump(2) + "\n");

    Json m;
    m["artifacts"] = manifest.artifacts;
    m["timestamps"] = timestamps;
    write_text(directory / "manifest.json", stamp(m).dump(2) + "\n");
    manifest.artifacts.push_back("manifest.json");
    return manifest;
}

}  // namespace nehari
