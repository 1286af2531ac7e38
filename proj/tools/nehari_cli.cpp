// Command-line front end. JSON goes to stdout; CSV files and run directories
// go under $NEHARI_OUTPUT_ROOT (default ./nehari-out).
#include "nehari/acceptance.hpp"
#include "nehari/config.hpp"
#include "nehari/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace nehari;

namespace {

struct MeshArgs {
    std::string file;
    std::string shape;
    int refine = 3;

    void attach(CLI::App* app)
    {
        app->add_option("--mesh", file, "mesh file (OFF / nOFF)");
        app->add_option("--shape", shape, "generator instead of a file: sphere|torus|rp2|octahedron");
        app->add_option("--refine", refine, "generator refinement level");
    }

    SurfaceMesh load() const
    {
        RunConfig c;
        c.mesh_file = file;
        if (file.empty()) {
            if (shape.empty()) throw ConfigError("either --mesh or --shape is required");
            c.shape = shape;
            c.refine = refine;
        }
        return config_mesh(c);
    }
};

std::filesystem::path in_root(const std::string& name)
{
    const std::filesystem::path root = output_root();
    std::filesystem::create_directories(root);
    return root / name;
}

std::vector<int> parse_ids(const std::string& list)
{
    std::vector<int> ids;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ids.push_back(std::stoi(item));
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spike solutions of -eps^2 Δ_g u + u = (u+)^(p-1) on triangulated surfaces"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    ProblemParams params;
    double profile_tol = 1e-6;
    std::string profile_csv_path;
    auto* profile_cmd = app.add_subcommand("profile", "radial ground state and m_infty");
    profile_cmd->add_option("--n", params.n, "dimension");
    profile_cmd->add_option("--p", params.p, "exponent");
    profile_cmd->add_option("--tol", profile_tol, "shooting tolerance");
    profile_cmd->add_option("--csv", profile_csv_path, "write (r, U) samples here");

    MeshArgs homology_mesh;
    int characteristic = 2;
    auto* homology_cmd = app.add_subcommand("homology", "Betti numbers over GF(q)");
    homology_mesh.attach(homology_cmd);
    homology_cmd->add_option("--char", characteristic, "prime field characteristic");

    MeshArgs ansatz_mesh;
    double ansatz_eps = 0.1, ansatz_radius = 0.0;
    int ansatz_center = 0;
    std::string ansatz_csv;
    auto* ansatz_cmd = app.add_subcommand("ansatz", "projected spike ansatz at a vertex");
    ansatz_mesh.attach(ansatz_cmd);
    ansatz_cmd->add_option("--eps", ansatz_eps)->required();
    ansatz_cmd->add_option("--center", ansatz_center, "vertex id")->required();
    ansatz_cmd->add_option("--radius", ansatz_radius, "cutoff radius (default 0.8 x injectivity estimate)");
    ansatz_cmd->add_option("--csv", ansatz_csv, "field output (default under the output root)");

    MeshArgs solve_mesh;
    double solve_eps = 0.1, solve_rho = 0.0, solve_delta = 0.0, solve_radius = 0.0;
    std::uint64_t solve_seed = 0;
    int solve_k = 2;
    std::string solve_csv;
    auto* solve_cmd = app.add_subcommand("solve", "deflated multiplicity run at one (eps, h)");
    solve_mesh.attach(solve_cmd);
    solve_cmd->add_option("--eps", solve_eps)->required();
    solve_cmd->add_option("--h-seed", solve_seed, "perturbation seed (0 = unperturbed)");
    solve_cmd->add_option("--rho", solve_rho, "perturbation size");
    solve_cmd->add_option("--k", solve_k, "norm order");
    solve_cmd->add_option("--delta", solve_delta, "energy band half-width (default 0.1 m_infty)");
    solve_cmd->add_option("--radius", solve_radius, "cutoff radius");
    solve_cmd->add_option("--csv", solve_csv, "per-record CSV (default under the output root)");

    MeshArgs sweep_mesh;
    std::vector<double> sweep_eps;
    int sweep_samples = 1;
    double sweep_rho = 0.02, sweep_radius = 0.0;
    std::uint64_t sweep_seed = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "multiplicity runs over an eps list and sampled h");
    sweep_mesh.attach(sweep_cmd);
    sweep_cmd->add_option("--eps-list", sweep_eps)->required()->delimiter(',');
    sweep_cmd->add_option("--samples", sweep_samples, "perturbations per eps (plus h = 0)");
    sweep_cmd->add_option("--rho", sweep_rho);
    sweep_cmd->add_option("--seed", sweep_seed, "base seed of the perturbations");
    sweep_cmd->add_option("--radius", sweep_radius);

    std::string verify_criteria, verify_config;
    bool corrupt = false;
    auto* verify_cmd = app.add_subcommand("verify", "acceptance suite; nonzero exit on any failure");
    verify_cmd->add_option("--criteria", verify_criteria, "comma-separated subset of 1..9");
    verify_cmd->add_option("--config", verify_config, "config file to validate first");
    verify_cmd->add_flag("--inject-corrupt-profile", corrupt, "double the profile before the gates");

    std::string shape = "sphere", mesh_out, perturb_out;
    int refine = 3;
    double gen_rho = 0.0;
    std::uint64_t gen_seed = 1;
    auto* gen_cmd = app.add_subcommand("mesh-gen", "write a generated mesh (and optionally a perturbation)");
    gen_cmd->add_option("--shape", shape, "sphere|torus|rp2|octahedron");
    gen_cmd->add_option("--refine", refine);
    gen_cmd->add_option("--out", mesh_out, "mesh file")->required();
    gen_cmd->add_option("--rho", gen_rho, "also sample a perturbation of this size");
    gen_cmd->add_option("--seed", gen_seed);
    gen_cmd->add_option("--perturbation-out", perturb_out, "perturbation JSON path");

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "full experiment from a config file");
    run_cmd->add_option("config", run_config)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*profile_cmd) {
            const RadialProfile prof = shoot_ground_state(params, profile_tol);
            if (!profile_csv_path.empty()) write_text(profile_csv_path, profile_csv(prof));
            std::cout << profile_json(prof).dump(2) << "\n";
        } else if (*homology_cmd) {
            const SurfaceMesh mesh = homology_mesh.load();
            std::cout << homology_json(mesh, betti(mesh, characteristic)).dump(2) << "\n";
        } else if (*ansatz_cmd) {
            const SurfaceMesh mesh = ansatz_mesh.load();
            if (ansatz_center < 0 || ansatz_center >= mesh.num_vertices()) throw ConfigError("--center out of range");
            const RadialProfile prof = shoot_ground_state(ProblemParams{});
            const EnergySetting s = make_setting(mesh, induced_metric(mesh), prof.params, ansatz_eps);
            const SpikeAnsatz w = build_ansatz(s, prof, ansatz_center, ansatz_radius);
            const std::string csv =
                ansatz_csv.empty() ? in_root("ansatz_q" + std::to_string(ansatz_center) + ".csv").string() : ansatz_csv;
            write_text(csv, field_csv(w.projected()));
            std::cout << ansatz_json(mesh, s, w).dump(2) << "\n";
        } else if (*solve_cmd) {
            const SurfaceMesh mesh = solve_mesh.load();
            const RadialProfile prof = shoot_ground_state(ProblemParams{});
            MetricField metric = induced_metric(mesh);
            if (solve_seed != 0) {
                if (!(solve_rho > 0.0)) throw ConfigError("--h-seed needs --rho > 0");
                metric = perturbed_metric(mesh, sample_perturbation(mesh, solve_rho, solve_seed, solve_k));
            }
            RunOptions options;
            options.delta = solve_delta;
            options.radius = solve_radius;
            const SolveReport report = multiplicity_run(mesh, metric, prof, solve_eps, options);
            const std::string csv = solve_csv.empty() ? in_root("solve_records.csv").string() : solve_csv;
            write_text(csv, records_csv(report));
            std::cout << solve_report_json(report, mesh, metric).dump(2) << "\n";
        } else if (*sweep_cmd) {
            const SurfaceMesh mesh = sweep_mesh.load();
            const RadialProfile prof = shoot_ground_state(ProblemParams{});
            RunOptions options;
            options.radius = sweep_radius;
            Json out = Json::array();
            for (double eps : sweep_eps) {
                for (int k = 0; k <= sweep_samples; ++k) {
                    const std::uint64_t seed = k == 0 ? 0 : sweep_seed + static_cast<std::uint64_t>(k - 1);
                    const MetricField metric =
                        seed == 0 ? induced_metric(mesh)
                                  : perturbed_metric(mesh, sample_perturbation(mesh, sweep_rho, seed));
                    const SolveReport r = multiplicity_run(mesh, metric, prof, eps, options);
                    double min_margin = std::numeric_limits<double>::infinity();
                    for (const auto& rec : r.records) min_margin = std::min(min_margin, rec.min_abs_eig / rec.tol_eig);
                    out.push_back({{"eps", eps},
                                   {"h_seed", seed},
                                   {"distinct_count", r.distinct_count},
                                   {"p1", r.p1_target},
                                   {"band_count", r.band_count},
                                   {"degenerate_count", r.degenerate_count},
                                   {"min_margin", r.records.empty() ? Json(nullptr) : Json(min_margin)},
                                   {"morse_applicable", r.morse_applicable},
                                   {"morse_pass", r.morse.pass},
                                   {"verdict", r.verdict}});
                }
            }
            std::cout << out.dump(2) << "\n";
        } else if (*verify_cmd) {
            if (!verify_config.empty()) {
                const RunConfig c = load_config(verify_config);
                validate(c);
                config_mesh(c);
            }
            AcceptanceOptions options;
            options.criteria = parse_ids(verify_criteria);
            options.corrupt_profile = corrupt;
            Json failures = Json::array();
            for (const CriterionResult& r : run_acceptance(options)) {
                std::cout << format_result(r) << std::endl;
                if (!r.pass) failures.push_back({{"criterion", r.id}, {"name", r.name}, {"detail", r.detail}});
            }
            write_text(in_root("verify.json"), Json{{"version", kVersion}, {"failures", failures}}.dump(2) + "\n");
            return failures.empty() ? 0 : 1;
        } else if (*gen_cmd) {
            const SurfaceMesh mesh = generate_mesh(shape, refine);
            save_mesh(mesh, mesh_out);
            if (gen_rho > 0.0) {
                const std::string path = perturb_out.empty() ? mesh_out + ".h.json" : perturb_out;
                write_text(path, perturbation_to_json(sample_perturbation(mesh, gen_rho, gen_seed)) + "\n");
            }
            std::cout << "wrote " << mesh_out << " (" << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
                      << " triangles)\n";
        } else if (*run_cmd) {
            const RunConfig c = load_config(run_config);
            const std::string dir = c.output_dir.empty() ? "run_" + config_hash(c) : c.output_dir;
            const Manifest m = run_experiment(c, output_root() / dir);
            for (const auto& v : m.verdicts) std::cout << v << "\n";
            std::cout << "artifacts in " << m.directory.string() << "\n";
            return m.all_consistent ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MeshError& e) {
        std::cerr << "mesh error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
