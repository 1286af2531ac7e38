#pragma once

#include "nehari/ansatz.hpp"
#include "nehari/config.hpp"
#include "nehari/limit_profile.hpp"
#include "nehari/solver.hpp"
#include "nehari/topology.hpp"

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

using Json = nlohmann::ordered_json;

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause)
        : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage))
    {
    }
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

Json profile_json(const RadialProfile& profile);
std::string profile_csv(const RadialProfile& profile);
Json homology_json(const SurfaceMesh& mesh, const PoincarePolynomial& poly);
Json ansatz_json(const SurfaceMesh& mesh, const EnergySetting& s, const SpikeAnsatz& w);
Json record_json(const SolutionRecord& rec);
/// Report plus the measured constants of the setting (metric equivalence,
/// reach proxy, injectivity estimate at the first seed).
Json solve_report_json(const SolveReport& report, const SurfaceMesh& mesh, const MetricField& metric);
std::string records_csv(const SolveReport& report);
Json genericity_json(const GenericitySummary& summary);
std::string field_csv(const Eigen::VectorXd& field);

/// Mesh named by the config: the file when given, else the generator.
SurfaceMesh config_mesh(const RunConfig& config);

struct Manifest {
    std::filesystem::path directory;
    std::vector<std::string> artifacts;  // relative to directory
    std::vector<std::string> verdicts;   // one per (eps, h)
    bool all_consistent = true;          // every in-regime run reached P1
};

/// profile → homology → multiplicity runs per (eps, h) → genericity summary.
/// JSON artifacts carry the config hash and version; timings live only in
/// manifest.json under "timestamps", so reruns differ nowhere else.
Manifest run_experiment(const RunConfig& config, const std::filesystem::path& directory);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nehari
