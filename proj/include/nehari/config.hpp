#pragma once

#include "nehari/limit_profile.hpp"
#include "nehari/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

inline constexpr const char* kVersion = "0.3.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` run description. Lines starting with '#' are comments;
/// lists are comma separated. Unknown keys are errors.
struct RunConfig {
    std::string mesh_file;          // takes precedence over the generator
    std::string shape = "sphere";   // sphere | torus | rp2 | octahedron
    int refine = 3;
    ProblemParams params;
    double profile_tol = 1e-6;
    std::vector<double> eps_list = {0.1};
    double rho = 0.0;
    std::vector<std::uint64_t> h_seeds;  // each seed adds a perturbed run per eps
    int k = 2;
    double delta = 0.0;   // <= 0 selects 0.1 m_∞
    double radius = 0.0;  // cutoff radius; <= 0 selects 0.8 × injectivity estimate
    int characteristic = 2;
    int max_solutions_per_seed = 2;
    SolveOptions solve;
    int genericity_samples = 0;
    double genericity_eps_lo = 0.08;
    double genericity_eps_hi = 0.1;
    std::uint64_t genericity_seed = 1;
    std::string output_dir;  // relative paths resolve under the output root
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form: every key in a fixed order with round-trip precision.
std::string format_config(const RunConfig& config);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Static checks; throws ConfigError naming the offending key.
void validate(const RunConfig& config);
/// The δ bound needs m_∞, so it is checked once the profile exists.
void validate_delta(const RunConfig& config, double m_infty);

/// Output root from NEHARI_OUTPUT_ROOT, falling back to ./nehari-out.
std::filesystem::path output_root();

}  // namespace nehari
