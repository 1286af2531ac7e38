#include "nehari/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nehari {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_real(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size()) throw ConfigError(key + ": expected a real number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_seed(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    std::uint64_t x = 0;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.front() == '-') throw ConfigError(key + ": expected a seed, got '" + v + "'");
    return x;
}

std::string real(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& text)
{
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (key == "mesh") c.mesh_file = v;
        else if (key == "shape") c.shape = v;
        else if (key == "refine") c.refine = static_cast<int>(to_int(key, v));
        else if (key == "n") c.params.n = static_cast<int>(to_int(key, v));
        else if (key == "p") c.params.p = to_real(key, v);
        else if (key == "profile_tol") c.profile_tol = to_real(key, v);
        else if (key == "eps") {
            c.eps_list.clear();
            for (const auto& item : split_list(v)) c.eps_list.push_back(to_real(key, item));
        } else if (key == "rho") c.rho = to_real(key, v);
        else if (key == "h_seeds") {
            c.h_seeds.clear();
            for (const auto& item : split_list(v)) c.h_seeds.push_back(to_seed(key, item));
        } else if (key == "k") c.k = static_cast<int>(to_int(key, v));
        else if (key == "delta") c.delta = to_real(key, v);
        else if (key == "radius") c.radius = to_real(key, v);
        else if (key == "char") c.characteristic = static_cast<int>(to_int(key, v));
        else if (key == "max_solutions_per_seed") c.max_solutions_per_seed = static_cast<int>(to_int(key, v));
        else if (key == "newton_tol") c.solve.tol = to_real(key, v);
        else if (key == "max_iterations") c.solve.max_iterations = static_cast<int>(to_int(key, v));
        else if (key == "step_cap") c.solve.step_cap = to_real(key, v);
        else if (key == "constant_tol") c.solve.constant_tol = to_real(key, v);
        else if (key == "distinct_factor") c.solve.distinct_factor = to_real(key, v);
        else if (key == "genericity_samples") c.genericity_samples = static_cast<int>(to_int(key, v));
        else if (key == "genericity_eps_lo") c.genericity_eps_lo = to_real(key, v);
        else if (key == "genericity_eps_hi") c.genericity_eps_hi = to_real(key, v);
        else if (key == "genericity_seed") c.genericity_seed = to_seed(key, v);
        else if (key == "output_dir") c.output_dir = v;
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& c)
{
    std::ostringstream os;
    const auto list = [](const auto& xs, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
        return s;
    };
    os << "mesh = " << c.mesh_file << "\n"
       << "shape = " << c.shape << "\n"
       << "refine = " << c.refine << "\n"
       << "n = " << c.params.n << "\n"
       << "p = " << real(c.params.p) << "\n"
       << "profile_tol = " << real(c.profile_tol) << "\n"
       << "eps = " << list(c.eps_list, real) << "\n"
       << "rho = " << real(c.rho) << "\n"
       << "h_seeds = " << list(c.h_seeds, [](std::uint64_t s) { return std::to_string(s); }) << "\n"
       << "k = " << c.k << "\n"
       << "delta = " << real(c.delta) << "\n"
       << "radius = " << real(c.radius) << "\n"
       << "char = " << c.characteristic << "\n"
       << "max_solutions_per_seed = " << c.max_solutions_per_seed << "\n"
       << "newton_tol = " << real(c.solve.tol) << "\n"
       << "max_iterations = " << c.solve.max_iterations << "\n"
       << "step_cap = " << real(c.solve.step_cap) << "\n"
       << "constant_tol = " << real(c.solve.constant_tol) << "\n"
       << "distinct_factor = " << real(c.solve.distinct_factor) << "\n"
       << "genericity_samples = " << c.genericity_samples << "\n"
       << "genericity_eps_lo = " << real(c.genericity_eps_lo) << "\n"
       << "genericity_eps_hi = " << real(c.genericity_eps_hi) << "\n"
       << "genericity_seed = " << c.genericity_seed << "\n"
       << "output_dir = " << c.output_dir << "\n";
    return os.str();
}

std::string config_hash(const RunConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : format_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void validate(const RunConfig& c)
{
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("n, p: ") + e.what());
    }
    if (c.mesh_file.empty() && c.shape != "sphere" && c.shape != "torus" && c.shape != "rp2" &&
        c.shape != "octahedron") {
        throw ConfigError("shape: unknown generator '" + c.shape + "'");
    }
    if (c.refine < 0) throw ConfigError("refine must be nonnegative");
    if (c.eps_list.empty()) throw ConfigError("eps: at least one value required");
    for (double e : c.eps_list) {
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps: " + real(e) + " is outside (0, 1)");
    }
    if (c.rho < 0.0) throw ConfigError("rho must be nonnegative");
    if (!c.h_seeds.empty() && !(c.rho > 0.0)) throw ConfigError("h_seeds given but rho is 0");
    if (c.k < 0 || c.k > 2) throw ConfigError("k must be 0, 1 or 2");
    if (c.delta < 0.0) throw ConfigError("delta must be positive (0 selects the default)");
    if (!is_prime(c.characteristic)) throw ConfigError("char: " + std::to_string(c.characteristic) + " is not prime");
    if (c.max_solutions_per_seed < 1) throw ConfigError("max_solutions_per_seed must be at least 1");
    if (!(c.profile_tol > 0.0)) throw ConfigError("profile_tol must be positive");
    if (!(c.solve.tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (c.solve.max_iterations < 1) throw ConfigError("max_iterations must be positive");
    if (!(c.solve.step_cap > 0.0)) throw ConfigError("step_cap must be positive");
    if (!(c.solve.constant_tol > 0.0)) throw ConfigError("constant_tol must be positive");
    if (!(c.solve.distinct_factor > 0.0)) throw ConfigError("distinct_factor must be positive");
    if (c.genericity_samples < 0) throw ConfigError("genericity_samples must be nonnegative");
    if (c.genericity_samples > 0) {
        if (!(c.rho > 0.0)) throw ConfigError("genericity probe needs rho > 0");
        if (!(c.genericity_eps_lo > 0.0 && c.genericity_eps_lo <= c.genericity_eps_hi && c.genericity_eps_hi < 1.0)) {
            throw ConfigError("genericity_eps_lo/hi must satisfy 0 < lo <= hi < 1");
        }
    }
}

void validate_delta(const RunConfig& c, double m_infty)
{
    if (c.delta > 0.0 && !(c.delta < 0.25 * m_infty)) {
        throw ConfigError("delta = " + real(c.delta) + " must lie in (0, m_infty/4) with m_infty = " + real(m_infty));
    }
}

std::filesystem::path output_root()
{
    const char* env = std::getenv("NEHARI_OUTPUT_ROOT");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("nehari-out");
}

}  // namespace nehari
