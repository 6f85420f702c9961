#include "lognls/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace lognls {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + key + " expects a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
    return out;
}

std::vector<Point> to_points(const std::string& key, const std::string& v) {
    std::vector<Point> out;
    for (const auto& item : split(v, ';')) {
        const std::vector<double> c = to_list(key, item);
        if (c.empty() || c.size() > 2) throw ConfigError("config: " + key + " points need 1 or 2 coordinates");
        out.push_back(Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size())));
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.source = text;
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
        if (kv.count(key)) throw ConfigError("config: duplicate key " + key);
        kv[key] = value;
        cfg.entries.emplace_back(key, value);
    }

    ExperimentConfig& e = cfg.experiment;
    int dim = e.grid.dim();
    double half_width = e.grid.half_width();
    int points = e.grid.points_per_axis();
    for (const auto& [key, v] : cfg.entries) {
        if (key == "grid.dim") dim = int(to_int(key, v));
        else if (key == "grid.half_width") half_width = to_double(key, v);
        else if (key == "grid.points_per_axis") points = int(to_int(key, v));
        else if (key == "split.delta") {
            try {
                e.split = Split(to_double(key, v));
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(std::string("config: split.delta: ") + ex.what());
            }
        }
        else if (key == "solver.step0") e.solver.step0 = to_double(key, v);
        else if (key == "solver.shrink") e.solver.shrink = to_double(key, v);
        else if (key == "solver.grow") e.solver.grow = to_double(key, v);
        else if (key == "solver.tol_residual") e.solver.tol_residual = to_double(key, v);
        else if (key == "solver.max_iters") e.solver.max_iters = int(to_int(key, v));
        else if (key == "solver.symmetrize_every") e.solver.symmetrize_every = int(to_int(key, v));
        else if (key == "solver.precondition") e.solver.precondition = to_bool(key, v);
        else if (key == "solver.precondition_shift") e.solver.precondition_shift = to_double(key, v);
        else if (key == "potential.v0") e.potential.v0 = to_double(key, v);
        else if (key == "potential.amplitude") e.potential.amplitude = to_double(key, v);
        else if (key == "potential.width") e.potential.width = to_double(key, v);
        else if (key == "potential.wells") e.potential.wells = to_points(key, v);
        else if (key == "category.delta_cut") e.delta_cut = to_double(key, v);
        else if (key == "category.m_delta") e.m_delta = to_double(key, v);
        else if (key == "category.radius") e.radius = to_double(key, v);
        else if (key == "category.distinct_tol") e.distinct_tol = to_double(key, v);
        else if (key == "category.concentration_bound") e.concentration_bound = to_double(key, v);
        else if (key == "category.perturbed_seeds") e.perturbed_seeds = int(to_int(key, v));
        else if (key == "eps_values") e.eps_values = to_list(key, v);
        else if (key == "a_values") e.a_values = to_list(key, v);
        else if (key == "mu_values") e.mu_values = to_list(key, v);
        else if (key == "output_dir") cfg.output_dir = v;
        else if (key == "rng_seed") e.rng_seed = std::uint64_t(to_int(key, v));
        else throw ConfigError("config: unknown key " + key);
    }
    try {
        e.grid = Grid(dim, half_width, points);
        e.solver.validate();
        if (!e.potential.wells.empty()) e.potential.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    if (e.perturbed_seeds < 0) throw ConfigError("config: category.perturbed_seeds must be nonnegative");
    if (!(e.distinct_tol > 0.0)) throw ConfigError("config: category.distinct_tol must be positive");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("config: cannot read " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

void require_lists(const RunConfig& cfg, bool eps, bool a, bool mu, bool wells) {
    const ExperimentConfig& e = cfg.experiment;
    if (eps && e.eps_values.empty()) throw ConfigError("config: missing eps_values");
    if (a && e.a_values.empty()) throw ConfigError("config: missing a_values");
    if (mu && e.mu_values.empty()) throw ConfigError("config: missing mu_values");
    if (wells && e.potential.wells.empty()) throw ConfigError("config: missing potential.wells");
    if (wells && e.potential.dim() != e.grid.dim())
        throw ConfigError("config: potential.wells dimension does not match grid.dim");
}

nlohmann::json config_echo(const RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : cfg.entries) j[k] = v;
    return j;
}

}  // namespace lognls
