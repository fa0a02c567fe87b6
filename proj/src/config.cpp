#include "tfw/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tfw {

NuclearConfig RunConfig::nuclei() const {
    NuclearConfig cfg;
    cfg.sites = sites;
    cfg.bump_radius = R0;
    cfg.weights = weights;
    return cfg;
}

SolverOptions RunConfig::solver_options() const {
    SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.dealias = dealias;
    return o;
}

namespace {

std::vector<double> numbers_of(std::istringstream& ss, const std::string& key) {
    std::vector<double> out;
    double x;
    while (ss >> x) out.push_back(x);
    if (out.empty()) throw std::runtime_error("config: no value for key '" + key + "'");
    return out;
}

bool truthy(const std::string& s) {
    return s == "1" || s == "true" || s == "yes" || s == "on";
}

} // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    bool weights_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        // allow `key = value`
        if (ss.peek() != EOF) {
            auto save = ss.tellg();
            std::string eq;
            ss >> eq;
            if (eq != "=") ss.seekg(save);
        }
        try {
            if (key == "L") cfg.L = numbers_of(ss, key).at(0);
            else if (key == "N") cfg.N = static_cast<int>(numbers_of(ss, key).at(0));
            else if (key == "R0") cfg.R0 = numbers_of(ss, key).at(0);
            else if (key == "nucleus") {
                auto v = numbers_of(ss, key);
                if (v.size() != 3 && v.size() != 4)
                    throw std::runtime_error("config: nucleus needs x y z [weight]");
                cfg.sites.push_back({v[0], v[1], v[2]});
                cfg.weights.push_back(v.size() == 4 ? v[3] : 1.0);
                if (v.size() == 4) weights_seen = true;
            }
            else if (key == "uniform_m") cfg.uniform_m = numbers_of(ss, key).at(0);
            else if (key == "a") cfg.a = numbers_of(ss, key).at(0);
            else if (key == "a_list") cfg.a_list = numbers_of(ss, key);
            else if (key == "tol") cfg.tol = numbers_of(ss, key).at(0);
            else if (key == "max_iter") cfg.max_iter = static_cast<int>(numbers_of(ss, key).at(0));
            else if (key == "site") cfg.site = static_cast<int>(numbers_of(ss, key).at(0));
            else if (key == "force_site") cfg.force_site = static_cast<int>(numbers_of(ss, key).at(0));
            else if (key == "displacement") {
                auto v = numbers_of(ss, key);
                if (v.size() != 3) throw std::runtime_error("config: displacement needs dx dy dz");
                cfg.displacement = {v[0], v[1], v[2]};
            }
            else if (key == "fd_step") cfg.fd_step = numbers_of(ss, key).at(0);
            else if (key == "halfwidths") cfg.halfwidths = numbers_of(ss, key);
            else if (key == "shell_width") cfg.shell_width = numbers_of(ss, key).at(0);
            else if (key == "r_list") cfg.r_list = numbers_of(ss, key);
            else if (key == "force_fit_max_a") cfg.force_fit_max_a = numbers_of(ss, key).at(0);
            else if (key == "dump_fields") { std::string v; ss >> v; cfg.dump_fields = truthy(v); }
            else if (key == "dealias") { std::string v; ss >> v; cfg.dealias = truthy(v); }
            else throw std::runtime_error("config: unknown key '" + key + "'");
        } catch (const std::out_of_range&) {
            throw std::runtime_error("config: malformed line " + std::to_string(lineno));
        }
    }
    if (!weights_seen) cfg.weights.clear();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    return parse_config(is);
}

} // namespace tfw
