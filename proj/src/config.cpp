#include "nsch/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nsch {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    const std::string& name;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
    }
    double num(const std::string& v) const {
        size_t pos = 0;
        double x = 0.0;
        try {
            x = std::stod(v, &pos);
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
        if (pos != v.size()) fail("trailing characters after number '" + v + "'");
        return x;
    }
    long integer(const std::string& v) const {
        const double x = num(v);
        if (x != std::floor(x)) fail("expected an integer, got '" + v + "'");
        return static_cast<long>(x);
    }
};

}  // namespace

bool RunConfig::diagnostic_enabled(const std::string& name) const {
    if (diagnostics.empty()) return true;
    return std::find(diagnostics.begin(), diagnostics.end(), name) != diagnostics.end();
}

RunConfig parse_config(std::istream& in, const std::string& name) {
    RunConfig cfg;
    Parser ps{name};
    int nx = 64, ny = 64;
    double Lx = 1.0, Ly = 1.0;

    std::string raw;
    while (std::getline(in, raw)) {
        ++ps.line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) ps.fail("expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) ps.fail("empty key");
        if (val.empty()) ps.fail("empty value for '" + key + "'");

        if (key == "nx") nx = static_cast<int>(ps.integer(val));
        else if (key == "ny") ny = static_cast<int>(ps.integer(val));
        else if (key == "Lx") Lx = ps.num(val);
        else if (key == "Ly") Ly = ps.num(val);
        else if (key == "A") cfg.params.A = ps.num(val);
        else if (key == "B") cfg.params.B = ps.num(val);
        else if (key == "chi") cfg.params.chi = ps.num(val);
        else if (key == "alpha") cfg.params.alpha = ps.num(val);
        else if (key == "c0") cfg.params.c0 = ps.num(val);
        else if (key == "theta") cfg.params.theta = ps.num(val);
        else if (key == "theta0") cfg.params.theta0 = ps.num(val);
        else if (key == "eta1") cfg.params.eta1 = ps.num(val);
        else if (key == "eta2") cfg.params.eta2 = ps.num(val);
        else if (key == "m1") cfg.params.m1 = ps.num(val);
        else if (key == "m2") cfg.params.m2 = ps.num(val);
        else if (key == "tau") cfg.tau = ps.num(val);
        else if (key == "t_end") cfg.t_end = ps.num(val);
        else if (key == "snapshot_every") cfg.snapshot_every = static_cast<int>(ps.integer(val));
        else if (key == "ledger_every") cfg.ledger_every = static_cast<int>(ps.integer(val));
        else if (key == "init") cfg.init = val;
        else if (key == "seed") cfg.seed = static_cast<unsigned long>(ps.integer(val));
        else if (key == "noise_amp") cfg.noise_amp = ps.num(val);
        else if (key == "sigma0") { cfg.sigma0 = ps.num(val); cfg.sigma0_set = true; }
        else if (key == "phi0_mean") { cfg.phi0_mean = ps.num(val); cfg.phi0_mean_set = true; }
        else if (key == "newton_tol") cfg.ch.newton_tol = ps.num(val);
        else if (key == "newton_max") cfg.ch.newton_max = static_cast<int>(ps.integer(val));
        else if (key == "clip_margin") cfg.ch.clip_margin = ps.num(val);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "diagnostics") {
            cfg.diagnostics.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item == "all") { cfg.diagnostics.clear(); break; }
                if (!item.empty()) cfg.diagnostics.push_back(item);
            }
        } else {
            ps.fail("unknown key '" + key + "'");
        }
    }

    // Validation; rejection messages name the violated hypothesis.
    if (nx < 4 || ny < 4) throw ConfigError(name + ": grid: nx and ny must be >= 4");
    if (!(Lx > 0.0 && Ly > 0.0)) throw ConfigError(name + ": grid: Lx, Ly must be > 0");
    cfg.grid = Grid(nx, ny, Lx, Ly);
    cfg.params.validate();
    if (!(cfg.tau > 0.0)) throw ConfigError(name + ": time: tau must be > 0");
    if (!(cfg.t_end >= 0.0)) throw ConfigError(name + ": time: t_end must be >= 0");
    if (cfg.ledger_every < 1) throw ConfigError(name + ": time: ledger_every must be >= 1");
    if (cfg.snapshot_every < 0)
        throw ConfigError(name + ": time: snapshot_every must be >= 0");
    if (cfg.init != "quiescent" && cfg.init != "spinodal" && cfg.init != "bubble")
        throw ConfigError(name + ": init: unknown generator '" + cfg.init + "'");
    if (!(cfg.noise_amp >= 0.0)) throw ConfigError(name + ": init: noise_amp must be >= 0");
    const double pm = cfg.phi0_mean_value();
    if (std::abs(pm) > cfg.params.m1)
        throw ConfigError(name + ": phase space: |phi0 mean| must be <= m1");
    if (cfg.init == "spinodal" && std::abs(pm) + 2.0 * cfg.noise_amp >= 1.0)
        throw ConfigError(name + ": init: |phi0_mean| + 2*noise_amp must stay below 1");
    if (std::abs(cfg.sigma0_value()) > cfg.params.m2)
        throw ConfigError(name + ": phase space: |sigma0| must be <= m2");
    cfg.ch.validate();
    for (const std::string& d : cfg.diagnostics)
        if (d != "bel" && d != "mass" && d != "sigma-mass" && d != "separation" && d != "div")
            throw ConfigError(name + ": diagnostics: unknown audit '" + d + "'");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    return parse_config(in, path);
}

}  // namespace nsch
