// Command-line driver: run simulations and post-process their ledgers and
// snapshots. See README.md for the configuration format.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nsch/diagnostics.hpp"
#include "nsch/init.hpp"
#include "nsch/run.hpp"
#include "nsch/snapshot.hpp"
#include "nsch/stepper.hpp"

namespace {

struct LedgerTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const {
        for (size_t k = 0; k < columns.size(); ++k)
            if (columns[k] == name) return static_cast<int>(k);
        throw nsch::IoError("ledger: missing column '" + name + "'");
    }
};

LedgerTable read_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nsch::IoError(path + ": cannot open ledger");
    LedgerTable t;
    std::string line;
    if (!std::getline(in, line)) throw nsch::IoError(path + ": empty ledger");
    std::stringstream hs(line);
    std::string item;
    while (std::getline(hs, item, ',')) t.columns.push_back(item);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, item, ',')) row.push_back(std::stod(item));
        if (row.size() != t.columns.size())
            throw nsch::IoError(path + ":" + std::to_string(lineno) + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

int cmd_run(const std::string& config_path) {
    nsch::RunConfig cfg = nsch::load_config(config_path);
    nsch::RunReport rep = nsch::run(cfg);
    std::printf("steps             %d\n", rep.steps);
    std::printf("final t           %.6g\n", rep.final_t);
    std::printf("ledger            %s\n", rep.ledger_path.c_str());
    std::printf("mass residual     %.3e\n", rep.max_mass_residual);
    std::printf("sigma drift       %.3e\n", rep.max_sigma_drift);
    std::printf("bel residual      %.3e (budget %.3e)\n", rep.max_bel_residual,
                nsch::bel_tolerance(cfg.tau, cfg.grid));
    std::printf("div residual      %.3e\n", rep.max_div_residual);
    std::printf("separation gap    %.3e\n", rep.min_separation_gap);
    for (const std::string& f : rep.failures) std::printf("AUDIT FAIL  %s\n", f.c_str());
    std::printf("%s\n", rep.audits_passed ? "all audits passed" : "audits FAILED");
    return rep.audits_passed ? 0 : 1;
}

int cmd_audit_energy(const std::string& ledger_path, double tau, double h) {
    LedgerTable t = read_ledger(ledger_path);
    if (t.rows.empty()) {
        std::printf("empty ledger: nothing to audit\n");
        return 0;
    }
    const int ct = t.col("t"), cres = t.col("bel_residual");
    if (tau <= 0.0) {
        if (t.rows.size() < 2)
            throw nsch::IoError("audit-energy: cannot infer tau from a single row; pass --tau");
        tau = t.rows[1][ct] - t.rows[0][ct];
    }
    const double budget = nsch::bel_tolerance(tau, h);
    double worst = -1e300;
    for (const auto& r : t.rows) worst = std::max(worst, r[cres]);
    std::printf("rows              %zu\n", t.rows.size());
    std::printf("tau               %.6g\n", tau);
    std::printf("max bel residual  %.6e\n", worst);
    std::printf("budget            %.6e\n", budget);
    const bool ok = worst <= budget;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_mass_decay(const std::string& ledger_path, double alpha, double c0) {
    LedgerTable t = read_ledger(ledger_path);
    const int ct = t.col("t"), cm = t.col("mean_phi");
    std::vector<double> times, dists;
    for (const auto& r : t.rows) {
        times.push_back(r[ct]);
        dists.push_back(std::abs(r[cm] - c0));
    }
    nsch::AttractionFit fit = nsch::fit_exponential_attraction(times, dists);
    std::printf("fitted rate       %.8g\n", fit.omega);
    std::printf("fitted amplitude  %.8g\n", fit.J);
    std::printf("rms log residual  %.3e\n", fit.rms_log_residual);
    if (alpha > 0.0 && times.size() >= 2) {
        const double tau = times[1] - times[0];
        const double discrete_rate = std::log(1.0 + alpha * tau) / tau;
        std::printf("ln(1+a*tau)/tau   %.8g\n", discrete_rate);
        std::printf("relative gap      %.3e\n",
                    std::abs(fit.omega - discrete_rate) / discrete_rate);
    }
    return 0;
}

int cmd_separation(const std::string& dir, double t_min, bool t_min_set) {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".nsch") files.push_back(e.path().string());
    if (files.empty()) throw nsch::IoError(dir + ": no .nsch snapshots found");
    std::sort(files.begin(), files.end());
    std::vector<nsch::State> traj;
    traj.reserve(files.size());
    for (const std::string& f : files) traj.push_back(nsch::read_snapshot(f));
    std::sort(traj.begin(), traj.end(),
              [](const nsch::State& a, const nsch::State& b) { return a.t < b.t; });
    if (!t_min_set) t_min = 0.5 * (traj.front().t + traj.back().t);
    const double gap = nsch::separation_gap(traj, t_min);
    std::printf("snapshots         %zu\n", traj.size());
    std::printf("window            [%.6g, %.6g]\n", t_min, traj.back().t);
    std::printf("separation gap    %.6e\n", gap);
    std::printf("%s\n", gap > 0.0 ? "PASS" : "FAIL");
    return gap > 0.0 ? 0 : 1;
}

int cmd_smoothing(const std::string& config_path, double eps, double t) {
    nsch::RunConfig cfg = nsch::load_config(config_path);
    nsch::State s0 = nsch::make_initial_state(cfg);
    const double ratio = nsch::smoothing_ratio(s0, eps, t, cfg.params, cfg.ch);
    std::printf("perturbation      %.3e\n", eps);
    std::printf("horizon t         %.6g\n", t);
    std::printf("smoothing ratio   %.6e\n", ratio);
    return std::isfinite(ratio) ? 0 : 1;
}

int cmd_attract(const std::string& config_path, int ensemble) {
    nsch::RunConfig cfg = nsch::load_config(config_path);
    nsch::AttractReport rep = nsch::attract_run(cfg, ensemble);
    std::printf("samples           %zu\n", rep.times.size());
    std::printf("fitted omega      %.6g\n", rep.fit.omega);
    std::printf("fitted J          %.6g\n", rep.fit.J);
    std::printf("rms log residual  %.3e\n", rep.fit.rms_log_residual);
    const bool ok = rep.fit.omega > 0.0 && rep.fit.rms_log_residual < 0.5;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phase Navier-Stokes / Cahn-Hilliard-Oono simulator"};
    app.require_subcommand(1);

    std::string config_path, ledger_path, snap_dir;
    double tau = 0.0, h = 0.0, alpha = 0.0, c0 = 0.0, eps = 1e-3, t_hor = 1.0, t_min = 0.0;
    int ensemble = 5;

    CLI::App* c_run = app.add_subcommand("run", "integrate a configured run");
    c_run->add_option("config", config_path, "configuration file")->required();

    CLI::App* c_audit = app.add_subcommand("audit-energy", "check a ledger's energy audit");
    c_audit->add_option("ledger", ledger_path, "ledger.csv path")->required();
    c_audit->add_option("--grid-h", h, "grid spacing used in the audit budget")->required();
    c_audit->add_option("--tau", tau, "time step (default: inferred from the t column)");

    CLI::App* c_mass = app.add_subcommand("mass-decay", "fit the Oono mean decay rate");
    c_mass->add_option("ledger", ledger_path, "ledger.csv path")->required();
    c_mass->add_option("--alpha", alpha, "Oono rate for the reference comparison");
    c_mass->add_option("--c0", c0, "Oono target mean (default 0)");

    CLI::App* c_sep = app.add_subcommand("separation", "separation gap of a snapshot set");
    c_sep->add_option("dir", snap_dir, "directory of .nsch snapshots")->required();
    CLI::Option* tmin_opt = c_sep->add_option("--t-min", t_min, "window start (default: midpoint)");

    CLI::App* c_smooth = app.add_subcommand("smoothing", "two-trajectory smoothing ratio");
    c_smooth->add_option("config", config_path, "configuration file")->required();
    c_smooth->add_option("--eps", eps, "initial phase distance")->required();
    c_smooth->add_option("--t", t_hor, "horizon time")->required();

    CLI::App* c_attr = app.add_subcommand("attract", "exponential attraction fit");
    c_attr->add_option("config", config_path, "configuration file")->required();
    c_attr->add_option("--ensemble", ensemble, "ensemble size")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(config_path);
        if (c_audit->parsed()) return cmd_audit_energy(ledger_path, tau, h);
        if (c_mass->parsed()) return cmd_mass_decay(ledger_path, alpha, c0);
        if (c_sep->parsed()) return cmd_separation(snap_dir, t_min, tmin_opt->count() > 0);
        if (c_smooth->parsed()) return cmd_smoothing(config_path, eps, t_hor);
        if (c_attr->parsed()) return cmd_attract(config_path, ensemble);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
