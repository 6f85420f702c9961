#include "lognls/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lognls/energy.hpp"
#include "lognls/io.hpp"
#include "lognls/parallel.hpp"

namespace fs = std::filesystem;

namespace lognls {

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// manifest.json is written with status "running" before any computation and
// rewritten with status "complete" at the end; the timestamps live under
// "timing" so everything else is reproducible.
class RunManifest {
public:
    RunManifest(std::string dir, const std::string& command, const RunConfig& cfg) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
        doc_["tool"] = "lognls";
        doc_["command"] = command;
        doc_["status"] = "running";
        doc_["config"] = config_echo(cfg);
        doc_["input_hash"] = git_blob_hash(cfg.source);
        doc_["files"] = nlohmann::json::array();
        doc_["timing"] = {{"started_at", utc_now()}};
        flush();
    }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
    void add_file(const std::string& name) { doc_["files"].push_back(name); }
    void set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

    int finish(int exit_code) {
        doc_["status"] = "complete";
        doc_["exit_code"] = exit_code;
        doc_["timing"]["finished_at"] = utc_now();
        flush();
        return exit_code;
    }

private:
    void flush() const { write_json(path("manifest.json"), doc_); }

    std::string dir_;
    nlohmann::json doc_;
};

class Log {
public:
    explicit Log(bool quiet) : quiet_(quiet) {}
    template <typename... Args>
    void operator()(const Args&... args) const {
        if (quiet_) return;
        std::ostringstream os;
        (os << ... << args);
        std::cerr << os.str() << '\n';
    }

private:
    bool quiet_;
};

ExperimentConfig with_jobs(const RunConfig& cfg, const CommandOptions& opts) {
    ExperimentConfig e = cfg.experiment;
    e.jobs = opts.jobs > 0 ? opts.jobs : default_jobs();
    return e;
}

void write_solution(RunManifest& m, const std::string& tag, const Solution& s, const Field& V, const Split& split) {
    const std::string csv = tag + ".csv";
    write_field_csv(m.path(csv), s.u);
    nlohmann::json j = solution_manifest(s, csv);
    j["energy_report"] = energy_report(V, s.u, split);
    write_json(m.path(tag + ".json"), j);
    m.add_file(csv);
    m.add_file(tag + ".json");
}

void write_checks(RunManifest& m, const std::string& name, const std::vector<CheckRow>& rows) {
    write_checks_csv(m.path(name), rows);
    m.add_file(name);
}

void write_record_outputs(RunManifest& m, const ExperimentConfig& e, const MultiplicityReport& rep) {
    write_records_csv(m.path("records.csv"), rep.records, e.grid.dim());
    m.add_file("records.csv");

    std::map<std::string, Series> energy, vmax;
    for (const ExperimentRecord& r : rep.records) {
        const std::string key = r.seed_id + " a=" + num(r.a);
        energy[key].name = vmax[key].name = key;
        energy[key].x.push_back(r.eps);
        energy[key].y.push_back(r.energy);
        vmax[key].x.push_back(r.eps);
        vmax[key].y.push_back(r.v_at_max - e.potential.v0);
    }
    auto values = [](const std::map<std::string, Series>& s) {
        std::vector<Series> out;
        for (const auto& [k, v] : s) out.push_back(v);
        return out;
    };
    write_text(m.path("energy_vs_eps.svg"), svg_line_chart("Energy of solutions", "eps", "I_eps(u)", values(energy)));
    write_text(m.path("v_at_max_vs_eps.svg"),
               svg_line_chart("Potential at the peak", "eps", "V(eps xi) - V0", values(vmax)));
    const int bary_cols = e.grid.dim();
    std::ostringstream gp;
    gp << "# gnuplot script for records.csv\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal svg size 640,420\n"
       << "set xlabel 'eps'\n"
       << "set output 'energy_vs_eps.gnuplot.svg'\n"
       << "set ylabel 'energy'\n"
       << "plot 'records.csv' using 1:5 with points pt 7\n"
       << "set output 'v_at_max_vs_eps.gnuplot.svg'\n"
       << "set ylabel 'v_at_max'\n"
       << "plot 'records.csv' using 1:" << 7 + bary_cols << " with points pt 7\n";
    write_text(m.path("plots.gp"), gp.str());
    m.add_file("energy_vs_eps.svg");
    m.add_file("v_at_max_vs_eps.svg");
    m.add_file("plots.gp");
}

void write_solutions(RunManifest& m, const ExperimentConfig& e, const MultiplicityReport& rep) {
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
        const ExperimentRecord& r = rep.records[i];
        const Field V = sample_potential(e.grid, e.potential, r.eps);
        write_solution(m, "solution_a" + num(r.a) + "_eps" + num(r.eps) + "_" + r.seed_id, rep.solutions[i], V,
                       e.split);
    }
}

bool all_converged(const std::vector<Solution>& s) {
    return std::all_of(s.begin(), s.end(), [](const Solution& x) { return x.converged; });
}

void log_records(const Log& log, const std::vector<ExperimentRecord>& records) {
    for (const ExperimentRecord& r : records)
        log("job eps=", r.eps, " a=", r.a, " seed=", r.seed_id, " energy=", r.energy, " lambda=", r.lambda,
            " converged=", r.converged);
}

int count_failed(const std::vector<CheckRow>& rows) {
    return int(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
}

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg, const CommandOptions& opts) {
    if (!opts.output_override.empty()) return opts.output_override;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("LOGNLS_OUTPUT"); env != nullptr && *env != '\0') return env;
    return "lognls_out";
}

int cmd_limit(const RunConfig& cfg, const CommandOptions& opts) {
    require_lists(cfg, false, true, true, false);
    const ExperimentConfig e = with_jobs(cfg, opts);
    const Log log(opts.quiet);
    RunManifest m(resolve_output_dir(cfg, opts), "limit", cfg);

    std::vector<std::pair<double, double>> cells;
    for (double mu : e.mu_values)
        for (double a : e.a_values) cells.emplace_back(mu, a);
    std::vector<std::optional<Solution>> sols(cells.size());
    parallel_for(cells.size(), e.jobs, [&](std::size_t i) {
        sols[i] = solve_limit(e.grid, cells[i].first, cells[i].second, e.solver, e.split);
    });

    std::ostringstream table;
    table << "mu,a,lambda,energy,residual,iterations,converged,positive,gausson_lambda,gausson_energy\n"
          << std::setprecision(17);
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto [mu, a] = cells[i];
        const Solution& s = *sols[i];
        ok = ok && s.converged;
        log("job mu=", mu, " a=", a, " energy=", s.energy, " lambda=", s.lambda, " converged=", s.converged);
        const Field V(e.grid, Eigen::VectorXd::Constant(e.grid.size(), mu));
        write_solution(m, "limit_mu" + num(mu) + "_a" + num(a), s, V, e.split);
        table << mu << ',' << a << ',' << s.lambda << ',' << s.energy << ',' << s.residual << ',' << s.iterations
              << ',' << (s.converged ? 1 : 0) << ',' << (s.positive ? 1 : 0) << ','
              << gausson_lambda(e.grid.dim(), mu, a) << ',' << gausson_energy(e.grid.dim(), mu, a) << '\n';
    }
    write_text(m.path("limits.csv"), table.str());
    m.add_file("limits.csv");
    return m.finish(ok ? kExitOk : kExitNumeric);
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& opts) {
    require_lists(cfg, true, true, false, true);
    const ExperimentConfig e = with_jobs(cfg, opts);
    RunManifest m(resolve_output_dir(cfg, opts), "solve", cfg);
    const MultiplicityReport rep = run_multiplicity(e);
    log_records(Log(opts.quiet), rep.records);
    write_record_outputs(m, e, rep);
    write_solutions(m, e, rep);
    write_checks(m, "checks.csv", rep.checks);
    m.set("failed_checks", count_failed(rep.checks));
    return m.finish(all_converged(rep.solutions) ? kExitOk : kExitNumeric);
}

int cmd_sweep_eps(const RunConfig& cfg, const CommandOptions& opts) {
    require_lists(cfg, true, true, false, true);
    const ExperimentConfig e = with_jobs(cfg, opts);
    RunManifest m(resolve_output_dir(cfg, opts), "sweep-eps", cfg);
    const SweepReport rep = run_eps_sweep(e);
    log_records(Log(opts.quiet), rep.multiplicity.records);
    write_record_outputs(m, e, rep.multiplicity);
    write_solutions(m, e, rep.multiplicity);
    std::vector<CheckRow> rows = rep.multiplicity.checks;
    rows.insert(rows.end(), rep.checks.begin(), rep.checks.end());
    write_checks(m, "checks.csv", rows);

    std::ostringstream sweep;
    sweep << "eps,v_excess_lowest\n" << std::setprecision(17);
    for (std::size_t i = 0; i < rep.eps.size(); ++i) sweep << rep.eps[i] << ',' << rep.lowest_v_excess[i] << '\n';
    write_text(m.path("sweep.csv"), sweep.str());
    m.add_file("sweep.csv");
    m.set("failed_checks", count_failed(rows));
    return m.finish(all_converged(rep.multiplicity.solutions) ? kExitOk : kExitNumeric);
}

int cmd_sweep_a(const RunConfig& cfg, const CommandOptions& opts) {
    require_lists(cfg, false, true, false, false);
    ExperimentConfig e = with_jobs(cfg, opts);
    const Log log(opts.quiet);
    RunManifest m(resolve_output_dir(cfg, opts), "sweep-a", cfg);

    std::vector<double> mus = e.mu_values;
    if (mus.empty()) {
        if (e.potential.wells.empty()) throw ConfigError("config: sweep-a needs mu_values or potential.wells");
        mus = {e.potential.v0};
    }
    std::vector<std::pair<double, double>> cells;
    for (double mu : mus)
        for (double a : e.a_values) cells.emplace_back(mu, a);
    std::vector<std::optional<Solution>> sols(cells.size());
    parallel_for(cells.size(), e.jobs, [&](std::size_t i) {
        sols[i] = solve_limit(e.grid, cells[i].first, cells[i].second, e.solver, e.split);
    });
    std::map<double, Series> by_mu;
    std::ostringstream table;
    table << "mu,a,lambda,energy,residual,converged\n" << std::setprecision(17);
    bool ok = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto [mu, a] = cells[i];
        const Solution& s = *sols[i];
        ok = ok && s.converged;
        log("job mu=", mu, " a=", a, " energy=", s.energy, " converged=", s.converged);
        table << mu << ',' << a << ',' << s.lambda << ',' << s.energy << ',' << s.residual << ','
              << (s.converged ? 1 : 0) << '\n';
        by_mu[mu].name = "mu=" + num(mu);
        by_mu[mu].x.push_back(a);
        by_mu[mu].y.push_back(s.energy);
    }
    write_text(m.path("limits.csv"), table.str());
    m.add_file("limits.csv");
    std::vector<Series> series;
    for (const auto& [mu, s] : by_mu) series.push_back(s);
    write_text(m.path("energy_vs_a.svg"), svg_line_chart("Autonomous levels", "a", "I_{mu,a}", series));
    m.add_file("energy_vs_a.svg");

    if (!e.eps_values.empty() && !e.potential.wells.empty()) {
        const MultiplicityReport rep = run_multiplicity(e);
        log_records(log, rep.records);
        write_record_outputs(m, e, rep);
        write_checks(m, "checks.csv", rep.checks);
        ok = ok && all_converged(rep.solutions);
    }
    return m.finish(ok ? kExitOk : kExitNumeric);
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opts) {
    require_lists(cfg, false, true, true, false);
    const ExperimentConfig e = with_jobs(cfg, opts);
    const Log log(opts.quiet);
    RunManifest m(resolve_output_dir(cfg, opts), "verify", cfg);
    const LevelReport rep = verify_level_structure(e);

    write_checks(m, "levels.csv", rep.rows);
    write_records_csv(m.path("records.csv"), rep.records, e.grid.dim());
    m.add_file("records.csv");

    std::ostringstream table;
    table << "mu,a,energy\n" << std::setprecision(17);
    std::map<double, Series> by_a;
    for (const auto& [key, level] : rep.level) {
        table << key.first << ',' << key.second << ',' << level << '\n';
        by_a[key.second].name = "a=" + num(key.second);
        by_a[key.second].x.push_back(key.first);
        by_a[key.second].y.push_back(level);
    }
    write_text(m.path("limits.csv"), table.str());
    m.add_file("limits.csv");
    std::vector<Series> series;
    for (const auto& [a, s] : by_a) series.push_back(s);
    write_text(m.path("levels_vs_mu.svg"), svg_line_chart("Autonomous levels", "mu", "I_{mu,a}", series));
    m.add_file("levels_vs_mu.svg");

    nlohmann::json zero = nlohmann::json::object();
    for (const auto& [mu, az] : rep.a_zero) zero[num(mu)] = az;
    m.set("a_zero", zero);
    const int failed = count_failed(rep.rows);
    m.set("failed_checks", failed);
    for (const CheckRow& r : rep.rows)
        if (!r.pass) log("FAIL ", r.name, ": ", r.lhs, ' ', r.relation, ' ', r.rhs);
    log("verify: ", rep.rows.size() - std::size_t(failed), "/", rep.rows.size(), " rows pass");
    return m.finish(failed == 0 ? kExitOk : kExitNumeric);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Normalized solutions of the logarithmic Schroedinger equation"};
    app.require_subcommand(1);
    std::string config_path;
    CommandOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value)")->required();
        sub->add_option("--jobs", opts.jobs, "worker threads (default: hardware threads)")->check(CLI::NonNegativeNumber);
        sub->add_option("--output", opts.output_override, "output directory (overrides config and LOGNLS_OUTPUT)");
        sub->add_flag("--quiet", opts.quiet, "suppress the per-job log");
    };
    using Cmd = int (*)(const RunConfig&, const CommandOptions&);
    const std::vector<std::tuple<std::string, std::string, Cmd>> table = {
        {"limit", "solve the constant-potential problem for every (mu, a)", &cmd_limit},
        {"solve", "multiplicity run: one cut-off seed per well for every (eps, a)", &cmd_solve},
        {"sweep-eps", "multiplicity run plus concentration checks over decreasing eps", &cmd_sweep_eps},
        {"sweep-a", "autonomous levels over a (and multiplicity runs when wells are given)", &cmd_sweep_a},
        {"verify", "check the level inequalities", &cmd_verify},
    };
    std::map<CLI::App*, Cmd> dispatch;
    for (const auto& [name, help, fn] : table) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        dispatch[sub] = fn;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    for (const auto& [sub, fn] : dispatch) {
        if (!sub->parsed()) continue;
        try {
            return fn(load_config(config_path), opts);
        } catch (const ConfigError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitNumeric;
        }
    }
    return kExitUsage;
}

}  // namespace lognls
