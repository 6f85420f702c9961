#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "lognls/commands.hpp"
#include "lognls/io.hpp"

using namespace lognls;
namespace fs = std::filesystem;

namespace {

const char* kDoubleWell =
    "# double well\n"
    "grid.half_width = 20\n"
    "grid.points_per_axis = 801\n"
    "potential.wells = -1; 1\n"
    "eps_values = 0.5, 0.25\n"
    "a_values = 6\n"
    "mu_values = 0, 0.5\n"
    "rng_seed = 42\n";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lognls_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(LOGNLS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config(kDoubleWell);
    const ExperimentConfig& e = cfg.experiment;
    CHECK(e.grid.half_width() == 20.0);
    CHECK(e.grid.points_per_axis() == 801);
    REQUIRE(e.potential.wells.size() == 2);
    CHECK(e.potential.wells[0][0] == -1.0);
    CHECK(e.eps_values == std::vector<double>{0.5, 0.25});
    CHECK(e.mu_values == std::vector<double>{0.0, 0.5});
    CHECK(e.rng_seed == 42);
    CHECK(cfg.entries.size() == 7);
    CHECK(config_echo(cfg)["a_values"] == "6");

    const RunConfig two = parse_config("grid.dim = 2\ngrid.points_per_axis = 33\npotential.wells = 1, 0; -1, 0\n"
                                       "solver.precondition = false\nsolver.tol_residual = 1e-5\n");
    CHECK(two.experiment.grid.dim() == 2);
    CHECK(two.experiment.potential.wells[1][0] == -1.0);
    CHECK(!two.experiment.solver.precondition);
    CHECK(*two.experiment.solver.tol_residual == 1e-5);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("nonsense = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("a_values = 1\na_values = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("a_values = 1, x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid.points_per_axis = 100\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("split.delta = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.shrink = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("potential.wells = 1, 2, 3\n"), ConfigError);
    try {
        require_lists(parse_config("mu_values = 0\n"), false, true, true, false);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("a_values") != std::string::npos);
    }
}

TEST_CASE("output directory precedence") {
    // Flag, then config, then environment, then the built-in default.
    RunConfig cfg = parse_config("output_dir = from_config\n");
    CommandOptions opts;
    ::unsetenv("LOGNLS_OUTPUT");
    CHECK(resolve_output_dir(parse_config(""), CommandOptions{}) == "lognls_out");
    ::setenv("LOGNLS_OUTPUT", "from_env", 1);
    CHECK(resolve_output_dir(parse_config(""), CommandOptions{}) == "from_env");
    CHECK(resolve_output_dir(cfg, opts) == "from_config");
    opts.output_override = "from_flag";
    CHECK(resolve_output_dir(cfg, opts) == "from_flag");
    ::unsetenv("LOGNLS_OUTPUT");
}

TEST_CASE("git blob hash") {
    // `printf hello | git hash-object --stdin`
    CHECK(git_blob_hash("hello") == "b6fc4c620b67d95f953a5c1c1230aaab5db5a1b0");
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("exit codes") {
    const fs::path good = write_config("good.cfg", kDoubleWell);
    const fs::path missing = write_config("missing.cfg", "mu_values = 0\n");
    const fs::path broken = write_config("broken.cfg", "bogus.key = 1\n");
    CHECK(run("limit --config " + missing.string() + " --output " + scratch("o1").string()) == kExitUsage);
    CHECK(run("limit --config " + broken.string() + " --output " + scratch("o2").string()) == kExitUsage);
    CHECK(run("limit --config /nonexistent/file.cfg") == kExitUsage);
    CHECK(run("limit") == kExitUsage);
    CHECK(run("frobnicate --config " + good.string()) == kExitUsage);
    CHECK(run("--help") == kExitOk);
    CHECK(run("limit --quiet --jobs 2 --config " + good.string() + " --output " + scratch("o3").string()) == kExitOk);
    // Diverging runs: a starved iteration budget cannot converge.
    const fs::path starved = write_config("starved.cfg", std::string(kDoubleWell) + "solver.max_iters = 2\n");
    CHECK(run("limit --quiet --config " + starved.string() + " --output " + scratch("o4").string()) == kExitNumeric);
}

TEST_CASE("limit artifacts and manifest") {
    const RunConfig cfg = parse_config(kDoubleWell);
    CommandOptions opts;
    opts.quiet = true;
    opts.output_override = scratch("limit").string();
    REQUIRE(cmd_limit(cfg, opts) == kExitOk);
    const fs::path dir = opts.output_override;
    const nlohmann::json m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m["status"] == "complete");
    CHECK(m["exit_code"] == 0);
    CHECK(m["command"] == "limit");
    CHECK(m["input_hash"] == git_blob_hash(kDoubleWell));
    CHECK(m["config"]["a_values"] == "6");
    CHECK(m["timing"].contains("started_at"));
    for (const auto& f : m["files"]) CHECK(fs::exists(dir / f.get<std::string>()));
    const std::string limits = slurp(dir / "limits.csv");
    CHECK(limits.rfind("mu,a,lambda,energy", 0) == 0);
    const nlohmann::json sol = nlohmann::json::parse(slurp(dir / "limit_mu0_a6.json"));
    CHECK(sol["converged"] == true);
    CHECK(sol["energy_report"]["mass"].get<double>() == doctest::Approx(36.0));
    std::ifstream field(dir / "limit_mu0_a6.csv");
    const Field u = read_field_csv(field, cfg.experiment.grid);
    CHECK(inner(u.grid, u.values, u.values) == doctest::Approx(36.0).epsilon(1e-10));
}

TEST_CASE("solve and sweep artifacts") {
    const RunConfig cfg = parse_config(kDoubleWell);
    CommandOptions opts;
    opts.quiet = true;
    opts.output_override = scratch("solve").string();
    REQUIRE(cmd_solve(cfg, opts) == kExitOk);
    const fs::path dir = opts.output_override;
    const std::string records = slurp(dir / "records.csv");
    CHECK(records.rfind("eps,a,seed_id,lambda,energy,bary_x,dist_to_M,v_at_max,converged\n", 0) == 0);
    CHECK(std::count(records.begin(), records.end(), '\n') == 5);
    for (const char* f : {"checks.csv", "energy_vs_eps.svg", "v_at_max_vs_eps.svg", "plots.gp"})
        CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "plots.gp").find("records.csv") != std::string::npos);
    CHECK(slurp(dir / "energy_vs_eps.svg").rfind("<svg", 0) == 0);

    opts.output_override = scratch("sweep").string();
    REQUIRE(cmd_sweep_eps(cfg, opts) == kExitOk);
    CHECK(slurp(fs::path(opts.output_override) / "records.csv") == records);
    CHECK(fs::exists(fs::path(opts.output_override) / "sweep.csv"));

    opts.output_override = scratch("sweep_a").string();
    REQUIRE(cmd_sweep_a(cfg, opts) == kExitOk);
    CHECK(fs::exists(fs::path(opts.output_override) / "energy_vs_a.svg"));
}

TEST_CASE("verify is deterministic across job counts") {
    const RunConfig cfg = parse_config(kDoubleWell);
    CommandOptions one, many;
    one.quiet = many.quiet = true;
    one.jobs = 1;
    many.jobs = 4;
    one.output_override = scratch("verify1").string();
    many.output_override = scratch("verify4").string();
    CHECK(cmd_verify(cfg, one) == kExitOk);
    CHECK(cmd_verify(cfg, many) == kExitOk);
    const std::string a = slurp(fs::path(one.output_override) / "records.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(fs::path(many.output_override) / "records.csv"));
    CHECK(slurp(fs::path(one.output_override) / "levels.csv") == slurp(fs::path(many.output_override) / "levels.csv"));
}

TEST_CASE("two-dimensional solve") {
    const RunConfig cfg = parse_config(
        "grid.dim = 2\ngrid.half_width = 10\ngrid.points_per_axis = 101\n"
        "potential.wells = -1, 0; 1, 0\neps_values = 0.25\na_values = 14\n");
    CommandOptions opts;
    opts.quiet = true;
    opts.output_override = scratch("solve2d").string();
    REQUIRE(cmd_solve(cfg, opts) == kExitOk);
    const std::string records = slurp(fs::path(opts.output_override) / "records.csv");
    CHECK(records.rfind("eps,a,seed_id,lambda,energy,bary_x,bary_y,", 0) == 0);
    const nlohmann::json m = nlohmann::json::parse(slurp(fs::path(opts.output_override) / "manifest.json"));
    CHECK(m["failed_checks"] == 0);
}
