#include <doctest.h>

#include <cmath>
#include <random>

#include "lognls/energy.hpp"
#include "lognls/potential.hpp"
#include "lognls/solver.hpp"

using namespace lognls;

namespace {

const Grid ref_grid(1, 12.0, 1025);

Field constant(const Grid& g, double mu) { return Field(g, Eigen::VectorXd::Constant(g.size(), mu)); }

Field gaussian_seed(const Grid& g, double center, double width) {
    return Field::sample(g, [&](const Point& x) {
        const double d = x[0] - center;
        return std::exp(-d * d / (2 * width * width));
    });
}

double rel_l2(const Field& a, const Field& b) {
    const Eigen::VectorXd d = a.values - b.values;
    return std::sqrt(inner(a.grid, d, d) / inner(b.grid, b.values, b.values));
}

}  // namespace

TEST_CASE("options validation") {
    SolverOptions o;
    CHECK_NOTHROW(o.validate());
    o.shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.grow = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.tol_residual = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    CHECK(SolverOptions{}.tolerance_for(4.0) == doctest::Approx(4e-6));
}

TEST_CASE("mass projection") {
    const Field u = gaussian_seed(ref_grid, 0.3, 1.0);
    const Field p = project_mass(u, 3.0);
    CHECK(inner(ref_grid, p.values, p.values) == doctest::Approx(9.0).epsilon(1e-14));
    const Field q = project_mass(p, 3.0);
    CHECK((q.values - p.values).lpNorm<Eigen::Infinity>() <= 1e-12 * p.values.lpNorm<Eigen::Infinity>());
    CHECK_THROWS_AS(project_mass(Field::zeros(ref_grid), 1.0), std::domain_error);
}

TEST_CASE("Gausson closed forms") {
    CHECK(gausson_energy(1, 0.0, 4.0) == doctest::Approx(-1.60179).epsilon(1e-5));
    CHECK(gausson_lambda(1, 0.0, 4.0) == doctest::Approx(-1.20022).epsilon(1e-5));
    // 36 (1.28618 - log 6).
    CHECK(gausson_energy(1, 0.0, 6.0) == doctest::Approx(36.0 * (1.0 + 0.25 * std::log(M_PI) - std::log(6.0))));
    CHECK(gausson_zero_mass(1, 0.0) == doctest::Approx(std::exp(1.0 + 0.25 * std::log(M_PI))));
    CHECK(gausson_energy(1, 0.0, gausson_zero_mass(1, 0.0)) == doctest::Approx(0.0).scale(1.0));
    // The energy identity I = (lambda + 1) a^2 / 2 holds for every (N, mu, a).
    for (int N : {1, 2})
        for (double mu : {-0.5, 0.0, 1.0})
            for (double a : {1.0, 4.0, 9.0})
                CHECK(gausson_energy(N, mu, a) == doctest::Approx(0.5 * a * a * (gausson_lambda(N, mu, a) + 1.0)));
}

TEST_CASE("limit solve converges to the Gausson") {
    const Solution s = solve_limit(ref_grid, 0.0, 4.0, SolverOptions{});
    const Gausson gs = gausson(ref_grid, 0.0, 4.0);
    CHECK(s.converged);
    CHECK(s.positive);
    CHECK(!s.diverged);
    CHECK(rel_l2(s.u, gs.u) <= 1e-3);
    CHECK(std::abs(s.lambda - (-1.20022)) <= 1e-2);
    CHECK(std::abs(s.energy - (-1.60179)) <= 2e-2);
    CHECK(s.residual <= SolverOptions{}.tolerance_for(4.0));
    CHECK(inner(ref_grid, s.u.values, s.u.values) == doctest::Approx(16.0).epsilon(1e-10));
    // Euler-Lagrange system through the combined gradient form.
    const Field V = constant(ref_grid, 0.0);
    const Eigen::VectorXd el = gradient_combined(V, s.u).values - s.lambda * s.u.values;
    CHECK(std::sqrt(inner(ref_grid, el, el)) <= 2 * SolverOptions{}.tolerance_for(4.0));
    CHECK(s.lambda <= 2 * s.energy / 16.0);
}

TEST_CASE("limit solve at a = 6 is even and at the closed-form level") {
    const Solution s = solve_limit(ref_grid, 0.0, 6.0, SolverOptions{});
    CHECK(s.converged);
    CHECK(std::abs(s.energy - 36.0 * (1.28618 - std::log(6.0))) <= 0.2);
    const Eigen::VectorXd flipped = s.u.values.reverse();
    CHECK((flipped - s.u.values).lpNorm<Eigen::Infinity>() <= 1e-6 * s.u.values.lpNorm<Eigen::Infinity>());
}

TEST_CASE("Gausson samples are a fixed point") {
    // The sampled Gausson differs from the discrete minimizer by O(h^2), so
    // the energy moves by O(h^4): 2.6e-8 relative at n = 1025, 1.7e-9 here.
    const Grid g(1, 12.0, 2049);
    const Gausson gs = gausson(g, 0.0, 4.0);
    const Field V = constant(g, 0.0);
    const Solution s = minimize(V, 4.0, gs.u, SolverOptions{}, Split(), "gausson");
    const Solution broad = solve_limit(g, 0.0, 4.0, SolverOptions{});
    CHECK(s.converged);
    CHECK(s.iterations < broad.iterations);
    CHECK(s.energy <= energy(V, gs.u) + 1e-12);
    CHECK(s.energy == doctest::Approx(energy(V, gs.u)).epsilon(1e-8));
    CHECK(s.seed_id == "gausson");
}

TEST_CASE("descent never raises the energy") {
    PotentialSpec p;
    p.wells = {Point::Constant(1, 1.0)};
    const Field V = sample_potential(ref_grid, p, 0.5);
    for (double c : {-3.0, 0.0, 2.0}) {
        const Field seed = project_mass(gaussian_seed(ref_grid, c, 2.0), 5.0);
        SolverOptions o;
        o.max_iters = 5;
        const Solution s = minimize(V, 5.0, seed, o);
        CHECK(s.energy <= energy(V, seed));
        CHECK(inner(ref_grid, s.u.values, s.u.values) == doctest::Approx(25.0).epsilon(1e-10));
    }
}

TEST_CASE("unpreconditioned descent also decreases the energy") {
    const Field V = constant(ref_grid, 0.0);
    const Field seed = project_mass(gaussian_seed(ref_grid, 0.0, 2.0), 4.0);
    SolverOptions o;
    o.precondition = false;
    o.step0 = 0.1;
    o.max_iters = 200;
    const Solution s = minimize(V, 4.0, seed, o);
    CHECK(s.energy < energy(V, seed));
}

TEST_CASE("translation quasi-invariance") {
    const Field V = constant(ref_grid, 0.0);
    const double h = ref_grid.spacing();
    const Solution a = minimize(V, 4.0, project_mass(gaussian_seed(ref_grid, 0.0, 1.5), 4.0), SolverOptions{});
    const Solution b = minimize(V, 4.0, project_mass(gaussian_seed(ref_grid, 2 * h, 1.5), 4.0), SolverOptions{});
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(b.energy == doctest::Approx(a.energy).epsilon(1e-6));
}

TEST_CASE("grid refinement") {
    std::vector<double> levels;
    for (int n : {129, 257, 513, 1025}) levels.push_back(solve_limit(Grid(1, 12.0, n), 0.0, 4.0, SolverOptions{}).energy);
    for (std::size_t i = 2; i < levels.size(); ++i) {
        const double prev = std::abs(levels[i - 1] - levels[i - 2]), cur = std::abs(levels[i] - levels[i - 1]);
        CHECK(prev / cur >= 3.0);
    }
}

TEST_CASE("symmetrisation keeps the constant-potential solve on the Gausson") {
    SolverOptions o;
    o.symmetrize_every = 10;
    const Solution s = solve_limit(ref_grid, 0.0, 4.0, o);
    CHECK(s.converged);
    CHECK(rel_l2(s.u, gausson(ref_grid, 0.0, 4.0).u) <= 1e-3);
}

TEST_CASE("two-dimensional limit solve") {
    const Grid g(2, 8.0, 81);
    const Solution s = solve_limit(g, 0.0, 4.0, SolverOptions{});
    CHECK(s.converged);
    CHECK(s.energy == doctest::Approx(gausson_energy(2, 0.0, 4.0)).epsilon(2e-2));
    CHECK(s.lambda == doctest::Approx(gausson_lambda(2, 0.0, 4.0)).epsilon(2e-2));
}

TEST_CASE("identical seeds give one distinct solution") {
    const Field V = constant(ref_grid, 0.0);
    const Field seed = project_mass(gaussian_seed(ref_grid, 0.0, 1.2), 4.0);
    const auto sols = multistart(V, 4.0, {{"a", seed}, {"b", seed}}, SolverOptions{}, 1e-2, Split(), 2);
    CHECK(sols.size() == 1);
    CHECK(sols.front().seed_id == "a");
}

TEST_CASE("negated seeds are the same solution") {
    const Field V = constant(ref_grid, 0.0);
    const Field seed = project_mass(gaussian_seed(ref_grid, 0.0, 1.2), 4.0);
    const Field neg(ref_grid, -seed.values);
    const auto sols = multistart(V, 4.0, {{"plus", seed}, {"minus", neg}}, SolverOptions{});
    REQUIRE(sols.size() == 1);
    CHECK(sols.front().u.values.sum() > 0.0);
}

TEST_CASE("single well: perturbed seeds collapse to one solution") {
    PotentialSpec p;
    p.wells = {Point::Constant(1, 0.0)};
    const Field V = sample_potential(ref_grid, p, 0.5);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-0.1, 0.1);
    std::vector<Seed> seeds;
    for (int i = 0; i < 3; ++i) {
        Field s = gaussian_seed(ref_grid, 0.0, 1.0);
        for (auto& x : s.values) x *= 1.0 + U(rng);
        seeds.push_back({"p" + std::to_string(i), project_mass(s, 6.0)});
    }
    const auto sols = multistart(V, 6.0, seeds, SolverOptions{}, 1e-2, Split(), 3);
    CHECK(sols.size() == 1);
    CHECK(sols.front().energy < 0.0);
    CHECK(sols.front().lambda < 0.0);
}

TEST_CASE("double well: seeds at both wells give two solutions") {
    PotentialSpec p;
    p.wells = {Point::Constant(1, -1.0), Point::Constant(1, 1.0)};
    const Grid g(1, 20.0, 1601);
    const double eps = 0.25;
    const Field V = sample_potential(g, p, eps);
    std::vector<Seed> seeds;
    for (double y : {-1.0, 1.0}) seeds.push_back({y < 0 ? "left" : "right", project_mass(gaussian_seed(g, y / eps, 1.0), 6.0)});
    const auto sols = multistart(V, 6.0, seeds, SolverOptions{}, 1e-2, Split(), 2);
    REQUIRE(sols.size() == 2);
    for (const Solution& s : sols) {
        Eigen::Index arg = 0;
        s.u.values.maxCoeff(&arg);
        const double peak = eps * g.node(arg)[0];
        CHECK(std::abs(std::abs(peak) - 1.0) <= 0.1);
    }
    CHECK(sols[0].energy <= sols[1].energy);
}

TEST_CASE("run_seeds order is independent of the job count") {
    const Field V = constant(ref_grid, 0.0);
    std::vector<Seed> seeds;
    for (int i = 0; i < 4; ++i) seeds.push_back({"s" + std::to_string(i), project_mass(gaussian_seed(ref_grid, 0.5 * i, 1.0 + 0.2 * i), 4.0)});
    const auto serial = run_seeds(V, 4.0, seeds, SolverOptions{}, Split(), 1);
    const auto threaded = run_seeds(V, 4.0, seeds, SolverOptions{}, Split(), 4);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].seed_id == threaded[i].seed_id);
        CHECK(serial[i].u.values == threaded[i].u.values);
        CHECK(serial[i].energy == threaded[i].energy);
    }
}

TEST_CASE("solution manifest") {
    const Solution s = solve_limit(Grid(1, 12.0, 257), 0.0, 4.0, SolverOptions{});
    const nlohmann::json j = solution_manifest(s, "u.csv");
    for (const char* key : {"seed_id", "a", "lambda", "energy", "residual", "iterations", "converged", "grid", "field_csv"})
        CHECK(j.contains(key));
    CHECK(j["grid"]["n"] == 257);
    CHECK(j["field_csv"] == "u.csv");
}
