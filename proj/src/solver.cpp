#include "lognls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "lognls/parallel.hpp"

namespace lognls {

void SolverOptions::validate() const {
    if (!(step0 > 0.0)) throw std::invalid_argument("solver: step0 must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("solver: shrink must lie in (0, 1)");
    if (!(grow > 1.0)) throw std::invalid_argument("solver: grow must exceed 1");
    if (tol_residual && !(*tol_residual > 0.0))
        throw std::invalid_argument("solver: tol_residual must be positive");
    if (max_iters < 0) throw std::invalid_argument("solver: max_iters must be nonnegative");
    if (symmetrize_every < 0) throw std::invalid_argument("solver: symmetrize_every must be nonnegative");
    if (!(precondition_shift > 0.0))
        throw std::invalid_argument("solver: precondition_shift must be positive");
}

nlohmann::json solution_manifest(const Solution& s, const std::string& field_csv) {
    const Grid& g = s.u.grid;
    return nlohmann::json{{"seed_id", s.seed_id},
                          {"a", s.mass_a},
                          {"lambda", s.lambda},
                          {"energy", s.energy},
                          {"residual", s.residual},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"grid", {{"dim", g.dim()}, {"L", g.half_width()}, {"n", g.points_per_axis()}}},
                          {"field_csv", field_csv}};
}

Field project_mass(const Field& u, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("project_mass: a must be positive");
    const double norm = l2_norm(u);
    if (norm == 0.0 || !std::isfinite(norm)) throw std::domain_error("project_mass: zero or non-finite field");
    Eigen::VectorXd v = u.values * (a / norm);
    // One correction of the scale factor absorbs the rounding of the first pass.
    const double norm2 = std::sqrt(inner(u.grid, v, v));
    v *= a / norm2;
    return Field(u.grid, std::move(v));
}

namespace {

bool is_constant(const Field& V) {
    return V.values.size() == 0 || (V.values.array() == V.values[0]).all();
}

class Metric {
public:
    Metric(const Grid& g, const SolverOptions& opts) : weights_(g.weights()), enabled_(opts.precondition) {
        if (!enabled_) return;
        Eigen::SparseMatrix<double> m = stiffness_matrix(g);
        for (Eigen::Index k = 0; k < g.size(); ++k) m.coeffRef(k, k) += opts.precondition_shift * weights_[k];
        ldlt_.compute(m);
        if (ldlt_.info() != Eigen::Success) throw std::runtime_error("solver: metric factorization failed");
    }

    // Riemannian gradient on the sphere through u in this metric.
    Eigen::VectorXd direction(const Eigen::VectorXd& g, const Eigen::VectorXd& u, double lambda) const {
        if (!enabled_) return g - lambda * u;
        const Eigen::VectorXd z = ldlt_.solve(weights_.cwiseProduct(g));
        const Eigen::VectorXd y = ldlt_.solve(weights_.cwiseProduct(u));
        const double alpha = weights_.cwiseProduct(u).dot(z) / weights_.cwiseProduct(u).dot(y);
        return z - alpha * y;
    }

private:
    Eigen::VectorXd weights_;
    bool enabled_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace

Solution minimize(const Field& V, double a, const Field& seed, const SolverOptions& opts,
                  const Split& split, std::string seed_id) {
    opts.validate();
    require_same_grid(V, seed);
    if (!(a > 0.0)) throw std::invalid_argument("minimize: a must be positive");
    if (seed.values.isZero(0.0)) throw std::invalid_argument("minimize: seed is the zero field");

    const Grid& grid = seed.grid;
    const double tol = opts.tolerance_for(a);
    const double a2 = a * a;
    const bool symmetrize = opts.symmetrize_every > 0 && is_constant(V);
    const Metric metric(grid, opts);

    Field u = project_mass(seed, a);
    double E = energy(V, u, split);
    double tau = opts.step0;
    const double tau_floor = 1e-14 * opts.step0;

    Solution out{u, a, 0.0, E, 0.0, 0, false, false, false, std::move(seed_id)};
    if (!std::isfinite(E)) {
        out.diverged = true;
        return out;
    }

    double lambda = 0.0, res = 0.0;
    int accepted = 0;
    for (int iter = 0;; ++iter) {
        const Field g = gradient(V, u, split);
        lambda = inner(grid, g.values, u.values) / a2;
        const Eigen::VectorXd r = g.values - lambda * u.values;
        res = std::sqrt(inner(grid, r, r));
        if (res <= tol) {
            out.converged = true;
            break;
        }
        if (iter >= opts.max_iters) break;

        const Eigen::VectorXd d = metric.direction(g.values, u.values, lambda);
        bool stepped = false;
        while (tau >= tau_floor) {
            Eigen::VectorXd trial_values = u.values - tau * d;
            if (!trial_values.allFinite()) {
                out.diverged = true;
                break;
            }
            Field trial = project_mass(Field(grid, std::move(trial_values)), a);
            const double Et = energy(V, trial, split);
            if (!std::isfinite(Et)) {
                out.diverged = true;
                break;
            }
            if (Et <= E) {
                u = std::move(trial);
                E = Et;
                tau = std::min(tau * opts.grow, opts.step0);
                stepped = true;
                break;
            }
            tau *= opts.shrink;
        }
        if (!stepped) break;
        ++accepted;

        if (symmetrize && accepted % opts.symmetrize_every == 0) {
            Field sym = project_mass(rearrange_decreasing(u), a);
            const double Es = energy(V, sym, split);
            if (Es <= E) {
                u = std::move(sym);
                E = Es;
            }
        }
    }

    out.u = u;
    out.energy = E;
    out.lambda = lambda;
    out.residual = res;
    out.iterations = accepted;
    if (out.diverged) out.converged = false;
    const double peak = u.values.maxCoeff();
    out.positive = u.values.minCoeff() >= -1e-8 * std::max(peak, 0.0) && peak > 0.0;
    return out;
}

double gausson_lambda(int dim, double mu, double a) {
    return dim + mu - 2.0 * std::log(a) + 0.5 * dim * std::log(std::numbers::pi);
}

double gausson_energy(int dim, double mu, double a) {
    return a * a * (0.5 * dim + 0.5 * (mu + 1.0) + 0.25 * dim * std::log(std::numbers::pi) - std::log(a));
}

double gausson_zero_mass(int dim, double mu) {
    return std::exp(0.5 * dim + 0.5 * (mu + 1.0) + 0.25 * dim * std::log(std::numbers::pi));
}

Gausson gausson(const Grid& grid, double mu, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("gausson: a must be positive");
    if (!(mu >= -1.0)) throw std::invalid_argument("gausson: mu must be >= -1");
    const int N = grid.dim();
    const double lambda = gausson_lambda(N, mu, a);
    const double amp = std::exp(0.5 * (N + mu - lambda));
    const Field raw = Field::sample(grid, [amp](const Point& x) { return amp * std::exp(-0.5 * x.squaredNorm()); });
    return Gausson{project_mass(raw, a), lambda, gausson_energy(N, mu, a)};
}

Solution solve_limit(const Grid& grid, double mu, double a, const SolverOptions& opts, const Split& split) {
    if (!(mu >= -1.0)) throw std::invalid_argument("solve_limit: mu must be >= -1");
    const Field V(grid, Eigen::VectorXd::Constant(grid.size(), mu));
    const Field seed = Field::sample(grid, [](const Point& x) { return std::exp(-0.25 * x.squaredNorm()); });
    return minimize(V, a, seed, opts, split, "limit");
}

std::vector<Solution> run_seeds(const Field& V, double a, const std::vector<Seed>& seeds,
                                const SolverOptions& opts, const Split& split, int jobs) {
    std::vector<std::optional<Solution>> slots(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        slots[i] = minimize(V, a, seeds[i].u, opts, split, seeds[i].id);
    });
    std::vector<Solution> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<Solution> distinct_solutions(std::vector<Solution> solutions, double a, double distinct_tol) {
    std::vector<Solution> candidates;
    for (auto& s : solutions) {
        if (!s.converged) continue;
        if (s.u.values.sum() < 0.0) s.u.values = -s.u.values;
        candidates.push_back(std::move(s));
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Solution& x, const Solution& y) {
        if (x.energy != y.energy) return x.energy < y.energy;
        return x.seed_id < y.seed_id;
    });
    std::vector<Solution> kept;
    for (auto& s : candidates) {
        bool fresh = true;
        for (const Solution& k : kept) {
            const Eigen::VectorXd diff = s.u.values - k.u.values;
            const Eigen::VectorXd sum = s.u.values + k.u.values;
            const double dm = std::sqrt(inner(s.u.grid, diff, diff)) / a;
            const double dp = std::sqrt(inner(s.u.grid, sum, sum)) / a;
            if (dm <= distinct_tol || dp <= distinct_tol) {
                fresh = false;
                break;
            }
        }
        if (fresh) kept.push_back(std::move(s));
    }
    return kept;
}

std::vector<Solution> multistart(const Field& V, double a, const std::vector<Seed>& seeds,
                                 const SolverOptions& opts, double distinct_tol, const Split& split, int jobs) {
    if (seeds.empty()) throw std::invalid_argument("multistart: no seeds");
    return distinct_solutions(run_seeds(V, a, seeds, opts, split, jobs), a, distinct_tol);
}

}  // namespace lognls
