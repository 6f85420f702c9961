#ifndef LOGNLS_SOLVER_HPP
#define LOGNLS_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lognls/energy.hpp"
#include "lognls/grid.hpp"
#include "lognls/logf.hpp"

namespace lognls {

struct SolverOptions {
    double step0 = 1.0;
    double shrink = 0.5;
    double grow = 1.1;
    // Defaults to 1e-6 * a when unset.
    std::optional<double> tol_residual;
    int max_iters = 20000;
    // Rearrangement cadence in accepted steps; 0 disables. Only honoured for
    // constant potentials.
    int symmetrize_every = 0;
    // Descent in the metric (K + shift W) instead of the plain weighted L2
    // metric; K is the stiffness matrix and W the quadrature weights.
    bool precondition = true;
    double precondition_shift = 1.0;

    double tolerance_for(double a) const { return tol_residual.value_or(1e-6 * a); }
    void validate() const;
};

struct Solution {
    Field u;
    double mass_a = 0.0;
    double lambda = 0.0;
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
    bool positive = false;
    std::string seed_id;
};

/// JSON manifest entry; `field_csv` is the path the field was written to.
nlohmann::json solution_manifest(const Solution& s, const std::string& field_csv);

/// a u / |u|_2 in the quadrature norm. Throws std::domain_error for u = 0.
Field project_mass(const Field& u, double a);

/// Projected descent on the sphere int u^2 = a^2. A step is kept only when it
/// does not raise the energy; otherwise the step length is cut by `shrink`.
Solution minimize(const Field& V, double a, const Field& seed, const SolverOptions& opts,
                  const Split& split = Split(), std::string seed_id = "seed");

struct Gausson {
    Field u;
    double lambda;
    double energy;
};

/// Closed-form minimizer of the constant-potential problem,
/// u = A exp(-|x|^2 / 2), lambda = N + mu - 2 log a + (N/2) log pi,
/// I = a^2 (N/2 + (mu + 1)/2 + (N/4) log pi - log a). The samples are
/// mass-projected onto the grid.
Gausson gausson(const Grid& grid, double mu, double a);

double gausson_energy(int dim, double mu, double a);
double gausson_lambda(int dim, double mu, double a);
/// Mass at which the Gausson energy changes sign.
double gausson_zero_mass(int dim, double mu);

/// Minimizes with V = mu from a broad Gaussian seed.
Solution solve_limit(const Grid& grid, double mu, double a, const SolverOptions& opts,
                     const Split& split = Split());

struct Seed {
    std::string id;
    Field u;
};

/// Runs minimize from every seed (in parallel when jobs > 1). The result is
/// ordered by seed index regardless of scheduling.
std::vector<Solution> run_seeds(const Field& V, double a, const std::vector<Seed>& seeds,
                                const SolverOptions& opts, const Split& split = Split(),
                                int jobs = 1);

/// Converged solutions, sign-normalized, deduplicated (two solutions are the
/// same when |u_i - u_j| / a or |u_i + u_j| / a is within distinct_tol) and
/// sorted by (energy, seed_id).
std::vector<Solution> distinct_solutions(std::vector<Solution> solutions, double a,
                                         double distinct_tol);

std::vector<Solution> multistart(const Field& V, double a, const std::vector<Seed>& seeds,
                                 const SolverOptions& opts, double distinct_tol = 1e-2,
                                 const Split& split = Split(), int jobs = 1);

}  // namespace lognls

#endif  // LOGNLS_SOLVER_HPP
