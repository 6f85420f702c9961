#ifndef LOGNLS_CATEGORY_HPP
#define LOGNLS_CATEGORY_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/logf.hpp"
#include "lognls/potential.hpp"
#include "lognls/solver.hpp"

namespace lognls {

class MinimaAuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The minimum set M of the potential: its wells. A sampled audit over the
/// wells' bounding box rejects specs whose wells sit closer than one width
/// (merged basins) or that show a sampled value within 1e-10 of v0 away
/// from every well.
std::vector<Point> minima_set(const PotentialSpec& pot);

double distance_to_set(const Point& x, const std::vector<Point>& set);

/// Nonincreasing cut-off: 1 on [0, delta_cut/2], 0 on [delta_cut, inf),
/// quintic smoothstep in between.
double cutoff_eta(double s, double delta_cut);

/// Value of `w` at an arbitrary point by (bi)linear interpolation; 0 outside
/// its grid.
double interpolate(const Field& w, const Point& x);

/// a * Psi / |Psi|_2 with Psi(x) = eta(|eps x - y|) w(x - y / eps).
Field build_seed(const Grid& grid, const Field& w_limit, const Point& y, double eps, double a,
                 double delta_cut);

/// int chi(eps x) u^2 / int u^2, chi the radial truncation of the identity at R.
Point barycenter(const Field& u, double eps, double R);

/// Index of the largest |u_k| (first one on ties).
Eigen::Index peak_node(const Field& u);

struct ExperimentRecord {
    double eps = 0.0;
    double a = 0.0;
    std::string seed_id;
    double lambda = 0.0;
    double energy = 0.0;
    Point barycenter;
    double dist_to_M = 0.0;
    double v_at_max = 0.0;
    bool converged = false;
    // Not serialized: eps * xi_eps and its distance to M.
    Point peak;
    double peak_dist_to_M = 0.0;
};

struct ExperimentConfig {
    Grid grid{1, 20.0, 1601};
    Split split;
    SolverOptions solver;
    PotentialSpec potential;
    std::vector<double> eps_values;
    std::vector<double> a_values;
    std::vector<double> mu_values;
    // Non-positive values select the defaults: half the minimal well
    // separation (1 for a single well), delta_cut / 2 and 2 (max|y| + m_delta).
    double delta_cut = 0.0;
    double m_delta = 0.0;
    double radius = 0.0;
    double distinct_tol = 1e-2;
    double concentration_bound = 0.05;
    int perturbed_seeds = 0;
    std::uint64_t rng_seed = 0;
    int jobs = 1;

    double resolved_delta_cut() const;
    double resolved_m_delta() const;
    double resolved_radius() const;
};

// One inequality "lhs relation rhs" with its slack (positive when it holds).
struct CheckRow {
    std::string name;
    double lhs = 0.0;
    std::string relation;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

CheckRow make_check(std::string name, double lhs, const std::string& relation, double rhs);

struct CellDiagnostics {
    double eps = 0.0;
    double a = 0.0;
    double upsilon0 = 0.0;      // autonomous level at mu = V0
    double upsilon_inf = 0.0;   // autonomous level at mu = V_inf
    double lambda_bound = 0.0;  // 2 (rho_1 + Upsilon_0) / a^2, rho_1 = (Upsilon_inf - Upsilon_0) / 2
    double h_eps = 0.0;         // max over wells of |I_eps(Phi_eps(y)) - Upsilon_0|
    std::vector<double> seed_energies;  // I_eps(Phi_eps(y)), one per well
    std::vector<Point> seed_barycenters;
    int distinct_count = 0;
    std::vector<ExperimentRecord> distinct;  // sorted by energy
};

struct MultiplicityReport {
    std::vector<CellDiagnostics> cells;  // (a, eps) in config order
    std::vector<ExperimentRecord> records;  // every seed run, (eps, a, seed_id) order
    std::vector<Solution> solutions;        // parallel to records
    std::vector<CheckRow> checks;
    bool all_pass() const;
};

/// For each (a, eps): solves the autonomous problem, places one cut-off seed
/// per well, runs them all and records the outcome. Checks are reported as
/// rows, not thrown.
MultiplicityReport run_multiplicity(const ExperimentConfig& config);

struct SweepReport {
    MultiplicityReport multiplicity;
    std::vector<double> eps;
    std::vector<double> lowest_v_excess;  // v_at_max - V0 of the lowest-energy solution
    std::map<std::string, std::vector<double>> branch_peak_dist;  // per seed id
    std::vector<CheckRow> checks;
    bool all_pass() const;
};

/// run_multiplicity over a decreasing eps list plus the concentration checks.
SweepReport run_eps_sweep(const ExperimentConfig& config);

struct LevelReport {
    std::vector<CheckRow> rows;
    std::map<double, double> a_zero;                    // per mu, by bisection
    std::map<std::pair<double, double>, double> level;  // (mu, a) -> I_{mu,a}
    std::vector<ExperimentRecord> records;              // non-autonomous solves
    std::vector<Solution> solutions;                    // every solve, autonomous ones first
    bool all_pass() const;
};

/// Measured zero-energy mass of the autonomous problem by bisection on the
/// sign of the solved energy, to relative width rel_tol.
double bisect_zero_mass(const Grid& grid, double mu, const SolverOptions& opts, const Split& split,
                        double lo, double hi, double rel_tol = 1e-4);

/// Solves the autonomous and eps-dependent levels and checks the inequalities
/// between them: negativity above the zero-mass threshold, subadditivity in a,
/// monotonicity in mu, Upsilon_{V0} < Upsilon_{Vinf} < 0, Upsilon_eps <
/// Upsilon_{Vinf}, and the multiplier sign of every negative-energy solution.
LevelReport verify_level_structure(const ExperimentConfig& config);

}  // namespace lognls

#endif  // LOGNLS_CATEGORY_HPP
