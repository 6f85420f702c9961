#include "lognls/category.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lognls/parallel.hpp"

namespace lognls {

// ---------------------------------------------------------------------------
// Potential minima and geometric helpers

double distance_to_set(const Point& x, const std::vector<Point>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& y : set) best = std::min(best, (x - y).norm());
    return best;
}

std::vector<Point> minima_set(const PotentialSpec& pot) {
    pot.validate();
    const auto& wells = pot.wells;
    for (std::size_t i = 0; i < wells.size(); ++i)
        for (std::size_t j = i + 1; j < wells.size(); ++j)
            if ((wells[i] - wells[j]).norm() < pot.width) {
                std::ostringstream msg;
                msg << "minima audit: wells " << i << " and " << j << " are closer than the well width "
                    << pot.width << " (merged basin)";
                throw MinimaAuditError(msg.str());
            }

    const int dim = pot.dim();
    Point lo = wells.front(), hi = wells.front();
    for (const Point& y : wells) {
        lo = lo.cwiseMin(y);
        hi = hi.cwiseMax(y);
    }
    lo.array() -= 3.0 * pot.width;
    hi.array() += 3.0 * pot.width;

    const int n = dim == 1 ? 2001 : 201;
    Eigen::VectorXd step = (hi - lo) / double(n - 1);
    const double near = 2.0 * step.norm();
    auto at = [&](int i, int j) {
        Point x(dim);
        x[0] = lo[0] + i * step[0];
        if (dim == 2) x[1] = lo[1] + j * step[1];
        return x;
    };
    const int ny = dim == 1 ? 1 : n;
    Eigen::MatrixXd values(n, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < n; ++i) values(i, j) = pot(at(i, j));

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point x = at(i, j);
            if (distance_to_set(x, wells) <= near) continue;
            const double v = values(i, j);
            bool local_min = v < pot.v0 + 1e-10;
            // Strict interior minima below the plateau; saturated regions far
            // from every well are flat to rounding and are not minima.
            if (!local_min && v < pot.v_inf() - 1e-9 * pot.amplitude && i > 0 && i < n - 1 &&
                (dim == 1 || (j > 0 && j < ny - 1))) {
                local_min = v < values(i - 1, j) && v < values(i + 1, j);
                if (dim == 2) local_min = local_min && v < values(i, j - 1) && v < values(i, j + 1);
            }
            if (local_min) {
                std::ostringstream msg;
                msg << "minima audit: spurious minimum candidate near (" << x.transpose() << ") with V = " << v;
                throw MinimaAuditError(msg.str());
            }
        }
    }
    return wells;
}

double cutoff_eta(double s, double delta_cut) {
    if (!(delta_cut > 0.0)) throw std::invalid_argument("cutoff_eta: delta_cut must be positive");
    const double half = 0.5 * delta_cut;
    if (s <= half) return 1.0;
    if (s >= delta_cut) return 0.0;
    const double t = (s - half) / half;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double interpolate(const Field& w, const Point& x) {
    const Grid& g = w.grid;
    if (x.size() != g.dim()) throw std::invalid_argument("interpolate: point dimension mismatch");
    const int n = g.points_per_axis();
    int base[2] = {0, 0};
    double frac[2] = {0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const double t = (x[a] + g.half_width()) / g.spacing();
        if (t < 0.0 || t > n - 1) return 0.0;
        const int i = std::min(int(std::floor(t)), n - 2);
        base[a] = i;
        frac[a] = t - i;
    }
    const Eigen::VectorXd& v = w.values;
    if (g.dim() == 1) return (1.0 - frac[0]) * v[base[0]] + frac[0] * v[base[0] + 1];
    const Eigen::Index k = Eigen::Index(base[1]) * n + base[0];
    return (1.0 - frac[1]) * ((1.0 - frac[0]) * v[k] + frac[0] * v[k + 1]) +
           frac[1] * ((1.0 - frac[0]) * v[k + n] + frac[0] * v[k + n + 1]);
}

Field build_seed(const Grid& grid, const Field& w_limit, const Point& y, double eps, double a,
                 double delta_cut) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_seed: eps must be positive");
    if (y.size() != grid.dim()) throw std::invalid_argument("build_seed: well dimension mismatch");
    const Point center = y / eps;
    if ((center.array().abs() > grid.half_width()).any())
        throw std::invalid_argument("build_seed: y / eps lies outside the grid box");
    const Field psi = Field::sample(grid, [&](const Point& x) {
        const double eta = cutoff_eta((eps * x - y).norm(), delta_cut);
        return eta == 0.0 ? 0.0 : eta * interpolate(w_limit, Point(x - center));
    });
    return project_mass(psi, a);
}

Point barycenter(const Field& u, double eps, double R) {
    const Grid& g = u.grid;
    const Eigen::VectorXd& w = g.weights();
    Point acc = Point::Zero(g.dim());
    double mass = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double m = w[k] * u.values[k] * u.values[k];
        if (m == 0.0) continue;
        Point chi = eps * g.node(k);
        const double r = chi.norm();
        if (r > R) chi *= R / r;
        acc += m * chi;
        mass += m;
    }
    if (mass == 0.0) throw std::domain_error("barycenter: zero field");
    return acc / mass;
}

Eigen::Index peak_node(const Field& u) {
    Eigen::Index best = 0;
    double peak = -1.0;
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
        const double v = std::abs(u.values[k]);
        if (v > peak) {
            peak = v;
            best = k;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Configuration defaults and check rows

double ExperimentConfig::resolved_delta_cut() const {
    if (delta_cut > 0.0) return delta_cut;
    const auto& w = potential.wells;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) sep = std::min(sep, (w[i] - w[j]).norm());
    return std::isfinite(sep) ? 0.5 * sep : 1.0;
}

double ExperimentConfig::resolved_m_delta() const {
    return m_delta > 0.0 ? m_delta : 0.5 * resolved_delta_cut();
}

double ExperimentConfig::resolved_radius() const {
    if (radius > 0.0) return radius;
    double reach = 0.0;
    for (const Point& y : potential.wells) reach = std::max(reach, y.norm());
    return 2.0 * (reach + resolved_m_delta());
}

CheckRow make_check(std::string name, double lhs, const std::string& relation, double rhs) {
    CheckRow row{std::move(name), lhs, relation, rhs, 0.0, false};
    if (relation == "<" || relation == "<=") {
        row.margin = rhs - lhs;
        row.pass = relation == "<" ? lhs < rhs : lhs <= rhs;
    } else if (relation == ">" || relation == ">=") {
        row.margin = lhs - rhs;
        row.pass = relation == ">" ? lhs > rhs : lhs >= rhs;
    } else {
        throw std::invalid_argument("make_check: unknown relation " + relation);
    }
    return row;
}

namespace {

bool rows_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string cell_tag(double a, double eps) { return "[a=" + fmt(a) + ",eps=" + fmt(eps) + "]"; }

ExperimentRecord make_record(const Solution& s, const Field& V, double eps, const std::vector<Point>& minima,
                             double R) {
    ExperimentRecord r;
    r.eps = eps;
    r.a = s.mass_a;
    r.seed_id = s.seed_id;
    r.lambda = s.lambda;
    r.energy = s.energy;
    r.converged = s.converged;
    r.barycenter = barycenter(s.u, eps, R);
    r.dist_to_M = distance_to_set(r.barycenter, minima);
    const Eigen::Index k = peak_node(s.u);
    r.v_at_max = V.values[k];
    r.peak = eps * s.u.grid.node(k);
    r.peak_dist_to_M = distance_to_set(r.peak, minima);
    return r;
}

// Multiplicative noise on a seed; the generator state depends only on the
// configured seed and the cell coordinates.
Field perturb(const Field& seed, double a, std::uint64_t rng_seed, std::uint64_t stream) {
    std::mt19937_64 rng(rng_seed * 0x9E3779B97F4A7C15ULL + stream);
    Eigen::VectorXd v = seed.values;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double r = double(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        v[k] *= 1.0 + 0.1 * (r - 0.5);
    }
    return project_mass(Field(seed.grid, std::move(v)), a);
}

struct Job {
    std::size_t cell;
    Seed seed;
};

struct LimitLevels {
    Solution at_v0;
    Solution at_vinf;
};

void validate_config(const ExperimentConfig& c) {
    if (c.eps_values.empty()) throw std::invalid_argument("config: eps_values is empty");
    if (c.a_values.empty()) throw std::invalid_argument("config: a_values is empty");
    for (double e : c.eps_values)
        if (!(e > 0.0)) throw std::invalid_argument("config: eps values must be positive");
    for (double a : c.a_values)
        if (!(a > 0.0)) throw std::invalid_argument("config: a values must be positive");
    if (c.potential.dim() != c.grid.dim())
        throw std::invalid_argument("config: potential and grid dimensions differ");
}

}  // namespace

bool MultiplicityReport::all_pass() const { return rows_pass(checks); }
bool SweepReport::all_pass() const { return multiplicity.all_pass() && rows_pass(checks); }
bool LevelReport::all_pass() const { return rows_pass(rows); }

// ---------------------------------------------------------------------------
// Multiplicity

MultiplicityReport run_multiplicity(const ExperimentConfig& config) {
    validate_config(config);
    const std::vector<Point> minima = minima_set(config.potential);
    const PotentialSpec& pot = config.potential;
    const double delta_cut = config.resolved_delta_cut();
    const double R = config.resolved_radius();
    const double m_delta = config.resolved_m_delta();
    const Grid& grid = config.grid;

    // Autonomous levels, one pair per a.
    std::vector<LimitLevels> limits;
    for (double a : config.a_values) {
        limits.push_back({solve_limit(grid, pot.v0, a, config.solver, config.split),
                          solve_limit(grid, pot.v_inf(), a, config.solver, config.split)});
    }

    MultiplicityReport report;
    std::vector<Field> potentials;
    std::vector<Job> jobs;
    for (std::size_t ia = 0; ia < config.a_values.size(); ++ia) {
        const double a = config.a_values[ia];
        const LimitLevels& lim = limits[ia];
        for (double eps : config.eps_values) {
            const std::size_t cell = report.cells.size();
            CellDiagnostics diag;
            diag.eps = eps;
            diag.a = a;
            diag.upsilon0 = lim.at_v0.energy;
            diag.upsilon_inf = lim.at_vinf.energy;
            const double rho1 = 0.5 * (diag.upsilon_inf - diag.upsilon0);
            diag.lambda_bound = 2.0 * (rho1 + diag.upsilon0) / (a * a);

            potentials.push_back(sample_potential(grid, pot, eps));
            const Field& V = potentials.back();
            for (std::size_t iw = 0; iw < minima.size(); ++iw) {
                const Field seed = build_seed(grid, lim.at_v0.u, minima[iw], eps, a, delta_cut);
                const double e = energy(V, seed, config.split);
                diag.seed_energies.push_back(e);
                diag.seed_barycenters.push_back(barycenter(seed, eps, R));
                diag.h_eps = std::max(diag.h_eps, std::abs(e - diag.upsilon0));
                const std::string id = "well" + std::to_string(iw);
                jobs.push_back({cell, {id, seed}});
                for (int p = 0; p < config.perturbed_seeds; ++p) {
                    const std::uint64_t stream = (std::uint64_t(cell) << 32) ^ (std::uint64_t(iw) << 16) ^ std::uint64_t(p);
                    jobs.push_back({cell, {id + ".p" + std::to_string(p + 1),
                                           perturb(seed, a, config.rng_seed, stream)}});
                }
            }
            report.cells.push_back(std::move(diag));
        }
    }

    std::vector<std::optional<Solution>> results(jobs.size());
    parallel_for(jobs.size(), config.jobs, [&](std::size_t j) {
        const CellDiagnostics& d = report.cells[jobs[j].cell];
        results[j] = minimize(potentials[jobs[j].cell], d.a, jobs[j].seed.u, config.solver, config.split,
                              jobs[j].seed.id);
    });

    const double smallest_eps = *std::min_element(config.eps_values.begin(), config.eps_values.end());
    auto& checks = report.checks;
    for (std::size_t cell = 0; cell < report.cells.size(); ++cell) {
        CellDiagnostics& d = report.cells[cell];
        const Field& V = potentials[cell];
        const std::string tag = cell_tag(d.a, d.eps);
        std::vector<Solution> runs;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].cell != cell) continue;
            const Solution& s = *results[j];
            report.records.push_back(make_record(s, V, d.eps, minima, R));
            report.solutions.push_back(s);
            runs.push_back(s);
        }
        const std::vector<Solution> distinct = distinct_solutions(std::move(runs), d.a, config.distinct_tol);
        d.distinct_count = int(distinct.size());
        for (const Solution& s : distinct) d.distinct.push_back(make_record(s, V, d.eps, minima, R));

        checks.push_back(make_check("distinct solutions " + tag, double(d.distinct_count), ">=",
                                    double(minima.size())));
        const double lowest = distinct.empty() ? std::numeric_limits<double>::infinity() : distinct.front().energy;
        for (std::size_t iw = 0; iw < d.seed_energies.size(); ++iw)
            checks.push_back(make_check("level below seed energy well" + std::to_string(iw) + " " + tag, lowest,
                                        "<=", d.seed_energies[iw]));
        const double floor_tol = 1e-9 * std::abs(d.upsilon0);
        for (const ExperimentRecord& r : d.distinct) {
            const std::string who = " " + r.seed_id + " " + tag;
            checks.push_back(make_check("energy negative" + who, r.energy, "<", 0.0));
            checks.push_back(make_check("multiplier negative" + who, r.lambda, "<", 0.0));
            checks.push_back(make_check("multiplier below lambda_*" + who, r.lambda, "<=", d.lambda_bound));
            checks.push_back(make_check("sublevel upper" + who, r.energy, "<=", d.upsilon0 + d.h_eps));
            checks.push_back(make_check("sublevel lower" + who, r.energy, ">=", d.upsilon0 - floor_tol));
            if (d.eps == smallest_eps)
                checks.push_back(make_check("barycenter within M_delta" + who, r.dist_to_M, "<=", m_delta));
        }
    }
    for (const ExperimentRecord& r : report.records)
        checks.push_back(make_check("barycenter within chi range " + r.seed_id + " " + cell_tag(r.a, r.eps),
                                    r.barycenter.norm(), "<=", R * (1.0 + 1e-12)));
    return report;
}

SweepReport run_eps_sweep(const ExperimentConfig& config) {
    for (std::size_t i = 1; i < config.eps_values.size(); ++i)
        if (!(config.eps_values[i] < config.eps_values[i - 1]))
            throw std::invalid_argument("sweep: eps_values must be strictly decreasing");

    SweepReport out;
    out.multiplicity = run_multiplicity(config);
    const double v0 = config.potential.v0;
    const double noise = 1e-12;
    for (double a : config.a_values) {
        std::vector<double> excess;
        std::map<std::string, std::vector<double>> branch;
        std::vector<double> eps_list;
        for (const CellDiagnostics& d : out.multiplicity.cells) {
            if (d.a != a) continue;
            eps_list.push_back(d.eps);
            excess.push_back(d.distinct.empty() ? std::numeric_limits<double>::infinity()
                                                : d.distinct.front().v_at_max - v0);
        }
        for (const ExperimentRecord& r : out.multiplicity.records)
            if (r.a == a && r.converged) branch[r.seed_id].push_back(r.peak_dist_to_M);

        const std::string atag = "[a=" + fmt(a) + "]";
        for (std::size_t i = 1; i < excess.size(); ++i)
            out.checks.push_back(make_check("v_at_max - V0 nonincreasing eps=" + fmt(eps_list[i]) + " " + atag,
                                            excess[i], "<=", excess[i - 1] + noise));
        if (!excess.empty())
            out.checks.push_back(make_check("v_at_max - V0 at final eps " + atag, excess.back(), "<=",
                                            config.concentration_bound));
        const double h = config.grid.spacing() * std::sqrt(double(config.grid.dim()));
        for (const auto& [id, dist] : branch)
            for (std::size_t i = 1; i < dist.size() && dist.size() == eps_list.size(); ++i)
                out.checks.push_back(make_check("peak distance to M nonincreasing " + id + " eps=" + fmt(eps_list[i]) +
                                                    " " + atag,
                                                dist[i], "<=", dist[i - 1] + eps_list[i] * h));

        if (out.eps.empty()) {
            out.eps = eps_list;
            out.lowest_v_excess = excess;
            out.branch_peak_dist = branch;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level structure

double bisect_zero_mass(const Grid& grid, double mu, const SolverOptions& opts, const Split& split, double lo,
                        double hi, double rel_tol) {
    auto level = [&](double a) { return solve_limit(grid, mu, a, opts, split).energy; };
    if (!(level(lo) > 0.0) || !(level(hi) < 0.0))
        throw std::runtime_error("bisect_zero_mass: energy sign does not change on the bracket");
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (level(mid) < 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

LevelReport verify_level_structure(const ExperimentConfig& config) {
    if (config.mu_values.empty()) throw std::invalid_argument("config: mu_values is empty");
    if (config.a_values.empty()) throw std::invalid_argument("config: a_values is empty");
    LevelReport rep;
    auto& rows = rep.rows;
    const Grid& grid = config.grid;

    std::vector<double> mus = config.mu_values;
    std::vector<double> as = config.a_values;
    std::sort(mus.begin(), mus.end());
    std::sort(as.begin(), as.end());
    const bool with_potential = !config.potential.is_constant();
    std::vector<double> level_mus = mus;
    if (with_potential) {
        level_mus.push_back(config.potential.v0);
        level_mus.push_back(config.potential.v_inf());
    }

    // Autonomous levels, solved in parallel.
    std::vector<std::pair<double, double>> keys;
    for (double mu : level_mus)
        for (double a : as)
            if (std::find(keys.begin(), keys.end(), std::make_pair(mu, a)) == keys.end()) keys.emplace_back(mu, a);
    std::vector<std::optional<Solution>> limit(keys.size());
    parallel_for(keys.size(), config.jobs, [&](std::size_t i) {
        limit[i] = solve_limit(grid, keys[i].first, keys[i].second, config.solver, config.split);
    });
    for (std::size_t i = 0; i < keys.size(); ++i) {
        rep.level[keys[i]] = limit[i]->energy;
        rep.solutions.push_back(*limit[i]);
        std::ostringstream id;
        id << "limit[mu=" << keys[i].first << ",a=" << keys[i].second << "]";
        rep.solutions.back().seed_id = id.str();
        rows.push_back(make_check("converged " + id.str(), limit[i]->residual, "<=",
                                  config.solver.tolerance_for(keys[i].second)));
    }

    // Zero-energy mass per mu.
    std::vector<double> zero(mus.size());
    std::vector<std::string> zero_error(mus.size());
    parallel_for(mus.size(), config.jobs, [&](std::size_t i) {
        try {
            zero[i] = bisect_zero_mass(grid, mus[i], config.solver, config.split, 0.5, 40.0);
        } catch (const std::exception& e) {
            zero[i] = std::numeric_limits<double>::quiet_NaN();
            zero_error[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < mus.size(); ++i) {
        rep.a_zero[mus[i]] = zero[i];
        rows.push_back(make_check("zero-energy mass bracketed [mu=" + fmt(mus[i]) + "]",
                                  std::isfinite(zero[i]) ? 0.0 : 1.0, "<=", 0.0));
    }

    for (double mu : mus) {
        const double az = rep.a_zero[mu];
        for (double a : as)
            if (std::isfinite(az) && a > az)
                rows.push_back(make_check("negative above a_zero [mu=" + fmt(mu) + ",a=" + fmt(a) + "]",
                                          rep.level[{mu, a}], "<", 0.0));
        for (std::size_t i = 0; i + 1 < as.size(); ++i) {
            const double a1 = as[i], a2 = as[i + 1];
            if (!(std::isfinite(az) && a1 > az)) continue;
            const std::string tag = "[mu=" + fmt(mu) + ",a1=" + fmt(a1) + ",a2=" + fmt(a2) + "]";
            rows.push_back(make_check("subadditivity " + tag, a1 * a1 / (a2 * a2) * rep.level[{mu, a2}], "<",
                                      rep.level[{mu, a1}]));
            rows.push_back(make_check("subadditivity negative " + tag, rep.level[{mu, a1}], "<", 0.0));
        }
    }
    for (double a : as) {
        for (std::size_t i = 0; i + 1 < mus.size(); ++i) {
            const double mu1 = mus[i], mu2 = mus[i + 1];
            const double az = rep.a_zero[mu2];
            if (!(std::isfinite(az) && a > az)) continue;
            const std::string tag = "[a=" + fmt(a) + ",mu1=" + fmt(mu1) + ",mu2=" + fmt(mu2) + "]";
            rows.push_back(make_check("mu-monotonicity " + tag, rep.level[{mu1, a}], "<", rep.level[{mu2, a}]));
            rows.push_back(make_check("mu-monotonicity negative " + tag, rep.level[{mu2, a}], "<", 0.0));
        }
    }

    if (with_potential) {
        const PotentialSpec& pot = config.potential;
        const std::vector<Point> minima = minima_set(pot);
        for (double a : as) {
            const std::string tag = "[a=" + fmt(a) + "]";
            const double up0 = rep.level[{pot.v0, a}];
            const double upinf = rep.level[{pot.v_inf(), a}];
            rows.push_back(make_check("Upsilon_0 < Upsilon_inf " + tag, up0, "<", upinf));
            rows.push_back(make_check("Upsilon_inf negative " + tag, upinf, "<", 0.0));
        }
        if (!config.eps_values.empty()) {
            ExperimentConfig sub = config;
            sub.a_values = as;
            const MultiplicityReport mult = run_multiplicity(sub);
            for (const CellDiagnostics& d : mult.cells) {
                const double lowest =
                    d.distinct.empty() ? std::numeric_limits<double>::infinity() : d.distinct.front().energy;
                rows.push_back(make_check("Upsilon_eps < Upsilon_inf " + cell_tag(d.a, d.eps), lowest, "<",
                                          d.upsilon_inf));
            }
            rep.records = mult.records;
            for (const Solution& s : mult.solutions) rep.solutions.push_back(s);
        }
    }

    for (const Solution& s : rep.solutions) {
        if (!s.converged || !(s.energy < 0.0)) continue;
        const std::string who = " " + s.seed_id + " [a=" + fmt(s.mass_a) + ",E=" + fmt(s.energy) + "]";
        rows.push_back(make_check("lambda negative" + who, s.lambda, "<", 0.0));
        rows.push_back(make_check("lambda <= 2E/a^2" + who, s.lambda, "<=",
                                  2.0 * s.energy / (s.mass_a * s.mass_a) + 1e-6));
    }
    return rep;
}

}  // namespace lognls
