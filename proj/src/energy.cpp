#include "lognls/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace lognls {

namespace {

void check_inputs(const Field& V, const Field& u) {
    require_same_grid(V, u);
    if (!u.values.allFinite()) throw std::domain_error("energy: non-finite field value");
    if (!V.values.allFinite()) throw std::domain_error("energy: non-finite potential value");
}

// h^dim / w_k: 1 in the interior, 2 on faces, 4 on corners.
Eigen::VectorXd kinetic_scale(const Grid& g) {
    return g.weights().cwiseInverse() * g.cell_volume();
}

}  // namespace

void to_json(nlohmann::json& j, const EnergyReport& r) {
    j = nlohmann::json{{"total", r.total},       {"kinetic", r.kinetic},
                       {"potential", r.potential}, {"f1_part", r.f1_part},
                       {"f2_part", r.f2_part},   {"multiplier", r.multiplier},
                       {"residual", r.residual}, {"mass", r.mass}};
}

double energy(const Field& V, const Field& u, const Split& split) {
    check_inputs(V, u);
    const Eigen::VectorXd& w = u.grid.weights();
    // Extended accumulators: near a minimizer the line search compares
    // energies that differ by ~1e-10 of their magnitude.
    long double pot = 0.0L, nl = 0.0L;
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
        const double s = u.values[k];
        pot += w[k] * (V.values[k] + 1.0) * s * s;
        nl += w[k] * (f1(s, split) - f2(s, split));
    }
    return double(0.5L * dirichlet_integral(u) + 0.5L * pot + nl);
}

Field gradient(const Field& V, const Field& u, const Split& split) {
    check_inputs(V, u);
    Eigen::VectorXd g = laplacian_apply(u).values.cwiseProduct(kinetic_scale(u.grid));
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double s = u.values[k];
        g[k] += (V.values[k] + 1.0) * s + df1(s, split) - df2(s, split);
    }
    return Field(u.grid, std::move(g));
}

Field gradient_combined(const Field& V, const Field& u) {
    check_inputs(V, u);
    Eigen::VectorXd g = laplacian_apply(u).values.cwiseProduct(kinetic_scale(u.grid));
    for (Eigen::Index k = 0; k < g.size(); ++k) g[k] += V.values[k] * u.values[k] - log_nl(u.values[k]);
    return Field(u.grid, std::move(g));
}

double multiplier(const Field& V, const Field& u, const Split& split) {
    check_inputs(V, u);
    const double mass = inner(u.grid, u.values, u.values);
    if (mass == 0.0) throw std::domain_error("multiplier: zero field");
    return inner(u.grid, gradient(V, u, split).values, u.values) / mass;
}

double residual(const Field& V, const Field& u, const Split& split) {
    check_inputs(V, u);
    const double mass = inner(u.grid, u.values, u.values);
    if (mass == 0.0) throw std::domain_error("residual: zero field");
    const Field g = gradient(V, u, split);
    const double lambda = inner(u.grid, g.values, u.values) / mass;
    const Eigen::VectorXd r = g.values - lambda * u.values;
    return std::sqrt(inner(u.grid, r, r));
}

double xnorm(const Field& u, const Split& split) {
    const double h1 = std::sqrt(dirichlet_integral(u) + inner(u.grid, u.values, u.values));
    return h1 + luxemburg_gauge(u.values, u.grid.weights(), split);
}

EnergyReport energy_report(const Field& V, const Field& u, const Split& split) {
    check_inputs(V, u);
    const Eigen::VectorXd& w = u.grid.weights();
    EnergyReport r;
    r.kinetic = 0.5 * dirichlet_integral(u);
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
        const double s = u.values[k];
        r.potential += 0.5 * w[k] * (V.values[k] + 1.0) * s * s;
        r.f1_part += w[k] * f1(s, split);
        r.f2_part += w[k] * f2(s, split);
    }
    r.total = r.kinetic + r.potential + r.f1_part - r.f2_part;
    r.mass = inner(u.grid, u.values, u.values);
    if (r.mass > 0.0) {
        r.multiplier = multiplier(V, u, split);
        r.residual = residual(V, u, split);
    }
    return r;
}

}  // namespace lognls
