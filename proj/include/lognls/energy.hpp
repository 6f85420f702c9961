#ifndef LOGNLS_ENERGY_HPP
#define LOGNLS_ENERGY_HPP

#include <nlohmann/json.hpp>

#include "lognls/grid.hpp"
#include "lognls/logf.hpp"

namespace lognls {

// Discrete constrained functional
//   I(u) = 1/2 int |grad u|^2 + 1/2 int (V + 1) u^2 + int F1(u) - int F2(u)
// with the kinetic term summed over grid links. Gradients are Riesz
// representers in the trapezoid-weighted inner product, so
// I(u + t v) = I(u) + t <gradient(u), v> + O(t^2) holds exactly in the
// discrete setting, including at boundary nodes.

struct EnergyReport {
    double total = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double f1_part = 0.0;
    double f2_part = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;
    double mass = 0.0;
};

void to_json(nlohmann::json& j, const EnergyReport& r);

double energy(const Field& V, const Field& u, const Split& split = Split());

/// Nodal gradient (-Delta u) + (V + 1) u + F1'(u) - F2'(u), with the kinetic
/// part rescaled by h^dim / w_k so it is the weighted-inner-product gradient.
Field gradient(const Field& V, const Field& u, const Split& split = Split());

/// Same quantity through (-Delta u) + V u - u log u^2.
Field gradient_combined(const Field& V, const Field& u);

/// <I'(u), u> / int u^2 = [int |grad u|^2 + V u^2 - u^2 log u^2] / int u^2.
double multiplier(const Field& V, const Field& u, const Split& split = Split());

/// Weighted L2 norm of gradient(u) - multiplier(u) u.
double residual(const Field& V, const Field& u, const Split& split = Split());

/// Discrete H1 norm plus the Luxemburg gauge.
double xnorm(const Field& u, const Split& split = Split());

EnergyReport energy_report(const Field& V, const Field& u, const Split& split = Split());

}  // namespace lognls

#endif  // LOGNLS_ENERGY_HPP
