#ifndef LOGNLS_POTENTIAL_HPP
#define LOGNLS_POTENTIAL_HPP

#include <vector>

#include "lognls/grid.hpp"

namespace lognls {

// V(x) = v0 + A * prod_i (1 - exp(-|x - y_i|^2 / w^2)).
// With no wells and A = 0 this degenerates to the constant v0.
struct PotentialSpec {
    double v0 = 0.0;
    double amplitude = 1.0;
    std::vector<Point> wells;
    double width = 0.3;

    static PotentialSpec constant(double mu) { return PotentialSpec{mu, 0.0, {}, 1.0}; }

    bool is_constant() const { return wells.empty() || amplitude == 0.0; }
    int dim() const { return wells.empty() ? 0 : int(wells.front().size()); }
    double v_inf() const { return v0 + amplitude; }
    double operator()(const Point& x) const;

    // Throws std::invalid_argument unless the spec describes a bounded
    // potential with v0 >= -1 whose infimum v0 is strictly below v_inf.
    void validate() const;
};

/// Nodal samples V(eps * x_k).
Field sample_potential(const Grid& grid, const PotentialSpec& pot, double eps);

}  // namespace lognls

#endif  // LOGNLS_POTENTIAL_HPP
