#include "lognls/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace lognls {

double PotentialSpec::operator()(const Point& x) const {
    if (is_constant()) return v0;
    double prod = 1.0;
    const double inv_w2 = 1.0 / (width * width);
    for (const Point& y : wells) prod *= -std::expm1(-(x - y).squaredNorm() * inv_w2);
    return v0 + amplitude * prod;
}

void PotentialSpec::validate() const {
    if (!(v0 >= -1.0)) throw std::invalid_argument("potential: v0 must be >= -1");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("potential: amplitude must be positive");
    if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("potential: width must be positive");
    if (wells.empty()) throw std::invalid_argument("potential: at least one well is required");
    const auto d = wells.front().size();
    if (d != 1 && d != 2) throw std::invalid_argument("potential: wells must be 1D or 2D points");
    for (const Point& y : wells) {
        if (y.size() != d) throw std::invalid_argument("potential: wells have mixed dimensions");
        if (!y.allFinite()) throw std::invalid_argument("potential: non-finite well position");
    }
}

Field sample_potential(const Grid& grid, const PotentialSpec& pot, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("sample_potential: eps must be positive");
    if (!pot.is_constant() && pot.dim() != grid.dim())
        throw std::invalid_argument("sample_potential: potential and grid dimensions differ");
    return Field::sample(grid, [&](const Point& x) { return pot(Point(eps * x)); });
}

}  // namespace lognls
