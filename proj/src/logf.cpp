#include "lognls/logf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lognls {

namespace {

double modular(const Eigen::Ref<const Eigen::VectorXd>& values,
               const Eigen::Ref<const Eigen::VectorXd>& weights, const Split& split,
               double scale) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        sum += weights[i] * f1(std::abs(values[i]) / scale, split);
    return sum;
}

}  // namespace

double luxemburg_gauge(const Eigen::Ref<const Eigen::VectorXd>& values,
                       const Eigen::Ref<const Eigen::VectorXd>& weights, const Split& split) {
    if (values.size() != weights.size())
        throw std::invalid_argument("luxemburg_gauge: values/weights size mismatch");
    if (!values.allFinite()) throw std::domain_error("luxemburg_gauge: non-finite sample");

    const double peak = values.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    const double rms = std::sqrt(values.squaredNorm() / double(values.size()));

    double lo = 1e-3 * rms;
    double hi = 1e3 * peak;
    // The modular decreases in the scale; widen until the root is bracketed.
    while (modular(values, weights, split, lo) < 1.0) lo *= 1e-3;
    while (modular(values, weights, split, hi) > 1.0) hi *= 1e3;

    for (int it = 0; it < 100 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (modular(values, weights, split, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RatioBounds ratio_bounds(const Split& split, int sample_count) {
    if (sample_count < 100) throw std::invalid_argument("ratio_bounds: sample_count must be >= 100");
    const double log_lo = std::log(split.delta() * 1e-12);
    const double log_hi = std::log(1e12);
    RatioBounds out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                    0.0};
    for (int k = 0; k < sample_count; ++k) {
        const double s = std::exp(log_lo + (log_hi - log_lo) * k / (sample_count - 1));
        const double r = f1_ratio(s, split);
        if (r < out.lower) {
            out.lower = r;
            out.argmin = s;
        }
        out.upper = std::max(out.upper, r);
    }
    return out;
}

}  // namespace lognls
