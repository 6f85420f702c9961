#ifndef LOGNLS_LOGF_HPP
#define LOGNLS_LOGF_HPP

// Split of the logarithmic nonlinearity 1/2 s^2 log s^2 = F2(s) - F1(s) into a
// convex nonnegative part F1 (an N-function) and a part F2 of subcritical
// growth. All scalar routines are templated on the scalar type so they can be
// evaluated in long double for reference checks.

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace lognls {

template <typename Scalar = double>
class NonlinearitySplit {
public:
    // e^{-2}: below e^{-3/2}, so F1'' > 0 on (0, delta).
    static Scalar default_delta() { return std::exp(Scalar(-2)); }

    NonlinearitySplit() : delta_(default_delta()) {}

    explicit NonlinearitySplit(Scalar delta) : delta_(delta) {
        if (!(delta > Scalar(0)) || !(delta < std::exp(Scalar(-1.5))))
            throw std::invalid_argument("split delta must lie in (0, e^{-3/2})");
    }

    Scalar delta() const { return delta_; }

    // log(delta^2) + 3, negative for admissible delta.
    Scalar kappa() const { return Scalar(2) * std::log(delta_) + Scalar(3); }

private:
    Scalar delta_;
};

// s log s^2, with the removable singularity at 0 filled in.
template <typename Scalar>
Scalar log_nl(Scalar s) {
    const Scalar a = std::abs(s);
    if (a < Scalar(1e-300)) return Scalar(0);
    return Scalar(2) * s * std::log(a);
}

// s^2 log s^2 with value 0 at the origin.
template <typename Scalar>
Scalar s2_log_s2(Scalar s) {
    const Scalar a = std::abs(s);
    if (a < Scalar(1e-300)) return Scalar(0);
    return Scalar(2) * a * a * std::log(a);
}

template <typename Scalar>
Scalar f1(Scalar s, const NonlinearitySplit<Scalar>& split) {
    const Scalar a = std::abs(s);
    const Scalar d = split.delta();
    if (a < Scalar(1e-300)) return Scalar(0);
    if (a < d) return -a * a * std::log(a);
    return Scalar(-0.5) * a * a * split.kappa() + Scalar(2) * d * a - Scalar(0.5) * d * d;
}

template <typename Scalar>
Scalar f2(Scalar s, const NonlinearitySplit<Scalar>& split) {
    const Scalar a = std::abs(s);
    const Scalar d = split.delta();
    if (a <= d) return Scalar(0);
    return a * a * std::log(a / d) + Scalar(2) * d * a - Scalar(1.5) * a * a - Scalar(0.5) * d * d;
}

template <typename Scalar>
Scalar df1(Scalar s, const NonlinearitySplit<Scalar>& split) {
    const Scalar a = std::abs(s);
    const Scalar d = split.delta();
    const Scalar sign = s < Scalar(0) ? Scalar(-1) : Scalar(1);
    if (a < Scalar(1e-300)) return Scalar(0);
    if (a < d) return -sign * a * (Scalar(2) * std::log(a) + Scalar(1));
    return sign * (-a * split.kappa() + Scalar(2) * d);
}

template <typename Scalar>
Scalar df2(Scalar s, const NonlinearitySplit<Scalar>& split) {
    const Scalar a = std::abs(s);
    const Scalar d = split.delta();
    const Scalar sign = s < Scalar(0) ? Scalar(-1) : Scalar(1);
    if (a <= d) return Scalar(0);
    return sign * (Scalar(2) * a * std::log(a / d) + Scalar(2) * d - Scalar(2) * a);
}

// F1'(s) s / F1(s) for s > 0.
template <typename Scalar>
Scalar f1_ratio(Scalar s, const NonlinearitySplit<Scalar>& split) {
    return df1(s, split) * s / f1(s, split);
}

using Split = NonlinearitySplit<double>;

/// Luxemburg gauge inf{k > 0 : sum_i w_i F1(|u_i| / k) <= 1} of a sampled
/// field, by bisection on the monotone map k -> sum_i w_i F1(|u_i| / k).
/// Returns 0 for the zero field; throws std::domain_error on non-finite input.
double luxemburg_gauge(const Eigen::Ref<const Eigen::VectorXd>& values,
                       const Eigen::Ref<const Eigen::VectorXd>& weights,
                       const Split& split);

struct RatioBounds {
    double lower;
    double upper;
    double argmin;  // sample where the lower bound is attained
};

/// Empirical min/max of F1'(s) s / F1(s) over a log-spaced grid of
/// sample_count points spanning [1e-12 delta, 1e12].
RatioBounds ratio_bounds(const Split& split, int sample_count);

}  // namespace lognls

#endif  // LOGNLS_LOGF_HPP
