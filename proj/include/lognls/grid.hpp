#ifndef LOGNLS_GRID_HPP
#define LOGNLS_GRID_HPP

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lognls {

using Point = Eigen::VectorXd;

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Uniform tensor grid on [-L, L]^dim with an odd number of nodes per axis, so
// the origin is a node. Node k has axis indices (k % n, k / n) in 2D: x runs
// fastest.
class Grid {
public:
    Grid(int dim, double half_width, int points_per_axis);

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    int points_per_axis() const { return n_; }
    double spacing() const { return h_; }
    Eigen::Index size() const { return size_; }

    double coord(int axis_index) const { return -half_width_ + axis_index * h_; }
    int axis_index(Eigen::Index node, int axis) const {
        return axis == 0 ? int(node % n_) : int(node / n_);
    }
    Point node(Eigen::Index k) const;

    // Trapezoid tensor weights (halved on each boundary face).
    const Eigen::VectorXd& weights() const { return *weights_; }
    // h^dim: the weight carried by every interior node.
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    int dim_;
    double half_width_;
    int n_;
    double h_;
    Eigen::Index size_;
    std::shared_ptr<const Eigen::VectorXd> weights_;
};

struct Field {
    Grid grid;
    Eigen::VectorXd values;

    Field(Grid g, Eigen::VectorXd v);
    static Field zeros(const Grid& g) { return Field(g, Eigen::VectorXd::Zero(g.size())); }
    template <typename Fn>
    static Field sample(const Grid& g, Fn&& fn) {
        Eigen::VectorXd v(g.size());
        for (Eigen::Index k = 0; k < g.size(); ++k) v[k] = fn(g.node(k));
        return Field(g, std::move(v));
    }
};

void require_same_grid(const Field& a, const Field& b);

/// Applies the discrete operator -Delta (second-order central stencil per
/// axis) with u = 0 outside the box.
Field laplacian_apply(const Field& u);

/// Trapezoidal tensor quadrature.
double integrate(const Field& f);
double integrate(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& f);

/// Weighted L2 inner product and norm.
double inner(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b);
double l2_norm(const Field& u);

/// Sum over grid links of squared forward differences, scaled so that it
/// equals the discrete Dirichlet integral of |grad u|^2. Identical to
/// h^dim * <u, (-Delta) u> (Euclidean pairing, zero padding outside).
double dirichlet_integral(const Field& u);

/// h^dim times the -Delta stencil matrix: the Hessian of dirichlet_integral / 2.
Eigen::SparseMatrix<double> stiffness_matrix(const Grid& g);

/// Values of |u| sorted decreasingly and refilled on nodes ordered by
/// distance from the origin (ties broken by node index).
Field rearrange_decreasing(const Field& u);

/// CSV with header "index,x[,y],value", one row per node in index order.
void write_field_csv(std::ostream& os, const Field& u);
void write_field_csv(const std::string& path, const Field& u);
Field read_field_csv(std::istream& is, const Grid& g);

}  // namespace lognls

#endif  // LOGNLS_GRID_HPP
