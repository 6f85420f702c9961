#include "lognls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <vector>

namespace lognls {

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("grid: half_width must be positive");
    if (points_per_axis < 3 || points_per_axis % 2 == 0)
        throw std::invalid_argument("grid: points_per_axis must be odd and >= 3");
    h_ = 2.0 * half_width / (n_ - 1);
    size_ = dim == 1 ? Eigen::Index(n_) : Eigen::Index(n_) * n_;

    Eigen::VectorXd axis = Eigen::VectorXd::Constant(n_, h_);
    axis[0] = axis[n_ - 1] = 0.5 * h_;
    auto w = std::make_shared<Eigen::VectorXd>(size_);
    if (dim == 1) {
        *w = axis;
    } else {
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) (*w)[Eigen::Index(j) * n_ + i] = axis[i] * axis[j];
    }
    weights_ = std::move(w);
}

Point Grid::node(Eigen::Index k) const {
    Point p(dim_);
    for (int a = 0; a < dim_; ++a) p[a] = coord(axis_index(k, a));
    return p;
}

Field::Field(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) throw GridMismatch("field: value count does not match grid");
}

void require_same_grid(const Field& a, const Field& b) {
    if (a.grid != b.grid) throw GridMismatch("fields live on different grids");
}

Field laplacian_apply(const Field& u) {
    const Grid& g = u.grid;
    const int n = g.points_per_axis();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const Eigen::VectorXd& v = u.values;
    Eigen::VectorXd out(g.size());
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            const double left = i > 0 ? v[i - 1] : 0.0;
            const double right = i < n - 1 ? v[i + 1] : 0.0;
            out[i] = (2.0 * v[i] - left - right) * inv_h2;
        }
    } else {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const Eigen::Index k = Eigen::Index(j) * n + i;
                const double left = i > 0 ? v[k - 1] : 0.0;
                const double right = i < n - 1 ? v[k + 1] : 0.0;
                const double down = j > 0 ? v[k - n] : 0.0;
                const double up = j < n - 1 ? v[k + n] : 0.0;
                out[k] = (4.0 * v[k] - left - right - down - up) * inv_h2;
            }
        }
    }
    return Field(g, std::move(out));
}

double integrate(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& f) {
    if (f.size() != g.size()) throw GridMismatch("integrate: size mismatch");
    return g.weights().dot(f);
}

double integrate(const Field& f) { return integrate(f.grid, f.values); }

double inner(const Grid& g, const Eigen::Ref<const Eigen::VectorXd>& a,
             const Eigen::Ref<const Eigen::VectorXd>& b) {
    if (a.size() != g.size() || b.size() != g.size()) throw GridMismatch("inner: size mismatch");
    return (g.weights().array() * a.array() * b.array()).sum();
}

double l2_norm(const Field& u) { return std::sqrt(inner(u.grid, u.values, u.values)); }

double dirichlet_integral(const Field& u) {
    const Grid& g = u.grid;
    const int n = g.points_per_axis();
    const Eigen::VectorXd& v = u.values;
    long double sum = 0.0L;
    auto link = [&sum](double a, double b) { sum += (a - b) * (a - b); };
    if (g.dim() == 1) {
        link(v[0], 0.0);
        for (int i = 0; i + 1 < n; ++i) link(v[i + 1], v[i]);
        link(0.0, v[n - 1]);
    } else {
        for (int j = 0; j < n; ++j) {
            const Eigen::Index row = Eigen::Index(j) * n;
            link(v[row], 0.0);
            for (int i = 0; i + 1 < n; ++i) link(v[row + i + 1], v[row + i]);
            link(0.0, v[row + n - 1]);
        }
        for (int i = 0; i < n; ++i) {
            link(v[i], 0.0);
            for (int j = 0; j + 1 < n; ++j) link(v[Eigen::Index(j + 1) * n + i], v[Eigen::Index(j) * n + i]);
            link(0.0, v[Eigen::Index(n - 1) * n + i]);
        }
    }
    return double(sum) * g.cell_volume() / (g.spacing() * g.spacing());
}

Eigen::SparseMatrix<double> stiffness_matrix(const Grid& g) {
    const int n = g.points_per_axis();
    const double c = g.cell_volume() / (g.spacing() * g.spacing());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(std::size_t(g.size()) * (g.dim() == 1 ? 3 : 5));
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            t.emplace_back(i, i, 2.0 * c);
            if (i > 0) t.emplace_back(i, i - 1, -c);
            if (i < n - 1) t.emplace_back(i, i + 1, -c);
        }
    } else {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const Eigen::Index k = Eigen::Index(j) * n + i;
                t.emplace_back(k, k, 4.0 * c);
                if (i > 0) t.emplace_back(k, k - 1, -c);
                if (i < n - 1) t.emplace_back(k, k + 1, -c);
                if (j > 0) t.emplace_back(k, k - n, -c);
                if (j < n - 1) t.emplace_back(k, k + n, -c);
            }
        }
    }
    Eigen::SparseMatrix<double> m(g.size(), g.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Field rearrange_decreasing(const Field& u) {
    const Grid& g = u.grid;
    const Eigen::Index size = g.size();

    std::vector<double> values(u.values.data(), u.values.data() + size);
    for (double& v : values) v = std::abs(v);
    std::sort(values.begin(), values.end(), std::greater<>());

    std::vector<double> radius2(static_cast<std::size_t>(size));
    for (Eigen::Index k = 0; k < size; ++k) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            // Integer offsets keep ties exact.
            const double off = g.axis_index(k, a) - (g.points_per_axis() - 1) / 2;
            r2 += off * off;
        }
        radius2[std::size_t(k)] = r2;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(size));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return radius2[std::size_t(a)] < radius2[std::size_t(b)];
    });

    Eigen::VectorXd out(size);
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = values[r];
    return Field(g, std::move(out));
}

void write_field_csv(std::ostream& os, const Field& u) {
    const Grid& g = u.grid;
    os << (g.dim() == 1 ? "index,x,value\n" : "index,x,y,value\n");
    os << std::setprecision(17);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        os << k;
        for (int a = 0; a < g.dim(); ++a) os << ',' << g.coord(g.axis_index(k, a));
        os << ',' << u.values[k] << '\n';
    }
}

void write_field_csv(const std::string& path, const Field& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_field_csv(os, u);
}

Field read_field_csv(std::istream& is, const Grid& g) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("field csv: missing header");
    Eigen::VectorXd v(g.size());
    Eigen::Index count = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        const long long index = std::stoll(line.substr(0, line.find(',')));
        if (index != count || count >= g.size()) throw std::runtime_error("field csv: bad row order");
        v[count++] = std::stod(line.substr(comma + 1));
    }
    if (count != g.size()) throw std::runtime_error("field csv: row count does not match grid");
    return Field(g, std::move(v));
}

}  // namespace lognls
