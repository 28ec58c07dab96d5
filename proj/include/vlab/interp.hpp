#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vlab {

// Monotone cubic interpolant (Fritsch-Carlson).  Preserves monotonicity of the
// data, which the modulus tables require: a plain cubic spline can overshoot
// and break invertibility near the flat end of the table.
class PchipInterp {
public:
    PchipInterp() = default;

    PchipInterp(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("pchip: need >= 2 nodes and matching sizes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("pchip: abscissae must be strictly increasing");

        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // clamp endpoint slopes (Fritsch-Carlson condition)
        auto clamp_end = [](double m, double d0) {
            if (d0 == 0.0) return 0.0;
            if (m * d0 < 0.0) return 0.0;
            if (std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
            return m;
        };
        m_[0] = clamp_end(m_[0], d[0]);
        m_[n - 1] = clamp_end(m_[n - 1], d[n - 2]);
    }

    double operator()(double x) const {
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::size_t locate(double x) const {
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return x_.size() - 2;
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

// Uniform-grid Catmull-Rom bicubic.  Used for the precomputed torus-kernel
// remainder table; values are sampled on a padded grid so the 4x4 stencil
// never leaves the data.
class BicubicTable {
public:
    BicubicTable() = default;

    // nx x ny values of f at x0 + i*dx, y0 + j*dy, row-major in i (x index slow).
    BicubicTable(std::vector<double> v, std::size_t nx, std::size_t ny,
                 double x0, double y0, double dx, double dy)
        : v_(std::move(v)), nx_(nx), ny_(ny), x0_(x0), y0_(y0), dx_(dx), dy_(dy) {
        if (v_.size() != nx_ * ny_ || nx_ < 4 || ny_ < 4)
            throw std::invalid_argument("bicubic: bad table shape");
    }

    double operator()(double x, double y) const {
        double fx = (x - x0_) / dx_;
        double fy = (y - y0_) / dy_;
        // clamp query into the valid stencil range [1, n-3]
        auto clamp_cell = [](double f, std::size_t n) {
            double c = std::floor(f);
            if (c < 1) c = 1;
            if (c > double(n - 3)) c = double(n - 3);
            return c;
        };
        const double cx = clamp_cell(fx, nx_), cy = clamp_cell(fy, ny_);
        const std::size_t i = std::size_t(cx), j = std::size_t(cy);
        const double tx = fx - cx, ty = fy - cy;

        double col[4];
        for (int a = 0; a < 4; ++a) {
            const double* row = &v_[(i - 1 + a) * ny_ + (j - 1)];
            col[a] = catmull(row[0], row[1], row[2], row[3], ty);
        }
        return catmull(col[0], col[1], col[2], col[3], tx);
    }

private:
    static double catmull(double p0, double p1, double p2, double p3, double t) {
        return p1 + 0.5 * t * (p2 - p0 +
               t * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
               t * (3 * (p1 - p2) + p3 - p0)));
    }

    std::vector<double> v_;
    std::size_t nx_ = 0, ny_ = 0;
    double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
};

} // namespace vlab
