#pragma once

#include <cmath>
#include <stdexcept>

namespace vlab {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m  = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw std::runtime_error("adaptive quadrature: recursion depth exhausted");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson with absolute tolerance.  The integrand must be finite on [a,b].
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Relative-tolerance driver: one coarse pass to scale the absolute tolerance.
template <class F>
double integrate_rel(const F& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double scale = 0.0;
    const int n = 16;
    for (int i = 0; i <= n; ++i) {
        const double s = a + (b - a) * i / n;
        scale += std::abs(f(s));
    }
    scale = std::max(scale * std::abs(b - a) / (n + 1), 1e-300);
    return integrate(f, a, b, rel_tol * scale);
}

} // namespace vlab
