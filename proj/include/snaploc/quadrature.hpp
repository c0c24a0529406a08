#pragma once

#include <array>
#include <cmath>

#include <Eigen/Core>

namespace snaploc {

/// Adaptive Gauss-Kronrod (7/15) quadrature of a vector-valued integrand on [a, b].
///
/// Subintervals are bisected until the Gauss/Kronrod difference, in the max
/// norm, drops below max(abs_tol, rel_tol * |K|) or max_depth is reached. The
/// first min_depth levels are always split so that narrow peaks are sampled.
template <typename Integrand>
Eigen::VectorXd integrate_adaptive(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                                   double abs_tol = 1e-14, int min_depth = 2,
                                   int max_depth = 48) {
    static constexpr std::array<double, 8> xk = {
        0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
        0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
        0.207784955007898468, 0.000000000000000000};
    static constexpr std::array<double, 8> wk = {
        0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
        0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
        0.204432940075298892, 0.209482141084727828};
    static constexpr std::array<double, 4> wg = {0.129484966168869693, 0.279705391489276668,
                                                 0.381830050505118945, 0.417959183673469388};

    auto rule = [&](double lo, double hi, Eigen::VectorXd& kronrod, Eigen::VectorXd& gauss) {
        const double c = 0.5 * (lo + hi);
        const double r = 0.5 * (hi - lo);
        Eigen::VectorXd fc = f(c);
        kronrod = wk[7] * fc;
        gauss = wg[3] * fc;
        for (int i = 0; i < 7; ++i) {
            Eigen::VectorXd sum = f(c - r * xk[i]);
            sum += f(c + r * xk[i]);
            kronrod += wk[i] * sum;
            if (i % 2 == 1) gauss += wg[i / 2] * sum;
        }
        kronrod *= r;
        gauss *= r;
    };

    auto recurse = [&](auto&& self, double lo, double hi, int depth) -> Eigen::VectorXd {
        const double mid = 0.5 * (lo + hi);
        if (depth < min_depth) {
            return self(self, lo, mid, depth + 1) + self(self, mid, hi, depth + 1);
        }
        Eigen::VectorXd k, g;
        rule(lo, hi, k, g);
        const double err = (k - g).cwiseAbs().maxCoeff();
        const double scale = k.size() > 0 ? k.cwiseAbs().maxCoeff() : 0.0;
        if (depth >= max_depth || err <= std::max(abs_tol * (hi - lo), rel_tol * scale)) {
            return k;
        }
        return self(self, lo, mid, depth + 1) + self(self, mid, hi, depth + 1);
    };
    return recurse(recurse, a, b, 0);
}

}  // namespace snaploc
