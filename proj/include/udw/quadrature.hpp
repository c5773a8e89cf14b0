// quadrature.hpp — adaptive Gauss–Kronrod and fixed Gauss–Legendre rules
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <Eigen/Core>

namespace udw::quad {

// 21-point Kronrod extension of the 10-point Gauss rule on [-1, 1]
struct GaussKronrod21 {
    static const double xgk[11];  // abscissae, xgk[10] = 0
    static const double wgk[11];  // Kronrod weights
    static const double wg[5];    // Gauss weights at xgk[1], xgk[3], ..., xgk[9]
};

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
struct Result {
    Vec<N> value = Vec<N>::Zero();  // integral estimate per component
    double abs_error = 0.0;         // max-norm error estimate
    int intervals = 0;              // number of panels used
    bool converged = false;         // tolerance met before the panel limit
};

// One GK21 panel: returns the Kronrod estimate and writes the max-norm error
template <int N, class F>
Vec<N> gk21_panel(const F& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Vec<N> fc = f(c);
    Vec<N> kron = GaussKronrod21::wgk[10] * fc;
    Vec<N> gauss = Vec<N>::Zero();
    for (int j = 0; j < 10; ++j) {
        const double dx = h * GaussKronrod21::xgk[j];
        const Vec<N> sum = f(c - dx) + f(c + dx);
        kron += GaussKronrod21::wgk[j] * sum;
        if (j % 2 == 1) {
            gauss += GaussKronrod21::wg[j / 2] * sum;
        }
    }
    kron *= h;
    gauss *= h;
    err = (kron - gauss).cwiseAbs().maxCoeff();
    return kron;
}

// Globally adaptive GK21 over the partition given by `breaks` (sorted, >= 2 points).
// Stops when the summed error is below max(abs_tol, rel_tol·|I|∞).
template <int N, class F>
Result<N> integrate(const F& f, const std::vector<double>& breaks, double abs_tol, double rel_tol,
                    int max_intervals = 4000) {
    struct Panel {
        double a, b, err;
        Vec<N> val;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    Result<N> out;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) {
            continue;
        }
        Panel p{breaks[i], breaks[i + 1], 0.0, Vec<N>::Zero()};
        p.val = gk21_panel<N>(f, p.a, p.b, p.err);
        out.value += p.val;
        total_err += p.err;
        heap.push(p);
    }
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        const double target = std::max(abs_tol, rel_tol * out.value.cwiseAbs().maxCoeff());
        if (total_err <= target) {
            out.converged = true;
            break;
        }
        if (out.intervals >= max_intervals) {
            break;
        }
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            // Panel cannot be split further in floating point
            out.converged = total_err <= 10.0 * target;
            break;
        }
        Panel left{p.a, m, 0.0, Vec<N>::Zero()};
        Panel right{m, p.b, 0.0, Vec<N>::Zero()};
        left.val = gk21_panel<N>(f, left.a, left.b, left.err);
        right.val = gk21_panel<N>(f, right.a, right.b, right.err);
        out.value += left.val + right.val - p.val;
        total_err += left.err + right.err - p.err;
        heap.push(left);
        heap.push(right);
        ++out.intervals;
    }
    if (heap.empty()) {
        out.converged = true;
    }
    out.abs_error = total_err;
    return out;
}

// Gauss–Legendre nodes and weights on [-1, 1]
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

GaussLegendre gauss_legendre(int n);

}  // namespace udw::quad
