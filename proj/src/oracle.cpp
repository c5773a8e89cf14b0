// oracle.cpp — Volterra product-integration solver and brute-force fluctuation sums
#include "udw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "udw/errors.hpp"
#include "udw/quadrature.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

constexpr double kMaxStep = 0.05;
constexpr double kMaxTime = 5000.0;
constexpr std::size_t kMaxSteps = 250000;

// Cin and Si of a real argument of either sign (Cin even, Si odd)
double cin_abs(double x) { return specfun::cosine_integral_entire(std::abs(x)); }
double si(double x) { return x == 0.0 ? 0.0 : specfun::sine_integral(x).value; }

// L(σ; c) = ∫₀^σ e^{i(σ−x)} ln|x − c| dx for c = ±a, a > 0. With d = σ − c the
// logarithmic singularity at d = 0 is carried by ln|d|(1 − e^{id}), which vanishes there.
cplx log_convolution(double sigma, double c, double ln_a, double ci_a) {
    const double d = sigma - c;
    const cplx eid = std::polar(1.0, d);
    const cplx eis = std::polar(1.0, sigma);
    const double log_part = (d == 0.0) ? 0.0 : std::log(std::abs(d));
    const cplx bracket = log_part * (1.0 - eid) - eid * (specfun::euler_gamma - cin_abs(d)) -
                         eis * ln_a + eid * ci_a;
    return cplx(0.0, 1.0) * bracket - eid * (si(d) + si(c));
}

// Both convolutions with the per-parameter constants hoisted out
struct ConvolutionEvaluator {
    double c_self = 0.0;   // λ²/8π²
    double c_cross = 0.0;  // −λ²/(16π² r)
    double lambda = 0.0;
    double r = 0.0;
    double ln_r = 0.0;
    double ci_r = 0.0;

    explicit ConvolutionEvaluator(const ModelParams& p) {
        const double lam2 = p.coupling_sq();
        c_self = lam2 / (8.0 * kPi * kPi);
        c_cross = -lam2 / (16.0 * kPi * kPi * p.rho);
        lambda = p.uv_cutoff;
        r = p.rho;
        ln_r = std::log(r);
        ci_r = specfun::cosine_integral(r).value;
    }

    KernelConvolution operator()(double sigma) const {
        // P(σ) = ∫₀^σ e^{−ix}(1 − cos Λx)/x dx
        const double lo = (lambda - 1.0) * sigma;
        const double hi = (lambda + 1.0) * sigma;
        const double re_p = -cin_abs(sigma) + 0.5 * cin_abs(lo) + 0.5 * cin_abs(hi);
        const double im_p = -si(sigma) + 0.5 * si(hi) - 0.5 * si(lo);
        const cplx self = -c_self * std::polar(1.0, sigma) * cplx(re_p, im_p);
        const cplx cross = c_cross * (log_convolution(sigma, -r, ln_r, ci_r) -
                                      log_convolution(sigma, r, ln_r, ci_r));
        return {self, cross};
    }
};

// Product-integration weights of the hat basis: kernel K (index 0, 1 = self, cross)
// and its derivative K' (index 2, 3), W_j = ∫ k(σ) φ(σ/h − j) dσ
struct HatWeights {
    std::vector<double> k_self, k_cross, dk_self, dk_cross;
};

HatWeights hat_weights(std::size_t n_steps, double h, const ModelParams& p) {
    HatWeights w;
    w.k_self.assign(n_steps + 1, 0.0);
    w.k_cross.assign(n_steps + 1, 0.0);
    w.dk_self.assign(n_steps + 1, 0.0);
    w.dk_cross.assign(n_steps + 1, 0.0);
    if (p.g == 0.0) {
        return w;
    }
    const ConvolutionEvaluator conv(p);
    const double scale = p.coupling_sq() * (1.0 + std::log(p.uv_cutoff));
    // Cell moments ∫ k and ∫ k·(σ − σ_m)/h over [σ_m, σ_m + h]
    std::vector<quad::Vec<8>> moments(n_steps);
    for (std::size_t m = 0; m < n_steps; ++m) {
        const double a = static_cast<double>(m) * h;
        const double b = a + h;
        auto f = [&](double s) {
            const KernelConvolution c = conv(s);
            const double xi = (s - a) / h;
            quad::Vec<8> v;
            v << c.self_part.imag(), c.cross_part.imag(), c.self_part.real(),
                c.cross_part.real(), 0.0, 0.0, 0.0, 0.0;
            v.tail<4>() = xi * v.head<4>();
            return v;
        };
        std::vector<double> breaks{a, b};
        if (p.rho > a && p.rho < b) {
            breaks = {a, p.rho, b};
        }
        const auto res = quad::integrate<8>(f, breaks, 1e-15 * scale * h, 1e-13, 400);
        if (!res.converged) {
            throw NumericalError("Volterra kernel moment did not converge in cell " +
                                 std::to_string(m));
        }
        moments[m] = res.value;
    }
    std::vector<double>* out[4] = {&w.k_self, &w.k_cross, &w.dk_self, &w.dk_cross};
    for (std::size_t j = 0; j <= n_steps; ++j) {
        for (int c = 0; c < 4; ++c) {
            double v = 0.0;
            if (j < n_steps) {
                v += moments[j](c) - moments[j](c + 4);  // falling half of the hat
            }
            if (j > 0) {
                v += moments[j - 1](c + 4);  // rising half
            }
            (*out[c])[j] = v;
        }
    }
    return w;
}

}  // namespace

KernelConvolution kernel_convolution(double sigma, const ModelParams& p) {
    p.validate();
    if (sigma < 0.0) {
        throw PreconditionError("kernel_convolution requires σ >= 0");
    }
    if (sigma == 0.0 || p.g == 0.0) {
        return {};
    }
    return ConvolutionEvaluator(p)(sigma);
}

VolterraSolution volterra_u(double t_max, double h, const ModelParams& p) {
    p.validate();
    if (p.ir_mass != 0.0) {
        throw PreconditionError("volterra_u requires ir_mass = 0");
    }
    if (!(h > 0.0) || h > kMaxStep) {
        throw PreconditionError("volterra_u requires 0 < h <= 0.05");
    }
    if (!(t_max > 0.0) || t_max > kMaxTime) {
        throw PreconditionError("volterra_u requires 0 < t_max <= 5000");
    }
    const double steps_real = std::ceil(t_max / h - 1e-9);
    if (steps_real > static_cast<double>(kMaxSteps)) {
        throw PreconditionError("volterra_u: " + std::to_string(steps_real) +
                                " steps exceed the O(N²) budget of " +
                                std::to_string(kMaxSteps));
    }
    const auto n_steps = static_cast<std::size_t>(steps_real);
    const HatWeights w = hat_weights(n_steps, h, p);

    // Structure-of-arrays storage of the four entries of u
    const std::size_t n = n_steps + 1;
    std::vector<double> u11(n, 0.0), u12(n, 0.0), u21(n, 0.0), u22(n, 0.0);
    std::vector<double> d11(n, 0.0), d12(n, 0.0), d21(n, 0.0), d22(n, 0.0);
    d11[0] = 1.0;
    d22[0] = 1.0;

    // (I + 2W₀)⁻¹ for W₀ = [[a, b], [b, a]]
    const double a0 = 1.0 + 2.0 * w.k_self[0];
    const double b0 = 2.0 * w.k_cross[0];
    const double det = a0 * a0 - b0 * b0;
    double residual = 0.0;
    double u_scale = 0.0;

    for (std::size_t k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        // Memory sums Σ_{j=1}^{k−1} W_j u_{k−j} for K and K'
        double s11 = 0.0, s12 = 0.0, s21 = 0.0, s22 = 0.0;
        double q11 = 0.0, q12 = 0.0, q21 = 0.0, q22 = 0.0;
        for (std::size_t j = 1; j < k; ++j) {
            const std::size_t i = k - j;
            const double a = w.k_self[j], b = w.k_cross[j];
            const double da = w.dk_self[j], db = w.dk_cross[j];
            s11 += a * u11[i] + b * u21[i];
            s12 += a * u12[i] + b * u22[i];
            s21 += b * u11[i] + a * u21[i];
            s22 += b * u12[i] + a * u22[i];
            q11 += da * u11[i] + db * u21[i];
            q12 += da * u12[i] + db * u22[i];
            q21 += db * u11[i] + da * u21[i];
            q22 += db * u12[i] + da * u22[i];
        }
        const double st = std::sin(t);
        const double ct = std::cos(t);
        const double r11 = st - 2.0 * s11, r12 = -2.0 * s12;
        const double r21 = -2.0 * s21, r22 = st - 2.0 * s22;
        u11[k] = (a0 * r11 - b0 * r21) / det;
        u21[k] = (a0 * r21 - b0 * r11) / det;
        u12[k] = (a0 * r12 - b0 * r22) / det;
        u22[k] = (a0 * r22 - b0 * r12) / det;

        // Residual of the discrete equation for u
        const double e11 = a0 * u11[k] + b0 * u21[k] - r11;
        const double e12 = a0 * u12[k] + b0 * u22[k] - r12;
        const double e21 = b0 * u11[k] + a0 * u21[k] - r21;
        const double e22 = b0 * u12[k] + a0 * u22[k] - r22;
        residual = std::max({residual, std::abs(e11), std::abs(e12), std::abs(e21),
                             std::abs(e22)});
        u_scale = std::max({u_scale, std::abs(u11[k]), std::abs(u12[k])});

        const double da = w.dk_self[0], db = w.dk_cross[0];
        q11 += da * u11[k] + db * u21[k];
        q12 += da * u12[k] + db * u22[k];
        q21 += db * u11[k] + da * u21[k];
        q22 += db * u12[k] + da * u22[k];
        d11[k] = ct - 2.0 * q11;
        d12[k] = -2.0 * q12;
        d21[k] = -2.0 * q21;
        d22[k] = ct - 2.0 * q22;
    }

    VolterraSolution sol;
    sol.h = h;
    sol.grid.resize(n);
    sol.u.resize(n);
    sol.du.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        sol.grid[k] = static_cast<double>(k) * h;
        sol.u[k] << u11[k], u12[k], u21[k], u22[k];
        sol.du[k] << d11[k], d12[k], d21[k], d22[k];
    }
    sol.residual_norm = residual / std::max(u_scale, 1e-300);
    return sol;
}

FluctuationMatrix s_matrix_bruteforce(double t, const VolterraSolution& sol,
                                      const ModelParams& p) {
    p.validate();
    if (sol.size() == 0 || t < 0.0) {
        throw PreconditionError("s_matrix_bruteforce requires t >= 0 and a non-empty solution");
    }
    const double pos = t / sol.h;
    const double idx = std::round(pos);
    if (std::abs(pos - idx) > 1e-9 * std::max(1.0, pos) || idx >= static_cast<double>(sol.size())) {
        throw PreconditionError("s_matrix_bruteforce: t = " + std::to_string(t) +
                                " is not a grid point of the Volterra solution");
    }
    const auto n = static_cast<std::size_t>(idx);
    FluctuationMatrix out;
    out.time = t;
    out.method = FluctuationMethod::numeric;
    if (n == 0 || p.g == 0.0) {
        return out;
    }
    const double h = sol.h;
    auto weight = [&](std::size_t i) { return (i == 0 || i == n) ? 0.5 * h : h; };

    Eigen::Matrix2d sx = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d sp = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d sxp = Eigen::Matrix2d::Zero();
    const NoiseKernelValue nu0 = noise_kernel(0.0, p);
    const double c_delta = nu0.self_delta_weight;
    for (std::size_t i = 0; i <= n; ++i) {
        const double wi = weight(i);
        sx += c_delta * wi * sol.u[i] * sol.u[i];
        sp += c_delta * wi * sol.du[i] * sol.du[i];
        sxp += c_delta * wi * sol.u[i] * sol.du[i];
    }
    Eigen::Matrix2d swap;
    swap << 0.0, 1.0, 1.0, 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const Eigen::Matrix2d ui = weight(i) * sol.u[i] * swap;
        const Eigen::Matrix2d dui = weight(i) * sol.du[i] * swap;
        for (std::size_t j = 0; j <= n; ++j) {
            // Nodes on the light cone |s − s'| = r take the half value of the jump;
            // roundoff in the grid difference must not push them to either side
            double lag = sol.grid[i] - sol.grid[j];
            if (std::abs(std::abs(lag) - p.rho) < 1e-9 * h) {
                lag = std::copysign(p.rho, lag);
            }
            const double nu = noise_kernel(lag, p).value.cross_part;
            if (nu == 0.0) {
                continue;
            }
            const double wj = weight(j) * nu;
            sx += wj * ui * sol.u[j];
            sp += wj * dui * sol.du[j];
            sxp += wj * ui * sol.du[j];
        }
    }
    out.matrix.block<2, 2>(0, 0) = sx;
    out.matrix.block<2, 2>(2, 2) = sp;
    out.matrix.block<2, 2>(0, 2) = sxp;
    out.matrix.block<2, 2>(2, 0) = sxp.transpose();
    return out;
}

}  // namespace udw
