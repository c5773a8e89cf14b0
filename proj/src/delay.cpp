// delay.cpp — retardation-pole remainder of the mode functions on a vertical contour
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "udw/errors.hpp"
#include "udw/propagator.hpp"
#include "udw/quadrature.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

constexpr int kOrder = 16;               // Gauss–Legendre nodes per panel
constexpr int kMaxEchoes = 40;           // cap on the echo-series order
constexpr double kEchoRatioMax = 0.3;    // split panels need |E e^{−ρz}/B| below this
constexpr double kPanelTol = 1e-15;      // absolute tolerance per panel
constexpr double kNegligible = 1e-16;    // horizon threshold on the line integral
constexpr std::size_t kMaxPanels = 200000;

// Legendre polynomials at the Gauss nodes, P[k][j] = P_k(x_j)
struct LegendreTable {
    quad::GaussLegendre gl;
    double p[kOrder][kOrder];

    LegendreTable() : gl(quad::gauss_legendre(kOrder)) {
        for (int j = 0; j < kOrder; ++j) {
            const double x = gl.x[j];
            double pm = 1.0;
            double pk = x;
            p[0][j] = 1.0;
            p[1][j] = x;
            for (int k = 1; k + 1 < kOrder; ++k) {
                const double next = ((2.0 * k + 1.0) * x * pk - k * pm) / (k + 1.0);
                pm = pk;
                pk = next;
                p[k + 1][j] = next;
            }
        }
    }
};

const LegendreTable& legendre_table() {
    static const LegendreTable table;
    return table;
}

// Spherical Bessel j_k(ω), k < kOrder, for any real ω (j_k(−ω) = (−1)^k j_k(ω))
void spherical_bessel(double omega, double* out) {
    const double x = std::abs(omega);
    if (x < 1e-3) {
        // Leading series term x^k/(2k+1)!! with its first correction
        double pw = 1.0;
        double dfact = 1.0;
        for (int k = 0; k < kOrder; ++k) {
            out[k] = pw / dfact * (1.0 - x * x / (2.0 * (2.0 * k + 3.0)));
            pw *= x;
            dfact *= 2.0 * k + 3.0;
        }
    } else if (x > kOrder) {
        // Upward recurrence is stable once x exceeds the order
        const double s = std::sin(x);
        const double c = std::cos(x);
        out[0] = s / x;
        out[1] = s / (x * x) - c / x;
        for (int k = 1; k + 1 < kOrder; ++k) {
            out[k + 1] = (2.0 * k + 1.0) / x * out[k] - out[k - 1];
        }
    } else {
        // Miller's downward recurrence normalised by j₀ = sin x / x
        const int start = kOrder + 30;
        double above = 0.0;
        double cur = 1e-300;
        for (int k = start; k > 0; --k) {
            const double below = (2.0 * k + 1.0) / x * cur - above;
            above = cur;
            cur = below;
            if (k - 1 < kOrder) {
                out[k - 1] = cur;
            }
            if (std::abs(cur) > 1e250) {
                // Rescale to stay in range
                above *= 1e-250;
                cur *= 1e-250;
                for (int j = k - 1; j < kOrder; ++j) {
                    out[j] *= 1e-250;
                }
            }
        }
        const double j0 = std::sin(x) / x;
        const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
        // Normalise with whichever of j₀, j₁ is larger in magnitude
        const double scale = std::abs(j0) > std::abs(j1) ? j0 / out[0] : j1 / out[1];
        for (int k = 0; k < kOrder; ++k) {
            out[k] *= scale;
        }
    }
    if (omega < 0.0) {
        for (int k = 1; k < kOrder; k += 2) {
            out[k] = -out[k];
        }
    }
}

// Integrand pieces on the line z = −κ + iy for one channel
struct LineIntegrand {
    const ModelParams& p;
    double sigma;
    double kappa;
    double c_r;  // −λ²/(16π²ρ)

    // 2γ̃(z) and the split 2γ̃_r = 2S + E e^{−ρz}/e^{ρκ} (E carries the e^{ρκ} factor)
    struct Parts {
        cplx two_gamma;  // 2γ̃₀ + 2σγ̃_r, unsplit
        cplx two_smooth; // 2γ̃₀ + 2σS
        cplx b;          // z² + Ω² + 2γ̃₀ + 2σS
        cplx e_scaled;   // 2σ (c_r/z) iπ e^{ρκ}
    };

    Parts parts(cplx z) const {
        const double r = p.rho;
        const cplx g0 = gamma0_laplace(z, p).value;
        const cplx rz = r * z;
        const cplx smooth =
            (c_r / z) * (specfun::exp_integral_e1_scaled(rz) - specfun::exp_integral_e1_scaled(-rz));
        const cplx e_scaled = 2.0 * sigma * (c_r / z) * cplx(0.0, kPi) * std::exp(r * kappa);
        const cplx two_smooth = 2.0 * g0 + 2.0 * sigma * smooth;
        const cplx b = z * z + 1.0 + two_smooth;
        // Unsplit value: e^{−ρz} = e^{ρκ} e^{−iρy}
        const cplx osc = std::exp(cplx(0.0, -r * z.imag()));
        return {two_smooth + e_scaled * osc, two_smooth, b, e_scaled};
    }
};

}  // namespace

DelayContour::DelayContour(Branch b, const ModelParams& p, const PolePair& poles) {
    p.validate();
    rho_ = p.rho;
    if (p.g == 0.0) {
        pole_separate_ = true;
        horizon_ = 0.0;
        return;
    }
    const double r = p.rho;
    const double lam2 = p.coupling_sq();
    const double gamma = std::min(poles.gamma(b), -poles.refined(b).real());

    // Line position: halfway to the rightmost retardation zeros (estimated from
    // |z|³ e^{ρ Re z} ≈ λ²/(8ρ) at |z| = 1, which undershoots), capped at 2Ω. A damped
    // pole too close to the line is moved inside it instead.
    const double arg = 8.0 * r / lam2;
    const double kappa0 = arg > std::exp(1.0) ? std::log(arg) / r : 1.0 / r;
    kappa_ = std::min(2.0, 0.5 * kappa0);
    pole_separate_ = poles.damped(b) && kappa_ > 2.0 * gamma;
    if (!pole_separate_) {
        kappa_ = std::min(kappa_, 0.5 * gamma);
    }

    const LineIntegrand integrand{p, branch_sign(b), kappa_, -lam2 / (16.0 * kPi * kPi * r)};
    const LegendreTable& lt = legendre_table();

    // Build one panel; returns the truncation estimate
    auto build = [&](double lo, double hi, Panel& out) -> double {
        const double c = 0.5 * (lo + hi);
        const double a = 0.5 * (hi - lo);
        cplx zs[kOrder];
        LineIntegrand::Parts pr[kOrder];
        double q_max = 0.0;
        for (int j = 0; j < kOrder; ++j) {
            zs[j] = cplx(-kappa_, c + a * lt.gl.x[j]);
            pr[j] = integrand.parts(zs[j]);
            q_max = std::max(q_max, std::abs(pr[j].e_scaled / pr[j].b));
        }
        const bool split = q_max < kEchoRatioMax;
        int echoes = 0;
        if (split && q_max > 0.0) {
            echoes = static_cast<int>(std::ceil(std::log(1e-17) / std::log(q_max)));
            echoes = std::clamp(echoes, 0, kMaxEchoes);
        }
        out.center = c;
        out.half = a;
        out.echoes = echoes;
        out.coef.assign(static_cast<std::size_t>(echoes + 1) * 3 * kOrder, cplx(0.0));
        out.bound.assign(echoes + 1, 0.0);

        double err = 0.0;
        cplx vals[kOrder];
        for (int n = 0; n <= echoes; ++n) {
            for (int m = 0; m < 3; ++m) {
                for (int j = 0; j < kOrder; ++j) {
                    const cplx z = zs[j];
                    const cplx free = z * z + 1.0;
                    cplx v;
                    if (!split) {
                        const cplx a_full = free + pr[j].two_gamma;
                        v = -pr[j].two_gamma / (a_full * free);
                    } else if (n == 0) {
                        v = -pr[j].two_smooth / (pr[j].b * free);
                    } else {
                        v = std::pow(-pr[j].e_scaled / pr[j].b, n) / pr[j].b;
                    }
                    vals[j] = v * std::pow(z, m);
                }
                cplx* cf = &out.coef[(static_cast<std::size_t>(n) * 3 + m) * kOrder];
                double mag = 0.0;
                for (int k = 0; k < kOrder; ++k) {
                    cplx s = 0.0;
                    for (int j = 0; j < kOrder; ++j) {
                        s += lt.gl.w[j] * lt.p[k][j] * vals[j];
                    }
                    cf[k] = s * (0.5 * (2.0 * k + 1.0));
                    mag += std::abs(cf[k]);
                }
                out.bound[n] = std::max(out.bound[n], 2.0 * a * mag / kPi);
                err = std::max(err, a * (std::abs(cf[kOrder - 1]) + std::abs(cf[kOrder - 2])));
            }
        }
        return err;
    };

    // Initial partition: the scales κ, 1/ρ, Ω, Λ and geometric growth up to 200Λ
    const double lambda = p.uv_cutoff;
    const double y_max = 200.0 * lambda;
    std::vector<double> breaks{0.0, kappa_, 1.0 / r, 0.5, 1.0, 1.5, 2.0, lambda, y_max};
    for (double y = 4.0; y < y_max; y *= 2.0) {
        breaks.push_back(y);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double y) { return y > y_max; }),
                 breaks.end());

    std::vector<std::pair<double, double>> todo;
    for (std::size_t i = breaks.size() - 1; i-- > 0;) {
        todo.emplace_back(breaks[i], breaks[i + 1]);
    }
    while (!todo.empty()) {
        const auto [lo, hi] = todo.back();
        todo.pop_back();
        Panel panel;
        const double err = build(lo, hi, panel);
        const bool too_narrow = (hi - lo) < 1e-13 * std::max(1.0, hi);
        if (err > kPanelTol && !too_narrow) {
            const double mid = 0.5 * (lo + hi);
            todo.emplace_back(mid, hi);
            todo.emplace_back(lo, mid);
            continue;
        }
        panels_.push_back(std::move(panel));
        if (panels_.size() > kMaxPanels) {
            throw NumericalError("delay contour needs more than " + std::to_string(kMaxPanels) +
                                 " panels");
        }
    }

    double total = 0.0;
    for (const Panel& pn : panels_) {
        for (double bnd : pn.bound) {
            total += bnd;
        }
    }
    horizon_ = total > kNegligible ? std::log(total / kNegligible) / kappa_ : 0.0;
}

Jet DelayContour::line_integral(double t) const {
    if (!(t >= 0.0)) {
        throw PreconditionError("line_integral requires t >= 0");
    }
    if (t >= horizon_) {
        return {};
    }
    const double damp = std::exp(-kappa_ * t);
    static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    cplx acc[3] = {0.0, 0.0, 0.0};
    double jl[kOrder];
    for (const Panel& pn : panels_) {
        for (int n = 0; n <= pn.echoes; ++n) {
            if (pn.bound[n] * damp < 1e-20) {
                continue;
            }
            const double tau = t - n * rho_;
            spherical_bessel(pn.half * tau, jl);
            const cplx phase = 2.0 * pn.half * std::exp(cplx(0.0, pn.center * tau));
            for (int m = 0; m < 3; ++m) {
                const cplx* cf = &pn.coef[(static_cast<std::size_t>(n) * 3 + m) * kOrder];
                cplx s = 0.0;
                for (int k = 0; k < kOrder; ++k) {
                    s += cf[k] * (ipow[k & 3] * jl[k]);
                }
                acc[m] += phase * s;
            }
        }
    }
    const double scale = damp / kPi;
    return {scale * acc[0].real(), scale * acc[1].real(), scale * acc[2].real()};
}

Jet delay_term(double t, Branch b, const ModelParams& p) {
    if (!(t >= 0.0)) {
        throw PreconditionError("delay_term requires t >= 0");
    }
    if (t == 0.0 || p.g == 0.0) {
        return {};
    }
    const PolePair poles = find_poles(p, false);
    const DelayContour contour(b, p, poles);
    const CutQuadrature cut(b, p, t, contour.kappa());
    const auto [below, above] = cut.evaluate_split(t, contour.kappa());
    (void)below;
    const Jet line = contour.line_integral(t);
    Jet out{line.value - above.value, line.d1 - above.d1, line.d2 - above.d2};
    if (!contour.pole_separate()) {
        const Jet pole = pole_term_refined(t, b, poles);
        out.value -= pole.value;
        out.d1 -= pole.d1;
        out.d2 -= pole.d2;
    }
    return out;
}

}  // namespace udw
