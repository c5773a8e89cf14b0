// fluctuation.cpp — fluctuation matrix from sampled modes and from the pole term
#include "udw/fluctuation.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "udw/errors.hpp"

namespace udw {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Sampled channel function f with its first two derivatives
struct ChannelSamples {
    std::vector<double> f, df, ddf;
};

ChannelSamples channel_samples(const ModeFunctions& m, double sign) {
    ChannelSamples c;
    const std::size_t n = m.size();
    c.f.resize(n);
    c.df.resize(n);
    c.ddf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.f[i] = m.u11[i] + sign * m.u12[i];
        c.df[i] = m.du11[i] + sign * m.du12[i];
        c.ddf[i] = m.ddu11[i] + sign * m.ddu12[i];
    }
    return c;
}

// Cubic Hermite interpolation of y with slope dy at fractional index x ∈ [i, i+1]
double hermite(const std::vector<double>& y, const std::vector<double>& dy, double h,
               std::size_t i, double frac) {
    if (frac == 0.0) {
        return y[i];
    }
    const double s = frac;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
}

// Per-grid-point channel integrals ∫∫ f ν_a f etc. for one channel
std::vector<ChannelFluctuation> channel_series(const ChannelSamples& c, double h, double sign,
                                               const ModelParams& p) {
    const std::size_t n = c.f.size();
    const double lam2 = p.coupling_sq();
    const double w_delta = lam2 / (8.0 * kPi);
    const double w_strip = sign * lam2 / (16.0 * kPi * p.rho);

    // Primitive F = ∫₀ᵗ f, end-corrected trapezoid (exact through cubics)
    std::vector<double> prim(n, 0.0);
    double trap = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        trap += 0.5 * h * (c.f[i - 1] + c.f[i]);
        prim[i] = trap - h * h / 12.0 * (c.df[i] - c.df[0]);
    }

    // Delay r in grid units; a kink of the strip integrands sits at t = r
    const double shift = p.rho / h;
    const double shift_int = std::round(shift);
    const bool kink_on_grid = std::abs(shift - shift_int) < 1e-9 * std::max(1.0, shift);
    const auto kink = static_cast<std::size_t>(shift_int);

    struct Integrand {
        double xx = 0.0, pp = 0.0, xp = 0.0;     // values
        double dxx = 0.0, dpp = 0.0, dxp = 0.0;  // t-derivatives
    };
    // Strip integrands d/dt of ∫∫_{|s−s'|<r}; `left` takes the one-sided limit t → r⁻
    auto strip = [&](std::size_t i, bool left) {
        // Delayed values f(t−r), ḟ(t−r), F(t−r); all zero while t − r < 0
        double fr = 0.0, dfr = 0.0, prim_r = 0.0;
        const double x = kink_on_grid ? static_cast<double>(i) - shift_int
                                      : static_cast<double>(i) - shift;
        const bool active = kink_on_grid ? (x > 0.0 || (x == 0.0 && !left)) : x > 0.0;
        if (active) {
            auto j = static_cast<std::size_t>(std::floor(x));
            double frac = x - static_cast<double>(j);
            if (frac < 1e-12) {
                frac = 0.0;
            }
            fr = hermite(c.f, c.df, h, j, frac);
            dfr = hermite(c.df, c.ddf, h, j, frac);
            prim_r = hermite(prim, c.f, h, j, frac);
        }
        Integrand g;
        const double f = c.f[i], df = c.df[i], ddf = c.ddf[i];
        const double dF = prim[i] - prim_r;
        const double dfv = f - fr;
        // d/dt of the delayed values: f(t−r)' = ḟ(t−r), F(t−r)' = f(t−r)
        const double ddfv = df - dfr;
        const double dprim = f - fr;
        g.xx = 2.0 * f * dF;
        g.dxx = 2.0 * df * dF + 2.0 * f * dprim;
        g.pp = 2.0 * df * dfv;
        g.dpp = 2.0 * ddf * dfv + 2.0 * df * ddfv;
        g.xp = f * dfv + df * dF;
        g.dxp = df * dfv + f * ddfv + ddf * dF + df * dprim;
        return g;
    };

    std::vector<ChannelFluctuation> out(n);
    double d_xx = 0.0, d_pp = 0.0, d_xp = 0.0;  // δ-term trapezoid sums
    double s_xx = 0.0, s_pp = 0.0, s_xp = 0.0;  // strip trapezoid sums
    Integrand prev = strip(0, false);
    const Integrand first = prev;
    Integrand kink_left;
    Integrand kink_right;
    bool past_kink = false;
    for (std::size_t i = 1; i < n; ++i) {
        const double f0 = c.f[i - 1], f1 = c.f[i];
        const double p0 = c.df[i - 1], p1 = c.df[i];
        d_xx += 0.5 * h * (f0 * f0 + f1 * f1);
        d_pp += 0.5 * h * (p0 * p0 + p1 * p1);
        d_xp += 0.5 * h * (f0 * p0 + f1 * p1);

        const bool at_kink = kink_on_grid && i == kink;
        const Integrand cur = strip(i, at_kink);
        s_xx += 0.5 * h * (prev.xx + cur.xx);
        s_pp += 0.5 * h * (prev.pp + cur.pp);
        s_xp += 0.5 * h * (prev.xp + cur.xp);
        if (at_kink) {
            kink_left = cur;
            kink_right = strip(i, false);
            past_kink = true;
            prev = kink_right;
        } else {
            prev = cur;
        }

        // Euler–Maclaurin end corrections −h²/12 [g'] over each smooth piece
        const double c2 = h * h / 12.0;
        const double ddf0 = c.ddf[0], ddf1 = c.ddf[i];
        const double e_xx = d_xx - c2 * (2.0 * f1 * p1 - 2.0 * c.f[0] * c.df[0]);
        const double e_pp = d_pp - c2 * (2.0 * p1 * ddf1 - 2.0 * c.df[0] * ddf0);
        const double e_xp = d_xp - c2 * ((p1 * p1 + f1 * ddf1) - (c.df[0] * c.df[0] + c.f[0] * ddf0));
        const Integrand& end = at_kink ? kink_left : cur;
        double jxx = end.dxx - first.dxx, jpp = end.dpp - first.dpp, jxp = end.dxp - first.dxp;
        if (past_kink && !at_kink) {
            jxx += kink_left.dxx - kink_right.dxx;
            jpp += kink_left.dpp - kink_right.dpp;
            jxp += kink_left.dxp - kink_right.dxp;
        }
        out[i].xx = w_delta * e_xx + w_strip * (s_xx - c2 * jxx);
        out[i].pp = w_delta * e_pp + w_strip * (s_pp - c2 * jpp);
        out[i].xp = w_delta * e_xp + w_strip * (s_xp - c2 * jxp);
    }
    return out;
}

// (e^{x} − 1)/x for complex x
cplx phi1(cplx x) {
    if (std::abs(x) < 0.1) {
        cplx term = 1.0;
        cplx sum = 1.0;
        for (int k = 2; k < 12; ++k) {
            term *= x / static_cast<double>(k);
            sum += term;
        }
        return sum;
    }
    return (std::exp(x) - 1.0) / x;
}

// E(α, t) = ∫₀ᵗ e^{αs} ds, including t = ∞ for Re α < 0
cplx exp_moment(cplx alpha, double t) {
    if (t == kInf) {
        return -1.0 / alpha;
    }
    return t * phi1(alpha * t);
}

// ∫∫ over [0, t]² ∩ {|s − s'| < r} of e^{αs + α's'}
cplx strip_moment(cplx a, cplx b, double t, double r) {
    const cplx square = exp_moment(a, t) * exp_moment(b, t);
    if (t <= r) {
        return square;
    }
    const double tail = (t == kInf) ? kInf : t - r;
    const cplx both = exp_moment(a + b, tail);
    // Corners s − s' >= r and s' − s >= r
    const cplx corner1 = std::exp(a * r) / b * (both - exp_moment(a, tail));
    const cplx corner2 = std::exp(b * r) / a * (both - exp_moment(b, tail));
    return square - corner1 - corner2;
}

// ∫∫ Im(c e^{βs}) k(s, s') Im(d e^{βs'}) with k = δ(s − s') or the strip indicator
double pair_delta(cplx c, cplx d, cplx beta, double t) {
    return 0.5 * (c * std::conj(d) * exp_moment(beta + std::conj(beta), t) -
                  c * d * exp_moment(2.0 * beta, t)).real();
}

double pair_strip(cplx c, cplx d, cplx beta, double t, double r) {
    return 0.5 * (c * std::conj(d) * strip_moment(beta, std::conj(beta), t, r) -
                  c * d * strip_moment(beta, beta, t, r)).real();
}

ChannelFluctuation wwa_channel(double t, Branch b, const PolePair& poles, const ModelParams& p) {
    const double lam2 = p.coupling_sq();
    const double w_delta = lam2 / (8.0 * kPi);
    const double w_strip = branch_sign(b) * lam2 / (16.0 * kPi * p.rho);
    const double wt = poles.shifted_frequency(b);
    const cplx beta(-poles.gamma(b), wt);
    const cplx cx = 1.0 / wt;
    const cplx cp = beta / wt;
    ChannelFluctuation c;
    c.xx = w_delta * pair_delta(cx, cx, beta, t) + w_strip * pair_strip(cx, cx, beta, t, p.rho);
    c.pp = w_delta * pair_delta(cp, cp, beta, t) + w_strip * pair_strip(cp, cp, beta, t, p.rho);
    c.xp = w_delta * pair_delta(cx, cp, beta, t) + w_strip * pair_strip(cx, cp, beta, t, p.rho);
    return c;
}

void check_uniform_grid(const ModeFunctions& m, const ModelParams& p) {
    if (m.size() < 2 || m.grid.front() != 0.0) {
        throw PreconditionError("numeric S requires a grid starting at t = 0 with >= 2 points");
    }
    const double h = m.grid[1] - m.grid[0];
    for (std::size_t i = 1; i < m.size(); ++i) {
        const double step = m.grid[i] - m.grid[i - 1];
        if (std::abs(step - h) > 1e-9 * h) {
            throw PreconditionError("numeric S requires a uniform grid");
        }
    }
    const double h_max = std::min(kPi / 10.0, p.rho / 10.0);
    if (h > h_max * (1.0 + 1e-12)) {
        throw PreconditionError("numeric S: grid spacing " + std::to_string(h) +
                                " exceeds min(π/10, r/10) = " + std::to_string(h_max));
    }
}

}  // namespace

const char* to_string(FluctuationMethod m) {
    switch (m) {
        case FluctuationMethod::numeric:
            return "numeric";
        case FluctuationMethod::wwa_analytic:
            return "wwa_analytic";
        case FluctuationMethod::asymptotic_closed_form:
            return "asymptotic_closed_form";
    }
    return "unknown";
}

Eigen::Matrix4d assemble_fluctuation(const ChannelFluctuation& plus,
                                     const ChannelFluctuation& minus) {
    auto block = [](double a, double b) {
        Eigen::Matrix2d m;
        const double diag = 0.5 * (a + b);
        const double off = 0.5 * (a - b);
        m << diag, off, off, diag;
        return m;
    };
    Eigen::Matrix4d s;
    s.block<2, 2>(0, 0) = block(plus.xx, minus.xx);
    s.block<2, 2>(2, 2) = block(plus.pp, minus.pp);
    s.block<2, 2>(0, 2) = block(plus.xp, minus.xp);
    s.block<2, 2>(2, 0) = block(plus.xp, minus.xp);
    return s;
}

std::vector<FluctuationMatrix> s_matrix_numeric_series(const ModeFunctions& modes,
                                                       const ModelParams& p) {
    p.validate();
    check_uniform_grid(modes, p);
    const double h = modes.grid[1] - modes.grid[0];
    std::vector<FluctuationMatrix> out(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        out[i].time = modes.grid[i];
    }
    if (p.g == 0.0) {
        return out;
    }
    const auto plus = channel_series(channel_samples(modes, 1.0), h, 1.0, p);
    const auto minus = channel_series(channel_samples(modes, -1.0), h, -1.0, p);
    for (std::size_t i = 1; i < modes.size(); ++i) {
        out[i].matrix = assemble_fluctuation(plus[i], minus[i]);
    }
    return out;
}

FluctuationMatrix s_matrix_numeric(double t, const ModeFunctions& modes, const ModelParams& p) {
    const std::size_t idx = modes.index_of(t);
    ModeFunctions head;
    head.grid.assign(modes.grid.begin(), modes.grid.begin() + static_cast<long>(idx) + 1);
    auto copy = [idx](const std::vector<double>& v) {
        return std::vector<double>(v.begin(), v.begin() + static_cast<long>(idx) + 1);
    };
    head.u11 = copy(modes.u11);
    head.u12 = copy(modes.u12);
    head.du11 = copy(modes.du11);
    head.du12 = copy(modes.du12);
    head.ddu11 = copy(modes.ddu11);
    head.ddu12 = copy(modes.ddu12);
    if (idx == 0) {
        p.validate();
        return FluctuationMatrix{t, Eigen::Matrix4d::Zero(), FluctuationMethod::numeric};
    }
    return s_matrix_numeric_series(head, p).back();
}

FluctuationMatrix s_matrix_wwa(double t, const PolePair& poles, const ModelParams& p) {
    p.validate();
    if (t < 0.0) {
        throw PreconditionError("s_matrix_wwa requires t >= 0");
    }
    FluctuationMatrix out;
    out.time = t;
    out.method = FluctuationMethod::wwa_analytic;
    if (t == 0.0 || p.g == 0.0) {
        return out;
    }
    out.matrix = assemble_fluctuation(wwa_channel(t, Branch::plus, poles, p),
                                      wwa_channel(t, Branch::minus, poles, p));
    return out;
}

FluctuationMatrix s_infinity(const PolePair& poles, const ModelParams& p) {
    p.validate();
    if (!(p.g > 0.0) || p.g >= 0.1) {
        throw PreconditionError("s_infinity requires 0 < g < 0.1");
    }
    FluctuationMatrix out;
    out.time = kInf;
    out.method = FluctuationMethod::asymptotic_closed_form;
    out.matrix = assemble_fluctuation(wwa_channel(kInf, Branch::plus, poles, p),
                                      wwa_channel(kInf, Branch::minus, poles, p));
    return out;
}

FluctuationMatrix s_infinity_leading_order(const PolePair& poles, const ModelParams& p) {
    p.validate();
    if (!(p.g > 0.0) || p.g >= 0.1) {
        throw PreconditionError("s_infinity_leading_order requires 0 < g < 0.1");
    }
    const double g0 = p.g;
    const double r = p.rho;
    const double gp = poles.gamma_plus;
    const double gm = poles.gamma_minus;
    const double sp = std::sin(poles.shifted_frequency(Branch::plus) * r);
    const double sm = std::sin(poles.shifted_frequency(Branch::minus) * r);
    const double dw = 0.5 * (poles.delta_omega_plus + poles.delta_omega_minus);

    const double diag = g0 * (1.0 / gp + 1.0 / gm - (sp / gp - sm / gm) / (2.0 * r));
    const double cross = g0 * (1.0 / gp - 1.0 / gm - (sp / gp + sm / gm) / (2.0 * r));
    const double xp_self = 2.0 * g0 * (dw + (sp - sm) / (4.0 * r));
    const double xp_cross = g0 * (-1.0 + (sp + sm) / (2.0 * r));

    FluctuationMatrix out;
    out.time = kInf;
    out.method = FluctuationMethod::asymptotic_closed_form;
    out.matrix << diag, cross, xp_self, xp_cross,
                  cross, diag, xp_cross, xp_self,
                  xp_self, xp_cross, diag, cross,
                  xp_cross, xp_self, cross, diag;
    return out;
}

}  // namespace udw
