// propagator.cpp — pole refinement, branch-cut quadrature and mode-function assembly
#include "udw/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "udw/errors.hpp"
#include "udw/quadrature.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Newton settings for the pole equation
constexpr int kMaxNewton = 50;
constexpr double kPoleResidualTol = 1e-12;

// Cut integrals are truncated where e^{−st} drops below e^{−kExpCut}
constexpr double kExpCut = 46.0;

// sinh(x)/x − 1 without cancellation for small x
double sinhc_minus_one(double x) {
    if (x < 0.1) {
        const double x2 = x * x;
        return x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)));
    }
    return std::sinh(x) / x - 1.0;
}

// Imaginary-part factor N(s) = θ(s − μ) ± sinh(rs)/(rs) for rs <= 30
double cut_numerator(double s, Branch b, const ModelParams& p) {
    const double x = p.rho * s;
    const double theta = (s > p.ir_mass) ? 1.0 : 0.0;
    const double sigma = branch_sign(b);
    if (theta == 1.0) {
        return sigma > 0 ? 2.0 + sinhc_minus_one(x) : -sinhc_minus_one(x);
    }
    return sigma * (1.0 + sinhc_minus_one(x));
}

// Real part of A(−s + i0): s² + Ω² + 2 Re γ̃₀ ± 2G
double cut_real_part(double s, Branch b, const ModelParams& p) {
    const double lam2 = p.coupling_sq();
    const double w = s - p.ir_mass;
    double re0 = 0.0;
    if (w != 0.0) {
        const double ratio = p.uv_cutoff / w;
        re0 = -lam2 / (16.0 * kPi * kPi) * std::log1p(ratio * ratio);
    }
    return s * s + 1.0 + 2.0 * re0 + 2.0 * branch_sign(b) * branchcut_cross_real_part(s, p);
}

// Crossover where the imaginary part (λ²/4π)|N| overtakes s² + Ω²; 0 when absent
double cut_crossover(Branch b, const ModelParams& p) {
    const double c = p.coupling_sq() / (4.0 * kPi);
    if (c == 0.0) {
        return 0.0;
    }
    auto excess = [&](double ls) {
        const double s = std::exp(ls);
        const double x = p.rho * s;
        // log|b| − log(s² + 1), with log sinh(x)/x evaluated without overflow
        double log_n = 0.0;
        if (x > 30.0) {
            log_n = x - std::log(2.0 * x);
        } else {
            log_n = std::log(std::max(std::abs(cut_numerator(s, b, p)), 1e-300));
        }
        return std::log(c) + log_n - std::log1p(s * s);
    };
    double lo = std::log(1e-6);
    double hi = std::log(1e8);
    if (excess(lo) > 0.0 || excess(hi) < 0.0) {
        return 0.0;
    }
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

// Scan upward for the point where s^2 e^{−s t} |w(s)| is negligible
double cut_upper_limit(Branch b, const ModelParams& p, double t, double s_from) {
    const double scale = p.coupling_sq() / (4.0 * kPi * kPi);
    double s = std::max(1.0, s_from);
    int quiet = 0;
    for (int i = 0; i < 400; ++i) {
        const double env = s * s * std::exp(-s * t) * std::abs(branch_cut_weight(s, b, p));
        if (env < 1e-19 * scale && s * t > 1.0) {
            if (++quiet == 2) {
                return s;
            }
        } else if (env < 1e-19 * scale && t == 0.0 && p.rho * s > 80.0) {
            if (++quiet == 2) {
                return s;
            }
        } else {
            quiet = 0;
        }
        s *= 1.5;
    }
    return s;
}

// Perturbative pole data for one channel
void perturbative_pole(const ModelParams& p, double& gamma_p, double& gamma_m, double& dw_p,
                       double& dw_m) {
    const double rho = p.rho;
    const double sinc = std::sin(rho) / rho;
    gamma_p = p.g * (1.0 + sinc);
    gamma_m = p.g * (1.0 - sinc);
    const specfun::SinCosIntegrals sc = specfun::sin_cos_integrals(rho);
    const double cross = (std::cos(rho) * sc.si.value - std::sin(rho) * sc.ci.value) / rho;
    const double pref = p.coupling_sq() / (8.0 * kPi * kPi);
    dw_p = -pref * (std::log(p.uv_cutoff) + cross);
    dw_m = -pref * (std::log(p.uv_cutoff) - cross);
}

// Damped Newton iteration on A(z) = 0 from the seed; residual >= tolerance on failure
cplx refine_pole(cplx z, Branch b, const ModelParams& p, double& residual, int& iterations) {
    AnalyticValue a = pole_equation(z, b, p);
    double res = std::abs(a.value);
    int it = 0;
    while (res >= kPoleResidualTol && it < kMaxNewton) {
        const cplx step = -a.value / a.derivative;
        double damping = 1.0;
        cplx trial = z + step;
        AnalyticValue at = pole_equation(trial, b, p);
        // Halve the step until the residual decreases
        for (int k = 0; k < 30 && !(std::abs(at.value) < res); ++k) {
            damping *= 0.5;
            trial = z + damping * step;
            at = pole_equation(trial, b, p);
        }
        z = trial;
        a = at;
        res = std::abs(a.value);
        ++it;
        if (damping < 1e-8) {
            break;
        }
    }
    residual = res;
    iterations = it;
    return z;
}

// A(x) on the positive real axis in terms of y = ln x (x itself may underflow)
double pole_equation_real_log(double y, Branch b, const ModelParams& p) {
    const double lam2 = p.coupling_sq();
    const double x = std::exp(y);
    double g0 = 0.0;
    if (p.ir_mass > 0.0) {
        const double ratio = p.uv_cutoff / (x + p.ir_mass);
        g0 = -lam2 / (16.0 * kPi * kPi) * std::log1p(ratio * ratio);
    } else {
        const double lnL = std::log(p.uv_cutoff);
        g0 = -lam2 / (16.0 * kPi * kPi) * (2.0 * (lnL - y) + std::log1p(std::exp(2.0 * (y - lnL))));
    }
    double gr = 0.0;
    if (p.rho * x > 1e-8) {
        gr = gammar_laplace(x, p);
    } else {
        // Small-argument limit −(λ²/8π²)(1 − γ − ln(r x))
        gr = -lam2 / (8.0 * kPi * kPi) * (1.0 - specfun::euler_gamma - std::log(p.rho) - y);
    }
    return x * x + 1.0 + 2.0 * g0 + 2.0 * branch_sign(b) * gr;
}

RunawayRoot find_runaway(Branch b, const ModelParams& p) {
    RunawayRoot out;
    if (p.g == 0.0) {
        return out;
    }
    double hi = std::log(0.5);
    double lo = -1e6;
    if (pole_equation_real_log(hi, b, p) <= 0.0 || pole_equation_real_log(lo, b, p) > 0.0) {
        return out;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pole_equation_real_log(mid, b, p) > 0.0 ? hi : lo) = mid;
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(mid))) {
            break;
        }
    }
    out.found = true;
    out.log_location = 0.5 * (lo + hi);
    return out;
}

}  // namespace

std::size_t ModeFunctions::index_of(double t) const {
    const auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-9 * std::max(1.0, std::abs(t)));
    if (it == grid.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw PreconditionError("time " + std::to_string(t) + " is not on the evaluation grid");
    }
    return static_cast<std::size_t>(it - grid.begin());
}

AnalyticValue pole_equation(std::complex<double> z, Branch b, const ModelParams& p) {
    const AnalyticValue g0 = gamma0_laplace(z, p);
    const AnalyticValue gr = gammar_laplace(z, p);
    const double sigma = branch_sign(b);
    return {z * z + 1.0 + 2.0 * g0.value + 2.0 * sigma * gr.value,
            2.0 * z + 2.0 * g0.derivative + 2.0 * sigma * gr.derivative};
}

PolePair find_poles(const ModelParams& p, bool require_damped) {
    p.validate();
    if (!p.weak_coupling()) {
        throw PreconditionError("perturbative pole seeds require g <= 0.1");
    }
    PolePair out;
    perturbative_pole(p, out.gamma_plus, out.gamma_minus, out.delta_omega_plus,
                      out.delta_omega_minus);
    if (p.g == 0.0) {
        out.refined_plus = out.refined_minus = cplx(0.0, 1.0);
        out.residue_plus = out.residue_minus = cplx(0.0, -0.5);
        return out;
    }
    // Near the seed A ≈ B + E e^{−ρz} with |E| ≈ λ²/(8πρ); the damped root survives
    // while that perturbation, grown by e^{ρΓ}, stays small against the ≈ 2π/ρ spacing
    // of the retardation zeros
    const double damped_limit = 0.5 * std::log(8.0 * kPi * kPi / p.coupling_sq());
    for (Branch b : {Branch::plus, Branch::minus}) {
        const cplx seed(-out.gamma(b), 1.0 + out.delta_omega(b));
        double residual = 0.0;
        int iterations = 0;
        bool damped = p.rho * out.gamma(b) < damped_limit;
        cplx z = seed;
        cplx residue = 0.0;
        if (damped) {
            z = refine_pole(seed, b, p, residual, iterations);
            if (!(residual < kPoleResidualTol)) {
                throw NumericalError("pole refinement did not converge (residual " +
                                     std::to_string(residual) + ")");
            }
            if (!(z.real() < 0.0) || !(z.imag() > 0.0)) {
                throw NumericalError("refined pole left the upper-left quadrant");
            }
            residue = 1.0 / pole_equation(z, b, p).derivative;
        } else if (require_damped) {
            throw NumericalError("no damped pole: retardation zeros dominate at rho*Gamma = " +
                                 std::to_string(p.rho * out.gamma(b)));
        }
        if (b == Branch::plus) {
            out.refined_plus = z;
            out.residue_plus = residue;
            out.residual_plus = residual;
            out.iterations_plus = iterations;
            out.runaway_plus = find_runaway(b, p);
            out.damped_plus = damped;
        } else {
            out.refined_minus = z;
            out.residue_minus = residue;
            out.residual_minus = residual;
            out.iterations_minus = iterations;
            out.runaway_minus = find_runaway(b, p);
            out.damped_minus = damped;
        }
    }
    return out;
}

Jet pole_term(double t, Branch b, const PolePair& poles) {
    if (t < 0.0) {
        throw PreconditionError("pole_term requires t >= 0");
    }
    const double w = poles.shifted_frequency(b);
    const cplx beta(-poles.gamma(b), w);
    const cplx e = std::exp(beta * t);
    return {e.imag() / w, (beta * e).imag() / w, (beta * beta * e).imag() / w};
}

Jet pole_term_refined(double t, Branch b, const PolePair& poles) {
    if (t < 0.0) {
        throw PreconditionError("pole_term_refined requires t >= 0");
    }
    const cplx z = poles.refined(b);
    const cplx a = poles.residue(b) * std::exp(z * t);
    return {2.0 * a.real(), 2.0 * (z * a).real(), 2.0 * (z * z * a).real()};
}

double branch_cut_weight(double s, Branch b, const ModelParams& p) {
    if (!(s > 0.0)) {
        throw DomainError("branch_cut_weight requires s > 0");
    }
    const double c = p.coupling_sq() / (4.0 * kPi);
    if (c == 0.0) {
        return 0.0;
    }
    const double a = cut_real_part(s, b, p);
    const double x = p.rho * s;
    if (x <= 30.0) {
        const double bb = c * cut_numerator(s, b, p);
        return bb / (kPi * (a * a + bb * bb));
    }
    // Large rs: N ≈ ±e^{x}/(2x); use 1/N = 2x e^{−x}/(2xθe^{−x} ± (1 − e^{−2x}))
    const double theta = (s > p.ir_mass) ? 1.0 : 0.0;
    const double em = std::exp(-x);
    const double inv_n = 2.0 * x * em / (2.0 * x * theta * em - branch_sign(b) * std::expm1(-2.0 * x));
    const double inv_b = inv_n / c;
    const double ratio = a * inv_b;
    return inv_b / (kPi * (1.0 + ratio * ratio));
}

double branch_cut_asymptote(double t, Branch b, const ModelParams& p) {
    const double r = p.rho;
    if (!(t > r)) {
        throw PreconditionError("branch_cut_asymptote requires t > r");
    }
    const double pref = p.coupling_sq() / (4.0 * kPi * kPi);
    return pref * (1.0 / t + branch_sign(b) * std::atanh(r / t) / r);
}

Jet branch_cut_term(double t, Branch b, const ModelParams& p, CutMode mode) {
    if (!(t > 0.0)) {
        throw PreconditionError("branch_cut_term requires t > 0");
    }
    const double r = p.rho;
    if (mode == CutMode::fast && !(t > r)) {
        throw PreconditionError("fast branch-cut mode requires t > r");
    }
    if (p.g == 0.0) {
        return {};
    }
    const double lam2 = p.coupling_sq();
    const double sigma = branch_sign(b);
    using V3 = quad::Vec<3>;

    auto full = [&](double s) -> V3 {
        if (s <= 0.0) {
            return V3::Zero();
        }
        const double v = std::exp(-s * t) * branch_cut_weight(s, b, p);
        return V3(v, -s * v, s * s * v);
    };
    auto fast = [&](double s) -> V3 {
        if (s <= 0.0) {
            return V3::Zero();
        }
        const double x = r * s;
        double ex = 0.0;  // e^{−st} N(s) without forming e^{rs}
        if (x < 0.1) {
            const double rest = sinhc_minus_one(x);
            ex = std::exp(-s * t) * (sigma > 0 ? 2.0 + rest : -rest);
        } else {
            ex = std::exp(-s * t) + sigma * (std::exp(-(t - r) * s) - std::exp(-(t + r) * s)) / (2.0 * x);
        }
        const double d = s * s + 1.0;
        const double v = lam2 / (4.0 * kPi * kPi) * ex / (d * d);
        return V3(v, -s * v, s * s * v);
    };

    // Partition: decades near the origin plus the physical scales 1/t, 1/r, 1 and s*
    const double s_star = cut_crossover(b, p);
    const double t_eff = (mode == CutMode::fast) ? (t - r) : t;
    const double s_end = (mode == CutMode::fast)
                             ? std::max(1.0, kExpCut / t_eff) * 1.5
                             : cut_upper_limit(b, p, t, std::max(s_star, 1.0 / t));
    std::vector<double> breaks{0.0};
    for (double s = 1e-12; s < s_end; s *= 10.0) {
        breaks.push_back(s);
    }
    for (double s : {1.0 / t, 10.0 / t, 1.0 / r, 1.0, s_star, p.ir_mass, s_end}) {
        if (s > 0.0 && s <= s_end) {
            breaks.push_back(s);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    quad::Result<3> res = (mode == CutMode::full)
                              ? quad::integrate<3>(full, breaks, 1e-14, 1e-12, 8000)
                              : quad::integrate<3>(fast, breaks, 1e-14, 1e-12, 8000);
    if (!res.converged && res.abs_error > 1e-10) {
        throw NumericalError("branch-cut quadrature did not converge at t = " + std::to_string(t));
    }
    return {res.value(0), res.value(1), res.value(2)};
}

CutQuadrature::CutQuadrature(Branch b, const ModelParams& p, double t_min, double split) {
    if (!(t_min > 0.0)) {
        throw PreconditionError("CutQuadrature requires t_min > 0");
    }
    if (p.g == 0.0) {
        return;
    }
    const double r = p.rho;
    const double s_star = cut_crossover(b, p);
    const double s_hi = cut_upper_limit(b, p, t_min, std::max(s_star, 1.0 / t_min));

    // Geometric panels from 1e-12 upward, refined so no panel is wider than 1/r
    std::vector<double> breaks{0.0};
    for (double s = 1e-12; s < s_hi; s *= 2.0) {
        breaks.push_back(s);
    }
    for (double s : {1.0 / r, 1.0, s_star, p.ir_mass, split, s_hi}) {
        if (s > 0.0 && s <= s_hi) {
            breaks.push_back(s);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // The weight varies on the scale 1/r up to ~60/r beyond the crossover; past that
    // it decays like e^{−rs} and geometric panels suffice
    const quad::GaussLegendre gl = quad::gauss_legendre(24);
    const double max_width = 1.0 / r;
    const double s_wide = s_star + 60.0 / r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double bnd = breaks[i + 1];
        const double span = std::min(bnd, s_wide) - a;
        const int pieces = span > 0.0 ? std::max(1, static_cast<int>(std::ceil(span / max_width))) : 1;
        const double width = (bnd - a) / pieces;
        for (int k = 0; k < pieces; ++k) {
            const double lo = a + k * width;
            const double c = lo + 0.5 * width;
            for (std::size_t j = 0; j < gl.x.size(); ++j) {
                const double s = c + 0.5 * width * gl.x[j];
                const double wt = 0.5 * width * gl.w[j] * branch_cut_weight(s, b, p);
                s_.push_back(s);
                w_.push_back(wt);
            }
        }
    }
}

Jet CutQuadrature::evaluate(double t) const {
    Jet out;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        const double st = s_[i] * t;
        if (st > kExpCut) {
            break;  // nodes are sorted, the rest is below e^{−46}
        }
        const double v = w_[i] * std::exp(-st);
        out.value += v;
        out.d1 -= s_[i] * v;
        out.d2 += s_[i] * s_[i] * v;
    }
    return out;
}

std::pair<Jet, Jet> CutQuadrature::evaluate_split(double t, double split) const {
    Jet lo;
    Jet hi;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        const double st = s_[i] * t;
        if (st > kExpCut) {
            break;
        }
        const double v = w_[i] * std::exp(-st);
        Jet& dst = (s_[i] < split) ? lo : hi;
        dst.value += v;
        dst.d1 -= s_[i] * v;
        dst.d2 += s_[i] * s_[i] * v;
    }
    return {lo, hi};
}

ModeFunctions mode_functions(const std::vector<double>& grid, const ModelParams& p) {
    p.validate();
    if (grid.empty()) {
        throw PreconditionError("mode_functions requires a non-empty grid");
    }
    if (grid.front() < 0.0) {
        throw PreconditionError("grid must start at t >= 0");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw PreconditionError("grid must be strictly increasing");
        }
    }
    const PolePair poles = find_poles(p, false);
    ModeFunctions m;
    m.grid = grid;
    const std::size_t n = grid.size();
    m.pole_plus.resize(n);
    m.pole_minus.resize(n);
    m.cut_plus.resize(n);
    m.cut_minus.resize(n);
    m.delay_plus.resize(n);
    m.delay_minus.resize(n);

    const auto first_positive = std::find_if(grid.begin(), grid.end(), [](double t) { return t > 0.0; });
    const bool coupled = first_positive != grid.end() && p.g > 0.0;

    for (Branch b : {Branch::plus, Branch::minus}) {
        auto& pole = (b == Branch::plus) ? m.pole_plus : m.pole_minus;
        auto& cut = (b == Branch::plus) ? m.cut_plus : m.cut_minus;
        auto& delay = (b == Branch::plus) ? m.delay_plus : m.delay_minus;
        std::optional<DelayContour> contour;
        std::optional<CutQuadrature> quad;
        if (coupled) {
            contour.emplace(b, p, poles);
            quad.emplace(b, p, *first_positive, contour->kappa());
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double t = grid[i];
            pole[i] = pole_term_refined(t, b, poles);
            if (t == 0.0) {
                // Exact initial data f(0) = 0, ḟ(0) = 1, f̈(0) = 0 fixes the cut part at t = 0
                cut[i] = {-pole[i].value, 1.0 - pole[i].d1, -pole[i].d2};
                continue;
            }
            if (!quad) {
                continue;
            }
            const auto [below, above] = quad->evaluate_split(t, contour->kappa());
            cut[i] = {below.value + above.value, below.d1 + above.d1, below.d2 + above.d2};
            // f = residues right of the line + cut below κ + line integral
            const Jet line = contour->line_integral(t);
            Jet& d = delay[i];
            d = {line.value - above.value, line.d1 - above.d1, line.d2 - above.d2};
            if (!contour->pole_separate()) {
                d.value -= pole[i].value;
                d.d1 -= pole[i].d1;
                d.d2 -= pole[i].d2;
            }
        }
    }

    m.u11.resize(n);
    m.u12.resize(n);
    m.du11.resize(n);
    m.du12.resize(n);
    m.ddu11.resize(n);
    m.ddu12.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Jet& pp = m.pole_plus[i];
        const Jet& pm = m.pole_minus[i];
        const Jet& cp = m.cut_plus[i];
        const Jet& cm = m.cut_minus[i];
        const Jet& dp = m.delay_plus[i];
        const Jet& dm = m.delay_minus[i];
        const double fp = pp.value + cp.value + dp.value;
        const double fm = pm.value + cm.value + dm.value;
        const double dfp = pp.d1 + cp.d1 + dp.d1;
        const double dfm = pm.d1 + cm.d1 + dm.d1;
        const double ddfp = pp.d2 + cp.d2 + dp.d2;
        const double ddfm = pm.d2 + cm.d2 + dm.d2;
        m.u11[i] = 0.5 * (fp + fm);
        m.u12[i] = 0.5 * (fp - fm);
        m.du11[i] = 0.5 * (dfp + dfm);
        m.du12[i] = 0.5 * (dfp - dfm);
        m.ddu11[i] = 0.5 * (ddfp + ddfm);
        m.ddu12[i] = 0.5 * (ddfp - ddfm);
    }
    return m;
}

Eigen::Matrix4d r_matrix_at(std::size_t i, const ModeFunctions& modes) {
    if (i >= modes.size()) {
        throw PreconditionError("r_matrix index out of range");
    }
    Eigen::Matrix2d u;
    Eigen::Matrix2d du;
    Eigen::Matrix2d ddu;
    u << modes.u11[i], modes.u12[i], modes.u12[i], modes.u11[i];
    du << modes.du11[i], modes.du12[i], modes.du12[i], modes.du11[i];
    ddu << modes.ddu11[i], modes.ddu12[i], modes.ddu12[i], modes.ddu11[i];
    Eigen::Matrix4d R;
    R.topLeftCorner<2, 2>() = du;
    R.topRightCorner<2, 2>() = u;
    R.bottomLeftCorner<2, 2>() = ddu;
    R.bottomRightCorner<2, 2>() = du;
    return R;
}

Eigen::Matrix4d r_matrix(double t, const ModeFunctions& modes) {
    return r_matrix_at(modes.index_of(t), modes);
}

WwaRatioSeries wwa_ratio(const std::vector<double>& grid, const ModelParams& p) {
    const ModeFunctions modes = mode_functions(grid, p);
    const PolePair poles = find_poles(p);
    WwaRatioSeries out;
    out.time = grid;
    const std::size_t n = grid.size();
    out.u12_pole.resize(n);
    out.u12_full = modes.u12;
    out.ratio.resize(n);
    out.reliable.resize(n);
    double peak = 0.0;
    for (double v : modes.u12) {
        peak = std::max(peak, std::abs(v));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double fp = pole_term(grid[i], Branch::plus, poles).value;
        const double fm = pole_term(grid[i], Branch::minus, poles).value;
        out.u12_pole[i] = 0.5 * (fp - fm);
        const double full = out.u12_full[i];
        out.reliable[i] = peak > 0.0 && std::abs(full) >= 1e-3 * peak;
        out.ratio[i] = out.reliable[i] ? out.u12_pole[i] / full
                                       : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

double homogeneous_residual(const ModeFunctions& modes, const ModelParams& p) {
    const std::size_t n = modes.size();
    if (n < 3 || modes.grid.front() != 0.0) {
        throw PreconditionError("homogeneous_residual requires a grid starting at 0");
    }
    const double h = modes.grid[1] - modes.grid[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(modes.grid[i] - i * h) > 1e-9 * std::max(1.0, modes.grid[i])) {
            throw PreconditionError("homogeneous_residual requires a uniform grid");
        }
    }
    // Second primitives of γ₀ and γ_r sampled on the grid
    std::vector<double> k0(n);
    std::vector<double> kr(n);
    for (std::size_t i = 0; i < n; ++i) {
        k0[i] = gamma_self_second_primitive(modes.grid[i], p);
        kr[i] = gamma_cross_uncut_second_primitive(modes.grid[i], p);
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(modes.ddu11[i]), std::abs(modes.ddu12[i])});
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        // ∫₀ᵗ γ(σ)u(t−σ)dσ = K₂(t)u̇(0) + ∫₀ᵗ K₂(σ)ü(t−σ)dσ, trapezoid in σ
        double c11 = 0.0;
        double c12 = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            const double wt = (j == 0 || j == i) ? 0.5 * h : h;
            const std::size_t k = i - j;
            c11 += wt * (k0[j] * modes.ddu11[k] + kr[j] * modes.ddu12[k]);
            c12 += wt * (k0[j] * modes.ddu12[k] + kr[j] * modes.ddu11[k]);
        }
        c11 += k0[i];
        c12 += kr[i];
        const double r11 = modes.ddu11[i] + modes.u11[i] + 2.0 * c11;
        const double r12 = modes.ddu12[i] + modes.u12[i] + 2.0 * c12;
        worst = std::max({worst, std::abs(r11), std::abs(r12)});
    }
    return scale > 0.0 ? worst / scale : worst;
}

}  // namespace udw
