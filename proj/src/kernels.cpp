// kernels.cpp — dissipation/noise kernels and their Laplace transforms
#include "udw/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "udw/errors.hpp"
#include "udw/specfun.hpp"

namespace udw {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void require_positive(double x, const char* what) {
    if (!(x > 0.0)) {
        throw DomainError(std::string(what) + " requires a positive argument");
    }
}

// Series Σ_{k≥1} x^{2k}/(k(2k−1)) = (1+x)ln(1+x) + (1−x)ln(1−x) for small x
double log_pair_series(double x) {
    const double x2 = x * x;
    double p = x2;
    double sum = 0.0;
    for (int k = 1; k < 30; ++k) {
        const double add = p / (k * (2.0 * k - 1.0));
        sum += add;
        if (add < 1e-18 * sum) {
            break;
        }
        p *= x2;
    }
    return sum;
}

// Σ_{k≥1} x^{2k+1}/(k(2k−1)(2k+1)), the small-x form of the cross second primitive
double log_pair_second_series(double x) {
    const double x2 = x * x;
    double p = x2 * x;
    double sum = 0.0;
    for (int k = 1; k < 30; ++k) {
        const double add = p / (k * (2.0 * k - 1.0) * (2.0 * k + 1.0));
        sum += add;
        if (add < 1e-18 * sum) {
            break;
        }
        p *= x2;
    }
    return sum;
}

}  // namespace

double ModelParams::coupling_sq() const {
    return 16.0 * kPi * g;
}

void ModelParams::validate() const {
    if (omega != 1.0) {
        throw PreconditionError("omega is the frequency unit and must equal 1");
    }
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw PreconditionError("coupling g must be finite and non-negative");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw PreconditionError("separation rho must be positive");
    }
    if (!(uv_cutoff > 1.0) || !std::isfinite(uv_cutoff)) {
        throw PreconditionError("uv_cutoff must exceed 1");
    }
    if (!(rho * uv_cutoff > 10.0)) {
        throw PreconditionError("rho * uv_cutoff must exceed 10 (cross kernel is left unregularized)");
    }
    if (!(ir_mass >= 0.0) || !std::isfinite(ir_mass)) {
        throw PreconditionError("ir_mass must be non-negative");
    }
    if (ir_mass > 0.0 && g > 0.0 && !(ir_mass > uv_cutoff * std::exp(-kPi / (2.0 * g)))) {
        throw PreconditionError("ir_mass must exceed uv_cutoff * exp(-pi/(2 g)) to suppress the runaway root");
    }
}

double gamma0_laplace(double z, const ModelParams& p) {
    require_positive(z, "gamma0_laplace");
    const double w = z + p.ir_mass;
    const double ratio = p.uv_cutoff / w;
    return -p.coupling_sq() / (16.0 * kPi * kPi) * std::log1p(ratio * ratio);
}

double gammar_laplace(double z, const ModelParams& p) {
    require_positive(z, "gammar_laplace");
    const double x = p.rho * z;
    const double bracket =
        specfun::exp_integral_ei_scaled(x).value + specfun::exp_integral_e1_scaled(x).value;
    return -p.coupling_sq() / (16.0 * kPi * kPi * x) * bracket;
}

AnalyticValue gamma0_laplace(std::complex<double> z, const ModelParams& p) {
    const cplx w = z + p.ir_mass;
    if (w.imag() == 0.0 && w.real() <= 0.0) {
        throw DomainError("gamma0_laplace evaluated on its branch cut");
    }
    const double lam2 = p.coupling_sq();
    const double c = -lam2 / (16.0 * kPi * kPi);
    const double L2 = p.uv_cutoff * p.uv_cutoff;
    const cplx value = c * (std::log(w * w + L2) - 2.0 * std::log(w));
    const cplx deriv = c * (2.0 * w / (w * w + L2) - 2.0 / w);
    return {value, deriv};
}

AnalyticValue gammar_laplace(std::complex<double> z, const ModelParams& p) {
    const double r = p.rho;
    const cplx w = r * z;
    const double c = -p.coupling_sq() / (16.0 * kPi * kPi * r);
    cplx x;  // e^{w} E1(w)
    cplx y;  // e^{−w} Ei(w)
    if (w.imag() == 0.0) {
        if (w.real() <= 0.0) {
            throw DomainError("gammar_laplace evaluated on its branch cut");
        }
        x = specfun::exp_integral_e1_scaled(w.real()).value;
        y = specfun::exp_integral_ei_scaled(w.real()).value;
    } else {
        x = specfun::exp_integral_e1_scaled(w);
        y = specfun::exp_integral_ei_scaled(w);
    }
    const cplx bracket = x + y;
    const cplx dbracket = r * (x - y);
    const cplx value = c * bracket / z;
    const cplx deriv = c * (dbracket / z - bracket / (z * z));
    return {value, deriv};
}

BranchCutParts branchcut_real_parts(double s, const ModelParams& p) {
    require_positive(s, "branchcut_real_parts");
    const double F = -p.coupling_sq() / (8.0 * kPi * kPi) * std::log(p.uv_cutoff / s);
    return {F, branchcut_cross_real_part(s, p)};
}

double branchcut_cross_real_part(double s, const ModelParams& p) {
    require_positive(s, "branchcut_cross_real_part");
    const double x = p.rho * s;
    // e^{−x}Shi(x) + sinh(x)E1(x), both terms positive and bounded
    const double shi_part = specfun::hyperbolic_integrals_scaled(x).shi.value;
    const double e1_part = -0.5 * std::expm1(-2.0 * x) * specfun::exp_integral_e1_scaled(x).value;
    return -p.coupling_sq() / (8.0 * kPi * kPi * x) * (shi_part + e1_part);
}

NoiseKernelValue noise_kernel(double s, const ModelParams& p) {
    const double lam2 = p.coupling_sq();
    const double r = p.rho;
    NoiseKernelValue out;
    out.self_delta_weight = lam2 / (8.0 * kPi);
    const double a = std::abs(s);
    if (a < r) {
        out.value.cross_part = lam2 / (16.0 * kPi * r);
    } else if (a == r) {
        out.value.cross_part = lam2 / (32.0 * kPi * r);
    }
    return out;
}

KernelValue gamma_time_domain(double s, const ModelParams& p) {
    if (!(s > 0.0)) {
        throw DomainError("gamma_time_domain requires s > 0");
    }
    const double r = p.rho;
    if (s == r) {
        throw DomainError("gamma_time_domain is not evaluated at s = r");
    }
    const double lam2 = p.coupling_sq();
    const double L = p.uv_cutoff;
    KernelValue k;
    // 1 − cos Λs = 2 sin²(Λs/2) avoids cancellation for small Λs
    const double half = std::sin(0.5 * L * s);
    k.self_part = -lam2 / (8.0 * kPi * kPi) * 2.0 * half * half / s;

    const double d = std::abs(r - s);
    const double sum = r + s;
    double bracket = 0.0;
    if (L * d < 2.0) {
        // Ci(Λd) − ln d = γ + ln Λ − Cin(Λd) stays finite as d → 0
        bracket = specfun::euler_gamma + std::log(L * sum) - specfun::cosine_integral_entire(L * d) -
                  specfun::cosine_integral(L * sum).value;
    } else {
        bracket = specfun::cosine_integral(L * d).value - specfun::cosine_integral(L * sum).value +
                  std::log(sum / d);
    }
    k.cross_part = -lam2 / (16.0 * kPi * kPi * r) * bracket;
    return k;
}

double gamma_cross_uncut(double s, const ModelParams& p) {
    const double r = p.rho;
    if (s == r) {
        throw DomainError("uncut cross kernel is log-singular at s = r");
    }
    return -p.coupling_sq() / (16.0 * kPi * kPi * r) * std::log((r + s) / std::abs(r - s));
}

double gamma_self_primitive(double sigma, const ModelParams& p) {
    if (sigma < 0.0) {
        throw DomainError("gamma_self_primitive requires sigma >= 0");
    }
    return -p.coupling_sq() / (8.0 * kPi * kPi) *
           specfun::cosine_integral_entire(p.uv_cutoff * sigma);
}

double gamma_cross_uncut_primitive(double sigma, const ModelParams& p) {
    if (sigma < 0.0) {
        throw DomainError("gamma_cross_uncut_primitive requires sigma >= 0");
    }
    const double r = p.rho;
    const double x = sigma / r;
    double pair = 0.0;
    if (x < 1e-2) {
        pair = log_pair_series(x);
    } else if (x == 1.0) {
        pair = 2.0 * std::log(2.0);
    } else {
        pair = (1.0 + x) * std::log1p(x) + (1.0 - x) * std::log(std::abs(1.0 - x));
    }
    return -p.coupling_sq() / (16.0 * kPi * kPi) * pair;
}

double gamma_self_second_primitive(double sigma, const ModelParams& p) {
    if (sigma < 0.0) {
        throw DomainError("gamma_self_second_primitive requires sigma >= 0");
    }
    // ∫₀^Y Cin(y) dy = Y Cin(Y) − Y + sin Y
    const double L = p.uv_cutoff;
    const double Y = L * sigma;
    double inner = 0.0;
    if (Y < 1e-2) {
        inner = Y * Y * Y / 12.0;
    } else {
        inner = Y * specfun::cosine_integral_entire(Y) - Y + std::sin(Y);
    }
    return -p.coupling_sq() / (8.0 * kPi * kPi * L) * inner;
}

double gamma_cross_uncut_second_primitive(double sigma, const ModelParams& p) {
    if (sigma < 0.0) {
        throw DomainError("gamma_cross_uncut_second_primitive requires sigma >= 0");
    }
    // r² H(σ/r) with H(X) = ½[(1+X)² ln(1+X) − (1−X)² ln|1−X|] − X
    const double r = p.rho;
    const double x = sigma / r;
    double H = 0.0;
    if (x < 1e-2) {
        H = log_pair_second_series(x);
    } else {
        const double a = (1.0 + x) * (1.0 + x) * std::log1p(x);
        const double d = std::abs(1.0 - x);
        const double b = (d == 0.0) ? 0.0 : (1.0 - x) * (1.0 - x) * std::log(d);
        H = 0.5 * (a - b) - x;
    }
    return -p.coupling_sq() / (16.0 * kPi * kPi) * r * H;
}

}  // namespace udw
