// specfun.cpp — special functions backed by GSL with scaled forms and domain checks
#include "udw/specfun.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <limits>
#include <mutex>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include "udw/errors.hpp"

namespace udw::specfun {

namespace {

// Above this argument e^x overflows a double
constexpr double kExpOverflow = 709.782712893384;

// Scaled Shi/Chi switch from direct evaluation to the Ei/E1 route here
constexpr double kScaledCrossover = 30.0;

using cplx = std::complex<double>;

// e^{−u} Ei(u) for u in the sector Re u > |u|/2, |u| >= 4 (principal logarithm)
cplx ei_scaled_sector(cplx u) {
    const double au = std::abs(u);
    if (au >= 40.0) {
        // Asymptotic series (1/u) Σ k!/u^k truncated at the smallest term
        cplx term = 1.0;
        cplx sum = 1.0;
        double prev = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= static_cast<double>(k) / u;
            const double mag = std::abs(term);
            if (mag > prev || mag < 1e-17) {
                break;
            }
            sum += term;
            prev = mag;
        }
        const cplx ln_jump = std::log(u) - std::log(-u);  // ±iπ off the real axis, 0 on it
        const cplx jump = (u.imag() == 0.0) ? cplx(0.0) : ln_jump;
        return sum / u + jump * std::exp(-u);
    }
    // Power series; all terms share roughly the phase of u^n, so cancellation is bounded
    cplx term = 1.0;
    cplx sum = 0.0;
    for (int n = 1; n < 400; ++n) {
        term *= u / static_cast<double>(n);
        const cplx add = term / static_cast<double>(n);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return std::exp(-u) * (euler_gamma + std::log(u) + sum);
}

// GSL aborts on error by default; status codes are checked explicitly instead
void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

// Convert a GSL status into an exception naming the failing function
SpecialValue checked(int status, const gsl_sf_result& r, const char* name, double x) {
    if (status == GSL_SUCCESS) {
        return {r.val, std::abs(r.err)};
    }
    const std::string where = std::string(name) + "(" + std::to_string(x) + ")";
    if (status == GSL_EOVRFLW) {
        throw OverflowError(where + " overflows double precision");
    }
    if (status == GSL_EDOM) {
        throw DomainError(where + " is outside the domain");
    }
    if (status == GSL_EUNDRFLW) {
        return {0.0, std::numeric_limits<double>::min()};
    }
    throw NumericalError(where + " failed: " + gsl_strerror(status));
}

}  // namespace

SpecialValue exp_integral_ei(double x) {
    disable_gsl_abort();
    if (x == 0.0) {
        throw DomainError("Ei(0) is singular");
    }
    if (x > kExpOverflow) {
        throw OverflowError("Ei(" + std::to_string(x) + ") overflows; use exp_integral_ei_scaled");
    }
    gsl_sf_result r;
    return checked(gsl_sf_expint_Ei_e(x, &r), r, "Ei", x);
}

SpecialValue exp_integral_ei_scaled(double x) {
    disable_gsl_abort();
    if (x == 0.0) {
        throw DomainError("Ei(0) is singular");
    }
    gsl_sf_result r;
    return checked(gsl_sf_expint_Ei_scaled_e(x, &r), r, "Ei_scaled", x);
}

SpecialValue exp_integral_e1(double x) {
    disable_gsl_abort();
    if (!(x > 0.0)) {
        throw DomainError("E1 requires x > 0");
    }
    gsl_sf_result r;
    return checked(gsl_sf_expint_E1_e(x, &r), r, "E1", x);
}

SpecialValue exp_integral_e1_scaled(double x) {
    disable_gsl_abort();
    if (!(x > 0.0)) {
        throw DomainError("E1 requires x > 0");
    }
    gsl_sf_result r;
    return checked(gsl_sf_expint_E1_scaled_e(x, &r), r, "E1_scaled", x);
}

SpecialValue sine_integral(double x) {
    disable_gsl_abort();
    gsl_sf_result r;
    return checked(gsl_sf_Si_e(x, &r), r, "Si", x);
}

SpecialValue cosine_integral(double x) {
    disable_gsl_abort();
    if (!(x > 0.0)) {
        throw DomainError("Ci requires x > 0");
    }
    gsl_sf_result r;
    return checked(gsl_sf_Ci_e(x, &r), r, "Ci", x);
}

SinCosIntegrals sin_cos_integrals(double x) {
    if (!(x > 0.0)) {
        throw DomainError("Ci requires x > 0");
    }
    return {sine_integral(x), cosine_integral(x)};
}

double cosine_integral_entire(double x) {
    if (x < 0.0) {
        throw DomainError("Cin requires x >= 0");
    }
    if (x <= 2.0) {
        // Alternating series Σ (−1)^{k+1} x^{2k} / (2k (2k)!), no cancellation for x <= 2
        const double x2 = x * x;
        double term = 1.0;  // x^{2k}/(2k)!
        double sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            term *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
            const double add = term / (2.0 * k);
            sum += (k % 2 == 1) ? add : -add;
            if (add < 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }
    return euler_gamma + std::log(x) - cosine_integral(x).value;
}

SpecialValue hyperbolic_sine_integral(double x) {
    disable_gsl_abort();
    if (std::abs(x) > kExpOverflow) {
        throw OverflowError("Shi(" + std::to_string(x) + ") overflows; use the scaled form");
    }
    gsl_sf_result r;
    return checked(gsl_sf_Shi_e(x, &r), r, "Shi", x);
}

HyperbolicIntegrals hyperbolic_integrals(double x) {
    disable_gsl_abort();
    if (!(x > 0.0)) {
        throw DomainError("Chi requires x > 0");
    }
    if (x > kExpOverflow) {
        throw OverflowError("Shi/Chi(" + std::to_string(x) + ") overflow; use the scaled form");
    }
    gsl_sf_result rs;
    gsl_sf_result rc;
    const SpecialValue shi = checked(gsl_sf_Shi_e(x, &rs), rs, "Shi", x);
    const SpecialValue chi = checked(gsl_sf_Chi_e(x, &rc), rc, "Chi", x);
    return {shi, chi};
}

HyperbolicIntegrals hyperbolic_integrals_scaled(double x) {
    if (!(x > 0.0)) {
        throw DomainError("Chi requires x > 0");
    }
    if (x <= kScaledCrossover) {
        const HyperbolicIntegrals h = hyperbolic_integrals(x);
        const double ex = std::exp(-x);
        return {{h.shi.value * ex, h.shi.abs_error_estimate * ex},
                {h.chi.value * ex, h.chi.abs_error_estimate * ex}};
    }
    // Shi = (Ei + E1)/2 and Chi = (Ei − E1)/2; here E1 is negligible next to Ei
    const SpecialValue ei = exp_integral_ei_scaled(x);
    const SpecialValue e1 = exp_integral_e1_scaled(x);
    const double e1_part = std::exp(-2.0 * x) * e1.value;
    const double err = 0.5 * (ei.abs_error_estimate + std::exp(-2.0 * x) * e1.abs_error_estimate);
    return {{0.5 * (ei.value + e1_part), err}, {0.5 * (ei.value - e1_part), err}};
}

// e^{z} E1(z) for complex z off the negative real axis
std::complex<double> exp_integral_e1_scaled(std::complex<double> z) {
    const double az = std::abs(z);
    if (az == 0.0) {
        throw DomainError("E1(0) is singular");
    }
    if (az < 4.0) {
        // E1(z) = −γ − ln z − Σ (−z)ⁿ/(n n!)
        cplx term = 1.0;
        cplx sum = 0.0;
        for (int n = 1; n < 200; ++n) {
            term *= -z / static_cast<double>(n);
            const cplx add = term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-17 * std::max(1.0, std::abs(sum))) {
                break;
            }
        }
        return std::exp(z) * (-euler_gamma - std::log(z) - sum);
    }
    if (z.real() < -0.5 * az) {
        // Near the negative real axis: E1(z) = −Ei(−z) + ln(−z) − ln z
        return -ei_scaled_sector(-z) + std::exp(z) * (std::log(-z) - std::log(z));
    }
    // Continued fraction e^{z}E1(z) = 1/(z+1− 1²/(z+3− 2²/(z+5− ...))), modified Lentz
    const double tiny = 1e-300;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int n = 1; n < 5000; ++n) {
        const double a = -static_cast<double>(n) * n;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            return h;
        }
    }
    throw NumericalError("complex E1 continued fraction did not converge");
}

// e^{−w} Ei(w) for complex w off the negative real axis
std::complex<double> exp_integral_ei_scaled(std::complex<double> w) {
    if (std::abs(w) >= 4.0 && w.real() > 0.5 * std::abs(w)) {
        return ei_scaled_sector(w);
    }
    // Ei(w) = −E1(−w) ± iπ with the sign of Im w
    const double sgn = w.imag() > 0.0 ? 1.0 : -1.0;
    return -exp_integral_e1_scaled(-w) + cplx(0.0, sgn * std::numbers::pi) * std::exp(-w);
}

}  // namespace udw::specfun
