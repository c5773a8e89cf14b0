// specfun.hpp — exponential, sine/cosine and hyperbolic integrals
#pragma once

#include <complex>

namespace udw::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Function value with an absolute error estimate
struct SpecialValue {
    double value = 0.0;               // function value
    double abs_error_estimate = 0.0;  // absolute error estimate (>= 0)
};

struct SinCosIntegrals {
    SpecialValue si;  // Si(x) = ∫₀ˣ sin t / t dt
    SpecialValue ci;  // Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt
};

struct HyperbolicIntegrals {
    SpecialValue shi;  // Shi(x) = ∫₀ˣ sinh t / t dt
    SpecialValue chi;  // Chi(x) = γ + ln x + ∫₀ˣ (cosh t − 1)/t dt
};

// Ei(x) = γ + ln|x| + Σ xⁿ/(n n!), principal value for x < 0.
// Throws DomainError at x = 0 and OverflowError when e^x is not representable.
SpecialValue exp_integral_ei(double x);

// e^{-x} Ei(x), finite for all x != 0
SpecialValue exp_integral_ei_scaled(double x);

// E1(x) = ∫ₓ^∞ e^{-t}/t dt for x > 0
SpecialValue exp_integral_e1(double x);

// e^{x} E1(x) for x > 0
SpecialValue exp_integral_e1_scaled(double x);

// Si(x) for any real x (odd function)
SpecialValue sine_integral(double x);

// Ci(x) for x > 0
SpecialValue cosine_integral(double x);

// Si and Ci together; x > 0 (Ci is singular at the origin)
SinCosIntegrals sin_cos_integrals(double x);

// Cin(x) = ∫₀ˣ (1 − cos t)/t dt = γ + ln x − Ci(x), entire; x >= 0
double cosine_integral_entire(double x);

// Shi(x) for any real x (odd function)
SpecialValue hyperbolic_sine_integral(double x);

// Shi and Chi together for x > 0; throws OverflowError when e^x overflows
HyperbolicIntegrals hyperbolic_integrals(double x);

// e^{-x} Shi(x) and e^{-x} Chi(x) for x > 0, finite for all x
HyperbolicIntegrals hyperbolic_integrals_scaled(double x);

// e^{z} E1(z) for complex z off the negative real axis (principal branch)
std::complex<double> exp_integral_e1_scaled(std::complex<double> z);

// e^{−w} Ei(w) for complex w off the negative real axis, Ei(w) = −E1(−w) ± iπ
// with the sign of Im w
std::complex<double> exp_integral_ei_scaled(std::complex<double> w);

}  // namespace udw::specfun
