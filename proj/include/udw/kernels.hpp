// kernels.hpp — dissipation and noise kernels of two detectors in a massless scalar vacuum
#pragma once

#include <complex>

namespace udw {

// Dimensionless model configuration; frequencies in units of Ω, times in units of 1/Ω
struct ModelParams {
    double omega = 1.0;      // reference frequency Ω (the unit; must be 1)
    double g = 1e-3;         // coupling Γ₀/Ω (g = 0 is the free limit)
    double rho = 1.0;        // separation Ωr
    double uv_cutoff = 1e3;  // Λ/Ω
    double ir_mass = 0.0;    // μ/Ω, shifts z → z + μ in γ̃₀ when positive

    double coupling_sq() const;     // λ² = 16π g
    double gamma0() const { return g; }  // single-detector decay rate Γ₀
    double r() const { return rho; }     // separation in units of 1/Ω
    bool weak_coupling() const { return g <= 0.1; }

    // Throws PreconditionError when any invariant is violated
    void validate() const;
};

// Self (γ₀, ν₀) and cross (γ_r, ν_r) components of a kernel at one time argument
struct KernelValue {
    double self_part = 0.0;
    double cross_part = 0.0;
};

// Noise kernel at time s: the δ-function part of ν₀ is carried as a separate weight
struct NoiseKernelValue {
    KernelValue value;               // sampled part (self_part is always 0)
    double self_delta_weight = 0.0;  // ν₀(s) = self_delta_weight · δ(s)
};

// Real and imaginary parts of the boundary values on the negative real axis
struct BranchCutParts {
    double F = 0.0;  // real part of γ̃₀(−s ± i0)
    double G = 0.0;  // real part of γ̃_r(−s ± i0)
};

// Value and z-derivative of an analytically continued Laplace transform
struct AnalyticValue {
    std::complex<double> value;
    std::complex<double> derivative;
};

// γ̃₀(z) = −(λ²/16π²) ln(1 + Λ²/(z + μ)²) for real z > 0
double gamma0_laplace(double z, const ModelParams& p);

// γ̃_r(z) = −(λ²/16π² r z)[e^{−rz} Ei(rz) + e^{rz} E1(rz)] for real z > 0
double gammar_laplace(double z, const ModelParams& p);

// Analytic continuation of γ̃₀ off the real axis (cuts on (−∞, −μ] and z = ±iy, y >= Λ)
AnalyticValue gamma0_laplace(std::complex<double> z, const ModelParams& p);

// Analytic continuation of γ̃_r off the real axis (cut on the negative real axis)
AnalyticValue gammar_laplace(std::complex<double> z, const ModelParams& p);

// F(s) = −(λ²/8π²) ln(Λ/s) and the cancellation-free
// G(s) = −(λ²/8π² r s)[e^{−rs} Shi(rs) + sinh(rs) E1(rs)]
BranchCutParts branchcut_real_parts(double s, const ModelParams& p);

// G(s) alone; finite for all s > 0
double branchcut_cross_real_part(double s, const ModelParams& p);

// ν₀(s) = (λ²/8π) δ(s) and ν_r(s) = (λ²/32πr)[sgn(r − s) + sgn(r + s)], sgn(0) = 0
NoiseKernelValue noise_kernel(double s, const ModelParams& p);

// Hard-cutoff time-domain dissipation kernels:
// γ₀(s) = −(λ²/8π²)(1 − cos Λs)/s,
// γ_r(s) = −(λ²/16π² r)[Ci(Λ|r − s|) − Ci(Λ(r + s)) + ln((r + s)/|r − s|)]
KernelValue gamma_time_domain(double s, const ModelParams& p);

// Cross kernel without cutoff, −(λ²/16π² r) ln((r + s)/|r − s|); its Laplace
// transform is exactly gammar_laplace
double gamma_cross_uncut(double s, const ModelParams& p);

// ∫₀^σ γ₀(x) dx = −(λ²/8π²) Cin(Λσ)
double gamma_self_primitive(double sigma, const ModelParams& p);

// ∫₀^σ gamma_cross_uncut(x) dx
double gamma_cross_uncut_primitive(double sigma, const ModelParams& p);

// Second primitives ∫₀^σ (∫₀^x k) dx of γ₀ and of the uncut cross kernel
double gamma_self_second_primitive(double sigma, const ModelParams& p);
double gamma_cross_uncut_second_primitive(double sigma, const ModelParams& p);

}  // namespace udw
