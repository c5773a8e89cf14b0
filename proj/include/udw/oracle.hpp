// oracle.hpp — independent validators: Volterra time stepping for u(t) and a direct
// 2D quadrature of the fluctuation matrix
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "udw/fluctuation.hpp"
#include "udw/kernels.hpp"

namespace udw {

// Matrix mode function u(t) on a uniform grid, solved entirely in the time domain
struct VolterraSolution {
    double h = 0.0;                   // step
    std::vector<double> grid;         // t_n = n h
    std::vector<Eigen::Matrix2d> u;   // u(t_n)
    std::vector<Eigen::Matrix2d> du;  // u̇(t_n)
    double residual_norm = 0.0;       // relative residual of the discrete equations

    std::size_t size() const { return grid.size(); }
};

// Convolutions C(σ) = ∫₀^σ e^{i(σ−x)} γ(x) dx of the self kernel and of the uncut
// cross kernel, in closed form through Si, Ci and Cin. Im C is the memory kernel
// of the integrated equation and Re C its σ-derivative.
struct KernelConvolution {
    std::complex<double> self_part;
    std::complex<double> cross_part;
};

KernelConvolution kernel_convolution(double sigma, const ModelParams& p);

// Solves ü + Ω²u + 2∫₀ᵗ γ(t−s) u(s) ds = 0 with u(0) = 0, u̇(0) = I. The equation is
// integrated twice against the free propagator into the second-kind form
//   u(t) = sin(t) I − 2∫₀ᵗ K(t−s) u(s) ds,   u̇(t) = cos(t) I − 2∫₀ᵗ K'(t−s) u(s) ds,
// with K = Im C, and discretized by product integration: u is piecewise linear and the
// kernel moments over each cell are integrated adaptively, so the 1/Λ structure of γ₀
// and the logarithmic singularity of γ_r at s = r are resolved inside the weights.
// Second order in h. Requires μ = 0, h ≤ 0.05, t_max ≤ 5000 and at most 2.5·10⁵ steps.
VolterraSolution volterra_u(double t_max, double h, const ModelParams& p);

// S(t) by direct double sums over the Volterra grid: trapezoid weights in s and s', ν_r
// evaluated pointwise from its sgn form, δ-part of ν₀ as a single sum. t must be a
// grid point of `sol`.
FluctuationMatrix s_matrix_bruteforce(double t, const VolterraSolution& sol,
                                      const ModelParams& p);

}  // namespace udw
