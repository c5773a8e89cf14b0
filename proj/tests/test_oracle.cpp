// test_oracle.cpp — time-domain Volterra solver and brute-force fluctuation matrix
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "udw/errors.hpp"
#include "udw/fluctuation.hpp"
#include "udw/oracle.hpp"
#include "udw/propagator.hpp"

using namespace udw;

namespace {

ModelParams params(double g, double rho, double cutoff = 1e3) {
    ModelParams p;
    p.g = g;
    p.rho = rho;
    p.uv_cutoff = cutoff;
    return p;
}

}  // namespace

TEST_CASE("kernel convolutions against direct quadrature") {
    // Reference values from adaptive quadrature at 30 digits, g = 10⁻², ρ = 2, Λ = 50
    struct Ref {
        double sigma;
        std::complex<double> self_part, cross_part;
    };
    const Ref refs[] = {
        {0.5, {-0.022410214268997697, -0.0086467524457274972},
         {-0.00019694191919582781, -3.2955063164728262e-05}},
        {2.5, {0.014601389997431087, -0.025064850862273648},
         {-0.0043648854003743732, -0.0041281145700574652}},
        {40.0, {0.0091648456797646383, -0.025384194473834647},
         {-0.0056184877768534359, -0.00069454665363788122}},
    };
    const ModelParams p = params(1e-2, 2.0, 50.0);
    for (const auto& r : refs) {
        const KernelConvolution c = kernel_convolution(r.sigma, p);
        CHECK(std::abs(c.self_part - r.self_part) < 1e-14);
        CHECK(std::abs(c.cross_part - r.cross_part) < 1e-13);
    }
    const KernelConvolution zero = kernel_convolution(0.0, p);
    CHECK(std::abs(zero.self_part) == 0.0);
    CHECK(std::abs(zero.cross_part) == 0.0);
    CHECK_THROWS_AS(kernel_convolution(-1.0, p), PreconditionError);
}

TEST_CASE("free limit reproduces sin t") {
    const VolterraSolution sol = volterra_u(30.0, 0.05, params(0.0, 1.0));
    for (std::size_t n = 0; n < sol.size(); ++n) {
        CHECK(std::abs(sol.u[n](0, 0) - std::sin(sol.grid[n])) < 1e-14);
        CHECK(std::abs(sol.du[n](0, 0) - std::cos(sol.grid[n])) < 1e-14);
        CHECK(sol.u[n](0, 1) == 0.0);
    }
}

TEST_CASE("solution is exchange symmetric and solves the discrete equations") {
    const VolterraSolution sol = volterra_u(40.0, 0.02, params(1e-2, 2.0));
    CHECK(sol.residual_norm < 1e-10);
    for (std::size_t n = 0; n < sol.size(); n += 50) {
        CHECK(sol.u[n](0, 0) == sol.u[n](1, 1));
        CHECK(sol.u[n](0, 1) == sol.u[n](1, 0));
        CHECK(sol.du[n](0, 0) == sol.du[n](1, 1));
    }
}

TEST_CASE("Volterra solution agrees with the Laplace-space mode functions") {
    const ModelParams p = params(1e-2, 2.0);
    const VolterraSolution sol = volterra_u(60.0, 0.01, p);
    const ModeFunctions m = mode_functions(sol.grid, p);
    double err11 = 0.0;
    double err12 = 0.0;
    double max11 = 0.0;
    double max12 = 0.0;
    for (std::size_t n = 0; n < sol.size(); ++n) {
        err11 = std::max(err11, std::abs(sol.u[n](0, 0) - m.u11[n]));
        err12 = std::max(err12, std::abs(sol.u[n](0, 1) - m.u12[n]));
        max11 = std::max(max11, std::abs(m.u11[n]));
        max12 = std::max(max12, std::abs(m.u12[n]));
    }
    CHECK(err11 < 1e-4 * max11);
    CHECK(err12 < 1e-4 * max12);
}

TEST_CASE("decay rate of a distant pair equals the single-detector rate") {
    // With ρ large the cross kernel is negligible. The exact rate differs from Γ₀ by a
    // relative O(g ln Λ), so the fit over Γ₀t ∈ [1, 3] is done at weak coupling.
    const ModelParams p = params(2e-3, 5000.0);
    const double h = 0.05;
    const VolterraSolution sol = volterra_u(3.2 / p.g, h, p);
    const auto log_envelope = [&](double t) {
        const auto n = static_cast<std::size_t>(std::lround(t / h));
        const double u = sol.u[n](0, 0);
        const double du = sol.du[n](0, 0);
        return 0.5 * std::log(u * u + du * du);
    };
    // Average over a full period at both ends to remove the O(g) ripple
    const auto averaged = [&](double t0) {
        double sum = 0.0;
        const int samples = 100;
        for (int k = 0; k < samples; ++k) {
            sum += log_envelope(t0 + 2.0 * std::numbers::pi * k / samples);
        }
        return sum / samples;
    };
    const double rate = -(averaged(3.0 / p.g) - averaged(1.0 / p.g)) / (2.0 / p.g);
    CHECK(std::abs(rate / p.g - 1.0) < 0.02);
}

TEST_CASE("brute-force double sum matches the strip quadrature") {
    const ModelParams p = params(1e-2, 1.0);
    const double h = 0.0025;
    const VolterraSolution sol = volterra_u(5.0, h, p);
    const ModeFunctions m = mode_functions(sol.grid, p);
    const Eigen::Matrix4d brute = s_matrix_bruteforce(5.0, sol, p).matrix;
    const Eigen::Matrix4d strip = s_matrix_numeric(5.0, m, p).matrix;
    CHECK((brute - strip).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((brute - brute.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(s_matrix_bruteforce(0.0, sol, p).matrix.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(s_matrix_bruteforce(5.001, sol, p), PreconditionError);
}

TEST_CASE("preconditions") {
    ModelParams massive = params(1e-2, 1.0);
    massive.ir_mass = 0.1;
    CHECK_THROWS_AS(volterra_u(10.0, 0.01, massive), PreconditionError);
    CHECK_THROWS_AS(volterra_u(10.0, 0.1, params(1e-2, 1.0)), PreconditionError);
    CHECK_THROWS_AS(volterra_u(6000.0, 0.05, params(1e-2, 1.0)), PreconditionError);
    CHECK_THROWS_AS(volterra_u(4000.0, 0.01, params(1e-2, 1.0)), PreconditionError);
}
