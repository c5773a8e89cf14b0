// fluctuation.hpp — vacuum-noise fluctuation matrix S(t), its WWA closed form and S(∞)
#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "udw/kernels.hpp"
#include "udw/propagator.hpp"

namespace udw {

enum class FluctuationMethod { numeric, wwa_analytic, asymptotic_closed_form };

const char* to_string(FluctuationMethod m);

// 4×4 fluctuation matrix in the ordering (X₁, X₂, P₁, P₂), detector masses M = 1
struct FluctuationMatrix {
    double time = 0.0;                                  // +∞ for the asymptotic matrix
    Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();  // symmetric
    FluctuationMethod method = FluctuationMethod::numeric;

    bool asymptotic() const { return time == std::numeric_limits<double>::infinity(); }
};

// Channel integrals σ^a for a = ± with S = ½ Σ_a E_a ⊗ σ^a, E± = [[1, ±1], [±1, 1]]:
// σ_XX = ∫∫ f ν_a f, σ_PP = ∫∫ ḟ ν_a ḟ, σ_XP = ∫∫ f ν_a ḟ with ν_a = ν₀ ± ν_r
struct ChannelFluctuation {
    double xx = 0.0;
    double pp = 0.0;
    double xp = 0.0;
};

// Assemble the 4×4 matrix from the two channel integrals
Eigen::Matrix4d assemble_fluctuation(const ChannelFluctuation& plus,
                                     const ChannelFluctuation& minus);

// S(t) from sampled mode functions. The ν₀ δ-term gives single integrals; the ν_r term
// is a double integral over the strip |s − s'| < r with constant density λ²/(16πr),
// reduced to single integrals of f(t)·∫_{t−r}^{t} f. Quadrature is the trapezoid rule
// with Euler–Maclaurin end corrections on the cached grid (uniform, starting at 0).
FluctuationMatrix s_matrix_numeric(double t, const ModeFunctions& modes, const ModelParams& p);

// S at every grid point of `modes` in one O(N) pass
std::vector<FluctuationMatrix> s_matrix_numeric_series(const ModeFunctions& modes,
                                                       const ModelParams& p);

// S(t) with the perturbative pole term f⁽⁰⁾ = e^{−Γt} sin(Ω̃t)/Ω̃ substituted for f±;
// every integral is elementary and evaluated in closed form
FluctuationMatrix s_matrix_wwa(double t, const PolePair& poles, const ModelParams& p);

// t → ∞ limit of s_matrix_wwa (requires 0 < g < 0.1)
FluctuationMatrix s_infinity(const PolePair& poles, const ModelParams& p);

// Leading-order closed-form S(∞) expressions, δΩ taken as (δΩ₊ + δΩ₋)/2. Kept for
// comparison only: they do not equal the t → ∞ limit of the WWA integrals.
FluctuationMatrix s_infinity_leading_order(const PolePair& poles, const ModelParams& p);

}  // namespace udw
