// propagator.hpp — mode functions from the pole + branch-cut decomposition of the
// inverse Laplace transform, evolution matrix R(t) and WWA comparison quantities
#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "udw/kernels.hpp"

namespace udw {

// Symmetric (+, f₊ = u11 + u12) and antisymmetric (−, f₋ = u11 − u12) channels
enum class Branch { plus, minus };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

// Real positive root of the pole equation (exponentially growing solution)
struct RunawayRoot {
    bool found = false;         // a sign change of the pole equation was bracketed
    double log_location = 0.0;  // ln(z_runaway) (the root itself may underflow)
};

struct PolePair {
    double gamma_plus = 0.0;         // Γ₊ = Γ₀(1 + sin ρ/ρ)
    double gamma_minus = 0.0;        // Γ₋ = Γ₀(1 − sin ρ/ρ)
    double delta_omega_plus = 0.0;   // δΩ₊ (perturbative)
    double delta_omega_minus = 0.0;  // δΩ₋ (perturbative)
    std::complex<double> refined_plus;   // refined upper-half root, + channel
    std::complex<double> refined_minus;  // refined upper-half root, − channel
    std::complex<double> residue_plus;   // 1/A'(z) at refined_plus
    std::complex<double> residue_minus;  // 1/A'(z) at refined_minus
    double residual_plus = 0.0;          // |A(refined_plus)|
    double residual_minus = 0.0;         // |A(refined_minus)|
    int iterations_plus = 0;
    int iterations_minus = 0;
    RunawayRoot runaway_plus;
    RunawayRoot runaway_minus;
    // False when the retardation zeros crowd out the damped root (ρΓ too large); the
    // refined fields are then left at the perturbative seed and carry no residue
    bool damped_plus = true;
    bool damped_minus = true;

    double gamma(Branch b) const { return b == Branch::plus ? gamma_plus : gamma_minus; }
    double delta_omega(Branch b) const {
        return b == Branch::plus ? delta_omega_plus : delta_omega_minus;
    }
    double shifted_frequency(Branch b) const { return 1.0 + delta_omega(b); }
    std::complex<double> refined(Branch b) const {
        return b == Branch::plus ? refined_plus : refined_minus;
    }
    std::complex<double> residue(Branch b) const {
        return b == Branch::plus ? residue_plus : residue_minus;
    }
    bool damped(Branch b) const { return b == Branch::plus ? damped_plus : damped_minus; }
};

// A value with its first and second time derivatives
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

enum class CutMode { full, fast };

// Sampled mode functions on a time grid
struct ModeFunctions {
    std::vector<double> grid;  // times in units of 1/Ω

    // Channel parts: pole (refined residues) and branch cut, with derivatives
    std::vector<Jet> pole_plus, pole_minus;
    std::vector<Jet> cut_plus, cut_minus;
    std::vector<Jet> delay_plus, delay_minus;  // retardation-pole remainder

    // Assembled u11 = u22 = (f₊ + f₋)/2 and u12 = u21 = (f₊ − f₋)/2
    std::vector<double> u11, u12;
    std::vector<double> du11, du12;
    std::vector<double> ddu11, ddu12;

    std::size_t size() const { return grid.size(); }
    std::size_t index_of(double t) const;  // throws PreconditionError when t is off-grid
};

// Left-hand side of the pole equation A(z) = z² + Ω² + 2γ̃₀(z) ± 2γ̃_r(z) and A'(z)
AnalyticValue pole_equation(std::complex<double> z, Branch b, const ModelParams& p);

// With require_damped, a channel without a damped root is a NumericalError; otherwise
// it is reported through PolePair::damped
PolePair find_poles(const ModelParams& p, bool require_damped = true);

// Perturbative pole term f⁽⁰⁾(t) = sin(Ω̃t)/Ω̃ e^{−Γt} with analytic derivatives
Jet pole_term(double t, Branch b, const PolePair& poles);

// Pole contribution 2 Re[e^{z t}/A'(z)] from the refined root and its exact residue;
// zero for a channel without a damped root
Jet pole_term_refined(double t, Branch b, const PolePair& poles);

// Branch-cut integral I(t) and derivatives by adaptive quadrature
Jet branch_cut_term(double t, Branch b, const ModelParams& p, CutMode mode = CutMode::full);

// Integrand weight w(s) with I(t) = ∫₀^∞ e^{−st} w(s) ds (full mode)
double branch_cut_weight(double s, Branch b, const ModelParams& p);

// Leading large-t form of I(t): (λ²/4π²)[1/t ± artanh(r/t)/r], valid for t > r
double branch_cut_asymptote(double t, Branch b, const ModelParams& p);

// Fixed composite Gauss–Legendre rule in s, reusable for every t in [t_min, ∞).
// A positive split point becomes a panel boundary so the integral can be separated
// into the parts below and above it.
class CutQuadrature {
public:
    CutQuadrature(Branch b, const ModelParams& p, double t_min, double split = 0.0);
    Jet evaluate(double t) const;
    // Contributions of s < split and s > split; their sum is evaluate(t)
    std::pair<Jet, Jet> evaluate_split(double t, double split) const;
    std::size_t nodes() const { return s_.size(); }

private:
    std::vector<double> s_;  // nodes
    std::vector<double> w_;  // quadrature weight × integrand weight
};

// Early-time remainder of the inverse Laplace transform that the pole + cut split
// leaves out. Besides the two damped poles, A(z) has an infinite family of
// retardation zeros in the left half-plane, spaced ≈ 2π/ρ in Im z around
// Re z ≈ −ln(8ρ/λ²)/ρ, produced by the e^{−ρz} growth of γ̃_r there. Their sum is
// evaluated as the cut piece s ∈ [0, κ] plus the vertical line Re z = −κ minus the
// cut beyond κ. On the line γ̃_r is split into a smooth part and (c/z) iπ e^{−ρz},
// and 1/A is expanded in that exponential (an echo series), so every term is smooth
// and its e^{izt} oscillation is integrated exactly (Filon weights on Legendre
// panels). Panels where the series would converge slowly keep the unsplit form.
class DelayContour {
public:
    DelayContour(Branch b, const ModelParams& p, const PolePair& poles);

    double kappa() const { return kappa_; }
    // Beyond this time the line integral is below 10⁻¹⁶
    double horizon() const { return horizon_; }
    // True when the damped pole lies right of the line and enters as a residue;
    // otherwise the line integral already contains it
    bool pole_separate() const { return pole_separate_; }
    std::size_t panels() const { return panels_.size(); }

    // (1/2πi)∫ e^{zt} zᵐ [1/A(z) − 1/(z² + Ω²)] dz along the line, m = 0, 1, 2
    Jet line_integral(double t) const;

private:
    struct Panel {
        double center = 0.0;
        double half = 0.0;
        int echoes = 0;                            // highest echo order stored
        std::vector<double> bound;                 // per echo order, bound on the contribution
        std::vector<std::complex<double>> coef;    // [(n·3 + m)·order + k]
    };
    double kappa_ = 0.0;
    double rho_ = 0.0;
    double horizon_ = 0.0;
    bool pole_separate_ = true;
    std::vector<Panel> panels_;
};

// delay(t) = f(t) − pole_term_refined(t) − branch_cut_term(t); zero at t = 0
Jet delay_term(double t, Branch b, const ModelParams& p);

ModeFunctions mode_functions(const std::vector<double>& grid, const ModelParams& p);

// R(t) = [[u̇, u],[ü, u̇]] in the ordering (X₁, X₂, P₁, P₂)
Eigen::Matrix4d r_matrix(double t, const ModeFunctions& modes);
Eigen::Matrix4d r_matrix_at(std::size_t index, const ModeFunctions& modes);

struct WwaRatioSeries {
    std::vector<double> time;       // t in units of 1/Ω
    std::vector<double> ratio;      // u12_pole/u12_full (NaN where unreliable)
    std::vector<double> u12_pole;   // (f₊⁽⁰⁾ − f₋⁽⁰⁾)/2 with perturbative poles
    std::vector<double> u12_full;   // full u12
    std::vector<bool> reliable;     // |u12_full| >= 10⁻³ max|u12_full|
};

WwaRatioSeries wwa_ratio(const std::vector<double>& grid, const ModelParams& p);

// Max over the grid of |ü + Ω²u + 2∫₀ᵗ γ(t−s)u(s)ds| for u11 and u12, relative to
// max|ü|. Requires a uniform grid starting at 0.
double homogeneous_residual(const ModeFunctions& modes, const ModelParams& p);

}  // namespace udw
