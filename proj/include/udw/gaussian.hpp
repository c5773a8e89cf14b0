// gaussian.hpp — two-mode Gaussian covariance algebra, physicality and PPT tests
#pragma once

#include <vector>

#include <Eigen/Core>

#include "udw/fluctuation.hpp"
#include "udw/kernels.hpp"

namespace udw {

// Symmetric covariance V_ab = ½⟨{ξ_a, ξ_b}⟩ − ⟨ξ_a⟩⟨ξ_b⟩, ξ = (X₁, X₂, P₁, P₂), ħ = 1
struct CovarianceMatrix {
    Eigen::Matrix4d matrix = 0.5 * Eigen::Matrix4d::Identity();  // vacuum at Ω = 1
};

// J = [[0, I₂], [−I₂, 0]]
Eigen::Matrix4d symplectic_form();

// Λ = diag(1, 1, 1, −1): partial transposition flips P₂
Eigen::Matrix4d partial_transpose_map();

// Coherent states share the ground-state covariance diag(1/2Ω, 1/2Ω, Ω/2, Ω/2)
CovarianceMatrix coherent_product_covariance(const ModelParams& p);

// V(t) = R V(0) Rᵀ + S(t), symmetrized. Throws PreconditionError unless R is 4×4.
CovarianceMatrix evolve_covariance(const CovarianceMatrix& v0, const Eigen::MatrixXd& r_mat,
                                   const FluctuationMatrix& s_mat);

// Minimum eigenvalue of the Hermitian matrix V + (i/2)J (>= 0 for a physical state)
double physicality_min_eigenvalue(const CovarianceMatrix& v);

// λ₋ = minimum eigenvalue of V + (i/2)ΛJΛ; negative exactly when the two-mode state is
// entangled. Throws PreconditionError when the physicality eigenvalue is below
// −physicality_tol (pass +∞ to evaluate approximate matrices such as the WWA S(∞)).
double ppt_min_eigenvalue(const CovarianceMatrix& v, double physicality_tol = 1e-6);

struct HarvestSeries {
    std::vector<double> time;         // t in units of 1/Ω
    std::vector<double> ppt;          // λ₋(t)
    std::vector<double> physicality;  // min eig of V(t) + (i/2)J
};

// V(t) along a uniform grid starting at 0 with the full R(t) and the numeric S(t)
HarvestSeries harvest_series(const CovarianceMatrix& v0, const std::vector<double>& grid,
                             const ModelParams& p);

// λ₋(t) along the grid (the ppt column of harvest_series)
std::vector<double> entanglement_series(const CovarianceMatrix& v0,
                                        const std::vector<double>& grid, const ModelParams& p);

}  // namespace udw
