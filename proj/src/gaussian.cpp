// gaussian.cpp — covariance evolution and Hermitian eigenvalue tests
#include "udw/gaussian.hpp"

#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "udw/errors.hpp"
#include "udw/propagator.hpp"

namespace udw {

namespace {

// Minimum eigenvalue of V + (i/2)K for a real antisymmetric K
double min_hermitian_eigenvalue(const Eigen::Matrix4d& v, const Eigen::Matrix4d& k) {
    const Eigen::Matrix4cd h = v.cast<std::complex<double>>() +
                               std::complex<double>(0.0, 0.5) * k.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigenvalue solver failed");
    }
    return solver.eigenvalues().minCoeff();
}

}  // namespace

Eigen::Matrix4d symplectic_form() {
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
    j.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
    return j;
}

Eigen::Matrix4d partial_transpose_map() {
    return Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal();
}

CovarianceMatrix coherent_product_covariance(const ModelParams& p) {
    p.validate();
    CovarianceMatrix v;
    v.matrix = Eigen::Vector4d(0.5 / p.omega, 0.5 / p.omega, 0.5 * p.omega, 0.5 * p.omega)
                   .asDiagonal();
    return v;
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& v0, const Eigen::MatrixXd& r_mat,
                                   const FluctuationMatrix& s_mat) {
    if (r_mat.rows() != 4 || r_mat.cols() != 4) {
        throw PreconditionError("evolve_covariance: R must be 4×4, got " +
                                std::to_string(r_mat.rows()) + "×" +
                                std::to_string(r_mat.cols()));
    }
    const Eigen::Matrix4d r = r_mat;
    Eigen::Matrix4d v = r * v0.matrix * r.transpose() + s_mat.matrix;
    CovarianceMatrix out;
    out.matrix = 0.5 * (v + v.transpose());
    return out;
}

double physicality_min_eigenvalue(const CovarianceMatrix& v) {
    return min_hermitian_eigenvalue(v.matrix, symplectic_form());
}

double ppt_min_eigenvalue(const CovarianceMatrix& v, double physicality_tol) {
    const double phys = physicality_min_eigenvalue(v);
    if (phys < -physicality_tol) {
        throw PreconditionError("ppt_min_eigenvalue: unphysical covariance (min eigenvalue of "
                                "V + (i/2)J is " + std::to_string(phys) + ")");
    }
    const Eigen::Matrix4d lam = partial_transpose_map();
    return min_hermitian_eigenvalue(v.matrix, lam * symplectic_form() * lam);
}

HarvestSeries harvest_series(const CovarianceMatrix& v0, const std::vector<double>& grid,
                             const ModelParams& p) {
    const ModeFunctions modes = mode_functions(grid, p);
    const std::vector<FluctuationMatrix> s = s_matrix_numeric_series(modes, p);
    HarvestSeries out;
    out.time = grid;
    out.ppt.resize(grid.size());
    out.physicality.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CovarianceMatrix v = evolve_covariance(v0, r_matrix_at(i, modes), s[i]);
        out.physicality[i] = physicality_min_eigenvalue(v);
        out.ppt[i] = ppt_min_eigenvalue(v);
    }
    return out;
}

std::vector<double> entanglement_series(const CovarianceMatrix& v0,
                                        const std::vector<double>& grid, const ModelParams& p) {
    return harvest_series(v0, grid, p).ppt;
}

}  // namespace udw
