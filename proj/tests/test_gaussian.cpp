// test_gaussian.cpp — covariance evolution, physicality and the partial-transpose test
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "udw/errors.hpp"
#include "udw/gaussian.hpp"
#include "udw/propagator.hpp"

using namespace udw;

namespace {

ModelParams params(double g, double rho) {
    ModelParams p;
    p.g = g;
    p.rho = rho;
    p.uv_cutoff = 1e3;
    return p;
}

// Two-mode squeezed vacuum with squeezing s in the ordering (X₁, X₂, P₁, P₂)
CovarianceMatrix two_mode_squeezed(double s) {
    const double c = 0.5 * std::cosh(2.0 * s);
    const double sh = 0.5 * std::sinh(2.0 * s);
    CovarianceMatrix v;
    v.matrix << c, sh, 0, 0,
                sh, c, 0, 0,
                0, 0, c, -sh,
                0, 0, -sh, c;
    return v;
}

// Single-mode symplectic map acting on (X_k, P_k): rotation, squeeze, rotation
Eigen::Matrix2d random_single_mode(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> squeeze(-1.0, 1.0);
    const auto rot = [](double a) {
        Eigen::Matrix2d r;
        r << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
        return r;
    };
    const double e = std::exp(squeeze(rng));
    const Eigen::Matrix2d sq = Eigen::Vector2d(e, 1.0 / e).asDiagonal();
    return rot(angle(rng)) * sq * rot(angle(rng));
}

// Embeds a 2×2 map on mode k into the (X₁, X₂, P₁, P₂) ordering
void embed(Eigen::Matrix4d& s, const Eigen::Matrix2d& m, int k) {
    s(k, k) = m(0, 0);
    s(k, k + 2) = m(0, 1);
    s(k + 2, k) = m(1, 0);
    s(k + 2, k + 2) = m(1, 1);
}

Eigen::Matrix4d local_symplectic(std::mt19937_64& rng) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    embed(s, random_single_mode(rng), 0);
    embed(s, random_single_mode(rng), 1);
    return s;
}

// Random physical state: a global symplectic transform of a thermal product state
CovarianceMatrix random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double s = 1.5 * unit(rng);
    Eigen::Matrix4d mix = Eigen::Matrix4d::Identity();
    // Beam splitter between the two modes acts identically on X and P
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    Eigen::Matrix2d bs;
    bs << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    mix.block<2, 2>(0, 0) = bs;
    mix.block<2, 2>(2, 2) = bs;
    const Eigen::Matrix4d g = local_symplectic(rng) * mix;
    CovarianceMatrix v = two_mode_squeezed(s);
    v.matrix += 0.2 * unit(rng) * Eigen::Matrix4d::Identity();
    v.matrix = g * v.matrix * g.transpose();
    return v;
}

}  // namespace

TEST_CASE("symplectic form and partial transposition") {
    const Eigen::Matrix4d j = symplectic_form();
    CHECK((j * j + Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((j + j.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::Matrix4d l = partial_transpose_map();
    CHECK((l * l - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(l(3, 3) == -1.0);
}

TEST_CASE("coherent product states are pure and separable") {
    const CovarianceMatrix v = coherent_product_covariance(params(1e-3, 1.0));
    CHECK((v.matrix - 0.5 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(physicality_min_eigenvalue(v)) < 1e-15);
    CHECK(std::abs(ppt_min_eigenvalue(v)) < 1e-15);
}

TEST_CASE("two-mode squeezed vacuum is entangled") {
    const CovarianceMatrix v = two_mode_squeezed(0.5);
    CHECK(std::abs(physicality_min_eigenvalue(v)) < 1e-14);
    // Smallest partially transposed symplectic eigenvalue is e^{−2s}/2
    const double lambda = ppt_min_eigenvalue(v);
    CHECK(lambda < 0.0);
    CHECK(lambda < 0.5 * std::exp(-1.0) - 0.5 + 1e-12);
}

TEST_CASE("entanglement sign is invariant under local symplectic maps") {
    std::mt19937_64 rng(20261015);
    int entangled = 0;
    for (int n = 0; n < 100; ++n) {
        const CovarianceMatrix v = random_state(rng);
        REQUIRE(physicality_min_eigenvalue(v) > -1e-10);
        const double before = ppt_min_eigenvalue(v);
        const Eigen::Matrix4d s = local_symplectic(rng);
        CovarianceMatrix w;
        w.matrix = s * v.matrix * s.transpose();
        const double after = ppt_min_eigenvalue(w);
        if (std::abs(before) > 1e-9) {
            CHECK((before < 0.0) == (after < 0.0));
        }
        entangled += before < 0.0;
        // Swapping the detectors leaves the answer unchanged
        Eigen::Matrix4d perm = Eigen::Matrix4d::Zero();
        perm(0, 1) = perm(1, 0) = perm(2, 3) = perm(3, 2) = 1.0;
        CovarianceMatrix swapped;
        swapped.matrix = perm * v.matrix * perm.transpose();
        CHECK(std::abs(ppt_min_eigenvalue(swapped) - before) < 1e-12);
    }
    // The sample covers both outcomes
    CHECK(entangled > 0);
    CHECK(entangled < 100);
}

TEST_CASE("unphysical matrices are rejected unless the tolerance is lifted") {
    CovarianceMatrix v;
    v.matrix = 0.1 * Eigen::Matrix4d::Identity();
    CHECK(physicality_min_eigenvalue(v) < 0.0);
    CHECK_THROWS_AS(ppt_min_eigenvalue(v), PreconditionError);
    CHECK(std::isfinite(ppt_min_eigenvalue(v, std::numeric_limits<double>::infinity())));
}

TEST_CASE("evolution checks shapes and symmetrizes") {
    const CovarianceMatrix v0;
    FluctuationMatrix s;
    s.matrix(0, 1) = 1e-3;
    s.matrix(1, 0) = 1e-3;
    CHECK_THROWS_AS(evolve_covariance(v0, Eigen::MatrixXd::Identity(3, 3), s), PreconditionError);
    const CovarianceMatrix v = evolve_covariance(v0, Eigen::MatrixXd::Identity(4, 4), s);
    CHECK((v.matrix - v.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(v.matrix(0, 1) == 1e-3);
}

TEST_CASE("free evolution conserves physicality and entanglement exactly") {
    const ModelParams p = params(0.0, 1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) {
        grid.push_back(0.05 * i);
    }
    const CovarianceMatrix v0 = two_mode_squeezed(0.3);
    const HarvestSeries h = harvest_series(v0, grid, p);
    const double initial_ppt = ppt_min_eigenvalue(v0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(h.physicality[i]) < 1e-12);
        CHECK(std::abs(h.ppt[i] - initial_ppt) < 1e-12);
    }
}

TEST_CASE("coupled evolution stays physical") {
    const ModelParams p = params(1e-2, 0.5);
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) {
        grid.push_back(0.05 * i);
    }
    const HarvestSeries h = harvest_series(coherent_product_covariance(p), grid, p);
    CHECK(h.ppt[0] == doctest::Approx(0.0).epsilon(1e-15));
    for (double e : h.physicality) {
        CHECK(e > -1e-8);
    }
    const std::vector<double> ppt = entanglement_series(coherent_product_covariance(p), grid, p);
    CHECK(ppt == h.ppt);
}
