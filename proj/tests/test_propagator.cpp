// test_propagator.cpp — poles, branch cut, retardation remainder and assembled modes
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "udw/errors.hpp"
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

// Upper-half-plane roots and residues 1/A'(z) from a 40-digit root finder (mpmath)
struct PoleRef {
    double rho;
    Branch branch;
    std::complex<double> root, residue;
};

const PoleRef kPoleRefs[] = {
    {1.0, Branch::plus, {-0.0018539041370072269881, 0.99544319351535826745},
     {-0.0010912702879151016547, -0.50299943267522820232}},
    {1.0, Branch::minus, {-0.00015789989533678552703, 0.99573850581236955979},
     {0.00007172443996139547278, -0.50207357115017061772}},
    {10.0, Branch::plus, {-0.00095318818773366281158, 0.99568440938987015518},
     {-0.00089536490122811835084, -0.50217767750789151161}},
    {10.0, Branch::minus, {-0.0010568796804406813791, 0.99549609456347730813},
     {-0.00011839683226762931391, -0.50289566336203214003}},
};

// f±(t) from a direct Bromwich-line inversion (trapezoid in Im z, truncation below 10⁻¹⁰)
struct ModeRef {
    double rho;
    double t;
    double f_plus, f_minus;
};

const ModeRef kModeRefs[] = {
    {1.0, 0.5, 0.4795544420, 0.4795537785},
    {1.0, 3.0, 0.1575482045, 0.1541815716},
    {1.0, 20.0, 0.8444185222, 0.8758202040},
    {10.0, 0.5, 0.4795541136, 0.4795541070},
    {10.0, 3.0, 0.1558815313, 0.1558480502},
    {10.0, 20.0, 0.8608771308, 0.8591128203},
};

}  // namespace

TEST_CASE("refined poles and residues") {
    for (const auto& r : kPoleRefs) {
        const PolePair poles = find_poles(params(1e-3, r.rho));
        CHECK(std::abs(poles.refined(r.branch) - r.root) < 1e-13);
        CHECK(std::abs(poles.residue(r.branch) - r.residue) < 1e-11);
        CHECK(std::abs(pole_equation(poles.refined(r.branch), r.branch, params(1e-3, r.rho)).value) <
              1e-12);
    }
}

TEST_CASE("perturbative decay rates sum to twice the single-detector rate") {
    for (double rho : {0.1, 1.0, 7.3, 1000.0}) {
        const PolePair poles = find_poles(params(1e-3, rho), false);
        CHECK(std::abs(poles.gamma_plus + poles.gamma_minus - 2e-3) < 1e-15);
    }
}

TEST_CASE("no damped root when retardation zeros crowd it out") {
    const ModelParams p = params(1e-3, 1e5);
    CHECK_THROWS_AS(find_poles(p), NumericalError);
    const PolePair lenient = find_poles(p, false);
    CHECK_FALSE(lenient.damped_plus);
    CHECK(pole_term_refined(10.0, Branch::plus, lenient).value == 0.0);
}

TEST_CASE("runaway root of the symmetric channel") {
    // Near z = 0 both transforms grow like −(λ²/8π²) ln(1/z), so in the + channel
    // 1 − (4g/π)[2 ln(1/z) + ln Λ − ln ρ] ≈ 0 up to O(1) constants inside the brackets
    const PolePair poles = find_poles(params(1e-3, 1.0));
    REQUIRE(poles.runaway_plus.found);
    const double estimate = 0.5 * std::log(1e3) - std::numbers::pi / (8.0 * 1e-3);
    CHECK(std::abs(poles.runaway_plus.log_location - estimate) < 1.0);
}

TEST_CASE("branch-cut weight against reference values") {
    struct Ref {
        double s, rho;
        Branch b;
        double w;
    };
    const Ref refs[] = {
        {0.3, 1.0, Branch::plus, 0.0022095197806978665214},
        {0.3, 1.0, Branch::minus, -0.000016393410536479624523},
        {2.0, 10.0, Branch::plus, 6.5608551392784156615e-6},
        {0.05, 10.0, Branch::minus, -0.000054652969958789097982},
    };
    for (const auto& r : refs) {
        const double w = branch_cut_weight(r.s, r.b, params(1e-3, r.rho));
        CHECK(std::abs(w - r.w) <= 1e-11 * std::abs(r.w));
    }
}

TEST_CASE("branch-cut integral approaches its large-t form at weak coupling") {
    const ModelParams p = params(1e-6, 2.0);
    for (double t : {200.0, 400.0}) {
        for (Branch b : {Branch::plus, Branch::minus}) {
            const double full = branch_cut_term(t, b, p).value;
            const double asym = branch_cut_asymptote(t, b, p);
            CHECK(std::abs(full / asym - 1.0) < 0.01);
        }
    }
}

TEST_CASE("fast and full cut modes agree at weak coupling") {
    const ModelParams p = params(1e-6, 2.0);
    for (Branch b : {Branch::plus, Branch::minus}) {
        const double full = branch_cut_term(20.0, b, p, CutMode::full).value;
        const double fast = branch_cut_term(20.0, b, p, CutMode::fast).value;
        CHECK(std::abs(fast - full) <= 1e-4 * std::abs(full));
    }
}

TEST_CASE("fixed cut rule reproduces the adaptive cut integral") {
    const ModelParams p = params(1e-3, 5.0);
    const CutQuadrature q(Branch::minus, p, 1.0, 0.1);
    for (double t : {1.0, 10.0, 300.0}) {
        const Jet a = q.evaluate(t);
        const Jet b = branch_cut_term(t, Branch::minus, p);
        CHECK(std::abs(a.value - b.value) < 1e-12);
        CHECK(std::abs(a.d1 - b.d1) < 1e-12);
    }
    const auto [below, above] = q.evaluate_split(10.0, 0.1);
    CHECK(std::abs(below.value + above.value - q.evaluate(10.0).value) < 1e-15);
}

TEST_CASE("mode functions match the Bromwich inversion at early and late times") {
    for (double rho : {1.0, 10.0}) {
        std::vector<double> grid;
        for (const auto& r : kModeRefs) {
            if (r.rho == rho) {
                grid.push_back(r.t);
            }
        }
        const ModeFunctions m = mode_functions(grid, params(1e-3, rho));
        std::size_t i = 0;
        for (const auto& r : kModeRefs) {
            if (r.rho != rho) {
                continue;
            }
            CHECK(std::abs(m.u11[i] + m.u12[i] - r.f_plus) < 2e-9);
            CHECK(std::abs(m.u11[i] - m.u12[i] - r.f_minus) < 2e-9);
            ++i;
        }
    }
}

TEST_CASE("initial data and the retardation remainder") {
    const ModelParams p = params(1e-3, 10.0);
    const ModeFunctions m = mode_functions({0.0, 1e-3, 0.01}, p);
    CHECK(m.u11[0] == 0.0);
    CHECK(m.u12[0] == 0.0);
    CHECK(m.du11[0] == 1.0);
    CHECK(m.du12[0] == 0.0);
    CHECK(std::abs(m.u11[1] - std::sin(1e-3)) < 1e-9);
    CHECK(std::abs(m.du11[2] - 1.0) < 1e-4);
    CHECK(delay_term(0.0, Branch::plus, p).value == 0.0);

    const PolePair poles = find_poles(p);
    const DelayContour line(Branch::plus, p, poles);
    CHECK(line.kappa() > 0.0);
    CHECK(line.pole_separate());
    const Jet late = line.line_integral(line.horizon() * 1.01);
    CHECK(std::abs(late.value) < 1e-15);
}

TEST_CASE("free oscillators at g = 0") {
    const ModelParams p = params(0.0, 2.0);
    const ModeFunctions m = mode_functions({0.0, 0.7, 5.0, 40.0}, p);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(std::abs(m.u11[i] - std::sin(m.grid[i])) < 1e-14);
        CHECK(std::abs(m.du11[i] - std::cos(m.grid[i])) < 1e-14);
        CHECK(m.u12[i] == 0.0);
    }
}

TEST_CASE("homogeneous equation residual on a uniform grid") {
    const ModelParams p = params(1e-3, 2.0);
    std::vector<double> grid;
    for (int i = 0; i <= 2000; ++i) {
        grid.push_back(0.01 * i);
    }
    const ModeFunctions m = mode_functions(grid, p);
    CHECK(homogeneous_residual(m, p) < 1e-4);
}

TEST_CASE("evolution matrix at t = 0 is the identity") {
    const ModeFunctions m = mode_functions({0.0, 1.0}, params(1e-3, 1.0));
    CHECK((r_matrix_at(0, m) - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(r_matrix(0.5, m), PreconditionError);
}

TEST_CASE("WWA ratio flags and values") {
    const ModelParams p = params(1e-3, 10.0);
    const std::vector<double> grid{0.0, 50.0, 100.0, 200.0};
    const WwaRatioSeries s = wwa_ratio(grid, p);
    CHECK_FALSE(s.reliable[0]);
    CHECK(std::isnan(s.ratio[0]));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (s.reliable[i]) {
            CHECK(std::abs(s.ratio[i] - s.u12_pole[i] / s.u12_full[i]) < 1e-15);
        }
    }
}
