#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ccdf/interactionfit.hpp"

using namespace ccdf;

TEST_CASE("harmonic oscillator grid is orthonormal") {
    const OrbitalGrid g = harmonic_oscillator_grid(5);
    CHECK_NOTHROW(g.validate());
    const Eigen::MatrixXd overlap =
        g.orbitals.transpose() * g.weights.asDiagonal() * g.orbitals;
    CHECK((overlap - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("grid file round trip") {
    const OrbitalGrid g = harmonic_oscillator_grid(3, 101, 9.0);
    std::ostringstream out;
    write_grid(g, out);
    std::istringstream in(out.str());
    const OrbitalGrid back = read_grid(in);
    CHECK(back.n_points() == g.n_points());
    CHECK(back.n_orbitals() == g.n_orbitals());
    CHECK((back.orbitals - g.orbitals).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("grid validation failures") {
    OrbitalGrid g = harmonic_oscillator_grid(3);
    SUBCASE("negative weight") {
        g.weights(0) = -g.weights(0);
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
    SUBCASE("non-orthonormal orbitals") {
        g.orbitals.col(0) *= 2.0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
}

TEST_CASE("eval_u") {
    const OrbitalGrid grid = harmonic_oscillator_grid(4);

    SUBCASE("constant potential is diagonal by orthonormality") {
        const Eigen::MatrixXd u = eval_u({"confinement_poly", Eigen::Vector2d(2.5, 0.0)}, grid);
        CHECK((u - 2.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("r^2 matches the analytic oscillator matrix elements") {
        // <n|x^2|m>: diagonal n + 1/2, off-diagonal sqrt((n+1)(n+2))/2 at |n-m| = 2
        const Eigen::MatrixXd u = eval_u({"confinement_poly", Eigen::Vector2d(0.0, 1.0)}, grid);
        for (int n = 0; n < 4; ++n)
            for (int m = 0; m < 4; ++m) {
                double expect = 0.0;
                if (n == m) expect = n + 0.5;
                if (n == m + 2) expect = std::sqrt((m + 1.0) * (m + 2.0)) / 2.0;
                if (m == n + 2) expect = std::sqrt((n + 1.0) * (n + 2.0)) / 2.0;
                CHECK(u(n, m) == doctest::Approx(expect).epsilon(1e-8).scale(1.0));
            }
    }
    SUBCASE("zero parameters give the zero tensor") {
        const Eigen::MatrixXd u = eval_u({"confinement_poly", Eigen::Vector2d(0.0, 0.0)}, grid);
        CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("eval_g") {
    SUBCASE("zero amplitude gives the zero tensor") {
        const OrbitalGrid grid = harmonic_oscillator_grid(3);
        const Tensor4 g = eval_g({"coulomb_soft", Eigen::Vector2d(0.0, 1.0)}, grid);
        for (double v : g.data()) CHECK(v == 0.0);
    }
    SUBCASE("two-point toy grid matches a hand-computed quadrature sum") {
        OrbitalGrid grid;
        grid.points = Eigen::Vector2d(-0.5, 0.5);
        grid.weights = Eigen::Vector2d(1.0, 1.0);
        grid.orbitals = Eigen::MatrixXd(2, 1);
        grid.orbitals << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);  // orthonormal 1-orbital table
        const double a = 0.3;
        const InteractionModel m{"coulomb_soft", Eigen::Vector2d(1.0, a)};
        const Tensor4 g = eval_g(m, grid);
        // manual double sum over the 2x2 point pairs, phi^4 = 1/4
        double expect = 0.0;
        for (double x1 : {-0.5, 0.5})
            for (double x2 : {-0.5, 0.5})
                expect += 0.25 / std::sqrt((x1 - x2) * (x1 - x2) + a * a);
        CHECK(g(0, 0, 0, 0) == doctest::Approx(expect).epsilon(1e-14));
    }
    SUBCASE("swap symmetry g^PQ_RS = g^QP_SR to machine precision") {
        const OrbitalGrid grid = harmonic_oscillator_grid(3);
        const Tensor4 g = eval_g({"coulomb_erf", Eigen::Vector2d(0.8, 1.3)}, grid);
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                for (int r = 0; r < 3; ++r)
                    for (int s = 0; s < 3; ++s)
                        CHECK(g(p, q, r, s) == doctest::Approx(g(q, p, s, r)).epsilon(1e-15).scale(1.0));
    }
}

TEST_CASE("quadrature convergence: doubling the grid changes tensors < 1e-8") {
    const OrbitalGrid coarse = harmonic_oscillator_grid(4, 301, 12.0);
    const OrbitalGrid fine = harmonic_oscillator_grid(4, 601, 12.0);
    SUBCASE("one-body") {
        const InteractionModel m{"confinement_poly", Eigen::Vector2d(0.4, 0.9)};
        CHECK((eval_u(m, coarse) - eval_u(m, fine)).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("two-body families") {
        for (const char* fam : {"coulomb_erf", "yukawa", "coulomb_soft"}) {
            const InteractionModel m{fam, Eigen::Vector2d(0.9, 0.8)};
            const Tensor4 a = eval_g(m, coarse);
            const Tensor4 b = eval_g(m, fine);
            double mx = 0.0;
            for (std::size_t i = 0; i < a.data().size(); ++i)
                mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
            INFO(std::string(fam));
            CHECK(mx < 1e-8);
        }
    }
}

TEST_CASE("round-trip identifiability per family") {
    const OrbitalGrid grid = harmonic_oscillator_grid(4);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> pert(-0.1, 0.1);

    for (const std::string& fam_id : family_ids()) {
        const InteractionFamily& fam = family(fam_id);
        Eigen::VectorXd truth(fam.arity);
        truth << 1.2, 0.7;
        ChiTensors chi;
        if (fam.two_body) {
            chi.chi2 = eval_g({fam_id, truth}, grid);
            chi.chi1 = Eigen::MatrixXd::Zero(4, 4);
        } else {
            chi.chi1 = eval_u({fam_id, truth}, grid);
            chi.chi2 = Tensor4(4);
        }
        Eigen::VectorXd init = truth;
        for (int i = 0; i < init.size(); ++i) init(i) *= 1.0 + pert(rng);
        const FitReport rep = fit_interaction(chi, grid, fam_id, init);
        INFO(fam_id);
        CHECK((rep.model.params - truth).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(rep.objective < 1e-8);
        CHECK(rep.converged);
    }
}

TEST_CASE("zero target drives a multiplicative amplitude to zero") {
    const OrbitalGrid grid = harmonic_oscillator_grid(3);
    ChiTensors chi;
    chi.chi2 = Tensor4(3);
    chi.chi1 = Eigen::MatrixXd::Zero(3, 3);
    const FitReport rep =
        fit_interaction(chi, grid, "coulomb_soft", Eigen::Vector2d(0.5, 0.7), {});
    CHECK(std::abs(rep.model.params(0)) < 1e-7);
    CHECK(rep.objective < 1e-6);
}

TEST_CASE("objective trajectory is monotone best-so-far") {
    const OrbitalGrid grid = harmonic_oscillator_grid(3);
    ChiTensors chi;
    chi.chi2 = eval_g({"yukawa", Eigen::Vector2d(1.0, 0.6)}, grid);
    chi.chi1 = Eigen::MatrixXd::Zero(3, 3);
    const FitReport rep = fit_interaction(chi, grid, "yukawa", Eigen::Vector2d(1.3, 0.4), {});
    for (std::size_t i = 1; i < rep.trajectory.size(); ++i)
        CHECK(rep.trajectory[i] <= rep.trajectory[i - 1]);
    CHECK(rep.objective >= 0.0);
}

TEST_CASE("budget exhaustion returns best-so-far unconverged") {
    const OrbitalGrid grid = harmonic_oscillator_grid(3);
    ChiTensors chi;
    chi.chi2 = eval_g({"coulomb_erf", Eigen::Vector2d(1.0, 0.9)}, grid);
    chi.chi1 = Eigen::MatrixXd::Zero(3, 3);
    FitOptions opts;
    opts.budget = 5;
    const FitReport rep = fit_interaction(chi, grid, "coulomb_erf", Eigen::Vector2d(2.0, 2.0), opts);
    CHECK_FALSE(rep.converged);
    CHECK(rep.evaluations <= 7);  // initial + a poll round
}

TEST_CASE("unsupported family errors") {
    const OrbitalGrid grid = harmonic_oscillator_grid(3);
    CHECK_THROWS_AS(family("gradient_coupling"), std::invalid_argument);
    ChiTensors chi;
    chi.chi1 = Eigen::MatrixXd::Zero(3, 3);
    chi.chi2 = Tensor4(3);
    CHECK_THROWS_AS(fit_interaction(chi, grid, "nope", Eigen::Vector2d(1, 1), {}),
                    std::invalid_argument);
}
