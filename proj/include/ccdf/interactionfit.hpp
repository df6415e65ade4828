#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdf/tensor4.hpp"

namespace ccdf {

/// 1D quadrature grid with per-orbital amplitude tables phi_P(x_k).
struct OrbitalGrid {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
    Eigen::MatrixXd orbitals;  // n_points x n_orbitals

    int n_points() const { return static_cast<int>(points.size()); }
    int n_orbitals() const { return static_cast<int>(orbitals.cols()); }

    /// Throws when weights are not positive or the overlap matrix deviates
    /// from identity by more than 1e-6.
    void validate() const;
};

/// Uniform trapezoid grid of harmonic-oscillator eigenfunctions on
/// [-extent, extent].
OrbitalGrid harmonic_oscillator_grid(int n_orbitals, int n_points = 301, double extent = 12.0);

/// Text file: `x  w  phi_0(x) .. phi_{n-1}(x)` per line.
OrbitalGrid read_grid(std::istream& in);
void write_grid(const OrbitalGrid& grid, std::ostream& out);

/// Registered parametric interaction family: pointwise one-body u(gamma; x)
/// or two-body g(delta; x1, x2, r12).
struct InteractionFamily {
    std::string id;
    int arity = 0;          // parameter count
    bool two_body = false;
    std::function<double(const Eigen::VectorXd&, double)> u;  // params, x
    std::function<double(const Eigen::VectorXd&, double, double, double)> g;  // params, x1, x2, r12
    Eigen::VectorXd lower_bounds;
    Eigen::VectorXd upper_bounds;
};

const InteractionFamily& family(const std::string& id);
std::vector<std::string> family_ids();

struct InteractionModel {
    std::string family_id;
    Eigen::VectorXd params;
};

/// One- and two-body fitting targets; the two-body tensor is in the
/// non-antisymmetrized convention chi^PQ_RS.
struct ChiTensors {
    Eigen::MatrixXd chi1;
    Tensor4 chi2;
};

/// u^P_Q(gamma) = sum_k w_k phi_Q(x_k) u(gamma; x_k) phi_P(x_k).
Eigen::MatrixXd eval_u(const InteractionModel& model, const OrbitalGrid& grid);

/// g^PQ_RS(delta) = sum_kl w_k w_l phi_R(x_k) phi_S(x_l) g phi_P(x_k) phi_Q(x_l).
Tensor4 eval_g(const InteractionModel& model, const OrbitalGrid& grid);

struct FitOptions {
    int budget = 10000;        // objective evaluations
    double initial_step = 0.1; // relative to parameter scale
    double step_tol = 1e-12;
};

struct FitReport {
    InteractionModel model;
    double objective = 0.0;           // final L1 value
    std::vector<double> trajectory;   // best-so-far objective per accepted move
    int evaluations = 0;
    bool converged = false;
    bool degenerate = false;          // flat objective warning
    Eigen::MatrixXd residual_one_body;        // |u - chi1| element-wise
    std::vector<double> residual_two_body;    // |g - chi2| flattened
};

/// L1 fit  min sum |u^P_Q(gamma) - chi^P_Q|  (or the two-body analogue)
/// by derivative-free compass pattern search within the family bounds.
FitReport fit_interaction(const ChiTensors& chi, const OrbitalGrid& grid,
                          const std::string& family_id, const Eigen::VectorXd& init,
                          const FitOptions& opts = {});

double l1_objective_one_body(const Eigen::MatrixXd& u, const Eigen::MatrixXd& chi1);
double l1_objective_two_body(const Tensor4& g, const Tensor4& chi2);

}  // namespace ccdf
