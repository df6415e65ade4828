#pragma once

#include <optional>

#include "ccdf/dense.hpp"

namespace ccdf {

struct CCResult {
    ClusterOperator t;
    double energy = 0.0;              // total, Hartree
    double correlation_energy = 0.0;  // energy - reference_energy
    double residual_norm = 0.0;       // max-norm over masked residuals
    int iterations = 0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-9;      // residual max-norm
    int max_iter = 200;
    bool diis = true;       // plain Jacobi iteration when off
    int diis_depth = 8;
    /// Amplitudes held fixed during the solve (flow subproblems); keys must
    /// be disjoint from the mask.
    std::optional<ClusterOperator> frozen;
    /// Starting values for masked amplitudes (defaults to the MP1-like guess).
    std::optional<ClusterOperator> initial;
};

/// Solve the connected CC equations <D_mu| e^{-T} H e^{T} |Phi> = 0 for all
/// masked signatures, residuals evaluated exactly in the dense engine on the
/// full determinant space.
CCResult solve_cc(const BareHamiltonian& h, const AmplitudeMask& mask,
                  const SolveOptions& opts = {});

/// E = <Phi| e^{-T} H e^{T} |Phi> in the dense engine.
double cc_energy(const BareHamiltonian& h, const ClusterOperator& t);

/// <Phi| H e^{T} |Phi>: the energy-dependent form projected on the reference.
double cc_energy_projected(const BareHamiltonian& h, const ClusterOperator& t);

/// Residuals <D_mu| e^{-T} H e^{T} |Phi> per masked signature, in mask order.
std::vector<double> residual_vector(const BareHamiltonian& h, const ClusterOperator& t,
                                    const AmplitudeMask& mask);

}  // namespace ccdf
