#pragma once

#include <nlohmann/json_fwd.hpp>

#include "ccdf/ses.hpp"

namespace ccdf {

/// Coupled active-space eigenproblems swept cyclically.
struct FlowSpec {
    std::vector<ActiveSpace> active_spaces;
    double sweep_tol = 1e-9;   // max amplitude change over a full sweep
    int max_sweeps = 100;
    int cc_rank = 2;
    double cc_tol = 1e-11;
    int cc_max_iter = 200;
    /// Relaxation factor applied to sub-problem updates; dropped to 0.5
    /// automatically after three consecutive energy-change sign alternations.
    double relaxation = 1.0;
};

struct FlowSubproblemRecord {
    int cas_dimension = 0;
    int internal_amplitudes = 0;
    double eigenvalue = 0.0;
};

struct FlowState {
    ClusterOperator pooled;           // union-keyed amplitude store
    std::vector<FlowSubproblemRecord> subproblems;
    std::vector<double> sweep_energies;       // projective CC energy per sweep
    std::vector<double> amplitude_changes;    // max change per sweep
    int sweeps = 0;
    bool converged = false;
    bool oscillation_detected = false;
};

struct FlowResult {
    double energy = 0.0;   // projective CC energy of the pooled operator
    FlowState state;
};

/// Cyclic Gauss-Seidel sweeps over the sub-algebra eigenproblems; at the
/// fixed point the pooled amplitudes solve the union-mask CC equations.
FlowResult run_flow(const BareHamiltonian& h, const FlowSpec& spec);

/// Structured JSON report: trajectory, CAS dimensions, change norms.
nlohmann::json flow_report(const FlowState& state);

}  // namespace ccdf
