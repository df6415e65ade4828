#include "ccdf/flow.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace ccdf {

FlowResult run_flow(const BareHamiltonian& h, const FlowSpec& spec) {
    if (spec.active_spaces.empty()) throw std::invalid_argument("run_flow: no active spaces");
    for (const auto& as : spec.active_spaces) {
        const SesCheck check = is_ses(as, h.basis, spec.cc_rank);
        if (!check.is_ses)
            throw std::invalid_argument("run_flow: active space is not a SES (" + check.explanation +
                                        ")");
    }

    const int m = static_cast<int>(spec.active_spaces.size());
    std::vector<AmplitudeMask> internal(m);
    for (int i = 0; i < m; ++i)
        internal[i] = internal_mask(h.basis, spec.active_spaces[i], spec.cc_rank);

    FlowState state;
    state.pooled = ClusterOperator(h.basis, spec.cc_rank);
    state.subproblems.resize(m);
    for (int i = 0; i < m; ++i) {
        SpaceConstraint c;
        c.active_mask = spec.active_spaces[i].spin_mask();
        state.subproblems[i].cas_dimension = enumerate_space(h.basis, h.basis.n_elec(), c).size();
        state.subproblems[i].internal_amplitudes = static_cast<int>(internal[i].size());
    }

    double relaxation = spec.relaxation;
    int sign_flips = 0;
    double prev_energy = 0.0, prev_change = 0.0;
    bool have_prev = false;

    for (int sweep = 1; sweep <= spec.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (int i = 0; i < m; ++i) {
            // everything outside this sub-algebra's internal set is external
            ClusterOperator frozen(h.basis, spec.cc_rank);
            ClusterOperator start(h.basis, spec.cc_rank);
            for (const auto& [sig, val] : state.pooled.amplitudes())
                (internal[i].contains(sig) ? start : frozen).set(sig, val);

            SolveOptions opts;
            opts.tol = spec.cc_tol;
            opts.max_iter = spec.cc_max_iter;
            opts.frozen = frozen;
            opts.initial = start;
            const CCResult sub = solve_cc(h, internal[i], opts);
            if (!sub.converged)
                throw std::runtime_error("run_flow: sub-problem " + std::to_string(i) +
                                         " failed to converge");
            for (const auto& sig : internal[i].signatures()) {
                const double oldv = state.pooled.get(sig);
                const double newv = oldv + relaxation * (sub.t.get(sig) - oldv);
                max_change = std::max(max_change, std::abs(newv - oldv));
                state.pooled.set(sig, newv);  // Gauss-Seidel write-back
            }
        }
        state.sweeps = sweep;
        const double energy = cc_energy(h, state.pooled);
        state.sweep_energies.push_back(energy);
        state.amplitude_changes.push_back(max_change);

        if (have_prev) {
            const double change = energy - prev_energy;
            if (change * prev_change < 0.0) {
                if (++sign_flips >= 3 && relaxation > 0.5) {
                    relaxation = 0.5;
                    state.oscillation_detected = true;
                    sign_flips = 0;
                }
            } else {
                sign_flips = 0;
            }
            prev_change = change;
        } else {
            have_prev = true;
        }
        prev_energy = energy;

        if (max_change < spec.sweep_tol) {
            state.converged = true;
            break;
        }
    }

    // per-subproblem eigenvalues at the final pooled amplitudes
    for (int i = 0; i < m; ++i) {
        ClusterOperator ext(h.basis, spec.cc_rank);
        for (const auto& [sig, val] : state.pooled.amplitudes())
            if (!internal[i].contains(sig)) ext.set(sig, val);
        const EffectiveHamiltonian heff = build_heff_ses(h, ext, spec.active_spaces[i]);
        const int ref_idx = heff.cas_space.index_of(h.basis.reference_mask());
        state.subproblems[i].eigenvalue = eig_nonhermitian(heff.matrix, ref_idx).energy;
    }

    FlowResult out;
    out.energy = cc_energy(h, state.pooled);
    out.state = std::move(state);
    return out;
}

nlohmann::json flow_report(const FlowState& state) {
    nlohmann::json j;
    j["sweeps"] = state.sweeps;
    j["converged"] = state.converged;
    j["oscillation_detected"] = state.oscillation_detected;
    j["energy_trajectory"] = state.sweep_energies;
    j["amplitude_change_trajectory"] = state.amplitude_changes;
    bool monotone = true;
    for (std::size_t i = 1; i < state.sweep_energies.size(); ++i)
        monotone &= state.sweep_energies[i] <= state.sweep_energies[i - 1] + 1e-14;
    j["energy_trajectory_monotone"] = monotone;
    if (!state.amplitude_changes.empty()) j["final_amplitude_change"] = state.amplitude_changes.back();
    auto& subs = j["subproblems"] = nlohmann::json::array();
    for (const auto& sp : state.subproblems)
        subs.push_back({{"cas_dimension", sp.cas_dimension},
                        {"internal_amplitudes", sp.internal_amplitudes},
                        {"eigenvalue", sp.eigenvalue}});
    j["pooled_amplitudes"] = state.pooled.size();
    return j;
}

}  // namespace ccdf
