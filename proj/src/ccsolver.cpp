#include "ccdf/ccsolver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ccdf/diis.hpp"

namespace ccdf {

namespace {

/// Workspace shared by residual evaluations on one system.
struct DenseWork {
    DeterminantSpace space;
    Eigen::MatrixXd hmat;
    Eigen::VectorXd ref;
    int ref_index;

    DenseWork(const BareHamiltonian& h)
        : space(enumerate_space(h.basis, h.basis.n_elec())),
          hmat(build_matrix(h, space).matrix),
          ref(Eigen::VectorXd::Zero(space.size())),
          ref_index(space.index_of(h.basis.reference_mask())) {
        ref(ref_index) = 1.0;
    }

    /// H-bar |Phi> = e^{-T} H e^{T} |Phi> as a coefficient vector.
    Eigen::VectorXd hbar_on_ref(const ClusterOperator& t) const {
        const Eigen::MatrixXd tm = cluster_matrix(t, space).matrix;
        Eigen::VectorXd psi = apply_exp_nilpotent(tm, ref);
        psi = (hmat * psi).eval();
        return apply_exp_nilpotent(-tm, psi);
    }

    /// Determinant index and phase of E_mu |Phi>.
    std::pair<int, int> excitation_target(const ExcitationSig& sig) const {
        std::uint64_t mask = space.basis().reference_mask();
        int sign = 1;
        for (int i : sig.occ) sign *= apply_annihilate(mask, i);
        for (auto it = sig.virt.rbegin(); it != sig.virt.rend(); ++it)
            sign *= apply_create(mask, *it);
        if (sign == 0) throw std::logic_error("excitation signature blocked on the reference");
        return {space.index_of(mask), sign};
    }
};

std::string name_pair(const ExcitationSig& sig) {
    std::ostringstream os;
    os << "occ(";
    for (std::size_t i = 0; i < sig.occ.size(); ++i) os << (i ? "," : "") << sig.occ[i];
    os << ")->virt(";
    for (std::size_t i = 0; i < sig.virt.size(); ++i) os << (i ? "," : "") << sig.virt[i];
    os << ")";
    return os.str();
}

}  // namespace

CCResult solve_cc(const BareHamiltonian& h, const AmplitudeMask& mask, const SolveOptions& opts) {
    if (mask.empty()) throw std::invalid_argument("solve_cc: empty amplitude mask");
    const FockOperator fock = build_fock(h);
    DenseWork work(h);

    std::vector<ExcitationSig> sigs(mask.signatures().begin(), mask.signatures().end());
    const int n = static_cast<int>(sigs.size());

    if (opts.frozen)
        for (const auto& [sig, val] : opts.frozen->amplitudes())
            if (mask.contains(sig))
                throw std::invalid_argument("solve_cc: frozen amplitude overlaps the mask");

    // denominators f_ii + f_jj - f_aa - f_bb
    Eigen::VectorXd denom(n);
    std::vector<std::pair<int, int>> targets(n);
    for (int k = 0; k < n; ++k) {
        double d = 0.0;
        for (int i : sigs[k].occ) d += fock.f(i, i);
        for (int a : sigs[k].virt) d -= fock.f(a, a);
        if (std::abs(d) < 1e-10)
            throw std::runtime_error("solve_cc: near-zero denominator for " + name_pair(sigs[k]) +
                                     " (degenerate frontier orbitals)");
        denom(k) = d;
        targets[k] = work.excitation_target(sigs[k]);
    }

    int rank_bound = opts.frozen ? opts.frozen->rank_bound() : 0;
    for (const auto& s : sigs) rank_bound = std::max(rank_bound, s.rank());
    auto make_t = [&](const Eigen::VectorXd& x) {
        ClusterOperator t(h.basis, rank_bound);
        for (int k = 0; k < n; ++k) t.set(sigs[k], x(k));
        if (opts.frozen) t.merge(*opts.frozen);
        return t;
    };

    auto residual = [&](const Eigen::VectorXd& x, double& energy) {
        const Eigen::VectorXd hb = work.hbar_on_ref(make_t(x));
        energy = hb(work.ref_index);
        Eigen::VectorXd r(n);
        for (int k = 0; k < n; ++k) r(k) = targets[k].second * hb(targets[k].first);
        return r;
    };

    // MP1-like start: doubles <ij||ab>/D, singles (and higher) zero
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        if (opts.initial) {
            x(k) = opts.initial->get(sigs[k]);
            continue;
        }
        if (sigs[k].rank() == 2)
            x(k) = h.v(sigs[k].occ[0], sigs[k].occ[1], sigs[k].virt[0], sigs[k].virt[1]) / denom(k);
    }

    DiisAccelerator diis(opts.diis_depth);
    CCResult result;
    double energy = fock.reference_energy;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const Eigen::VectorXd r = residual(x, energy);
        result.iterations = it;
        result.residual_norm = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
        if (result.residual_norm <= opts.tol) {
            result.converged = true;
            break;
        }
        const Eigen::VectorXd x_new = x + r.cwiseQuotient(denom);
        x = opts.diis ? diis.extrapolate(x_new, r) : x_new;
    }
    result.t = make_t(x);
    result.energy = energy;
    result.correlation_energy = energy - fock.reference_energy;
    return result;
}

double cc_energy(const BareHamiltonian& h, const ClusterOperator& t) {
    DenseWork work(h);
    return work.hbar_on_ref(t)(work.ref_index);
}

double cc_energy_projected(const BareHamiltonian& h, const ClusterOperator& t) {
    DenseWork work(h);
    const Eigen::MatrixXd tm = cluster_matrix(t, work.space).matrix;
    const Eigen::VectorXd psi = apply_exp_nilpotent(tm, work.ref);
    return work.ref.dot(work.hmat * psi);
}

std::vector<double> residual_vector(const BareHamiltonian& h, const ClusterOperator& t,
                                    const AmplitudeMask& mask) {
    DenseWork work(h);
    const Eigen::VectorXd hb = work.hbar_on_ref(t);
    std::vector<double> out;
    out.reserve(mask.size());
    for (const auto& sig : mask.signatures()) {
        const auto [idx, sign] = work.excitation_target(sig);
        out.push_back(sign * hb(idx));
    }
    return out;
}

}  // namespace ccdf
