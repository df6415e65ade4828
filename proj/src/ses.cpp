#include "ccdf/ses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccdf {

ActiveSpace::ActiveSpace(const SpinOrbitalBasis& basis, std::set<int> occ_spatial,
                         std::set<int> virt_spatial)
    : occ_(std::move(occ_spatial)), virt_(std::move(virt_spatial)) {
    if (occ_.empty() || virt_.empty())
        throw std::invalid_argument("ActiveSpace: R and S must be nonempty");
    const int n_occ_spatial = basis.n_occ() / 2;
    for (int p : occ_)
        if (p < 0 || p >= n_occ_spatial)
            throw std::invalid_argument("ActiveSpace: orbital " + std::to_string(p) +
                                        " is not an occupied spatial orbital");
    for (int p : virt_)
        if (p < n_occ_spatial || p >= basis.n_spatial())
            throw std::invalid_argument("ActiveSpace: orbital " + std::to_string(p) +
                                        " is not a virtual spatial orbital");
    for (int p : occ_) {
        spinorbs_.push_back(2 * p);
        spinorbs_.push_back(2 * p + 1);
    }
    for (int p : virt_) {
        spinorbs_.push_back(2 * p);
        spinorbs_.push_back(2 * p + 1);
    }
    std::sort(spinorbs_.begin(), spinorbs_.end());
    for (int so : spinorbs_) mask_ |= std::uint64_t{1} << so;
}

ActiveSpace ActiveSpace::lowest(const SpinOrbitalBasis& basis, int n_occ_spatial,
                                int n_virt_spatial) {
    std::set<int> r, s;
    const int occ_spatial = basis.n_occ() / 2;
    for (int p = 0; p < n_occ_spatial; ++p) r.insert(p);
    for (int p = occ_spatial; p < occ_spatial + n_virt_spatial; ++p) s.insert(p);
    return ActiveSpace(basis, std::move(r), std::move(s));
}

SesCheck is_ses(const ActiveSpace& active, const SpinOrbitalBasis& basis, int cc_rank) {
    const int n_ao = 2 * active.x_r();  // active occupied spin orbitals
    const int n_av = 2 * active.y_s();
    const int max_cas_rank = std::min(n_ao, n_av);
    SesCheck out;
    out.is_ses = max_cas_rank <= cc_rank;
    std::ostringstream os;
    os << "CAS excitations reach rank min(" << n_ao << " active occupied, " << n_av
       << " active virtual) = " << max_cas_rank << (out.is_ses ? " <= " : " > ")
       << "cluster rank " << cc_rank;
    out.explanation = os.str();
    return out;
}

std::pair<ClusterOperator, ClusterOperator> partition(const ClusterOperator& t,
                                                      const ActiveSpace& active) {
    ClusterOperator t_int(t.basis(), t.rank_bound());
    ClusterOperator t_ext(t.basis(), t.rank_bound());
    for (const auto& [sig, val] : t.amplitudes()) {
        bool all_active = true;
        for (int i : sig.occ) all_active &= active.is_active(i);
        for (int a : sig.virt) all_active &= active.is_active(a);
        (all_active ? t_int : t_ext).set(sig, val);
    }
    return {std::move(t_int), std::move(t_ext)};
}

AmplitudeMask internal_mask(const SpinOrbitalBasis& basis, const ActiveSpace& active, int max_rank) {
    const AmplitudeMask full = full_mask(basis, max_rank);
    std::set<ExcitationSig> sigs;
    for (const auto& sig : full.signatures()) {
        bool all_active = true;
        for (int i : sig.occ) all_active &= active.is_active(i);
        for (int a : sig.virt) all_active &= active.is_active(a);
        if (all_active) sigs.insert(sig);
    }
    return AmplitudeMask(basis, std::move(sigs));
}

DenseOperator project_hbar(const BareHamiltonian& h, const ClusterOperator& t_ext,
                           const std::vector<Determinant>& dets) {
    const DeterminantSpace full = enumerate_space(h.basis, h.basis.n_elec());
    if (full.size() > kDefaultDimensionCap)
        throw std::invalid_argument("project_hbar: dimension cap exceeded, use a smaller test system");
    const Eigen::MatrixXd hmat = build_matrix(h, full).matrix;
    const Eigen::MatrixXd tm = cluster_matrix(t_ext, full).matrix;
    const Eigen::MatrixXd hbar = expm_nilpotent(-tm) * hmat * expm_nilpotent(tm);

    const int d = static_cast<int>(dets.size());
    Eigen::MatrixXd proj(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            proj(r, c) = hbar(full.index_of(dets[r].mask), full.index_of(dets[c].mask));
    return {DeterminantSpace(h.basis, dets), std::move(proj)};
}

EffectiveHamiltonian build_heff_ses(const BareHamiltonian& h, const ClusterOperator& t_ext,
                                    const ActiveSpace& active) {
    for (const auto& [sig, val] : t_ext.amplitudes()) {
        bool all_active = true;
        for (int i : sig.occ) all_active &= active.is_active(i);
        for (int a : sig.virt) all_active &= active.is_active(a);
        if (all_active)
            throw std::invalid_argument("build_heff_ses: t_ext contains an all-active amplitude");
    }
    SpaceConstraint cas_constraint;
    cas_constraint.active_mask = active.spin_mask();
    const DeterminantSpace cas = enumerate_space(h.basis, h.basis.n_elec(), cas_constraint);
    DenseOperator proj = project_hbar(h, t_ext, cas.determinants());
    return {active, cas, std::move(proj), false, "ses", t_ext.content_hash(), std::nullopt};
}

SesEnergy ses_energy(const BareHamiltonian& h, const ClusterOperator& t, const ActiveSpace& active,
                     bool force) {
    const SesCheck check = is_ses(active, h.basis, t.rank_bound());
    if (!check.is_ses && !force)
        throw std::invalid_argument("ses_energy: active space is not a SES for this truncation (" +
                                    check.explanation + "); pass force to proceed anyway");
    auto [t_int, t_ext] = partition(t, active);
    const EffectiveHamiltonian heff = build_heff_ses(h, t_ext, active);
    const int ref_idx = heff.cas_space.index_of(h.basis.reference_mask());
    const NonHermitianEig eig = eig_nonhermitian(heff.matrix, ref_idx);

    SesEnergy out;
    out.energy = eig.energy;
    out.internal_vector = eig.right_vector;
    out.reference_overlap = eig.reference_overlap;

    // diagnostic: at the CC solution the eigenvector is parallel to e^{T_int}|Phi>
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(heff.cas_space.size());
    ref(ref_idx) = 1.0;
    const Eigen::MatrixXd tint_m = cluster_matrix(t_int, heff.cas_space).matrix;
    const Eigen::VectorXd param = apply_exp_nilpotent(tint_m, ref);
    out.parametrization_cosine =
        std::abs(param.dot(eig.right_vector)) / (param.norm() * eig.right_vector.norm());
    return out;
}

void save_effective(const EffectiveHamiltonian& heff, const std::string& base_path) {
    save_dense(heff.matrix, base_path, heff.method);
    if (!heff.tensor_form) return;
    const auto& tf = *heff.tensor_form;
    std::ofstream out(base_path + ".effdump");
    if (!out) throw std::runtime_error("save_effective: cannot write " + base_path + ".effdump");
    const int k = static_cast<int>(tf.active_orbitals.size());
    std::uint64_t active_mask = 0;
    for (int p : tf.active_orbitals) active_mask |= std::uint64_t{1} << p;
    const int n_active_elec =
        std::popcount(heff.cas_space.basis().reference_mask() & active_mask);
    out << "&FCI NORB=" << k << ",NELEC=" << n_active_elec
        << ",MS2=0,HERMITIAN=" << (heff.hermitian ? 1 : 0) << ",RESIDUAL=" << tf.residual_norm
        << ",\n&END\n";
    char buf[80];
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    if (std::abs(tf.chi2(p, q, r, s)) > 1e-14) {
                        std::snprintf(buf, sizeof buf, "%23.15E %4d %4d %4d %4d\n",
                                      tf.chi2(p, q, r, s), p + 1, q + 1, r + 1, s + 1);
                        out << buf;
                    }
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            if (std::abs(tf.chi1(p, q)) > 1e-14) {
                std::snprintf(buf, sizeof buf, "%23.15E %4d %4d    0    0\n", tf.chi1(p, q), p + 1,
                              q + 1);
                out << buf;
            }
    std::snprintf(buf, sizeof buf, "%23.15E    0    0    0    0\n", tf.scalar);
    out << buf;
}

}  // namespace ccdf
