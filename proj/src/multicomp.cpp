#include "ccdf/multicomp.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

#include "ccdf/diis.hpp"

namespace ccdf {

bool CouplingTensor::zero() const {
    for (double v : data_)
        if (v != 0.0) return false;
    return true;
}

CompositeSpace::CompositeSpace(const CompositeBasis& basis)
    : basis_(basis),
      space_a_(enumerate_space(basis.basis_a, basis.basis_a.n_elec())),
      space_b_(enumerate_space(basis.basis_b, basis.basis_b.n_elec())) {
    if (size() > kDefaultDimensionCap)
        throw std::invalid_argument("CompositeSpace: dimension cap exceeded");
}

int CompositeSpace::reference_index() const {
    return index(space_a_.index_of(basis_.basis_a.reference_mask()),
                 space_b_.index_of(basis_.basis_b.reference_mask()));
}

void CompositeHamiltonian::validate() const {
    const int na = basis.basis_a.n_spinorb();
    const int nb = basis.basis_b.n_spinorb();
    if (v_ab.dim_a() != na || v_ab.dim_b() != nb)
        throw std::invalid_argument("CompositeHamiltonian: coupling tensor dimensions mismatch");
    for (int p = 0; p < na; ++p)
        for (int q = 0; q < na; ++q)
            for (int r = 0; r < nb; ++r)
                for (int s = 0; s < nb; ++s)
                    if (std::abs(v_ab(p, q, r, s) - v_ab(q, p, s, r)) > 1e-12)
                        throw std::invalid_argument(
                            "CompositeHamiltonian: coupling not Hermitian under (p<->q, r<->s)");
}

CompositeDeterminant composite_reference(const CompositeBasis& cb) {
    return {cb.basis_a.reference_mask(), cb.basis_b.reference_mask()};
}

namespace {

/// Dense matrix of a+_p a_q on a species space.
Eigen::MatrixXd transition_matrix(const DeterminantSpace& space, int p, int q) {
    const int d = space.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int col = 0; col < d; ++col) {
        std::uint64_t mask = space.det(col).mask;
        int sign = apply_annihilate(mask, q);
        if (!sign) continue;
        sign *= apply_create(mask, p);
        if (!sign || !space.contains(mask)) continue;
        m(space.index_of(mask), col) += sign;
    }
    return m;
}

}  // namespace

Eigen::MatrixXd build_composite_matrix(const CompositeHamiltonian& ch, const CompositeSpace& space) {
    ch.validate();
    const auto& sa = space.space_a();
    const auto& sb = space.space_b();
    const int da = sa.size(), db = sb.size();
    const Eigen::MatrixXd ha = build_matrix(ch.h_a, sa).matrix;
    const Eigen::MatrixXd hb = build_matrix(ch.h_b, sb).matrix;

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(da * db, da * db);
    for (int ia = 0; ia < da; ++ia)
        for (int ja = 0; ja < da; ++ja)
            if (ha(ia, ja) != 0.0)
                for (int ib = 0; ib < db; ++ib) m(space.index(ia, ib), space.index(ja, ib)) += ha(ia, ja);
    for (int ib = 0; ib < db; ++ib)
        for (int jb = 0; jb < db; ++jb)
            if (hb(ib, jb) != 0.0)
                for (int ia = 0; ia < da; ++ia) m(space.index(ia, ib), space.index(ia, jb)) += hb(ib, jb);

    const int na = ch.basis.basis_a.n_spinorb();
    const int nb = ch.basis.basis_b.n_spinorb();
    for (int p = 0; p < na; ++p)
        for (int q = 0; q < na; ++q) {
            bool any = false;
            for (int r = 0; r < nb && !any; ++r)
                for (int s = 0; s < nb && !any; ++s) any = ch.v_ab(p, q, r, s) != 0.0;
            if (!any) continue;
            const Eigen::MatrixXd ea = transition_matrix(sa, p, q);
            for (int r = 0; r < nb; ++r)
                for (int s = 0; s < nb; ++s) {
                    const double w = ch.v_ab(p, q, r, s);
                    if (w == 0.0) continue;
                    const Eigen::MatrixXd eb = transition_matrix(sb, r, s);
                    for (int ia = 0; ia < da; ++ia)
                        for (int ja = 0; ja < da; ++ja) {
                            if (ea(ia, ja) == 0.0) continue;
                            for (int ib = 0; ib < db; ++ib)
                                for (int jb = 0; jb < db; ++jb)
                                    if (eb(ib, jb) != 0.0)
                                        m(space.index(ia, ib), space.index(ja, jb)) +=
                                            w * ea(ia, ja) * eb(ib, jb);
                        }
                }
        }
    return m;
}

namespace {

/// Apply one species signature to a species determinant; sign 0 when blocked.
std::pair<std::uint64_t, int> apply_sig(const ExcitationSig& sig, std::uint64_t mask) {
    int sign = 1;
    for (int i : sig.occ) {
        sign *= apply_annihilate(mask, i);
        if (!sign) return {0, 0};
    }
    for (auto it = sig.virt.rbegin(); it != sig.virt.rend(); ++it) {
        sign *= apply_create(mask, *it);
        if (!sign) return {0, 0};
    }
    return {mask, sign};
}

}  // namespace

Eigen::MatrixXd composite_cluster_matrix(const CompositeCluster& t, const CompositeSpace& space) {
    const auto& sa = space.space_a();
    const auto& sb = space.space_b();
    const int da = sa.size(), db = sb.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(da * db, da * db);

    for (const auto& [sig, amp] : t.t_a.amplitudes())
        for (int ja = 0; ja < da; ++ja) {
            const auto [mask, sign] = apply_sig(sig, sa.det(ja).mask);
            if (!sign) continue;
            const int ia = sa.index_of(mask);
            for (int ib = 0; ib < db; ++ib) m(space.index(ia, ib), space.index(ja, ib)) += sign * amp;
        }
    for (const auto& [sig, amp] : t.t_b.amplitudes())
        for (int jb = 0; jb < db; ++jb) {
            const auto [mask, sign] = apply_sig(sig, sb.det(jb).mask);
            if (!sign) continue;
            const int ib = sb.index_of(mask);
            for (int ia = 0; ia < da; ++ia) m(space.index(ia, ib), space.index(ia, jb)) += sign * amp;
        }
    for (const auto& [jsig, amp] : t.s_ab)
        for (int ja = 0; ja < da; ++ja) {
            const auto [mask_a, sign_a] = apply_sig(jsig.a, sa.det(ja).mask);
            if (!sign_a) continue;
            const int ia = sa.index_of(mask_a);
            for (int jb = 0; jb < db; ++jb) {
                const auto [mask_b, sign_b] = apply_sig(jsig.b, sb.det(jb).mask);
                if (!sign_b) continue;
                m(space.index(ia, sb.index_of(mask_b)), space.index(ja, jb)) += sign_a * sign_b * amp;
            }
        }
    return m;
}

CompositeMask full_composite_mask(const CompositeBasis& basis, int rank_a, int rank_b) {
    CompositeMask mask;
    const AmplitudeMask ma = full_mask(basis.basis_a, rank_a);
    const AmplitudeMask mb = full_mask(basis.basis_b, rank_b);
    mask.a_sigs = ma.signatures();
    mask.b_sigs = mb.signatures();
    for (const auto& a : mask.a_sigs)
        for (const auto& b : mask.b_sigs) mask.joint_sigs.insert({a, b});
    return mask;
}

CompositeCCResult solve_cc_composite(const CompositeHamiltonian& ch, const CompositeMask& mask,
                                     double tol, int max_iter) {
    if (mask.empty()) throw std::invalid_argument("solve_cc_composite: empty mask");
    const CompositeSpace space(ch.basis);
    const Eigen::MatrixXd hmat = build_composite_matrix(ch, space);
    const int ref = space.reference_index();

    // species Fock diagonals with the mean-field coupling shift
    const FockOperator fa = build_fock(ch.h_a);
    const FockOperator fb = build_fock(ch.h_b);
    const int na = ch.basis.basis_a.n_spinorb();
    const int nb = ch.basis.basis_b.n_spinorb();
    Eigen::VectorXd fa_diag(na), fb_diag(nb);
    for (int p = 0; p < na; ++p) {
        fa_diag(p) = fa.f(p, p);
        for (int r : ch.basis.basis_b.occupied()) fa_diag(p) += ch.v_ab(p, p, r, r);
    }
    for (int r = 0; r < nb; ++r) {
        fb_diag(r) = fb.f(r, r);
        for (int p : ch.basis.basis_a.occupied()) fb_diag(r) += ch.v_ab(p, p, r, r);
    }

    struct Slot {
        const ExcitationSig* a = nullptr;
        const ExcitationSig* b = nullptr;
    };
    std::vector<Slot> slots;
    for (const auto& s : mask.a_sigs) slots.push_back({&s, nullptr});
    for (const auto& s : mask.b_sigs) slots.push_back({nullptr, &s});
    for (const auto& js : mask.joint_sigs) slots.push_back({&js.a, &js.b});
    const int n = static_cast<int>(slots.size());

    Eigen::VectorXd denom(n);
    std::vector<std::pair<int, int>> targets(n);  // composite index, phase
    for (int k = 0; k < n; ++k) {
        double d = 0.0;
        int ia = space.space_a().index_of(ch.basis.basis_a.reference_mask());
        int ib = space.space_b().index_of(ch.basis.basis_b.reference_mask());
        int phase = 1;
        if (slots[k].a) {
            for (int i : slots[k].a->occ) d += fa_diag(i);
            for (int a : slots[k].a->virt) d -= fa_diag(a);
            const auto [mask_a, sign] = apply_sig(*slots[k].a, ch.basis.basis_a.reference_mask());
            ia = space.space_a().index_of(mask_a);
            phase *= sign;
        }
        if (slots[k].b) {
            for (int i : slots[k].b->occ) d += fb_diag(i);
            for (int a : slots[k].b->virt) d -= fb_diag(a);
            const auto [mask_b, sign] = apply_sig(*slots[k].b, ch.basis.basis_b.reference_mask());
            ib = space.space_b().index_of(mask_b);
            phase *= sign;
        }
        if (std::abs(d) < 1e-10)
            throw std::runtime_error("solve_cc_composite: near-zero amplitude denominator");
        denom(k) = d;
        targets[k] = {space.index(ia, ib), phase};
    }

    auto make_t = [&](const Eigen::VectorXd& x) {
        CompositeCluster t;
        int ra = 1, rb = 1;
        for (const auto& s : mask.a_sigs) ra = std::max(ra, s.rank());
        for (const auto& s : mask.b_sigs) rb = std::max(rb, s.rank());
        for (const auto& js : mask.joint_sigs) {
            ra = std::max(ra, js.a.rank());
            rb = std::max(rb, js.b.rank());
        }
        t.t_a = ClusterOperator(ch.basis.basis_a, ra);
        t.t_b = ClusterOperator(ch.basis.basis_b, rb);
        for (int k = 0; k < n; ++k) {
            if (slots[k].a && slots[k].b)
                t.s_ab[{*slots[k].a, *slots[k].b}] = x(k);
            else if (slots[k].a)
                t.t_a.set(*slots[k].a, x(k));
            else
                t.t_b.set(*slots[k].b, x(k));
        }
        return t;
    };

    Eigen::VectorXd ref_vec = Eigen::VectorXd::Zero(space.size());
    ref_vec(ref) = 1.0;
    auto hbar_on_ref = [&](const CompositeCluster& t) {
        const Eigen::MatrixXd tm = composite_cluster_matrix(t, space);
        Eigen::VectorXd psi = apply_exp_nilpotent(tm, ref_vec);
        psi = (hmat * psi).eval();
        return apply_exp_nilpotent(-tm, psi);
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    DiisAccelerator diis;
    CompositeCCResult result;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd hb = hbar_on_ref(make_t(x));
        result.energy = hb(ref);
        Eigen::VectorXd r(n);
        for (int k = 0; k < n; ++k) r(k) = targets[k].second * hb(targets[k].first);
        result.iterations = it;
        result.residual_norm = r.cwiseAbs().maxCoeff();
        if (result.residual_norm <= tol) {
            result.converged = true;
            break;
        }
        x = diis.extrapolate(x + r.cwiseQuotient(denom), r);
    }
    result.t = make_t(x);
    return result;
}

namespace {

EffectiveHamiltonian project_a_sector(const CompositeHamiltonian& ch, const CompositeSpace& space,
                                      const Eigen::MatrixXd& transformed, bool hermitian,
                                      const char* method) {
    const auto& sa = space.space_a();
    const int da = sa.size();
    const int ib_ref = space.space_b().index_of(ch.basis.basis_b.reference_mask());
    Eigen::MatrixXd proj(da, da);
    for (int r = 0; r < da; ++r)
        for (int c = 0; c < da; ++c) proj(r, c) = transformed(space.index(r, ib_ref), space.index(c, ib_ref));
    double asym = 0.0;
    if (hermitian) {
        asym = (proj - proj.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-8)
            throw std::runtime_error(std::string(method) + ": projected asymmetry exceeds 1e-8");
        proj = (0.5 * (proj + proj.transpose())).eval();
    }
    const int n_occ_spatial = ch.basis.basis_a.n_occ() / 2;
    std::set<int> r_all, s_all;
    for (int p = 0; p < n_occ_spatial; ++p) r_all.insert(p);
    for (int p = n_occ_spatial; p < ch.basis.basis_a.n_spatial(); ++p) s_all.insert(p);
    ActiveSpace active(ch.basis.basis_a, r_all, s_all);
    DenseOperator op{sa, std::move(proj)};
    return {std::move(active), sa, std::move(op), hermitian, method, 0, std::nullopt, asym};
}

}  // namespace

EffectiveHamiltonian downfold_B(const CompositeHamiltonian& ch, const ClusterOperator& t_b,
                                const std::map<JointSig, double>& s_ab) {
    const CompositeSpace space(ch.basis);
    const Eigen::MatrixXd hmat = build_composite_matrix(ch, space);
    CompositeCluster ext;
    ext.t_a = ClusterOperator(ch.basis.basis_a, 0);
    ext.t_b = t_b;
    ext.s_ab = s_ab;
    const Eigen::MatrixXd tm = composite_cluster_matrix(ext, space);
    const Eigen::MatrixXd hbar = expm_nilpotent(-tm) * hmat * expm_nilpotent(tm);
    return project_a_sector(ch, space, hbar, false, "multicomp-downfold");
}

EffectiveHamiltonian ducc_downfold_B(const CompositeHamiltonian& ch, const ClusterOperator& t_b,
                                     const std::map<JointSig, double>& s_ab,
                                     CompositeDuccMode mode) {
    const CompositeSpace space(ch.basis);
    const Eigen::MatrixXd hmat = build_composite_matrix(ch, space);
    CompositeCluster ext;
    ext.t_a = ClusterOperator(ch.basis.basis_a, 0);
    ext.t_b = t_b;
    ext.s_ab = s_ab;
    const Eigen::MatrixXd tm = composite_cluster_matrix(ext, space);
    const Eigen::MatrixXd g = tm - tm.transpose();

    Eigen::MatrixXd transformed;
    if (mode == CompositeDuccMode::exact) {
        transformed = (-g).exp() * hmat * g.exp();
    } else {
        // composite normal-ordered Fock with the mean-field coupling
        const FockOperator fa = build_fock(ch.h_a);
        const FockOperator fb = build_fock(ch.h_b);
        Eigen::MatrixXd fa_eff = fa.f, fb_eff = fb.f;
        for (int p = 0; p < fa_eff.rows(); ++p)
            for (int q = 0; q < fa_eff.cols(); ++q)
                for (int r : ch.basis.basis_b.occupied()) fa_eff(p, q) += ch.v_ab(p, q, r, r);
        for (int r = 0; r < fb_eff.rows(); ++r)
            for (int s = 0; s < fb_eff.cols(); ++s)
                for (int p : ch.basis.basis_a.occupied()) fb_eff(r, s) += ch.v_ab(p, p, r, s);
        const Eigen::MatrixXd fa_m = build_one_body(fa_eff, space.space_a()).matrix;
        const Eigen::MatrixXd fb_m = build_one_body(fb_eff, space.space_b()).matrix;
        Eigen::MatrixXd fn = Eigen::MatrixXd::Zero(space.size(), space.size());
        for (int ia = 0; ia < space.space_a().size(); ++ia)
            for (int ja = 0; ja < space.space_a().size(); ++ja)
                if (fa_m(ia, ja) != 0.0)
                    for (int ib = 0; ib < space.space_b().size(); ++ib)
                        fn(space.index(ia, ib), space.index(ja, ib)) += fa_m(ia, ja);
        for (int ib = 0; ib < space.space_b().size(); ++ib)
            for (int jb = 0; jb < space.space_b().size(); ++jb)
                if (fb_m(ib, jb) != 0.0)
                    for (int ia = 0; ia < space.space_a().size(); ++ia)
                        fn(space.index(ia, ib), space.index(ia, jb)) += fb_m(ib, jb);
        fn.diagonal().array() -= fn(space.reference_index(), space.reference_index());

        const Eigen::MatrixXd hg = hmat * g - g * hmat;
        const Eigen::MatrixXd fg = fn * g - g * fn;
        const Eigen::MatrixXd fgg = fg * g - g * fg;
        if (mode == CompositeDuccMode::c1) {
            transformed = hmat + hg + 0.5 * fgg;
        } else {
            const Eigen::MatrixXd hgg = hg * g - g * hg;
            const Eigen::MatrixXd fggg = fgg * g - g * fgg;
            transformed = hmat + hg + 0.5 * hgg + fggg / 6.0;
        }
    }
    const char* method = mode == CompositeDuccMode::exact  ? "multicomp-ducc-exact"
                         : mode == CompositeDuccMode::c1   ? "multicomp-ducc-c1"
                                                           : "multicomp-ducc-c2";
    return project_a_sector(ch, space, transformed, true, method);
}

CompositeHamiltonian lattice_pair_model(const LatticeSpeciesParams& a,
                                        const LatticeSpeciesParams& b, double coupling_w) {
    auto make_species = [](const LatticeSpeciesParams& p) {
        IntegralSet s;
        s.n_spatial = p.n_sites;
        s.n_elec = p.n_particles;
        s.ms2 = 0;
        s.e_core = 0.0;
        s.h_spatial = Eigen::MatrixXd::Zero(p.n_sites, p.n_sites);
        s.eri_spatial = Tensor4(p.n_sites);
        for (int i = 0; i < p.n_sites; ++i) {
            s.h_spatial(i, i) = i * p.site_ramp;
            if (i + 1 < p.n_sites) {
                s.h_spatial(i, i + 1) = -p.hopping;
                s.h_spatial(i + 1, i) = -p.hopping;
            }
            s.eri_spatial(i, i, i, i) = p.on_site_u;
        }
        return to_spinorbital(s);
    };
    CompositeHamiltonian ch;
    ch.h_a = make_species(a);
    ch.h_b = make_species(b);
    ch.basis = {ch.h_a.basis, ch.h_b.basis};
    ch.v_ab = CouplingTensor(ch.basis.basis_a.n_spinorb(), ch.basis.basis_b.n_spinorb());
    const int sites = std::min(a.n_sites, b.n_sites);
    for (int site = 0; site < sites; ++site)
        for (int sp_a = 0; sp_a < 2; ++sp_a)
            for (int sp_b = 0; sp_b < 2; ++sp_b)
                ch.v_ab(2 * site + sp_a, 2 * site + sp_a, 2 * site + sp_b, 2 * site + sp_b) =
                    coupling_w;
    return ch;
}

Eigen::MatrixXd composite_number_operator(const CompositeSpace& space, bool species_a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.size(), space.size());
    for (int i = 0; i < space.size(); ++i) {
        const CompositeDeterminant d = space.det(i);
        m(i, i) = std::popcount(species_a ? d.a : d.b);
    }
    return m;
}

}  // namespace ccdf
