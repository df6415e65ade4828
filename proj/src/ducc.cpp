#include "ccdf/ducc.hpp"

#include <cmath>
#include <stdexcept>

namespace ccdf {

Eigen::MatrixXd AntiHermitianGenerator::realize(const DeterminantSpace& space) const {
    const Eigen::MatrixXd t = cluster_matrix(source, space).matrix;
    return t - t.transpose();
}

AntiHermitianGenerator build_sigma_ext(const ClusterOperator& t_ext) {
    return {t_ext};
}

namespace {

EffectiveHamiltonian project_and_symmetrize(const BareHamiltonian& h, const ActiveSpace& active,
                                            const DeterminantSpace& full,
                                            const Eigen::MatrixXd& transformed,
                                            const char* method, std::uint64_t source_hash) {
    SpaceConstraint cas_constraint;
    cas_constraint.active_mask = active.spin_mask();
    DeterminantSpace cas = enumerate_space(h.basis, h.basis.n_elec(), cas_constraint);
    const int d = cas.size();
    Eigen::MatrixXd proj(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            proj(r, c) = transformed(full.index_of(cas.det(r).mask), full.index_of(cas.det(c).mask));

    const double asym = (proj - proj.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8)
        throw std::runtime_error(std::string(method) +
                                 ": projected operator asymmetry " + std::to_string(asym) +
                                 " exceeds 1e-8 (internal consistency)");
    proj = (0.5 * (proj + proj.transpose())).eval();
    DenseOperator op{cas, std::move(proj)};
    return {active, std::move(cas), std::move(op), true, method, source_hash, std::nullopt, asym};
}

Eigen::MatrixXd normal_ordered_fock(const BareHamiltonian& h, const FockOperator& f,
                                    const DeterminantSpace& full) {
    Eigen::MatrixXd fm = build_one_body(f.f, full).matrix;
    double scalar = 0.0;
    for (int i : h.basis.occupied()) scalar += f.f(i, i);
    fm.diagonal().array() -= scalar;
    return fm;
}

}  // namespace

EffectiveHamiltonian ducc_c1(const BareHamiltonian& h, const FockOperator& f,
                             const AntiHermitianGenerator& sigma, const ActiveSpace& active) {
    const DeterminantSpace full = enumerate_space(h.basis, h.basis.n_elec());
    if (full.size() > kDefaultDimensionCap)
        throw std::invalid_argument("ducc_c1: dimension cap exceeded");
    const Eigen::MatrixXd hm = build_matrix(h, full).matrix;
    const Eigen::MatrixXd g = sigma.realize(full);
    const Eigen::MatrixXd fn = normal_ordered_fock(h, f, full);

    const Eigen::MatrixXd hg = hm * g - g * hm;
    const Eigen::MatrixXd fg = fn * g - g * fn;
    const Eigen::MatrixXd fgg = fg * g - g * fg;
    const Eigen::MatrixXd total = hm + hg + 0.5 * fgg;
    return project_and_symmetrize(h, active, full, total, "ducc-c1", sigma.source.content_hash());
}

EffectiveHamiltonian ducc_c2(const BareHamiltonian& h, const FockOperator& f,
                             const AntiHermitianGenerator& sigma, const ActiveSpace& active) {
    const DeterminantSpace full = enumerate_space(h.basis, h.basis.n_elec());
    if (full.size() > kDefaultDimensionCap)
        throw std::invalid_argument("ducc_c2: dimension cap exceeded");
    const Eigen::MatrixXd hm = build_matrix(h, full).matrix;
    const Eigen::MatrixXd g = sigma.realize(full);
    const Eigen::MatrixXd fn = normal_ordered_fock(h, f, full);

    const Eigen::MatrixXd hg = hm * g - g * hm;
    const Eigen::MatrixXd hgg = hg * g - g * hg;
    const Eigen::MatrixXd fg = fn * g - g * fn;
    const Eigen::MatrixXd fgg = fg * g - g * fg;
    const Eigen::MatrixXd fggg = fgg * g - g * fgg;
    const Eigen::MatrixXd total = hm + hg + 0.5 * hgg + fggg / 6.0;
    return project_and_symmetrize(h, active, full, total, "ducc-c2", sigma.source.content_hash());
}

std::pair<double, Eigen::VectorXd> ducc_energy(const EffectiveHamiltonian& heff) {
    if (!heff.hermitian)
        throw std::invalid_argument("ducc_energy: effective Hamiltonian is not Hermitian");
    return fci_ground(heff.matrix);
}

EffectiveHamiltonian bare_cas(const BareHamiltonian& h, const ActiveSpace& active) {
    SpaceConstraint cas_constraint;
    cas_constraint.active_mask = active.spin_mask();
    DeterminantSpace cas = enumerate_space(h.basis, h.basis.n_elec(), cas_constraint);
    DenseOperator op = build_matrix(h, cas);
    return {active, std::move(cas), std::move(op), true, "bare-cas", 0, std::nullopt};
}

}  // namespace ccdf
