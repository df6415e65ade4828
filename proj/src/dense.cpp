#include "ccdf/dense.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ccdf {

namespace {

// forward bit positions of a mask, ascending
std::vector<int> bits_of(std::uint64_t m) {
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

void require_same_space(const DenseOperator& a, const DenseOperator& b, const char* who) {
    if (!(a.space == b.space))
        throw std::invalid_argument(std::string(who) + ": operators live on different spaces");
}

}  // namespace

bool DenseOperator::is_hermitian(double tol) const {
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= tol;
}

DenseOperator build_matrix(const BareHamiltonian& h, const DeterminantSpace& space,
                           int dimension_cap) {
    const int dim = space.size();
    if (dim > dimension_cap)
        throw std::invalid_argument("build_matrix: dimension cap exceeded, use a smaller test system");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);

    for (int col = 0; col < dim; ++col) {
        const std::uint64_t J = space.det(col).mask;
        const auto occJ = bits_of(J);
        // diagonal
        double diag = h.e_core;
        for (int i : occJ) diag += h.h(i, i);
        for (int i : occJ)
            for (int j : occJ) diag += 0.5 * h.v(i, j, i, j);
        m(col, col) = diag;

        // singles: i in J -> a not in J
        for (int i : occJ) {
            for (int a = 0; a < space.basis().n_spinorb(); ++a) {
                if (space.det(col).occupied(a)) continue;
                std::uint64_t mask = J;
                int sign = apply_annihilate(mask, i);
                sign *= apply_create(mask, a);
                if (!space.contains(mask)) continue;
                const int row = space.index_of(mask);
                double val = h.h(a, i);
                for (int k : occJ)
                    if (k != i) val += h.v(a, k, i, k);
                m(row, col) += sign * val;
            }
        }
        // doubles: i<j in J -> a<b not in J
        for (std::size_t ii = 0; ii < occJ.size(); ++ii) {
            for (std::size_t jj = ii + 1; jj < occJ.size(); ++jj) {
                const int i = occJ[ii], j = occJ[jj];
                for (int a = 0; a < space.basis().n_spinorb(); ++a) {
                    if (space.det(col).occupied(a)) continue;
                    for (int b = a + 1; b < space.basis().n_spinorb(); ++b) {
                        if (space.det(col).occupied(b)) continue;
                        std::uint64_t mask = J;
                        int sign = apply_annihilate(mask, i);
                        sign *= apply_annihilate(mask, j);
                        sign *= apply_create(mask, b);
                        sign *= apply_create(mask, a);
                        if (!space.contains(mask)) continue;
                        m(space.index_of(mask), col) += sign * h.v(a, b, i, j);
                    }
                }
            }
        }
    }
    return {space, std::move(m)};
}

DenseOperator build_one_body(const Eigen::MatrixXd& m1, const DeterminantSpace& space) {
    const int dim = space.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const std::uint64_t J = space.det(col).mask;
        for (int i : bits_of(J)) {
            m(col, col) += m1(i, i);
            for (int a = 0; a < space.basis().n_spinorb(); ++a) {
                if (space.det(col).occupied(a) || a == i) continue;
                std::uint64_t mask = J;
                int sign = apply_annihilate(mask, i);
                sign *= apply_create(mask, a);
                if (!space.contains(mask)) continue;
                m(space.index_of(mask), col) += sign * m1(a, i);
            }
        }
    }
    return {space, std::move(m)};
}

DenseOperator build_from_tensors(const DeterminantSpace& space, double scalar,
                                 const Eigen::MatrixXd& one_body, const Tensor4& two_body_antisym,
                                 const std::vector<int>& orbitals) {
    const int dim = space.size();
    const int k = static_cast<int>(orbitals.size());
    std::uint64_t orbmask = 0;
    std::vector<int> pos(space.basis().n_spinorb(), -1);
    for (int p = 0; p < k; ++p) {
        orbmask |= std::uint64_t{1} << orbitals[p];
        pos[orbitals[p]] = p;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const std::uint64_t J = space.det(col).mask;
        const auto occ = bits_of(J & orbmask);
        double diag = scalar;
        for (int i : occ) diag += one_body(pos[i], pos[i]);
        for (int i : occ)
            for (int j : occ) diag += 0.5 * two_body_antisym(pos[i], pos[j], pos[i], pos[j]);
        m(col, col) = diag;
        for (int i : occ) {
            for (int a : orbitals) {
                if (space.det(col).occupied(a)) continue;
                std::uint64_t mask = J;
                int sign = apply_annihilate(mask, i);
                sign *= apply_create(mask, a);
                if (!space.contains(mask)) continue;
                double val = one_body(pos[a], pos[i]);
                for (int kk : occ)
                    if (kk != i) val += two_body_antisym(pos[a], pos[kk], pos[i], pos[kk]);
                m(space.index_of(mask), col) += sign * val;
            }
        }
        for (std::size_t ii = 0; ii < occ.size(); ++ii)
            for (std::size_t jj = ii + 1; jj < occ.size(); ++jj) {
                const int i = occ[ii], j = occ[jj];
                for (int ai = 0; ai < k; ++ai) {
                    const int a = orbitals[ai];
                    if (space.det(col).occupied(a)) continue;
                    for (int bi = ai + 1; bi < k; ++bi) {
                        const int b = orbitals[bi];
                        if (space.det(col).occupied(b)) continue;
                        std::uint64_t mask = J;
                        int sign = apply_annihilate(mask, i);
                        sign *= apply_annihilate(mask, j);
                        sign *= apply_create(mask, b);
                        sign *= apply_create(mask, a);
                        if (!space.contains(mask)) continue;
                        m(space.index_of(mask), col) +=
                            sign * two_body_antisym(pos[a], pos[b], pos[i], pos[j]);
                    }
                }
            }
    }
    return {space, std::move(m)};
}

DenseOperator cluster_matrix(const ClusterOperator& t, const DeterminantSpace& space, bool project) {
    const int dim = space.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const std::uint64_t J = space.det(col).mask;
        for (const auto& [sig, amp] : t.amplitudes()) {
            std::uint64_t mask = J;
            int sign = 1;
            // E^{a1..ak}_{i1..ik} = a+_{a1}..a+_{ak} a_{ik}..a_{i1}: rightmost first
            for (int i : sig.occ) {
                sign *= apply_annihilate(mask, i);
                if (!sign) break;
            }
            if (!sign) continue;
            for (auto it = sig.virt.rbegin(); it != sig.virt.rend(); ++it) {
                sign *= apply_create(mask, *it);
                if (!sign) break;
            }
            if (!sign) continue;
            if (!space.contains(mask)) {
                if (project) continue;
                throw std::logic_error("cluster_matrix: excitation leaves the determinant space");
            }
            m(space.index_of(mask), col) += sign * amp;
        }
    }
    return {space, std::move(m)};
}

std::pair<double, Eigen::VectorXd> fci_ground(const DenseOperator& op) {
    if (!op.is_hermitian(1e-12))
        throw std::invalid_argument("fci_ground: matrix not Hermitian (use eig_nonhermitian)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success) throw std::runtime_error("fci_ground: eigensolver failed");
    Eigen::VectorXd v = es.eigenvectors().col(0);
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    return {es.eigenvalues()(0), std::move(v)};
}

NonHermitianEig eig_nonhermitian_matrix(const Eigen::MatrixXd& m, int reference_index) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_nonhermitian: eigensolver failed");
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    int best = -1;
    double best_overlap = -1.0;
    for (int i = 0; i < vals.size(); ++i) {
        if (std::abs(vals(i).imag()) > 1e-8) continue;
        const double nrm = vecs.col(i).norm();
        const double overlap = std::abs(vecs.col(i)(reference_index)) / nrm;
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = i;
        }
    }
    if (best < 0) {
        std::ostringstream what;
        what << "eig_nonhermitian: no real eigenvalue found; spectrum:";
        for (int i = 0; i < vals.size(); ++i)
            what << " (" << vals(i).real() << (vals(i).imag() < 0 ? "" : "+") << vals(i).imag() << "i)";
        throw std::runtime_error(what.str());
    }
    // rotate the eigenvector real: divide by the phase of its largest entry
    Eigen::VectorXcd vc = vecs.col(best);
    int imax = 0;
    vc.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> phase = vc(imax) / std::abs(vc(imax));
    Eigen::VectorXd vr = (vc / phase).real();
    vr.normalize();
    NonHermitianEig out;
    out.energy = vals(best).real();
    out.right_vector = std::move(vr);
    out.reference_overlap = best_overlap;
    return out;
}

NonHermitianEig eig_nonhermitian(const DenseOperator& op, int reference_index) {
    return eig_nonhermitian_matrix(op.matrix, reference_index);
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
    require_same_space(a, b, "commutator");
    return {a.space, a.matrix * b.matrix - b.matrix * a.matrix};
}

Eigen::MatrixXd expm_nilpotent(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = sum;
    for (int k = 1; k <= n + 1; ++k) {
        term = (term * m / static_cast<double>(k)).eval();
        if (term.cwiseAbs().maxCoeff() == 0.0) return sum;
        sum += term;
    }
    throw std::invalid_argument("expm_nilpotent: matrix is not nilpotent");
}

Eigen::VectorXd apply_exp_nilpotent(const Eigen::MatrixXd& t, const Eigen::VectorXd& v) {
    Eigen::VectorXd sum = v;
    Eigen::VectorXd term = v;
    for (int k = 1; k <= t.rows() + 1; ++k) {
        term = (t * term / static_cast<double>(k)).eval();
        if (term.cwiseAbs().maxCoeff() == 0.0) return sum;
        sum += term;
    }
    throw std::invalid_argument("apply_exp_nilpotent: matrix is not nilpotent");
}

DenseOperator similarity_transform(const DenseOperator& h, const DenseOperator& g,
                                   TransformMode mode, int bch_order) {
    require_same_space(h, g, "similarity_transform");
    if (mode == TransformMode::exact) {
        const Eigen::MatrixXd eg = g.matrix.exp();
        const Eigen::MatrixXd egm = (-g.matrix).exp();
        return {h.space, egm * h.matrix * eg};
    }
    Eigen::MatrixXd sum = h.matrix;
    Eigen::MatrixXd term = h.matrix;
    for (int k = 1; k <= bch_order; ++k) {
        term = ((term * g.matrix - g.matrix * term) / static_cast<double>(k)).eval();
        sum += term;
    }
    return {h.space, std::move(sum)};
}

// ---------------------------------------------------------------------------
// tensor extraction

namespace {

struct ExtractIndexing {
    std::vector<int> orbitals;           // ascending spin orbitals
    std::vector<int> pos;                // spin orbital -> position or -1
    int k = 0;                           // number of active orbitals
    int npair = 0;                       // k*(k-1)/2
    Eigen::MatrixXi pair_index;          // (p<q) -> pair slot

    int n_unknowns() const { return k * k + npair * npair; }
    int m_slot(int p, int q) const { return p * k + q; }
    int w_slot(int pq, int rs) const { return k * k + pq * npair + rs; }
    // signed pair lookup for arbitrary order
    std::pair<int, int> spair(int p, int q) const {
        return p < q ? std::pair{pair_index(p, q), 1} : std::pair{pair_index(q, p), -1};
    }
};

// Slater-Condon coefficient row for <I| . |J> over active positions.
void assemble_row(const ExtractIndexing& ix, std::uint64_t I, std::uint64_t J,
                  Eigen::RowVectorXd& row) {
    row.setZero();
    const std::uint64_t diffIJ = I ^ J;
    const auto moved = std::popcount(diffIJ);
    if (moved == 0) {
        const auto occ = [&] {
            std::vector<int> o;
            for (int p : ix.orbitals)
                if ((J >> p) & 1u) o.push_back(ix.pos[p]);
            return o;
        }();
        for (int P : occ) row(ix.m_slot(P, P)) += 1.0;
        for (std::size_t a = 0; a < occ.size(); ++a)
            for (std::size_t b = a + 1; b < occ.size(); ++b) {
                auto [pq, s] = ix.spair(occ[a], occ[b]);
                row(ix.w_slot(pq, pq)) += 1.0;  // both signs square away
            }
        return;
    }
    if (moved == 2) {
        const int i = std::countr_zero(J & diffIJ);
        const int a = std::countr_zero(I & diffIJ);
        std::uint64_t mask = J;
        int sign = apply_annihilate(mask, i);
        sign *= apply_create(mask, a);
        const int Ip = ix.pos[i], Ap = ix.pos[a];
        row(ix.m_slot(Ap, Ip)) += sign;
        for (int p : ix.orbitals) {
            if (p == i || !((J >> p) & 1u)) continue;
            const int K = ix.pos[p];
            auto [pq1, s1] = ix.spair(Ap, K);
            auto [pq2, s2] = ix.spair(Ip, K);
            row(ix.w_slot(pq1, pq2)) += sign * s1 * s2;
        }
        return;
    }
    if (moved == 4) {
        const auto ij = bits_of(J & diffIJ);
        const auto ab = bits_of(I & diffIJ);
        std::uint64_t mask = J;
        int sign = apply_annihilate(mask, ij[0]);
        sign *= apply_annihilate(mask, ij[1]);
        sign *= apply_create(mask, ab[1]);
        sign *= apply_create(mask, ab[0]);
        auto [pq1, s1] = ix.spair(ix.pos[ab[0]], ix.pos[ab[1]]);
        auto [pq2, s2] = ix.spair(ix.pos[ij[0]], ix.pos[ij[1]]);
        row(ix.w_slot(pq1, pq2)) += sign * s1 * s2;
    }
}

// minimum-norm least squares + null-space basis
struct SvdSolve {
    Eigen::VectorXd solution;
    Eigen::MatrixXd null_basis;
    double max_residual = 0.0;
};

SvdSolve solve_min_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    SvdSolve out;
    if (A.rows() == 0) {
        out.solution = Eigen::VectorXd::Zero(A.cols());
        out.null_basis = Eigen::MatrixXd::Identity(A.cols(), A.cols());
        return out;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thresh = sv.size() ? sv(0) * std::max(A.rows(), A.cols()) * 1e-13 : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thresh) ++rank;
    Eigen::VectorXd ub = svd.matrixU().transpose() * b;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(A.cols());
    for (int i = 0; i < rank; ++i) y(i) = ub(i) / sv(i);
    out.solution = svd.matrixV() * y;
    out.null_basis = svd.matrixV().rightCols(A.cols() - rank);
    out.max_residual = (A * out.solution - b).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace

ExtractedTensors extract_tensors(const DenseOperator& op, const std::vector<int>& active_orbitals) {
    const auto& space = op.space;
    const std::uint64_t ref = space.basis().reference_mask();
    const int ref_idx = space.index_of(ref);

    ExtractIndexing ix;
    ix.orbitals = active_orbitals;
    ix.k = static_cast<int>(active_orbitals.size());
    ix.pos.assign(space.basis().n_spinorb(), -1);
    std::uint64_t orbmask = 0;
    for (int p = 0; p < ix.k; ++p) {
        ix.pos[active_orbitals[p]] = p;
        orbmask |= std::uint64_t{1} << active_orbitals[p];
    }
    ix.npair = ix.k * (ix.k - 1) / 2;
    ix.pair_index = Eigen::MatrixXi::Constant(ix.k, ix.k, -1);
    {
        int slot = 0;
        for (int p = 0; p < ix.k; ++p)
            for (int q = p + 1; q < ix.k; ++q) ix.pair_index(p, q) = slot++;
    }

    for (const auto& d : space.determinants())
        if ((d.mask ^ ref) & ~orbmask)
            throw std::invalid_argument("extract_tensors: space is not a CAS over the given orbitals");

    ExtractedTensors out;
    out.active_orbitals = active_orbitals;
    out.scalar = op.matrix(ref_idx, ref_idx);

    std::vector<int> rank(space.size());
    bool have_singles = false, have_doubles = false;
    for (int i = 0; i < space.size(); ++i) {
        rank[i] = space.det(i).rank_from(ref);
        have_singles |= rank[i] == 1;
        have_doubles |= rank[i] == 2;
    }
    out.one_body_determined = have_singles;
    out.two_body_determined = have_doubles;

    // stage-1 pairs: only <=2-body content contributes there
    std::vector<std::pair<int, int>> stage1, stage2;
    for (int r = 0; r < space.size(); ++r)
        for (int c = 0; c < space.size(); ++c) {
            if (rank[r] > 2 || rank[c] > 2) continue;
            const int moved = std::popcount(space.det(r).mask ^ space.det(c).mask);
            if (moved > 4) continue;
            const int lo = std::min(rank[r], rank[c]);
            if (lo <= 1 && !(rank[r] == 1 && rank[c] == 2) && !(rank[r] == 2 && rank[c] == 1))
                stage1.emplace_back(r, c);
            else
                stage2.emplace_back(r, c);
        }

    const int nunk = ix.n_unknowns();
    Eigen::RowVectorXd row(nunk);
    auto fill = [&](const std::vector<std::pair<int, int>>& pairs, Eigen::MatrixXd& A,
                    Eigen::VectorXd& b) {
        A.resize(static_cast<int>(pairs.size()), nunk);
        b.resize(static_cast<int>(pairs.size()));
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            const auto [r, c] = pairs[e];
            assemble_row(ix, space.det(r).mask, space.det(c).mask, row);
            A.row(static_cast<int>(e)) = row;
            b(static_cast<int>(e)) = op.matrix(r, c) - (r == c ? out.scalar : 0.0);
        }
    };

    Eigen::MatrixXd A1, A2;
    Eigen::VectorXd b1, b2;
    fill(stage1, A1, b1);
    const SvdSolve s1 = solve_min_norm(A1, b1);
    Eigen::VectorXd theta = s1.solution;
    if (s1.null_basis.cols() > 0 && !stage2.empty()) {
        fill(stage2, A2, b2);
        const SvdSolve s2 = solve_min_norm(A2 * s1.null_basis, b2 - A2 * theta);
        theta += s1.null_basis * s2.solution;
    }

    // unpack into the bare-product convention
    out.chi1 = Eigen::MatrixXd::Zero(ix.k, ix.k);
    out.chi2 = Tensor4(ix.k);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ix.k, ix.k);
    Tensor4 w(ix.k);
    for (int p = 0; p < ix.k; ++p)
        for (int q = 0; q < ix.k; ++q) m(p, q) = theta(ix.m_slot(p, q));
    for (int p = 0; p < ix.k; ++p)
        for (int q = 0; q < ix.k; ++q) {
            if (p == q) continue;
            auto [pq, s1_] = ix.spair(p, q);
            for (int r = 0; r < ix.k; ++r)
                for (int s = 0; s < ix.k; ++s) {
                    if (r == s) continue;
                    auto [rs, s2_] = ix.spair(r, s);
                    w(p, q, r, s) = s1_ * s2_ * theta(ix.w_slot(pq, rs));
                }
        }
    for (int p = 0; p < ix.k; ++p)
        for (int q = 0; q < ix.k; ++q) out.chi1(p, q) = m(q, p);
    for (int P = 0; P < ix.k; ++P)
        for (int Q = 0; Q < ix.k; ++Q)
            for (int R = 0; R < ix.k; ++R)
                for (int S = 0; S < ix.k; ++S) out.chi2(P, Q, R, S) = 0.5 * w(R, S, P, Q);
    if (!have_singles) out.chi1.setZero();
    if (!have_doubles) out.chi2 = Tensor4(ix.k);

    const DenseOperator rebuilt = rebuild_from_tensors(out, space);
    out.residual_norm = (op.matrix - rebuilt.matrix).norm();
    return out;
}

DenseOperator rebuild_from_tensors(const ExtractedTensors& t, const DeterminantSpace& space) {
    const int k = static_cast<int>(t.active_orbitals.size());
    Eigen::MatrixXd m(k, k);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) m(p, q) = t.chi1(q, p);
    Tensor4 w(k);
    for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q)
                    w(r, s, p, q) = 0.5 * (t.chi2(p, q, r, s) - t.chi2(p, q, s, r) -
                                           t.chi2(q, p, r, s) + t.chi2(q, p, s, r));
    return build_from_tensors(space, t.scalar, m, w, t.active_orbitals);
}

// ---------------------------------------------------------------------------
// serialization

void save_dense(const DenseOperator& op, const std::string& base_path, const std::string& provenance) {
    {
        std::ofstream bin(base_path + ".bin", std::ios::binary);
        if (!bin) throw std::runtime_error("save_dense: cannot write " + base_path + ".bin");
        const std::uint64_t dim = static_cast<std::uint64_t>(op.dim());
        bin.write(reinterpret_cast<const char*>(&dim), sizeof dim);
        for (int r = 0; r < op.dim(); ++r)
            for (int c = 0; c < op.dim(); ++c) {
                const double v = op.matrix(r, c);
                bin.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
    }
    nlohmann::json j;
    j["format"] = "ccdf-dense-v1";
    j["dimension"] = op.dim();
    j["n_spatial"] = op.space.basis().n_spatial();
    j["n_elec"] = op.space.basis().n_elec();
    j["provenance"] = provenance;
    auto& dets = j["determinants"] = nlohmann::json::array();
    for (const auto& d : op.space.determinants()) dets.push_back(d.mask);
    std::ofstream js(base_path + ".json");
    if (!js) throw std::runtime_error("save_dense: cannot write " + base_path + ".json");
    js << j.dump(2) << "\n";
}

DenseOperator load_dense(const std::string& base_path) {
    std::ifstream js(base_path + ".json");
    if (!js) throw std::runtime_error("load_dense: cannot read " + base_path + ".json");
    nlohmann::json j;
    js >> j;
    if (j.value("format", "") != "ccdf-dense-v1")
        throw std::runtime_error("load_dense: unrecognized descriptor format");
    SpinOrbitalBasis basis(j.at("n_spatial").get<int>(), j.at("n_elec").get<int>());
    std::vector<Determinant> dets;
    for (const auto& m : j.at("determinants")) dets.push_back({m.get<std::uint64_t>()});
    DeterminantSpace space(basis, std::move(dets));

    std::ifstream bin(base_path + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("load_dense: cannot read " + base_path + ".bin");
    std::uint64_t dim = 0;
    bin.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (static_cast<int>(dim) != space.size())
        throw std::runtime_error("load_dense: dimension mismatch between sidecar and binary");
    Eigen::MatrixXd m(dim, dim);
    for (std::uint64_t r = 0; r < dim; ++r)
        for (std::uint64_t c = 0; c < dim; ++c) {
            double v;
            bin.read(reinterpret_cast<char*>(&v), sizeof v);
            m(static_cast<int>(r), static_cast<int>(c)) = v;
        }
    if (!bin) throw std::runtime_error("load_dense: binary payload truncated");
    return {std::move(space), std::move(m)};
}

}  // namespace ccdf
