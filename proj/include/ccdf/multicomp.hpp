#pragma once

#include "ccdf/ducc.hpp"

namespace ccdf {

/// Inter-species coupling tensor: coefficient of (a+_p a_q)(b+_r b_s),
/// p,q over A spin orbitals and r,s over B spin orbitals.
class CouplingTensor {
  public:
    CouplingTensor() = default;
    CouplingTensor(int n_a, int n_b)
        : na_(n_a), nb_(n_b), data_(static_cast<std::size_t>(n_a) * n_a * n_b * n_b, 0.0) {}

    int dim_a() const { return na_; }
    int dim_b() const { return nb_; }
    double& operator()(int p, int q, int r, int s) { return data_[idx(p, q, r, s)]; }
    double operator()(int p, int q, int r, int s) const { return data_[idx(p, q, r, s)]; }
    bool zero() const;

  private:
    std::size_t idx(int p, int q, int r, int s) const {
        return ((static_cast<std::size_t>(p) * na_ + q) * nb_ + r) * nb_ + s;
    }
    int na_ = 0, nb_ = 0;
    std::vector<double> data_;
};

/// Two commuting Fermion species; composite determinants are bitmask pairs.
struct CompositeBasis {
    SpinOrbitalBasis basis_a;
    SpinOrbitalBasis basis_b;
};

struct CompositeDeterminant {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
};

/// A-major product of the species determinant spaces with fixed particle
/// numbers; index = index_A * dim_B + index_B.
class CompositeSpace {
  public:
    explicit CompositeSpace(const CompositeBasis& basis);

    const CompositeBasis& basis() const { return basis_; }
    const DeterminantSpace& space_a() const { return space_a_; }
    const DeterminantSpace& space_b() const { return space_b_; }
    int size() const { return space_a_.size() * space_b_.size(); }
    int index(int ia, int ib) const { return ia * space_b_.size() + ib; }
    CompositeDeterminant det(int i) const {
        return {space_a_.det(i / space_b_.size()).mask, space_b_.det(i % space_b_.size()).mask};
    }
    int reference_index() const;

  private:
    CompositeBasis basis_;
    DeterminantSpace space_a_, space_b_;
};

struct CompositeHamiltonian {
    CompositeBasis basis;
    BareHamiltonian h_a;
    BareHamiltonian h_b;
    CouplingTensor v_ab;

    /// Throws unless v_ab is Hermitian under (p<->q, r<->s) conjugation.
    void validate() const;
};

/// Joint excitation: an A-signature times a B-signature (both rank >= 1).
struct JointSig {
    ExcitationSig a;
    ExcitationSig b;
    bool operator<(const JointSig& o) const {
        if (!(a == o.a)) return a < o.a;
        return b < o.b;
    }
};

struct CompositeCluster {
    ClusterOperator t_a;
    ClusterOperator t_b;
    std::map<JointSig, double> s_ab;
};

struct CompositeMask {
    std::set<ExcitationSig> a_sigs;
    std::set<ExcitationSig> b_sigs;
    std::set<JointSig> joint_sigs;

    std::size_t size() const { return a_sigs.size() + b_sigs.size() + joint_sigs.size(); }
    bool empty() const { return size() == 0; }
};

/// All S_z-conserving signatures per species up to the given ranks, plus
/// every joint pairing (the full-rank mask when ranks cover the particle
/// numbers).
CompositeMask full_composite_mask(const CompositeBasis& basis, int rank_a, int rank_b);

CompositeDeterminant composite_reference(const CompositeBasis& cb);

Eigen::MatrixXd build_composite_matrix(const CompositeHamiltonian& ch, const CompositeSpace& space);

/// Matrix of T_AB = T_A + T_B + S_AB on the composite space.
Eigen::MatrixXd composite_cluster_matrix(const CompositeCluster& t, const CompositeSpace& space);

struct CompositeCCResult {
    CompositeCluster t;
    double energy = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

CompositeCCResult solve_cc_composite(const CompositeHamiltonian& ch, const CompositeMask& mask,
                                     double tol = 1e-10, int max_iter = 200);

/// Downfold species B: project e^{-T_B-S_AB} H e^{T_B+S_AB} onto the
/// A-excitations x B-reference sector; returned over the A determinant space.
EffectiveHamiltonian downfold_B(const CompositeHamiltonian& ch, const ClusterOperator& t_b,
                                const std::map<JointSig, double>& s_ab);

enum class CompositeDuccMode { exact, c1, c2 };

/// Hermitian variant with sigma_B = T_B - T_B^+ and rho_AB = S_AB - S_AB^+.
EffectiveHamiltonian ducc_downfold_B(const CompositeHamiltonian& ch, const ClusterOperator& t_b,
                                     const std::map<JointSig, double>& s_ab,
                                     CompositeDuccMode mode);

/// Two-species lattice model with density-density coupling
/// W * sum_site n_A,site n_B,site; each species is a small chain with
/// nearest-neighbour hopping, an on-site energy ramp, and on-site U, so the
/// coupling commutes with both particle-number operators by construction.
struct LatticeSpeciesParams {
    int n_sites = 2;
    int n_particles = 2;
    double hopping = 0.2;
    double on_site_u = 0.5;
    double site_ramp = 2.0;  // site s carries energy s * site_ramp
};

CompositeHamiltonian lattice_pair_model(const LatticeSpeciesParams& a,
                                        const LatticeSpeciesParams& b, double coupling_w);

/// Dense matrix of n_A (or n_B) on the composite space.
Eigen::MatrixXd composite_number_operator(const CompositeSpace& space, bool species_a);

}  // namespace ccdf
