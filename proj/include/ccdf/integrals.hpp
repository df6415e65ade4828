#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdf/tensor4.hpp"

namespace ccdf {

/// Spatial-orbital electron integrals as read from an FCIDUMP file.
/// Two-body tensor is kept in chemists' notation (pq|rs).
struct IntegralSet {
    int n_spatial = 0;
    int n_elec = 0;
    int ms2 = 0;
    double e_core = 0.0;
    Eigen::MatrixXd h_spatial;
    Tensor4 eri_spatial;

    // Throws if the stated symmetries are violated beyond 1e-12.
    void validate() const;
};

/// Spin-orbital index map. Alpha spin lives on even indices, beta on odd,
/// so spatial orbital p maps to spin orbitals 2p (alpha) and 2p+1 (beta).
/// The reference determinant occupies the n_elec lowest spin orbitals.
class SpinOrbitalBasis {
  public:
    SpinOrbitalBasis() = default;
    SpinOrbitalBasis(int n_spatial, int n_elec);

    int n_spatial() const { return n_spatial_; }
    int n_spinorb() const { return 2 * n_spatial_; }
    int n_occ() const { return n_elec_; }
    int n_virt() const { return n_spinorb() - n_elec_; }
    int n_elec() const { return n_elec_; }
    int ms2() const { return 0; }  // closed shell throughout

    const std::vector<int>& occupied() const { return occ_; }
    const std::vector<int>& virtuals() const { return virt_; }
    bool is_occupied(int so) const { return so < n_elec_; }

    static int spatial_of(int so) { return so / 2; }
    static int spin_of(int so) { return so % 2; }  // 0 = alpha, 1 = beta
    static int spinorb(int spatial, int spin) { return 2 * spatial + spin; }

    /// Occupation bitmask of the reference determinant.
    std::uint64_t reference_mask() const { return (std::uint64_t{1} << n_elec_) - 1; }

    bool operator==(const SpinOrbitalBasis& o) const {
        return n_spatial_ == o.n_spatial_ && n_elec_ == o.n_elec_;
    }

  private:
    int n_spatial_ = 0;
    int n_elec_ = 0;
    std::vector<int> occ_, virt_;
};

/// Second-quantized Hamiltonian in the spin-orbital basis:
/// scalar core energy, one-body h, and antisymmetrized two-body <pq||rs>.
struct BareHamiltonian {
    SpinOrbitalBasis basis;
    double e_core = 0.0;
    Eigen::MatrixXd h;
    Tensor4 v;  // <pq||rs>, physicists' antisymmetrized

    void validate() const;
};

/// Spin-orbital Fock operator f_pq = h_pq + sum_i <pi||qi> over the
/// reference occupation, plus the reference (mean-field) energy.
struct FockOperator {
    Eigen::MatrixXd f;
    double reference_energy = 0.0;
    /// Set when |f_HOMO,HOMO - f_LUMO,LUMO| < 1e-8; downstream amplitude
    /// denominators are then hazardous.
    bool degenerate_frontier = false;
    double frontier_gap = 0.0;
};

/// Parse the FCIDUMP text format. Header `&FCI NORB=..,NELEC=..,MS2=..`
/// terminated by `/` or `&END`, then `value i j k l` entries with 1-based
/// indices; `i j 0 0` one-body, all-zero indices the core energy.
IntegralSet parse_fcidump(std::istream& text);
IntegralSet parse_fcidump_file(const std::string& path);

/// Write in canonical symmetry-unique ordering, 16 significant digits.
void emit_fcidump(const IntegralSet& s, std::ostream& out);

BareHamiltonian to_spinorbital(const IntegralSet& s);

FockOperator build_fock(const BareHamiltonian& hmlt);

}  // namespace ccdf
