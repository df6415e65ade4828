#pragma once

#include <optional>
#include <set>
#include <string>

#include "ccdf/ccsolver.hpp"
#include "ccdf/dense.hpp"

namespace ccdf {

/// Active space declared on spatial orbitals; both spin partners of a
/// spatial orbital are activated together.
class ActiveSpace {
  public:
    ActiveSpace(const SpinOrbitalBasis& basis, std::set<int> occ_spatial, std::set<int> virt_spatial);

    const std::set<int>& occupied_spatial() const { return occ_; }
    const std::set<int>& virtual_spatial() const { return virt_; }
    int x_r() const { return static_cast<int>(occ_.size()); }
    int y_s() const { return static_cast<int>(virt_.size()); }

    /// Active spin orbitals, ascending.
    const std::vector<int>& spin_orbitals() const { return spinorbs_; }
    std::uint64_t spin_mask() const { return mask_; }
    bool is_active(int spinorb) const { return (mask_ >> spinorb) & 1u; }

    /// Convenience constructor from "lowest k occupied + lowest m virtual".
    static ActiveSpace lowest(const SpinOrbitalBasis& basis, int n_occ_spatial, int n_virt_spatial);

  private:
    std::set<int> occ_, virt_;
    std::vector<int> spinorbs_;
    std::uint64_t mask_ = 0;
};

struct SesCheck {
    bool is_ses = false;
    std::string explanation;
};

/// A sub-system embedding sub-algebra check for the CC truncation rank M:
/// every same-S_z CAS determinant must be reachable from the reference by
/// an excitation of rank <= M, i.e. min(active occupied spin orbitals,
/// active virtual spin orbitals) <= M.
SesCheck is_ses(const ActiveSpace& active, const SpinOrbitalBasis& basis, int cc_rank);

/// Split amplitudes into the all-active-index part and the remainder.
std::pair<ClusterOperator, ClusterOperator> partition(const ClusterOperator& t,
                                                      const ActiveSpace& active);

/// Signatures with every index active (the internal amplitude set of the
/// sub-algebra), up to rank bound.
AmplitudeMask internal_mask(const SpinOrbitalBasis& basis, const ActiveSpace& active, int max_rank);

/// Downfolded operator on a CAS determinant space, with provenance and an
/// optional extracted tensor form.
struct EffectiveHamiltonian {
    ActiveSpace active;
    DeterminantSpace cas_space;
    DenseOperator matrix;
    bool hermitian = false;
    std::string method;          // "ses", "ducc-c1", "ducc-c2", ...
    std::uint64_t source_hash = 0;  // hash of the generating amplitudes
    std::optional<ExtractedTensors> tensor_form;
    /// max |M - M^T| measured before symmetrization (Hermitian methods only)
    double presym_asymmetry = 0.0;
};

/// H_eff = (P+Q_int) e^{-T_ext} H e^{T_ext} (P+Q_int), evaluated with exact
/// dense transforms on the full space.
EffectiveHamiltonian build_heff_ses(const BareHamiltonian& h, const ClusterOperator& t_ext,
                                    const ActiveSpace& active);

/// Projection of e^{-T} H e^{T} onto an explicit determinant list; the
/// single-reference list reproduces the standard CC energy expression.
DenseOperator project_hbar(const BareHamiltonian& h, const ClusterOperator& t_ext,
                           const std::vector<Determinant>& dets);

struct SesEnergy {
    double energy = 0.0;
    Eigen::VectorXd internal_vector;   // right eigenvector over the CAS
    double reference_overlap = 0.0;
    /// cosine similarity between the eigenvector and e^{T_int}|Phi>
    double parametrization_cosine = 0.0;
};

/// Partition t, build H_eff from the external part, return the
/// reference-overlap-selected eigenvalue. Refuses non-SES active spaces
/// unless `force` (the equivalence guarantee is then void).
SesEnergy ses_energy(const BareHamiltonian& h, const ClusterOperator& t, const ActiveSpace& active,
                     bool force = false);

/// Extended-FCIDUMP export of the tensor form plus binary dense sidecar.
void save_effective(const EffectiveHamiltonian& heff, const std::string& base_path);

}  // namespace ccdf
