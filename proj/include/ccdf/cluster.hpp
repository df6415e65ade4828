#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "ccdf/integrals.hpp"

namespace ccdf {

/// Excitation signature: strictly sorted occupied and virtual spin-orbital
/// tuples of equal rank.
struct ExcitationSig {
    std::vector<int> occ;
    std::vector<int> virt;

    int rank() const { return static_cast<int>(occ.size()); }
    bool operator<(const ExcitationSig& o) const {
        if (occ != o.occ) return occ < o.occ;
        return virt < o.virt;
    }
    bool operator==(const ExcitationSig& o) const { return occ == o.occ && virt == o.virt; }
};

/// Validates sortedness, occupied/virtual membership and S_z conservation
/// for `sig` against `basis`; throws on violation.
void validate_signature(const ExcitationSig& sig, const SpinOrbitalBasis& basis);

/// Sparse rank-bounded cluster operator T = sum over signatures of
/// t * a+_{a1}..a+_{ak} a_{ik}..a_{i1}.
class ClusterOperator {
  public:
    ClusterOperator() = default;
    ClusterOperator(SpinOrbitalBasis basis, int rank_bound)
        : basis_(std::move(basis)), rank_bound_(rank_bound) {}

    const SpinOrbitalBasis& basis() const { return basis_; }
    int rank_bound() const { return rank_bound_; }

    void set(const ExcitationSig& sig, double value);
    double get(const ExcitationSig& sig) const;  // 0 when absent
    void clear(const ExcitationSig& sig) { amps_.erase(sig); }

    const std::map<ExcitationSig, double>& amplitudes() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    bool empty() const { return amps_.empty(); }

    double max_abs() const;

    /// Merge: copies every amplitude of `other` into this operator;
    /// keys present in both are overwritten.
    void merge(const ClusterOperator& other);

    std::uint64_t content_hash() const;

  private:
    SpinOrbitalBasis basis_;
    int rank_bound_ = 0;
    std::map<ExcitationSig, double> amps_;
};

/// Explicit set of allowed excitation signatures.
class AmplitudeMask {
  public:
    AmplitudeMask() = default;
    AmplitudeMask(SpinOrbitalBasis basis, std::set<ExcitationSig> sigs);

    const SpinOrbitalBasis& basis() const { return basis_; }
    const std::set<ExcitationSig>& signatures() const { return sigs_; }
    bool contains(const ExcitationSig& s) const { return sigs_.count(s) > 0; }
    std::size_t size() const { return sigs_.size(); }
    bool empty() const { return sigs_.empty(); }

    /// Union of two masks over the same basis.
    AmplitudeMask merged(const AmplitudeMask& other) const;

  private:
    SpinOrbitalBasis basis_;
    std::set<ExcitationSig> sigs_;
};

/// All S_z-conserving excitations with rank <= max_rank (CCSD for rank 2).
AmplitudeMask full_mask(const SpinOrbitalBasis& basis, int max_rank);

/// Text amplitude dump: lines `k  i1..ik  a1..ak  value`, 0-based indices.
void write_amplitudes(const ClusterOperator& t, std::ostream& out);
ClusterOperator read_amplitudes(const SpinOrbitalBasis& basis, int rank_bound, std::istream& in);

}  // namespace ccdf
