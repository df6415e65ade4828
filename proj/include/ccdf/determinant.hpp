#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ccdf/integrals.hpp"

namespace ccdf {

/// Slater determinant as an occupation bitmask over spin orbitals.
/// Bit p set means spin orbital p is occupied.
struct Determinant {
    std::uint64_t mask = 0;

    int particles() const { return std::popcount(mask); }
    bool occupied(int p) const { return (mask >> p) & 1u; }

    /// Excitation rank relative to `ref` (number of moved particles).
    int rank_from(std::uint64_t ref) const { return std::popcount(mask & ~ref); }

    bool operator==(const Determinant& o) const { return mask == o.mask; }
    bool operator<(const Determinant& o) const { return mask < o.mask; }
};

/// Apply an annihilation operator in the ascending-bitmask sign convention:
/// sign = parity of occupied orbitals below p. Returns 0 sign if the move
/// is Pauli-blocked.
inline int apply_annihilate(std::uint64_t& mask, int p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    if (!(mask & bit)) return 0;
    const int sign = std::popcount(mask & (bit - 1)) % 2 ? -1 : 1;
    mask &= ~bit;
    return sign;
}

inline int apply_create(std::uint64_t& mask, int p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    if (mask & bit) return 0;
    const int sign = std::popcount(mask & (bit - 1)) % 2 ? -1 : 1;
    mask |= bit;
    return sign;
}

/// Optional constraints for determinant enumeration.
struct SpaceConstraint {
    /// Spin orbitals allowed to differ from the reference occupation.
    std::optional<std::uint64_t> active_mask;
    /// Maximum excitation rank relative to the reference.
    std::optional<int> max_rank;
};

/// Ordered list of same-particle-number determinants with index lookup.
/// Ordering is lexicographic on the bitmask, so the reference determinant,
/// when contained, sits at index 0.
class DeterminantSpace {
  public:
    DeterminantSpace() = default;
    DeterminantSpace(SpinOrbitalBasis basis, std::vector<Determinant> dets);

    const SpinOrbitalBasis& basis() const { return basis_; }
    int size() const { return static_cast<int>(dets_.size()); }
    const Determinant& det(int i) const { return dets_[i]; }
    const std::vector<Determinant>& determinants() const { return dets_; }

    bool contains(std::uint64_t mask) const { return index_.count(mask) > 0; }
    int index_of(std::uint64_t mask) const;

    bool operator==(const DeterminantSpace& o) const {
        return basis_ == o.basis_ && dets_ == o.dets_;
    }

  private:
    SpinOrbitalBasis basis_;
    std::vector<Determinant> dets_;
    std::unordered_map<std::uint64_t, int> index_;
};

/// Enumerate the determinant space with fixed particle number and the
/// reference S_z. With an active mask, only determinants that differ from
/// the reference inside the mask are kept; with a rank bound, only
/// excitation levels up to it.
DeterminantSpace enumerate_space(const SpinOrbitalBasis& basis, int n_elec,
                                 const SpaceConstraint& constraint = {});

}  // namespace ccdf
