#include "ccdf/determinant.hpp"

#include <stdexcept>

namespace ccdf {

DeterminantSpace::DeterminantSpace(SpinOrbitalBasis basis, std::vector<Determinant> dets)
    : basis_(std::move(basis)), dets_(std::move(dets)) {
    if (dets_.empty()) throw std::invalid_argument("DeterminantSpace: empty determinant list");
    const int np = dets_.front().particles();
    for (std::size_t i = 0; i < dets_.size(); ++i) {
        if (dets_[i].particles() != np)
            throw std::invalid_argument("DeterminantSpace: mixed particle counts");
        if (dets_[i].mask >> basis_.n_spinorb())
            throw std::invalid_argument("DeterminantSpace: determinant outside basis range");
        if (!index_.emplace(dets_[i].mask, static_cast<int>(i)).second)
            throw std::invalid_argument("DeterminantSpace: duplicate determinant");
    }
}

int DeterminantSpace::index_of(std::uint64_t mask) const {
    auto it = index_.find(mask);
    if (it == index_.end())
        throw std::out_of_range("DeterminantSpace: determinant not in space");
    return it->second;
}

namespace {

int sz2_of(std::uint64_t mask, int n_spinorb) {
    int s = 0;
    for (int p = 0; p < n_spinorb; ++p)
        if ((mask >> p) & 1u) s += (p % 2 == 0) ? 1 : -1;
    return s;
}

}  // namespace

DeterminantSpace enumerate_space(const SpinOrbitalBasis& basis, int n_elec,
                                 const SpaceConstraint& constraint) {
    const int n = basis.n_spinorb();
    if (n_elec > n) throw std::invalid_argument("enumerate_space: more particles than orbitals");
    if (n_elec < 0) throw std::invalid_argument("enumerate_space: negative particle count");

    const std::uint64_t ref = basis.reference_mask();
    const int ref_sz2 = sz2_of(ref, n);

    std::vector<Determinant> dets;
    // Gosper's hack over all popcount-n_elec masks (ascending = lexicographic).
    if (n_elec == 0) {
        dets.push_back({0});
    } else {
        std::uint64_t m = (std::uint64_t{1} << n_elec) - 1;
        const std::uint64_t limit = std::uint64_t{1} << n;
        while (m < limit) {
            bool keep = sz2_of(m, n) == ref_sz2;
            if (keep && constraint.active_mask)
                keep = ((m ^ ref) & ~*constraint.active_mask) == 0;
            if (keep && constraint.max_rank)
                keep = Determinant{m}.rank_from(ref) <= *constraint.max_rank;
            if (keep) dets.push_back({m});
            const std::uint64_t c = m & (~m + 1);
            const std::uint64_t r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
    if (dets.empty()) throw std::invalid_argument("enumerate_space: constraints yield an empty space");
    return DeterminantSpace(basis, std::move(dets));
}

}  // namespace ccdf
