#include "ccdf/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ccdf {

void validate_signature(const ExcitationSig& sig, const SpinOrbitalBasis& basis) {
    if (sig.occ.size() != sig.virt.size())
        throw std::invalid_argument("ExcitationSig: occupied/virtual rank mismatch");
    if (sig.occ.empty()) throw std::invalid_argument("ExcitationSig: empty signature");
    if (!std::is_sorted(sig.occ.begin(), sig.occ.end()) ||
        std::adjacent_find(sig.occ.begin(), sig.occ.end()) != sig.occ.end())
        throw std::invalid_argument("ExcitationSig: occupied tuple not strictly sorted");
    if (!std::is_sorted(sig.virt.begin(), sig.virt.end()) ||
        std::adjacent_find(sig.virt.begin(), sig.virt.end()) != sig.virt.end())
        throw std::invalid_argument("ExcitationSig: virtual tuple not strictly sorted");
    int sz = 0;
    for (int i : sig.occ) {
        if (!basis.is_occupied(i))
            throw std::invalid_argument("ExcitationSig: index " + std::to_string(i) + " not occupied");
        sz += (i % 2 == 0) ? 1 : -1;
    }
    for (int a : sig.virt) {
        if (basis.is_occupied(a) || a >= basis.n_spinorb())
            throw std::invalid_argument("ExcitationSig: index " + std::to_string(a) + " not virtual");
        sz -= (a % 2 == 0) ? 1 : -1;
    }
    if (sz != 0) throw std::invalid_argument("ExcitationSig: S_z not conserved");
}

void ClusterOperator::set(const ExcitationSig& sig, double value) {
    validate_signature(sig, basis_);
    if (sig.rank() > rank_bound_)
        throw std::invalid_argument("ClusterOperator: rank exceeds bound");
    amps_[sig] = value;
}

double ClusterOperator::get(const ExcitationSig& sig) const {
    auto it = amps_.find(sig);
    return it == amps_.end() ? 0.0 : it->second;
}

double ClusterOperator::max_abs() const {
    double m = 0.0;
    for (const auto& [sig, t] : amps_) m = std::max(m, std::abs(t));
    return m;
}

void ClusterOperator::merge(const ClusterOperator& other) {
    if (!(basis_ == other.basis_))
        throw std::invalid_argument("ClusterOperator::merge: basis mismatch");
    rank_bound_ = std::max(rank_bound_, other.rank_bound_);
    for (const auto& [sig, t] : other.amplitudes()) amps_[sig] = t;
}

std::uint64_t ClusterOperator::content_hash() const {
    // FNV-1a over the canonical byte stream of (indices, value) records
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& [sig, t] : amps_) {
        for (int i : sig.occ) mix(&i, sizeof i);
        for (int a : sig.virt) mix(&a, sizeof a);
        mix(&t, sizeof t);
    }
    return h;
}

AmplitudeMask::AmplitudeMask(SpinOrbitalBasis basis, std::set<ExcitationSig> sigs)
    : basis_(std::move(basis)), sigs_(std::move(sigs)) {
    for (const auto& s : sigs_) validate_signature(s, basis_);
}

AmplitudeMask AmplitudeMask::merged(const AmplitudeMask& other) const {
    if (!(basis_ == other.basis_))
        throw std::invalid_argument("AmplitudeMask::merged: basis mismatch");
    std::set<ExcitationSig> u = sigs_;
    u.insert(other.sigs_.begin(), other.sigs_.end());
    return AmplitudeMask(basis_, std::move(u));
}

namespace {

void combinations(const std::vector<int>& pool, int k, std::vector<int>& cur,
                  std::size_t start, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        combinations(pool, k, cur, i + 1, out);
        cur.pop_back();
    }
}

int tuple_sz2(const std::vector<int>& t) {
    int s = 0;
    for (int p : t) s += (p % 2 == 0) ? 1 : -1;
    return s;
}

}  // namespace

AmplitudeMask full_mask(const SpinOrbitalBasis& basis, int max_rank) {
    std::set<ExcitationSig> sigs;
    for (int k = 1; k <= max_rank; ++k) {
        std::vector<std::vector<int>> occs, virts;
        std::vector<int> cur;
        combinations(basis.occupied(), k, cur, 0, occs);
        combinations(basis.virtuals(), k, cur, 0, virts);
        for (const auto& o : occs)
            for (const auto& v : virts)
                if (tuple_sz2(o) == tuple_sz2(v)) sigs.insert({o, v});
    }
    return AmplitudeMask(basis, std::move(sigs));
}

void write_amplitudes(const ClusterOperator& t, std::ostream& out) {
    char buf[48];
    for (const auto& [sig, val] : t.amplitudes()) {
        out << sig.rank();
        for (int i : sig.occ) out << ' ' << i;
        for (int a : sig.virt) out << ' ' << a;
        std::snprintf(buf, sizeof buf, " %.15E\n", val);
        out << buf;
    }
}

ClusterOperator read_amplitudes(const SpinOrbitalBasis& basis, int rank_bound, std::istream& in) {
    ClusterOperator t(basis, rank_bound);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        int k;
        if (!(ls >> k)) continue;
        ExcitationSig sig;
        sig.occ.resize(k);
        sig.virt.resize(k);
        for (int& i : sig.occ)
            if (!(ls >> i)) throw std::runtime_error("amplitude dump: short line " + std::to_string(lineno));
        for (int& a : sig.virt)
            if (!(ls >> a)) throw std::runtime_error("amplitude dump: short line " + std::to_string(lineno));
        double val;
        if (!(ls >> val)) throw std::runtime_error("amplitude dump: missing value on line " + std::to_string(lineno));
        t.set(sig, val);
    }
    return t;
}

}  // namespace ccdf
