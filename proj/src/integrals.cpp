#include "ccdf/integrals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ccdf {

namespace {

bool spatial_sym_ok(const Eigen::MatrixXd& m, double tol) {
    for (int p = 0; p < m.rows(); ++p)
        for (int q = 0; q < p; ++q)
            if (std::abs(m(p, q) - m(q, p)) > tol) return false;
    return true;
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

void IntegralSet::validate() const {
    if (n_spatial <= 0) throw std::invalid_argument("IntegralSet: NORB must be positive");
    if (n_elec <= 0 || n_elec > 2 * n_spatial)
        throw std::invalid_argument("IntegralSet: NELEC out of range");
    if (n_elec % 2 != 0)
        throw std::invalid_argument("IntegralSet: odd NELEC; only closed-shell references are supported");
    if (!spatial_sym_ok(h_spatial, 1e-12))
        throw std::invalid_argument("IntegralSet: h not symmetric");
    const int n = n_spatial;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) {
                    const double v = eri_spatial(p, q, r, s);
                    if (std::abs(v - eri_spatial(q, p, r, s)) > 1e-12 ||
                        std::abs(v - eri_spatial(p, q, s, r)) > 1e-12 ||
                        std::abs(v - eri_spatial(r, s, p, q)) > 1e-12)
                        throw std::invalid_argument("IntegralSet: ERI 8-fold symmetry violated");
                }
}

SpinOrbitalBasis::SpinOrbitalBasis(int n_spatial, int n_elec)
    : n_spatial_(n_spatial), n_elec_(n_elec) {
    if (n_elec < 0 || n_elec > 2 * n_spatial)
        throw std::invalid_argument("SpinOrbitalBasis: electron count out of range");
    for (int so = 0; so < 2 * n_spatial; ++so)
        (so < n_elec ? occ_ : virt_).push_back(so);
}

void BareHamiltonian::validate() const {
    const int n = basis.n_spinorb();
    if (h.rows() != n || h.cols() != n || v.dim() != n)
        throw std::invalid_argument("BareHamiltonian: tensor dimensions inconsistent with basis");
    if (!spatial_sym_ok(h, 1e-12))
        throw std::invalid_argument("BareHamiltonian: h not Hermitian");
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) {
                    const double x = v(p, q, r, s);
                    if (std::abs(x + v(q, p, r, s)) > 1e-12 ||
                        std::abs(x + v(p, q, s, r)) > 1e-12 ||
                        std::abs(x - v(r, s, p, q)) > 1e-12)
                        throw std::invalid_argument("BareHamiltonian: <pq||rs> symmetry violated");
                }
}

namespace {

struct HeaderInfo {
    int norb = -1, nelec = -1, ms2 = 0;
};

HeaderInfo parse_header(std::istream& in, int& lineno) {
    HeaderInfo info;
    std::string line, header;
    bool started = false, done = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string u = upper(line);
        if (!started) {
            auto pos = u.find("&FCI");
            if (pos == std::string::npos)
                throw std::runtime_error("FCIDUMP parse error at line " + std::to_string(lineno) +
                                         ": expected '&FCI' header");
            started = true;
            u = u.substr(pos + 4);
        }
        auto endpos = u.find("&END");
        if (endpos == std::string::npos) endpos = u.find('/');
        if (endpos != std::string::npos) {
            header += " " + u.substr(0, endpos);
            done = true;
            break;
        }
        header += " " + u;
    }
    if (!done)
        throw std::runtime_error("FCIDUMP parse error at line " + std::to_string(lineno) +
                                 ": header not terminated by '/' or '&END'");
    // split on commas/space into KEY=VALUE[,VALUE..] tokens
    for (char& c : header)
        if (c == ',' || c == '\t') c = ' ';
    std::istringstream hs(header);
    std::string tok;
    std::string pending_key;
    while (hs >> tok) {
        std::string key, val;
        auto eq = tok.find('=');
        if (eq != std::string::npos) {
            key = tok.substr(0, eq);
            val = tok.substr(eq + 1);
            pending_key = key;
        } else {
            key = pending_key;  // continuation value (e.g. ORBSYM lists)
            val = tok;
        }
        if (val.empty()) continue;
        try {
            if (key == "NORB") info.norb = std::stoi(val);
            else if (key == "NELEC") info.nelec = std::stoi(val);
            else if (key == "MS2") info.ms2 = std::stoi(val);
        } catch (const std::exception&) {
            throw std::runtime_error("FCIDUMP parse error in header: bad value '" + val +
                                     "' for key " + key);
        }
    }
    if (info.norb <= 0)
        throw std::runtime_error("FCIDUMP parse error: header missing a valid NORB");
    if (info.nelec < 0)
        throw std::runtime_error("FCIDUMP parse error: header missing a valid NELEC");
    return info;
}

}  // namespace

IntegralSet parse_fcidump(std::istream& text) {
    int lineno = 0;
    const HeaderInfo hi = parse_header(text, lineno);

    IntegralSet s;
    s.n_spatial = hi.norb;
    s.n_elec = hi.nelec;
    s.ms2 = hi.ms2;
    s.h_spatial = Eigen::MatrixXd::Zero(hi.norb, hi.norb);
    s.eri_spatial = Tensor4(hi.norb);

    // canonical-slot bookkeeping for duplicate detection
    std::map<std::array<int, 4>, double> seen;
    bool core_seen = false;

    auto canon2 = [](int i, int j) { return std::array<int, 4>{std::max(i, j), std::min(i, j), -1, -1}; };
    auto canon4 = [](int i, int j, int k, int l) {
        if (i < j) std::swap(i, j);
        if (k < l) std::swap(k, l);
        if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) {
            std::swap(i, k);
            std::swap(j, l);
        }
        return std::array<int, 4>{i, j, k, l};
    };

    std::string line;
    while (std::getline(text, line)) {
        ++lineno;
        std::istringstream ls(line);
        double value;
        int i, j, k, l;
        if (!(ls >> value)) {
            // skip blank lines
            std::istringstream probe(line);
            std::string w;
            if (!(probe >> w)) continue;
            throw std::runtime_error("FCIDUMP parse error at line " + std::to_string(lineno) +
                                     ": expected 'value i j k l'");
        }
        if (!(ls >> i >> j >> k >> l))
            throw std::runtime_error("FCIDUMP parse error at line " + std::to_string(lineno) +
                                     ": expected four indices");
        for (int idx : {i, j, k, l})
            if (idx < 0 || idx > hi.norb)
                throw std::runtime_error("FCIDUMP bounds error at line " + std::to_string(lineno) +
                                         ": index " + std::to_string(idx) + " outside [0, " +
                                         std::to_string(hi.norb) + "]");

        if (i == 0 && j == 0 && k == 0 && l == 0) {
            if (core_seen && std::abs(s.e_core - value) > 1e-10)
                throw std::runtime_error("FCIDUMP consistency error at line " + std::to_string(lineno) +
                                         ": core energy re-specified with a different value");
            s.e_core = value;
            core_seen = true;
        } else if (k == 0 && l == 0 && i > 0 && j > 0) {
            auto key = canon2(i, j);
            auto it = seen.find(key);
            if (it != seen.end() && std::abs(it->second - value) > 1e-10)
                throw std::runtime_error("FCIDUMP consistency error at line " + std::to_string(lineno) +
                                         ": duplicate one-body entry disagrees");
            seen[key] = value;
            s.h_spatial(i - 1, j - 1) = value;
            s.h_spatial(j - 1, i - 1) = value;
        } else if (i > 0 && j > 0 && k > 0 && l > 0) {
            auto key = canon4(i, j, k, l);
            auto it = seen.find(key);
            if (it != seen.end() && std::abs(it->second - value) > 1e-10)
                throw std::runtime_error("FCIDUMP consistency error at line " + std::to_string(lineno) +
                                         ": duplicate two-body entry disagrees");
            seen[key] = value;
            const int p = i - 1, q = j - 1, r = k - 1, t = l - 1;
            for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
                for (auto [c, d] : {std::pair{r, t}, std::pair{t, r}}) {
                    s.eri_spatial(a, b, c, d) = value;
                    s.eri_spatial(c, d, a, b) = value;
                }
        } else {
            throw std::runtime_error("FCIDUMP parse error at line " + std::to_string(lineno) +
                                     ": unrecognized index pattern");
        }
    }
    s.validate();
    return s;
}

IntegralSet parse_fcidump_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
    return parse_fcidump(in);
}

void emit_fcidump(const IntegralSet& s, std::ostream& out) {
    char buf[96];
    out << "&FCI NORB=" << s.n_spatial << ",NELEC=" << s.n_elec << ",MS2=" << s.ms2 << ",\n";
    out << "&END\n";
    const int n = s.n_spatial;
    auto emit = [&](double v, int i, int j, int k, int l) {
        std::snprintf(buf, sizeof buf, "%23.15E %4d %4d %4d %4d\n", v, i, j, k, l);
        out << buf;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            for (int k = 0; k <= i; ++k) {
                const int lmax = (k == i) ? j : k;
                for (int l = 0; l <= lmax; ++l) {
                    const double v = s.eri_spatial(i, j, k, l);
                    if (std::abs(v) > 1e-14) emit(v, i + 1, j + 1, k + 1, l + 1);
                }
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            if (std::abs(s.h_spatial(i, j)) > 1e-14) emit(s.h_spatial(i, j), i + 1, j + 1, 0, 0);
    emit(s.e_core, 0, 0, 0, 0);
}

BareHamiltonian to_spinorbital(const IntegralSet& s) {
    s.validate();
    BareHamiltonian out;
    out.basis = SpinOrbitalBasis(s.n_spatial, s.n_elec);
    out.e_core = s.e_core;
    const int n = out.basis.n_spinorb();
    out.h = Eigen::MatrixXd::Zero(n, n);
    out.v = Tensor4(n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (SpinOrbitalBasis::spin_of(p) == SpinOrbitalBasis::spin_of(q))
                out.h(p, q) = s.h_spatial(p / 2, q / 2);
    // <pq||rs> = (pr|qs) d(sp,sr) d(sq,ss) - (ps|qr) d(sp,ss) d(sq,sr)
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s4 = 0; s4 < n; ++s4) {
                    double val = 0.0;
                    if (p % 2 == r % 2 && q % 2 == s4 % 2)
                        val += s.eri_spatial(p / 2, r / 2, q / 2, s4 / 2);
                    if (p % 2 == s4 % 2 && q % 2 == r % 2)
                        val -= s.eri_spatial(p / 2, s4 / 2, q / 2, r / 2);
                    out.v(p, q, r, s4) = val;
                }
    return out;
}

FockOperator build_fock(const BareHamiltonian& hmlt) {
    const int n = hmlt.basis.n_spinorb();
    FockOperator fo;
    fo.f = hmlt.h;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int i : hmlt.basis.occupied()) fo.f(p, q) += hmlt.v(p, i, q, i);

    fo.reference_energy = hmlt.e_core;
    for (int i : hmlt.basis.occupied()) fo.reference_energy += hmlt.h(i, i);
    for (int i : hmlt.basis.occupied())
        for (int j : hmlt.basis.occupied()) fo.reference_energy += 0.5 * hmlt.v(i, j, i, j);

    if (hmlt.basis.n_occ() > 0 && hmlt.basis.n_virt() > 0) {
        const int homo = hmlt.basis.occupied().back();
        const int lumo = hmlt.basis.virtuals().front();
        fo.frontier_gap = std::abs(fo.f(homo, homo) - fo.f(lumo, lumo));
        fo.degenerate_frontier = fo.frontier_gap < 1e-8;
    }
    return fo;
}

}  // namespace ccdf
