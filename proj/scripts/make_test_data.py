#!/usr/bin/env python3
"""Generate the FCIDUMP fixtures under tests/data/.

Computes contracted Gaussian integrals (McMurchie-Davidson, s and p shells),
runs a closed-shell RHF with DIIS, transforms to the MO basis, and writes
FCIDUMP files. Only needs numpy + scipy.
"""

import argparse
import math
import os

import numpy as np
from scipy.special import hyp1f1

# --- basis sets (exponents, contraction coefficients for normalized primitives) ---

STO3G_H = [("S", [3.425250914, 0.6239137298, 0.1688554040],
            [0.1543289673, 0.5353281423, 0.4446345422])]

STO3G_LI = [
    ("S", [16.11957475, 2.936200663, 0.794650487],
     [0.1543289673, 0.5353281423, 0.4446345422]),
    ("S", [0.6362897469, 0.1478600533, 0.0480886784],
     [-0.09996722919, 0.3995128261, 0.7001154689]),
    ("P", [0.6362897469, 0.1478600533, 0.0480886784],
     [0.1559162750, 0.6076837186, 0.3919573931]),
]

G631_H = [
    ("S", [18.73113700, 2.825394365, 0.6401216923],
     [0.03349460434, 0.2347269535, 0.8137573261]),
    ("S", [0.1612777588], [1.0]),
]

BASES = {"sto-3g": {"H": STO3G_H, "Li": STO3G_LI},
         "6-31g": {"H": G631_H}}

CHARGES = {"H": 1.0, "Li": 3.0}

ANGMOM = {"S": [(0, 0, 0)], "P": [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


def primitive_norm(alpha, lmn):
    l, m, n = lmn
    L = l + m + n
    num = (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0)
    den = math.sqrt(float(_df(2 * l - 1) * _df(2 * m - 1) * _df(2 * n - 1)))
    return num / den


def _df(n):
    # double factorial with (-1)!! = 1
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


class CGF:
    """Contracted cartesian Gaussian."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = lmn
        self.exps = list(exps)
        self.coefs = [c * primitive_norm(a, lmn) for a, c in zip(exps, coefs)]
        s = overlap_cgf(self, self)
        self.coefs = [c / math.sqrt(s) for c in self.coefs]


def hermite_E(i, j, t, Qx, a, b):
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * Qx * Qx)
    if j == 0:
        return (hermite_E(i - 1, j, t - 1, Qx, a, b) / (2 * p)
                - (q * Qx / a) * hermite_E(i - 1, j, t, Qx, a, b)
                + (t + 1) * hermite_E(i - 1, j, t + 1, Qx, a, b))
    return (hermite_E(i, j - 1, t - 1, Qx, a, b) / (2 * p)
            + (q * Qx / b) * hermite_E(i, j - 1, t, Qx, a, b)
            + (t + 1) * hermite_E(i, j - 1, t + 1, Qx, a, b))


def overlap_prim(a, lmn1, A, b, lmn2, B):
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    S1 = hermite_E(l1, l2, 0, A[0] - B[0], a, b)
    S2 = hermite_E(m1, m2, 0, A[1] - B[1], a, b)
    S3 = hermite_E(n1, n2, 0, A[2] - B[2], a, b)
    return S1 * S2 * S3 * (math.pi / (a + b)) ** 1.5


def overlap_cgf(g1, g2):
    return sum(c1 * c2 * overlap_prim(a1, g1.lmn, g1.center, a2, g2.lmn, g2.center)
               for a1, c1 in zip(g1.exps, g1.coefs)
               for a2, c2 in zip(g2.exps, g2.coefs))


def kinetic_prim(a, lmn1, A, b, lmn2, B):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * overlap_prim(a, lmn1, A, b, lmn2, B)
    term1 = -2 * b * b * (
        overlap_prim(a, lmn1, A, b, (l2 + 2, m2, n2), B)
        + overlap_prim(a, lmn1, A, b, (l2, m2 + 2, n2), B)
        + overlap_prim(a, lmn1, A, b, (l2, m2, n2 + 2), B))
    term2 = -0.5 * (l2 * (l2 - 1) * overlap_prim(a, lmn1, A, b, (l2 - 2, m2, n2), B)
                    + m2 * (m2 - 1) * overlap_prim(a, lmn1, A, b, (l2, m2 - 2, n2), B)
                    + n2 * (n2 - 1) * overlap_prim(a, lmn1, A, b, (l2, m2, n2 - 2), B))
    return term0 + term1 + term2


def kinetic_cgf(g1, g2):
    return sum(c1 * c2 * kinetic_prim(a1, g1.lmn, g1.center, a2, g2.lmn, g2.center)
               for a1, c1 in zip(g1.exps, g1.coefs)
               for a2, c2 in zip(g2.exps, g2.coefs))


def boys(n, T):
    return hyp1f1(n + 0.5, n + 1.5, -T) / (2.0 * n + 1.0)


def hermite_R(t, u, v, n, p, PC):
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        T = p * (PC[0] ** 2 + PC[1] ** 2 + PC[2] ** 2)
        return (-2.0 * p) ** n * boys(n, T)
    if t > 0:
        return ((t - 1) * hermite_R(t - 2, u, v, n + 1, p, PC)
                + PC[0] * hermite_R(t - 1, u, v, n + 1, p, PC))
    if u > 0:
        return ((u - 1) * hermite_R(t, u - 2, v, n + 1, p, PC)
                + PC[1] * hermite_R(t, u - 1, v, n + 1, p, PC))
    return ((v - 1) * hermite_R(t, u, v - 2, n + 1, p, PC)
            + PC[2] * hermite_R(t, u, v - 1, n + 1, p, PC))


def nuclear_prim(a, lmn1, A, b, lmn2, B, C):
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    p = a + b
    P = (a * A + b * B) / p
    val = 0.0
    for t in range(l1 + l2 + 1):
        Et = hermite_E(l1, l2, t, A[0] - B[0], a, b)
        for u in range(m1 + m2 + 1):
            Eu = hermite_E(m1, m2, u, A[1] - B[1], a, b)
            for v in range(n1 + n2 + 1):
                Ev = hermite_E(n1, n2, v, A[2] - B[2], a, b)
                val += Et * Eu * Ev * hermite_R(t, u, v, 0, p, P - C)
    return 2.0 * math.pi / p * val


def nuclear_cgf(g1, g2, C):
    return sum(c1 * c2 * nuclear_prim(a1, g1.lmn, g1.center, a2, g2.lmn, g2.center, C)
               for a1, c1 in zip(g1.exps, g1.coefs)
               for a2, c2 in zip(g2.exps, g2.coefs))


def eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D):
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    val = 0.0
    for t in range(l1 + l2 + 1):
        E1t = hermite_E(l1, l2, t, A[0] - B[0], a, b)
        for u in range(m1 + m2 + 1):
            E1u = hermite_E(m1, m2, u, A[1] - B[1], a, b)
            for v in range(n1 + n2 + 1):
                E1v = hermite_E(n1, n2, v, A[2] - B[2], a, b)
                for tau in range(l3 + l4 + 1):
                    E2t = hermite_E(l3, l4, tau, C[0] - D[0], c, d)
                    for nu in range(m3 + m4 + 1):
                        E2u = hermite_E(m3, m4, nu, C[1] - D[1], c, d)
                        for phi in range(n3 + n4 + 1):
                            E2v = hermite_E(n3, n4, phi, C[2] - D[2], c, d)
                            val += (E1t * E1u * E1v * E2t * E2u * E2v
                                    * (-1.0) ** (tau + nu + phi)
                                    * hermite_R(t + tau, u + nu, v + phi, 0,
                                                alpha, P - Q))
    return val * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def eri_cgf(g1, g2, g3, g4):
    val = 0.0
    for a1, c1 in zip(g1.exps, g1.coefs):
        for a2, c2 in zip(g2.exps, g2.coefs):
            for a3, c3 in zip(g3.exps, g3.coefs):
                for a4, c4 in zip(g4.exps, g4.coefs):
                    val += c1 * c2 * c3 * c4 * eri_prim(
                        a1, g1.lmn, g1.center, a2, g2.lmn, g2.center,
                        a3, g3.lmn, g3.center, a4, g4.lmn, g4.center)
    return val


def build_molecule(atoms, basis_name):
    basis = BASES[basis_name]
    cgfs = []
    for sym, xyz in atoms:
        for shell, exps, coefs in basis[sym]:
            for lmn in ANGMOM[shell]:
                cgfs.append(CGF(xyz, lmn, exps, coefs))
    return cgfs


def integrals(atoms, cgfs):
    n = len(cgfs)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = overlap_cgf(cgfs[i], cgfs[j])
            T[i, j] = T[j, i] = kinetic_cgf(cgfs[i], cgfs[j])
            v = sum(-CHARGES[sym] * nuclear_cgf(cgfs[i], cgfs[j], np.asarray(xyz))
                    for sym, xyz in atoms)
            V[i, j] = V[j, i] = v
    eri = np.zeros((n, n, n, n))
    # 8-fold unique loop
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    val = eri_cgf(cgfs[i], cgfs[j], cgfs[k], cgfs[l])
                    for (a, b) in ((i, j), (j, i)):
                        for (c, d) in ((k, l), (l, k)):
                            eri[a, b, c, d] = val
                            eri[c, d, a, b] = val
    return S, T, V, eri


def nuclear_repulsion(atoms):
    e = 0.0
    for i, (si, xi) in enumerate(atoms):
        for j, (sj, xj) in enumerate(atoms):
            if j <= i:
                continue
            r = np.linalg.norm(np.asarray(xi) - np.asarray(xj))
            e += CHARGES[si] * CHARGES[sj] / r
    return e


def rhf(S, Hcore, eri, n_elec, max_iter=300):
    n = S.shape[0]
    nocc = n_elec // 2
    sval, svec = np.linalg.eigh(S)
    X = svec @ np.diag(sval ** -0.5) @ svec.T
    # core guess
    eps, Cp = np.linalg.eigh(X.T @ Hcore @ X)
    C = X @ Cp
    D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
    diis_F, diis_e = [], []
    for it in range(max_iter):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = Hcore + J - 0.5 * K
        err = X.T @ (F @ D @ S - S @ D @ F) @ X
        if np.max(np.abs(err)) < 1e-11 and it > 1:
            eps, Cp = np.linalg.eigh(X.T @ F @ X)
            C = X @ Cp
            energy = np.sum(D * Hcore) + 0.5 * np.sum(D * (J - 0.5 * K))
            return energy, C, eps
        diis_F.append(F.copy())
        diis_e.append(err.copy())
        if len(diis_F) > 8:
            diis_F.pop(0)
            diis_e.pop(0)
        Fuse = F
        if len(diis_F) > 1:
            m = len(diis_F)
            B = np.zeros((m + 1, m + 1))
            B[:m, m] = B[m, :m] = -1.0
            for a in range(m):
                for b in range(m):
                    B[a, b] = np.tensordot(diis_e[a], diis_e[b])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                c = np.linalg.solve(B, rhs)[:m]
                Fuse = sum(ci * Fi for ci, Fi in zip(c, diis_F))
            except np.linalg.LinAlgError:
                pass
        eps, Cp = np.linalg.eigh(X.T @ Fuse @ X)
        C = X @ Cp
        D = 2.0 * C[:, :nocc] @ C[:, :nocc].T
    raise RuntimeError(f"SCF failed to converge in {max_iter} iterations "
                       f"(max|FDS-SDF| = {np.max(np.abs(err)):.3e})")


def mo_transform(Hcore, eri, C):
    h_mo = C.T @ Hcore @ C
    tmp = np.einsum("pqrs,pi->iqrs", eri, C, optimize=True)
    tmp = np.einsum("iqrs,qj->ijrs", tmp, C, optimize=True)
    tmp = np.einsum("ijrs,rk->ijks", tmp, C, optimize=True)
    eri_mo = np.einsum("ijks,sl->ijkl", tmp, C, optimize=True)
    return h_mo, eri_mo


def write_fcidump(path, h_mo, eri_mo, e_core, n_elec, ms2=0, thresh=1e-14):
    n = h_mo.shape[0]
    with open(path, "w") as f:
        f.write(f"&FCI NORB={n},NELEC={n_elec},MS2={ms2},\n")
        f.write(" ORBSYM=" + ",".join(["1"] * n) + ",\n")
        f.write(" ISYM=1,\n")
        f.write("&END\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    lmax = j if k == i else k
                    for l in range(lmax + 1):
                        v = eri_mo[i, j, k, l]
                        if abs(v) > thresh:
                            f.write(f"{v:23.16E} {i+1:4d} {j+1:4d} {k+1:4d} {l+1:4d}\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(h_mo[i, j]) > thresh:
                    f.write(f"{h_mo[i,j]:23.16E} {i+1:4d} {j+1:4d}    0    0\n")
        f.write(f"{e_core:23.16E}    0    0    0    0\n")


def run_system(name, atoms, basis, n_elec, outdir):
    cgfs = build_molecule(atoms, basis)
    S, T, V, eri = integrals(atoms, cgfs)
    Hcore = T + V
    e_nuc = nuclear_repulsion(atoms)
    e_scf, C, eps = rhf(S, Hcore, eri, n_elec)
    h_mo, eri_mo = mo_transform(Hcore, eri, C)
    path = os.path.join(outdir, name + ".fcidump")
    write_fcidump(path, h_mo, eri_mo, e_nuc, n_elec)
    print(f"{name:26s} nbf={len(cgfs)}  E(RHF)={e_scf + e_nuc: .10f}  "
          f"gap={eps[n_elec//2] - eps[n_elec//2-1]:.6f}")
    return e_scf + e_nuc


def h4_rect(a, b):
    return [("H", (0.0, 0.0, 0.0)), ("H", (a, 0.0, 0.0)),
            ("H", (0.0, b, 0.0)), ("H", (a, b, 0.0))]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default=os.path.join(os.path.dirname(__file__),
                                                     "..", "tests", "data"))
    args = ap.parse_args()
    outdir = os.path.abspath(args.outdir)
    os.makedirs(outdir, exist_ok=True)

    run_system("h2_sto3g_1.4011", [("H", (0, 0, 0)), ("H", (0, 0, 1.4011))],
               "sto-3g", 2, outdir)
    run_system("h4_sto3g_r20x25", h4_rect(2.0, 2.5), "sto-3g", 4, outdir)
    run_system("h4_sto3g_r20x30", h4_rect(2.0, 3.0), "sto-3g", 4, outdir)
    run_system("h4_sto3g_r08x092", h4_rect(0.80, 0.92), "sto-3g", 4, outdir)
    run_system("h4_631g_r20x25", h4_rect(2.0, 2.5), "6-31g", 4, outdir)
    run_system("h4_631g_r20x30", h4_rect(2.0, 3.0), "6-31g", 4, outdir)
    run_system("h4_631g_r20x35", h4_rect(2.0, 3.5), "6-31g", 4, outdir)
    for r in (2.8, 3.2, 4.0):
        run_system(f"lih_sto3g_{r:.1f}",
                   [("Li", (0, 0, 0)), ("H", (0, 0, r))], "sto-3g", 4, outdir)


if __name__ == "__main__":
    main()
