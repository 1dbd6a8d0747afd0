"""Coordinate-level oracle for cohomology dimensions.

Forms are written in the coordinate 1-forms dz_k, dzbar_k with coefficient
functions in sympy; ``z`` and ``zbar`` are treated as independent variables.
The exterior derivative is the honest coordinate one, so this shares nothing
with the engine's structure-equation calculus.  Coefficients on the model basis
are recovered numerically by sampling, and ranks come from numpy SVD.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
import sympy as sp

Z = sp.symbols("z1:4")
W = sp.symbols("w1:4")  # zbar
VARS = Z + W


def _sort_sign(idx):
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ia, ea in a.items():
        for ib, eb in b.items():
            s, key = _sort_sign(ia + ib)
            if s:
                out[key] = out.get(key, 0) + s * ea * eb
    return out


def ext_d(a: dict) -> dict:
    out: dict = {}
    for idx, e in a.items():
        for j, v in enumerate(VARS):
            de = sp.diff(e, v)
            if de != 0:
                s, key = _sort_sign((j,) + idx)
                if s:
                    out[key] = out.get(key, 0) + s * de
    return out


def conj(a: dict) -> dict:
    swap = {**{z: w for z, w in zip(Z, W)}, **{w: z for z, w in zip(Z, W)}}
    out = {}
    for idx, e in a.items():
        s, key = _sort_sign(tuple((i + 3) % 6 for i in idx))
        out[key] = s * e.xreplace({sp.I: -sp.I}).xreplace(swap)
    return out


def dz(k):
    return {(k,): sp.Integer(1)}


def dzbar(k):
    return {(k + 3,): sp.Integer(1)}


class Oracle:
    """Bigraded complex spanned by ``chi_s * eta^H ^ etabar^A``."""

    def __init__(self, coframe, characters, keep=None, seed=7, samples=6):
        self.eta = list(coframe)
        self.etabar = [conj(f) for f in self.eta]
        self.chars = list(characters)  # sympy expressions in z1, w1
        self.keep = keep  # optional predicate on (H, A)
        rng = np.random.default_rng(seed)
        self.points = [
            {v: complex(*rng.uniform(-0.6, 0.6, 2)) for v in VARS} for _ in range(samples)
        ]
        self._basis = {}
        self._vals = {}

    def basis(self, p, q):
        key = (p, q)
        if key not in self._basis:
            out = []
            if 0 <= p <= 3 and 0 <= q <= 3:
                for ci in range(len(self.chars)):
                    for H in combinations(range(3), p):
                        for A in combinations(range(3), q):
                            if self.keep is None or self.keep(H, A):
                                out.append((ci, H, A))
            self._basis[key] = out
        return self._basis[key]

    def form(self, b):
        ci, H, A = b
        f = {(): self.chars[ci]}
        for h in H:
            f = wedge(f, self.eta[h])
        for a in A:
            f = wedge(f, self.etabar[a])
        return f

    def _sample(self, f, k):
        keys = list(combinations(range(6), k))
        out = np.zeros((len(self.points), len(keys)), dtype=complex)
        for col, key in enumerate(keys):
            e = f.get(key, 0)
            if e == 0:
                continue
            fn = sp.lambdify(VARS, e, "numpy")
            for r, pt in enumerate(self.points):
                out[r, col] = complex(fn(*[pt[v] for v in VARS]))
        return out.ravel()

    def _columns(self, k):
        if k not in self._vals:
            cols, labels = [], []
            for p in range(k + 1):
                for b in self.basis(p, k - p):
                    cols.append(self._sample(self.form(b), k))
                    labels.append((p, k - p, b))
            self._vals[k] = (np.array(cols).T if cols else np.zeros((0, 0)), labels)
        return self._vals[k]

    def d_matrix(self, p, q):
        """Matrix of d from (p,q) into degree p+q+1, rows labelled by bidegree."""
        k = p + q
        src = self.basis(p, q)
        mat, labels = self._columns(k + 1)
        out = np.zeros((len(labels), len(src)), dtype=complex)
        for j, b in enumerate(src):
            target = self._sample(ext_d(self.form(b)), k + 1)
            if not labels:
                assert np.allclose(target, 0)
                continue
            coef, *_ = np.linalg.lstsq(mat, target, rcond=None)
            assert np.allclose(mat @ coef, target, atol=1e-8), "d leaves the model complex"
            out[:, j] = coef
        return out, labels

    def part(self, p, q, shift):
        mat, labels = self.d_matrix(p, q)
        rows = [i for i, (pp, qq, _) in enumerate(labels) if (pp, qq) == (p + shift[0], q + shift[1])]
        return mat[rows, :] if rows else np.zeros((0, mat.shape[1]))

    def delbar(self, p, q):
        return self.part(p, q, (0, 1))

    def del_(self, p, q):
        return self.part(p, q, (1, 0))


def _rank(m):
    if m.size == 0:
        return 0
    return int(np.linalg.matrix_rank(m, tol=1e-8))


def _n(o, p, q):
    return len(o.basis(p, q))


def dolbeault_dim(o, p, q):
    ker = _n(o, p, q) - _rank(o.delbar(p, q))
    im = _rank(o.delbar(p, q - 1)) if q >= 1 else 0
    return ker - im


def bc_dim(o, p, q):
    stacked = np.vstack([o.del_(p, q), o.delbar(p, q)])
    ker = _n(o, p, q) - _rank(stacked)
    im = 0
    if p >= 1 and q >= 1:
        # dd^c from (p-1, q-1): delbar then del
        db = o.delbar(p - 1, q - 1)
        dd = o.del_(p - 1, q) @ db if db.size else np.zeros((_n(o, p, q), _n(o, p - 1, q - 1)))
        im = _rank(dd)
    return ker - im


def aeppli_dim(o, p, q):
    n = _n(o, p, q)
    if p + 1 <= 3 and q + 1 <= 3:
        db = o.delbar(p, q)
        dd = o.del_(p, q + 1) @ db if db.size else np.zeros((0, n))
        ker = n - _rank(dd)
    else:
        ker = n
    parts = []
    if p >= 1:
        parts.append(o.del_(p - 1, q))
    if q >= 1:
        parts.append(o.delbar(p, q - 1))
    parts = [x for x in parts if x.size]
    im = _rank(np.hstack(parts)) if parts else 0
    return ker - im


def betti(o, k):
    def dmat(deg):
        blocks = []
        for p in range(deg + 1):
            if o.basis(p, deg - p):
                mat, _ = o.d_matrix(p, deg - p)
                blocks.append(mat)
        return np.hstack(blocks) if blocks else np.zeros((0, 0))

    size = sum(_n(o, p, k - p) for p in range(k + 1))
    ker = size - _rank(dmat(k))
    im = _rank(dmat(k - 1)) if k >= 1 else 0
    return ker - im


# ----------------------------------------------------------------------------
# concrete complexes
# ----------------------------------------------------------------------------


def nakamura(t=0, sign=1):
    """Nakamura coframe ``dz1 + sign*t*dzbar1, e^{-z1} dz2, e^{z1} dz3``."""
    t = sp.nsimplify(t)
    eta1 = {(0,): sp.Integer(1), (3,): sign * t}
    eta2 = {(1,): sp.exp(-Z[0])}
    eta3 = {(2,): sp.exp(Z[0])}
    chars = [sp.Integer(1), sp.exp(Z[0] - W[0]), sp.exp(W[0] - Z[0])]
    return Oracle([eta1, eta2, eta3], chars)


def iwasawa(keep=None):
    eta3 = {(2,): sp.Integer(1), (1,): -Z[0]}
    return Oracle([dz(0), dz(1), eta3], [sp.Integer(1)], keep=keep)


def solv(t1=0, t2=0):
    """Coframe ``e^{-2i z3} dz1 + t1 dzbar3, e^{2i z3} dz2, dz3 + t2 dzbar3``."""
    t1, t2 = sp.nsimplify(t1), sp.nsimplify(t2)
    eta1 = {(0,): sp.exp(-2 * sp.I * Z[2]), (5,): t1}
    eta2 = {(1,): sp.exp(2 * sp.I * Z[2])}
    eta3 = {(2,): sp.Integer(1), (5,): t2}
    return Oracle([eta1, eta2, eta3], [sp.Integer(1)])
