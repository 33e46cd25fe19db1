"""Explicit highest-weight modules over exact rationals.

The module is built weight space by weight space, top down.  Candidate
vectors at a weight are the simple lowerings of the basis one level up;
their pairwise contravariant inner products are assembled from the Gram,
lowering and raising blocks of previous levels, so no symbolic monomial
manipulation is ever needed.  The basis of a weight space is the first
subset of candidates of full rank under the contravariant Gram matrix,
which silently quotients by the radical (the maximal submodule).

Generator actions are stored blockwise: ``F[(i, w)]`` is the matrix of f_i
from the basis of weight w to the basis of w - alpha_i, and ``E[(i, w)]``
the matrix of e_i from w to w + alpha_i.  Raising blocks are recovered from
lowering blocks by contravariance: E = S_up^{-1} F^T S_down.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exactla import SparseMat, Subspace, exp_nilpotent
from .rootsystem import RootSystem, weyl_dim

Q = Fraction


class SizeCapError(ValueError):
    """Module dimension exceeds the configured cap."""

    def __init__(self, required: int, cap: int):
        super().__init__(f"module dimension {required} exceeds cap {cap}")
        self.required = required
        self.cap = cap


class PipelineError(RuntimeError):
    """Internal consistency failure; indicates a bug, never bad user input."""


# ----------------------------------------------------------------------
# weight systems (Freudenthal)


@dataclass(frozen=True)
class WeightSystem:
    lam: tuple
    entries: dict          # weight (fundamental coords) -> multiplicity
    levels: dict           # weight -> height of lam - weight

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def zero_multiplicity(self) -> int:
        zero = tuple(0 for _ in self.lam)
        return self.entries.get(zero, 0)


def _dominant_conjugate(rs: RootSystem, f: tuple) -> tuple:
    while True:
        neg = next((i for i, x in enumerate(f) if x < 0), None)
        if neg is None:
            return f
        f = rs.reflect_weight(neg, f)


def weight_system(rs: RootSystem, lam: tuple) -> WeightSystem:
    """All weights of the irreducible module with their multiplicities."""
    lam = tuple(int(x) for x in lam)
    if len(lam) != rs.rank:
        raise ValueError("weight length mismatch")
    if not rs.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    r = rs.rank
    pos_fund = [rs.root_to_fund(n) for n in rs.positive_roots]
    pos_pair = [tuple(n[j] * rs.norms[j] for j in range(r)) for n in rs.positive_roots]

    # dominant weights below lam: closed under subtracting positive roots
    dominants = {lam}
    frontier = [lam]
    while frontier:
        nxt = []
        for w in frontier:
            for pf in pos_fund:
                c = tuple(w[j] - pf[j] for j in range(r))
                if all(x >= 0 for x in c) and c not in dominants:
                    dominants.add(c)
                    nxt.append(c)
        frontier = nxt

    def level_of(w):
        coords = rs.fund_to_root(tuple(a - b for a, b in zip(lam, w)))
        lv = sum(coords)
        if any(x.denominator != 1 for x in coords) or lv.denominator != 1:
            raise PipelineError("weight not in the root lattice shift")
        return int(lv)

    dom_levels = {w: level_of(w) for w in dominants}
    rho = rs.rho()
    lam_rho = tuple(x + 1 for x in lam)
    norm_top = rs.pair_weights(lam_rho, lam_rho)
    mults: dict = {}
    for w in sorted(dominants, key=lambda t: (dom_levels[t], t)):
        if dom_levels[w] == 0:
            mults[w] = 1
            continue
        acc = Q(0)
        for pf, pp in zip(pos_fund, pos_pair):
            k = 1
            while True:
                nu = tuple(w[j] + k * pf[j] for j in range(r))
                m = mults.get(_dominant_conjugate(rs, nu))
                if not m:
                    break
                acc += 2 * m * sum(Q(nu[j]) * pp[j] for j in range(r))
                k += 1
        w_rho = tuple(x + 1 for x in w)
        denom = norm_top - rs.pair_weights(w_rho, w_rho)
        if denom <= 0:
            raise PipelineError("Freudenthal denominator not positive")
        val = acc / denom
        if val.denominator != 1 or val <= 0:
            raise PipelineError(f"Freudenthal gave multiplicity {val} at {w}")
        mults[w] = int(val)

    entries: dict = {}
    levels: dict = {}
    for w, m in mults.items():
        orbit = {w}
        frontier = [w]
        while frontier:
            nxt = []
            for v in frontier:
                for i in range(r):
                    u = rs.reflect_weight(i, v)
                    if u not in orbit:
                        orbit.add(u)
                        nxt.append(u)
            frontier = nxt
        for v in orbit:
            entries[v] = m
            levels[v] = level_of(v)
    ws = WeightSystem(lam, entries, levels)
    if ws.total != weyl_dim(rs, lam):
        raise PipelineError("Freudenthal total disagrees with the Weyl dimension formula")
    return ws


# ----------------------------------------------------------------------
# integer block matrices with a common denominator


def _imat_mul(a: list, b: list) -> list:
    """Integer matrix product; a is m x k, b is k x n."""
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * n
        for t, x in enumerate(row):
            if x:
                bt = b[t]
                if x == 1:
                    acc = [u + v for u, v in zip(acc, bt)]
                else:
                    acc = [u + x * v for u, v in zip(acc, bt)]
        out.append(acc)
    return out


def _dm_normalize(rows: list, den: int):
    g = den
    for row in rows:
        for x in row:
            if x:
                g = gcd(g, x)
                if g == 1:
                    return rows, den
    if g > 1:
        rows = [[x // g for x in row] for row in rows]
        den //= g
    return rows, den


@dataclass
class DMat:
    """Dense integer matrix divided by a positive integer denominator."""

    rows: list
    den: int = 1

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def mul(self, other: "DMat") -> "DMat":
        rows = _imat_mul(self.rows, other.rows)
        rows, den = _dm_normalize(rows, self.den * other.den)
        return DMat(rows, den)

    def transpose(self) -> "DMat":
        m, n = self.shape
        return DMat([[self.rows[i][j] for i in range(m)] for j in range(n)], self.den)

    def q(self, i: int, j: int) -> Fraction:
        return Q(self.rows[i][j], self.den)

    def to_fractions(self) -> list:
        return [[Q(x, self.den) for x in row] for row in self.rows]


def _ff_gauss_jordan(rows: list, m: int) -> tuple:
    """Fraction-free Gauss-Jordan on [S | aug] with S an m x m leading block
    whose leading principal minors are all nonzero.

    Returns (det S, reduced rows) with the final matrix equal to
    det(S) * [I | S^{-1} aug]; intermediate divisions are exact (one-step
    Bareiss), which callers spot-check against the original system.
    """
    denom = 1
    for k in range(m):
        pivot = rows[k][k]
        if pivot == 0:
            raise PipelineError("fraction-free elimination hit a zero pivot")
        rk = rows[k]
        for i in range(m):
            if i == k:
                continue
            ri = rows[i]
            fac = ri[k]
            if fac:
                rows[i] = [(pivot * x - fac * y) // denom for x, y in zip(ri, rk)]
            elif denom != 1 or pivot != 1:
                rows[i] = [(pivot * x) // denom for x in ri]
        denom = pivot
    det = rows[m - 1][m - 1] if m else 1
    return det, rows


# ----------------------------------------------------------------------


@dataclass
class TitsRep:
    word: tuple
    matrix: SparseMat


class HWModule:
    """Irreducible module with explicit generator blocks over Fraction.

    The basis consists of divided-power lowering monomials applied to the
    highest weight vector (the Kostant normalization), which keeps all the
    stored integers small.  ``lead``/``run`` record, per basis vector, the
    last lowering letter applied and the length of its run; the true f_i
    action on a basis vector is the stored divided column times
    (run + 1) when lead == i, else times 1.
    """

    def __init__(self, rs: RootSystem, lam: tuple, weights: list, mults: list, F: dict, E: dict, lead: list, run: list):
        self.rs = rs
        self.lam = tuple(lam)
        self.weights = list(weights)
        self.windex = {w: k for k, w in enumerate(weights)}
        self.mults = list(mults)
        self.offsets = []
        off = 0
        for m in self.mults:
            self.offsets.append(off)
            off += m
        self.dim = off
        self.F = F                  # (i, widx) -> DMat into weight - alpha_i (divided action)
        self.E = E                  # (i, widx) -> DMat into weight + alpha_i (true action)
        self.lead = lead            # per weight: list of last letters, -1 at the top
        self.run = run              # per weight: list of run lengths
        self._alpha_fund = [rs.simple_root_fund(i) for i in range(rs.rank)]
        self._n_full: dict = {}
        self._n_zero: dict = {}
        self._gen_cache: dict = {}

    def f_scale(self, i: int, widx: int, t: int) -> int:
        """Factor relating the true f_i action to the stored divided column."""
        return self.run[widx][t] + 1 if self.lead[widx][t] == i else 1

    # --- bookkeeping -------------------------------------------------
    @property
    def basis_labels(self) -> list:
        out = []
        for w, m in zip(self.weights, self.mults):
            out.extend((w, t) for t in range(m))
        return out

    def weight_index(self, w: tuple):
        return self.windex.get(tuple(w))

    def shifted(self, widx: int, i: int, sign: int):
        w = self.weights[widx]
        a = self._alpha_fund[i]
        return self.windex.get(tuple(x + sign * y for x, y in zip(w, a)))

    def h_value(self, widx: int, i: int) -> int:
        return self.weights[widx][i]

    # --- assembled generator matrices ---------------------------------
    def gen_f(self, i: int) -> SparseMat:
        key = ("f", i)
        if key not in self._gen_cache:
            entries = {}
            for (gi, widx), block in self.F.items():
                if gi != i:
                    continue
                tgt = self.shifted(widx, i, -1)
                ro, co = self.offsets[tgt], self.offsets[widx]
                for cc in range(len(block.rows[0]) if block.rows else 0):
                    sc = self.f_scale(i, widx, cc)
                    for rr, row in enumerate(block.rows):
                        x = row[cc]
                        if x:
                            entries[(ro + rr, co + cc)] = Q(x * sc, block.den)
            self._gen_cache[key] = SparseMat(self.dim, self.dim, entries)
        return self._gen_cache[key]

    def gen_e(self, i: int) -> SparseMat:
        key = ("e", i)
        if key not in self._gen_cache:
            entries = {}
            for (gi, widx), block in self.E.items():
                if gi != i:
                    continue
                tgt = self.shifted(widx, i, +1)
                ro, co = self.offsets[tgt], self.offsets[widx]
                for rr, row in enumerate(block.rows):
                    for cc, x in enumerate(row):
                        if x:
                            entries[(ro + rr, co + cc)] = Q(x, block.den)
            self._gen_cache[key] = SparseMat(self.dim, self.dim, entries)
        return self._gen_cache[key]

    def gen_h(self, i: int) -> SparseMat:
        entries = {}
        for widx, w in enumerate(self.weights):
            v = w[i]
            if v:
                for t in range(self.mults[widx]):
                    k = self.offsets[widx] + t
                    entries[(k, k)] = Q(v)
        return SparseMat(self.dim, self.dim, entries)

    # --- weight-string machinery --------------------------------------
    def string_through(self, i: int, widx: int) -> list:
        """Indices of the alpha_i-string of weights through the given one."""
        down = []
        cur = widx
        while True:
            nxt = self.shifted(cur, i, -1)
            if nxt is None:
                break
            down.append(nxt)
            cur = nxt
        up = []
        cur = widx
        while True:
            nxt = self.shifted(cur, i, +1)
            if nxt is None:
                break
            up.append(nxt)
            cur = nxt
        return list(reversed(down)) + [widx] + up

    def _string_mats(self, i: int, chain: list):
        sizes = [self.mults[w] for w in chain]
        offs = []
        off = 0
        for s in sizes:
            offs.append(off)
            off += s
        dim = off
        e_entries = {}
        f_entries = {}
        for pos, widx in enumerate(chain):
            blk = self.E.get((i, widx))
            if blk is not None and pos + 1 < len(chain):
                ro, co = offs[pos + 1], offs[pos]
                for rr, row in enumerate(blk.rows):
                    for cc, x in enumerate(row):
                        if x:
                            e_entries[(ro + rr, co + cc)] = Q(x, blk.den)
            blk = self.F.get((i, widx))
            if blk is not None and pos - 1 >= 0:
                ro, co = offs[pos - 1], offs[pos]
                for cc in range(len(blk.rows[0]) if blk.rows else 0):
                    sc = self.f_scale(i, widx, cc)
                    for rr, row in enumerate(blk.rows):
                        x = row[cc]
                        if x:
                            f_entries[(ro + rr, co + cc)] = Q(x * sc, blk.den)
        return SparseMat(dim, dim, e_entries), SparseMat(dim, dim, f_entries), offs, sizes

    def n_block(self, i: int, widx: int) -> list:
        """Block of n_i = exp(e_i) exp(-f_i) exp(e_i) from weight widx to its reflection."""
        chain = self.string_through(i, widx)
        emat, fmat, offs, sizes = self._string_mats(i, chain)
        n = exp_nilpotent(emat).mul(exp_nilpotent(fmat.neg())).mul(exp_nilpotent(emat))
        src = chain.index(widx)
        tgt_w = tuple(self.rs.reflect_weight(i, self.weights[widx]))
        tgt = chain.index(self.windex[tgt_w])
        rows = [[n.get(offs[tgt] + rr, offs[src] + cc) for cc in range(sizes[src])] for rr in range(sizes[tgt])]
        # the Tits representative permutes weight blocks; anything else is a bug
        for (rr, cc), v in n.entries.items():
            if offs[src] <= cc < offs[src] + sizes[src] and v:
                if not (offs[tgt] <= rr < offs[tgt] + sizes[tgt]):
                    raise PipelineError("n_i leaked outside the reflected weight block")
        return rows

    def n_zero_block(self, i: int) -> list:
        """Action of n_i on the zero weight space, via sl2 isotypic theory.

        The zero space decomposes under the i-th sl2 into components V(2m),
        on whose weight-zero lines n_i acts by (-1)^m while f_i e_i acts by
        m(m+1).  Since those eigenvalues are distinct, n_i restricted to the
        zero space is the interpolation polynomial in U = f_i e_i sending
        m(m+1) to (-1)^m, which avoids exponentiating the whole weight
        string.  The generic string computation n_block gives the same
        matrix and cross-checks this in the tests.
        """
        if i not in self._n_zero:
            z = self.weight_index(tuple(0 for _ in self.lam))
            if z is None:
                raise PipelineError("no zero weight space")
            d0 = self.mults[z]
            a_idx = self.shifted(z, i, +1)
            if a_idx is None:
                self._n_zero[i] = [[Q(1) if a == b else Q(0) for b in range(d0)] for a in range(d0)]
                return self._n_zero[i]
            eblk = self.E[(i, z)]
            fblk = self.F[(i, a_idx)]
            ftrue = [
                [fblk.rows[rr][cc] * self.f_scale(i, a_idx, cc) for cc in range(len(fblk.rows[0]))]
                for rr in range(len(fblk.rows))
            ]
            urows0, uden0 = _dm_normalize(_imat_mul(ftrue, eblk.rows), fblk.den * eblk.den)
            u = DMat(urows0, uden0)
            # largest sl2 component through zero weight
            mmax = 0
            cur = z
            while True:
                nxt = self.shifted(cur, i, +1)
                if nxt is None:
                    break
                cur = nxt
                mmax += 1
            nodes = [m * (m + 1) for m in range(mmax + 1)]
            urows = u.to_fractions()
            # Newton form of the polynomial sending m(m+1) to (-1)^m
            dd = [Q(-1 if m % 2 else 1) for m in range(mmax + 1)]
            for order in range(1, mmax + 1):
                for t in range(mmax, order - 1, -1):
                    dd[t] = (dd[t] - dd[t - 1]) / (nodes[t] - nodes[t - order])
            result = [[dd[mmax] if a == b else Q(0) for b in range(d0)] for a in range(d0)]
            for t in range(mmax - 1, -1, -1):
                shifted = [
                    [urows[a][b] - (nodes[t] if a == b else 0) for b in range(d0)]
                    for a in range(d0)
                ]
                result = [
                    [
                        sum(result[a][k] * shifted[k][b] for k in range(d0))
                        + (dd[t] if a == b else 0)
                        for b in range(d0)
                    ]
                    for a in range(d0)
                ]
            self._n_zero[i] = result
        return self._n_zero[i]

    # --- full Tits representatives ------------------------------------
    def n_full(self, i: int) -> SparseMat:
        if i not in self._n_full:
            e = self.gen_e(i)
            f = self.gen_f(i)
            self._n_full[i] = exp_nilpotent(e).mul(exp_nilpotent(f.neg())).mul(exp_nilpotent(e))
        return self._n_full[i]


def zero_weight_space(m: HWModule) -> Subspace:
    zero = tuple(0 for _ in m.lam)
    widx = m.weight_index(zero)
    if widx is None:
        return Subspace.zero(m.dim)
    off = m.offsets[widx]
    vecs = []
    for t in range(m.mults[widx]):
        v = [Q(0)] * m.dim
        v[off + t] = Q(1)
        vecs.append(v)
    return Subspace.from_vectors(m.dim, vecs)


def tits_representative(m: HWModule, word: tuple) -> TitsRep:
    mat = SparseMat.identity(m.dim)
    for i in word:
        mat = mat.mul(m.n_full(i))
    return TitsRep(tuple(word), mat)


# ----------------------------------------------------------------------
# construction


def build_module(rs: RootSystem, lam: tuple, size_cap: int = 20000, cache_dir=None) -> HWModule:
    from . import cache as _cache

    lam = tuple(int(x) for x in lam)
    dim = weyl_dim(rs, lam)
    if dim > size_cap:
        raise SizeCapError(dim, size_cap)
    m = _cache.memo_get(rs, lam)
    if m is not None:
        return m
    if cache_dir is not None:
        m = _cache.load_module(cache_dir, rs, lam)
        if m is not None:
            _cache.memo_put(m)
            return m
    m = _build_module_fresh(rs, lam)
    _cache.memo_put(m)
    if cache_dir is not None:
        _cache.save_module(cache_dir, m)
    return m


def _build_module_fresh(rs: RootSystem, lam: tuple) -> HWModule:
    ws = weight_system(rs, lam)
    r = rs.rank
    order = sorted(ws.entries, key=lambda w: (ws.levels[w], w))
    windex = {w: k for k, w in enumerate(order)}
    mults = [ws.entries[w] for w in order]
    alpha = [rs.simple_root_fund(i) for i in range(r)]

    S: dict = {0: [[1]]}
    Sadj: dict = {0: DMat([[1]], 1)}     # det * S^{-1}, per weight
    F: dict = {}
    E: dict = {}
    lead: list = [None] * len(order)
    run: list = [None] * len(order)
    lead[0] = [-1]
    run[0] = [0]

    def fscale(i, widx, t):
        return run[widx][t] + 1 if lead[widx][t] == i else 1

    level_of = [ws.levels[w] for w in order]
    by_level: dict = {}
    for k, w in enumerate(order):
        by_level.setdefault(level_of[k], []).append(k)

    for level in sorted(by_level):
        if level == 0:
            continue
        for widx in by_level[level]:
            w = order[widx]
            groups = []
            for i in range(r):
                pw = tuple(w[j] + alpha[i][j] for j in range(r))
                pidx = windex.get(pw)
                if pidx is not None:
                    groups.append((i, pidx))
            if not groups:
                raise PipelineError(f"weight {w} has no parents")
            gsizes = [mults[p] for _i, p in groups]
            goffs = []
            off = 0
            for s in gsizes:
                goffs.append(off)
                off += s
            ncand = off
            target = mults[widx]

            gram = [[0] * ncand for _ in range(ncand)]
            for a, (i, pi) in enumerate(groups):
                rdiv_a = [fscale(i, pi, s) for s in range(gsizes[a])]
                for b in range(a, len(groups)):
                    j, pj = groups[b]
                    rdiv_b = [fscale(j, pj, t) for t in range(gsizes[b])]
                    nu_w = tuple(order[pj][t] + alpha[i][t] for t in range(r))
                    nuidx = windex.get(nu_w)
                    blk = None
                    if nuidx is not None:
                        fe_f = F.get((j, nuidx))
                        fe_e = E.get((i, pj))
                        if fe_f is not None and fe_e is not None:
                            # true f_j action: scale the divided columns by their run factors
                            fr = [
                                [x * fscale(j, nuidx, cc) for cc, x in enumerate(rowx)]
                                for rowx in fe_f.rows
                            ]
                            prows = _imat_mul(fr, fe_e.rows)
                            sp = _imat_mul(S[pi], prows)
                            blk = (sp, fe_f.den * fe_e.den)
                    if blk is None:
                        blk = ([[0] * gsizes[b] for _ in range(gsizes[a])], 1)
                    rows, den = blk
                    if i == j:
                        h = w[i] + 2
                        if h:
                            spi = S[pi]
                            rows = [
                                [x + h * den * spi[rr][cc] for cc, x in enumerate(rowx)]
                                for rr, rowx in enumerate(rows)
                            ]
                    ra, rb = goffs[a], goffs[b]
                    for rr in range(gsizes[a]):
                        grow = gram[ra + rr]
                        srow = rows[rr]
                        dra = den * rdiv_a[rr]
                        for cc in range(gsizes[b]):
                            x = srow[cc]
                            if x:
                                d = dra * rdiv_b[cc]
                                if x % d:
                                    raise PipelineError("non-integral contravariant product")
                                grow[rb + cc] = x // d
                    if a != b:
                        for rr in range(gsizes[a]):
                            for cc in range(gsizes[b]):
                                gram[rb + cc][ra + rr] = gram[ra + rr][rb + cc]

            # greedy basis: integral Gram-Schmidt (leading minors stay integers)
            chosen: list = []
            dvec: list = []
            lam_rows: list = []
            for t in range(ncand):
                if len(chosen) == target:
                    break
                lam_t = []
                for j in range(len(chosen)):
                    u = gram[t][chosen[j]]
                    lrj = lam_rows[j]
                    for k in range(j):
                        u = (dvec[k] * u - lam_t[k] * lrj[k]) // (dvec[k - 1] if k else 1)
                    lam_t.append(u)
                u = gram[t][t]
                for k in range(len(chosen)):
                    u = (dvec[k] * u - lam_t[k] * lam_t[k]) // (dvec[k - 1] if k else 1)
                if u:
                    lam_rows.append(lam_t)
                    dvec.append(u)
                    chosen.append(t)
            if len(chosen) != target:
                raise PipelineError(
                    f"weight {w}: candidate rank {len(chosen)} below multiplicity {target}"
                )
            S[widx] = [[gram[u][v] for v in chosen] for u in chosen]

            # one fraction-free solve gives the adjugate and all expression columns
            others = [t for t in range(ncand) if t not in set(chosen)]
            aug = [
                S[widx][a]
                + [1 if b == a else 0 for b in range(target)]
                + [gram[chosen[a]][t] for t in others]
                for a in range(target)
            ]
            det, red = _ff_gauss_jordan(aug, target)
            Sadj[widx] = DMat([row[target : 2 * target] for row in red], det)
            expr_cols = {t: [red[a][2 * target + c] for a in range(target)] for c, t in enumerate(others)}
            pos_of = {t: k for k, t in enumerate(chosen)}
            # spot-check exactness of the fraction-free elimination: S adj = det I
            srow = S[widx][0]
            for b in range(target):
                acc = sum(srow[u] * Sadj[widx].rows[u][b] for u in range(target))
                if acc != (det if b == 0 else 0):
                    raise PipelineError("fraction-free elimination produced a wrong inverse")

            for a, (i, pi) in enumerate(groups):
                rows = [[0] * gsizes[a] for _ in range(target)]
                unit_only = True
                for s in range(gsizes[a]):
                    t = goffs[a] + s
                    if t in pos_of:
                        rows[pos_of[t]][s] = det
                    else:
                        unit_only = False
                        col = expr_cols[t]
                        for rr in range(target):
                            rows[rr][s] = col[rr]
                den = det
                if unit_only:
                    rows = [[1 if x == det else 0 for x in row] for row in rows]
                    den = 1
                else:
                    rows, den = _dm_normalize(rows, den)
                F[(i, pi)] = DMat(rows, den)

            # record the divided-monomial shape of the chosen basis vectors
            lead_w = []
            run_w = []
            cand_of = []
            for a, (i, pi) in enumerate(groups):
                cand_of.extend((i, pi, s) for s in range(gsizes[a]))
            for t in chosen:
                i, pi, s = cand_of[t]
                lead_w.append(i)
                run_w.append(run[pi][s] + 1 if lead[pi][s] == i else 1)
            lead[widx] = lead_w
            run[widx] = run_w

            # raising blocks out of this weight, by contravariance:
            # E = S_up^{-1} (R_i F)^T S_down with R_i the true-action scaling
            for a, (i, pi) in enumerate(groups):
                fblk = F[(i, pi)]
                ft_rows = [
                    [fblk.rows[rr][cc] * fscale(i, pi, cc) for rr in range(target)]
                    for cc in range(gsizes[a])
                ]
                mid = _imat_mul(ft_rows, S[widx])
                padj = Sadj[pi]
                erows = _imat_mul(padj.rows, mid)
                erows, eden = _dm_normalize(erows, padj.den * fblk.den)
                E[(i, widx)] = DMat(erows, eden)

        drop = level - 2
        if drop >= 0:
            for k2 in by_level.get(drop, []):
                Sadj.pop(k2, None)

    return HWModule(rs, lam, order, mults, F, E, lead, run)


# ----------------------------------------------------------------------
# validation helpers (used by tests and the acceptance suite)


def verify_relations(m: HWModule) -> None:
    """Assert the defining generator relations as exact matrix identities."""
    r = m.rs.rank
    cart = m.rs.cartan
    es = [m.gen_e(i) for i in range(r)]
    fs = [m.gen_f(i) for i in range(r)]
    hs = [m.gen_h(i) for i in range(r)]
    for i in range(r):
        for j in range(r):
            lhs = es[i].mul(fs[j]).add(fs[j].mul(es[i]).neg())
            rhs = hs[i] if i == j else SparseMat.zero(m.dim, m.dim)
            if lhs != rhs:
                raise PipelineError(f"[e_{i}, f_{j}] relation fails")
            he = hs[i].mul(es[j]).add(es[j].mul(hs[i]).neg())
            if he != es[j].scale(cart[i][j]):
                raise PipelineError(f"[h_{i}, e_{j}] relation fails")
            hf = hs[i].mul(fs[j]).add(fs[j].mul(hs[i]).neg())
            if hf != fs[j].scale(-cart[i][j]):
                raise PipelineError(f"[h_{i}, f_{j}] relation fails")
