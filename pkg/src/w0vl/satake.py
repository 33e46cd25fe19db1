"""Real-form catalog: Satake diagrams, restricted roots, and lifts of the
longest restricted Weyl element to words in the full Weyl group.

A Satake diagram is a Dynkin diagram with a black node subset (simple roots
of the anisotropic kernel) and an involutive arrow pairing on white nodes.
From it we derive the involution ``sigma_bar`` on the weight lattice, the
restriction map onto the split part, the restricted root system with
multiplicities, and canonical word lifts of restricted reflections.  Every
catalog entry is validated at load time; a transcription error in the data
file cannot load silently.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import exprs
from .rootsystem import (
    CartanType,
    RootSystem,
    apply_word,
    apply_word_root,
    build_root_system,
    longest_word,
    word_matrix,
)

Q = Fraction


class CatalogError(ValueError):
    """Unknown form name or invalid catalog entry."""


@dataclass(frozen=True)
class RestrictedRootSystem:
    rank: int
    simple: tuple              # restricted simple roots, fundamental coords of the ambient system
    cartan: tuple              # integer Cartan matrix of the reduced subsystem
    positive: tuple            # ((coords in restricted basis), multiplicity), sorted
    reduced_family: str
    reduced_rank: int
    non_reduced: bool

    @property
    def display(self) -> str:
        if self.non_reduced:
            return f"BC{self.reduced_rank}"
        return f"{self.reduced_family}{self.reduced_rank}"


@dataclass(frozen=True)
class RestrictedW0Lift:
    restricted_word: tuple
    full_word: tuple


class SatakeDiagram:
    """A cataloged real form with all derived restriction data."""

    def __init__(self, name: str, cartan_type: CartanType, black, arrows: dict):
        self.name = name
        self.cartan_type = cartan_type
        self.rs: RootSystem = build_root_system(cartan_type)
        self.black = frozenset(black)
        r = cartan_type.rank
        if not self.black <= set(range(r)):
            raise CatalogError(f"{name}: black nodes out of range")
        inv = {i: i for i in range(r)}
        for i, j in arrows.items():
            inv[i] = j
            inv[j] = i
        self.arrows = {i: j for i, j in inv.items() if i != j}
        for i in self.arrows:
            if i in self.black:
                raise CatalogError(f"{name}: arrows must join white nodes")
        self._derive()
        self._validate()

    # ------------------------------------------------------------------
    def is_split(self) -> bool:
        return not self.black and not self.arrows

    def tau(self, i: int) -> int:
        return self._tau[i]

    @property
    def white_orbits(self) -> tuple:
        return self._white_orbits

    @property
    def real_rank(self) -> int:
        return len(self._white_orbits)

    # ------------------------------------------------------------------
    def _derive(self):
        rs = self.rs
        r = rs.rank
        self._w0_black = longest_word(rs, self.black)
        # nu: permutation of the black set induced by -w0 of the black subsystem
        nu = {}
        for j in sorted(self.black):
            alpha = tuple(1 if k == j else 0 for k in range(r))
            image = apply_word_root(rs, self._w0_black, alpha)
            neg = tuple(-x for x in image)
            if sum(neg) != 1 or any(x not in (0, 1) for x in neg):
                raise CatalogError(f"{self.name}: black subsystem longest element misbehaves on node {j}")
            nu[j] = neg.index(1)
        tau = {}
        for i in range(r):
            if i in self.black:
                tau[i] = nu[i]
            else:
                tau[i] = self.arrows.get(i, i)
        self._tau = tau
        cart = rs.cartan
        for i in range(r):
            if (tau[tau[i]] != i) or (i in self.black) != (tau[i] in self.black):
                raise CatalogError(f"{self.name}: node involution is not a colored involution")
            for j in range(r):
                if cart[tau[i]][tau[j]] != cart[i][j]:
                    raise CatalogError(f"{self.name}: node involution is not a diagram automorphism")
        # sigma_bar on fundamental coordinates: first permute by tau, then w0_black
        def sigma(vec):
            permuted = tuple(vec[tau[k]] for k in range(r))
            return apply_word(rs, self._w0_black, permuted)

        self.sigma_bar = sigma
        cols = [sigma(tuple(Q(1) if k == i else Q(0) for k in range(r))) for i in range(r)]
        self._sigma_mat = tuple(tuple(Q(cols[j][i]) for j in range(r)) for i in range(r))
        for i in range(r):
            e = tuple(Q(1) if k == i else Q(0) for k in range(r))
            if sigma(sigma(e)) != e:
                raise CatalogError(f"{self.name}: sigma_bar is not an involution")

        # white orbits, ordered by smallest node
        seen = set()
        orbits = []
        for i in range(r):
            if i in self.black or i in seen:
                continue
            orb = tuple(sorted({i, tau[i]}))
            seen.update(orb)
            orbits.append(orb)
        self._white_orbits = tuple(orbits)

        # restriction: project onto the sigma_bar-fixed part, in coordinates
        # dual to the restricted simple coroots
        def project(vec):
            s = sigma(vec)
            return tuple((Q(a) + Q(b)) / 2 for a, b in zip(vec, s))

        self.project = project
        abar = []
        for orb in orbits:
            root_f = rs.simple_root_fund(orb[0])
            abar.append(project(root_f))
        self._restricted_simple = tuple(abar)
        k = len(abar)
        norms = [rs.pair_weights(a, a) for a in abar]
        cbar = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                val = 2 * rs.pair_weights(abar[i], abar[j]) / norms[i]
                if val.denominator != 1:
                    raise CatalogError(f"{self.name}: restricted Cartan matrix is not integral")
                cbar[i][j] = int(val)
        self._restricted_cartan = tuple(tuple(row) for row in cbar)
        # rows of the restriction matrix: <proj(.), abar_i^vee>
        rows = []
        for i in range(k):
            row = []
            for b in range(r):
                e = tuple(Q(1) if kk == b else Q(0) for kk in range(r))
                row.append(2 * rs.pair_weights(project(e), abar[i]) / norms[i])
            rows.append(tuple(row))
        self._restriction_rows = tuple(rows)

    # ------------------------------------------------------------------
    def restrict_weight(self, lam) -> tuple:
        """Coordinates of the restriction of lam on the restricted coweight basis."""
        if len(lam) != self.rs.rank:
            raise ValueError("weight length mismatch")
        return tuple(sum(row[j] * Q(lam[j]) for j in range(self.rs.rank)) for row in self._restriction_rows)

    def restricted_reflect(self, i: int, v: tuple) -> tuple:
        c = v[i]
        if not c:
            return tuple(v)
        cb = self._restricted_cartan
        return tuple(v[k] - c * cb[k][i] for k in range(len(v)))

    def restricted_reflection_matrix(self, i: int) -> tuple:
        k = len(self._white_orbits)
        cols = [self.restricted_reflect(i, tuple(Q(1) if t == j else Q(0) for t in range(k))) for j in range(k)]
        return tuple(tuple(cols[j][a] for j in range(k)) for a in range(k))

    # ------------------------------------------------------------------
    def _validate(self):
        rs = self.rs
        name = self.name
        zero = tuple(Q(0) for _ in range(self.real_rank))
        n_zero = 0
        images = {}
        for n in rs.positive_roots:
            f = rs.root_to_fund(n)
            bar = self.restrict_weight(f)
            black_supported = all(n[j] == 0 or j in self.black for j in range(rs.rank))
            if (bar == zero) != black_supported:
                raise CatalogError(f"{name}: root {n} restricts to zero iff black-supported fails")
            if bar == zero:
                n_zero += 1
            else:
                if any(x < 0 for x in self._cone_coords(bar)):
                    raise CatalogError(f"{name}: positive root with negative restriction (ordering violated)")
                images[bar] = images.get(bar, 0) + 1
        black_count = len([n for n in rs.positive_roots if all(n[j] == 0 or j in self.black for j in range(rs.rank))])
        if n_zero != black_count:
            raise CatalogError(f"{name}: zero-restriction count mismatch")
        # closure of the restricted image under the restricted reflections
        allroots = set(images) | {tuple(-x for x in b) for b in images}
        for b in allroots:
            for i in range(self.real_rank):
                if tuple(self.restricted_reflect(i, b)) not in allroots:
                    raise CatalogError(f"{name}: restricted image not reflection-closed")
        self._restricted_positive = tuple(sorted(images.items()))
        # per-letter lifts and the full w0 lift are checked on construction
        for i in range(self.real_rank):
            self.lift_restricted_reflection(i)
        self.restricted_w0_lift()

    def _cone_coords(self, bar: tuple) -> tuple:
        """Coordinates of a restricted vector on the restricted simple roots."""
        k = self.real_rank
        # solve sum c_i abar_i = bar in restriction coordinates
        cb = self._restricted_cartan
        # abar_j has restricted coordinates <abar_j, abar_i^vee> = column j of cbar
        mat = [[Q(cb[a][j]) for j in range(k)] for a in range(k)]
        vec = list(bar)
        # dense solve (k <= 8)
        coeffs = [Q(0)] * k
        idx = list(range(k))
        for col in range(k):
            piv = next(rr for rr in range(col, k) if mat[rr][col])
            mat[col], mat[piv] = mat[piv], mat[col]
            vec[col], vec[piv] = vec[piv], vec[col]
            inv = Q(1) / mat[col][col]
            mat[col] = [x * inv for x in mat[col]]
            vec[col] *= inv
            for rr in range(k):
                if rr != col and mat[rr][col]:
                    f = mat[rr][col]
                    mat[rr] = [x - f * y for x, y in zip(mat[rr], mat[col])]
                    vec[rr] -= f * vec[col]
        coeffs = vec
        return tuple(coeffs)

    # ------------------------------------------------------------------
    def restricted_roots(self) -> RestrictedRootSystem:
        fam, rk = _classify_reduced(self._restricted_cartan)
        reduced = {b for b, _m in self._restricted_positive}
        non_reduced = any(tuple(2 * x for x in b) in reduced for b, _m in self._restricted_positive)
        return RestrictedRootSystem(
            rank=self.real_rank,
            simple=self._restricted_simple,
            cartan=self._restricted_cartan,
            positive=self._restricted_positive,
            reduced_family=fam,
            reduced_rank=rk,
            non_reduced=non_reduced,
        )

    @lru_cache(maxsize=None)
    def lift_restricted_reflection(self, i: int, rule: str = "lowest") -> tuple:
        """Word w0(black+orbit_i) . w0(black), inducing the i-th restricted reflection."""
        if not 0 <= i < self.real_rank:
            raise ValueError("restricted index out of range")
        orbit = self._white_orbits[i]
        sub = frozenset(self.black) | set(orbit)
        word = longest_word(self.rs, sub, rule) + longest_word(self.rs, self.black, rule)
        self._check_induced(word, self.restricted_reflection_matrix(i), f"lift of restricted reflection {i}")
        return word

    @lru_cache(maxsize=None)
    def restricted_w0_lift(self, rule: str = "lowest") -> RestrictedW0Lift:
        """Greedy word for the longest restricted element, and its full-word lift."""
        k = self.real_rank
        pick = min if rule == "lowest" else max
        v = tuple(Q(1) for _ in range(k))
        applied = []
        while True:
            descents = [i for i in range(k) if v[i] > 0]
            if not descents:
                break
            i = pick(descents)
            v = self.restricted_reflect(i, v)
            applied.append(i)
        restricted_word = tuple(reversed(applied))
        full_word = tuple()
        for i in restricted_word:
            full_word = full_word + self.lift_restricted_reflection(i, rule)
        mbar = _mat_mul_seq([self.restricted_reflection_matrix(i) for i in restricted_word], k)
        self._check_induced(full_word, mbar, "restricted longest element lift")
        # anti-dominance on the restrictions of all fundamental weights
        for j in range(self.rs.rank):
            e = tuple(1 if t == j else 0 for t in range(self.rs.rank))
            img = _mat_vec(mbar, self.restrict_weight(e))
            if any(x > 0 for x in img):
                raise CatalogError(f"{self.name}: lifted w0 fails anti-dominance on fundamental weight {j}")
        sq = _mat_mul(mbar, mbar)
        if sq != _identity(k):
            raise CatalogError(f"{self.name}: restricted longest element does not square to one")
        return RestrictedW0Lift(restricted_word, full_word)

    def _check_induced(self, word: tuple, mbar: tuple, what: str):
        """R . W = Mbar . R as exact matrices on fundamental coordinates."""
        r = self.rs.rank
        w = word_matrix(self.rs, word)
        for j in range(r):
            col = tuple(w[a][j] for a in range(r))
            lhs = self.restrict_weight(col)
            e = tuple(1 if t == j else 0 for t in range(r))
            rhs = _mat_vec(mbar, self.restrict_weight(e))
            if tuple(lhs) != tuple(rhs):
                raise CatalogError(f"{self.name}: {what} does not induce the expected restricted action")


def _identity(k):
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(k)) for i in range(k))


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * Q(v[j]) for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a, b):
    n, k, m2 = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m2)) for i in range(n))


def _mat_mul_seq(mats, k):
    acc = _identity(k)
    for m in mats:
        acc = _mat_mul(acc, m)
    return acc


def _classify_reduced(cartan: tuple):
    """Cartan type (family, rank) of the reduced restricted system."""
    k = len(cartan)
    if k == 1:
        return ("A", 1)
    bonds = {}
    adj = {i: [] for i in range(k)}
    for i in range(k):
        for j in range(i + 1, k):
            b = cartan[i][j] * cartan[j][i]
            if b:
                adj[i].append(j)
                adj[j].append(i)
                bonds[(i, j)] = b
    deg = {i: len(adj[i]) for i in range(k)}
    if any(d == 0 for d in deg.values()):
        raise CatalogError("restricted system is not irreducible")
    triples = [e for e, b in bonds.items() if b == 3]
    doubles = [e for e, b in bonds.items() if b == 2]
    if triples:
        if k == 2:
            return ("G", 2)
        raise CatalogError("triple bond in rank > 2")
    if len(doubles) > 1:
        raise CatalogError("too many double bonds")
    branch = [i for i, d in deg.items() if d == 3]
    if len(doubles) == 1:
        if branch:
            raise CatalogError("double bond with branch node")
        if k == 2:
            return ("B", 2)
        (i, j) = doubles[0]
        ends = [t for t in (i, j) if deg[t] == 1]
        if not ends:
            if k == 4:
                return ("F", 4)
            raise CatalogError("interior double bond in rank != 4")
        end = ends[0]
        # short end root (its row carries the -2) means type B
        other = j if end == i else i
        return ("B" if cartan[end][other] == -2 else "C", k)
    if not branch:
        return ("A", k)
    if len(branch) > 1:
        raise CatalogError("more than one branch node")
    b = branch[0]
    arms = []
    for start in adj[b]:
        ln = 1
        prev, cur = b, start
        while True:
            nxt = [t for t in adj[cur] if t != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            ln += 1
        arms.append(ln)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", k)
    if arms[:2] == [1, 2] and k in (6, 7, 8):
        return ("E", k)
    raise CatalogError(f"unrecognised diagram with arms {arms}")


# ----------------------------------------------------------------------
# catalog loading

_SO_RE = re.compile(r"^so\((\d+),(\d+)\)$")
_SOSTAR_RE = re.compile(r"^so\*\((\d+)\)$")


def canonical_form_name(name: str):
    """Normalise a user-facing form name; returns (canonical, kind, env)."""
    s = name.replace(" ", "")
    m = _SO_RE.match(s)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if p > q:
            raise CatalogError(f"so(p,q) requires p <= q, got {name!r}")
        if p < 1:
            raise CatalogError(f"so(p,q) requires p >= 1, got {name!r}")
        if (p + q) % 2 == 1:
            r = (p + q - 1) // 2
        else:
            if p + q < 6:
                raise CatalogError(f"so(p,q) with p+q even requires p+q >= 6, got {name!r}")
            r = (p + q) // 2
        return (f"so({p},{q})", "so(p,q)", {"p": p, "q": q, "r": r})
    m = _SOSTAR_RE.match(s)
    if m:
        n = int(m.group(1))
        if n % 2 or n < 6:
            raise CatalogError(f"so*(2r) requires even argument >= 6, got {name!r}")
        r = n // 2
        return (f"so*({n})", "so*(2r)", {"r": r})
    t = s.upper()
    if t in ("G", "G2"):
        return ("G", "G", {})
    named = {"FI", "FII", "EI", "EII", "EIII", "EIV", "EV", "EVI", "EVII", "EVIII", "EIX"}
    if t in named:
        return (t, t, {})
    raise CatalogError(f"unknown real form {name!r}")


def _load_records():
    text = resources.files("w0vl").joinpath("data/satake_catalog.txt").read_text()
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = dict(tok.split("=", 1) for tok in shlex.split(line))
        records.append(fields)
    return records


_RECORDS = None


def _records():
    global _RECORDS
    if _RECORDS is None:
        _RECORDS = _load_records()
    return _RECORDS


@lru_cache(maxsize=None)
def lookup_form(name: str) -> SatakeDiagram:
    """Catalog lookup; the returned diagram has passed load-time validation."""
    canonical, kind, env = canonical_form_name(name)
    for rec in _records():
        if rec["form"] != kind:
            continue
        fam, rank_expr = rec["type"].split(",", 1)
        env_full = dict(env)
        if "r" not in env_full:
            env_full["r"] = exprs.eval_int(rank_expr, env)
        if not exprs.eval_bool(rec.get("cond", "True"), env_full):
            continue
        rank = exprs.eval_int(rank_expr, env_full)
        ctype = CartanType(fam, rank)
        black = [b - 1 for b in exprs.parse_node_list(rec.get("black", ""), env_full)]
        arrows = {}
        arrtext = rec.get("arrows", "").strip()
        if arrtext:
            for pair in arrtext.split(","):
                a, b = pair.split(">")
                arrows[exprs.eval_int(a, env_full) - 1] = exprs.eval_int(b, env_full) - 1
        return SatakeDiagram(canonical, ctype, black, arrows)
    raise CatalogError(f"no catalog record matches {name!r}")


def split_diagram(t: CartanType) -> SatakeDiagram:
    """Split form of an arbitrary complex type (internal helper for tests)."""
    return SatakeDiagram(f"split-{t}", t, [], {})


def catalog_names(max_n: int = 12) -> list:
    """Deterministic listing: named exceptional forms plus small so / so* forms."""
    out = ["EI", "EII", "EIII", "EIV", "EV", "EVI", "EVII", "EVIII", "EIX", "FI", "FII", "G"]
    sos = []
    for n in range(3, max_n + 1):
        for p in range(1, n // 2 + 1):
            q = n - p
            if p > q:
                continue
            if n % 2 == 0 and n < 6:
                continue
            sos.append(f"so({p},{q})")
    sostars = [f"so*({n})" for n in range(6, max_n + 1, 2)]
    return out + sorted(sos) + sostars
