"""Complex simple root systems, weights and Weyl words, Bourbaki numbering.

Conventions used throughout the package:

* nodes are 0-based in code (1-based only in data files and the CLI);
* ``cartan[i][j]`` is the pairing of the j-th simple root against the i-th
  simple coroot, so column j holds the fundamental-weight coordinates of
  the simple root ``alpha_j``;
* weights are tuples of integers (or Fractions) in fundamental-weight
  coordinates; roots are tuples of integers in simple-root coordinates;
* a Weyl word is a tuple of simple-reflection indices, leftmost letter
  applied last.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Q = Fraction

FAMILIES = "ABCDEFG"

# closed-form number of positive roots per family
def _positive_count(family: str, rank: int) -> int:
    if family == "A":
        return rank * (rank + 1) // 2
    if family in ("B", "C"):
        return rank * rank
    if family == "D":
        return rank * (rank - 1)
    if family == "E":
        return {6: 36, 7: 63, 8: 120}[rank]
    if family == "F":
        return 24
    if family == "G":
        return 6
    raise ValueError(family)


_RANK_BOUNDS = {"A": (1, None), "B": (1, None), "C": (2, None), "D": (3, None), "E": (6, 8), "F": (4, 4), "G": (2, 2)}


@dataclass(frozen=True, order=True)
class CartanType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        lo, hi = _RANK_BOUNDS[self.family]
        if self.rank < lo or (hi is not None and self.rank > hi):
            raise ValueError(f"rank {self.rank} out of range for family {self.family}")

    def __str__(self):
        return f"{self.family}{self.rank}"


def cartan_matrix(t: CartanType) -> tuple:
    """Bourbaki Cartan matrix; entry [i][j] pairs alpha_j against coroot i."""
    n = t.rank
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2

    def edge(i, j):
        a[i][j] = -1
        a[j][i] = -1

    fam = t.family
    if fam in "ABCG":
        for i in range(n - 1):
            edge(i, i + 1)
    if fam == "B" and n >= 2:
        a[n - 1][n - 2] = -2          # alpha_{n} short
    if fam == "C":
        a[n - 2][n - 1] = -2          # alpha_{n} long
    if fam == "G":
        a[0][1] = -3                  # alpha_1 short, alpha_2 long
    if fam == "D":
        for i in range(n - 2):
            edge(i, i + 1)
        edge(n - 3, n - 1)
    if fam == "E":
        chain = [0, 2, 3, 4, 5, 6, 7][: n - 1]
        for x, y in zip(chain, chain[1:]):
            edge(x, y)
        edge(1, 3)
    if fam == "F":
        for i in range(3):
            edge(i, i + 1)
        a[2][1] = -2                  # alpha_3, alpha_4 short
    return tuple(tuple(row) for row in a)


def root_norms(t: CartanType) -> tuple:
    """Half squared lengths d_i of the simple roots, integer normalised."""
    n = t.rank
    if t.family in "ADE":
        return tuple([1] * n)
    if t.family == "B":
        return tuple([2] * (n - 1) + [1])
    if t.family == "C":
        return tuple([1] * (n - 1) + [2])
    if t.family == "F":
        return (2, 2, 1, 1)
    if t.family == "G":
        return (1, 3)
    raise ValueError(t.family)


def _invert_rational(mat: tuple) -> tuple:
    n = len(mat)
    aug = [[Q(mat[i][j]) for j in range(n)] + [Q(1) if j == i else Q(0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Q(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


@dataclass(frozen=True)
class RootSystem:
    cartan_type: CartanType
    cartan: tuple                 # cartan[i][j] = <alpha_j, alpha_i^vee>
    cartan_inv: tuple             # rational inverse
    norms: tuple                  # d_i
    positive_roots: tuple         # root coordinates; simple roots first

    @property
    def rank(self) -> int:
        return self.cartan_type.rank

    # --- coordinate conversions -------------------------------------------
    def root_to_fund(self, n: tuple) -> tuple:
        """Fundamental coordinates of sum n_j alpha_j."""
        a = self.cartan
        r = self.rank
        return tuple(sum(a[i][j] * n[j] for j in range(r)) for i in range(r))

    def fund_to_root(self, f: tuple) -> tuple:
        ai = self.cartan_inv
        r = self.rank
        return tuple(sum(ai[i][j] * Q(f[j]) for j in range(r)) for i in range(r))

    def simple_root_fund(self, i: int) -> tuple:
        return tuple(self.cartan[k][i] for k in range(self.rank))

    # --- invariant bilinear form ------------------------------------------
    def pair_weight_root(self, f: tuple, n: tuple) -> Fraction:
        """(mu, beta) for mu in fundamental coords, beta in root coords."""
        return sum(Q(n[j]) * self.norms[j] * Q(f[j]) for j in range(self.rank))

    def pair_weights(self, f1: tuple, f2: tuple) -> Fraction:
        return self.pair_weight_root(f1, self.fund_to_root(f2))

    def root_norm_sq(self, n: tuple) -> Fraction:
        return self.pair_weight_root(self.root_to_fund(n), n)

    # --- reflections and words --------------------------------------------
    def reflect_weight(self, i: int, f: tuple) -> tuple:
        c = f[i]
        if not c:
            return tuple(f)
        col = self.cartan
        return tuple(f[k] - c * col[k][i] for k in range(self.rank))

    def reflect_root(self, i: int, n: tuple) -> tuple:
        a = self.cartan
        c = sum(a[i][j] * n[j] for j in range(self.rank))
        out = list(n)
        out[i] -= c
        return tuple(out)

    def rho(self) -> tuple:
        return tuple([1] * self.rank)

    def is_dominant(self, f: tuple) -> bool:
        return all(x >= 0 for x in f)


@lru_cache(maxsize=None)
def build_root_system(t: CartanType) -> RootSystem:
    """Positive roots generated by reflection closure of the simple roots."""
    cartan = cartan_matrix(t)
    r = t.rank
    simple = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]

    def reflect(i, n):
        c = sum(cartan[i][j] * n[j] for j in range(r))
        out = list(n)
        out[i] -= c
        return tuple(out)

    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for n in frontier:
            for i in range(r):
                m = reflect(i, n)
                if all(x >= 0 for x in m) and m not in seen:
                    seen.add(m)
                    nxt.append(m)
        frontier = nxt
    expected = _positive_count(t.family, r)
    if len(seen) != expected:
        raise RuntimeError(f"positive root closure gave {len(seen)} roots, expected {expected} for {t}")
    rest = sorted(n for n in seen if n not in set(simple))
    rest.sort(key=lambda n: (sum(n), n))
    positive = tuple(simple) + tuple(rest)
    return RootSystem(t, cartan, _invert_rational(cartan), root_norms(t), positive)


def apply_word(rs: RootSystem, word: tuple, f: tuple) -> tuple:
    """Apply a Weyl word to a weight; leftmost letter acts last."""
    for i in reversed(word):
        f = rs.reflect_weight(i, f)
    return f


def apply_word_root(rs: RootSystem, word: tuple, n: tuple) -> tuple:
    for i in reversed(word):
        n = rs.reflect_root(i, n)
    return n


def word_matrix(rs: RootSystem, word: tuple) -> tuple:
    """Matrix of the word action on fundamental coordinates (columns = images)."""
    r = rs.rank
    cols = [apply_word(rs, word, tuple(1 if k == i else 0 for k in range(r))) for i in range(r)]
    return tuple(tuple(Q(cols[j][i]) for j in range(r)) for i in range(r))


def positive_roots_supported_on(rs: RootSystem, subset: frozenset) -> list:
    return [n for n in rs.positive_roots if all(n[j] == 0 or j in subset for j in range(rs.rank))]


def longest_word(rs: RootSystem, subset, rule: str = "lowest") -> tuple:
    """Reduced word for the longest element of the parabolic subgroup on subset.

    Greedy descent on a strictly dominant vector supported on the subset;
    ``rule`` picks the lowest or highest available descent, giving two
    deterministic reduced words for the same element.
    """
    subset = frozenset(subset)
    if not subset <= set(range(rs.rank)):
        raise ValueError("subset out of range")
    pick = min if rule == "lowest" else max
    if rule not in ("lowest", "highest"):
        raise ValueError(f"unknown descent rule {rule!r}")
    v = tuple(1 if i in subset else 0 for i in range(rs.rank))
    applied = []
    while True:
        descents = [i for i in subset if v[i] > 0]
        if not descents:
            break
        i = pick(descents)
        v = rs.reflect_weight(i, v)
        applied.append(i)
    expected = len(positive_roots_supported_on(rs, subset))
    if len(applied) != expected:
        raise RuntimeError("greedy descent produced a non-reduced word")
    return tuple(reversed(applied))


def weyl_dim(rs: RootSystem, lam: tuple) -> int:
    """Weyl dimension formula, exact."""
    if len(lam) != rs.rank:
        raise ValueError("weight length mismatch")
    if not rs.is_dominant(lam):
        raise ValueError(f"weight {lam} is not dominant")
    rho = rs.rho()
    lam_rho = tuple(x + 1 for x in lam)
    num = Q(1)
    for n in rs.positive_roots:
        num *= rs.pair_weight_root(lam_rho, n) / rs.pair_weight_root(rho, n)
    if num.denominator != 1:
        raise RuntimeError("Weyl dimension came out non-integral")
    return int(num)
