"""Assemble the representative of the longest restricted Weyl element on a
module, restrict it to the invariant subspace, and classify the action.

The representative is the Tits lift of a full-Weyl-group word inducing the
longest restricted element.  Its restriction to the zero weight space is
canonical: two lifts differ by torus two-torsion and by lifts of words of
the anisotropic-kernel Weyl group, both of which act trivially there
(checked empirically by the word-independence tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exactla import NotInvariantError, SparseMat, restrict_operator
from .hwmodule import DMat, HWModule, PipelineError, SizeCapError, build_module
from .linvariant import l_invariants
from .rootsystem import weyl_dim
from .satake import SatakeDiagram, lookup_form

Q = Fraction

VACUOUS_ZERO = "VacuousZero"
PLUS_ID = "PlusId"
MINUS_ID = "MinusId"
NON_SCALAR = "NonScalar"


@dataclass(frozen=True)
class Classification:
    form: str
    lam: tuple
    dim_V: int
    dim_VL: int
    verdict: str
    sign: int | None = None
    certificate: dict | None = None


def _fractions_to_dmat(rows: list) -> DMat:
    den = 1
    for row in rows:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    return DMat([[int(x * den) for x in row] for row in rows], den)


def w0_matrix_on_zero_space(m: HWModule, sd: SatakeDiagram, rule: str = "lowest") -> SparseMat:
    """Matrix of the lifted longest restricted element on the zero weight space."""
    if m.rs.cartan_type != sd.cartan_type:
        raise ValueError("module type does not match the form")
    zero = tuple(0 for _ in m.lam)
    widx = m.weight_index(zero)
    if widx is None:
        return SparseMat.zero(0, 0)
    d0 = m.mults[widx]
    lift = sd.restricted_w0_lift(rule)
    acc = DMat([[1 if a == b else 0 for b in range(d0)] for a in range(d0)], 1)
    for i in lift.full_word:
        acc = acc.mul(_fractions_to_dmat(m.n_zero_block(i)))
    return SparseMat.from_entries(
        d0, d0, ((r, c, acc.q(r, c)) for r in range(d0) for c in range(d0))
    )


def involution_check(m: HWModule, sd: SatakeDiagram, rule: str = "lowest") -> bool:
    w0 = w0_matrix_on_zero_space(m, sd, rule)
    return w0.mul(w0) == SparseMat.identity(w0.nrows)


def _scalar_of(mat: SparseMat):
    """The scalar c with mat = c Id, or None."""
    n = mat.nrows
    diag = mat.get(0, 0) if n else Q(1)
    for (r, c), v in mat.entries.items():
        if r != c and v:
            return None
    for t in range(n):
        if mat.get(t, t) != diag:
            return None
    return diag


def _nonscalar_certificate(mat: SparseMat) -> dict:
    n = mat.nrows
    off = sorted((r, c) for (r, c), v in mat.entries.items() if r != c and v)
    if off:
        r, c = off[0]
    else:
        diags = [mat.get(t, t) for t in range(n)]
        first = diags[0]
        c = next(t for t, v in enumerate(diags) if v != first)
        r = 0
    sub = [[str(mat.get(a, b)) for b in (r, c)] for a in (r, c)]
    return {"kind": "submatrix", "basis_indices": [r, c], "entries": sub}


def classify_w0(form, lam, size_cap: int = 20000, cache_dir=None, rule: str = "lowest") -> Classification:
    """Full classification of the longest-restricted-element action for one weight."""
    sd = form if isinstance(form, SatakeDiagram) else lookup_form(form)
    lam = tuple(int(x) for x in lam)
    if len(lam) != sd.rs.rank:
        raise ValueError(f"weight length {len(lam)} does not match rank {sd.rs.rank}")
    if any(x < 0 for x in lam):
        raise ValueError(f"weight {lam} is not dominant")
    dim = weyl_dim(sd.rs, lam)
    if dim > size_cap:
        raise SizeCapError(dim, size_cap)
    m = build_module(sd.rs, lam, size_cap, cache_dir)
    linv = l_invariants(m, sd)
    if linv.dim == 0:
        return Classification(sd.name, lam, dim, 0, VACUOUS_ZERO)
    w0 = w0_matrix_on_zero_space(m, sd, rule)
    try:
        restricted = restrict_operator(w0, linv.zero_block)
    except NotInvariantError as e:
        raise PipelineError(
            f"{sd.name} {lam}: representative does not preserve the invariant subspace "
            f"(basis vector {e.index})"
        ) from e
    scalar = _scalar_of(restricted)
    if scalar is not None:
        if scalar == 1:
            return Classification(sd.name, lam, dim, linv.dim, PLUS_ID, sign=1)
        if scalar == -1:
            return Classification(sd.name, lam, dim, linv.dim, MINUS_ID, sign=-1)
        raise PipelineError(f"{sd.name} {lam}: scalar action {scalar} violates the involution property")
    return Classification(
        sd.name, lam, dim, linv.dim, NON_SCALAR, certificate=_nonscalar_certificate(restricted)
    )
