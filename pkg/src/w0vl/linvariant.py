"""The subspace of vectors invariant under the centralizer of the split part.

A zero-weight vector killed by the raising operators of every black node
generates the trivial module of the anisotropic kernel, hence is invariant
under it; invariance under the split torus directions is automatic on
weight zero.  The subspace is therefore computed as the intersection of the
zero weight space with the kernels of the black raising operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactla import SparseMat, Subspace, kernel
from .hwmodule import HWModule, build_module
from .satake import SatakeDiagram, lookup_form

Q = Fraction


@dataclass(frozen=True)
class LInvariants:
    form: str
    lam: tuple
    space: Subspace          # subspace of the full module
    dim: int
    zero_block: Subspace     # same space in zero-weight-block coordinates


def l_invariants(m: HWModule, sd: SatakeDiagram) -> LInvariants:
    if m.rs.cartan_type != sd.cartan_type:
        raise ValueError("module type does not match the form")
    zero = tuple(0 for _ in m.lam)
    widx = m.weight_index(zero)
    if widx is None:
        return LInvariants(sd.name, m.lam, Subspace.zero(m.dim), 0, Subspace.zero(0))
    d0 = m.mults[widx]
    cur = Subspace.full(d0)
    for j in sorted(sd.black):
        blk = m.E.get((j, widx))
        if blk is None:
            continue  # e_j vanishes on the zero weight space
        mat = SparseMat.from_entries(
            len(blk.rows),
            d0,
            ((rr, cc, Q(x, blk.den)) for rr, row in enumerate(blk.rows) for cc, x in enumerate(row) if x),
        )
        cur = cur.intersect(kernel(mat))
        if cur.dim == 0:
            break
    off = m.offsets[widx]
    embedded = []
    for row in cur.basis:
        v = [Q(0)] * m.dim
        for t, x in enumerate(row):
            v[off + t] = x
        embedded.append(v)
    return LInvariants(sd.name, m.lam, Subspace.from_vectors(m.dim, embedded), cur.dim, cur)


def nonzero(form, lam, size_cap: int = 20000, cache_dir=None) -> bool:
    """Whether the invariant subspace is nonzero for the given form and weight."""
    sd = form if isinstance(form, SatakeDiagram) else lookup_form(form)
    m = build_module(sd.rs, tuple(lam), size_cap, cache_dir)
    return l_invariants(m, sd).dim > 0
