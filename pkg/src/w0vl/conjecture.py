"""Machine-readable scalar-action tables and the verification driver.

The tables live in ``data/scalar_tables.txt``, one line per printed table
line, so the transcription is diff-auditable.  Membership is a union over
rows; overlapping rows are deliberate.  The driver sweeps dominant weights
in lexicographic order, classifies each one, and reports whether the
computed verdict is consistent with table membership: members must be
scalar or vacuous, nonvacuous non-members must be non-scalar.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing
import re
import shlex
from dataclasses import dataclass
from importlib import resources

from . import exprs
from .rootsystem import weyl_dim
from .satake import CatalogError, canonical_form_name, lookup_form
from .w0action import MINUS_ID, NON_SCALAR, PLUS_ID, VACUOUS_ZERO, classify_w0

SCHEMA_VERSION = 1

_EXCEPTIONAL_RANK = {
    "EI": 6, "EII": 6, "EIII": 6, "EIV": 6,
    "EV": 7, "EVI": 7, "EVII": 7,
    "EVIII": 8, "EIX": 8,
    "FI": 4, "FII": 4, "G": 2,
}


@dataclass(frozen=True)
class TableTerm:
    coeff: str
    nodes: tuple           # node index expressions (1-based)


@dataclass(frozen=True)
class TableRow:
    idx: str               # condition on the free index i
    terms: tuple           # TableTerm sequence
    caps: dict             # coeff name -> None (any) or int


@dataclass(frozen=True)
class TableAlias:
    target: str
    relabel: dict          # 1-based node -> node


@dataclass(frozen=True)
class TableBlock:
    table: str
    cond: str | None       # parameter condition, None for form-keyed blocks
    forms: tuple           # form names, for the exceptional table
    rows: tuple            # TableRow entries
    alias: TableAlias | None = None


_W_RE = re.compile(r"w\(([^)]*)\)")


def _parse_terms(spec: str) -> tuple:
    terms = []
    spec = spec.strip()
    if not spec:
        return ()
    for part in spec.split(";"):
        name, expr = part.split(":", 1)
        nodes = tuple(s.strip() for s in _W_RE.findall(expr))
        if not nodes:
            raise ValueError(f"term without nodes: {part!r}")
        terms.append(TableTerm(name.strip(), nodes))
    return tuple(terms)


def _load_tables() -> dict:
    text = resources.files("w0vl").joinpath("data/scalar_tables.txt").read_text()
    tables: dict = {}
    cur_table = None
    cur_block = None
    cur_terms: tuple = ()

    def close_block():
        nonlocal cur_block
        if cur_block is not None:
            tables[cur_table].append(
                TableBlock(cur_table, cur_block["cond"], cur_block["forms"], tuple(cur_block["rows"]), cur_block["alias"])
            )
            cur_block = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = shlex.split(line)
        head = toks[0]
        fields = dict(t.split("=", 1) for t in toks[1:] if "=" in t)
        if head == "table":
            close_block()
            cur_table = toks[1]
            tables[cur_table] = []
        elif head == "block":
            close_block()
            forms = tuple(fields.get("forms", "").split(",")) if "forms" in fields else ()
            cur_block = {"cond": fields.get("cond"), "forms": forms, "rows": [], "alias": None}
            cur_terms = ()
        elif head == "shape":
            cur_terms = _parse_terms(fields.get("terms", ""))
        elif head == "row":
            caps = {}
            for name, val in fields.items():
                if name == "idx":
                    continue
                caps[name] = None if val == "any" else int(val)
            cur_block["rows"].append(TableRow(fields["idx"], cur_terms, caps))
        elif head == "use":
            ref = toks[1]
            subst = fields.get("subst")
            cur_block["rows"].append(("use", ref, subst))
        elif head == "alias":
            relabel = {}
            for pair in fields.get("relabel", "").split(","):
                if pair:
                    a, b = pair.split(">")
                    relabel[int(a)] = int(b)
            cur_block["alias"] = TableAlias(fields["form"], relabel)
        else:
            raise ValueError(f"bad table line: {raw!r}")
    close_block()
    return tables


_TABLES = None


def tables() -> dict:
    global _TABLES
    if _TABLES is None:
        _TABLES = _load_tables()
    return _TABLES


def _expand_use(row, tablemap) -> list:
    _tag, ref, subst = row
    tname, bnum = ref.split(":")
    block = tablemap[tname][int(bnum) - 1]
    rows = []
    for r in block.rows:
        if isinstance(r, tuple):
            raise ValueError("nested use is not supported")
        terms = r.terms
        if subst:
            new_terms = []
            sub = _parse_terms(subst)[0]
            for t in terms:
                new_terms.append(sub if t.coeff == sub.coeff else t)
            terms = tuple(new_terms)
        rows.append(TableRow(r.idx, terms, r.caps))
    return rows


def _blocks_for_form(form_name: str):
    """Applicable blocks, the 1-based weight env, and the rank."""
    canonical, kind, env = canonical_form_name(form_name)
    tmap = tables()
    if kind == "so(p,q)":
        tname = "so_odd" if (env["p"] + env["q"]) % 2 else "so_even"
        blocks = [b for b in tmap[tname] if exprs.eval_bool(b.cond, env)]
    elif kind == "so*(2r)":
        blocks = [b for b in tmap["so_star"] if exprs.eval_bool(b.cond, env)]
    else:
        env = dict(env)
        env["r"] = _EXCEPTIONAL_RANK[kind]
        blocks = [b for b in tmap["exceptional"] if kind in b.forms]
    if not blocks:
        raise CatalogError(f"form {form_name!r} matches no table block")
    return canonical, blocks, env


def _cap_ok(cap, value) -> bool:
    return value >= 0 and (cap is None or value <= cap)


def _solve_row(row: TableRow, nodes_per_term: list, lam: tuple) -> bool:
    """Is there a nonnegative capped assignment of coefficients matching lam?"""
    rank = len(lam)
    covered: dict = {}
    for t, nodes in enumerate(nodes_per_term):
        for n in nodes:
            covered.setdefault(n, []).append(t)
    for n in range(1, rank + 1):
        if n not in covered and lam[n - 1] != 0:
            return False
    values: dict = {}
    changed = True
    while changed:
        changed = False
        for n, ts in covered.items():
            unknown = [t for t in ts if t not in values]
            s = lam[n - 1] - sum(values[t] for t in ts if t in values)
            if s < 0:
                return False
            if not unknown:
                if s != 0:
                    return False
            elif len(unknown) == 1:
                t = unknown[0]
                cap = row.caps.get(row.terms[t].coeff)
                if not _cap_ok(cap, s):
                    return False
                values[t] = s
                changed = True
    unknown_terms = [t for t in range(len(nodes_per_term)) if t not in values]
    if not unknown_terms:
        # re-check all equations
        for n, ts in covered.items():
            if sum(values[t] for t in ts) != lam[n - 1]:
                return False
        return True
    if len(unknown_terms) == 2:
        t1, t2 = unknown_terms
        n1 = set(nodes_per_term[t1])
        n2 = set(nodes_per_term[t2])
        if n1 == n2 and len(n1) == 1:
            n = next(iter(n1))
            total = lam[n - 1]
            cap1 = row.caps.get(row.terms[t1].coeff)
            cap2 = row.caps.get(row.terms[t2].coeff)
            lo = 0 if cap2 is None else max(0, total - cap2)
            hi = total if cap1 is None else min(total, cap1)
            return lo <= hi
    raise NotImplementedError(f"unsupported coefficient pattern in row {row!r}")


def _row_matches(row: TableRow, lam: tuple, env: dict) -> bool:
    rank = len(lam)
    if not row.terms:
        return all(x == 0 for x in lam)
    for i in range(1, rank + 1):
        e = dict(env)
        e["i"] = i
        if not exprs.eval_bool(row.idx, e):
            continue
        nodes_per_term = []
        ok = True
        for term in row.terms:
            nodes = [exprs.eval_int(x, e) for x in term.nodes]
            if any(not 1 <= n <= rank for n in nodes) or len(set(nodes)) != len(nodes):
                ok = False
                break
            nodes_per_term.append(nodes)
        if not ok:
            continue
        if _solve_row(row, nodes_per_term, lam):
            return True
    return False


def table_predicate(form, lam) -> bool:
    """Whether the weight belongs to at least one table row for the form."""
    canonical, blocks, env = _blocks_for_form(form if isinstance(form, str) else form.name)
    lam = tuple(int(x) for x in lam)
    if any(x < 0 for x in lam):
        raise ValueError("weight must be dominant")
    tmap = tables()
    for block in blocks:
        if block.alias is not None:
            relabeled = list(lam)
            for a, b in block.alias.relabel.items():
                relabeled[b - 1] = lam[a - 1]
            if table_predicate(block.alias.target, tuple(relabeled)):
                return True
            continue
        for row in block.rows:
            rows = _expand_use(row, tmap) if isinstance(row, tuple) else [row]
            for r in rows:
                if _row_matches(r, lam, env):
                    return True
    return False


def alias_relabeling(form: str):
    """The documented relabeling (target form, 1-based node map) if aliased."""
    _canonical, blocks, _env = _blocks_for_form(form)
    for block in blocks:
        if block.alias is not None:
            return block.alias.target, dict(block.alias.relabel)
    return None


# ----------------------------------------------------------------------
# verification driver


@dataclass(frozen=True)
class VerificationReport:
    form: str
    max_coeff: tuple
    dim_cap: int
    records: tuple         # dicts, one per enumerated weight, lexicographic
    summary: dict

    @property
    def all_consistent(self) -> bool:
        return not self.summary["failures"]

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "form": self.form,
            "max_coeff": list(self.max_coeff),
            "dim_cap": self.dim_cap,
            "records": list(self.records),
            "summary": self.summary,
        }
        return json.dumps(payload, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            ["schema_version", "form", "lambda", "dim_V", "dim_VL", "verdict", "sign", "table_member", "consistent", "skipped"]
        )
        for rec in self.records:
            writer.writerow(
                [
                    SCHEMA_VERSION,
                    self.form,
                    " ".join(str(x) for x in rec["lambda"]),
                    rec["dim_V"],
                    rec["dim_VL"] if rec["dim_VL"] is not None else "",
                    rec["verdict"] or "",
                    rec["sign"] if rec["sign"] is not None else "",
                    int(rec["table_member"]),
                    "" if rec["consistent"] is None else int(rec["consistent"]),
                    rec["skipped"] or "",
                ]
            )
        return buf.getvalue()


def _record_for(form_name: str, lam: tuple, dim_cap: int, cache_dir, rule: str) -> dict:
    sd = lookup_form(form_name)
    dim = weyl_dim(sd.rs, lam)
    member = table_predicate(form_name, lam)
    rec = {
        "lambda": list(lam),
        "dim_V": dim,
        "dim_VL": None,
        "verdict": None,
        "sign": None,
        "table_member": member,
        "consistent": None,
        "skipped": None,
        "certificate": None,
    }
    if dim > dim_cap:
        rec["skipped"] = "size"
        return rec
    cls = classify_w0(sd, lam, size_cap=dim_cap, cache_dir=cache_dir, rule=rule)
    rec["dim_VL"] = cls.dim_VL
    rec["verdict"] = cls.verdict
    rec["sign"] = cls.sign
    rec["certificate"] = cls.certificate
    if member:
        rec["consistent"] = cls.verdict in (VACUOUS_ZERO, PLUS_ID, MINUS_ID)
    else:
        rec["consistent"] = cls.dim_VL == 0 or cls.verdict == NON_SCALAR
    return rec


def _worker(args):
    form_name, lam, dim_cap, cache_dir, rule = args
    return _record_for(form_name, tuple(lam), dim_cap, cache_dir, rule)


def enumerate_box(max_coeff: tuple) -> list:
    """Dominant weights within per-coordinate caps, lexicographic order."""
    out = [()]
    for cap in max_coeff:
        out = [t + (c,) for t in out for c in range(cap + 1)]
    return sorted(out)


def verify_range(form, max_coeff, dim_cap: int = 20000, jobs: int = 1, cache_dir=None, rule: str = "lowest") -> VerificationReport:
    sd = lookup_form(form if isinstance(form, str) else form.name)
    rank = sd.rs.rank
    if isinstance(max_coeff, int):
        max_coeff = tuple([max_coeff] * rank)
    max_coeff = tuple(int(x) for x in max_coeff)
    if len(max_coeff) != rank:
        raise ValueError(f"expected {rank} coefficient caps")
    lams = enumerate_box(max_coeff)
    tasks = [(sd.name, lam, dim_cap, cache_dir, rule) for lam in lams]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            records = pool.map(_worker, tasks, chunksize=1)
    else:
        records = [_worker(t) for t in tasks]
    failures = [rec["lambda"] for rec in records if rec["consistent"] is False]
    summary = {
        "total": len(records),
        "checked": sum(1 for rec in records if rec["skipped"] is None),
        "skipped": [rec["lambda"] for rec in records if rec["skipped"] is not None],
        "consistent": sum(1 for rec in records if rec["consistent"] is True),
        "failures": failures,
    }
    return VerificationReport(sd.name, max_coeff, dim_cap, tuple(records), summary)


# ----------------------------------------------------------------------
# least positive multiple of a fundamental weight with invariants


@dataclass(frozen=True)
class MinimalP:
    form: str
    node: int              # 1-based
    value: int | None      # None when the search hit the dimension cap
    lower_bound: int       # established lower bound (value itself when found)
    by_convention: bool = False


def minimal_p_i(form, i: int, dim_cap: int = 20000, max_p: int = 12, cache_dir=None) -> MinimalP:
    """Least p >= 1 with a nonzero invariant subspace in the p-th multiple."""
    from .linvariant import nonzero

    sd = lookup_form(form if isinstance(form, str) else form.name)
    rank = sd.rs.rank
    if not 1 <= i <= rank:
        raise ValueError(f"node {i} out of range")
    m = re.match(r"^so\((\d+),(\d+)\)$", sd.name)
    if m:
        p, q = int(m.group(1)), int(m.group(2))
        if (p + q) % 2 == 0 and 4 * p == p + q - 2 and i in (2 * p, 2 * p + 1):
            return MinimalP(sd.name, i, 1, 1, by_convention=True)
    for val in range(1, max_p + 1):
        lam = tuple(val if t == i - 1 else 0 for t in range(rank))
        if weyl_dim(sd.rs, lam) > dim_cap:
            return MinimalP(sd.name, i, None, val)
        if nonzero(sd, lam, size_cap=dim_cap, cache_dir=cache_dir):
            return MinimalP(sd.name, i, val, val)
    return MinimalP(sd.name, i, None, max_p + 1)
