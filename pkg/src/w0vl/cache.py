"""On-disk cache of built modules: a pure memoization layer.

Serialization is exact (integer matrices plus denominators), so a cached
module is bit-identical to a freshly built one.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import OrderedDict

from .hwmodule import DMat, HWModule
from .rootsystem import RootSystem

CACHE_VERSION = "w0vl-module-v1"

_MEMO: OrderedDict = OrderedDict()
_MEMO_CAP = 8


def _memo_key(rs: RootSystem, lam: tuple):
    return (rs.cartan_type.family, rs.cartan_type.rank, tuple(lam))


def memo_get(rs: RootSystem, lam: tuple):
    key = _memo_key(rs, lam)
    m = _MEMO.get(key)
    if m is not None:
        _MEMO.move_to_end(key)
    return m


def memo_put(m: HWModule):
    key = _memo_key(m.rs, m.lam)
    _MEMO[key] = m
    _MEMO.move_to_end(key)
    while len(_MEMO) > _MEMO_CAP:
        _MEMO.popitem(last=False)


def cache_path(cache_dir: str, rs: RootSystem, lam: tuple) -> str:
    name = f"{rs.cartan_type.family}{rs.cartan_type.rank}_" + "_".join(str(x) for x in lam) + ".json"
    return os.path.join(cache_dir, name)


def _blocks_to_json(blocks: dict) -> dict:
    return {f"{i}:{w}": {"d": b.den, "m": b.rows} for (i, w), b in sorted(blocks.items())}


def _blocks_from_json(data: dict) -> dict:
    out = {}
    for key, val in data.items():
        i, w = key.split(":")
        out[(int(i), int(w))] = DMat([list(map(int, row)) for row in val["m"]], int(val["d"]))
    return out


def save_module(cache_dir: str, m: HWModule) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    payload = {
        "version": CACHE_VERSION,
        "family": m.rs.cartan_type.family,
        "rank": m.rs.cartan_type.rank,
        "lam": list(m.lam),
        "weights": [list(w) for w in m.weights],
        "mults": list(m.mults),
        "F": _blocks_to_json(m.F),
        "E": _blocks_to_json(m.E),
        "lead": m.lead,
        "run": m.run,
    }
    path = cache_path(cache_dir, m.rs, m.lam)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_module(cache_dir: str, rs: RootSystem, lam: tuple):
    path = cache_path(cache_dir, rs, lam)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("version") != CACHE_VERSION:
        return None
    if payload["family"] != rs.cartan_type.family or payload["rank"] != rs.cartan_type.rank:
        return None
    if tuple(payload["lam"]) != tuple(lam):
        return None
    weights = [tuple(w) for w in payload["weights"]]
    return HWModule(
        rs,
        tuple(lam),
        weights,
        payload["mults"],
        _blocks_from_json(payload["F"]),
        _blocks_from_json(payload["E"]),
        payload["lead"],
        payload["run"],
    )
