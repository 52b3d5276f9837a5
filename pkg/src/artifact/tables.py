"""Published constant tables, loaded once from the shipped data file."""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

from .errors import StructuralError, TableLookupError


class Entry(NamedTuple):
    table: str
    delta: str
    s: float | None
    regime: str
    kind: str
    value: float
    provenance: str
    note: str | None


def delta_key(delta) -> str:
    """Canonical string key for a numeric delta ('1minus' and '0+' pass through)."""
    if isinstance(delta, str):
        return delta
    d = round(float(delta), 6)
    if d == int(d):
        return str(int(d))
    return repr(d)


@lru_cache(maxsize=1)
def load() -> tuple:
    pkg = resources.files("artifact") / "data"
    raw = (pkg / "constants.json").read_bytes()
    expected = (pkg / "constants.json.sha256").read_text().strip()
    if hashlib.sha256(raw).hexdigest() != expected:
        raise StructuralError("constant table checksum mismatch")
    doc = json.loads(raw)
    return tuple(Entry(e["table"], e["delta"], e["s"], e["regime"], e["kind"], float(e["value"]),
                       e["provenance"], e.get("note")) for e in doc["entries"])


def select(table: str, delta=None, regime=None, kind=None) -> list:
    key = None if delta is None else delta_key(delta)
    return [e for e in load() if e.table == table
            and (key is None or e.delta == key)
            and (regime is None or e.regime == regime)
            and (kind is None or e.kind == kind)]


def lookup(table: str, delta, regime: str, kind: str = "constant") -> Entry:
    found = select(table, delta, regime, kind)
    if not found:
        raise TableLookupError(f"no {table} entry for delta={delta_key(delta)}, "
                               f"regime={regime}, kind={kind}")
    return found[0]


def structured_constants(delta, regime: str) -> list:
    """(s, C_s(delta)) pairs published for the structured uniform bound."""
    key = delta_key(delta)
    if key == "1":
        pairs = [(e.s, e.value) for e in select("t2_2", key, regime, "structured_delta1")]
    else:
        pairs = [(0.0, lookup("t2_1", key, regime).value)]
        for kind in ("s0", "s1"):
            e = lookup("t2_2", key, regime, kind)
            if all(abs(e.s - s) > 1e-12 for s, _ in pairs):
                pairs.append((e.s, e.value))
    if not pairs:
        raise TableLookupError(f"no structured constants at delta={key}")
    return sorted(pairs)


def classical_constant(delta, regime: str) -> float:
    return lookup("t2_1", delta, regime).value


def M(delta) -> float:
    """min over 0 <= s <= 1 of the iid structured constants."""
    return min(c for s, c in structured_constants(delta, "iid") if 0.0 <= s <= 1.0)


def nonuniform_constants(delta, regime: str) -> list:
    key = delta_key(delta)
    rows = select("t2_3", key, regime)
    if not rows:
        raise TableLookupError(f"no nonuniform constants at delta={key}")
    return sorted((e.s, e.value) for e in rows)


def bikelis_A(regime: str, abs_x: float = 0.0) -> float:
    kind = "A_abs_x_ge_10" if abs_x >= 10 else "A"
    return lookup("bikelis", "any", regime, kind).value
