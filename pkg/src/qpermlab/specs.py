"""External group and state descriptions (JSON), presets, and the build cache.

All indices in these wire formats are 1-based (permutation images, symbol
pairs, measurement positions); group-element indices into an explicit
Cayley table are 0-based row numbers of that table.
"""

from __future__ import annotations

import hashlib
import json
import threading

import numpy as np

from .errors import InvalidSpec, QPermError
from .hopf import HopfData, build_hopf
from .magic import (
    GroupTable,
    MagicUnitary,
    direct_sum,
    dual_group,
    kac_paljutkin,
    perm_from_cycles,
    quaternion_table,
    repeat_embed,
    symmetric_group,
    symmetric_group_table,
)
from . import states as st

GROUP_PRESETS = {
    "kac_paljutkin": {"kind": "kac_paljutkin"},
    "s3": {"kind": "symmetric", "n": 3},
    "s4": {"kind": "symmetric", "n": 4},
    "dual-s3": {"kind": "dual", "group": "s3", "generators": [[[1, 2]], [[1, 3]]]},
    "dual-s4": {"kind": "dual", "group": "s4", "generators": [[[1, 2]], [[2, 3, 4]]]},
    "dual-q8": {"kind": "dual", "group": "q8"},
}


def resolve_group_spec(spec) -> dict:
    """Accept a dict, a JSON string, or a preset name."""
    if isinstance(spec, dict):
        return spec
    if isinstance(spec, str):
        name = spec.strip()
        if name in GROUP_PRESETS:
            return GROUP_PRESETS[name]
        try:
            parsed = json.loads(name)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"not a preset or JSON group spec: {spec!r}") from exc
        if not isinstance(parsed, dict):
            raise InvalidSpec("group spec must be a JSON object")
        return parsed
    raise InvalidSpec(f"unsupported group spec type {type(spec).__name__}")


def canonical_hash(spec: dict) -> str:
    text = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _dual_table(spec: dict) -> GroupTable:
    if "cayley" in spec:
        table = spec["cayley"]
        identity = int(spec.get("identity", 0))
        generators = [int(g) for g in spec.get("generators", [])]
        if not generators:
            raise InvalidSpec("dual spec with a cayley table needs generator indices")
        return GroupTable.from_table(table, identity, generators)
    base = spec.get("group")
    if base == "q8":
        return quaternion_table()
    if isinstance(base, str) and base.startswith("s") and base[1:].isdigit():
        n = int(base[1:])
        cycles = spec.get("generators")
        if cycles is None:
            return symmetric_group_table(n)
        gens = [perm_from_cycles(n, [tuple(c) for c in gen_cycles]) for gen_cycles in cycles]
        return symmetric_group_table(n, gens)
    raise InvalidSpec("dual spec needs either a cayley table or a named base group")


def build_magic(spec: dict) -> MagicUnitary:
    kind = spec.get("kind")
    try:
        if kind == "symmetric":
            return symmetric_group(int(spec["n"]))
        if kind == "kac_paljutkin":
            return kac_paljutkin()
        if kind == "dual":
            return dual_group(_dual_table(spec), label=spec.get("label", ""))
        if kind == "direct_sum":
            parts = [build_magic(resolve_group_spec(p)) for p in spec["parts"]]
            return direct_sum(parts)
        if kind == "repeat":
            part = build_magic(resolve_group_spec(spec["part"]))
            return repeat_embed(part, int(spec["times"]))
    except KeyError as exc:
        raise InvalidSpec(f"group spec missing field {exc}") from exc
    raise InvalidSpec(f"unknown group kind {kind!r}")


class HopfCache:
    """Hash-addressed cache of built HopfData; insertion is exclusive."""

    def __init__(self):
        self._lock = threading.Lock()
        self._cache: dict[str, HopfData] = {}

    def get(self, spec) -> HopfData:
        resolved = resolve_group_spec(spec)
        key = canonical_hash(resolved)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        try:
            built = build_hopf(build_magic(resolved))
        except KeyError as exc:
            raise InvalidSpec(f"group spec missing field {exc}") from exc
        with self._lock:
            return self._cache.setdefault(key, built)


DEFAULT_CACHE = HopfCache()


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _complex_of(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(re, im)


def build_state(group: HopfData, spec) -> st.QuantumPermutation:
    """Build a state from its wire description (1-based external indices)."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            spec = {"kind": spec.strip()}
    if not isinstance(spec, dict):
        raise InvalidSpec("state spec must be a JSON object")
    kind = spec.get("kind")
    try:
        if kind == "haar":
            return st.haar_state(group)
        if kind == "counit":
            return st.counit_state(group)
        if kind == "character":
            perm = tuple(int(x) - 1 for x in spec["perm"])
            return st.character_state(group, perm)
        if kind == "vector":
            xi = np.array([_complex_of(p) for p in spec["coords"]])
            return st.state_from_vector(group, xi)
        if kind == "density":
            rho = np.array([[_complex_of(p) for p in row] for row in spec["matrix"]])
            return st.state_from_density(group, rho)
        if kind == "pdf":
            values = {int(k): _complex_of(v) for k, v in spec["values"].items()}
            return st.state_from_function(group, values)
        if kind == "mix":
            terms = spec["terms"]
            parts = [build_state(group, t["state"]) for t in terms]
            weights = [float(t["w"]) for t in terms]
            return st.mix(parts, weights)
        if kind == "conditioned":
            base = build_state(group, spec["base"])
            for i, j in spec["events"]:
                base = st.condition(base, (int(i) - 1, int(j) - 1))
            return base
    except KeyError as exc:
        raise InvalidSpec(f"state spec missing field {exc}") from exc
    raise InvalidSpec(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def sig12(x: float) -> float:
    """Round to 12 significant digits, the external probability format."""
    return float(f"{float(x):.12g}")


def slice_payload(phi: st.QuantumPermutation) -> list[list[float]]:
    return [[sig12(v) for v in row] for row in st.birkhoff_slice(phi).matrix]


def render_slice(matrix) -> str:
    rows = []
    for row in np.asarray(matrix, dtype=float):
        rows.append("  ".join(f"{v:10.6f}" for v in row))
    return "\n".join(rows)
