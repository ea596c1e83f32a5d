"""Seeded interactive measurement sessions.

A session holds a quantum permutation, measures card positions one at a
time with the Born rule, collapses the state after each outcome, and keeps
a replayable history.  Randomness comes from a splitmix-style 64-bit
generator so that a (state, seed, position sequence) triple reproduces its
outcomes bit-exactly on any platform.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAState, NullEvent
from .hopf import HopfData
from .states import QuantumPermutation, state

MASK64 = (1 << 64) - 1
PROB_TOL = 1e-9

_session_counter = itertools.count(1)


class SplitMix64:
    """splitmix64: state += golden gamma; output = xor-shift-multiply mix.

    update:  s = (s + 0x9E3779B97F4A7C15) mod 2^64
    output:  z = s; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
             z = (z ^ z>>27) * 0x94D049BB133111EB; z = z ^ z>>31
    floats:  top 53 bits of z scaled by 2^-53, uniform on [0, 1).
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_raw(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def next_float(self) -> float:
        return (self.next_raw() >> 11) * (2.0 ** -53)


class ConditionMaps:
    """Per-group cache of the linear collapse maps phi -> phi(u_ij . u_ij)."""

    def __init__(self, group: HopfData):
        self.group = group
        self._maps: dict[tuple[int, int], np.ndarray] = {}

    def get(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        if key not in self._maps:
            p = self.group.gen_coords[i, j]
            left = np.einsum("a,ars->rs", p, self.group.mult)
            right = np.einsum("sbt,b->st", self.group.mult, p)
            self._maps[key] = left @ right
        return self._maps[key]


_condition_cache: dict[int, ConditionMaps] = {}


def condition_maps(group: HopfData) -> ConditionMaps:
    maps = _condition_cache.get(id(group))
    if maps is None or maps.group is not group:
        maps = ConditionMaps(group)
        _condition_cache[id(group)] = maps
    return maps


@dataclass
class MeasurementSession:
    """Mutable single-writer record of one measurement run."""

    group: HopfData
    initial: QuantumPermutation
    seed: int
    id: str = ""
    current: QuantumPermutation = None
    history: list[tuple[int, int, float]] = field(default_factory=list)  # (j, i, prob), 0-based
    rng: SplitMix64 = None

    def __post_init__(self):
        if self.current is None:
            self.current = self.initial
        if self.rng is None:
            self.rng = SplitMix64(self.seed)
        if not self.id:
            self.id = f"session-{next(_session_counter)}"

    def reset(self) -> None:
        self.current = self.initial
        self.history.clear()
        self.rng = SplitMix64(self.seed)


def new_session(group: HopfData, phi: QuantumPermutation, seed: int,
                session_id: str = "") -> MeasurementSession:
    return MeasurementSession(group=group, initial=phi, seed=seed, id=session_id)


def outcome_probabilities(session: MeasurementSession, position: int) -> np.ndarray:
    """Born-rule distribution over outcomes i for measuring column j."""
    group = session.group
    probs = np.array([np.real(session.current(group.gen_coords[i, position]))
                      for i in range(group.n)])
    if probs.min() < -PROB_TOL:
        raise NotAState(f"negative outcome probability {probs.min():.3e}")
    total = probs.sum()
    if abs(total - 1.0) > PROB_TOL * group.n:
        raise NotAState(f"outcome probabilities sum to {total:.12g}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_measurement(session: MeasurementSession, position: int,
                       validate: bool = False) -> tuple[int, float]:
    """Measure one position: draw an outcome, collapse, append to history.

    Returns ``(outcome, probability)`` with 0-based outcome index.  Raises
    :class:`NullEvent` when no outcome carries probability above tolerance.
    """
    group = session.group
    probs = outcome_probabilities(session, position)
    if probs.max() <= PROB_TOL:
        raise NullEvent("all outcomes are null events")
    draw = session.rng.next_float()
    cumulative = 0.0
    outcome = group.n - 1
    for i in range(group.n):
        if probs[i] <= PROB_TOL:
            continue
        cumulative += probs[i]
        if draw < cumulative:
            outcome = i
            break
    prob = float(probs[outcome])
    kmap = condition_maps(group).get(outcome, position)
    new_coords = (kmap @ session.current.coords) / prob
    if validate:
        new_state = state(group, new_coords, label="measured")
    else:
        new_state = QuantumPermutation(group, new_coords, label="measured")
    session.current = new_state
    session.history.append((position, outcome, prob))
    return outcome, prob


def replay(session: MeasurementSession, tol: float = 1e-8) -> QuantumPermutation:
    """Re-run the recorded history from the initial state; must match current."""
    group = session.group
    coords = session.initial.coords
    for position, outcome, _ in session.history:
        weight = float(np.real(np.dot(group.gen_coords[outcome, position], coords)))
        if weight <= PROB_TOL:
            raise NullEvent("recorded outcome became null on replay")
        coords = (condition_maps(group).get(outcome, position) @ coords) / weight
    defect = float(np.max(np.abs(coords - session.current.coords)))
    if defect > tol:
        raise NotAState(f"history replay deviates by {defect:.3e}")
    return QuantumPermutation(group, coords, label="replayed")
