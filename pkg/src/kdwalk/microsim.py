"""Two-register simulator: the walk with explicit value registers.

Basis states are |S, y> |x'_1 ... x'_{r+1}>.  Slot m of the second
register is tied to the m-th smallest index of S and the last slot to the
walker's outside element y.  Slots hold integers from 0 (unqueried) up to
the value bound m; the register alphabet is padded to the next power of
two so the oracle's bitwise XOR stays closed.

The beta reflection extends to both registers: two basis states belong to
the same extended polygon iff they share the union T = S + {y} and assign
the same value to every index of T.  Rotating the outside element within
T permutes the slots; the permutation moves the outgoing index's value to
the last slot and keeps the remaining slots sorted by index.  On the
states the algorithm actually reaches, the second register is a function
of the first, which is why the register-free simulator gives identical
first-register dynamics; this module exists to check exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combinatorics import KDistinctnessInstance, ProblemParams
from .fullwalk import DEFAULT_CAP, WalkSpace, build_walk_space, marked_mask

SUPPORT_TOL = 1e-12


@dataclass
class MicroRunResult:
    state: np.ndarray
    marginal: np.ndarray
    max_off_support: float
    support_checks: list[tuple[str, float]] = field(default_factory=list)


class TwoRegisterSim:
    """Dense joint-register simulator for tiny instances."""

    def __init__(
        self,
        params: ProblemParams,
        instance: KDistinctnessInstance,
        cap: int = DEFAULT_CAP,
    ):
        if params.m is None:
            raise ValueError("two-register simulation needs the value bound m")
        if instance.max_value() > params.m:
            raise ValueError(
                f"list value {instance.max_value()} exceeds bound m={params.m}"
            )
        self.params = params
        self.instance = instance
        self.space: WalkSpace = build_walk_space(params, cap)
        self.bits = max(1, (params.m).bit_length())
        self.alphabet = 1 << self.bits
        self.n_slots = params.r + 1
        self.dim2 = self.alphabet**self.n_slots
        total = self.space.n_vertices * self.dim2
        if total > cap:
            raise MemoryError(f"joint dimension {total} exceeds cap {cap}")

        self._build_slot_tables()
        self.marked_rows = marked_mask(self.space, instance)

    def _build_slot_tables(self) -> None:
        r = self.params.r
        a = self.alphabet
        values = self.instance.values

        # slot permutations for the beta rotation, one per outside position
        w = np.arange(self.dim2, dtype=np.int64)
        digits = [(w // a**q) % a for q in range(r + 1)]
        perms = np.empty((r + 1, self.dim2), dtype=np.int64)
        for p in range(r + 1):
            si = digits[p] * a**r
            for j in range(r):
                si = si + digits[j if j < p else j + 1] * a**j
            perms[p] = si
        self.beta_slot_perms = perms

        self.oracle_shift = self.bits * r
        self.oracle_xor = np.array(
            [values[y - 1] << self.oracle_shift for (_, y) in self.space.vertices],
            dtype=np.int64,
        )
        # expected on-support slot index per vertex: values of S, last slot 0
        base = np.empty(self.space.n_vertices, dtype=np.int64)
        for i, (s, _) in enumerate(self.space.vertices):
            si = 0
            for j, idx in enumerate(s):
                si += values[idx - 1] * a**j
            base[i] = si
        self.support_base = base
        self.support_queried = base ^ self.oracle_xor

    def initial_state(self) -> np.ndarray:
        """Post-setup state: uniform over vertices, slots loaded with the
        subset's values, last slot 0."""
        state = np.zeros((self.space.n_vertices, self.dim2), dtype=complex)
        amp = 1.0 / np.sqrt(self.space.n_vertices)
        state[np.arange(self.space.n_vertices), self.support_base] = amp
        return state

    def apply_u_alpha(self, state: np.ndarray) -> np.ndarray:
        n_alpha, width = self.space.alpha_polygons.shape
        shaped = state.reshape(n_alpha, width, self.dim2)
        means = shaped.mean(axis=1, keepdims=True)
        return (2.0 * means - shaped).reshape(state.shape)

    def apply_oracle(self, state: np.ndarray) -> np.ndarray:
        """XOR the outside element's list value into the last slot."""
        out = np.empty_like(state)
        cols = np.arange(self.dim2, dtype=np.int64)
        for xv in np.unique(self.oracle_xor):
            rows = np.flatnonzero(self.oracle_xor == xv)
            out[rows] = state[np.ix_(rows, cols ^ xv)]
        return out

    def apply_u_beta_ext(self, state: np.ndarray) -> np.ndarray:
        b = self.space.beta_polygons[:, :, None]
        perm = self.beta_slot_perms[None, :, :]
        gathered = state[b, perm]
        means = gathered.mean(axis=1, keepdims=True)
        out = state.copy()
        out[b, perm] = 2.0 * means - gathered
        return out

    def apply_phase_flip(self, state: np.ndarray) -> np.ndarray:
        out = state.copy()
        out[self.marked_rows] *= -1.0
        return out

    def off_support_amplitude(self, state: np.ndarray, expected: np.ndarray) -> float:
        """Largest amplitude outside the expected one-slot-per-vertex support."""
        probe = state.copy()
        probe[np.arange(self.space.n_vertices), expected] = 0.0
        return float(np.max(np.abs(probe)))

    def first_register_marginal(self, state: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(state) ** 2, axis=1).real

    def run(self, t1: int, t2: int, check_support: bool = True) -> MicroRunResult:
        """Full algorithm: t1 main blocks of a phase flip plus t2 subroutine
        passes (alpha reflection, oracle, extended beta reflection, oracle)."""
        state = self.initial_state()
        checks: list[tuple[str, float]] = []

        def record(tag: str, expected: np.ndarray) -> None:
            if check_support:
                checks.append((tag, self.off_support_amplitude(state, expected)))

        record("setup", self.support_base)
        for block in range(t1):
            state = self.apply_phase_flip(state)
            for step in range(t2):
                tag = f"block{block + 1}.step{step + 1}"
                state = self.apply_u_alpha(state)
                state = self.apply_oracle(state)
                record(tag + ".queried", self.support_queried)
                state = self.apply_u_beta_ext(state)
                record(tag + ".rotated", self.support_queried)
                state = self.apply_oracle(state)
                record(tag + ".cleared", self.support_base)
        worst = max((v for _, v in checks), default=0.0)
        return MicroRunResult(
            state=state,
            marginal=self.first_register_marginal(state),
            max_off_support=worst,
            support_checks=checks,
        )


def run_two_register_microsim(
    params: ProblemParams,
    instance: KDistinctnessInstance,
    t1: int,
    t2: int,
    cap: int = DEFAULT_CAP,
) -> MicroRunResult:
    return TwoRegisterSim(params, instance, cap).run(t1, t2)
