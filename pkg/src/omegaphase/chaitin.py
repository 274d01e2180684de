"""Staged lower approximation of the halting probability and the two
halting-witness procedures whose behaviour flips exactly at it.

Stage s simulates the first s inputs for s steps each and adds 2^-|x|
for every input seen halting, so the sequence is computable, exact, and
non-decreasing; it reaches the true value of a toy machine once every
halting input fits inside the budget (the zoo documents those budgets).
Budgets are explicit: these procedures semi-decide "phi below the
halting probability", they never decide it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .dyadic import BitString, Dyadic, truncate
from .tm import MachineSpec, enumerate_input, run_bounded

__all__ = [
    "OmegaApproximation",
    "omega_approx",
    "omega_truncated_sequence",
    "witness_w",
    "witness_wprime",
]


@dataclass(frozen=True)
class OmegaApproximation:
    machine: str
    stage: int
    value: Dyadic
    halting_inputs: tuple[str, ...]

    def report(self) -> dict:
        """JSON-ready summary used by the command-line front end."""
        return {
            "machine": self.machine,
            "stage": self.stage,
            "omega_s": self.value.as_ratio_string(),
            "halting_inputs": list(self.halting_inputs),
        }


@lru_cache(maxsize=4096)
def _omega_stage(spec: MachineSpec, stage: int) -> OmegaApproximation:
    total = Dyadic(0)
    halted: list[str] = []
    for i in range(1, stage + 1):
        word = enumerate_input(i)
        if run_bounded(spec, word, stage).halted:
            total = total + Dyadic(1, len(word))
            halted.append(str(word))
    return OmegaApproximation(spec.name, stage, total, tuple(halted))


def omega_approx(spec: MachineSpec, stage: int) -> OmegaApproximation:
    """Stage-s lower approximation: run inputs x_1..x_s for s steps each.

    Exact dyadic arithmetic throughout; results are cached per
    (machine, stage) because sweeps revisit the same stages heavily.
    """
    if stage < 0:
        raise ValueError(f"stage must be >= 0, got {stage}")
    return _omega_stage(spec, stage)


def omega_truncated_sequence(spec: MachineSpec, s_max: int) -> list[Dyadic]:
    """The diagonal sequence [stage-1 value to 1 bit, ..., stage-s to s bits].

    For toy machines the tail equals the exact value truncated, once the
    halting set is exhausted within the stage budget.
    """
    if s_max < 1:
        raise ValueError(f"s_max must be >= 1, got {s_max}")
    return [truncate(omega_approx(spec, s).value, s) for s in range(1, s_max + 1)]


def witness_w(spec: MachineSpec, phi: Dyadic, max_stage: int) -> int | None:
    """Least stage s <= max_stage with phi strictly below the stage value.

    Returns None when the budget runs out, which for phi at or above the
    machine's exact halting probability is the only possible outcome.
    """
    if not (0 <= phi < 1):
        raise ValueError(f"witness_w requires phi in [0, 1), got {phi}")
    if max_stage < 0:
        raise ValueError(f"max_stage must be >= 0, got {max_stage}")
    for s in range(1, max_stage + 1):
        if phi < omega_approx(spec, s).value:
            return s
    return None


def witness_wprime(spec: MachineSpec, phibar: BitString, m: int) -> bool:
    """Decide the halting branch of the finite-precision witness.

    Halts (True) iff 0 < (0.phibar truncated to m bits) < (stage-m value
    truncated to m bits).  An all-zero truncation loops unconditionally:
    the m-bit word 0^m stands for 1 so that wraparound estimates of
    phases just below 1 cannot fake a halt.  The looping branch is
    decided analytically rather than actually looping; downstream
    consumers only need the predicate.
    """
    if not 1 <= m <= len(phibar):
        raise ValueError(f"need 1 <= m <= n = {len(phibar)}, got m = {m}")
    phi_m = truncate(phibar.to_dyadic(), m)
    if phi_m == 0:
        return False
    omega_m = truncate(omega_approx(spec, m).value, m)
    return phi_m < omega_m
