"""Gate-model Deutsch-Jozsa reference for boolean functions on ``n`` bits.

Qubits ``1..n`` hold the input register (qubit 1 is the most significant
input bit) and qubit ``n + 1`` is the ancilla.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    GateOp,
    InputError,
    StateVector,
    apply_gate,
    basis_state,
    hadamard,
)

MAX_INPUT_BITS = 10


class FunctionClass(str, enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"
    NEITHER = "neither"


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table ``(f(0), f(1), ..., f(2**n - 1))``."""

    table: tuple[int, ...]

    def __post_init__(self) -> None:
        table = tuple(int(v) for v in self.table)
        if any(v not in (0, 1) for v in table):
            raise InputError("truth table entries must be 0 or 1")
        n = len(table).bit_length() - 1
        if n < 1 or 2**n != len(table) or n > MAX_INPUT_BITS:
            raise InputError(f"truth table length {len(table)} is not 2**n for 1 <= n <= 10")
        object.__setattr__(self, "table", table)

    @property
    def n(self) -> int:
        return len(self.table).bit_length() - 1

    def __call__(self, x: int) -> int:
        return self.table[x]

    @classmethod
    def parse(cls, text: str) -> BooleanFunction:
        """Parse ``"f=0110"`` (or just ``"0110"``), listing ``f(0) f(1) ...``."""
        body = text.strip()
        if body.lower().startswith("f="):
            body = body[2:]
        if not body or any(ch not in "01" for ch in body):
            raise InputError(f"cannot parse function literal {text!r}")
        return cls(tuple(int(ch) for ch in body))

    def format(self) -> str:
        return "f=" + "".join(map(str, self.table))


F_CONSTANT = BooleanFunction((0, 0, 0, 0))
F_BALANCED = BooleanFunction((0, 1, 1, 0))


def all_functions(n: int = 2) -> list[BooleanFunction]:
    return [BooleanFunction(t) for t in itertools.product((0, 1), repeat=2**n)]


def classify(f: BooleanFunction) -> FunctionClass:
    ones = sum(f.table)
    if ones in (0, len(f.table)):
        return FunctionClass.CONSTANT
    if 2 * ones == len(f.table):
        return FunctionClass.BALANCED
    return FunctionClass.NEITHER


def oracle_unitary(f: BooleanFunction) -> GateOp:
    """Permutation ``|x>|y> -> |x>|y XOR f(x)>`` on ``n + 1`` qubits."""
    dim = 2 ** (f.n + 1)
    perm = np.zeros((dim, dim), dtype=complex)
    for x in range(2**f.n):
        for y in (0, 1):
            perm[2 * x + (y ^ f(x)), 2 * x + y] = 1
    return GateOp(perm, tuple(range(1, f.n + 2)))


class CountingOracle:
    """Wraps :func:`oracle_unitary` and counts how often the oracle is consulted."""

    def __init__(self, f: BooleanFunction):
        self.f = f
        self.calls = 0

    def __call__(self) -> GateOp:
        self.calls += 1
        return oracle_unitary(self.f)


def _hadamard_all(state: StateVector) -> StateVector:
    for q in range(1, state.n_qubits + 1):
        state = apply_gate(state, hadamard(q))
    return state


def dj_run(f: BooleanFunction, oracle: CountingOracle | None = None) -> StateVector:
    """Final state of ``(H^n x H) U_f (H^n x H) |0...0>|1>``."""
    oracle = oracle or CountingOracle(f)
    state = basis_state(f.n + 1, "0" * f.n + "1")
    state = _hadamard_all(state)
    state = apply_gate(state, oracle())
    return _hadamard_all(state)


def closed_form_state(f: BooleanFunction) -> StateVector:
    """``(1/2^n) sum_{x,y} (-1)^{f(x) + x.y} |y> |1>`` evaluated term by term."""
    n = f.n
    amps = np.zeros(2 ** (n + 1), dtype=complex)
    for y in range(2**n):
        total = 0
        for x in range(2**n):
            total += (-1) ** (f(x) + bin(x & y).count("1"))
        amps[2 * y + 1] = total / 2**n
    return StateVector(amps)


def _require_promise(f: BooleanFunction) -> FunctionClass:
    cls = classify(f)
    if cls is FunctionClass.NEITHER:
        raise ValueError(f"{f.format()} is neither constant nor balanced")
    return cls


def dj_decide(f: BooleanFunction, seed: int = 0) -> tuple[FunctionClass, int]:
    """Decide constant vs balanced from one oracle query; returns ``(decision, oracle_calls)``."""
    _require_promise(f)
    oracle = CountingOracle(f)
    state = dj_run(f, oracle)
    # marginal of the input register
    probs = state.probabilities().reshape(2**f.n, 2).sum(axis=1)
    y = int(np.random.default_rng(seed).choice(probs.size, p=probs / probs.sum()))
    decision = FunctionClass.CONSTANT if y == 0 else FunctionClass.BALANCED
    return decision, oracle.calls


def classical_decide(f: BooleanFunction) -> tuple[FunctionClass, int]:
    """Query ``f`` at ``x = 0, 1, ...`` until two values differ or a majority agrees."""
    _require_promise(f)
    needed = 2 ** (f.n - 1) + 1
    first = f(0)
    queries = 1
    for x in range(1, needed):
        queries += 1
        if f(x) != first:
            return FunctionClass.BALANCED, queries
    return FunctionClass.CONSTANT, queries
