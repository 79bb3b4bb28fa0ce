"""Single-qubit measurement patterns on the E cluster, outcome enumeration and feed-forward.

Outcome strings are always written in qubit order ``s1 s2 ... s6`` regardless
of the order in which a pattern measures the qubits. Bit ``s_j`` is 0 for the
first vector of the basis and 1 for the second.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    ZERO_PROBABILITY,
    InputError,
    StateVector,
    ZeroProbabilityError,
    _apply_to_axes,
    project,
)
from .graphs import FRAME_UNITARIES, Frame

Distribution = dict[str, float]


class FunctionKind(str, enum.Enum):
    BALANCED = "balanced"
    CONSTANT = "constant"


class Role(str, enum.Enum):
    ORACLE = "oracle"
    READOUT = "readout"


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal pair; ``vectors[k]`` is the state reported as outcome ``k``.

    ``kind`` is ``"B"`` (equatorial, angle ``alpha``) or ``"C"`` (computational).
    A basis moved into the laboratory frame keeps its kind and angle but carries
    the rotated vectors.
    """

    kind: str
    alpha: float | None = None
    vectors: np.ndarray = field(default=None, repr=False)
    frame: Frame = Frame.CLUSTER

    def __post_init__(self) -> None:
        if self.kind not in ("B", "C"):
            raise InputError(f"unknown basis kind {self.kind!r}")
        if self.vectors is None:
            if self.kind == "C":
                vecs = np.eye(2, dtype=complex)
            else:
                phase = np.exp(-1j * self.alpha)
                vecs = np.array([[1, phase], [1, -phase]], dtype=complex) / math.sqrt(2)
        else:
            vecs = np.array(self.vectors, dtype=complex)
        if not np.allclose(vecs.conj() @ vecs.T, np.eye(2), atol=1e-12, rtol=0):
            raise InputError("basis vectors are not orthonormal")
        vecs.flags.writeable = False
        object.__setattr__(self, "vectors", vecs)

    @property
    def label(self) -> str:
        return "C" if self.kind == "C" else f"B({format_angle(self.alpha)})"

    def change_of_basis(self) -> np.ndarray:
        """Matrix whose row ``k`` is the bra of outcome ``k``."""
        return self.vectors.conj()

    def transformed(self, unitary: np.ndarray, frame: Frame) -> MeasurementBasis:
        return MeasurementBasis(self.kind, self.alpha, self.vectors @ np.asarray(unitary).T, frame)


def basis_b(alpha: float) -> MeasurementBasis:
    """``{(|0> + e^{-i alpha}|1>)/sqrt2, (|0> - e^{-i alpha}|1>)/sqrt2}``."""
    return MeasurementBasis("B", float(alpha))


def basis_c() -> MeasurementBasis:
    return MeasurementBasis("C")


_ANGLE_RE = re.compile(r"^(?P<sign>-)?(?P<num>\d+)?\*?pi(?:/(?P<den>\d+))?$")


def format_angle(alpha: float) -> str:
    if abs(alpha) < 1e-12:
        return "0"
    for den in (1, 2, 3, 4, 6, 8):
        num = alpha * den / math.pi
        if abs(num - round(num)) < 1e-12:
            num = round(num)
            sign = "-" if num < 0 else ""
            coef = "" if abs(num) == 1 else str(abs(num))
            return f"{sign}{coef}pi" + ("" if den == 1 else f"/{den}")
    return repr(float(alpha))


def parse_angle(text: str) -> float:
    text = text.strip().replace(" ", "").lower()
    m = _ANGLE_RE.match(text)
    if m:
        value = math.pi * int(m["num"] or 1) / int(m["den"] or 1)
        return -value if m["sign"] else value
    try:
        return float(text)
    except ValueError:
        raise InputError(f"cannot parse angle {text!r}") from None


def parse_basis(text: str) -> MeasurementBasis:
    text = text.strip()
    if text.upper() == "C":
        return basis_c()
    m = re.fullmatch(r"B\((.*)\)", text)
    if not m:
        raise InputError(f"cannot parse basis {text!r}; expected 'B(angle)' or 'C'")
    return basis_b(parse_angle(m.group(1)))


@dataclass(frozen=True)
class PatternStep:
    qubit: int
    basis: MeasurementBasis
    role: Role

    def format(self) -> str:
        return f"qubit={self.qubit} basis={self.basis.label} role={self.role.value}"


# qubit -> (basis label, role) for the two published configurations
_CONFIGURATIONS: dict[FunctionKind, list[tuple[int, str, Role]]] = {
    FunctionKind.BALANCED: [
        (1, "B(0)", Role.ORACLE),
        (3, "B(0)", Role.ORACLE),
        (5, "B(pi)", Role.ORACLE),
        (4, "C", Role.READOUT),
        (6, "C", Role.READOUT),
        (2, "C", Role.READOUT),
    ],
    FunctionKind.CONSTANT: [
        (1, "B(0)", Role.ORACLE),
        (3, "B(0)", Role.ORACLE),
        (2, "C", Role.ORACLE),
        (4, "C", Role.READOUT),
        (6, "C", Role.READOUT),
        (5, "B(pi)", Role.READOUT),
    ],
}


@dataclass(frozen=True)
class MeasurementPattern:
    """Ordered single-qubit measurements covering qubits ``1..n`` exactly once.

    With ``kind`` set, the bases and roles must be those of the corresponding
    Deutsch-Jozsa configuration (in any order).
    """

    steps: tuple[PatternStep, ...]
    kind: FunctionKind | None = None

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        qubits = [s.qubit for s in steps]
        if sorted(qubits) != list(range(1, len(steps) + 1)):
            raise InputError(f"pattern must cover qubits 1..{len(steps)} once, got {qubits}")
        object.__setattr__(self, "steps", steps)
        if self.kind is not None:
            kind = FunctionKind(self.kind)
            object.__setattr__(self, "kind", kind)
            expected = {q: (label, role) for q, label, role in _CONFIGURATIONS[kind]}
            actual = {s.qubit: (s.basis.label, s.role) for s in steps}
            if actual != expected:
                raise InputError(f"steps do not match the {kind.value} configuration")

    @property
    def n_qubits(self) -> int:
        return len(self.steps)

    @property
    def order(self) -> list[int]:
        return [s.qubit for s in self.steps]

    def step(self, qubit: int) -> PatternStep:
        return next(s for s in self.steps if s.qubit == qubit)

    def reordered(self, order: Sequence[int]) -> MeasurementPattern:
        by_qubit = {s.qubit: s for s in self.steps}
        return MeasurementPattern(tuple(by_qubit[q] for q in order), self.kind)

    def in_frame(self, frame: Frame | str) -> MeasurementPattern:
        """Bases as they must be set when the state is held in ``frame``.

        In the laboratory frame qubits 4, 5, 6 are measured in the cluster
        basis rotated by the frame unitary, which leaves every outcome
        probability unchanged.
        """
        frame = Frame(frame)
        steps = []
        for s in self.steps:
            basis = s.basis
            if basis.frame is not frame:
                u = FRAME_UNITARIES.get(s.qubit)
                if u is not None:
                    if frame is Frame.CLUSTER:
                        u = u.conj().T
                    basis = basis.transformed(u, frame)
                else:
                    basis = MeasurementBasis(basis.kind, basis.alpha, basis.vectors, frame)
            steps.append(PatternStep(s.qubit, basis, s.role))
        return MeasurementPattern(tuple(steps), self.kind)

    def format(self) -> str:
        lines = [] if self.kind is None else [f"kind={self.kind.value}"]
        lines += [s.format() for s in self.steps]
        return "\n".join(lines) + "\n"


def dj_pattern(kind: FunctionKind | str) -> MeasurementPattern:
    """Published configuration: oracle qubits first, then the readout qubits."""
    kind = FunctionKind(kind)
    steps = tuple(
        PatternStep(q, parse_basis(label), role) for q, label, role in _CONFIGURATIONS[kind]
    )
    return MeasurementPattern(steps, kind)


def parse_pattern(text: str, kind: FunctionKind | str | None = None) -> MeasurementPattern:
    """Parse lines ``qubit=1 basis=B(0) role=oracle``; an optional ``kind=...`` line sets the kind."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
        if set(fields) == {"kind"}:
            kind = fields["kind"]
            continue
        try:
            steps.append(
                PatternStep(int(fields["qubit"]), parse_basis(fields["basis"]), Role(fields["role"]))
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"line {lineno}: cannot parse pattern step {raw!r}") from exc
    if not steps:
        raise InputError("pattern text has no steps")
    return MeasurementPattern(tuple(steps), None if kind is None else FunctionKind(kind))


@dataclass(frozen=True)
class OutcomeRecord:
    s: tuple[int, ...]
    probability: float
    logical_output: tuple[int, int, int] | None

    @property
    def bits(self) -> str:
        return "".join(map(str, self.s))


def _bits(s: Sequence[int] | str) -> list[int]:
    bits = [int(b) for b in s]
    if len(bits) != 6 or any(b not in (0, 1) for b in bits):
        raise InputError(f"expected six outcome bits, got {s!r}")
    return bits


def logical_output(s: Sequence[int] | str, kind: FunctionKind | str) -> tuple[int, int, int]:
    """Feed-forward corrected logical readout ``(q1, q2, ancilla)``.

    The correction is a relabeling: readout bits are XORed with the oracle
    outcomes, nothing is applied to the quantum state.
    """
    s1, s2, s3, s4, s5, s6 = _bits(s)
    if FunctionKind(kind) is FunctionKind.BALANCED:
        return (s4 ^ s1 ^ s5, s6 ^ s3 ^ s5, s2 ^ s5)
    return (s4 ^ s1 ^ s2, s6 ^ s2 ^ s3, s5 ^ s2)


# Oracle qubits conditioned to zero and raw readout triple for the No-FF column.
_NO_FF = {
    FunctionKind.BALANCED: ((1, 3, 5), (4, 6, 2)),
    FunctionKind.CONSTANT: ((1, 2, 3), (4, 6, 5)),
}

ROW_LABELS = tuple(f"{i:03b}" for i in range(8))


def outcome_probabilities(state: StateVector, pattern: MeasurementPattern) -> np.ndarray:
    """All ``2**n`` joint outcome probabilities, indexed by the bits ``s1..sn``."""
    if state.n_qubits != pattern.n_qubits:
        raise InputError(
            f"pattern covers {pattern.n_qubits} qubits but the state has {state.n_qubits}"
        )
    t = state.tensor()
    for step in pattern.steps:
        t = _apply_to_axes(t, step.basis.change_of_basis(), [step.qubit - 1])
    probs = np.abs(t.reshape(-1)) ** 2
    if abs(probs.sum() - 1) > 1e-9:
        raise InputError(f"state is not normalized (total probability {probs.sum():.12g})")
    return probs


def as_distribution(probs: np.ndarray) -> Distribution:
    n = int(probs.size).bit_length() - 1
    return {f"{i:0{n}b}": float(p) for i, p in enumerate(probs)}


def enumerate_distribution(state: StateVector, pattern: MeasurementPattern) -> Distribution:
    """Exact joint distribution over every outcome string (zeros included)."""
    return as_distribution(outcome_probabilities(state, pattern))


def support(dist: Mapping[str, float], floor: float = ZERO_PROBABILITY) -> Distribution:
    return {k: p for k, p in dist.items() if p > floor}


def ff_distribution(dist: Mapping[str, float], kind: FunctionKind | str) -> Distribution:
    """Distribution of the feed-forward corrected logical output over all outcomes."""
    out = dict.fromkeys(ROW_LABELS, 0.0)
    for s, p in dist.items():
        out["".join(map(str, logical_output(s, kind)))] += p
    return out


def _no_ff_counts(dist: Mapping[str, float], kind: FunctionKind | str) -> Distribution:
    if not dist:
        raise InputError("empty distribution")
    oracle, readout = _NO_FF[FunctionKind(kind)]
    out = dict.fromkeys(ROW_LABELS, 0.0)
    for s, p in dist.items():
        bits = _bits(s)
        if any(bits[q - 1] for q in oracle):
            continue
        out["".join(str(bits[q - 1]) for q in readout)] += p
    return out


def oracle_zero_probability(dist: Mapping[str, float], kind: FunctionKind | str) -> float:
    """Probability that every oracle outcome is zero (the No-FF postselection)."""
    return sum(_no_ff_counts(dist, kind).values())


def no_ff_filter(dist: Mapping[str, float], kind: FunctionKind | str) -> Distribution:
    """Readout distribution conditioned on all oracle outcomes being zero.

    The raw readout triple is ``(s4, s6, s2)`` for the balanced pattern and
    ``(s4, s6, s5)`` for the constant one.
    """
    out = _no_ff_counts(dist, kind)
    total = sum(out.values())
    if total <= ZERO_PROBABILITY:
        raise ZeroProbabilityError("no-feed-forward conditioning event has zero probability")
    return {k: v / total for k, v in out.items()}


def total_variation(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def _choose(p0: float, p1: float, u: float) -> int:
    if p0 <= ZERO_PROBABILITY and p1 <= ZERO_PROBABILITY:
        raise RuntimeError("both measurement branches have zero probability")
    if p0 <= ZERO_PROBABILITY:
        return 1
    if p1 <= ZERO_PROBABILITY:
        return 0
    return 0 if u < p0 / (p0 + p1) else 1


def run_pattern(state: StateVector, pattern: MeasurementPattern, seed: int) -> OutcomeRecord:
    """Measure the qubits one at a time in pattern order, sampling each branch.

    Uses ``numpy.random.default_rng(seed)`` and one uniform draw per step, so
    a given seed always yields the same record.
    """
    if state.n_qubits != pattern.n_qubits:
        raise InputError("pattern and state qubit counts differ")
    rng = np.random.default_rng(seed)
    s = [0] * pattern.n_qubits
    probability = 1.0
    for step in pattern.steps:
        branches = []
        for vec in step.basis.vectors:
            try:
                branches.append(project(state, step.qubit, vec))
            except ZeroProbabilityError:
                branches.append((0.0, None))
        bit = _choose(branches[0][0], branches[1][0], rng.random())
        prob, state = branches[bit]
        s[step.qubit - 1] = bit
        probability *= prob
    out = logical_output(s, pattern.kind) if pattern.kind is not None else None
    return OutcomeRecord(tuple(s), probability, out)


class OutcomeSampler:
    """Fast equivalent of repeated :func:`run_pattern` calls on one state.

    Conditional branch probabilities are read from the exact joint
    distribution arranged in measurement order, and each shot draws its
    uniforms from ``default_rng(seed + shot)`` exactly as ``run_pattern`` would.
    """

    def __init__(self, probs: np.ndarray, pattern: MeasurementPattern):
        n = pattern.n_qubits
        self.pattern = pattern
        ordered = probs.reshape((2,) * n).transpose([q - 1 for q in pattern.order])
        # marginals[k] has shape (2,)*(k+1): probability of the first k+1 outcomes
        self._marginals = [
            ordered.sum(axis=tuple(range(k + 1, n))) if k + 1 < n else ordered for k in range(n)
        ]

    def sample_uniforms(self, uniforms: Sequence[float]) -> str:
        n = self.pattern.n_qubits
        prefix: tuple[int, ...] = ()
        for k in range(n):
            p0, p1 = self._marginals[k][prefix]
            prefix += (_choose(float(p0), float(p1), uniforms[k]),)
        s = [0] * n
        for q, bit in zip(self.pattern.order, prefix):
            s[q - 1] = bit
        return "".join(map(str, s))

    def sample(self, seed: int) -> str:
        return self.sample_uniforms(np.random.default_rng(seed).random(self.pattern.n_qubits))


def sample_outcomes(
    state: StateVector, pattern: MeasurementPattern, shots: int, seed: int
) -> list[str]:
    """Outcome strings of ``shots`` independent runs with per-shot seeds ``seed + i``."""
    if shots < 1:
        raise InputError("shots must be >= 1")
    sampler = OutcomeSampler(outcome_probabilities(state, pattern), pattern)
    return [sampler.sample(seed + i) for i in range(shots)]


def empirical_distribution(outcomes: Iterable[str]) -> Distribution:
    counts: dict[str, int] = {}
    total = 0
    for s in outcomes:
        counts[s] = counts.get(s, 0) + 1
        total += 1
    return {k: v / total for k, v in sorted(counts.items())}
