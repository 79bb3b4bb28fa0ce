"""Per-degree-of-freedom dephasing noise and fitting against published output tables.

Each degree of freedom gets one phase-flip channel applied, in the cluster
frame, to its photon-A qubit: E/I on qubit 1, polarization on qubit 2 and
r/l on qubit 3. A flip probability ``p`` damps the pair coherence to the
interference visibility ``V = 1 - 2p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    DensityMatrix,
    InputError,
    PauliString,
    StateVector,
    _apply_to_axes,
    apply_pauli,
    to_density,
)
from .graphs import e_cluster
from .mbqc import (
    ROW_LABELS,
    Distribution,
    FunctionKind,
    MeasurementPattern,
    OutcomeSampler,
    as_distribution,
    dj_pattern,
    ff_distribution,
    outcome_probabilities,
)

P_MAX = 0.5
DOF_QUBITS = {"p_ei": 1, "p_pol": 2, "p_rl": 3}
_LITERAL_KEYS = {"pei": "p_ei", "ppol": "p_pol", "prl": "p_rl"}


@dataclass(frozen=True)
class NoiseProfile:
    p_ei: float = 0.0
    p_pol: float = 0.0
    p_rl: float = 0.0

    def __post_init__(self) -> None:
        for name in DOF_QUBITS:
            p = float(getattr(self, name))
            if not 0.0 <= p <= P_MAX:
                raise InputError(f"{name}={p} outside [0, 0.5]")
            object.__setattr__(self, name, p)

    @classmethod
    def from_visibilities(cls, v_ei: float = 1.0, v_pol: float = 1.0, v_rl: float = 1.0) -> NoiseProfile:
        return cls((1 - v_ei) / 2, (1 - v_pol) / 2, (1 - v_rl) / 2)

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p_ei, self.p_pol, self.p_rl)

    @property
    def visibilities(self) -> tuple[float, float, float]:
        return tuple(1 - 2 * p for p in self.probabilities)

    def per_qubit(self) -> dict[int, float]:
        return {q: getattr(self, name) for name, q in DOF_QUBITS.items()}

    @classmethod
    def parse(cls, text: str) -> NoiseProfile:
        """Parse ``"pEI:0.15,pPol:0.04,pRl:0.01"``; a leading ``noise=`` is allowed."""
        body = text.strip()
        if body.lower().startswith("noise="):
            body = body[len("noise="):]
        values = {}
        for item in filter(None, (part.strip() for part in body.split(","))):
            key, sep, value = item.partition(":")
            name = _LITERAL_KEYS.get(key.strip().lower())
            if not sep or name is None:
                raise InputError(f"cannot parse noise entry {item!r}")
            try:
                values[name] = float(value)
            except ValueError:
                raise InputError(f"noise value {value!r} is not a number") from None
        return cls(**values)

    def format(self) -> str:
        return f"pEI:{self.p_ei:g},pPol:{self.p_pol:g},pRl:{self.p_rl:g}"


NOISELESS = NoiseProfile()


@dataclass(frozen=True, eq=False)
class NoisyState:
    rho: DensityMatrix
    profile: NoiseProfile


def _z_signs(n: int, qubit: int) -> np.ndarray:
    idx = np.arange(2**n)
    return 1 - 2 * ((idx >> (n - qubit)) & 1)


def dephase_channel(rho: DensityMatrix, qubit: int, p: float) -> DensityMatrix:
    """``(1 - p) rho + p Z rho Z`` on one qubit."""
    if not 0.0 <= p <= P_MAX:
        raise InputError(f"dephasing probability {p} outside [0, 0.5]")
    n = rho.n_qubits
    if not 1 <= qubit <= n:
        raise InputError(f"qubit {qubit} outside 1..{n}")
    signs = _z_signs(n, qubit)
    # Z rho Z flips the sign of entries whose row and column differ on this qubit
    damping = np.where(np.equal.outer(signs, signs), 1.0, 1.0 - 2.0 * p)
    return DensityMatrix(rho.matrix * damping)


def apply_profile(state: StateVector, profile: NoiseProfile) -> NoisyState:
    if state.n_qubits != 6:
        raise InputError("noise profiles apply to the six-qubit cluster")
    if not isinstance(profile, NoiseProfile):
        raise InputError("profile must be a NoiseProfile")
    rho = to_density(state)
    for q, p in profile.per_qubit().items():
        rho = dephase_channel(rho, q, p)
    return NoisyState(rho, profile)


def noisy_outcome_probabilities(
    state: NoisyState | DensityMatrix, pattern: MeasurementPattern
) -> np.ndarray:
    rho = state.rho if isinstance(state, NoisyState) else state
    n = rho.n_qubits
    if n != pattern.n_qubits:
        raise InputError("pattern and state qubit counts differ")
    t = rho.matrix.reshape((2,) * (2 * n))
    for step in pattern.steps:
        m = step.basis.change_of_basis()
        t = _apply_to_axes(t, m, [step.qubit - 1])
        t = _apply_to_axes(t, m.conj(), [n + step.qubit - 1])
    probs = np.real(np.diagonal(t.reshape(2**n, 2**n))).copy()
    return np.clip(probs, 0.0, None)


def noisy_distribution(state: NoisyState | DensityMatrix, pattern: MeasurementPattern) -> Distribution:
    """Exact joint outcome distribution ``Tr(P_s rho)`` for every outcome string."""
    return as_distribution(noisy_outcome_probabilities(state, pattern))


_FLIPS = list(itertools.product((0, 1), repeat=3))


def _flipped(state: StateVector, flips: Sequence[int]) -> StateVector:
    ops = {q: "Z" for q, z in zip(DOF_QUBITS.values(), flips) if z}
    if not ops:
        return state
    return apply_pauli(state, PauliString.from_sparse(state.n_qubits, ops))


def flip_weights(profile: NoiseProfile) -> np.ndarray:
    """Probability of each Z-flip pattern on qubits (1, 2, 3), in ``_FLIPS`` order."""
    p = np.array(profile.probabilities)
    return np.array([np.prod(np.where(np.array(z) == 1, p, 1 - p)) for z in _FLIPS])


def sample_noisy(
    state: StateVector,
    profile: NoiseProfile,
    pattern: MeasurementPattern,
    shots: int,
    seed: int,
) -> list[str]:
    """Monte Carlo trajectories: flip each DOF qubit with its probability, then measure.

    Shot ``i`` uses ``default_rng(seed + i)``: three uniforms decide the flips,
    the next ``n`` drive the sequential measurement.
    """
    if shots < 1:
        raise InputError("shots must be >= 1")
    p = np.array(profile.probabilities)
    samplers: dict[tuple[int, ...], OutcomeSampler] = {}
    out = []
    for i in range(shots):
        rng = np.random.default_rng(seed + i)
        flips = tuple(int(b) for b in rng.random(3) < p)
        sampler = samplers.get(flips)
        if sampler is None:
            sampler = OutcomeSampler(outcome_probabilities(_flipped(state, flips), pattern), pattern)
            samplers[flips] = sampler
        out.append(sampler.sample_uniforms(rng.random(pattern.n_qubits)))
    return out


def _as_row_vector(reference: Mapping[str, float] | Sequence[float]) -> np.ndarray:
    if isinstance(reference, Mapping):
        if set(reference) != set(ROW_LABELS):
            raise InputError(f"reference must have rows {', '.join(ROW_LABELS)}")
        values = [reference[k] for k in ROW_LABELS]
    else:
        values = list(reference)
        if len(values) != 8:
            raise InputError(f"reference must have 8 rows, got {len(values)}")
    vec = np.array(values, dtype=float)
    if not np.all(np.isfinite(vec)) or np.any(vec < 0):
        raise InputError("reference probabilities must be finite and nonnegative")
    if abs(vec.sum() - 1) > 0.01:
        raise InputError(f"reference probabilities sum to {vec.sum():.4f}, expected ~1")
    return vec


def ff_basis(state: StateVector, kind: FunctionKind | str) -> np.ndarray:
    """FF-column distributions (rows) of the eight Z-flip trajectories of ``state``."""
    pattern = dj_pattern(kind)
    rows = []
    for flips in _FLIPS:
        dist = as_distribution(outcome_probabilities(_flipped(state, flips), pattern))
        ff = ff_distribution(dist, kind)
        rows.append([ff[k] for k in ROW_LABELS])
    return np.array(rows)


@dataclass(frozen=True)
class FitResult:
    profile: NoiseProfile
    tv_distance: float
    model: Distribution
    kind: FunctionKind


def fit_profile(
    reference: Mapping[str, float] | Sequence[float],
    kind: FunctionKind | str,
    *,
    step: float = 0.005,
    upper: float = 0.3,
    state: StateVector | None = None,
) -> FitResult:
    """Grid-search ``(p_ei, p_pol, p_rl)`` in ``[0, upper]^3`` minimizing FF total variation.

    The FF distribution is multilinear in the three flip probabilities, so each
    candidate is a weighted sum of the eight trajectory distributions. Ties
    (within 1e-12) go to the lexicographically smallest profile.
    """
    kind = FunctionKind(kind)
    ref = _as_row_vector(reference)
    if not 0 < step <= upper <= P_MAX:
        raise InputError("need 0 < step <= upper <= 0.5")
    basis = ff_basis(e_cluster() if state is None else state, kind)
    grid = np.round(np.arange(int(round(upper / step)) + 1) * step, 12)
    grid = grid[grid <= upper + 1e-12]
    a, b, c = np.meshgrid(grid, grid, grid, indexing="ij")
    p = np.stack([a.ravel(), b.ravel(), c.ravel()], axis=1)
    weights = np.ones((p.shape[0], len(_FLIPS)))
    for j, flips in enumerate(_FLIPS):
        for d, z in enumerate(flips):
            weights[:, j] *= p[:, d] if z else 1 - p[:, d]
    tv = 0.5 * np.abs(weights @ basis - ref).sum(axis=1)
    best = int(np.flatnonzero(tv <= tv.min() + 1e-12)[0])
    profile = NoiseProfile(*p[best])
    model = dict(zip(ROW_LABELS, (weights[best] @ basis).tolist()))
    return FitResult(profile, float(tv[best]), model, kind)
