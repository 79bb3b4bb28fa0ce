"""Dense state-vector and density-matrix algebra for small qubit registers.

Qubits are numbered from 1. Qubit 1 is the most significant bit of the
amplitude index, so ``basis_state(3, "100")`` has its single non-zero
amplitude at index 4 and printed bit strings read ``q1 q2 ... qn``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

ATOL = 1e-10
ZERO_PROBABILITY = 1e-12
EIGENVALUE_FLOOR = -1e-9


class InputError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


class ZeroProbabilityError(ValueError):
    """Raised when a measurement branch with (numerically) zero probability is requested."""


def _as_qubit_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2**n != dim:
        raise InputError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` qubits held as ``2**n_qubits`` complex amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _as_qubit_count(amps.size)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return _as_qubit_count(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        norm = self.norm
        if norm <= ZERO_PROBABILITY:
            raise ZeroProbabilityError("cannot normalize a zero vector")
        return StateVector(self.amplitudes / norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit (axis ``q - 1`` is qubit ``q``)."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def __repr__(self) -> str:
        terms = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > 1e-9):
            amp = self.amplitudes[idx]
            terms.append(f"({amp.real:+.4f}{amp.imag:+.4f}j)|{idx:0{self.n_qubits}b}>")
        return "StateVector(" + " ".join(terms) + ")"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator on ``n_qubits`` qubits."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"density matrix must be square, got shape {mat.shape}")
        _as_qubit_count(mat.shape[0])
        if not np.allclose(mat, mat.conj().T, atol=ATOL, rtol=0):
            raise InputError("density matrix is not Hermitian")
        trace = np.trace(mat)
        if abs(trace - 1) > ATOL:
            raise InputError(f"density matrix trace is {trace.real:.12g}, expected 1")
        if np.linalg.eigvalsh(mat).min() < EIGENVALUE_FLOOR:
            raise InputError("density matrix has a negative eigenvalue")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n_qubits(self) -> int:
        return _as_qubit_count(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


State = Union[StateVector, DensityMatrix]


_PAULI_LETTERS = "IXYZ"


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with an overall sign of +1 or -1.

    ``letters[q - 1]`` is the Pauli on qubit ``q``.
    """

    letters: str
    sign: int = 1

    def __post_init__(self) -> None:
        letters = self.letters.upper()
        if not letters or any(ch not in _PAULI_LETTERS for ch in letters):
            raise InputError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise InputError(f"Pauli sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: Mapping[int, str], sign: int = 1) -> PauliString:
        """Build from ``{qubit: letter}``; qubits not mentioned carry the identity."""
        letters = ["I"] * n_qubits
        for q, letter in ops.items():
            if not 1 <= q <= n_qubits:
                raise InputError(f"qubit {q} outside 1..{n_qubits}")
            letters[q - 1] = letter
        return cls("".join(letters), sign)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls("I" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def x_mask(self) -> int:
        """Index bits flipped by the string (X and Y positions)."""
        return self._mask("XY")

    @property
    def z_mask(self) -> int:
        """Index bits that contribute a sign (Z and Y positions)."""
        return self._mask("ZY")

    def _mask(self, chars: str) -> int:
        n = self.n_qubits
        mask = 0
        for q, letter in enumerate(self.letters, start=1):
            if letter in chars:
                mask |= 1 << (n - q)
        return mask

    def commutes_with(self, other: PauliString) -> bool:
        if other.n_qubits != self.n_qubits:
            raise InputError("Pauli strings act on different qubit counts")
        anti = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return anti % 2 == 0

    def __mul__(self, other: PauliString) -> PauliString:
        # Only commuting products are Hermitian, so the phase must come out real.
        if not self.commutes_with(other):
            raise InputError(f"{self} and {other} anticommute; product is not Hermitian")
        phase = 0  # power of i
        letters = []
        for a, b in zip(self.letters, other.letters):
            letter, p = _SINGLE_PRODUCT[a, b]
            letters.append(letter)
            phase += p
        phase %= 4
        sign = self.sign * other.sign * (1 if phase == 0 else -1)
        return PauliString("".join(letters), sign)

    def __neg__(self) -> PauliString:
        return PauliString(self.letters, -self.sign)

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for letter in self.letters:
            out = np.kron(out, PAULI_MATRICES[letter])
        return self.sign * out

    def __str__(self) -> str:
        body = " ".join(f"{ch}{q}" for q, ch in enumerate(self.letters, start=1) if ch != "I")
        return ("-" if self.sign < 0 else "") + (body or "I")


PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (letter, power of i) such that a @ b = i**power * letter
_SINGLE_PRODUCT: dict[tuple[str, str], tuple[str, int]] = {}
for _a in _PAULI_LETTERS:
    for _b in _PAULI_LETTERS:
        _prod = PAULI_MATRICES[_a] @ PAULI_MATRICES[_b]
        for _c in _PAULI_LETTERS:
            for _p, _ph in enumerate((1, 1j, -1, -1j)):
                if np.allclose(_prod, _ph * PAULI_MATRICES[_c]):
                    _SINGLE_PRODUCT[_a, _b] = (_c, _p)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True, eq=False)
class GateOp:
    """Unitary acting on ``targets`` (1-based, first target is the most significant)."""

    matrix: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        targets = tuple(int(t) for t in self.targets)
        if len(set(targets)) != len(targets):
            raise InputError(f"duplicate gate targets {targets}")
        if any(t < 1 for t in targets):
            raise InputError(f"gate targets must be >= 1, got {targets}")
        mat = np.array(self.matrix, dtype=complex)
        dim = 2 ** len(targets)
        if mat.shape != (dim, dim):
            raise InputError(f"matrix shape {mat.shape} does not match {len(targets)} targets")
        if not np.allclose(mat.conj().T @ mat, np.eye(dim), atol=ATOL, rtol=0):
            raise InputError("gate matrix is not unitary")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "targets", targets)


def hadamard(q: int) -> GateOp:
    return GateOp(HADAMARD, (q,))


def pauli_gate(letter: str, q: int) -> GateOp:
    return GateOp(PAULI_MATRICES[letter.upper()], (q,))


def cz(a: int, b: int) -> GateOp:
    return GateOp(CZ_MATRIX, (a, b))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(CNOT_MATRIX, (control, target))


def basis_state(n_qubits: int, bits: str) -> StateVector:
    if n_qubits < 1:
        raise InputError("n_qubits must be positive")
    if len(bits) != n_qubits or any(b not in "01" for b in bits):
        raise InputError(f"bit string {bits!r} is not {n_qubits} binary digits")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps)


def _apply_to_axes(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _check_targets(gate: GateOp, n: int) -> None:
    if max(gate.targets) > n:
        raise InputError(f"gate targets {gate.targets} exceed {n} qubits")


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    n = state.n_qubits
    _check_targets(gate, n)
    axes = [t - 1 for t in gate.targets]
    return StateVector(_apply_to_axes(state.tensor(), gate.matrix, axes).reshape(-1))


def apply_gates(state: StateVector, gates: Iterable[GateOp]) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def conjugate_density(rho: DensityMatrix, gate: GateOp) -> DensityMatrix:
    """Return ``U rho U^dagger`` for the gate's unitary ``U``."""
    n = rho.n_qubits
    _check_targets(gate, n)
    t = rho.matrix.reshape((2,) * (2 * n))
    rows = [q - 1 for q in gate.targets]
    cols = [n + q - 1 for q in gate.targets]
    t = _apply_to_axes(t, gate.matrix, rows)
    t = _apply_to_axes(t, gate.matrix.conj(), cols)
    return DensityMatrix(t.reshape(rho.dim, rho.dim))


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    masked = values & mask
    parity = np.zeros_like(masked)
    while mask:
        parity ^= masked & 1
        masked >>= 1
        mask >>= 1
    return parity


def _pauli_phases(obs: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Indices ``x`` and phases ``c(x)`` with ``P|x> = c(x)|x ^ x_mask>``."""
    idx = np.arange(2**obs.n_qubits)
    n_y = obs.letters.count("Y")
    signs = 1 - 2 * _parity(idx, obs.z_mask)
    return idx, obs.sign * (1j**n_y) * signs


def apply_pauli(state: StateVector, obs: PauliString) -> StateVector:
    if obs.n_qubits != state.n_qubits:
        raise InputError("Pauli string length does not match the state")
    idx, phases = _pauli_phases(obs)
    out = np.empty_like(state.amplitudes)
    out[idx ^ obs.x_mask] = phases * state.amplitudes
    return StateVector(out)


def expectation(state: State, obs: PauliString) -> float:
    """Real expectation value of a Pauli string on a pure or mixed state."""
    if obs.n_qubits != state.n_qubits:
        raise InputError(
            f"Pauli string on {obs.n_qubits} qubits used with a {state.n_qubits}-qubit state"
        )
    idx, phases = _pauli_phases(obs)
    flipped = idx ^ obs.x_mask
    if isinstance(state, StateVector):
        amps = state.amplitudes
        value = np.sum(amps[flipped].conj() * phases * amps)
    else:
        value = np.sum(phases * state.matrix[idx, flipped])
    if abs(value.imag) > ATOL:
        raise InputError(f"expectation has imaginary part {value.imag:.3g}")
    return float(value.real)


def project(
    state: StateVector, qubit: int, basis_vector: Sequence[complex]
) -> tuple[float, StateVector]:
    """Project ``qubit`` onto ``basis_vector``.

    Returns the branch probability and the renormalized post-measurement state
    (still on all ``n`` qubits, with ``qubit`` left in ``basis_vector``).
    Raises ZeroProbabilityError when the branch probability is at most 1e-12.
    """
    v = np.asarray(basis_vector, dtype=complex).reshape(-1)
    if v.shape != (2,) or abs(np.linalg.norm(v) - 1) > ATOL:
        raise InputError("basis vector must be a normalized 2-component vector")
    n = state.n_qubits
    if not 1 <= qubit <= n:
        raise InputError(f"qubit {qubit} outside 1..{n}")
    axis = qubit - 1
    reduced = np.tensordot(v.conj(), state.tensor(), axes=([0], [axis]))
    prob = float(np.vdot(reduced, reduced).real)
    if prob <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"projection of qubit {qubit} has probability {prob:.3g}")
    post = np.moveaxis(np.multiply.outer(v, reduced), 0, axis) / np.sqrt(prob)
    return prob, StateVector(post.reshape(-1))


def to_density(state: StateVector) -> DensityMatrix:
    amps = state.amplitudes
    return DensityMatrix(np.outer(amps, amps.conj()))


def mix(terms: Iterable[tuple[float, State]]) -> DensityMatrix:
    """Convex combination of density matrices (pure states are accepted too)."""
    terms = list(terms)
    if not terms:
        raise InputError("mix needs at least one term")
    weights = np.array([w for w, _ in terms], dtype=float)
    if np.any(weights < 0):
        raise InputError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1) > ATOL:
        raise InputError(f"mixture weights sum to {weights.sum():.12g}, expected 1")
    dims = {s.dim for _, s in terms}
    if len(dims) != 1:
        raise InputError("mixture terms have different dimensions")
    total = np.zeros((dims.pop(),) * 2, dtype=complex)
    for w, s in terms:
        rho = to_density(s) if isinstance(s, StateVector) else s
        total += w * rho.matrix
    return DensityMatrix(total)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    dim = 2**n_qubits
    return DensityMatrix(np.eye(dim) / dim)


def fidelity_pure(rho: DensityMatrix, target: StateVector) -> float:
    if rho.dim != target.dim:
        raise InputError("density matrix and target state dimensions differ")
    t = target.amplitudes
    value = np.vdot(t, rho.matrix @ t)
    if abs(value.imag) > ATOL:
        raise InputError("fidelity has a non-negligible imaginary part")
    return float(value.real)


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.dim != b.dim:
        raise InputError(f"cannot compare states of dimension {a.dim} and {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    return abs(overlap(a, b)) >= 1 - tol
