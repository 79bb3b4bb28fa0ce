"""Graph states, the six-qubit hyperentangled and E-cluster states, and frame changes.

Physical labels use the logical encoding E->0, I->1, H->0, V->1, r->0, l->1.
The cluster frame is the canonical simulation frame; the laboratory frame is
obtained by the fixed local unitary ``H4 . Z5 H5 . X6 H6``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    HADAMARD,
    PAULI_MATRICES,
    DensityMatrix,
    GateOp,
    InputError,
    PauliString,
    StateVector,
    apply_gates,
    basis_state,
    conjugate_density,
    cz,
)

N_CLUSTER_QUBITS = 6


class Photon(str, enum.Enum):
    A = "A"
    B = "B"


class DOF(str, enum.Enum):
    EI = "E/I momentum"
    POL = "polarization"
    RL = "r/l momentum"


@dataclass(frozen=True)
class QubitLabel:
    index: int

    def __post_init__(self) -> None:
        if not 1 <= self.index <= N_CLUSTER_QUBITS:
            raise InputError(f"qubit index {self.index} outside 1..6")

    @property
    def photon(self) -> Photon:
        return Photon.A if self.index <= 3 else Photon.B

    @property
    def dof(self) -> DOF:
        return (DOF.EI, DOF.POL, DOF.RL)[(self.index - 1) % 3]

    @property
    def symbols(self) -> tuple[str, str]:
        """Physical symbols for logical 0 and 1 on this qubit."""
        return {DOF.EI: ("E", "I"), DOF.POL: ("H", "V"), DOF.RL: ("r", "l")}[self.dof]


QUBIT_LABELS = {q: QubitLabel(q) for q in range(1, N_CLUSTER_QUBITS + 1)}


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]]):
        if n_vertices < 1:
            raise InputError("a graph needs at least one vertex")
        normalized = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise InputError(f"self-loop on vertex {a}")
            if not (1 <= a <= n_vertices and 1 <= b <= n_vertices):
                raise InputError(f"edge ({a}, {b}) outside 1..{n_vertices}")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "n_vertices", n_vertices)
        object.__setattr__(self, "edges", frozenset(normalized))

    def neighbors(self, v: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @classmethod
    def parse(cls, text: str, n_vertices: int | None = None) -> Graph:
        """Parse an edge list such as ``"1-4, 2-5, 3-6, 1-2, 2-3"``."""
        edges = []
        for item in text.replace(";", ",").split(","):
            item = item.strip()
            if not item:
                continue
            try:
                a, b = (int(part) for part in item.split("-"))
            except ValueError:
                raise InputError(f"cannot parse edge {item!r}; expected 'a-b'") from None
            edges.append((a, b))
        if not edges and n_vertices is None:
            raise InputError("empty edge list needs an explicit vertex count")
        if n_vertices is None:
            n_vertices = max(max(e) for e in edges)
        return cls(n_vertices, edges)

    def format(self) -> str:
        return ", ".join(f"{a}-{b}" for a, b in self.sorted_edges())


HE6_GRAPH = Graph(6, [(1, 4), (2, 5), (3, 6)])
E_GRAPH = Graph(6, [(1, 4), (2, 5), (3, 6), (1, 2), (2, 3)])


class Frame(str, enum.Enum):
    CLUSTER = "cluster"
    LABORATORY = "laboratory"


def graph_state(g: Graph, edge_order: Iterable[tuple[int, int]] | None = None) -> StateVector:
    """CZ on every edge applied to ``|+>^n``."""
    n = g.n_vertices
    plus = np.full(2**n, 2 ** (-n / 2), dtype=complex)
    edges = g.sorted_edges() if edge_order is None else list(edge_order)
    return apply_gates(StateVector(plus), (cz(a, b) for a, b in edges))


def stabilizers(g: Graph) -> list[PauliString]:
    """Generators ``K_i = X_i prod_{j in N(i)} Z_j`` in vertex order."""
    gens = []
    for v in range(1, g.n_vertices + 1):
        ops = {j: "Z" for j in g.neighbors(v)}
        ops[v] = "X"
        gens.append(PauliString.from_sparse(g.n_vertices, ops))
    return gens


def he6_cluster() -> StateVector:
    return graph_state(HE6_GRAPH)


def _pair_state(pairs: dict[tuple[int, int], dict[str, complex]]) -> StateVector:
    """Product of two-qubit states given as ``{(qa, qb): {"ab": amplitude}}``."""
    t = np.ones((2,) * N_CLUSTER_QUBITS, dtype=complex)
    for (qa, qb), amps in pairs.items():
        pair = np.zeros((2, 2), dtype=complex)
        for bits, amp in amps.items():
            pair[int(bits[0]), int(bits[1])] = amp
        shape = [1] * N_CLUSTER_QUBITS
        shape[qa - 1] = shape[qb - 1] = 2
        t = t * (pair if qa < qb else pair.T).reshape(shape)
    return StateVector(t.reshape(-1))


def he6_lab() -> StateVector:
    """Laboratory hyperentangled state: three Bell pairs on (1,4), (2,5), (3,6)."""
    r = 1 / np.sqrt(2)
    return _pair_state(
        {
            (1, 4): {"00": r, "11": r},
            (2, 5): {"00": r, "11": -r},
            (3, 6): {"01": r, "10": r},
        }
    )


def _vertical_links() -> list[GateOp]:
    return [cz(1, 2), cz(2, 3)]


def e_cluster() -> StateVector:
    return apply_gates(he6_cluster(), _vertical_links())


def e_lab() -> StateVector:
    return apply_gates(he6_lab(), _vertical_links())


def _ket(symbols: str) -> StateVector:
    """Basis ket from physical symbols in qubit order, e.g. ``"EHrEVl"``."""
    bits = []
    for q, sym in enumerate(symbols, start=1):
        zero, one = QUBIT_LABELS[q].symbols
        if sym not in (zero, one):
            raise InputError(f"symbol {sym!r} not valid for qubit {q}")
        bits.append("0" if sym == zero else "1")
    return basis_state(N_CLUSTER_QUBITS, "".join(bits))


def e_lab_expansion() -> StateVector:
    """Explicit four-term laboratory expansion over E/I, polarization Bell pairs and r/l.

    Each term is ``|x x>_{14} |phi^{+-}>_{25} |a b>_{36}``; built from kets
    independently of the CZ construction so the two can be cross-checked.
    """
    r = 1 / np.sqrt(2)

    def term(ei: str, phi_sign: int, rl: str) -> np.ndarray:
        # qubit order is 1 2 3 4 5 6 = EI_A pol_A rl_A EI_B pol_B rl_B
        hh = _ket(ei + "H" + rl[0] + ei + "H" + rl[1]).amplitudes
        vv = _ket(ei + "V" + rl[0] + ei + "V" + rl[1]).amplitudes
        return r * (hh + phi_sign * vv)

    amps = 0.5 * (
        term("E", -1, "rl") + term("E", +1, "lr") + term("I", +1, "rl") + term("I", -1, "lr")
    )
    return StateVector(amps)


# Single-qubit factors of the cluster->laboratory unitary H4 . Z5 H5 . X6 H6.
FRAME_UNITARIES: dict[int, np.ndarray] = {
    4: HADAMARD,
    5: PAULI_MATRICES["Z"] @ HADAMARD,
    6: PAULI_MATRICES["X"] @ HADAMARD,
}


def frame_gates(to: Frame) -> list[GateOp]:
    if to is Frame.LABORATORY:
        return [GateOp(u, (q,)) for q, u in FRAME_UNITARIES.items()]
    return [GateOp(u.conj().T, (q,)) for q, u in FRAME_UNITARIES.items()]


def frame_transform(state: StateVector, to: Frame | str) -> StateVector:
    """Move a six-qubit state from the other frame into ``to``."""
    to = Frame(to)
    if state.n_qubits != N_CLUSTER_QUBITS:
        raise InputError(f"frame transform needs 6 qubits, got {state.n_qubits}")
    return apply_gates(state, frame_gates(to))


def frame_transform_density(rho: DensityMatrix, to: Frame | str) -> DensityMatrix:
    to = Frame(to)
    if rho.n_qubits != N_CLUSTER_QUBITS:
        raise InputError(f"frame transform needs 6 qubits, got {rho.n_qubits}")
    for gate in frame_gates(to):
        rho = conjugate_density(rho, gate)
    return rho


def conjugate_pauli(obs: PauliString, unitaries: dict[int, np.ndarray]) -> PauliString:
    """Return ``U P U^dagger`` for a product of single-qubit Clifford unitaries."""
    letters = list(obs.letters)
    sign = obs.sign
    for q, u in unitaries.items():
        image = u @ PAULI_MATRICES[letters[q - 1]] @ u.conj().T
        for letter, mat in PAULI_MATRICES.items():
            if np.allclose(image, mat):
                letters[q - 1] = letter
                break
            if np.allclose(image, -mat):
                letters[q - 1] = letter
                sign = -sign
                break
        else:
            raise InputError(f"unitary on qubit {q} does not map Paulis to Paulis")
    return PauliString("".join(letters), sign)


def laboratory_generators(g: Graph = E_GRAPH) -> list[PauliString]:
    """Stabilizer generators of ``g`` conjugated into the laboratory frame."""
    return [conjugate_pauli(k, FRAME_UNITARIES) for k in stabilizers(g)]

