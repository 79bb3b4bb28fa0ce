"""Stabilizer witness, fidelity bound and output-probability tables."""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import InputError, PauliString, State, ZeroProbabilityError, expectation
from .graphs import E_GRAPH, FRAME_UNITARIES, Frame, conjugate_pauli, stabilizers
from .mbqc import ROW_LABELS, FunctionKind, ff_distribution, no_ff_filter, oracle_zero_probability

EXPECTED_ROW = {FunctionKind.BALANCED: "111", FunctionKind.CONSTANT: "001"}


@dataclass(frozen=True)
class WitnessSpec:
    """Generators split into the two colour classes of a bipartite graph.

    The witness is ``3 - 2 (prod_even (g + 1)/2 + prod_odd (g + 1)/2)``.
    """

    odd_generators: tuple[PauliString, ...]
    even_generators: tuple[PauliString, ...]

    def __post_init__(self) -> None:
        odd, even = tuple(self.odd_generators), tuple(self.even_generators)
        gens = odd + even
        if not odd or not even:
            raise InputError("both generator groups must be non-empty")
        if len({g.n_qubits for g in gens}) != 1:
            raise InputError("generators act on different qubit counts")
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                if not a.commutes_with(b):
                    raise InputError(f"generators {a} and {b} do not commute")
        object.__setattr__(self, "odd_generators", odd)
        object.__setattr__(self, "even_generators", even)

    @property
    def n_qubits(self) -> int:
        return self.odd_generators[0].n_qubits


def e_cluster_witness(frame: Frame | str = Frame.CLUSTER) -> WitnessSpec:
    """Witness for the E cluster; in the laboratory frame the generators are conjugated."""
    gens = stabilizers(E_GRAPH)
    if Frame(frame) is Frame.LABORATORY:
        gens = [conjugate_pauli(g, FRAME_UNITARIES) for g in gens]
    return WitnessSpec(tuple(gens[0::2]), tuple(gens[1::2]))


@functools.lru_cache(maxsize=None)
def _projector_terms(generators: tuple[PauliString, ...]) -> tuple[tuple[float, PauliString], ...]:
    # prod_k (g_k + 1)/2 = 2^-m sum over subsets of the product of the subset
    m = len(generators)
    products = [PauliString.identity(generators[0].n_qubits)]
    for g in generators:
        products += [p * g for p in products]
    return tuple((2.0**-m, p) for p in products)


def witness_terms(spec: WitnessSpec) -> list[tuple[float, PauliString]]:
    """The witness as ``[(coefficient, Pauli string)]``; constant term uses the identity."""
    n = spec.n_qubits
    terms = [(3.0, PauliString.identity(n))]
    for group in (spec.even_generators, spec.odd_generators):
        terms += [(-2.0 * c, p) for c, p in _projector_terms(group)]
    return terms


def witness_expectation(rho: State, spec: WitnessSpec | None = None) -> float:
    spec = spec or e_cluster_witness()
    if rho.n_qubits != spec.n_qubits:
        raise InputError("witness and state qubit counts differ")
    return sum(c * expectation(rho, p) for c, p in witness_terms(spec))


def fidelity_lower_bound(w: float) -> float:
    return (1.0 - w) / 2.0


@dataclass(frozen=True)
class TableRow:
    label: str
    no_ff: float | None
    ff: float | None
    no_ff_err: float | None = None
    ff_err: float | None = None
    expected: bool = False


@dataclass(frozen=True)
class OutputTable:
    kind: FunctionKind
    rows: tuple[TableRow, ...]

    def __post_init__(self) -> None:
        labels = tuple(r.label for r in self.rows)
        if labels != ROW_LABELS:
            raise InputError(f"table rows must be {ROW_LABELS}, got {labels}")
        for column in ("no_ff", "ff"):
            values = [getattr(r, column) for r in self.rows]
            if all(v is not None for v in values) and abs(sum(values) - 1) > 0.01:
                raise InputError(f"{column} column sums to {sum(values):.4f}")

    def column(self, name: str) -> dict[str, float] | None:
        values = {r.label: getattr(r, name) for r in self.rows}
        return None if any(v is None for v in values.values()) else values

    def to_records(self) -> list[dict]:
        records = []
        for r in self.rows:
            rec = {"row_label": r.label, "no_ff": r.no_ff, "ff": r.ff}
            if r.no_ff_err is not None or r.ff_err is not None:
                rec["no_ff_err"] = r.no_ff_err
                rec["ff_err"] = r.ff_err
            records.append(rec)
        return records

    def to_text(self) -> str:
        title = "Balanced function f_B" if self.kind is FunctionKind.BALANCED else "Constant function f_C"
        lines = [title, f"{'Output':<8}{'No-FF(%)':>16}{'FF(%)':>16}"]
        for r in self.rows:
            cells = [_cell(r.no_ff, r.no_ff_err, r.expected), _cell(r.ff, r.ff_err, r.expected)]
            lines.append(f"|{r.label}>  " + "".join(f"{c:>16}" for c in cells))
        return "\n".join(lines) + "\n"


def _cell(p: float | None, err: float | None, bold: bool) -> str:
    if p is None:
        return "n/a"
    text = f"{100 * p:.1f}"
    if err is not None:
        text += f"±{100 * err:.1f}"
    return f"**{text}**" if bold else text


_ROW_RE = re.compile(r"^\|([01]{3})>\s+(\S+)\s+(\S+)\s*$")


def parse_text_table(text: str) -> dict[str, tuple[float | None, float | None]]:
    """Read back ``{label: (no_ff, ff)}`` probabilities from :meth:`OutputTable.to_text`."""

    def value(cell: str) -> float | None:
        cell = cell.strip("*")
        if cell == "n/a":
            return None
        return float(cell.split("±")[0]) / 100

    rows = {}
    for line in text.splitlines():
        m = _ROW_RE.match(line.strip())
        if m:
            rows[m.group(1)] = (value(m.group(2)), value(m.group(3)))
    return rows


def render_table(
    dist: Mapping[str, float], kind: FunctionKind | str, shots: int | None = None
) -> OutputTable:
    """Output table: feed-forward column over all outcomes, No-FF column conditioned.

    ``shots`` (for sampled distributions) adds binomial standard errors.
    """
    kind = FunctionKind(kind)
    ff = ff_distribution(dist, kind)
    try:
        no_ff = no_ff_filter(dist, kind)
        kept = oracle_zero_probability(dist, kind)
    except ZeroProbabilityError:
        no_ff, kept = None, 0.0
    rows = []
    for label in ROW_LABELS:
        ff_err = no_ff_err = None
        if shots:
            ff_err = _binomial_err(ff[label], shots)
            if no_ff is not None:
                no_ff_err = _binomial_err(no_ff[label], shots * kept)
        rows.append(
            TableRow(
                label,
                None if no_ff is None else no_ff[label],
                ff[label],
                no_ff_err,
                ff_err,
                expected=label == EXPECTED_ROW[kind],
            )
        )
    return OutputTable(kind, tuple(rows))


def _binomial_err(p: float, n: float) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n > 0 else float("nan")


def table_from_columns(
    kind: FunctionKind | str, no_ff: Sequence[float] | None, ff: Sequence[float] | None
) -> OutputTable:
    kind = FunctionKind(kind)
    rows = tuple(
        TableRow(
            label,
            None if no_ff is None else float(no_ff[i]),
            None if ff is None else float(ff[i]),
            expected=label == EXPECTED_ROW[kind],
        )
        for i, label in enumerate(ROW_LABELS)
    )
    return OutputTable(kind, rows)


def parse_reference_tables(
    text: str, kind: FunctionKind | str | None = None
) -> dict[FunctionKind, OutputTable]:
    """Parse reference tables of 8 lines ``label p_noff p_ff`` each.

    Sections are introduced by ``[balanced]`` / ``[constant]``; a file without
    section headers holds a single table for ``kind``. Labels may be written
    ``011`` or ``|011>``; ``#`` starts a comment.
    """
    sections: dict[FunctionKind | None, list[tuple[str, float, float]]] = {}
    current = None if kind is None else FunctionKind(kind)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = re.fullmatch(r"\[(\w+)\]", line)
        if header:
            try:
                current = FunctionKind(header.group(1).lower())
            except ValueError:
                raise InputError(f"line {lineno}: unknown section {header.group(1)!r}") from None
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected 'label p_noff p_ff', got {raw!r}")
        label = parts[0].strip("|>")
        try:
            p_noff, p_ff = float(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"line {lineno}: probabilities must be numbers") from None
        if not (0 <= p_noff <= 1 and 0 <= p_ff <= 1):
            raise InputError(f"line {lineno}: probabilities must lie in [0, 1]")
        sections.setdefault(current, []).append((label, p_noff, p_ff))
    if not sections:
        raise InputError("reference table is empty")
    if None in sections:
        raise InputError("table without a [balanced]/[constant] header and no function given")
    tables = {}
    for k, rows in sections.items():
        labels = [r[0] for r in rows]
        if sorted(labels) != list(ROW_LABELS) or len(labels) != 8:
            raise InputError(f"{k.value} table must list rows {', '.join(ROW_LABELS)} once each")
        by_label = {r[0]: r for r in rows}
        tables[k] = table_from_columns(
            k,
            [by_label[lab][1] for lab in ROW_LABELS],
            [by_label[lab][2] for lab in ROW_LABELS],
        )
    return tables


def bundled_reference_text() -> str:
    from importlib import resources

    return resources.files("clusterdj").joinpath("data/measured_outputs.txt").read_text()
