"""End-to-end consistency checks behind ``clusterdj verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .characterization import witness_expectation
from .core import equal_up_to_global_phase, expectation
from .deutsch import (
    F_BALANCED,
    F_CONSTANT,
    all_functions,
    closed_form_state,
    dj_run,
)
from .graphs import (
    E_GRAPH,
    HE6_GRAPH,
    Frame,
    Graph,
    e_cluster,
    e_lab,
    e_lab_expansion,
    frame_transform,
    graph_state,
    he6_cluster,
    he6_lab,
    stabilizers,
)
from .mbqc import (
    FunctionKind,
    dj_pattern,
    enumerate_distribution,
    logical_output,
    outcome_probabilities,
    support,
)

TOL = 1e-10
DJ_FUNCTION = {FunctionKind.BALANCED: F_BALANCED, FunctionKind.CONSTANT: F_CONSTANT}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def format(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f": {self.detail}" if self.detail else "")


def _stabilizer_check(name: str, state, graph: Graph) -> CheckResult:
    values = [expectation(state, k) for k in stabilizers(graph)]
    worst = max(abs(v - 1) for v in values)
    return CheckResult(name, worst < TOL, f"max |<K_i> - 1| = {worst:.2e}")


def _pattern_check(kind: FunctionKind, cluster) -> list[CheckResult]:
    pattern = dj_pattern(kind)
    dist = support(enumerate_distribution(cluster, pattern))
    outputs = {logical_output(s, kind) for s in dist}
    equiprobable = bool(dist) and max(abs(p - 1 / 8) for p in dist.values()) < 1e-9
    results = [
        CheckResult(
            f"{kind.value} pattern branches",
            len(dist) == 8 and equiprobable,
            f"{len(dist)}/8 supported outcome branches",
        ),
        CheckResult(
            f"{kind.value} pattern feed-forward output",
            len(outputs) == 1,
            "logical output " + ", ".join("".join(map(str, o)) for o in sorted(outputs)),
        ),
    ]
    # gate-model reference: the logical output must be the computational state dj_run produces
    reference = dj_run(DJ_FUNCTION[kind]).probabilities()
    agree = len(outputs) == 1 and abs(reference[int("".join(map(str, *outputs)), 2)] - 1) < TOL
    results.append(CheckResult(f"{kind.value} pattern matches gate-model circuit", agree))
    lab = frame_transform(cluster, Frame.LABORATORY)
    diff = np.abs(
        outcome_probabilities(lab, pattern.in_frame(Frame.LABORATORY))
        - outcome_probabilities(cluster, pattern)
    ).max()
    results.append(
        CheckResult(f"{kind.value} laboratory-frame execution", diff < TOL, f"max diff {diff:.2e}")
    )
    return results


def run_checks(edges: Graph | None = None) -> list[CheckResult]:
    """Run every check; ``edges`` replaces the E-graph edge set used to build the cluster."""
    cluster = e_cluster() if edges is None else graph_state(edges)
    results = [
        _stabilizer_check("HE6 stabilizers", he6_cluster(), HE6_GRAPH),
        _stabilizer_check("E cluster stabilizers", cluster, E_GRAPH),
        CheckResult(
            "E cluster equals graph state of the E graph",
            equal_up_to_global_phase(cluster, graph_state(E_GRAPH), TOL),
        ),
        CheckResult(
            "laboratory HE6 equals frame transform of HE6",
            equal_up_to_global_phase(he6_lab(), frame_transform(he6_cluster(), Frame.LABORATORY), TOL),
        ),
        CheckResult(
            "CZ12 CZ23 on laboratory HE6 matches four-term expansion",
            equal_up_to_global_phase(e_lab(), e_lab_expansion(), TOL),
        ),
        CheckResult(
            "frame transform of E cluster matches four-term expansion",
            equal_up_to_global_phase(frame_transform(cluster, Frame.LABORATORY), e_lab_expansion(), TOL),
        ),
    ]
    w = witness_expectation(cluster)
    results.append(CheckResult("ideal witness equals -1", abs(w + 1) < TOL, f"<W> = {w:.6f}"))
    for kind in FunctionKind:
        results += _pattern_check(kind, cluster)
    worst = 0.0
    for f in all_functions(2):
        worst = max(worst, 1 - abs(np.vdot(closed_form_state(f).amplitudes, dj_run(f).amplitudes)))
    results.append(
        CheckResult("circuit equals closed form for all 16 functions", worst < TOL, f"max 1-|<a|b>| = {worst:.2e}")
    )
    return results
