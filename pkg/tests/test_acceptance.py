"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``)
before asserting, so the summary reads the same whether or not it passes.
"""

import numpy as np
import pytest

from clusterdj.characterization import (
    bundled_reference_text,
    fidelity_lower_bound,
    parse_reference_tables,
    witness_expectation,
)
from clusterdj.core import equal_up_to_global_phase, expectation, fidelity_pure, mix
from clusterdj.deutsch import (
    FunctionClass,
    all_functions,
    classical_decide,
    classify,
    closed_form_state,
    dj_decide,
    dj_run,
)
from clusterdj.graphs import (
    E_GRAPH,
    Frame,
    e_cluster,
    e_lab,
    e_lab_expansion,
    frame_transform,
    frame_transform_density,
    stabilizers,
)
from clusterdj.mbqc import (
    FunctionKind,
    dj_pattern,
    empirical_distribution,
    enumerate_distribution,
    ff_distribution,
    logical_output,
    sample_outcomes,
    support,
    total_variation,
)
from clusterdj.noise import NoiseProfile, apply_profile, fit_profile, noisy_distribution, sample_noisy
from conftest import random_state


def report(number, title, passed, detail):
    print(f"\n{'PASS' if passed else 'FAIL'}  criterion {number} ({title}): {detail}")
    assert passed, detail


def test_criterion_1_ideal_determinism():
    expected = {FunctionKind.BALANCED: (1, 1, 1), FunctionKind.CONSTANT: (0, 0, 1)}
    details, ok = [], True
    for kind, target in expected.items():
        dist = enumerate_distribution(e_cluster(), dj_pattern(kind))
        branches = support(dist)
        p_target = sum(p for s, p in dist.items() if logical_output(s, kind) == target)
        equiprobable = all(abs(p - 1 / 8) < 1e-9 for p in branches.values())
        ok &= len(dist) == 64 and len(branches) == 8 and equiprobable and abs(p_target - 1) <= 1e-9
        details.append(f"{kind.value} P({''.join(map(str, target))})={p_target:.12f} on {len(branches)} branches")
    report(1, "ideal-execution determinism", ok, "; ".join(details))


def test_criterion_2_circuit_equivalence():
    worst_phase = max(
        0.0 if equal_up_to_global_phase(dj_run(f), closed_form_state(f), 1e-10) else 1.0 for f in all_functions(2)
    )
    promise = [f for f in all_functions(2) if classify(f) is not FunctionClass.NEITHER]
    decisions_ok = all(dj_decide(f) == (classify(f), 1) for f in promise)
    worst_queries = max(classical_decide(f)[1] for f in promise)
    ok = worst_phase == 0.0 and len(promise) == 8 and decisions_ok and worst_queries == 3
    detail = (
        f"16/16 closed-form matches={worst_phase == 0.0}, dj_decide correct with 1 call on "
        f"{len(promise)} promise functions={decisions_ok}, classical worst case={worst_queries} queries"
    )
    report(2, "circuit equivalence", ok, detail)


def test_criterion_3_state_construction():
    worst = max(abs(expectation(e_cluster(), k) - 1) for k in stabilizers(E_GRAPH))
    expansion = equal_up_to_global_phase(e_lab(), e_lab_expansion(), 1e-10)
    frame = equal_up_to_global_phase(e_lab(), frame_transform(e_cluster(), Frame.LABORATORY), 1e-10)
    ok = worst <= 1e-10 and expansion and frame
    detail = f"max |<K_i>-1|={worst:.1e}, four-term expansion={expansion}, frame transform={frame}"
    report(3, "state construction", ok, detail)


def test_criterion_4_witness_and_bound():
    rng = np.random.default_rng(4)
    w_ideal = witness_expectation(e_cluster())
    bound = fidelity_lower_bound(-0.333)
    violations = 0
    ideal = e_cluster()
    for trial in range(1000):
        states = [random_state(rng, 6) for _ in range(int(rng.integers(1, 4)))]
        weights = rng.dirichlet(np.ones(len(states)))
        if trial % 2 == 0:
            states.append(ideal)
            weights = np.append(0.3 * weights, 0.7)
        rho = mix(zip(weights, states))
        if fidelity_pure(rho, ideal) < fidelity_lower_bound(witness_expectation(rho)) - 1e-9:
            violations += 1
    ok = abs(w_ideal + 1) <= 1e-10 and abs(bound - 0.6665) <= 0.0005 and violations == 0
    detail = f"<W>_ideal={w_ideal:+.12f}, bound(-0.333)={bound:.4f}, soundness violations={violations}/1000"
    report(4, "witness and bound", ok, detail)


def test_criterion_5a_ei_dephasing():
    ns = apply_profile(e_cluster(), NoiseProfile(0.15, 0.0, 0.0))
    ff = ff_distribution(noisy_distribution(ns, dj_pattern("balanced")), "balanced")
    errors = {k: v for k, v in ff.items() if k != "111" and v > 1e-12}
    ok = set(errors) == {"011"} and abs(errors["011"] - 0.15) <= 0.005
    report(5, "noise reproduction (a)", ok, f"balanced error outputs {errors}")


def test_criterion_5b_table_fit():
    tables = parse_reference_tables(bundled_reference_text())
    details, ok = [], True
    for kind in FunctionKind:
        result = fit_profile(tables[kind].column("ff"), kind)
        ok &= result.tv_distance <= 0.08 and 0.12 <= result.profile.p_ei <= 0.20
        details.append(f"{kind.value} {result.profile.format()} TV={result.tv_distance:.4f}")
    report(5, "noise reproduction (b)", ok, "; ".join(details))


def test_criterion_6_sampling():
    shots, details, ok = 100_000, [], True
    for kind in FunctionKind:
        pattern = dj_pattern(kind)
        exact = enumerate_distribution(e_cluster(), pattern)
        first = sample_outcomes(e_cluster(), pattern, shots, seed=2024)
        again = sample_outcomes(e_cluster(), pattern, shots, seed=2024)
        tv = total_variation(empirical_distribution(first), exact)
        same = "".join(first).encode() == "".join(again).encode()
        ok &= tv <= 0.02 and same
        details.append(f"{kind.value} ideal TV={tv:.4f} repeat identical={same}")
    profile = NoiseProfile(0.16, 0.0, 0.105)
    pattern = dj_pattern("balanced")
    exact = noisy_distribution(apply_profile(e_cluster(), profile), pattern)
    first = sample_noisy(e_cluster(), profile, pattern, shots, seed=2024)
    again = sample_noisy(e_cluster(), profile, pattern, shots, seed=2024)
    tv = total_variation(empirical_distribution(first), exact)
    same = first == again
    ok &= tv <= 0.02 and same
    details.append(f"noisy balanced TV={tv:.4f} repeat identical={same}")
    report(6, "sampling soundness", ok, "; ".join(details))


@pytest.mark.parametrize("profile", [NoiseProfile(0, 0, 0), NoiseProfile(0.16, 0.14, 0.04)])
def test_criterion_7_frame_invariance(profile):
    worst = 0.0
    for kind in FunctionKind:
        pattern = dj_pattern(kind)
        rho = apply_profile(e_cluster(), profile).rho
        lab = frame_transform_density(rho, Frame.LABORATORY)
        a = noisy_distribution(rho, pattern)
        b = noisy_distribution(lab, pattern.in_frame(Frame.LABORATORY))
        worst = max(worst, max(abs(a[s] - b[s]) for s in a))
    report(7, "frame invariance", worst <= 1e-10, f"{profile.format()} max |dP|={worst:.1e}")
