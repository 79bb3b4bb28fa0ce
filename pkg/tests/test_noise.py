import itertools
import math

import numpy as np
import pytest

from clusterdj.core import (
    PAULI_MATRICES,
    DensityMatrix,
    InputError,
    PauliString,
    StateVector,
    apply_pauli,
    expectation,
    fidelity_pure,
    maximally_mixed,
    to_density,
)
from clusterdj.graphs import e_cluster, he6_lab
from clusterdj.mbqc import (
    ROW_LABELS,
    FunctionKind,
    dj_pattern,
    empirical_distribution,
    enumerate_distribution,
    ff_distribution,
    total_variation,
)
from clusterdj.noise import (
    NoiseProfile,
    apply_profile,
    dephase_channel,
    fit_profile,
    noisy_distribution,
    sample_noisy,
)
from conftest import random_state

R = 1 / math.sqrt(2)


def dense_z(n, q):
    out = np.array([[1.0]])
    for k in range(1, n + 1):
        out = np.kron(out, PAULI_MATRICES["Z"] if k == q else np.eye(2))
    return out


def projector_trace_distribution(rho, pattern):
    """Tr(P_s rho) with every 64x64 projector built explicitly."""
    dist = {}
    for bits in itertools.product((0, 1), repeat=6):
        vec = np.array([1.0 + 0j])
        for q in range(1, 7):
            vec = np.kron(vec, pattern.step(q).basis.vectors[bits[q - 1]])
        proj = np.outer(vec, vec.conj())
        dist["".join(map(str, bits))] = float(np.real(np.trace(proj @ rho.matrix)))
    return dist


def flip_mixture_distribution(state, profile, pattern):
    """Average of pure-state distributions over Z-flip trajectories on qubits 1-3."""
    total = dict.fromkeys((f"{i:06b}" for i in range(64)), 0.0)
    for flips in itertools.product((0, 1), repeat=3):
        weight = 1.0
        ops = {}
        for q, z, p in zip((1, 2, 3), flips, profile.probabilities):
            weight *= p if z else 1 - p
            if z:
                ops[q] = "Z"
        psi = apply_pauli(state, PauliString.from_sparse(6, ops)) if ops else state
        for k, v in enumerate_distribution(psi, pattern).items():
            total[k] += weight * v
    return total


class TestProfile:
    def test_parse_and_format(self):
        p = NoiseProfile.parse("noise=pEI:0.15,pPol:0.04,pRl:0.01")
        assert p == NoiseProfile(0.15, 0.04, 0.01)
        assert NoiseProfile.parse(p.format()) == p

    def test_visibility_mapping(self):
        p = NoiseProfile.from_visibilities(0.70)
        assert p.p_ei == pytest.approx(0.15)
        assert p.visibilities[0] == pytest.approx(0.70)

    @pytest.mark.parametrize("text", ["pEI:0.6", "pEI:-0.1", "foo:0.1", "pEI=0.1", "pEI:x"])
    def test_invalid(self, text):
        with pytest.raises(InputError):
            NoiseProfile.parse(text)


class TestDephaseChannel:
    def test_zero_is_identity(self, rng):
        rho = to_density(random_state(rng, 3))
        np.testing.assert_array_equal(dephase_channel(rho, 2, 0.0).matrix, rho.matrix)

    def test_matches_kraus_form(self, rng):
        rho = to_density(random_state(rng, 3))
        for q, p in [(1, 0.1), (2, 0.37), (3, 0.5)]:
            z = dense_z(3, q)
            expected = (1 - p) * rho.matrix + p * z @ rho.matrix @ z
            np.testing.assert_allclose(dephase_channel(rho, q, p).matrix, expected, atol=1e-14)

    def test_full_dephasing_of_bell_pair(self):
        bell = to_density(StateVector([R, 0, 0, R]))
        out = dephase_channel(bell, 1, 0.5)
        np.testing.assert_allclose(out.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_visibility_on_ei_pair(self):
        rho = dephase_channel(to_density(he6_lab()), 1, 0.15)
        xx = PauliString.from_sparse(6, {1: "X", 4: "X"})
        assert expectation(to_density(he6_lab()), xx) == pytest.approx(1.0)
        assert expectation(rho, xx) == pytest.approx(0.70, abs=1e-12)

    def test_diagonal_preserved_and_valid(self, rng):
        rho = to_density(random_state(rng, 4))
        out = dephase_channel(rho, 3, 0.23)
        np.testing.assert_array_equal(out.diagonal(), rho.diagonal())
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-9

    def test_out_of_range(self):
        with pytest.raises(InputError):
            dephase_channel(maximally_mixed(1), 1, 0.51)


class TestNoisyDistribution:
    def test_noiseless_matches_pure(self):
        for kind in FunctionKind:
            pattern = dj_pattern(kind)
            noisy = noisy_distribution(apply_profile(e_cluster(), NoiseProfile()), pattern)
            pure = enumerate_distribution(e_cluster(), pattern)
            assert max(abs(noisy[k] - pure[k]) for k in pure) < 1e-12

    def test_noiseless_fidelity_one(self):
        ns = apply_profile(e_cluster(), NoiseProfile())
        assert fidelity_pure(ns.rho, e_cluster()) == pytest.approx(1.0)

    def test_matches_projector_traces(self):
        ns = apply_profile(e_cluster(), NoiseProfile(0.12, 0.3, 0.07))
        for kind in FunctionKind:
            pattern = dj_pattern(kind)
            fast = noisy_distribution(ns, pattern)
            slow = projector_trace_distribution(ns.rho, pattern)
            assert max(abs(fast[k] - slow[k]) for k in slow) < 1e-12
            assert sum(fast.values()) == pytest.approx(1.0, abs=1e-9)

    def test_matches_flip_mixture(self):
        profile = NoiseProfile(0.2, 0.1, 0.05)
        for kind in FunctionKind:
            pattern = dj_pattern(kind)
            fast = noisy_distribution(apply_profile(e_cluster(), profile), pattern)
            slow = flip_mixture_distribution(e_cluster(), profile, pattern)
            assert max(abs(fast[k] - slow[k]) for k in slow) < 1e-12

    def test_maximally_mixed_uniform(self):
        dist = noisy_distribution(maximally_mixed(6), dj_pattern("balanced"))
        assert all(p == pytest.approx(1 / 64) for p in dist.values())

    @pytest.mark.parametrize("kind, target, flipped", [("balanced", "111", "011"), ("constant", "001", "101")])
    def test_ei_dephasing_flips_first_logical_bit(self, kind, target, flipped):
        ns = apply_profile(e_cluster(), NoiseProfile(0.15, 0, 0))
        ff = ff_distribution(noisy_distribution(ns, dj_pattern(kind)), kind)
        assert ff[target] == pytest.approx(0.85, abs=1e-12)
        assert ff[flipped] == pytest.approx(0.15, abs=1e-12)
        assert sum(v for k, v in ff.items() if k not in (target, flipped)) < 1e-12

    def test_polarization_dephasing_is_invisible_to_both_patterns(self):
        # Z2 acts on the cluster like X5, and qubits 2 and 5 are read in the Z and X bases
        for kind in FunctionKind:
            pattern = dj_pattern(kind)
            a = noisy_distribution(apply_profile(e_cluster(), NoiseProfile(0.1, 0.0, 0.05)), pattern)
            b = noisy_distribution(apply_profile(e_cluster(), NoiseProfile(0.1, 0.4, 0.05)), pattern)
            assert max(abs(a[k] - b[k]) for k in a) < 1e-12


class TestProperties:
    def test_channel_outputs_valid(self):
        grid = [0.0, 0.1, 0.25, 0.5]
        for p in itertools.product(grid, repeat=3):
            rho = apply_profile(e_cluster(), NoiseProfile(*p)).rho
            assert isinstance(rho, DensityMatrix)
            np.testing.assert_array_equal(rho.diagonal(), to_density(e_cluster()).diagonal())

    def test_fidelity_monotone(self):
        grid = np.linspace(0, 0.5, 6)
        for axis in range(3):
            for base in itertools.product((0.0, 0.2), repeat=2):
                values = []
                for p in grid:
                    probs = list(base)
                    probs.insert(axis, p)
                    ns = apply_profile(e_cluster(), NoiseProfile(*probs))
                    values.append(fidelity_pure(ns.rho, e_cluster()))
                assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_dominant_error_is_first_logical_bit(self, rng):
        for _ in range(30):
            p_ei = rng.uniform(0.02, 0.5)
            p_pol, p_rl = rng.uniform(0.001, p_ei, size=2)
            ns = apply_profile(e_cluster(), NoiseProfile(p_ei, p_pol, p_rl))
            ff = ff_distribution(noisy_distribution(ns, dj_pattern("balanced")), "balanced")
            errors = {k: v for k, v in ff.items() if k != "111"}
            assert max(errors, key=errors.get) == "011"

    def test_monte_carlo_matches_exact(self):
        profile = NoiseProfile(0.15, 0.05, 0.08)
        pattern = dj_pattern("balanced")
        exact = noisy_distribution(apply_profile(e_cluster(), profile), pattern)
        emp = empirical_distribution(sample_noisy(e_cluster(), profile, pattern, 100_000, seed=3))
        assert total_variation(emp, exact) < 0.02

    def test_sample_noisy_reproducible(self):
        profile = NoiseProfile(0.15, 0.05, 0.08)
        pattern = dj_pattern("constant")
        assert sample_noisy(e_cluster(), profile, pattern, 200, 9) == sample_noisy(
            e_cluster(), profile, pattern, 200, 9
        )


def _model_ff(profile, kind):
    dist = noisy_distribution(apply_profile(e_cluster(), profile), dj_pattern(kind))
    return ff_distribution(dist, kind)


class TestFit:
    @pytest.mark.parametrize("kind", list(FunctionKind))
    def test_round_trip(self, kind):
        truth = NoiseProfile(0.15, 0.04, 0.01)
        ref = _model_ff(truth, kind)
        result = fit_profile(ref, kind)
        assert result.tv_distance < 1e-9
        assert result.profile.p_ei == pytest.approx(0.15, abs=0.005)
        assert result.profile.p_rl == pytest.approx(0.01, abs=0.005)
        # p_pol does not affect either pattern, so the tie-break picks the smallest value
        assert result.profile.p_pol == 0.0
        assert total_variation(_model_ff(result.profile, kind), ref) < 1e-9

    @pytest.mark.parametrize("kind", list(FunctionKind))
    def test_model_matches_density_route(self, kind):
        ref = [0.01, 0.03, 0.01, 0.14, 0.01, 0.03, 0.01, 0.76]
        if kind is FunctionKind.CONSTANT:
            ref = [0.01, 0.76, 0.01, 0.03, 0.01, 0.14, 0.01, 0.03]
        result = fit_profile(ref, kind)
        direct = _model_ff(result.profile, kind)
        assert max(abs(direct[k] - result.model[k]) for k in ROW_LABELS) < 1e-12
        assert total_variation(direct, dict(zip(ROW_LABELS, ref))) == pytest.approx(result.tv_distance, abs=1e-12)

    def test_grid_is_exhaustive(self):
        # coarse grid: the returned TV must be the minimum over an explicit loop
        ref = dict(zip(ROW_LABELS, [0.02, 0.05, 0.0, 0.13, 0.0, 0.05, 0.0, 0.75]))
        result = fit_profile(ref, "balanced", step=0.05, upper=0.3)
        grid = np.round(np.arange(7) * 0.05, 12)
        best = min(
            total_variation(_model_ff(NoiseProfile(a, b, c), "balanced"), ref)
            for a in grid
            for b in grid[:2]
            for c in grid
        )
        assert result.tv_distance == pytest.approx(best, abs=1e-12)

    @pytest.mark.parametrize("ref", [[0.5] * 8, [0.1] * 7, {"000": 1.0}, [-0.1, 0.1, 0, 0, 0, 0, 0, 1.0]])
    def test_malformed_reference(self, ref):
        with pytest.raises(InputError):
            fit_profile(ref, "balanced")
