"""Tests for the state-vector layer."""

import math

import pytest

from src.hgsa.components import atom_prepare_plus, make_hwp
from src.hgsa.errors import (
    ArgumentError,
    CompositionError,
    ModeSpecError,
    PreconditionError,
)
from src.hgsa.hilbert import (
    AtomId,
    Dof,
    MeasurementBasis,
    ModeSpec,
    PhotonDof,
    StateVector,
    apply_op,
    derive_seed,
    discard,
    fidelity,
    inner,
    measure,
    outcome_distribution,
    photon_dofs,
    product_state,
    random_state,
    superpose,
    tensor,
)
from src.hgsa.protocol import build_tesa, evolve, sample_detection
from src.hgsa.states import GhzDof, GhzLabel, make_ghz, make_hyper, parse_label

S = 1 / math.sqrt(2)
POL0 = PhotonDof(0, Dof.POL)
POL1 = PhotonDof(1, Dof.POL)


@pytest.mark.unit
class TestModeSpec:
    """Test ModeSpec bounds and helpers."""

    def test_dimension(self):
        assert ModeSpec(3).dimension == 16**3
        assert ModeSpec(3, atom_count=3).dimension == 16**3 * 8
        assert ModeSpec(2, time_slots=2, paths_per_photon=1).dimension == 4**2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"photon_count": 0},
            {"photon_count": 7},
            {"photon_count": 2, "time_slots": 1},
            {"photon_count": 2, "time_slots": 5},
            {"photon_count": 2, "paths_per_photon": 3},
            {"photon_count": 2, "atom_count": 7},
        ],
    )
    def test_bounds(self, kwargs):
        with pytest.raises(ModeSpecError):
            ModeSpec(**kwargs)

    def test_levels(self):
        spec = ModeSpec(1, time_slots=3)
        assert spec.levels(POL0) == (0, 1)
        assert spec.levels(PhotonDof(0, Dof.SLOT)) == (0, 1, 2)
        assert spec.levels(PhotonDof(0, Dof.PATH)) == (1, 2)
        assert spec.levels(AtomId(0)) == (0, 1)

    def test_contains(self):
        spec = ModeSpec(2, atom_count=1)
        assert spec.contains(POL1)
        assert not spec.contains(PhotonDof(2, Dof.POL))
        assert spec.contains(AtomId(0))
        assert not spec.contains(AtomId(1))

    def test_layouts(self):
        spec = ModeSpec(2, atom_count=2)
        assert spec.photon_layout() == photon_dofs(0) + photon_dofs(1)
        assert spec.full_layout()[-2:] == (AtomId(0), AtomId(1))

    def test_merge_rejects_different_lattices(self):
        with pytest.raises(CompositionError):
            ModeSpec(1, time_slots=2).merge(ModeSpec(1, time_slots=4))

    def test_compatible_ignores_atoms(self):
        assert ModeSpec(3).compatible(ModeSpec(3, atom_count=3))
        assert not ModeSpec(3).compatible(ModeSpec(2))


@pytest.mark.unit
class TestStateVector:
    """Test StateVector construction and accessors."""

    def test_rejects_unnormalized(self):
        with pytest.raises(ArgumentError):
            StateVector(ModeSpec(1), (POL0,), {(0,): 1.0, (1,): 1.0})

    def test_from_terms_normalizes(self):
        state = StateVector.from_terms(ModeSpec(1), (POL0,), {(0,): 1.0, (1,): 1.0})
        assert math.isclose(state.norm(), 1.0)
        assert math.isclose(abs(state.amplitude((0,))), S)

    def test_from_terms_rejects_bad_key(self):
        with pytest.raises(ArgumentError):
            StateVector.from_terms(ModeSpec(1), (PhotonDof(0, Dof.PATH),), {(0,): 1.0})

    def test_tiny_amplitudes_dropped(self):
        state = StateVector(ModeSpec(1), (POL0,), {(0,): 1.0, (1,): 1e-15})
        assert len(state) == 1

    def test_layout_outside_spec(self):
        with pytest.raises(CompositionError):
            StateVector(ModeSpec(1), (POL1,), {(0,): 1.0})

    def test_duplicate_layout(self):
        with pytest.raises(CompositionError):
            StateVector(ModeSpec(1), (POL0, POL0), {(0, 0): 1.0})

    def test_reorder_keeps_amplitudes(self):
        spec = ModeSpec(2)
        state = StateVector(spec, (POL0, POL1), {(0, 1): S, (1, 0): -S})
        swapped = state.reorder((POL1, POL0))
        assert swapped.amplitude((1, 0)) == pytest.approx(S)
        assert swapped.amplitude((0, 1)) == pytest.approx(-S)

    def test_support_values(self, hyper_state):
        assert hyper_state.support_values(PhotonDof(0, Dof.SLOT)) == {0, 1}
        assert hyper_state.support_values(PhotonDof(2, Dof.PATH)) == {1}

    def test_ket(self):
        state = product_state(ModeSpec(1), {POL0: 1, PhotonDof(0, Dof.SLOT): 1})
        assert state.ket((1, 1)) == "|V,L>"

    def test_amplitudes_read_only(self):
        state = product_state(ModeSpec(1), {POL0: 0})
        with pytest.raises(TypeError):
            state.amplitudes[(1,)] = 1.0


@pytest.mark.unit
class TestComposition:
    """Test tensor, apply_op and inner products."""

    def test_tensor(self):
        spec = ModeSpec(2)
        a = StateVector(spec, (POL0,), {(0,): S, (1,): S})
        b = product_state(spec, {POL1: 1})
        joint = tensor(a, b)
        assert joint.layout == (POL0, POL1)
        assert joint.amplitude((1, 1)) == pytest.approx(S)

    def test_tensor_overlap(self):
        spec = ModeSpec(1)
        a = product_state(spec, {POL0: 0})
        with pytest.raises(CompositionError):
            tensor(a, a)

    def test_apply_flip(self):
        state = product_state(ModeSpec(1), {POL0: 0})
        flipped = apply_op(state, make_hwp(0, "flip"))
        assert flipped.amplitude((1,)) == pytest.approx(1.0)

    def test_apply_unbound_subsystem(self):
        state = product_state(ModeSpec(2), {POL0: 0})
        with pytest.raises(CompositionError):
            apply_op(state, make_hwp(1))

    def test_fidelity_ignores_global_phase(self):
        spec = ModeSpec(1)
        a = StateVector(spec, (POL0,), {(0,): S, (1,): S})
        b = StateVector(spec, (POL0,), {(0,): -S, (1,): -S})
        assert fidelity(a, b) == pytest.approx(1.0)
        assert inner(a, b) == pytest.approx(-1.0)

    def test_fidelity_reorders(self):
        spec = ModeSpec(2)
        a = StateVector(spec, (POL0, POL1), {(0, 1): 1.0})
        b = StateVector(spec, (POL1, POL0), {(1, 0): 1.0})
        assert fidelity(a, b) == pytest.approx(1.0)

    def test_fidelity_different_subsystems(self):
        spec = ModeSpec(2)
        with pytest.raises(CompositionError):
            fidelity(product_state(spec, {POL0: 0}), product_state(spec, {POL1: 0}))

    def test_superpose(self):
        spec = ModeSpec(1)
        h = product_state(spec, {POL0: 0})
        v = product_state(spec, {POL0: 1})
        plus = superpose([(1.0, h), (1.0, v)])
        assert plus.amplitude((0,)) == pytest.approx(S)
        with pytest.raises(ArgumentError):
            superpose([])


@pytest.mark.unit
class TestMeasurement:
    """Test Born-rule sampling and post-measurement states."""

    def test_outcome_distribution(self):
        ghz = make_ghz(GhzLabel(GhzDof.POLARIZATION, "+", "001"), ModeSpec(3))
        layout = ghz.layout
        distribution = outcome_distribution(ghz, layout)
        assert list(distribution) == [(0, 0, 1), (1, 1, 0)]
        assert sum(distribution.values()) == pytest.approx(1.0)

    def test_measure_is_seeded(self):
        ghz = make_ghz(GhzLabel(GhzDof.POLARIZATION, "-", "000"), ModeSpec(3))
        first, _ = measure(ghz, (ghz.layout[0],), rng_seed=123)
        second, _ = measure(ghz, (ghz.layout[0],), rng_seed=123)
        assert first == second

    def test_measure_collapses(self):
        ghz = make_ghz(GhzLabel(GhzDof.POLARIZATION, "+", "000"), ModeSpec(3))
        outcome, post = measure(ghz, (ghz.layout[0],), rng_seed=5)
        assert outcome.probability == pytest.approx(0.5)
        assert len(post) == 1
        (key,) = post.amplitudes
        assert set(key) == {outcome.values[0]}
        assert outcome.labels == ("HV"[outcome.values[0]],)

    def test_both_outcomes_reachable(self):
        ghz = make_ghz(GhzLabel(GhzDof.POLARIZATION, "+", "000"), ModeSpec(3))
        seen = {measure(ghz, (ghz.layout[0],), rng_seed=s)[0].values for s in range(32)}
        assert seen == {(0,), (1,)}

    def test_measure_argument_errors(self):
        state = product_state(ModeSpec(1), {POL0: 0})
        with pytest.raises(ArgumentError):
            measure(state, ())
        with pytest.raises(ArgumentError):
            measure(state, (POL0, POL0))
        with pytest.raises(ArgumentError):
            measure(state, (POL0,), MeasurementBasis.PM_ATOM)

    def test_frequencies_follow_born_rule(self):
        """10,000 seeded shots stay within 4 sigma of every Born probability."""
        state = random_state(ModeSpec(2), (POL0, POL1), seed=11, terms=4)
        expected = outcome_distribution(state, (POL0, POL1))
        shots = 10_000
        counts = dict.fromkeys(expected, 0)
        for shot in range(shots):
            outcome, _ = measure(state, (POL0, POL1), rng_seed=derive_seed(2024, shot))
            counts[outcome.values] += 1
        for values, p in expected.items():
            sigma = math.sqrt(p * (1 - p) / shots)
            assert abs(counts[values] / shots - p) <= 4 * sigma + 1e-12, values

    def test_path_patterns_of_tesa_output(self):
        """P+001,T+000 after the TESA: four even path patterns, 1/4 each."""
        spec = ModeSpec(3)
        circuit = build_tesa(3)
        evolved = evolve(make_hyper(parse_label("P+001,T+000"), spec), circuit)
        paths = tuple(PhotonDof(p, Dof.PATH) for p in range(3))
        distribution = outcome_distribution(evolved, paths)
        assert list(distribution) == [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1)]
        assert all(p == pytest.approx(0.25, abs=1e-12) for p in distribution.values())
        seen = {
            tuple(click.path for click in sample_detection(evolved, circuit, derive_seed(7, shot)))
            for shot in range(200)
        }
        assert seen == set(distribution)

    def test_pm_basis(self):
        spec = ModeSpec(1, atom_count=1)
        plus = apply_op(product_state(spec, {AtomId(0): 0}), atom_prepare_plus(0))
        outcome, post = measure(plus, (AtomId(0),), MeasurementBasis.PM_ATOM, rng_seed=9)
        assert outcome.labels == ("+",)
        assert outcome.probability == pytest.approx(1.0)
        assert fidelity(post, plus) == pytest.approx(1.0)

    def test_discard(self):
        spec = ModeSpec(1, atom_count=1)
        state = product_state(spec, {POL0: 1, AtomId(0): 0})
        kept = discard(state, (AtomId(0),))
        assert kept.layout == (POL0,)
        assert kept.amplitude((1,)) == pytest.approx(1.0)

    def test_discard_requires_definite_level(self):
        spec = ModeSpec(1, atom_count=1)
        entangled = StateVector(spec, (POL0, AtomId(0)), {(0, 0): S, (1, 1): S})
        with pytest.raises(PreconditionError):
            discard(entangled, (AtomId(0),))


@pytest.mark.unit
class TestSeeds:
    """Test derived seeds and random states."""

    def test_derive_seed_is_stable(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
        assert 0 <= derive_seed(2**64 - 1, 3) < 2**64

    def test_random_state(self):
        spec = ModeSpec(2)
        a = random_state(spec, spec.photon_layout(), seed=11, terms=5)
        b = random_state(spec, spec.photon_layout(), seed=11, terms=5)
        assert len(a) == 5
        assert math.isclose(a.norm(), 1.0)
        assert dict(a.amplitudes) == dict(b.amplitudes)
