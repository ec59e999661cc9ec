"""Tests for the two-step analysis pipeline."""

import pytest

from src.hgsa.components import make_bs, make_hwp, make_t2p
from src.hgsa.errors import (
    ArgumentError,
    CompositionError,
    TemporalDistinguishabilityError,
)
from src.hgsa.fixtures import ATOM_TABLE
from src.hgsa.hilbert import (
    AtomId,
    Dof,
    ModeSpec,
    PhotonDof,
    derive_seed,
    fidelity,
    outcome_distribution,
)
from src.hgsa.protocol import (
    Circuit,
    DetectorClick,
    GroupId,
    HgsaAnalyzer,
    MeasurementRecord,
    MeasurementStep,
    Parity,
    attach_atoms,
    build_step1,
    build_tesa,
    classify,
    detection_subsystems,
    group_of,
    path_parity,
    run_step1,
    run_tesa,
)
from src.hgsa.states import (
    GhzDof,
    canonicalize,
    enumerate_labels,
    ghz_labels,
    make_hyper,
    parse_label,
)


def _clicks(text: str) -> tuple[DetectorClick, ...]:
    return tuple(DetectorClick(token[0], int(token[1])) for token in text.split())


@pytest.mark.unit
class TestCircuit:
    """Test circuit construction and validation."""

    def test_build_step1(self):
        circuit = build_step1(3)
        assert circuit.spec.atom_count == 3
        assert len(circuit) == 2 * 4 + 1 + 3 * 3 + 1
        assert circuit.measurements[0].subsystems == (AtomId(0), AtomId(1), AtomId(2))

    def test_build_tesa(self):
        circuit = build_tesa(3)
        assert len(circuit) == 6
        assert circuit.measurements[0].subsystems == detection_subsystems(3)
        assert circuit.photon_count == 3

    @pytest.mark.parametrize("photons", [1, 7])
    def test_photon_range(self, photons):
        with pytest.raises(ArgumentError):
            build_step1(photons)

    def test_binding_outside_spec(self):
        with pytest.raises(CompositionError):
            Circuit(ModeSpec(2), (make_hwp(2),))

    def test_double_measurement(self):
        pol = PhotonDof(0, Dof.POL)
        with pytest.raises(CompositionError):
            Circuit(ModeSpec(1), (), (MeasurementStep((pol,)), MeasurementStep((pol,))))

    def test_relabel_must_be_permutation(self):
        with pytest.raises(ArgumentError):
            Circuit(ModeSpec(1), (), (), path_relabel=(1, 1))

    def test_relabel_path(self):
        circuit = build_tesa(3, out_paths=(2, 1), path_relabel=(2, 1))
        assert circuit.relabel_path(1) == 2
        assert circuit.relabel_path(2) == 1
        assert build_tesa(3).relabel_path(2) == 2

    def test_attach_atoms_photon_mismatch(self, hyper_state):
        with pytest.raises(CompositionError):
            attach_atoms(hyper_state, build_step1(2))


@pytest.mark.unit
class TestRecords:
    """Test measurement records, groups and classification."""

    def test_record_validation(self):
        with pytest.raises(ArgumentError):
            MeasurementRecord(("+", "-"), _clicks("H1 H1 H1"))
        with pytest.raises(ArgumentError):
            MeasurementRecord(("+", "0", "-"), _clicks("H1 H1 H1"))
        with pytest.raises(ArgumentError):
            DetectorClick("D", 1)

    def test_record_views(self):
        record = MeasurementRecord(("+", "-", "-"), _clicks("H1 V2 H2"))
        assert record.pol_pattern == "HVH"
        assert record.path_pattern == (1, 2, 2)
        assert str(record) == "atoms +-- | clicks H1 V2 H2"

    def test_path_parity(self):
        assert path_parity(_clicks("H1 H1 H1")) is Parity.EVEN
        assert path_parity(_clicks("H2 H1 H1")) is Parity.ODD
        assert path_parity(_clicks("H2 V2 H1")) is Parity.EVEN

    def test_group_of_uses_canonical_letter(self):
        record = MeasurementRecord(("+", "+", "+"), _clicks("V1 V1 H2"))
        assert group_of(record) == GroupId("001", Parity.ODD)
        assert str(group_of(record)) == "001/odd"

    def test_classify(self):
        even = MeasurementRecord(("+", "-", "-"), _clicks("H1 H1 H1"))
        odd = MeasurementRecord(("+", "-", "-"), _clicks("H1 H1 H2"))
        assert str(classify(even, 3)) == "P+001,T+001"
        assert str(classify(odd, 3)) == "P+001,T-001"

    def test_classify_even_photon_count(self):
        record = MeasurementRecord(("+", "+"), _clicks("H1 H1"))
        assert str(classify(record, 2)) == "P+00,T+00"

    def test_classify_photon_mismatch(self):
        with pytest.raises(ArgumentError):
            classify(MeasurementRecord(("+", "+"), _clicks("H1 H1")), 3)


@pytest.mark.unit
class TestStep1:
    """Test the atom-assisted polarization step."""

    @pytest.mark.parametrize("name,atoms", ATOM_TABLE)
    def test_atom_table(self, name, atoms, spec3):
        pol, _ = canonicalize(name[0], name[1:], GhzDof.POLARIZATION)
        circuit = build_step1(3)
        for time_label in ghz_labels(3, GhzDof.TIMEBIN)[:3]:
            label = parse_label(f"{pol},{time_label}")
            state = make_hyper(label, spec3)
            readout, photonic = run_step1(state, circuit, rng_seed=1)
            assert readout == atoms
            assert fidelity(photonic, state) == pytest.approx(1.0, abs=1e-10)

    def test_readout_is_seed_independent(self, hyper_state):
        circuit = build_step1(3)
        readouts = {run_step1(hyper_state, circuit, rng_seed=s)[0] for s in range(5)}
        assert len(readouts) == 1

    @pytest.mark.integration
    def test_time_bin_distribution_untouched(self, spec3):
        """Step 1 leaves the slot statistics of every photon as prepared."""
        circuit = build_step1(3)
        slots = tuple(PhotonDof(p, Dof.SLOT) for p in range(3))
        for index, label in enumerate(enumerate_labels(3)):
            state = make_hyper(label, spec3)
            _, photonic = run_step1(state, circuit, rng_seed=derive_seed(5, index))
            before = outcome_distribution(state, slots)
            after = outcome_distribution(photonic, slots)
            assert list(after) == list(before), str(label)
            for values, p in before.items():
                assert after[values] == pytest.approx(p, abs=1e-12), str(label)


@pytest.mark.unit
class TestTesa:
    """Test the time-bin analyzer step."""

    def test_run_tesa_clicks(self, hyper_state):
        clicks = run_tesa(hyper_state, build_tesa(3), rng_seed=3)
        assert len(clicks) == 3
        assert all(c.path in (1, 2) for c in clicks)

    def test_missing_t2p_is_temporally_distinguishable(self, hyper_state):
        circuit = build_tesa(3).with_elements([make_bs(p) for p in range(3)])
        with pytest.raises(TemporalDistinguishabilityError):
            run_tesa(hyper_state, circuit, rng_seed=0)

    def test_t2p_only_still_single_slot(self, hyper_state):
        circuit = build_tesa(3).with_elements([make_t2p(p) for p in range(3)])
        clicks = run_tesa(hyper_state, circuit, rng_seed=0)
        assert len(clicks) == 3


@pytest.mark.integration
class TestAnalyzer:
    """Closed-loop analysis of every label."""

    def test_example_state(self, analyzer3):
        result = analyzer3.analyze(parse_label("P+001,T-010"), seed=7)
        assert str(result.classified) == "P+001,T-010"
        assert result.correct

    def test_table_row_atoms(self, analyzer3):
        result = analyzer3.analyze(parse_label("P+000,T+000"), seed=0)
        assert result.record.atom_outcomes == ("+", "+", "-")

    def test_all_labels_three_photons(self, analyzer3):
        for label in enumerate_labels(3):
            for shot in range(3):
                assert analyzer3.analyze(label, seed=11, shot=shot).correct, str(label)

    def test_all_labels_two_photons(self):
        analyzer = HgsaAnalyzer(2)
        for label in enumerate_labels(2):
            assert analyzer.analyze(label, seed=5).correct, str(label)

    def test_record_is_reproducible(self, analyzer3):
        label = parse_label("P-010,T+011")
        assert analyzer3.record(label, seed=99, shot=4) == analyzer3.record(label, seed=99, shot=4)

    def test_relabeled_analyzer(self):
        tesa = build_tesa(3, out_paths=(2, 1), path_relabel=(2, 1))
        analyzer = HgsaAnalyzer(3, tesa=tesa)
        for label in enumerate_labels(3)[::5]:
            assert analyzer.analyze(label, seed=2).correct, str(label)

    def test_signature(self, analyzer3):
        label = parse_label("P-011,T-001")
        atoms, group = analyzer3.signature(label)
        assert atoms == ("-", "-", "+")
        assert group == GroupId("010", Parity.EVEN)
