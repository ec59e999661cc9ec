"""Tests for GHZ labels and state preparation."""

import math
from itertools import combinations, product

import pytest

from src.hgsa.errors import ArgumentError, LabelError
from src.hgsa.hilbert import Dof, ModeSpec, PhotonDof, fidelity
from src.hgsa.states import (
    SIGNS,
    GhzDof,
    GhzLabel,
    HyperLabel,
    canonical_hyper,
    canonicalize,
    check_photon_count,
    complement,
    enumerate_labels,
    ghz_labels,
    make_ghz,
    make_hyper,
    parse_label,
)

S = 1 / math.sqrt(2)


@pytest.mark.unit
class TestLabels:
    """Test label validation, parsing and canonical names."""

    def test_str(self):
        label = HyperLabel(
            GhzLabel(GhzDof.POLARIZATION, "+", "001"), GhzLabel(GhzDof.TIMEBIN, "-", "010")
        )
        assert str(label) == "P+001,T-010"
        assert label.photon_count == 3

    def test_parse(self):
        label = parse_label("P+001,T-010")
        assert label.pol == GhzLabel(GhzDof.POLARIZATION, "+", "001")
        assert label.time == GhzLabel(GhzDof.TIMEBIN, "-", "010")
        assert HyperLabel.parse("P+001,T-010") == label

    def test_parse_accepts_unicode_minus_and_spaces(self):
        assert parse_label(" P−001, T−000 ") == parse_label("P-001,T-000")

    @pytest.mark.parametrize(
        "text",
        ["P+001", "P+001,T+01", "Q+001,T+001", "P*001,T+001", "P+101,T+000", "P+000,T+100", ""],
    )
    def test_parse_rejects(self, text):
        with pytest.raises(LabelError):
            parse_label(text)

    def test_parse_photon_count(self):
        with pytest.raises(LabelError):
            parse_label("P+0010,T+0010", photons=3)

    def test_label_needs_leading_zero(self):
        with pytest.raises(LabelError):
            GhzLabel(GhzDof.TIMEBIN, "+", "110")

    def test_label_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            parse_label("nonsense")

    def test_canonicalize(self):
        assert canonicalize("+", "100") == (GhzLabel(GhzDof.POLARIZATION, "+", "011"), 1)
        assert canonicalize("-", "100") == (GhzLabel(GhzDof.POLARIZATION, "-", "011"), -1)
        assert canonicalize("-", "010", GhzDof.TIMEBIN) == (
            GhzLabel(GhzDof.TIMEBIN, "-", "010"),
            1,
        )

    def test_canonical_hyper(self):
        label, phase = canonical_hyper("P-100,T-100")
        assert str(label) == "P-011,T-011"
        assert phase == 1
        _, phase = canonical_hyper("P-100,T+000")
        assert phase == -1

    def test_complement(self):
        assert complement("0110") == "1001"

    @pytest.mark.parametrize("dof", list(GhzDof))
    def test_canonicalize_is_idempotent(self, dof):
        """A canonical name maps to itself with phase +1; its complement maps back to it."""
        for length in range(1, 5):
            for sign, bits in product(SIGNS, ("".join(b) for b in product("01", repeat=length))):
                label, _ = canonicalize(sign, bits, dof)
                assert canonicalize(label.sign, label.bits, dof) == (label, 1)
                assert canonicalize(label.sign, complement(label.bits), dof)[0] == label


@pytest.mark.unit
class TestEnumeration:
    """Test label enumeration order and bounds."""

    def test_ghz_labels_order(self):
        names = [str(label) for label in ghz_labels(3)]
        assert names[:4] == ["P+000", "P+001", "P+010", "P+011"]
        assert names[4] == "P-000"
        assert len(names) == 8

    def test_time_bin_prefix(self):
        assert str(ghz_labels(2, GhzDof.TIMEBIN)[0]) == "T+00"

    @pytest.mark.parametrize("photons", [1, 7])
    def test_range(self, photons):
        with pytest.raises(ArgumentError):
            ghz_labels(photons)
        with pytest.raises(ArgumentError, match="photon count"):
            check_photon_count(photons)

    @pytest.mark.parametrize("photons", [2, 3, 4])
    def test_enumerate_labels(self, photons):
        labels = enumerate_labels(photons)
        assert len(labels) == 4**photons
        assert len(set(labels)) == 4**photons
        assert labels[0] == parse_label("P+" + "0" * photons + ",T+" + "0" * photons)


@pytest.mark.unit
class TestPreparation:
    """Test GHZ and hyperentangled state construction."""

    def test_make_ghz(self, spec3):
        state = make_ghz(GhzLabel(GhzDof.POLARIZATION, "-", "001"), spec3)
        assert state.layout == tuple(PhotonDof(p, Dof.POL) for p in range(3))
        assert state.amplitude((0, 0, 1)) == pytest.approx(S)
        assert state.amplitude((1, 1, 0)) == pytest.approx(-S)

    def test_make_ghz_time_bin(self, spec3):
        state = make_ghz(GhzLabel(GhzDof.TIMEBIN, "+", "010"), spec3)
        assert state.layout[0] == PhotonDof(0, Dof.SLOT)
        assert state.amplitude((1, 0, 1)) == pytest.approx(S)

    def test_make_ghz_photon_mismatch(self):
        with pytest.raises(ArgumentError):
            make_ghz(GhzLabel(GhzDof.POLARIZATION, "+", "00"), ModeSpec(3))

    def test_make_hyper(self, hyper_state, spec3):
        assert hyper_state.layout == spec3.photon_layout()
        assert len(hyper_state) == 4
        # P+001 (x) T-010: |HHV> with |SLS> carries +1/2
        assert hyper_state.amplitude((0, 0, 1, 0, 1, 1, 1, 0, 1)) == pytest.approx(0.5)
        # |VVH> with |LSL> picks up the time-bin minus sign
        assert hyper_state.amplitude((1, 1, 1, 1, 0, 1, 0, 1, 1)) == pytest.approx(-0.5)
        assert hyper_state.norm() == pytest.approx(1.0)

    @pytest.mark.parametrize("dof", list(GhzDof))
    def test_make_ghz_round_trip(self, dof, spec3):
        """The two terms and their relative sign give the label back."""
        for label in ghz_labels(3, dof):
            state = make_ghz(label, spec3)
            leading, flipped = sorted(state.amplitudes)
            assert "".join(str(b) for b in leading) == label.bits
            assert "".join(str(b) for b in flipped) == complement(label.bits)
            assert state.amplitude(leading) == pytest.approx(S)
            ratio = state.amplitude(flipped) / state.amplitude(leading)
            assert ratio == pytest.approx(1.0 if label.sign == "+" else -1.0)
            recovered = GhzLabel(dof, "+" if ratio.real > 0 else "-", label.bits)
            assert recovered == label


@pytest.mark.unit
class TestOrthonormality:
    """The 4^N hyperentangled states form an orthonormal family."""

    @pytest.mark.parametrize("photons", [2, 3, pytest.param(4, marks=pytest.mark.slow)])
    def test_pairwise_orthogonal(self, photons):
        spec = ModeSpec(photons)
        states = [make_hyper(label, spec) for label in enumerate_labels(photons)]
        assert all(state.norm() == pytest.approx(1.0, abs=1e-12) for state in states)
        worst = max(fidelity(a, b) for a, b in combinations(states, 2))
        assert worst < 1e-12
