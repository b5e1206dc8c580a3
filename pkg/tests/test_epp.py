from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperqnd.errors import DomainError
from hyperqnd.optics import PHI_MINUS, PHI_PLUS, PSI_PLUS, TARGET, HyperBellLabel
from hyperqnd.protocols import (
    EppEnsemble,
    epp_iterate,
    epp_iterate_simulated,
    epp_recurrence,
    epp_round_simulated,
)
from hyperqnd.protocols.epp import epp_component


def exact_step(f):
    f = Fraction(f)
    keep = f * f + (1 - f) ** 2
    return f * f / keep, keep


GRID = [(f1, f2) for f1 in np.linspace(0.5, 1, 5) for f2 in np.linspace(0.5, 1, 5)]


class TestRecurrence:
    def test_point_08(self):
        f1, f2, y = epp_recurrence(0.8, 0.8)
        assert f1 == f2 == pytest.approx(16 / 17, abs=1e-15)
        assert f1 * f2 == pytest.approx(256 / 289, abs=1e-15)
        assert y == pytest.approx(0.4624, abs=1e-15)

    def test_fixed_points(self):
        assert epp_recurrence(1, 1) == (1, 1, 1)
        assert epp_recurrence(0.5, 0.5) == (0.5, 0.5, 0.25)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            epp_recurrence(1.1, 0.9)

    @given(st.fractions(0, 1), st.fractions(0, 1))
    def test_against_rational_oracle(self, f1, f2):
        g1, k1 = exact_step(f1)
        g2, k2 = exact_step(f2)
        out = epp_recurrence(float(f1), float(f2))
        assert out == pytest.approx((float(g1), float(g2), float(k1 * k2)), abs=1e-12)


class TestIterate:
    def test_two_rounds_from_08(self):
        rows = epp_iterate(0.8, 0.8, 2)
        # 4/5 -> 16/17 -> 256/257
        assert rows[1].f1 == pytest.approx(16 / 17, abs=1e-15)
        assert rows[2].f1 == pytest.approx(256 / 257, abs=1e-15)
        assert rows[2].fidelity == pytest.approx((256 / 257) ** 2, abs=1e-15)
        assert rows[2].cumulative_yield == pytest.approx((17 / 25) ** 2 * (257 / 289) ** 2, abs=1e-15)

    @pytest.mark.parametrize("f", [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95])
    def test_monotone_to_one(self, f):
        rows = epp_iterate(f, f, 12)
        fs = [r.f1 for r in rows]
        assert all(b > a for a, b in zip(fs, fs[1:]) if a < 1)
        assert fs[-1] == pytest.approx(1, abs=1e-9)

    def test_half_is_constant(self):
        assert {r.f1 for r in epp_iterate(0.5, 0.5, 5)} == {0.5}

    def test_zero_rounds(self):
        assert len(epp_iterate(0.7, 0.9, 0)) == 1

    def test_negative_rounds(self):
        with pytest.raises(DomainError):
            epp_iterate(0.7, 0.9, -1)

    def test_below_half_accepted(self):
        rows = epp_iterate(0.3, 0.3, 3)
        assert rows[-1].f1 < 0.3


class TestSimulated:
    def test_pure_target_is_kept(self):
        res = epp_round_simulated(EppEnsemble({TARGET: 1.0}))
        assert res.yield_prob == pytest.approx(1, abs=1e-12)
        assert res.kept_ensemble.weights[TARGET] == pytest.approx(1, abs=1e-12)

    def test_mismatched_spatial_parity_is_discarded(self):
        p_keep, dist = epp_component(TARGET, HyperBellLabel(PHI_PLUS, PSI_PLUS))
        assert p_keep == pytest.approx(0, abs=1e-12)
        assert sum(dist.values()) == pytest.approx(0, abs=1e-12)

    def test_double_error_survives_undetected(self):
        err = HyperBellLabel(PSI_PLUS, PSI_PLUS)
        p_keep, dist = epp_component(err, err)
        assert p_keep == pytest.approx(1, abs=1e-12)
        assert dist[err] == pytest.approx(1, abs=1e-12)

    def test_phase_error_component_keeps_its_label(self):
        lab = HyperBellLabel(PHI_MINUS, PHI_PLUS)
        p_keep, dist = epp_component(lab, TARGET)
        assert p_keep == pytest.approx(1, abs=1e-12)
        assert max(dist, key=dist.get) == lab

    def test_point_08(self):
        res = epp_round_simulated(EppEnsemble.bit_flip(0.8, 0.8))
        assert res.f1_prime == pytest.approx(16 / 17, abs=1e-9)
        assert res.f2_prime == pytest.approx(16 / 17, abs=1e-9)
        assert res.yield_prob == pytest.approx(0.4624, abs=1e-9)

    @pytest.mark.parametrize("f1,f2", GRID)
    def test_oracle_equivalence_and_conservation(self, f1, f2):
        res = epp_round_simulated(EppEnsemble.bit_flip(f1, f2))
        g1, g2, y = epp_recurrence(f1, f2)
        assert res.f1_prime == pytest.approx(g1, abs=1e-9)
        assert res.f2_prime == pytest.approx(g2, abs=1e-9)
        assert res.yield_prob == pytest.approx(y, abs=1e-9)
        assert res.yield_prob + res.discarded_prob == pytest.approx(1, abs=1e-12)
        if f1 > 0.5 and f2 > 0.5:
            assert res.kept_ensemble.dominant() == TARGET

    def test_iterate_simulated_matches(self):
        sim = epp_iterate_simulated(EppEnsemble.bit_flip(0.7, 0.9), 3)
        ana = epp_iterate(0.7, 0.9, 3)
        for s, a in zip(sim, ana):
            assert (s.f1, s.f2, s.fidelity, s.cumulative_yield) == pytest.approx(
                (a.f1, a.f2, a.fidelity, a.cumulative_yield), abs=1e-9)


class TestEnsemble:
    def test_bit_flip_marginals(self):
        e = EppEnsemble.bit_flip(0.7, 0.9)
        assert (e.f1, e.f2, e.fidelity) == pytest.approx((0.7, 0.9, 0.63))

    def test_must_sum_to_one(self):
        with pytest.raises(DomainError):
            EppEnsemble({TARGET: 0.9})

    def test_negative_weight(self):
        with pytest.raises(DomainError):
            EppEnsemble({TARGET: 1.5, HyperBellLabel(PSI_PLUS, PSI_PLUS): -0.5})
