import math

import pytest

from hyperqnd.errors import DomainError
from hyperqnd.protocols import EcpRun, EppEnsemble, EppRun, sample_ecp, sample_epp, sample_protocol

A45 = math.sqrt(0.45)


def test_ecp_within_three_standard_errors():
    st = sample_ecp(A45, A45, 5, 100_000, seed=11)
    assert st.exact == pytest.approx(0.8094136929, abs=1e-9)
    assert abs(st.z_score) < 3
    assert sum(st.extra["first_success_round"]) == st.successes


def test_epp_within_three_standard_errors():
    st = sample_epp(EppEnsemble.bit_flip(0.8, 0.8), 1, 100_000, seed=11)
    assert st.exact == pytest.approx(0.4624, abs=1e-12)
    assert abs(st.z_score) < 3


def test_epp_kept_pairs_are_purified():
    st = sample_epp(EppEnsemble.bit_flip(0.8, 0.8), 2, 50_000, seed=5)
    frac = st.extra["target_fraction"]
    se = math.sqrt(frac * (1 - frac) / st.successes)
    assert abs(frac - st.extra["exact_fidelity"]) < 3 * se + 1e-12


def test_same_seed_same_output():
    a = sample_protocol(EcpRun(A45, A45, 5), shots=20_000, seed=3)
    b = sample_protocol(EcpRun(A45, A45, 5), shots=20_000, seed=3)
    assert a == b
    c = sample_protocol(EppRun(EppEnsemble.bit_flip(0.7, 0.9), 2), shots=20_000, seed=3)
    d = sample_protocol(EppRun(EppEnsemble.bit_flip(0.7, 0.9), 2), shots=20_000, seed=3)
    assert c == d


def test_single_shot_is_reproducible():
    runs = {sample_ecp(A45, A45, 5, 1, seed=42).extra["first_success_round"] == sample_ecp(
        A45, A45, 5, 1, seed=42).extra["first_success_round"] for _ in range(3)}
    assert runs == {True}


def test_zero_rounds():
    st = sample_epp(EppEnsemble.bit_flip(0.8, 0.8), 0, 10, seed=0)
    assert st.rate == 1 and st.exact == 1


def test_shot_count_checked():
    with pytest.raises(DomainError):
        sample_ecp(A45, A45, 5, 0, seed=1)


def test_unknown_run():
    with pytest.raises(TypeError):
        sample_protocol("epp", shots=10, seed=1)
