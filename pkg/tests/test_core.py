import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracfbg.core import ComplexAmplitudePair, DiracFBGError, DiracParams, kappa_of


def test_kappa_branch_point():
    assert kappa_of(1.0, 1.0) == 0


def test_kappa_mass_gap_is_positive_imaginary():
    k = kappa_of(0.0, 1.0)
    assert k == pytest.approx(1j)
    assert k.imag > 0


def test_kappa_real_branch():
    # sqrt(1.474**2 - 1) to 40 digits with mpmath: 1.0829016575848427...
    assert kappa_of(1.474, 1.0) == pytest.approx(1.0829016575848427, abs=1e-14)
    assert kappa_of(1.474, 1.0).imag == 0


def test_kappa_array_input():
    k = kappa_of(np.array([0.0, 1.0, 2.0]), 1.0)
    assert k.shape == (3,)
    assert k[2] == pytest.approx(math.sqrt(3))


@given(st.floats(-50, 50), st.floats(0.01, 10))
def test_kappa_energy_momentum_identity(E, m0):
    k = kappa_of(E, m0)
    assert abs(k * k + m0 * m0 - E * E) <= 1e-12 * max(1.0, E * E, m0 * m0)
    assert kappa_of(-E, m0) == k
    assert k.real >= 0 and k.imag >= 0


def test_kappa_continuous_at_branch_point():
    for E in (1 - 1e-10, 1 + 1e-10):
        assert abs(kappa_of(E, 1.0)) < 1e-4


@pytest.mark.parametrize("kw", [dict(m0=0, V0=1, a=1), dict(m0=1, V0=1, a=-2), dict(m0=1, V0=math.nan, a=1)])
def test_params_validation(kw):
    with pytest.raises(DiracFBGError):
        DiracParams(**kw)


def test_params_tamm_regime():
    assert DiracParams(1, 1, 2, V1=0.5).require_tamm() == 0.5
    with pytest.raises(DiracFBGError):
        DiracParams(1, 1, 2, V1=1.2).require_tamm()
    with pytest.raises(DiracFBGError):
        DiracParams(1, 1, 2).require_tamm()


def test_params_immutable():
    p = DiracParams(1, 1, 2)
    with pytest.raises(AttributeError):
        p.m0 = 3


def test_amplitude_pair():
    assert np.allclose(ComplexAmplitudePair(1 + 1j, 2).as_array(), [1 + 1j, 2])
