"""Tests for pencils, model specs, builders and gauge fixing"""

import json

import numpy as np
import pytest

from conftest import distinct, nonzero
from src.models.builders import (
    build,
    build_bowtie,
    build_equal_slope,
    build_generalized_bowtie,
    build_linear_chain,
    build_oscillator,
    spin_matrices,
    su11_ladder,
)
from src.models.gauge import degauge
from src.models.pencils import GaugePhases, MatrixPencil, identity_pencil
from src.models.specs import ModelKind, ModelSpec
from src.utils.error_handling import (
    CutoffTooSmall,
    DimensionMismatch,
    DuplicateSlope,
    InvalidBargmannIndex,
    InvalidSpin,
    NotGaugeable,
    ParameterError,
    WindowTooSmall,
    ZeroCoupling,
    ZeroSlope,
    ZeroSlopeEntry,
)


def test_pencil_evaluation():
    """H(u) = C0 + u C1 + u^2 C2"""
    c0 = np.array([[1.0, 2.0], [2.0, -1.0]])
    c1 = np.diag([3.0, 0.5])
    c2 = np.eye(2)
    pencil = MatrixPencil((c0, c1, c2))
    assert pencil.degree == 2
    assert pencil.dim == 2
    np.testing.assert_allclose(pencil.at(2.0), c0 + 2 * c1 + 4 * c2)
    np.testing.assert_allclose(pencil(-1.0), c0 - c1 + c2)


def test_pencil_rejects_bad_coefficients():
    with pytest.raises(ParameterError):
        MatrixPencil((np.array([[0.0, 1.0], [0.0, 0.0]]),))
    with pytest.raises(DimensionMismatch):
        MatrixPencil((np.eye(2), np.eye(3)))
    with pytest.raises(DimensionMismatch):
        MatrixPencil((np.eye(2),), ("a", "b", "c"))


def test_pencil_algebra():
    a = MatrixPencil.linear(np.diag([1.0, 2.0]), np.diag([0.0, 1.0]))
    b = identity_pencil(2, power=2)
    total = a + b * 3.0
    assert total.degree == 2
    np.testing.assert_allclose(total.at(2.0), a.at(2.0) + 12.0 * np.eye(2))
    np.testing.assert_allclose(a.shift_degree(1).at(3.0), 3.0 * a.at(3.0))
    np.testing.assert_allclose(a.matmul(a).at(1.5), a.at(1.5) @ a.at(1.5))


def test_pencil_dict_round_trip():
    pencil = MatrixPencil.linear(np.array([[0.0, 1j], [-1j, 0.0]]), np.diag([1.0, -1.0]), ["up", "down"])
    again = MatrixPencil.from_dict(json.loads(json.dumps(pencil.to_dict())))
    assert again.state_labels == ["up", "down"]
    for x, y in zip(again.coeffs, pencil.coeffs):
        np.testing.assert_array_equal(x, y)


def test_bowtie_layout():
    pencil = build_bowtie([0.5, -0.3], [1.0, -2.0])
    c0, c1 = pencil.coeffs
    np.testing.assert_allclose(c0[0, 1:], [0.5, -0.3])
    np.testing.assert_allclose(c0[1:, 0], [0.5, -0.3])
    np.testing.assert_allclose(np.diag(c1), [0.0, 1.0, -2.0])
    assert np.all(c0[1:, 1:] == 0)


def test_generalized_bowtie_layout():
    pencil = build_generalized_bowtie([0.5, 0.2, 0.3], [1.0, -2.0, 0.5], epsilon=0.4)
    c0, c1 = pencil.coeffs
    assert pencil.dim == 5
    assert c0[0, 0] == pytest.approx(0.2)
    assert c0[1, 1] == pytest.approx(-0.2)
    assert c0[0, 1] == 0
    np.testing.assert_allclose(c0[0, 2:], c0[1, 2:])
    np.testing.assert_allclose(np.diag(c1), [0.0, 0.0, 1.0, -2.0, 0.5])


def test_equal_slope_layout():
    pencil = build_equal_slope([0.3, 0.4], [-1.0, 2.0], b=2.0)
    c0, c1 = pencil.coeffs
    np.testing.assert_allclose(np.diag(c0), [0.0, -1.0, 2.0])
    np.testing.assert_allclose(np.diag(c1), [2.0, 0.0, 0.0])
    with pytest.raises(ZeroSlope):
        build_equal_slope([0.3], [1.0], b=0.0)


@pytest.mark.parametrize("j", [0.5, 1.0, 1.5, 2.0, 2.5])
def test_spin_matrices(j):
    """S_x has the spectrum of S_z and the Casimir is j(j+1)"""
    s_x, s_z = spin_matrices(j)
    m = j - np.arange(int(2 * j) + 1)
    np.testing.assert_allclose(np.diag(s_z), m)
    np.testing.assert_allclose(np.linalg.eigvalsh(s_x), np.sort(m), atol=1e-12)
    s_plus = np.triu(2 * s_x)
    s_y = (s_plus - s_plus.T) / 2j
    casimir = s_x @ s_x + s_y @ s_y + s_z @ s_z
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(len(m)), atol=1e-12)


def test_su2_labels_descend():
    pencil = build(ModelSpec(kind=ModelKind.SU2_SPIN, j=1.5, g=0.5))
    assert pencil.state_labels == ["3/2", "1/2", "-1/2", "-3/2"]


def test_oscillator_couplings():
    pencil = build_oscillator(0.3, cutoff=6)
    c0, c1 = pencil.coeffs
    assert pencil.dim == 7
    np.testing.assert_allclose(np.diag(c0, k=1), 0.3 * np.sqrt(np.arange(1, 7)))
    np.testing.assert_allclose(np.diag(c1), np.arange(7))
    with pytest.raises(CutoffTooSmall):
        build_oscillator(0.3, cutoff=2)


def test_linear_chain_window():
    pencil = build_linear_chain(0.5, -3, 3)
    assert pencil.state_labels == ["-3", "-2", "-1", "0", "1", "2", "3"]
    np.testing.assert_allclose(np.diag(pencil.coeffs[0], k=1), 0.5)
    with pytest.raises(WindowTooSmall):
        build_linear_chain(0.5, 0, 2)


@pytest.mark.parametrize("k", [0.25, 0.5, 0.75, 1.0, 1.5])
def test_su11_casimir(k):
    """K0^2 - (K+K- + K-K+)/2 = k(k-1) away from the truncation edge"""
    k0, k_plus = su11_ladder(k, cutoff=10)
    k_minus = k_plus.T
    casimir = k0 @ k0 - 0.5 * (k_plus @ k_minus + k_minus @ k_plus)
    np.testing.assert_allclose(np.diag(casimir)[:-1], k * (k - 1), atol=1e-12)


@pytest.mark.parametrize("k", [0.25, 0.5, 0.75, 1.0, 1.5])
def test_su11_commutators(k):
    """[K0, K+-] = +-K+- everywhere; [K+, K-] = -2 K0 except in the last truncated row"""
    k0, k_plus = su11_ladder(k, cutoff=10)
    k_minus = k_plus.T
    np.testing.assert_allclose(k0 @ k_plus - k_plus @ k0, k_plus, atol=1e-12)
    np.testing.assert_allclose(k0 @ k_minus - k_minus @ k0, -k_minus, atol=1e-12)
    bracket = k_plus @ k_minus - k_minus @ k_plus
    np.testing.assert_allclose(bracket[:-1, :-1], -2 * k0[:-1, :-1], atol=1e-12)


def test_spec_validation():
    with pytest.raises(ZeroCoupling):
        ModelSpec(kind=ModelKind.BOW_TIE, p=[0.5, 0.0], r=[1.0, 2.0])
    with pytest.raises(DuplicateSlope):
        ModelSpec(kind=ModelKind.BOW_TIE, p=[0.5, 0.2], r=[1.0, 1.0])
    with pytest.raises(ZeroSlopeEntry):
        ModelSpec(kind=ModelKind.GENERALIZED_BOW_TIE, p=[0.5, 0.2], r=[1.0, 0.0], epsilon=0.3)
    with pytest.raises(ParameterError):
        ModelSpec(kind=ModelKind.EQUAL_SLOPE, p=[0.5], a=[], b=1.0)
    with pytest.raises(InvalidSpin):
        ModelSpec(kind=ModelKind.SU2_SPIN, j=0.3, g=1.0)
    with pytest.raises(InvalidBargmannIndex):
        ModelSpec(kind=ModelKind.SU11_SECTOR, k=0.3, g_tilde=0.2)
    with pytest.raises(CutoffTooSmall):
        ModelSpec(kind=ModelKind.OSCILLATOR, g_o=0.3, cutoff=3)


def test_spec_json_round_trip():
    spec = ModelSpec(kind=ModelKind.GENERALIZED_BOW_TIE, p=[0.3, 0.4], r=[1.0, -2.0], epsilon=0.5)
    again = ModelSpec.from_json(spec.to_json())
    assert again == spec
    assert json.loads(spec.to_json())["kind"] == "GeneralizedBowTie"
    assert again.dim == 4


def test_with_cutoff():
    chain = ModelSpec(kind=ModelKind.LINEAR_CHAIN, g_lc=0.3)
    narrow = chain.with_cutoff(10)
    assert (narrow.n_min, narrow.n_max, narrow.dim) == (-10, 10, 21)
    osc = ModelSpec(kind=ModelKind.OSCILLATOR, g_o=0.3).with_cutoff(20)
    assert osc.dim == 21
    with pytest.raises(ParameterError):
        ModelSpec(kind=ModelKind.BOW_TIE, p=[0.5], r=[1.0]).with_cutoff(10)


def test_degauge_bowtie_removes_phases(rng):
    """Spectrum is unchanged and the gauged pencil is the real one with |p|"""
    p = np.abs(nonzero(rng, 4))
    r = distinct(rng, 4)
    theta = rng.uniform(-np.pi, np.pi, 4)
    complex_pencil = build_bowtie(p * np.exp(-1j * theta), r)
    real_pencil, phases = degauge(complex_pencil, ModelKind.BOW_TIE)

    assert real_pencil.is_real()
    np.testing.assert_allclose(phases.theta[1:], theta, atol=1e-12)
    np.testing.assert_allclose(real_pencil.coeffs[0], build_bowtie(p, r).coeffs[0].real, atol=1e-12)
    for u in (-1.3, 0.0, 2.1):
        np.testing.assert_allclose(
            np.linalg.eigvalsh(real_pencil.at(u)), np.linalg.eigvalsh(complex_pencil.at(u)), atol=1e-12
        )


def test_degauge_generalized_bowtie_and_chain(rng):
    p = np.abs(nonzero(rng, 3))
    theta = rng.uniform(-np.pi, np.pi, 3)
    gbt = build_generalized_bowtie(p * np.exp(-1j * theta), [1.0, -1.5, 0.5], 0.3)
    real_gbt, _ = degauge(gbt, ModelKind.GENERALIZED_BOW_TIE)
    assert real_gbt.is_real()

    hop = np.exp(1j * rng.uniform(-np.pi, np.pi, 5)) * 0.4
    c0 = np.diag(hop, k=1) + np.diag(hop.conj(), k=-1)
    chain = MatrixPencil.linear(c0, np.diag(np.arange(6.0)))
    real_chain, phases = degauge(chain, ModelKind.LINEAR_CHAIN)
    assert real_chain.is_real()
    np.testing.assert_allclose(np.abs(np.diag(real_chain.coeffs[0], k=1)), 0.4, atol=1e-12)
    np.testing.assert_allclose(phases.apply(chain).coeffs[0], real_chain.coeffs[0], atol=1e-12)


def test_degauge_rejects_wrong_pattern():
    c0 = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1j], [0.0, -1j, 0.0]])
    pencil = MatrixPencil.linear(c0, np.diag([0.0, 1.0, 2.0]))
    with pytest.raises(NotGaugeable):
        degauge(pencil, ModelKind.BOW_TIE)


def test_gauge_identity():
    assert GaugePhases((0.0, 0.0)).is_identity()
    real, phases = degauge(build_bowtie([0.5], [1.0]), ModelKind.BOW_TIE)
    assert phases.is_identity()


def test_build_with_coupling_phases_is_real():
    spec = ModelSpec(kind=ModelKind.BOW_TIE, p=[0.4, 0.3, 0.5], r=[1.0, -0.5, 2.0], coupling_phases=[0.3, -1.2, 2.0])
    pencil = build(spec)
    assert pencil.is_real()
    np.testing.assert_allclose(pencil.coeffs[0][0, 1:], [0.4, 0.3, 0.5], atol=1e-12)
