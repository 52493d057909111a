"""Tests for the Hamiltonian and transformation builders."""
import math

import numpy as np
import pytest

from ionqrm import (
    HAMILTONIAN_BUILDERS,
    IonParams,
    Regime,
    RegimeThresholds,
    ResonancePoleError,
    Spin,
    TruncationSpec,
    classify_regime,
    dagger,
    derived_couplings,
    h_ajc,
    h_dispersive,
    h_jc,
    h_lamb_dicke,
    h_qrm,
    h_qrm_detuned,
    h_rabi_rotated,
    h_resonant,
    interior_block,
    is_hermitian,
    is_unitary,
    number_op,
    osc_identity,
    pauli,
    qrm_transform,
    rotation_diagnostic,
    small_rotation,
    spin_tensor_osc,
    y_rotation,
)

T64 = TruncationSpec(n_max=64, guard=16)
T32 = TruncationSpec(n_max=32, guard=8)


def test_ion_params_validation():
    with pytest.raises(ValueError, match="nu > 0"):
        IonParams(Omega=1.0, eta=0.1, nu=0.0)
    with pytest.raises(ValueError, match="eta >= 0"):
        IonParams(Omega=1.0, eta=-0.1)
    with pytest.raises(ValueError, match="Omega >= 0"):
        IonParams(Omega=-1.0, eta=0.1)
    with pytest.raises(ValueError, match="finite"):
        IonParams(Omega=float("inf"), eta=0.1)


def test_all_builders_are_hermitian():
    rng = np.random.default_rng(17)
    trunc = TruncationSpec(n_max=24, guard=4)
    for name, build in HAMILTONIAN_BUILDERS.items():
        for _ in range(3):
            p = IonParams(
                nu=float(rng.uniform(0.5, 2.0)),
                Omega=float(rng.uniform(0.0, 2.0)),
                eta=float(rng.uniform(0.0, 0.5)),
                phi_l=0.0 if name in ("rabi-rotated",) else float(rng.uniform(0, 2 * np.pi)),
                delta=float(rng.uniform(-0.3, 0.3)) if name == "qrm-detuned" else 0.0,
            )
            if name == "dispersive" and abs(2 * p.Omega - p.nu) < 0.05:
                continue
            if name == "resonant" and p.delta != 0.0:
                continue
            h = build(p, trunc)
            assert is_hermitian(h, 1e-12), name


def test_h_resonant_eta_zero_is_block_diagonal_drive():
    p = IonParams(Omega=0.8, eta=0.0, phi_l=0.4)
    trunc = TruncationSpec(8)
    h = h_resonant(p, trunc)
    drive = np.exp(1j * 0.4) * pauli(Spin.PLUS) + np.exp(-1j * 0.4) * pauli(Spin.MINUS)
    expected = spin_tensor_osc(pauli(Spin.IDENTITY), p.nu * number_op(trunc)) + (
        p.Omega * spin_tensor_osc(drive, osc_identity(trunc))
    )
    np.testing.assert_allclose(h, expected, rtol=0, atol=1e-14)


def test_h_resonant_zero_drive():
    p = IonParams(Omega=0.0, eta=0.3)
    trunc = TruncationSpec(8)
    np.testing.assert_allclose(
        h_resonant(p, trunc),
        spin_tensor_osc(pauli(Spin.IDENTITY), number_op(trunc)),
        rtol=0,
        atol=1e-14,
    )


def test_h_resonant_rejects_detuning():
    with pytest.raises(ValueError, match="delta"):
        h_resonant(IonParams(Omega=0.5, eta=0.1, delta=0.2), TruncationSpec(8))


def test_h_resonant_ground_energy_fixture():
    w = np.linalg.eigvalsh(h_resonant(IonParams(Omega=0.7, eta=0.3), T64))
    assert np.min(w) == pytest.approx(-0.6869266132178609, abs=1e-9)


def test_lamb_dicke_matches_resonant_at_eta_zero():
    p = IonParams(Omega=0.6, eta=0.0, phi_l=1.1)
    trunc = TruncationSpec(12)
    np.testing.assert_allclose(
        h_lamb_dicke(p, trunc), h_resonant(p, trunc), rtol=0, atol=1e-13
    )


def test_lamb_dicke_remainder_is_second_order():
    trunc = TruncationSpec(n_max=64, guard=56)  # fixed 8-level interior
    norms = []
    for eta in (0.04, 0.02):
        p = IonParams(Omega=0.7, eta=eta)
        d = interior_block(h_resonant(p, trunc) - h_lamb_dicke(p, trunc), trunc)
        norms.append(np.linalg.norm(d))
    assert norms[0] / norms[1] == pytest.approx(4.0, rel=0.2)


def test_lamb_dicke_hand_assembled_two_level_case():
    # phi_l = pi/2, eta = 0.1, n_max = 2, basis (e0, e1, g0, g1)
    omega, eta, nu = 0.9, 0.1, 1.0
    p = IonParams(Omega=omega, eta=eta, nu=nu, phi_l=np.pi / 2)
    h = h_lamb_dicke(p, TruncationSpec(2))
    k = eta * omega
    expected = np.array(
        [
            [0, 0, 1j * omega, -k],
            [0, nu, -k, 1j * omega],
            [-1j * omega, -k, 0, 0],
            [-k, -1j * omega, 0, nu],
        ],
        dtype=complex,
    )
    np.testing.assert_allclose(h, expected, rtol=0, atol=1e-14)


def test_y_rotation_standard():
    c = np.cos(np.pi / 4)
    np.testing.assert_allclose(
        y_rotation("standard"), np.array([[c, c], [-c, c]]), rtol=0, atol=1e-15
    )
    assert is_unitary(y_rotation("standard"), 1e-12)


def test_y_rotation_alt_fixture():
    # exponential of the literal i*sigma_- - sigma_+ variant; not unitary
    r = y_rotation("alt")
    expected = np.array(
        [
            [0.984149246502 + 0.308099170258j, 0.080708937741 - 0.782908082182j],
            [-0.782908082182 - 0.080708937741j, 0.984149246502 + 0.308099170258j],
        ]
    )
    np.testing.assert_allclose(r, expected, rtol=0, atol=1e-9)
    assert not is_unitary(r, 1e-10)


def test_h_rabi_rotated_eta_zero_diagonal():
    p = IonParams(Omega=0.5, eta=0.0)
    h = h_rabi_rotated(p, TruncationSpec(4))
    assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
    np.testing.assert_allclose(
        np.diag(h).real, [-0.5, 0.5, 1.5, 2.5, 0.5, 1.5, 2.5, 3.5], atol=1e-14
    )


def test_h_rabi_rotated_spectrum_fixture():
    w = np.sort(np.linalg.eigvalsh(h_rabi_rotated(IonParams(Omega=0.5, eta=0.05), T64)))
    np.testing.assert_allclose(
        w[:4],
        [-0.5003125488357544, 0.47468935791235, 0.5246854466225122, 1.464337497396186],
        atol=1e-9,
    )


def test_h_rabi_rotated_rejects_other_phases():
    with pytest.raises(ValueError, match="phase"):
        h_rabi_rotated(IonParams(Omega=0.5, eta=0.05, phi_l=0.3), TruncationSpec(8))
    # both supported phases construct fine
    for phi in (0.0, np.pi, -np.pi, 3 * np.pi):
        h_rabi_rotated(IonParams(Omega=0.5, eta=0.05, phi_l=phi), TruncationSpec(8))


def test_h_jc_matrix_element_and_conservation():
    p = IonParams(Omega=0.5, eta=0.1)
    trunc = TruncationSpec(8)
    h = h_jc(p, trunc)
    # <e,0|H|g,1> = i*eta*Omega
    assert h[0, trunc.n_max + 1] == pytest.approx(1j * 0.05)
    excitation = spin_tensor_osc(pauli(Spin.IDENTITY), number_op(trunc)) + spin_tensor_osc(
        (pauli(Spin.Z) + pauli(Spin.IDENTITY)) / 2, osc_identity(trunc)
    )
    assert np.max(np.abs(h @ excitation - excitation @ h)) < 1e-12


def test_h_ajc_matrix_element_and_anticonservation():
    p = IonParams(Omega=0.5, eta=0.1)
    trunc = TruncationSpec(8)
    h = h_ajc(p, trunc)
    # <e,1|H|g,0> = i*eta*Omega
    assert h[1, trunc.n_max] == pytest.approx(1j * 0.05)
    anti = spin_tensor_osc(pauli(Spin.IDENTITY), number_op(trunc)) - spin_tensor_osc(
        (pauli(Spin.Z) + pauli(Spin.IDENTITY)) / 2, osc_identity(trunc)
    )
    assert np.max(np.abs(h @ anti - anti @ h)) < 1e-12


def test_spin_flip_maps_jc_to_minus_ajc():
    p = IonParams(Omega=0.5, eta=0.1)
    trunc = TruncationSpec(8)
    flip = spin_tensor_osc(pauli(Spin.X), osc_identity(trunc))
    np.testing.assert_array_equal(flip @ h_jc(p, trunc) @ flip, -h_ajc(p, trunc))


def test_qrm_transform_eta_zero():
    trunc = TruncationSpec(4)
    t = qrm_transform(0.0, trunc)
    eye = np.eye(4)
    expected = np.block([[eye, eye], [-eye, eye]]) / np.sqrt(2)
    np.testing.assert_allclose(t, expected, rtol=0, atol=1e-14)


def test_qrm_transform_unitary():
    t = qrm_transform(0.6, T64)
    assert is_unitary(t, 1e-10)


def test_qrm_transform_columns_orthonormal():
    t = qrm_transform(0.35, TruncationSpec(32))
    rng = np.random.default_rng(23)
    for _ in range(20):
        i, j = rng.integers(0, 64, size=2)
        inner = np.vdot(t[:, i], t[:, j])
        assert abs(inner - (1.0 if i == j else 0.0)) < 1e-10


def test_h_qrm_eta_zero():
    p = IonParams(Omega=0.7, eta=0.0)
    trunc = TruncationSpec(6)
    expected = spin_tensor_osc(pauli(Spin.IDENTITY), number_op(trunc)) + 0.7 * spin_tensor_osc(
        pauli(Spin.Z), osc_identity(trunc)
    )
    np.testing.assert_allclose(h_qrm(p, trunc), expected, rtol=0, atol=1e-14)


def test_h_qrm_constant_flag_shifts_by_nu_eta_sq_over_4():
    p = IonParams(Omega=0.7, eta=0.3, nu=1.3)
    trunc = TruncationSpec(8)
    diff = h_qrm(p, trunc, include_constant=True) - h_qrm(p, trunc, include_constant=False)
    np.testing.assert_allclose(diff, (1.3 * 0.09 / 4) * np.eye(16), rtol=0, atol=1e-15)


def test_central_identity_single_point():
    p = IonParams(Omega=0.7, eta=0.3)
    t = qrm_transform(p.eta, T64)
    lhs = interior_block(t @ h_resonant(p, T64) @ dagger(t), T64)
    rhs = interior_block(h_qrm(p, T64, include_constant=True), T64)
    assert np.linalg.norm(lhs - rhs) < 1e-8 * T64.interior_dim


def test_h_qrm_deep_strong_ground_trend():
    # coupling g = eta*nu/2 = 2: ground energy tracks -g^2/nu within the drive scale
    p = IonParams(Omega=0.5, eta=4.0)
    w0 = np.min(np.linalg.eigvalsh(h_qrm(p, T64)))
    assert w0 == pytest.approx(-4.0169336097955455, abs=1e-9)
    assert abs(w0 - (-4.0)) < p.Omega


def test_h_qrm_detuned_reduces_and_places_delta():
    trunc = TruncationSpec(8)
    p0 = IonParams(Omega=0.7, eta=0.3)
    np.testing.assert_allclose(
        h_qrm_detuned(p0, trunc),
        h_qrm(p0, trunc, include_constant=True),
        rtol=0,
        atol=1e-14,
    )
    p = IonParams(Omega=0.7, eta=0.3, delta=0.25)
    h = h_qrm_detuned(p, trunc)
    for n in range(trunc.n_max):
        assert h[n, trunc.n_max + n] == pytest.approx(0.125)
    assert is_hermitian(h, 1e-12)


def test_derived_couplings_worked_example():
    c = derived_couplings(IonParams(Omega=1.0, eta=0.1))
    assert c.g_qrm == pytest.approx(0.05)
    assert c.eps_counter == pytest.approx(0.1 / 6, abs=1e-12)
    assert c.eps_co == pytest.approx(0.05, abs=1e-12)
    assert c.chi == pytest.approx(0.02 / 3, abs=1e-12)


def test_derived_couplings_zero_eta():
    c = derived_couplings(IonParams(Omega=1.0, eta=0.0))
    assert (c.g_qrm, c.eps_counter, c.eps_co, c.chi) == (0.0, 0.0, 0.0, 0.0)


def test_derived_couplings_pole():
    with pytest.raises(ResonancePoleError):
        derived_couplings(IonParams(Omega=0.5, eta=0.1, nu=1.0))


def test_chi_combines_both_rotation_angles():
    # chi = nu*eta*(eps_counter + eps_co), exact algebra
    rng = np.random.default_rng(29)
    for _ in range(100):
        nu = float(rng.uniform(0.5, 2.0))
        omega = float(rng.uniform(0.05, 2.0))
        if abs(2 * omega - nu) < 0.05:
            continue
        eta = float(rng.uniform(0.01, 1.0))
        c = derived_couplings(IonParams(Omega=omega, eta=eta, nu=nu))
        rhs = nu * eta * (c.eps_counter + c.eps_co)
        assert abs(c.chi - rhs) <= 1e-12 * abs(c.chi)


def test_small_rotation_identity_and_unitarity():
    trunc = TruncationSpec(16)
    np.testing.assert_allclose(
        small_rotation("co", 0.0, trunc), np.eye(32), rtol=0, atol=1e-14
    )
    assert is_unitary(small_rotation("counter", 0.05, T64), 1e-10)
    with pytest.raises(ValueError):
        small_rotation("sideways", 0.1, trunc)


def test_small_rotation_first_order_expansion_scaling():
    from ionqrm import annihilation

    trunc = TruncationSpec(32)
    a = annihilation(trunc)
    gen = spin_tensor_osc(pauli(Spin.PLUS), dagger(a)) - spin_tensor_osc(pauli(Spin.MINUS), a)
    remainders = []
    for eps in (0.05, 0.025):
        u = small_rotation("counter", eps, trunc)
        remainders.append(np.linalg.norm(u - np.eye(64) - eps * gen))
    assert remainders[0] / remainders[1] == pytest.approx(4.0, rel=0.15)


def test_h_dispersive_is_diagonal_with_expected_eigenvalues():
    p = IonParams(Omega=1.0, eta=0.1)
    trunc = TruncationSpec(6)
    h = h_dispersive(p, trunc)
    assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
    chi = derived_couplings(p).chi
    for n in range(6):
        assert h[n, n].real == pytest.approx(p.nu * n + p.Omega - chi * (n + 0.5))


def test_h_dispersive_eta_zero():
    p = IonParams(Omega=1.0, eta=0.0)
    trunc = TruncationSpec(5)
    expected = spin_tensor_osc(pauli(Spin.IDENTITY), number_op(trunc)) + spin_tensor_osc(
        pauli(Spin.Z), osc_identity(trunc)
    )
    np.testing.assert_allclose(h_dispersive(p, trunc), expected, rtol=0, atol=1e-14)


def test_h_dispersive_propagates_pole():
    with pytest.raises(ResonancePoleError):
        h_dispersive(IonParams(Omega=0.5, eta=0.1), TruncationSpec(8))


def test_classify_regime_fixtures():
    assert classify_regime(IonParams(Omega=0.5, eta=0.02)) is Regime.JC_RESONANT
    assert classify_regime(IonParams(Omega=0.0005, eta=0.2)) is Regime.DECOUPLING
    assert classify_regime(IonParams(Omega=1.0, eta=2.5)) is Regime.DEEP_STRONG
    # pi laser phase selects the anti-JC branch of the same resonance
    assert (
        classify_regime(IonParams(Omega=0.5, eta=0.02, phi_l=math.pi))
        is Regime.AJC_RESONANT
    )
    assert classify_regime(IonParams(Omega=1.0, eta=0.5)) is Regime.ULTRASTRONG
    assert classify_regime(IonParams(Omega=1.0, eta=0.01)) is Regime.DISPERSIVE


def test_classify_regime_scale_invariance():
    rng = np.random.default_rng(31)
    for _ in range(100):
        p = IonParams(
            nu=float(rng.uniform(0.1, 10.0)),
            Omega=float(rng.uniform(0.0, 3.0)),
            eta=float(rng.uniform(0.0, 3.0)),
            phi_l=float(rng.choice([0.0, math.pi])),
        )
        scale = float(np.exp(rng.uniform(np.log(0.01), np.log(100.0))))
        scaled = IonParams(nu=p.nu * scale, Omega=p.Omega * scale, eta=p.eta, phi_l=p.phi_l)
        assert classify_regime(p) is classify_regime(scaled)


def test_classify_regime_threshold_validation():
    with pytest.raises(ValueError):
        RegimeThresholds(ordering_factor=0.0)


def test_rotation_diagnostic_identifies_standard_convention():
    metrics = rotation_diagnostic(IonParams(Omega=0.7, eta=0.2), T32)
    # standard convention: phi_l=pi lands exactly on the minus-sign Rabi form
    # (the one h_rabi_rotated assembles), phi_l=0 on the plus-sign form;
    # the alt convention matches neither
    assert metrics["standard_phipi_to_minus"] < 1e-12
    assert metrics["standard_phi0_to_plus"] < 1e-12
    assert metrics["standard_phi0_to_minus"] > 0.1
    assert metrics["alt_phi0_to_minus"] > 0.01
    assert metrics["alt_phipi_to_minus"] > 0.01
    assert metrics["standard_unitarity_defect"] < 1e-14
    assert metrics["alt_unitarity_defect"] > 0.1
