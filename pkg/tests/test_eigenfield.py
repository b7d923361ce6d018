import numpy as np
import pytest

from specreg.corpus import analytic, example
from specreg.eigenfield import (EigenField, align_gauge, compose_spectral_factor, decompose, fourier_of_field,
                                one_sidedness, scalar_outer_factor)
from specreg.errors import BadParams, ChannelCollapse, LogDivergence, RankNotConstant
from specreg.spectral import FrequencyGrid, SpectralMeasure, trapezoid_integral

from conftest import smooth_density

GAUGES = ("phase-continuity", "anchor-real", "none")


def nodes(n=4096):
    return FrequencyGrid(n).nodes


def test_decompose_regular(regular):
    E = decompose(regular)
    assert E.rank == 2 and E.dim == 3
    assert np.allclose(E.lambdas, 1, atol=1e-14)


def test_decompose_rank_switch(type1):
    with pytest.raises(RankNotConstant) as info:
        decompose(type1)
    profile = info.value.profile
    assert np.array_equal(profile, np.where(np.abs(nodes()) <= 1, 2, 1))


def test_decaying_eigenvalue_is_not_a_rank_switch():
    # lambda_2 ~ e^{-1/|w|} dips below tolerance near 0 on about 1.4% of nodes
    E = decompose(example("type2"))
    assert E.rank == 2
    assert 0.01 < np.mean(E.rank_profile != 2) < 0.02


def test_decompose_identity():
    E = decompose(SpectralMeasure(np.tile(np.eye(4), (16, 1, 1))))
    assert E.rank == 4 and np.allclose(E.lambdas, 1)


def test_rank_override_and_bad_order(type1):
    assert decompose(type1, rank=2).rank == 2
    with pytest.raises(BadParams):
        decompose(type1, order="zigzag")


@pytest.mark.parametrize("gauge", GAUGES)
def test_reconstruction_and_orthonormality(gauge):
    S = SpectralMeasure(smooth_density(256, d=3))
    E = align_gauge(decompose(S), gauge)
    f = S.density
    err = np.linalg.norm(E.reconstruct() - f, axis=(1, 2))
    assert np.all(err <= 1e-8 * (1 + np.linalg.norm(f, axis=(1, 2))))
    gram = np.einsum("mai,maj->mij", E.U.conj(), E.U)
    assert np.abs(gram - np.eye(E.rank)).max() < 1e-10


def test_gauge_invariant_observables():
    S = SpectralMeasure(smooth_density(256, d=3, seed=4))
    E = decompose(S)
    fields = [align_gauge(E, g) for g in GAUGES]
    P0 = np.einsum("mai,mbi->mab", fields[0].U[:, :, :2], fields[0].U[:, :, :2].conj())
    for F in fields[1:]:
        assert np.abs(F.lambdas - fields[0].lambdas).max() < 1e-10
        P = np.einsum("mai,mbi->mab", F.U[:, :, :2], F.U[:, :, :2].conj())
        assert np.abs(P - P0).max() < 1e-10


def test_constant_field_unchanged():
    U = np.tile(np.array([[1, 0], [0, 1j], [0, 0]], dtype=complex), (64, 1, 1))
    A = align_gauge(EigenField.from_field(U), "phase-continuity")
    for j in range(2):
        ratio = A.U[:, :, j][np.abs(U[:, :, j]) > 0] / U[:, :, j][np.abs(U[:, :, j]) > 0]
        assert np.allclose(np.abs(ratio), 1)
        assert np.allclose(ratio, ratio[0])


def test_aligned_field_is_continuous_and_equivalent(regular_analytic_field):
    ref = regular_analytic_field.U
    A = align_gauge(regular_analytic_field, "phase-continuity").U
    # same field up to a unimodular factor per channel and node
    overlap = np.abs(np.einsum("mai,mai->mi", ref.conj(), A))
    assert np.allclose(overlap, 1, atol=1e-12)
    jumps = np.linalg.norm(np.diff(A, axis=0, append=A[:1]), axis=(1, 2))
    assert jumps.max() < 1e-12
    assert one_sidedness(fourier_of_field(align_gauge(regular_analytic_field))).verdict == "one_sided"


def _scrambled_alignment(n):
    S = SpectralMeasure(smooth_density(n, d=3, seed=7))
    E = align_gauge(decompose(S), "phase-continuity")
    rng = np.random.default_rng(0)
    scrambled = E.U * np.exp(2j * np.pi * rng.random((n, 1, E.rank)))
    B = align_gauge(EigenField(E.lambdas, scrambled), "phase-continuity").U
    return E.U, scrambled, B


def test_alignment_undoes_random_phases():
    ref, scrambled, B = _scrambled_alignment(512)
    assert np.linalg.norm(np.diff(scrambled, axis=0), axis=(1, 2)).max() > 1
    # parallel transport is unique up to one phase per channel
    ratio = np.einsum("mai,mai->mi", ref.conj(), B)
    assert np.allclose(ratio, ratio[:1], atol=1e-10)
    # adjacent-node differences shrink like 1/N
    jumps = []
    for n in (512, 1024):
        _, _, B = _scrambled_alignment(n)
        jumps.append(np.linalg.norm(np.diff(B, axis=0, append=B[:1]), axis=(1, 2)).max())
    assert jumps[1] < 0.6 * jumps[0]


def test_anchor_real():
    S = SpectralMeasure(smooth_density(64, seed=3))
    A = align_gauge(decompose(S), "anchor-real").U
    lead = np.take_along_axis(A, np.argmax(np.abs(A), axis=1)[:, None, :], axis=1)
    assert np.abs(lead.imag).max() < 1e-14 and lead.real.min() > 0


def test_channel_collapse():
    U = np.zeros((16, 2, 1), dtype=complex)
    U[:8, 0, 0] = 1
    U[8:, 1, 0] = 1
    with pytest.raises(ChannelCollapse) as info:
        align_gauge(EigenField.from_field(U))
    assert info.value.node == 8 and info.value.channel == 0


def test_unknown_gauge(regular_field):
    with pytest.raises(BadParams):
        align_gauge(regular_field, "sideways")


def test_track_mode_follows_crossing():
    n = 256
    omega = nodes(n)
    a, b = (1 + np.cos(omega)) / (2 * np.pi), (1 - np.cos(omega)) / (2 * np.pi)
    f = np.zeros((n, 2, 2))
    f[:, 0, 0], f[:, 1, 1] = a, b
    sort = decompose(SpectralMeasure(f), rank=2)
    track = decompose(SpectralMeasure(f), rank=2, order="track")
    assert np.all(sort.lambdas[:, 0] >= sort.lambdas[:, 1])
    assert np.allclose(track.lambdas[:, 0], track.lambdas[0, 0] * 0 + b) or \
        np.allclose(track.lambdas[:, 0], a)
    assert np.allclose(np.abs(track.U[:, :, 0]), np.abs(track.U[:1, :, 0]))


def test_fourier_constant_field():
    U = np.tile(np.array([[0.6], [0.8j]]), (32, 1, 1))
    F = fourier_of_field(EigenField.from_field(U))
    assert np.allclose(F.coef(0), U[0])
    assert np.abs(np.delete(F.coeffs, 16, axis=0)).max() < 1e-15
    assert F.negative_tail == 0
    assert one_sidedness(F) == ("one_sided", 0.0)


def test_fourier_of_g_entry():
    """Coefficients 1 and -2 of g; the exact value is sqrt(2)/pi (see acceptance suite)."""
    n = 8192
    U = analytic("type3_illustration").field(nodes(n))
    F = fourier_of_field(EigenField.from_field(U))
    # closed form: mean of |cos(3w/2)| / sqrt(2) over a period
    exact = np.sqrt(2) / np.pi
    assert F.coef(1)[0, 0] == pytest.approx(exact, abs=1e-3)
    assert F.coef(-2)[0, 0] == pytest.approx(exact, abs=1e-3)
    assert one_sidedness(F).verdict == "two_sided"


def test_regular_field_energy_at_one(regular_analytic_field):
    F = fourier_of_field(regular_analytic_field)
    assert F.negative_tail < 1e-10
    e = F.energies
    assert e[F.orders == 1][0] == pytest.approx(F.energy, rel=1e-12)
    assert one_sidedness(F).verdict == "one_sided"


@pytest.mark.parametrize("gauge", GAUGES)
def test_parseval(gauge):
    S = SpectralMeasure(smooth_density(512, seed=11))
    E = align_gauge(decompose(S), gauge)
    F = fourier_of_field(E)
    direct = trapezoid_integral(np.sum(np.abs(E.U) ** 2, axis=(1, 2))) / (2 * np.pi)
    assert F.energy == pytest.approx(direct, rel=1e-8)
    assert 0 <= F.negative_tail <= 1


def test_outer_factor_of_constant():
    D = scalar_outer_factor(np.ones(64))
    assert np.allclose(D.D, np.sqrt(2 * np.pi))
    assert D.delta[0] == pytest.approx(np.sqrt(2 * np.pi))
    assert np.abs(D.delta[1:]).max() < 1e-14


def test_outer_factor_ma1():
    omega = nodes()
    lam = np.abs(1 + 0.5 * np.exp(-1j * omega)) ** 2 / (2 * np.pi)
    D = scalar_outer_factor(lam)
    assert abs(D.delta[0]) == pytest.approx(1, abs=1e-6)
    assert abs(D.delta[1]) == pytest.approx(0.5, abs=1e-6)
    assert np.allclose(D.D / (1 + 0.5 * np.exp(-1j * omega)), D.D[0] / (1 + 0.5 * np.exp(-1j * omega[0])))
    assert D.log_integral == pytest.approx(2 * np.pi * np.log(1 / (2 * np.pi)), abs=1e-10)


def test_outer_factor_smooth_properties():
    omega = nodes()
    lam = np.exp(np.cos(omega) + 0.3 * np.sin(2 * omega)) * (1.5 + np.cos(3 * omega))
    D = scalar_outer_factor(lam)
    assert np.max(np.abs(np.abs(D.D) ** 2 / (2 * np.pi * lam) - 1)) < 1e-6
    energy = np.abs(D.delta) ** 2
    assert energy[len(omega) // 4:].sum() < 1e-6 * energy.sum()


def test_outer_factor_divergence():
    with pytest.raises(LogDivergence):
        scalar_outer_factor(analytic("type2").f22(nodes()))
    with pytest.raises(LogDivergence):
        scalar_outer_factor(np.full(64, 1e-200))


def test_compose_regular(regular_analytic_field, regular):
    Fac = compose_spectral_factor(regular_analytic_field)
    assert np.allclose(Fac.phi, regular_analytic_field.U * np.sqrt(2 * np.pi))
    recon = np.einsum("mai,mbi->mab", Fac.phi, Fac.phi.conj()) / (2 * np.pi)
    assert np.abs(recon - regular.density).max() < 1e-12
    assert Fac.reconstruction_error < 1e-12


def test_compose_identity():
    E = align_gauge(decompose(SpectralMeasure(np.tile(np.eye(2), (64, 1, 1)))))
    Fac = compose_spectral_factor(E)
    assert np.allclose(np.abs(Fac.phi), np.sqrt(2 * np.pi) * np.eye(2))
    assert Fac.reconstruction_error < 1e-12


def test_compose_ma1():
    E = align_gauge(decompose(example("scalar_ma1", theta=0.5)))
    Fac = compose_spectral_factor(E)
    b = Fac.b[:, 0, 0]
    assert abs(b[0]) == pytest.approx(1, abs=1e-6)
    assert abs(b[1]) == pytest.approx(0.5, abs=1e-6)
    assert np.abs(b[2:]).max() < 1e-6
    assert Fac.reconstruction_error < 1e-6
