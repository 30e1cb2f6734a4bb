"""Finite sections, Neumann and contour oracles, ideal projection, decay fits."""

import math

import numpy as np
import pytest

from convdom import (
    ContourNodeError,
    Cyclic,
    IdealSubspace,
    IntegerLattice,
    InversionConfig,
    Kernel,
    SectionInversionError,
    contour_inverse,
    finite_section_inverse,
    fit_decay,
    generate_kernel,
    ideal_project,
    inverse_residual,
    neumann_inverse,
    shift_kernel,
)
from convdom.generate import Profile

Z = IntegerLattice(1)
Z8 = Cyclic(8)


def geometric_shift_setup(weight=0.5, window=45):
    kernel = shift_kernel(Z, 1, weight, t_radius=window)
    cfg = InversionConfig(z=1.0, radii=(10, 20, 30, 40), inner_ratio=0.5)
    return kernel, cfg


def hermitian_band(weight=0.2 + 0.1j, diag=0.1, window=40):
    base = shift_kernel(Z, 1, weight, t_radius=window)
    kernel = base + base.involution()
    return kernel + Kernel.identity(Z, 1, window).scale(diag)


# -- finite sections ---------------------------------------------------------------


def test_zero_kernel_inverse_is_scalar():
    inverse, report = finite_section_inverse(Kernel.zero(Z, 1), InversionConfig(z=2.0, radii=(4, 8)))
    assert inverse.support() == []
    assert report.stabilized
    assert report.residual == 0.0
    assert report.l1_partial_sums == []


def test_shift_inverse_matches_geometric_series():
    kernel, cfg = geometric_shift_setup()
    inverse, report = finite_section_inverse(kernel, cfg)
    env = report.final_envelope()
    for n in range(1, 21):
        assert abs(env.value((n,)) - 0.5**n) <= 1e-8
        assert abs(inverse.kernel_at((n,), (0,))[0, 0] - (-0.5) ** n) <= 1e-8
    assert env.value((0,)) == 0.0
    assert env.value((-1,)) == 0.0
    assert report.stabilized
    assert report.residual <= 1e-12


def test_finite_group_section_matches_direct_inverse():
    group = Cyclic(6)
    rng = np.random.default_rng(17)
    entries = {}
    for s in group.elements():
        for t in group.elements():
            entries[(s, t)] = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    kernel = Kernel.identity(group, 2).scale(8.0) + Kernel(group, 2, entries).scale(0.05)
    inverse, report = finite_section_inverse(kernel, InversionConfig(z=0.0, radii=(3,)))
    assert report.stabilized and report.full_group
    pts = group.elements()
    direct = np.linalg.inv(kernel.to_dense(pts))
    assert np.max(np.abs(inverse.to_dense(pts) - direct)) <= 1e-12
    assert report.residual <= 1e-12


def test_section_singular_raises_at_scale_error():
    zero = Kernel.zero(Z, 1)
    with pytest.raises(SectionInversionError):
        finite_section_inverse(zero, InversionConfig(z=0.0, radii=(3,)))


def test_condition_cap_exceeded():
    group = Cyclic(2)
    kernel = Kernel(group, 1, {((0,), (0,)): [[1.0]], ((0,), (1,)): [[1e-15]]})
    with pytest.raises(SectionInversionError) as info:
        finite_section_inverse(kernel, InversionConfig(z=0.0, radii=(1,), condition_cap=1e12))
    assert info.value.condition > 1e12


def test_config_validation():
    with pytest.raises(ValueError):
        InversionConfig(radii=())
    with pytest.raises(ValueError):
        InversionConfig(radii=(4, 4))
    with pytest.raises(ValueError):
        InversionConfig(radii=(4, 2))
    with pytest.raises(ValueError):
        InversionConfig(radii=(4,), inner_ratio=0.0)
    with pytest.raises(ValueError):
        InversionConfig(radii=(4,), stabilization_tol=0.0)


def test_unstabilized_single_radius_reported():
    kernel, _ = geometric_shift_setup()
    _inverse, report = finite_section_inverse(kernel, InversionConfig(z=1.0, radii=(12,)))
    assert not report.stabilized


# -- residual check -----------------------------------------------------------------


def test_residual_detects_wrong_inverse():
    kernel, cfg = geometric_shift_setup()
    inverse, _report = finite_section_inverse(kernel, cfg)
    good = inverse_residual(kernel, 1.0, inverse, 10)
    bad = inverse_residual(kernel, 1.0, inverse.scale(1.5), 10)
    assert good <= 1e-12
    assert bad > 0.05


# -- Neumann oracle -----------------------------------------------------------------


def test_neumann_zero_kernel():
    inverse, bound = neumann_inverse(Kernel.zero(Z, 1), z=2.0, terms=5)
    assert inverse.support() == []
    assert bound == 0.0


def test_neumann_matches_finite_sections():
    kernel, cfg = geometric_shift_setup()
    section, report = finite_section_inverse(kernel, cfg)
    series, bound = neumann_inverse(kernel, 1.0, terms=60)
    window = report.final_inner_radius()
    gap = (section - series).restrict_to_ball(window).envelope_norm()
    assert gap <= bound + cfg.stabilization_tol


def test_neumann_refuses_divergent_series():
    kernel = shift_kernel(Z, 1, 2.0, t_radius=5)
    with pytest.raises(ValueError):
        neumann_inverse(kernel, z=1.0, terms=10)
    with pytest.raises(ValueError):
        neumann_inverse(kernel, z=0.0, terms=10)


def test_neumann_tail_bound_squares_when_terms_double():
    kernel = shift_kernel(Z, 1, 0.5, t_radius=5)
    _, b1 = neumann_inverse(kernel, z=1.0, terms=10)
    _, b2 = neumann_inverse(kernel, z=1.0, terms=20)
    q = 0.5
    assert b2 == pytest.approx(b1 * q**10)


# -- contour oracle -----------------------------------------------------------------


def test_contour_scalar_case():
    kernel = Kernel.identity(Z8, 1).scale(2.0)
    cfg = InversionConfig(radii=(4,))
    inverse = contour_inverse(kernel, radius_eps=1.0, nodes=64, cfg=cfg)
    expected = Kernel.identity(Z8, 1).scale(0.5)
    assert inverse.max_block_difference(expected) <= 1e-10


def test_contour_diagonal_case():
    entries = {((0,), t): np.diag([2.0, 3.0]) for t in Z8.elements()}
    kernel = Kernel(Z8, 2, entries)
    inverse = contour_inverse(kernel, radius_eps=1.0, nodes=64, cfg=InversionConfig(radii=(4,)))
    expected = Kernel(Z8, 2, {((0,), t): np.diag([0.5, 1.0 / 3.0]) for t in Z8.elements()})
    assert inverse.max_block_difference(expected) <= 1e-8


def test_contour_agrees_with_direct_inverse():
    kernel = Kernel.identity(Z8, 1).scale(2.0) + shift_kernel(Z8, 1, 0.4)
    cfg = InversionConfig(radii=(4,))
    contour = contour_inverse(kernel, radius_eps=1.0, nodes=64, cfg=cfg)
    direct, _ = finite_section_inverse(kernel, cfg)
    assert contour.max_block_difference(direct) <= 1e-6


def test_contour_reports_failing_node():
    # alpha = 1 at node 0 makes alpha - 1 singular.
    kernel = Kernel.identity(Z8, 1).scale(-1.0)
    with pytest.raises(ContourNodeError) as info:
        contour_inverse(kernel, radius_eps=1.0, nodes=16, cfg=InversionConfig(radii=(4,)))
    assert info.value.node == 0


def test_contour_rejects_too_few_nodes():
    kernel = Kernel.identity(Z8, 1).scale(2.0)
    with pytest.raises(ValueError):
        contour_inverse(kernel, radius_eps=1.0, nodes=4, cfg=InversionConfig(radii=(4,)))


# -- ideal projection ----------------------------------------------------------------


def exact_dyadic_kernel(radius=30):
    entries = {((s,), (0,)): np.array([[2.0 ** -abs(s)]]) for s in range(-radius, radius + 1)}
    return Kernel(Z, 1, entries)


def test_compact_support_covering_is_noop():
    kernel = exact_dyadic_kernel(radius=5)
    projected = ideal_project(kernel, IdealSubspace.compact_support(5))
    assert projected.max_block_difference(kernel) == 0.0


def test_projection_error_is_geometric_shell_sum():
    kernel = exact_dyadic_kernel(radius=30)
    beta = kernel.min_envelope()
    for n in range(2, 11):
        subspace = IdealSubspace.compact_support(n)
        measured = (kernel - ideal_project(kernel, subspace)).envelope_norm()
        bound = beta.l1_distance(subspace.bound_for(beta))
        assert measured == bound
        analytic = 2.0 * (2.0**-n - 2.0**-30)
        assert abs(measured - analytic) <= 1e-15


def test_truncation_above_max_is_noop():
    kernel = exact_dyadic_kernel(radius=10)
    projected = ideal_project(kernel, IdealSubspace.truncation(2.0))
    assert projected.max_block_difference(kernel) == 0.0


def test_truncation_caps_envelope():
    kernel = exact_dyadic_kernel(radius=4)
    projected = ideal_project(kernel, IdealSubspace.truncation(0.25))
    env = projected.min_envelope()
    assert max(env.values.values()) <= 0.25
    # Entries below the cap are untouched.
    assert projected.kernel_at((3,), (0,))[0, 0] == 2.0**-3


def test_nested_ideals_give_monotone_errors():
    kernel = exact_dyadic_kernel(radius=20)
    errors = []
    for n in range(1, 12):
        projected = ideal_project(kernel, IdealSubspace.compact_support(n))
        errors.append((kernel - projected).envelope_norm())
    assert errors == sorted(errors, reverse=True)


def test_ideal_project_rejects_oversized_bound():
    class Oversized:
        def bound_for(self, beta):
            return beta.cap(1e9).convolve(beta)  # exceeds beta somewhere

    kernel = exact_dyadic_kernel(radius=3)
    with pytest.raises(ValueError):
        ideal_project(kernel, Oversized())


def test_ideal_subspace_validation():
    with pytest.raises(ValueError):
        IdealSubspace.compact_support(-1)
    with pytest.raises(ValueError):
        IdealSubspace.truncation(-0.5)


# -- decay fitting -----------------------------------------------------------------


def test_fit_decay_recovers_geometric_rate():
    kernel, cfg = geometric_shift_setup()
    _inverse, report = finite_section_inverse(kernel, cfg)
    rate, r2 = fit_decay(report)
    assert abs(rate - math.log(0.5)) <= 0.02
    assert r2 > 0.999
    assert report.fitted_rate == rate


def test_fit_decay_refuses_empty_and_unstable_reports():
    _, report = finite_section_inverse(Kernel.zero(Z, 1), InversionConfig(z=2.0, radii=(4, 8)))
    with pytest.raises(ValueError):
        fit_decay(report)
    kernel, _ = geometric_shift_setup()
    _, narrow = finite_section_inverse(kernel, InversionConfig(z=1.0, radii=(12,)))
    with pytest.raises(ValueError):
        fit_decay(narrow)


def test_diagonally_dominant_band_has_negative_rate():
    kernel = hermitian_band()
    z = 1.0 + kernel.envelope_norm()
    cfg = InversionConfig(z=z, radii=(12, 24, 36), inner_ratio=0.5)
    inverse, report = finite_section_inverse(kernel, cfg)
    assert report.stabilized
    rate, r2 = fit_decay(report)
    assert rate < 0
    assert r2 > 0.99
    series, bound = neumann_inverse(kernel, z, terms=40)
    gap = (inverse - series).restrict_to_ball(report.final_inner_radius()).envelope_norm()
    assert gap <= bound + cfg.stabilization_tol


def test_inverse_of_adjoint_is_adjoint_of_inverse():
    kernel = hermitian_band(weight=0.15 - 0.2j, diag=0.05)
    z = 1.0 + kernel.envelope_norm()
    cfg = InversionConfig(z=z, radii=(12, 24), inner_ratio=0.5)
    inv_adj, _ = finite_section_inverse(kernel.involution(), InversionConfig(z=np.conj(z), radii=(12, 24)))
    inv, _ = finite_section_inverse(kernel, cfg)
    gap = inv_adj.max_block_difference(inv.involution())
    assert gap <= 1e-8


def test_partial_sums_converge_for_decaying_envelope():
    kernel, cfg = geometric_shift_setup()
    _, report = finite_section_inverse(kernel, cfg)
    sums = report.l1_partial_sums
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    increments = [b - a for a, b in zip(sums, sums[1:])]
    # Geometric tail: increments shrink by about a factor 2 per shell.
    for a, b in zip(increments[1:10], increments[2:11]):
        assert b <= 0.75 * a
