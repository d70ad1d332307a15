import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from bssk.disorder import DisorderMatrix, make_distribution, sample_disorder
from bssk.errors import DimensionError, DomainError, ParameterError
from bssk.spectra import (
    ClassicalLocations,
    Spectrum,
    classical_locations,
    gram_eigenvalues,
    mp_density,
    mp_law,
    mp_log_transform,
    mp_stieltjes,
    mp_stieltjes_prime,
    mp_tail,
    rigidity_report,
    rigidity_to_json,
    spectrum_to_csv,
)

# median of MP(1/2,1/2): bisection value, matched by the semicircle-mapping
# oracle F_sc(sqrt(g)) = 3/4 to 5e-16
MEDIAN_HALF = 0.6527759416335699


def _matrix(entries) -> DisorderMatrix:
    entries = np.asarray(entries, dtype=np.float64)
    return DisorderMatrix(
        rows=entries.shape[0], cols=entries.shape[1], entries=entries, seed=0
    )


def test_gram_identity_2x2():
    spec = gram_eigenvalues(_matrix(np.eye(2)))
    assert np.allclose(spec.values, [0.5, 0.5], atol=1e-15)


def test_gram_rank_one_hand_computed():
    spec = gram_eigenvalues(_matrix([[1.0, 1.0], [1.0, 1.0]]))
    assert np.allclose(spec.values, [2.0, 0.0], atol=1e-14)


def test_gram_zero_matrix():
    spec = gram_eigenvalues(_matrix(np.zeros((3, 2))))
    assert np.array_equal(spec.values, [0.0, 0.0])


def test_gram_matches_singular_values():
    rng = np.random.default_rng(0)
    for _ in range(5):
        J = _matrix(rng.standard_normal((20, 10)))
        spec = gram_eigenvalues(J)
        sv = np.sort(np.linalg.svd(J.entries / math.sqrt(20), compute_uv=False))[::-1] ** 2
        assert np.max(np.abs(spec.values - sv)) <= 1e-8 * spec.values[0]


def test_gram_descending_and_nonnegative():
    J = sample_disorder(make_distribution("gaussian"), 30, 12, seed=4)
    spec = gram_eigenvalues(J)
    assert np.all(np.diff(spec.values) <= 0)
    assert spec.values[-1] >= 0.0


def test_mp_law_edges():
    law = mp_law(0.5, 0.5)
    assert law.d_minus == pytest.approx(0.0, abs=1e-15)
    assert law.d_plus == pytest.approx(4.0, abs=1e-14)
    law = mp_law(0.64, 0.36)
    assert law.d_minus == pytest.approx(0.0625, abs=1e-14)
    assert law.d_plus == pytest.approx(3.0625, abs=1e-14)


def test_mp_law_swaps_ratios():
    law = mp_law(0.36, 0.64)
    assert law.swapped and law.r1 == 0.64
    assert law.d_plus == pytest.approx(3.0625, abs=1e-14)


def test_mp_law_rejects_bad_ratios():
    with pytest.raises(ParameterError):
        mp_law(0.5, 0.6)
    with pytest.raises(ParameterError):
        mp_law(-0.2, 1.2)


def test_mp_density_values():
    law = mp_law(0.5, 0.5)
    assert mp_density(law, 2.0) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-12)
    assert mp_density(law, law.d_plus) == 0.0
    assert mp_density(law, law.d_plus + 1.0) == 0.0
    assert mp_density(law, law.d_minus) == 0.0


@pytest.mark.parametrize("r1", [0.5, 0.64, 0.7, 0.9])
def test_mp_density_mass_one(r1):
    law = mp_law(r1, 1.0 - r1)
    assert abs(mp_tail(law, law.d_minus)[0] - 1.0) <= 1e-10


@pytest.mark.parametrize("r1", [0.5, 0.64, 0.7])
def test_mp_stieltjes_vs_quadrature(r1):
    law = mp_law(r1, 1.0 - r1)
    for z in (law.d_plus + 0.1, law.d_plus + 1.0, 10.0):
        oracle = integrate.quad(
            lambda x: mp_density(law, x) / (z - x),
            law.d_minus,
            law.d_plus,
            limit=400,
        )[0]
        assert abs(mp_stieltjes(law, z) - oracle) <= 1e-8


def test_mp_stieltjes_known_values():
    law = mp_law(0.5, 0.5)
    assert mp_stieltjes(law, 4.0) == pytest.approx(0.5, abs=1e-12)
    assert mp_stieltjes(law, 4.5) == pytest.approx(1.0 / 3.0, abs=1e-12)
    z = 1e6
    assert z * mp_stieltjes(law, z) == pytest.approx(1.0, rel=1e-5)


def test_mp_stieltjes_below_support_branch():
    law = mp_law(0.7, 0.3)
    z = 0.5 * law.d_minus
    oracle = integrate.quad(
        lambda x: mp_density(law, x) / (z - x), law.d_minus, law.d_plus, limit=400
    )[0]
    assert abs(mp_stieltjes(law, z) - oracle) <= 1e-8
    assert mp_stieltjes(law, z) < 0.0


def test_mp_stieltjes_domain_errors():
    law = mp_law(0.5, 0.5)
    with pytest.raises(DomainError):
        mp_stieltjes(law, 2.0)
    with pytest.raises(DomainError):
        mp_stieltjes(law, 0.0)


@pytest.mark.parametrize("r1", [0.5, 0.64, 0.7])
def test_mp_log_transform_vs_quadrature(r1):
    law = mp_law(r1, 1.0 - r1)
    for z in (law.d_plus + 0.5, law.d_plus + 2.0, 10.0):
        oracle = integrate.quad(
            lambda x: mp_density(law, x) * np.log(z - x),
            law.d_minus,
            law.d_plus,
            limit=400,
        )[0]
        assert abs(mp_log_transform(law, z) - oracle) <= 1e-8


def test_mp_log_transform_known_value():
    law = mp_law(0.5, 0.5)
    assert mp_log_transform(law, 4.5) == pytest.approx(0.5 + math.log(2.0), abs=1e-12)


def test_mp_log_transform_tail_behavior():
    law = mp_law(0.64, 0.36)
    z = 1e8
    assert abs(mp_log_transform(law, z) - math.log(z)) <= 1e-6


def test_mp_log_transform_derivative_matches_stieltjes():
    law = mp_law(0.5, 0.5)
    z, h = 5.0, 1e-6
    fd = (mp_log_transform(law, z + h) - mp_log_transform(law, z - h)) / (2.0 * h)
    assert abs(fd - mp_stieltjes(law, z)) <= 1e-8


def test_mp_stieltjes_prime_matches_finite_difference():
    law = mp_law(0.7, 0.3)
    z, h = law.d_plus + 0.7, 1e-6
    fd = (mp_stieltjes(law, z + h) - mp_stieltjes(law, z - h)) / (2.0 * h)
    assert abs(mp_stieltjes_prime(law, z) - fd) <= 1e-7


def test_mp_log_transform_domain():
    law = mp_law(0.5, 0.5)
    with pytest.raises(DomainError):
        mp_log_transform(law, law.d_plus)
    with pytest.raises(DomainError):
        mp_log_transform(law, 1.0)


def test_square_root_edge_constant():
    # density(d+ - t^2)/t tends to a positive constant as t -> 0
    law = mp_law(0.5, 0.5)
    ts = np.array([1e-2, 1e-3, 1e-4])
    ratios = np.array([mp_density(law, law.d_plus - t * t) / t for t in ts])
    c_edge = 2.0 / (math.pi * (math.sqrt(law.d_plus) - math.sqrt(law.d_minus)) ** 2) * math.sqrt(
        law.d_plus - law.d_minus
    ) / law.d_plus
    assert ratios[-1] == pytest.approx(c_edge, rel=1e-4)
    assert np.all(ratios > 0)


def test_classical_locations_median():
    law = mp_law(0.5, 0.5)
    locs = classical_locations(law, 1)
    assert locs.g[0] == pytest.approx(MEDIAN_HALF, abs=1e-12)


def test_classical_locations_two_points():
    law = mp_law(0.5, 0.5)
    locs = classical_locations(law, 2)
    tails = mp_tail(law, locs.g)
    assert np.allclose(tails, [0.25, 0.75], atol=1e-12)
    assert 0.0 < locs.g[1] < locs.g[0] < 4.0


@pytest.mark.parametrize("r1,n", [(0.5, 50), (0.7, 64)])
def test_classical_locations_residuals_and_monotonicity(r1, n):
    law = mp_law(r1, 1.0 - r1)
    locs = classical_locations(law, n)
    target = (np.arange(1, n + 1) - 0.5) / n
    assert np.max(np.abs(mp_tail(law, locs.g) - target)) <= 1e-12
    assert np.all(np.diff(locs.g) < 0)
    assert locs.g[0] < law.d_plus and locs.g[-1] > law.d_minus


def test_classical_locations_residual_scipy_oracle():
    # independent quadrature route for the tail integral at a few quantiles
    law = mp_law(0.64, 0.36)
    locs = classical_locations(law, 10)
    for k in (1, 5, 10):
        oracle = integrate.quad(
            lambda x: mp_density(law, x), locs.g[k - 1], law.d_plus, limit=400
        )[0]
        assert abs(oracle - (k - 0.5) / 10) <= 1e-9


def test_rigidity_report_zero_and_forced():
    law = mp_law(0.5, 0.5)
    n = 50
    locs = classical_locations(law, n)
    spec = Spectrum(values=locs.g.copy(), n1=n, n2=n)
    rep = rigidity_report(spec, locs, epsilon=0.3)
    assert rep.max_ratio == 0.0 and rep.violations == 0
    bumped = locs.g.copy()
    bumped[4] += 1.0
    rep2 = rigidity_report(Spectrum(values=bumped, n1=n, n2=n), locs, epsilon=0.3)
    assert rep2.violations >= 1


def test_rigidity_report_length_mismatch():
    law = mp_law(0.5, 0.5)
    locs = classical_locations(law, 5)
    spec = Spectrum(values=np.linspace(3.0, 0.1, 4), n1=4, n2=4)
    with pytest.raises(DimensionError):
        rigidity_report(spec, locs, epsilon=0.3)


@given(st.floats(0.501, 0.95), st.integers(2, 40))
@settings(max_examples=25, deadline=None)
def test_quantiles_strictly_inside_support(r1, n):
    law = mp_law(r1, 1.0 - r1)
    locs = classical_locations(law, n)
    assert np.all(locs.g > law.d_minus)
    assert np.all(locs.g < law.d_plus)
    assert np.all(np.diff(locs.g) < 0)


def test_spectrum_csv_and_rigidity_json():
    J = sample_disorder(make_distribution("gaussian"), 6, 3, seed=1)
    spec = gram_eigenvalues(J)
    buf = io.StringIO()
    spectrum_to_csv(spec, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 4
    law = mp_law(2.0 / 3.0, 1.0 / 3.0)
    locs = classical_locations(law, 3)
    rep = rigidity_report(spec, locs, epsilon=0.3)
    parsed = json.loads(rigidity_to_json(rep))
    assert set(parsed) == {"max_ratio", "violations"}
