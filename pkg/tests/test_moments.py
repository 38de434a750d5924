import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from vanspec.moments import (
    asymptotic_moment,
    density_power_integrals,
    moment_table,
    uniform_moment,
)
from vanspec.sampling import uniform_distribution
from vanspec.scenarios import fading_distribution, hole_distribution


def test_integrals_uniform():
    I = density_power_integrals(uniform_distribution(1), 4)
    assert I.method == "closed-form"
    assert I.values == (1.0, 1.0, 1.0, 1.0)


def test_integrals_scaled_uniform():
    I = density_power_integrals(hole_distribution(0.5, d=1), 3)
    assert I.values == pytest.approx((1.0, 2.0, 4.0))


def test_integrals_fading_closed_form_vs_quadrature():
    dist = fading_distribution(5.0)
    I = density_power_integrals(dist, 2)
    assert I.method == "closed-form"
    # independent quadrature of the squared density
    val, _ = integrate.dblquad(
        lambda z2, z1: float(dist.density(np.array([[z1, z2]]))[0]) ** 2,
        -0.5, 0.5, -0.5, 0.5, epsabs=1e-12, epsrel=1e-10,
    )
    assert I.values[0] == pytest.approx(1.0, abs=1e-9)
    assert I.values[1] == pytest.approx(val, rel=1e-7)


def test_integrals_quadrature_path_matches_closed_form():
    dist = fading_distribution(5.0)
    bare = dist.__class__(
        d=dist.d, density=dist.density, support_measure=1.0,
        sampler=dist.sampler, gx=None, id="fading-bare",
    )
    I = density_power_integrals(bare, 2)
    assert I.method == "quadrature"
    assert I.values == pytest.approx(density_power_integrals(dist, 2).values, rel=1e-6)


def test_integrals_log_convexity():
    # I_k^2 <= I_{k-1} I_{k+1} on closed-form cases
    for dist in (hole_distribution(0.3), fading_distribution(8.0)):
        I = density_power_integrals(dist, 5).values
        for k in range(1, 4):
            assert I[k] ** 2 <= I[k - 1] * I[k + 1] * (1 + 1e-12)


def test_moment_examples():
    assert asymptotic_moment(1, 3, 0.7, [1.0]) == pytest.approx(1.0)
    assert asymptotic_moment(2, 1, 1.0, [1.0, 1.0]) == pytest.approx(2.0)
    assert asymptotic_moment(4, 1, 1.0, [1.0] * 4) == pytest.approx(44 / 3)
    assert uniform_moment(3, 1, 1.0) == pytest.approx(5.0)


def test_moment_table_examples():
    t = moment_table(uniform_distribution(1), 1, 0.5, 3)
    assert t.moments == pytest.approx((1.0, 1.5, 2.75))
    t2 = moment_table(uniform_distribution(2), 2, 1.0, 4)
    assert t2.moments[3] == pytest.approx(14 + 4 / 9)
    t3 = moment_table(hole_distribution(0.5, d=1), 1, 1.0, 2)
    assert t3.moments[1] == pytest.approx(3.0)


def test_moment_requires_enough_integrals():
    with pytest.raises(ValueError):
        asymptotic_moment(3, 1, 1.0, [1.0, 1.0])


def test_moment_rejects_bad_args():
    with pytest.raises(ValueError):
        asymptotic_moment(0, 1, 1.0, [1.0])
    with pytest.raises(ValueError):
        asymptotic_moment(2, 1, -0.5, [1.0, 1.0])
    with pytest.raises(ValueError):
        moment_table(uniform_distribution(2), 1, 1.0, 2)


@settings(max_examples=40, deadline=None)
@given(
    c=st.floats(0.05, 1.0),
    beta=st.floats(0.05, 3.0),
    p=st.integers(1, 5),
    d=st.integers(1, 3),
)
def test_scaling_consistency_identity(c, beta, p, d):
    # moments of the scaled-support density equal c^(1-p) times the uniform
    # moments at aspect c*beta (exact identity of the partition sum)
    I = [c ** (1 - k) for k in range(1, p + 1)]
    lhs = asymptotic_moment(p, d, beta, I)
    rhs = c ** (1 - p) * uniform_moment(p, d, c * beta)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_beta_polynomial_structure():
    # M_p(beta) - beta^(p-1) has positive coefficients and is increasing in beta
    for p in (2, 3, 4):
        vals = [uniform_moment(p, 1, b) for b in (0.1, 0.5, 1.0, 2.0)]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


def test_hankel_psd():
    for beta in (0.2, 0.5, 1.0):
        ms = [uniform_moment(p, 1, beta) for p in range(1, 7)]
        full = [1.0] + ms
        H = np.array([[full[i + j] for j in range(4)] for i in range(4)])
        assert np.linalg.eigvalsh(H).min() > -1e-9
