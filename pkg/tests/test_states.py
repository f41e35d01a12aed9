"""Tests for state validation, divergences, and the local-estimation checks."""

import math

import numpy as np
import pytest

from schurest.states import (
    DensityMatrix,
    cramer_rao_check,
    diagonal_state,
    haar_unitary,
    load_state,
    random_mixed,
    random_pure_depolarized,
    relative_entropy,
    relative_varentropy,
    renyi_curve,
    sandwiched_renyi,
    save_state,
    sigma_spectrum,
    sld_quantities,
    validate_state,
    varentropy_growth_check,
)


def classical_relent(p, s):
    return sum(pi * math.log(pi / si) for pi, si in zip(p, s) if pi > 0)


def classical_varent(p, s):
    d = classical_relent(p, s)
    return sum(pi * (math.log(pi / si) - d) ** 2 for pi, si in zip(p, s) if pi > 0)


def random_pair(d, seed, floor=0.05):
    rho = random_mixed(d, seed, floor=floor)
    sigma = random_mixed(d, seed + 1000, floor=floor)
    return rho, sigma


# ----------------------------------------------------------- validate_state


def test_validate_accepts_maximally_mixed():
    st = validate_state(np.eye(3) / 3)
    assert np.allclose(st.mat, np.eye(3) / 3)


def test_validate_repairs_small_defects():
    base = np.diag([0.6, 0.4]).astype(complex)
    base[0, 1] = 1e-9 * 1j  # tiny non-hermitian part
    st = validate_state(base * (1 + 1e-12))
    assert abs(np.trace(st.mat).real - 1.0) < 1e-14
    assert st.min_eig() >= -1e-15


def test_validate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        validate_state(np.diag([1.01, -0.01]))  # negative eigenvalue too large
    with pytest.raises(ValueError):
        validate_state(np.diag([0.7, 0.7]))  # trace too far from 1
    with pytest.raises(ValueError):
        validate_state(np.zeros((2, 3)))


def test_sigma_spectrum_orders_and_rejects_rank_deficiency():
    spec = sigma_spectrum(diagonal_state([0.1, 0.6, 0.3]))
    assert np.all(np.diff(spec.values) <= 0)
    assert np.allclose(spec.matrix(), np.diag([0.1, 0.6, 0.3]))
    with pytest.raises(ValueError):
        sigma_spectrum(diagonal_state([1.0, 0.0]))


# -------------------------------------------------------- relative entropy


def test_relative_entropy_trivial_and_classical():
    rho = diagonal_state([0.5, 0.5])
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(diagonal_state([1.0, 0.0]), diagonal_state([0.5, 0.5])) == pytest.approx(
        math.log(2), abs=1e-12
    )
    p, s = (0.8, 0.15, 0.05), (0.3, 0.5, 0.2)
    got = relative_entropy(diagonal_state(p), diagonal_state(s))
    assert got == pytest.approx(classical_relent(p, s), abs=1e-12)


def test_relative_entropy_plus_state():
    plus = validate_state(np.full((2, 2), 0.5))
    sigma = diagonal_state([0.5, 0.5])
    d_value = relative_entropy(plus, sigma)
    assert d_value == pytest.approx(math.log(2), abs=1e-12)
    # -2 log fidelity lower-bounds the divergence; fidelity of a pure state
    # with sigma is <plus|sigma|plus> under the square root
    fid = math.sqrt(0.5)
    assert -2 * math.log(fid) <= d_value + 1e-12


def test_relative_entropy_support_violation():
    rho = diagonal_state([1.0, 0.0])
    sigma_bad = diagonal_state([0.0, 1.0])
    assert relative_entropy(rho, sigma_bad) == math.inf
    sigma_ok = diagonal_state([1.0, 0.0])
    assert relative_entropy(rho, sigma_ok) == pytest.approx(0.0, abs=1e-12)


def test_relative_entropy_nonnegative_random():
    for seed in range(30):
        d = 2 + seed % 3
        rho, sigma = random_pair(d, seed)
        val = relative_entropy(rho, sigma)
        assert val >= -1e-12
    rho, _ = random_pair(3, 999)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)


def test_unitary_invariance_of_divergences():
    rng = np.random.default_rng(7)
    rho, sigma = random_pair(3, 5)
    u = haar_unitary(3, rng)
    rho_u = DensityMatrix(u @ rho.mat @ u.conj().T)
    sigma_u = DensityMatrix(u @ sigma.mat @ u.conj().T)
    assert relative_entropy(rho_u, sigma_u) == pytest.approx(
        relative_entropy(rho, sigma), abs=1e-10
    )
    assert relative_varentropy(rho_u, sigma_u) == pytest.approx(
        relative_varentropy(rho, sigma), abs=1e-10
    )
    assert sandwiched_renyi(rho_u, sigma_u, 1.7) == pytest.approx(
        sandwiched_renyi(rho, sigma, 1.7), abs=1e-10
    )


# ------------------------------------------------------------- varentropy


def test_varentropy_classical_and_degenerate():
    p, s = (0.9, 0.1), (0.4, 0.6)
    got = relative_varentropy(diagonal_state(p), diagonal_state(s))
    assert got == pytest.approx(classical_varent(p, s), abs=1e-12)
    rho = random_mixed(3, 3, floor=0.1)
    assert relative_varentropy(rho, rho) == pytest.approx(0.0, abs=1e-10)


def test_varentropy_moment_expansion_agrees():
    # operator-square route vs matrix-moment route
    for seed in range(10):
        rho, sigma = random_pair(2 + seed % 2, seed)
        log_rho = _matrix_log(rho.mat)
        log_sigma = _matrix_log(sigma.mat)
        delta = log_rho - log_sigma
        d_value = float(np.real(np.trace(rho.mat @ delta)))
        v_moment = float(np.real(np.trace(rho.mat @ delta @ delta))) - d_value**2
        assert relative_varentropy(rho, sigma) == pytest.approx(v_moment, abs=1e-10)


def _matrix_log(mat):
    vals, vecs = np.linalg.eigh(mat)
    return (vecs * np.log(vals)) @ vecs.conj().T


# -------------------------------------------------------- sandwiched Renyi


def test_renyi_trivial_and_classical():
    rho = random_mixed(3, 11, floor=0.1)
    assert sandwiched_renyi(rho, rho, 0.5) == pytest.approx(0.0, abs=1e-10)
    assert sandwiched_renyi(
        diagonal_state([1.0, 0.0]), diagonal_state([0.5, 0.5]), 0.5
    ) == pytest.approx(math.log(2), abs=1e-10)
    p, s = (0.7, 0.2, 0.1), (0.2, 0.3, 0.5)
    for alpha in (0.3, 0.6, 1.5, 2.5):
        classical = math.log(
            sum(pi**alpha * si ** (1 - alpha) for pi, si in zip(p, s))
        ) / (alpha - 1)
        got = sandwiched_renyi(diagonal_state(p), diagonal_state(s), alpha)
        assert got == pytest.approx(classical, abs=1e-10)


def test_renyi_monotone_and_continuous_at_one():
    for seed in range(8):
        rho, sigma = random_pair(2, seed)
        d_value = relative_entropy(rho, sigma)
        curve = renyi_curve(rho, sigma)
        grid = [0.3, 0.5, 0.8, 0.999, 1.001, 1.2, 2.0]
        values = [curve(a) for a in grid]
        assert all(values[i] <= values[i + 1] + 1e-9 for i in range(len(values) - 1))
        assert abs(curve(0.999) - d_value) < 5e-3 * (1 + abs(d_value))
        assert abs(curve(1.001) - d_value) < 5e-3 * (1 + abs(d_value))


def test_renyi_rejects_bad_alpha():
    rho, sigma = random_pair(2, 0)
    with pytest.raises(ValueError):
        sandwiched_renyi(rho, sigma, 1.0)
    with pytest.raises(ValueError):
        sandwiched_renyi(rho, sigma, -0.5)


# --------------------------------------------------- SLD and finite differences


def test_sld_identities():
    for seed in range(12):
        d = 2 + seed % 2
        rho, sigma = random_pair(d, seed, floor=0.1)
        sld = sld_quantities(rho, sigma)
        v_value = relative_varentropy(rho, sigma)
        assert sld.inner == pytest.approx(v_value, abs=1e-10)
        assert np.trace(rho.mat @ sld.operator).real == pytest.approx(0.0, abs=1e-10)
        assert np.trace(sld.dual_direction).real == pytest.approx(0.0, abs=1e-10)
        assert np.trace(sld.dual_direction @ sld.operator).real == pytest.approx(
            1.0, abs=1e-9
        )


def test_sld_trivial_pair():
    rho = diagonal_state([0.6, 0.4])
    sld = sld_quantities(rho, rho)
    assert np.allclose(sld.operator, 0.0, atol=1e-12)
    assert sld.inner == pytest.approx(0.0, abs=1e-12)


def test_cramer_rao_commuting_pair():
    rho = diagonal_state([0.7, 0.3])
    sigma = diagonal_state([0.4, 0.6])
    report = cramer_rao_check(rho, sigma, step=1e-4)
    assert report.aligned_derivative == pytest.approx(1.0, abs=1e-5)
    assert np.all(np.abs(report.orthogonal_derivatives) < 1e-5)


def test_cramer_rao_random_pairs():
    for seed in range(6):
        d = 2 + seed % 2
        rho, sigma = random_pair(d, seed, floor=0.15)
        report = cramer_rao_check(rho, sigma, step=1e-4)
        assert report.basis_size == d * d - 2
        assert report.aligned_derivative == pytest.approx(1.0, abs=1e-5)
        assert np.all(np.abs(report.orthogonal_derivatives) < 1e-5)


def test_cramer_rao_richardson_trend():
    rho = diagonal_state([0.75, 0.25])
    sigma = diagonal_state([0.35, 0.65])
    report = cramer_rao_check(rho, sigma, step=2e-3)
    ratios = report.richardson_ratios
    measurable = ratios[np.isfinite(ratios)]
    # central differences have quadratic truncation error: halving the step
    # shrinks a measurable defect by roughly 4
    assert measurable.size >= 1
    assert np.all((measurable > 2.0) & (measurable < 8.0))


# --------------------------------------------------- varentropy growth check


def test_varentropy_growth_check_uniform_reference():
    d = 3
    t = math.log(d) / d
    rho = random_mixed(d, 2)
    lhs, rhs = varentropy_growth_check(rho, diagonal_state([1 / d] * d), t)
    assert rhs == pytest.approx(2 * math.log(d))
    assert lhs <= rhs


def test_varentropy_growth_check_floor_violation():
    with pytest.raises(ValueError):
        varentropy_growth_check(
            diagonal_state([0.5, 0.5]), diagonal_state([0.999, 0.001]), t=1.0
        )


def test_varentropy_growth_check_skewed_reference():
    d = 3
    sigma = diagonal_state([0.9, 0.05, 0.05])
    t = -math.log(0.05) / d
    for seed in range(5):
        rho = random_mixed(d, seed)
        lhs, rhs = varentropy_growth_check(rho, sigma, t)
        assert lhs <= rhs


# ------------------------------------------------------------------- I/O


def test_state_io_roundtrip(tmp_path):
    rho = random_mixed(3, 42)
    path = tmp_path / "rho.json"
    save_state(path, rho)
    again = load_state(path)
    assert np.allclose(rho.mat, again.mat, atol=1e-15)
    save_state(path, rho)
    first = path.read_bytes()
    save_state(path, rho)
    assert path.read_bytes() == first  # byte-identical rewrite


def test_state_io_spectrum_format(tmp_path):
    path = tmp_path / "sigma.json"
    path.write_text('{"spectrum": [0.5, 0.5]}\n')
    st = load_state(path)
    assert np.allclose(st.mat, np.eye(2) / 2)


# ------------------------------------------------------------- generators


def test_generators_reproducible_and_valid():
    a = random_mixed(3, 9)
    b = random_mixed(3, 9)
    assert np.array_equal(a.mat, b.mat)
    c = random_pure_depolarized(4, 1, 0.3)
    vals = np.linalg.eigvalsh(c.mat)
    assert vals.min() >= 0.3 / 4 - 1e-12
    assert abs(vals.sum() - 1) < 1e-12
    top = vals.max()
    assert top == pytest.approx(0.7 + 0.3 / 4, abs=1e-12)
    d2 = random_mixed(2, 5, spectrum=[0.9, 0.1])
    assert np.allclose(np.sort(np.linalg.eigvalsh(d2.mat)), [0.1, 0.9], atol=1e-12)
