"""Validated density matrices, divergence functionals, and local-estimation checks.

All logarithms are natural.  Supports are handled by eigenvalue cutoffs:
a state eigenvalue above 1e-10 counts as support, and a reference-state
expectation below 1e-12 on such an eigenvector signals a support violation
(relative entropy +inf).  The reference state sigma must be full rank
wherever the estimation protocol is involved; that is enforced by
SigmaSpectrum, not by the divergences themselves.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

SUPPORT_CUT = 1e-10  # eigenvalues above this count as support of rho
EXPECTATION_CUT = 1e-12  # sigma-expectation below this on a supported eigenvector -> +inf
REPAIR_TOL = 1e-6  # validate_state rejects inputs needing more total correction


@dataclass(frozen=True)
class DensityMatrix:
    """A repaired, validated quantum state."""

    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending, clipped at 0) and eigenvectors as columns."""
        vals, vecs = np.linalg.eigh(self.mat)
        return np.clip(vals, 0.0, None), vecs

    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.mat)[0])


def validate_state(raw) -> DensityMatrix:
    """Hermitize, clamp tiny negative eigenvalues, renormalize the trace.

    The total applied correction (hermitian defect + clipped negative mass +
    trace defect) must stay below 1e-6, otherwise the input is rejected as
    malformed rather than silently repaired.
    """
    arr = np.asarray(raw, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    herm_defect = float(np.max(np.abs(arr - arr.conj().T))) / 2 if arr.size else 0.0
    herm = (arr + arr.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    neg_mass = float(-np.clip(vals, None, 0.0).sum())
    vals = np.clip(vals, 0.0, None)
    trace = float(vals.sum())
    trace_defect = abs(trace - 1.0)
    if trace <= 0:
        raise ValueError("matrix has no positive spectral mass")
    correction = herm_defect + neg_mass + trace_defect
    if correction > REPAIR_TOL:
        raise ValueError(
            f"input is not close enough to a density matrix (correction {correction:.3e})"
        )
    vals = vals / trace
    mat = (vecs * vals) @ vecs.conj().T
    mat = (mat + mat.conj().T) / 2
    return DensityMatrix(mat)


@dataclass(frozen=True)
class SigmaSpectrum:
    """Eigendecomposition of a full-rank reference state.

    values: eigenvalues in descending order, all positive, summing to 1.
    basis: unitary whose columns are the matching eigenvectors.
    """

    values: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def matrix(self) -> np.ndarray:
        return (self.basis * self.values) @ self.basis.conj().T


def sigma_spectrum(sigma: DensityMatrix, min_eig: float = 1e-12) -> SigmaSpectrum:
    """Diagonalize the reference state; rejects rank deficiency."""
    vals, vecs = np.linalg.eigh(sigma.mat)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    if vals[-1] <= min_eig:
        raise ValueError(
            f"reference state must be full rank (min eigenvalue {vals[-1]:.3e})"
        )
    assert abs(float(vals.sum()) - 1.0) < 1e-10
    return SigmaSpectrum(values=vals, basis=vecs)


# ------------------------------------------------------------- divergences


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """D(rho||sigma) = Tr rho (log rho - log sigma); +inf outside sigma's support."""
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    r, rv = rho.eig()
    s, sv = sigma.eig()
    overlap = np.abs(rv.conj().T @ sv) ** 2  # overlap[i, k] = |<r_i|s_k>|^2
    sigma_support = s > EXPECTATION_CUT
    for i in np.nonzero(r > SUPPORT_CUT)[0]:
        expectation = float(overlap[i] @ s)
        if expectation < EXPECTATION_CUT:
            return math.inf
        # mass escaping sigma's numerical support also signals a violation
        if float(overlap[i][~sigma_support].sum()) > EXPECTATION_CUT:
            return math.inf
    log_s = np.where(sigma_support, np.log(np.where(sigma_support, s, 1.0)), 0.0)
    entropy_term = float(sum(x * math.log(x) for x in r if x > 0))
    cross_term = float((r[:, None] * overlap[:, sigma_support] * log_s[None, sigma_support]).sum())
    return entropy_term - cross_term


def relative_varentropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Second central moment of log rho - log sigma under rho (nats squared)."""
    d_value = relative_entropy(rho, sigma)
    if not math.isfinite(d_value):
        raise ValueError("support violation: varentropy undefined")
    r, rv = rho.eig()
    s, sv = sigma.eig()
    support = s > EXPECTATION_CUT
    log_sigma = (sv[:, support] * np.log(s[support])) @ sv[:, support].conj().T
    log_sigma_sq = log_sigma @ log_sigma
    acc = 0.0
    for i in np.nonzero(r > 0)[0]:
        vec = rv[:, i]
        lr = math.log(r[i]) if r[i] > 0 else 0.0
        a = float(np.real(vec.conj() @ log_sigma @ vec))
        b = float(np.real(vec.conj() @ log_sigma_sq @ vec))
        acc += r[i] * (lr * lr - 2 * lr * a + b)
    value = acc - d_value * d_value
    return max(value, 0.0) if value > -1e-12 else value


def sandwiched_renyi(rho: DensityMatrix, sigma: DensityMatrix, alpha: float) -> float:
    """Sandwiched Renyi divergence of order alpha (alpha > 0, alpha != 1).

    (1/(alpha-1)) log Tr (sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha))^alpha.
    Requires a full-rank second argument.  Swapping the arguments evaluates
    the same functional with the roles of the states exchanged; there is no
    separate "reversed" variant.
    """
    if alpha <= 0 or alpha == 1:
        raise ValueError("need alpha > 0 and alpha != 1")
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    s, sv = np.linalg.eigh(sigma.mat)
    if s[0] <= EXPECTATION_CUT:
        raise ValueError("second argument must be full rank")
    exponent = (1.0 - alpha) / (2.0 * alpha)
    half = (sv * np.power(s, exponent)) @ sv.conj().T
    core = half @ rho.mat @ half
    core = (core + core.conj().T) / 2
    vals = np.clip(np.linalg.eigvalsh(core), 0.0, None)
    logs = np.log(vals[vals > 0])
    # log-sum-exp so extreme orders neither overflow nor underflow
    peak = float(logs.max())
    log_trace = alpha * peak + math.log(float(np.exp(alpha * (logs - peak)).sum()))
    return log_trace / (alpha - 1.0)


def renyi_curve(rho: DensityMatrix, sigma: DensityMatrix):
    """Return a memoized alpha -> sandwiched divergence map for one state pair."""
    cache: dict[float, float] = {}

    def curve(alpha: float) -> float:
        key = float(alpha)
        if key not in cache:
            cache[key] = sandwiched_renyi(rho, sigma, key)
        return cache[key]

    return curve


# ------------------------------------------------- local estimation checks


@dataclass(frozen=True)
class SldData:
    """Logarithmic-derivative data for the one-parameter family through rho."""

    operator: np.ndarray  # L = log rho - log sigma - D * I
    inner: float  # Tr rho L^2, the L-weighted quadratic form
    dual_direction: np.ndarray  # X1 = (rho L + L rho) / (2 * inner)


def _log_psd(mat: np.ndarray, cut: float = EXPECTATION_CUT) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    if vals[0] <= cut:
        raise ValueError("operator log requires full rank here")
    return (vecs * np.log(vals)) @ vecs.conj().T


def sld_quantities(rho: DensityMatrix, sigma: DensityMatrix) -> SldData:
    """The centered log-ratio operator and its quadratic form under rho.

    Both states must be full rank.  The quadratic form equals the relative
    varentropy; the dual direction X1 is traceless and pairs to 1 with the
    operator under the trace inner product.
    """
    log_rho = _log_psd(rho.mat)
    log_sigma = _log_psd(sigma.mat)
    d_value = relative_entropy(rho, sigma)
    op = log_rho - log_sigma - d_value * np.eye(rho.dim)
    op = (op + op.conj().T) / 2
    inner = float(np.real(np.trace(rho.mat @ op @ op)))
    if inner <= 0:
        dual = np.zeros_like(op)
    else:
        dual = (rho.mat @ op + op @ rho.mat) / (2 * inner)
    return SldData(operator=op, inner=inner, dual_direction=dual)


@dataclass(frozen=True)
class CramerRaoReport:
    aligned_derivative: float  # expected 1
    orthogonal_derivatives: np.ndarray  # expected all ~0
    step: float
    richardson_ratios: np.ndarray  # defect(h)/defect(h/2) per direction, where measurable
    basis_size: int


def _traceless_hermitian_basis(d: int) -> list[np.ndarray]:
    basis: list[np.ndarray] = []
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0
            basis.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j
            m[j, i] = 1j
            basis.append(m)
    for k in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(k), np.arange(k)] = 1.0
        m[k, k] = -k
        basis.append(m)
    return basis


def cramer_rao_check(
    rho: DensityMatrix, sigma: DensityMatrix, step: float = 1e-4
) -> CramerRaoReport:
    """Finite-difference check of the local-unbiasedness structure.

    Along X1 = (rho o L)/V the derivative of theta -> D(rho + theta X || sigma)
    must be 1; along every traceless Hermitian direction X_j orthogonal to L
    (trace inner product) it must be 0.  Central differences with automatic
    step shrinking keep rho + theta X positive semidefinite.
    """
    sld = sld_quantities(rho, sigma)
    if sld.inner <= 0:
        raise ValueError("degenerate direction: rho and sigma have constant log-ratio")
    d = rho.dim
    # orthogonal directions: traceless Hermitian, trace-orthogonal to the operator
    op_traceless = sld.operator - np.trace(sld.operator) / d * np.eye(d)
    raw = _traceless_hermitian_basis(d)
    coords = []
    for m in raw:
        overlap = np.real(np.trace(m @ op_traceless)) / max(
            np.real(np.trace(op_traceless @ op_traceless)), 1e-300
        )
        coords.append(m - overlap * op_traceless)
    directions: list[np.ndarray] = []
    for m in coords:  # Gram-Schmidt under the trace inner product
        for prev in directions:
            m = m - np.real(np.trace(m @ prev)) * prev
        norm = math.sqrt(max(np.real(np.trace(m @ m)), 0.0))
        if norm > 1e-9:
            directions.append(m / norm)
    min_eig = rho.min_eig()

    def derivative(direction: np.ndarray, h: float) -> float:
        spectral = float(np.linalg.norm(direction, 2))
        h_eff = min(h, 0.25 * min_eig / spectral)
        for _ in range(60):
            plus = rho.mat + h_eff * direction
            minus = rho.mat - h_eff * direction
            if np.linalg.eigvalsh(plus)[0] >= 0 and np.linalg.eigvalsh(minus)[0] >= 0:
                break
            h_eff *= 0.5
        else:
            raise ValueError("could not keep the perturbed state PSD")
        f_plus = relative_entropy(DensityMatrix(plus), sigma)
        f_minus = relative_entropy(DensityMatrix(minus), sigma)
        return (f_plus - f_minus) / (2 * h_eff)

    aligned = derivative(sld.dual_direction, step)
    aligned_half = derivative(sld.dual_direction, step / 2)
    orth = np.array([derivative(m, step) for m in directions])
    orth_half = np.array([derivative(m, step / 2) for m in directions])
    defects = np.abs(np.concatenate(([aligned - 1.0], orth)))
    defects_half = np.abs(np.concatenate(([aligned_half - 1.0], orth_half)))
    measurable = defects > 1e-9
    ratios = np.where(measurable, defects / np.maximum(defects_half, 1e-300), np.nan)
    return CramerRaoReport(
        aligned_derivative=aligned,
        orthogonal_derivatives=orth,
        step=step,
        richardson_ratios=ratios,
        basis_size=len(directions),
    )


def varentropy_growth_check(rho: DensityMatrix, sigma: DensityMatrix, t: float) -> tuple[float, float]:
    """(sqrt of relative varentropy, log d + t d) for a floor-bounded reference.

    Precondition: the reference state's minimum eigenvalue is at least
    exp(-t d).  The left side never exceeds the right on such inputs.
    """
    d = sigma.dim
    floor = math.exp(-t * d)
    if sigma.min_eig() < floor * (1 - 1e-12):
        raise ValueError("reference state violates the eigenvalue floor exp(-t d)")
    lhs = math.sqrt(max(relative_varentropy(rho, sigma), 0.0))
    rhs = math.log(d) + t * d
    return lhs, rhs


# --------------------------------------------------------------- state I/O


def save_state(path, state: DensityMatrix) -> None:
    """Write a state as JSON with real and imaginary parts."""
    payload = {
        "dim": state.dim,
        "re": [[float(x) for x in row] for row in state.mat.real],
        "im": [[float(x) for x in row] for row in state.mat.imag],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_state(path) -> DensityMatrix:
    """Read a state file: either a dense matrix or a diagonal spectrum."""
    with open(path) as fh:
        payload = json.load(fh)
    if "spectrum" in payload:
        return validate_state(np.diag([float(x) for x in payload["spectrum"]]))
    re = np.array(payload["re"], dtype=float)
    im = np.array(payload.get("im", np.zeros_like(re)), dtype=float)
    mat = re + 1j * im
    if "dim" in payload and mat.shape[0] != int(payload["dim"]):
        raise ValueError("declared dimension does not match the matrix")
    return validate_state(mat)


# ----------------------------------------------------------- constructions


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_mixed(d: int, seed: int, spectrum=None, floor: float = 0.0) -> DensityMatrix:
    """Haar-rotated state with the given (or Dirichlet-drawn) spectrum.

    floor mixes in floor * I/d to keep eigenvalues away from zero.
    """
    rng = np.random.default_rng(seed)
    if spectrum is None:
        spectrum = rng.dirichlet(np.ones(d))
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.shape != (d,) or np.any(spectrum < 0):
        raise ValueError("spectrum must be d non-negative numbers")
    spectrum = spectrum / spectrum.sum()
    u = haar_unitary(d, rng)
    mat = (u * spectrum) @ u.conj().T
    if floor:
        mat = (1 - floor) * mat + floor * np.eye(d) / d
    return validate_state(mat)


def random_pure_depolarized(d: int, seed: int, p: float) -> DensityMatrix:
    """(1-p) |psi><psi| + p I/d for a Haar-random pure state."""
    if not 0 <= p <= 1:
        raise ValueError("need 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=d) + 1j * rng.normal(size=d)
    vec = vec / np.linalg.norm(vec)
    mat = (1 - p) * np.outer(vec, vec.conj()) + p * np.eye(d) / d
    return validate_state(mat)


def diagonal_state(spectrum) -> DensityMatrix:
    """Diagonal state from an explicit spectrum."""
    return validate_state(np.diag(np.asarray(spectrum, dtype=float)))
