"""Independent numerical checks: product-state maximization, extremal
spectra, the partial-transpose criterion and finite-shot sampling of the
correlations through local measurement settings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ParameterError, SizeLimitError
from .operators import GlobalOperator, local_sigma, require_hermitian, setting_decomposition
from .pairings import PairingIndexSet
from .states import DensityMatrix, PureState, random_qudit, werner_state
from .witnesses import bisect_crossing

DENSE_EIG_CAP = 4096
ITERATIVE_TOL = 1e-8


@dataclass
class OptimizationResult:
    best_value: float
    argument: list[np.ndarray]
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "argument": [[[float(z.real), float(z.imag)] for z in v] for v in self.argument],
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _ascend_site(sigma: np.ndarray, psi: np.ndarray, max_iter: int, tol: float, step: float) -> tuple[np.ndarray, float, int, bool]:
    # Gradient ascent of |<psi|sigma|psi>|^2 followed by projection to the unit sphere.
    sigma_h = sigma.conj().T
    z = np.vdot(psi, sigma @ psi)
    f = abs(z) ** 2
    for it in range(1, max_iter + 1):
        grad = np.conj(z) * (sigma @ psi) + z * (sigma_h @ psi)
        cand = psi + step * grad
        cand /= np.linalg.norm(cand)
        z_new = np.vdot(cand, sigma @ cand)
        f_new = abs(z_new) ** 2
        done = abs(f_new - f) < tol
        psi, z, f = cand, z_new, f_new
        if done:
            return psi, float(abs(z)), it, True
    return psi, float(abs(z)), max_iter, False


def maximize_over_products(
    pairings: Sequence[PairingIndexSet],
    restarts: int = 8,
    seed=None,
    max_iter: int = 5000,
    tol: float = 1e-15,
    step: float = 0.25,
) -> OptimizationResult:
    """Maximize ``|prod_n <psi_n|sigma_n|psi_n>|`` over product pure states.

    The objective factorizes, so each site is maximized on its own with
    ``restarts`` random starts of projected gradient ascent.
    """
    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    best_vecs, total_iter, all_converged = [], 0, True
    value = 1.0
    for pairing in pairings:
        sigma = local_sigma(pairing)
        site_best, site_vec, site_conv = -1.0, None, False
        for _ in range(restarts):
            psi, val, its, conv = _ascend_site(sigma, random_qudit(pairing.dim, rng), max_iter, tol, step)
            total_iter += its
            if val > site_best:
                site_best, site_vec, site_conv = val, psi, conv
        best_vecs.append(site_vec)
        all_converged &= site_conv
        value *= site_best
    return OptimizationResult(float(value), best_vecs, total_iter, all_converged)


def product_value(pairings: Sequence[PairingIndexSet], vectors: Sequence[np.ndarray]) -> float:
    """Re-evaluate ``|prod_n <psi_n|sigma_n|psi_n>|`` for given site vectors."""
    out = 1.0 + 0j
    for pairing, v in zip(pairings, vectors):
        out *= np.vdot(v, local_sigma(pairing) @ v)
    return float(abs(out))


def spectral_extremes(operator, dense_cap: int = DENSE_EIG_CAP) -> tuple[float, float]:
    """Smallest and largest eigenvalue of a Hermitian operator.

    Dense ``eigvalsh`` up to ``dense_cap``; Lanczos (``eigsh``) above it.
    """
    mat = operator.matrix if isinstance(operator, GlobalOperator) else operator
    require_hermitian(mat)
    size = mat.shape[0]
    if size <= dense_cap:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        w = np.linalg.eigvalsh(dense)
        return float(w[0]), float(w[-1])
    lo = spla.eigsh(mat, k=1, which="SA", tol=ITERATIVE_TOL, return_eigenvectors=False)
    hi = spla.eigsh(mat, k=1, which="LA", tol=ITERATIVE_TOL, return_eigenvectors=False)
    return float(lo[0]), float(hi[0])


def partial_transpose(rho: np.ndarray, n: int, d: int, sites: Sequence[int]) -> np.ndarray:
    """Transpose the row and column indices of the given sites."""
    rho = np.asarray(rho)
    tensor = rho.reshape((d,) * (2 * n))
    axes = list(range(2 * n))
    for s in sites:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return tensor.transpose(axes).reshape(d**n, d**n)


def _check_partition(n: int, partition: Sequence[int]) -> list[int]:
    sites = sorted(set(int(s) for s in partition))
    if not sites or len(sites) >= n or sites[0] < 0 or sites[-1] >= n:
        raise ParameterError(f"partition must be a nonempty proper subset of sites 0..{n - 1}, got {list(partition)}")
    return sites


def ppt_min_eigenvalue(rho: DensityMatrix | PureState, partition: Sequence[int] = (0,), dense_cap: int = DENSE_EIG_CAP) -> float:
    """Minimum eigenvalue of the partial transpose over ``partition``.

    A negative value certifies entanglement across that cut.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    sites = _check_partition(rho.n, partition)
    if rho.size > dense_cap:
        raise SizeLimitError(f"partial transpose needs a dense matrix; dimension {rho.size} exceeds the cap {dense_cap}")
    pt = partial_transpose(rho.dense(), rho.n, rho.d, sites)
    pt = (pt + pt.conj().T) / 2
    return float(np.linalg.eigvalsh(pt)[0])


def ppt_threshold(n: int, d: int, partition: Sequence[int] = (0,), tol: float = 1e-10) -> float | None:
    """Werner mixing parameter above which the partial transpose turns negative."""
    _check_partition(n, partition)
    return bisect_crossing(lambda p: -ppt_min_eigenvalue(werner_state(n, d, p), partition), tol=tol)


def ppt_threshold_closed_form(n: int, d: int) -> float:
    return 1.0 / (1.0 + d ** (n - 1))


@dataclass
class SampleEstimate:
    mean: float
    std_error: float
    shots_per_setting: int
    num_settings: int
    term_means: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "shots_per_setting": self.shots_per_setting,
            "num_settings": self.num_settings,
            "term_means": list(self.term_means),
        }


def measurement_basis(op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors with a deterministic phase.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive.
    """
    w, v = np.linalg.eigh(op)
    for col in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, col])))
        v[:, col] *= np.exp(-1j * np.angle(v[k, col]))
    return w, v


def _apply_site(tensor: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(mat, tensor, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def outcome_distribution(rho: DensityMatrix | PureState, bases: Sequence[np.ndarray]) -> np.ndarray:
    """Joint probabilities of the product-basis outcomes, shaped ``(D,)*N``."""
    n, d = rho.n, rho.d
    if isinstance(rho, PureState):
        t = rho.amps.reshape((d,) * n)
        for s, u in enumerate(bases):
            t = _apply_site(t, u.conj().T, s)
        probs = np.abs(t) ** 2
    else:
        t = rho.dense().reshape((d,) * (2 * n))
        for s, u in enumerate(bases):
            t = _apply_site(t, u.conj().T, s)
            t = _apply_site(t, u.T, n + s)
        diag = t.reshape(d**n, d**n).diagonal().real
        probs = diag.reshape((d,) * n)
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` joint outcomes site by site from conditional marginals.

    Returns an integer array of shape ``(shots, N)``.
    """
    n = probs.ndim
    # marginals[k] is the joint distribution of the first k+1 sites.
    marginals = [probs.sum(axis=tuple(range(k + 1, n))) for k in range(n)]
    out = np.empty((shots, n), dtype=np.int64)
    for k in range(n):
        if k == 0:
            cond = np.broadcast_to(marginals[0], (shots, probs.shape[0]))
        else:
            cond = marginals[k][tuple(out[:, j] for j in range(k))]
        cdf = np.cumsum(cond, axis=1)
        u = rng.random(shots) * cdf[:, -1]
        out[:, k] = np.minimum((cdf < u[:, None]).sum(axis=1), probs.shape[0] - 1)
    return out


def _estimate_part(rho, terms, shots: int, rng: np.random.Generator) -> SampleEstimate:
    mean, var, term_means = 0.0, 0.0, []
    for term in terms:
        bases = [measurement_basis(f) for f in term.factors]
        probs = outcome_distribution(rho, [v for _, v in bases])
        outcomes = sample_outcomes(probs, shots, rng)
        values = np.ones(shots)
        for s, (w, _) in enumerate(bases):
            values *= w[outcomes[:, s]]
        m = float(values.mean())
        se = float(values.std(ddof=1) / np.sqrt(shots)) if shots > 1 else 0.0
        term_means.append(m)
        mean += term.coefficient * m
        var += (term.coefficient * se) ** 2
    return SampleEstimate(mean, float(np.sqrt(var)), shots, len(terms), term_means)


def sample_correlation(
    rho: DensityMatrix | PureState,
    pairings: Sequence[PairingIndexSet],
    shots_per_setting: int,
    seed=None,
    dense_cap: int = DENSE_EIG_CAP,
) -> tuple[SampleEstimate, SampleEstimate]:
    """Finite-shot estimates of Tr(rho Sigma_I^+) and Tr(rho Sigma_I^-).

    Each Hermitian part is a signed sum of ``2**(N-1)`` tensor products of
    local Hermitian factors. Every product is measured with local projective
    measurements in the factors' eigenbases, ``shots_per_setting`` times, and
    the per-shot product of local eigenvalues is averaged. Standard errors of
    the settings are combined in quadrature.
    """
    if int(shots_per_setting) != shots_per_setting or shots_per_setting < 1:
        raise ParameterError(f"shots_per_setting must be a positive integer, got {shots_per_setting!r}")
    if rho.size > dense_cap:
        raise SizeLimitError(f"sampling needs the dense state; dimension {rho.size} exceeds the cap {dense_cap}")
    rng = np.random.default_rng(seed)
    re = _estimate_part(rho, setting_decomposition(pairings, "plus"), int(shots_per_setting), rng)
    im = _estimate_part(rho, setting_decomposition(pairings, "minus"), int(shots_per_setting), rng)
    return re, im
