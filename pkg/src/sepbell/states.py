"""State families: product states, separable ensembles, the psi(mu)
continuum, the maximally entangled state and Werner states.

Amplitude vectors and density matrices follow the big-endian site ordering of
:mod:`sepbell.operators`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CoefficientError, DimensionMismatchError, EnsembleError, InvalidPhaseError, ParameterError
from .operators import DEFAULT_MAX_DIM, check_size
from .pairings import PairingIndexSet

NORM_TOL = 1e-12
PSD_TOL = -1e-10
DENSE_CHECK_CAP = 4096


def _pairs_to_complex(rows) -> np.ndarray:
    return np.array([complex(re, im) for re, im in rows], dtype=complex)


def _complex_to_pairs(vec) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec).ravel()]


@dataclass
class PureState:
    n: int
    d: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=complex).ravel()
        if self.amps.size != self.d ** self.n:
            raise DimensionMismatchError(f"expected {self.d ** self.n} amplitudes, got {self.amps.size}")
        norm2 = float(np.vdot(self.amps, self.amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (squared norm {norm2!r})")

    @property
    def size(self) -> int:
        return self.d ** self.n

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n, self.d, np.outer(self.amps, self.amps.conj()))

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "amps": _complex_to_pairs(self.amps)}

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        return cls(int(data["n"]), int(data["d"]), _pairs_to_complex(data["amps"]))


@dataclass
class DensityMatrix:
    """Density matrix stored dense (``ndarray``) or sparse (``csr_array``).

    ``separable`` is a certificate flag set only by constructions that are
    separable by definition (e.g. :func:`ensemble_to_density`).
    """

    n: int
    d: int
    matrix: np.ndarray | sp.csr_array
    separable: bool = False

    def __post_init__(self) -> None:
        size = self.d ** self.n
        if self.matrix.shape != (size, size):
            raise DimensionMismatchError(f"expected a {size}x{size} matrix, got {self.matrix.shape}")

    @property
    def size(self) -> int:
        return self.d ** self.n

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def validate(self) -> None:
        """Check Hermiticity, unit trace and (below the dense cap) positivity."""
        m = self.matrix
        diff = m - m.conj().T
        if sp.issparse(diff):
            err = float(np.max(np.abs(diff.data), initial=0.0))
        else:
            err = float(np.max(np.abs(diff), initial=0.0))
        if err > NORM_TOL:
            raise ValueError(f"density matrix not Hermitian (max deviation {err:.3g})")
        tr = complex(m.diagonal().sum())
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if self.size <= DENSE_CHECK_CAP:
            lam = float(np.linalg.eigvalsh(self.dense()).min())
            if lam < PSD_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {lam!r}")

    def to_dict(self) -> dict:
        rows = [_complex_to_pairs(row) for row in self.dense()]
        return {"n": self.n, "d": self.d, "rho": rows, "separable": self.separable}

    @classmethod
    def from_dict(cls, data: dict) -> "DensityMatrix":
        mat = np.array([_pairs_to_complex(row) for row in data["rho"]], dtype=complex)
        return cls(int(data["n"]), int(data["d"]), mat, bool(data.get("separable", False)))


@dataclass
class SeparableEnsemble:
    """Weights ``p_s`` and, per term, a list of N single-qudit unit vectors."""

    weights: np.ndarray
    factors: list[list[np.ndarray]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or len(self.weights) != len(self.factors) or len(self.factors) == 0:
            raise EnsembleError("need one weight per ensemble term and at least one term")
        if np.any(self.weights <= 0):
            raise EnsembleError("ensemble weights must be strictly positive")
        if abs(self.weights.sum() - 1.0) > NORM_TOL:
            raise EnsembleError(f"ensemble weights sum to {self.weights.sum()!r}, not 1")
        shapes = {len(term) for term in self.factors}
        if len(shapes) != 1:
            raise EnsembleError("every ensemble term must have the same number of sites")
        self.factors = [[np.asarray(v, dtype=complex).ravel() for v in term] for term in self.factors]
        dims = {v.size for term in self.factors for v in term}
        if len(dims) != 1:
            raise EnsembleError("all site vectors must share one dimension")
        for term in self.factors:
            for v in term:
                if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
                    raise EnsembleError("ensemble site vectors must be unit-norm")

    @property
    def n(self) -> int:
        return len(self.factors[0])

    @property
    def d(self) -> int:
        return self.factors[0][0].size

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "factors": [[_complex_to_pairs(v) for v in term] for term in self.factors],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SeparableEnsemble":
        factors = [[_pairs_to_complex(v) for v in term] for term in data["factors"]]
        return cls(np.asarray(data["weights"], dtype=float), factors)


def random_qudit(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^d (normalized complex Gaussian)."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def kron_vectors(vectors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, vectors)


def random_product_state(n: int, d: int, seed=None) -> PureState:
    rng = np.random.default_rng(seed)
    check_size(n, d)
    vec = kron_vectors([random_qudit(d, rng) for _ in range(n)])
    return PureState(n, d, vec / np.linalg.norm(vec))


def random_ensemble(n: int, d: int, terms: int, seed=None) -> SeparableEnsemble:
    """Random separable ensemble with ``terms`` Haar-random product components."""
    rng = np.random.default_rng(seed)
    w = rng.random(terms) + 1e-3
    w = w / w.sum()
    factors = [[random_qudit(d, rng) for _ in range(n)] for _ in range(terms)]
    return SeparableEnsemble(w, factors)


def ensemble_to_density(ensemble: SeparableEnsemble, max_dim: int | None = DENSE_CHECK_CAP) -> DensityMatrix:
    """sum_s p_s kron_n |psi_s^(n)><psi_s^(n)|, flagged separable."""
    n, d = ensemble.n, ensemble.d
    size = check_size(n, d, max_dim)
    rho = np.zeros((size, size), dtype=complex)
    for w, term in zip(ensemble.weights, ensemble.factors):
        v = kron_vectors(term)
        rho += w * np.outer(v, v.conj())
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(n, d, rho, separable=True)


def plus_minus_states(
    pairings: Sequence[PairingIndexSet], coeffs: Sequence[Sequence[complex]]
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-site vectors ``|+> = sum_r c_r |i_r>`` and ``|-> = sum_r c_r |j_r>``.

    The same coefficient vector is used for both members of a site.
    """
    if len(coeffs) != len(pairings):
        raise CoefficientError(f"need one coefficient vector per site ({len(pairings)}), got {len(coeffs)}")
    plus, minus = [], []
    for pairing, c in zip(pairings, coeffs):
        c = np.asarray(c, dtype=complex).ravel()
        if c.size != pairing.num_pairs:
            raise CoefficientError(f"site with M={pairing.num_pairs} pairs needs {pairing.num_pairs} coefficients, got {c.size}")
        if abs(np.vdot(c, c).real - 1.0) > NORM_TOL:
            raise CoefficientError("coefficient vector must have unit norm")
        p = np.zeros(pairing.dim, dtype=complex)
        m = np.zeros(pairing.dim, dtype=complex)
        for cr, (i, j) in zip(c, pairing.pairs):
            p[i] = cr
            m[j] = cr
        plus.append(p)
        minus.append(m)
    return plus, minus


def uniform_coeffs(pairings: Sequence[PairingIndexSet]) -> list[np.ndarray]:
    return [np.full(p.num_pairs, 1 / np.sqrt(p.num_pairs), dtype=complex) for p in pairings]


def random_coeffs(pairings: Sequence[PairingIndexSet], seed=None) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [random_qudit(p.num_pairs, rng) for p in pairings]


def psi_mu(
    pairings: Sequence[PairingIndexSet],
    coeffs: Sequence[Sequence[complex]] | None = None,
    mu: complex = 1.0,
    max_dim: int | None = DEFAULT_MAX_DIM,
) -> PureState:
    """(|+,...,+> + mu |-,...,->) / sqrt(2) for unimodular ``mu``.

    ``coeffs`` defaults to uniform amplitudes ``1/sqrt(M)`` on every site.
    """
    mu = complex(mu)
    if abs(abs(mu) - 1.0) > 1e-12:
        raise InvalidPhaseError(f"|mu| must be 1, got {abs(mu)!r}")
    if coeffs is None:
        coeffs = uniform_coeffs(pairings)
    n, d = len(pairings), pairings[0].dim
    check_size(n, d, max_dim)
    plus, minus = plus_minus_states(pairings, coeffs)
    vec = (kron_vectors(plus) + mu * kron_vectors(minus)) / np.sqrt(2)
    return PureState(n, d, vec)


def ghz_indices(n: int, d: int) -> np.ndarray:
    """Flat indices of ``|i,i,...,i>`` for ``i = 0..d-1``."""
    stride = sum(d ** k for k in range(n))
    return np.arange(d, dtype=np.int64) * stride


def maximally_entangled(n: int, d: int, max_dim: int | None = DEFAULT_MAX_DIM) -> PureState:
    """(1/sqrt(D)) sum_i |i,...,i>."""
    size = check_size(n, d, max_dim)
    vec = np.zeros(size, dtype=complex)
    vec[ghz_indices(n, d)] = 1 / np.sqrt(d)
    return PureState(n, d, vec)


def werner_state(n: int, d: int, p: float, max_dim: int | None = DEFAULT_MAX_DIM) -> DensityMatrix:
    """p |psi_max><psi_max| + (1-p) 1 / D^N, stored sparse."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"Werner mixing parameter must lie in [0, 1], got {p!r}")
    size = check_size(n, d, max_dim)
    g = ghz_indices(n, d)
    rows = np.repeat(g, d)
    cols = np.tile(g, d)
    vals = np.full(d * d, p / d, dtype=complex)
    ghz = sp.csr_array((vals, (rows, cols)), shape=(size, size))
    noise = sp.identity(size, dtype=complex, format="csr") * ((1.0 - p) / size)
    return DensityMatrix(n, d, sp.csr_array(ghz + noise))


def maximally_mixed(n: int, d: int, max_dim: int | None = DEFAULT_MAX_DIM) -> DensityMatrix:
    return werner_state(n, d, 0.0, max_dim)


def load_state(data: dict):
    """Build a state from one of the JSON layouts (pure, density or ensemble)."""
    if "amps" in data:
        return PureState.from_dict(data)
    if "rho" in data:
        return DensityMatrix.from_dict(data)
    if "weights" in data:
        return ensemble_to_density(SeparableEnsemble.from_dict(data))
    raise ValueError("unrecognised state layout: expected 'amps', 'rho' or 'weights'")


def dump_state(state) -> str:
    if isinstance(state, (PureState, DensityMatrix, SeparableEnsemble)):
        return json.dumps(state.to_dict())
    raise TypeError(f"cannot serialise {type(state).__name__}")
