"""Local pairing operators and their N-site tensor products.

Local operators are plain dense ``numpy`` arrays of shape ``(D, D)``. Global
operators on ``N`` sites are sparse and wrapped in :class:`GlobalOperator`.

Tensor-index convention: site 0 is the most significant base-``D`` digit of
the row/column index (big-endian), i.e. ``|a_0 a_1 ... a_{N-1}>`` sits at
``sum_n a_n * D**(N-1-n)``. This matches ``np.kron(op_0, op_1, ...)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, NotHermitianError, SizeLimitError
from .pairings import PairingIndexSet

DEFAULT_MAX_DIM = 65536
HERMITIAN_TOL = 1e-14


def local_sigma(pairing: PairingIndexSet) -> np.ndarray:
    """sigma_I = 2 * sum_r |i_r><j_r| + eta |k><k|."""
    d = pairing.dim
    out = np.zeros((d, d), dtype=complex)
    for i, j in pairing.pairs:
        out[i, j] = 2.0
    if pairing.unpaired is not None:
        out[pairing.unpaired, pairing.unpaired] = pairing.eta
    return out


def hermitian_part(op):
    """(A + A^dagger) / 2 for dense or sparse ``op``."""
    return (op + op.conj().T) / 2


def antihermitian_part(op):
    """(A - A^dagger) / 2i for dense or sparse ``op``."""
    return (op - op.conj().T) / 2j


def local_sigma_plus(pairing: PairingIndexSet) -> np.ndarray:
    return hermitian_part(local_sigma(pairing))


def local_sigma_minus(pairing: PairingIndexSet) -> np.ndarray:
    return antihermitian_part(local_sigma(pairing))


def conjugate_local(op: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    """Return ``U op U^dagger`` for a single-qudit unitary ``U``."""
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.shape != op.shape:
        raise DimensionMismatchError(f"unitary shape {unitary.shape} does not match operator {op.shape}")
    if not np.allclose(unitary @ unitary.conj().T, np.eye(op.shape[0]), atol=1e-12):
        raise ValueError("conjugating matrix is not unitary")
    return unitary @ op @ unitary.conj().T


def is_hermitian(op, tol: float = HERMITIAN_TOL) -> bool:
    if sp.issparse(op):
        diff = (op - op.conj().T).tocoo()
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True)
class GlobalOperator:
    """A sparse operator on ``n`` qudits of dimension ``d`` (big-endian)."""

    n: int
    d: int
    matrix: sp.csr_array

    @property
    def size(self) -> int:
        return self.d ** self.n

    @property
    def nnz(self) -> int:
        return int(self.matrix.count_nonzero())

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @property
    def H(self) -> "GlobalOperator":
        return GlobalOperator(self.n, self.d, self.matrix.conj().T.tocsr())

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return is_hermitian(self.matrix, tol)

    def _combine(self, other: "GlobalOperator", sign: int) -> "GlobalOperator":
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionMismatchError("operators act on different spaces")
        return GlobalOperator(self.n, self.d, (self.matrix + sign * other.matrix).tocsr())

    def __add__(self, other: "GlobalOperator") -> "GlobalOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "GlobalOperator") -> "GlobalOperator":
        return self._combine(other, -1)

    def __matmul__(self, vec):
        return self.matrix @ vec

    def triplets(self) -> list[tuple[int, int, complex]]:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), complex(coo.data[k])) for k in order if coo.data[k] != 0]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "triplets": [[r, c, v.real, v.imag] for r, c, v in self.triplets()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GlobalOperator":
        n, d = int(data["n"]), int(data["d"])
        size = d ** n
        trip = data["triplets"]
        rows = np.array([t[0] for t in trip], dtype=np.int64)
        cols = np.array([t[1] for t in trip], dtype=np.int64)
        vals = np.array([complex(t[2], t[3]) for t in trip], dtype=complex)
        mat = sp.csr_array((vals, (rows, cols)), shape=(size, size))
        return cls(n, d, mat)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GlobalOperator":
        return cls.from_dict(json.loads(text))


def check_size(n: int, d: int, max_dim: int | None = DEFAULT_MAX_DIM) -> int:
    """Return ``d**n``, raising :class:`SizeLimitError` above ``max_dim``."""
    size = d ** n
    if max_dim is not None and size > max_dim:
        raise SizeLimitError(f"Hilbert-space dimension {d}^{n} = {size} exceeds the cap {max_dim} (max_dim)")
    return size


def _site_dim(pairings: Sequence[PairingIndexSet]) -> int:
    if len(pairings) == 0:
        raise ValueError("at least one site is required")
    dims = {p.dim for p in pairings}
    if len(dims) != 1:
        raise DimensionMismatchError(f"all sites must share one dimension, got {sorted(dims)}")
    return dims.pop()


def tensor_sparse(factors: Sequence[np.ndarray], max_dim: int | None = DEFAULT_MAX_DIM) -> GlobalOperator:
    """Big-endian tensor product of dense local matrices, stored sparse.

    Only products of local nonzeros are formed, so the cost is proportional
    to the number of nonzeros of the result.
    """
    d = factors[0].shape[0]
    n = len(factors)
    size = check_size(n, d, max_dim)
    rows = np.zeros(1, dtype=np.int64)
    cols = np.zeros(1, dtype=np.int64)
    vals = np.ones(1, dtype=complex)
    for f in factors:
        if f.shape != (d, d):
            raise DimensionMismatchError("local factors must all be D x D")
        r, c = np.nonzero(f)
        v = f[r, c]
        rows = (rows[:, None] * d + r[None, :]).ravel()
        cols = (cols[:, None] * d + c[None, :]).ravel()
        vals = (vals[:, None] * v[None, :]).ravel()
    return GlobalOperator(n, d, sp.csr_array((vals, (rows, cols)), shape=(size, size)))


def global_sigma(pairings: Sequence[PairingIndexSet], max_dim: int | None = DEFAULT_MAX_DIM) -> GlobalOperator:
    """Sigma_I, the tensor product of ``local_sigma`` over all sites.

    Each site may carry its own index set.
    """
    _site_dim(pairings)
    return tensor_sparse([local_sigma(p) for p in pairings], max_dim)


def global_sigma_plus(pairings: Sequence[PairingIndexSet], max_dim: int | None = DEFAULT_MAX_DIM) -> GlobalOperator:
    s = global_sigma(pairings, max_dim)
    return GlobalOperator(s.n, s.d, hermitian_part(s.matrix).tocsr())


def global_sigma_minus(pairings: Sequence[PairingIndexSet], max_dim: int | None = DEFAULT_MAX_DIM) -> GlobalOperator:
    s = global_sigma(pairings, max_dim)
    return GlobalOperator(s.n, s.d, antihermitian_part(s.matrix).tocsr())


@dataclass(frozen=True)
class SettingTerm:
    """One measurement setting: ``coefficient * kron(factors)``.

    ``signs`` records which local part each site uses: ``"+"`` for
    sigma^+ and ``"-"`` for sigma^-.
    """

    coefficient: float
    signs: str
    factors: tuple[np.ndarray, ...]


def setting_decomposition(pairings: Sequence[PairingIndexSet], part: str = "plus") -> list[SettingTerm]:
    """Expand Sigma_I^+ (``part="plus"``) or Sigma_I^- (``part="minus"``).

    Writing each local sigma as ``sigma^+ + i sigma^-`` and expanding the
    tensor product, the sign pattern with ``m`` minus factors contributes
    ``i**m``. Its real part lands in Sigma^+ and its imaginary part in
    Sigma^-, so each Hermitian part keeps exactly ``2**(N-1)`` terms.
    """
    if part not in ("plus", "minus"):
        raise ValueError(f"part must be 'plus' or 'minus', got {part!r}")
    _site_dim(pairings)
    plus = [local_sigma_plus(p) for p in pairings]
    minus = [local_sigma_minus(p) for p in pairings]
    terms = []
    for signs in itertools.product("+-", repeat=len(pairings)):
        m = signs.count("-")
        phase = 1j ** m
        coef = phase.real if part == "plus" else phase.imag
        if round(coef) == 0:
            continue
        factors = tuple(plus[s] if c == "+" else minus[s] for s, c in enumerate(signs))
        terms.append(SettingTerm(float(round(coef)), "".join(signs), factors))
    return terms


def reconstruct(terms: Sequence[SettingTerm], max_dim: int | None = DEFAULT_MAX_DIM) -> GlobalOperator:
    """Sum ``coefficient * kron(factors)`` over the given setting terms."""
    total = None
    for t in terms:
        op = tensor_sparse(list(t.factors), max_dim).matrix * t.coefficient
        total = op if total is None else total + op
    n = len(terms[0].factors)
    d = terms[0].factors[0].shape[0]
    return GlobalOperator(n, d, total.tocsr())


def require_hermitian(op, tol: float = 1e-12) -> None:
    if not is_hermitian(op, tol):
        raise NotHermitianError("operator is not Hermitian")
