"""Index sets that label the local pairing operators.

An index set splits the basis labels ``0..D-1`` of one qudit into disjoint
ordered pairs ``(i, j)`` with ``i < j``. When ``D`` is odd one label ``k`` is
left unpaired and carries a unimodular phase ``eta``; for even ``D`` the phase
is fixed to zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InvalidDimensionError, InvalidPhaseError

PHASE_TOL = 1e-12


def _check_dim(dim: int) -> None:
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"qudit dimension must be an integer >= 2, got {dim!r}")


def _check_phase(eta: complex) -> complex:
    eta = complex(eta)
    if abs(abs(eta) - 1.0) > PHASE_TOL:
        raise InvalidPhaseError(f"|eta| must be 1 for odd dimension, got |eta| = {abs(eta)!r}")
    return eta


@dataclass(frozen=True)
class PairingIndexSet:
    """One choice of index set for a single qudit of dimension ``dim``.

    Attributes
    ----------
    dim : int
        Qudit dimension D.
    pairs : tuple of (int, int)
        ``M`` disjoint pairs with ``i < j``, sorted by first element.
    unpaired : int or None
        The leftover label ``k``; present iff ``dim`` is odd.
    eta : complex
        Phase attached to ``|k><k|``; 0 for even ``dim``, unimodular otherwise.
    """

    dim: int
    pairs: tuple[tuple[int, int], ...]
    unpaired: int | None = None
    eta: complex = 0j

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        for i, j in pairs:
            if not i < j:
                raise ValueError(f"pair ({i}, {j}) must satisfy i < j")
        labels = [x for pair in pairs for x in pair]
        if self.dim % 2 == 0:
            if self.unpaired is not None:
                raise ValueError("even dimension admits no unpaired index")
            object.__setattr__(self, "eta", 0j)
        else:
            if self.unpaired is None:
                raise ValueError("odd dimension requires an unpaired index")
            labels.append(int(self.unpaired))
            object.__setattr__(self, "eta", _check_phase(self.eta))
        if sorted(labels) != list(range(self.dim)):
            raise ValueError(f"index set must cover 0..{self.dim - 1} exactly once, got {sorted(labels)}")

    @property
    def num_pairs(self) -> int:
        """The pair count M."""
        return len(self.pairs)

    def key(self) -> tuple:
        """Canonical sort/serialization key."""
        return (self.pairs, -1 if self.unpaired is None else self.unpaired)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "pairs": [list(p) for p in self.pairs],
            "unpaired": self.unpaired,
            "eta": [self.eta.real, self.eta.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PairingIndexSet":
        eta = data.get("eta", [0.0, 0.0])
        if isinstance(eta, (list, tuple)):
            eta = complex(eta[0], eta[1])
        return cls(
            dim=int(data["dim"]),
            pairs=tuple(tuple(p) for p in data["pairs"]),
            unpaired=data.get("unpaired"),
            eta=complex(eta),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PairingIndexSet":
        return cls.from_dict(json.loads(text))


def _perfect_matchings(labels: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    # Pair the smallest label with each remaining one, recurse on the rest.
    if not labels:
        yield []
        return
    first, rest = labels[0], labels[1:]
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in _perfect_matchings(remaining):
            yield [(first, partner)] + tail


def enumerate_pairings(dim: int, eta: complex = 1.0) -> list[PairingIndexSet]:
    """All index sets for dimension ``dim`` in canonical order.

    Sets are sorted lexicographically by their (sorted) pair list and then
    by the unpaired label. ``eta`` is applied to every set when ``dim`` is
    odd and ignored otherwise.

    >>> [p.pairs for p in enumerate_pairings(4)]
    [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    """
    _check_dim(dim)
    out: list[PairingIndexSet] = []
    if dim % 2 == 0:
        for m in _perfect_matchings(list(range(dim))):
            out.append(PairingIndexSet(dim, tuple(m)))
    else:
        eta = _check_phase(eta)
        for k in range(dim):
            labels = [x for x in range(dim) if x != k]
            for m in _perfect_matchings(labels):
                out.append(PairingIndexSet(dim, tuple(m), unpaired=k, eta=eta))
    out.sort(key=PairingIndexSet.key)
    return out


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n <= 0:
        return 1
    return math.prod(range(n, 0, -2))


def count_pairings(dim: int) -> int:
    """Number of index sets: (D-1)!! for even D, (D-2)!!*D for odd D."""
    _check_dim(dim)
    if dim % 2 == 0:
        return double_factorial(dim - 1)
    return double_factorial(dim - 2) * dim


def canonical_pairing(dim: int, eta: complex = 1.0) -> PairingIndexSet:
    """Consecutive pairing ``(0,1),(2,3),...``; for odd ``dim`` the label ``dim-1`` is unpaired."""
    _check_dim(dim)
    pairs = tuple((2 * r, 2 * r + 1) for r in range(dim // 2))
    if dim % 2 == 0:
        return PairingIndexSet(dim, pairs)
    return PairingIndexSet(dim, pairs, unpaired=dim - 1, eta=_check_phase(eta))
