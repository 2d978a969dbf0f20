"""Correlation evaluation, separability and LHV inequality checks, Werner
sweeps and index-set scans."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, ParameterError, StrategyError
from .operators import DEFAULT_MAX_DIM, GlobalOperator, global_sigma, global_sigma_minus, global_sigma_plus
from .pairings import PairingIndexSet, canonical_pairing, count_pairings, enumerate_pairings
from .states import DensityMatrix, PureState, werner_state

CERTIFY_TOL = 1e-9
BISECT_TOL = 1e-8
DEFAULT_SCAN_CAP = 10**6


def expectation(state: PureState | DensityMatrix, op: GlobalOperator) -> complex:
    """Tr(rho A) or <psi|A|psi> using only the stored nonzeros of ``A``."""
    if (state.n, state.d) != (op.n, op.d):
        raise DimensionMismatchError(
            f"state on {state.n} sites of dim {state.d} vs operator on {op.n} sites of dim {op.d}"
        )
    if isinstance(state, PureState):
        return complex(np.vdot(state.amps, op.matrix @ state.amps))
    coo = op.matrix.tocoo()
    rho = state.matrix
    if sp.issparse(rho):
        rho_t = sp.csr_array(rho)[coo.col, coo.row]
        rho_t = np.asarray(rho_t).ravel()
    else:
        rho_t = np.asarray(rho)[coo.col, coo.row]
    return complex(np.sum(coo.data * rho_t))


def lhv_bounds(n: int) -> tuple[float, float]:
    """(per-part bound for odd N, sum bound for even N) = (sqrt2^(N-1), sqrt2^N)."""
    return math.sqrt(2) ** (n - 1), math.sqrt(2) ** n


@dataclass
class CorrelationReport:
    index_sets: list[PairingIndexSet]
    value: complex
    re_part: float
    im_part: float
    separability_bound: float = 1.0
    quadratic_lhs: float = field(init=False)
    lhv_bound_odd: float = field(init=False)
    lhv_bound_even_sum: float = field(init=False)
    violation_ratio_sep: float = field(init=False)
    violation_ratio_lhv: float = field(init=False)
    entangled_certified: bool = field(init=False)
    lhv_violated: bool = field(init=False)

    def __post_init__(self) -> None:
        n = self.n
        self.quadratic_lhs = self.re_part**2 + self.im_part**2
        self.lhv_bound_odd, self.lhv_bound_even_sum = lhv_bounds(n)
        self.violation_ratio_sep = abs(self.value) / self.separability_bound
        self.violation_ratio_lhv = lhv_statistic(self.re_part, self.im_part, n) / lhv_bound(n)
        self.entangled_certified = abs(self.value) > self.separability_bound + CERTIFY_TOL
        self.lhv_violated = self.violation_ratio_lhv > 1 + CERTIFY_TOL

    @property
    def n(self) -> int:
        return len(self.index_sets)

    def to_dict(self) -> dict:
        return {
            "index_sets": [p.to_dict() for p in self.index_sets],
            "value": [self.value.real, self.value.imag],
            "abs": abs(self.value),
            "re_part": self.re_part,
            "im_part": self.im_part,
            "separability_bound": self.separability_bound,
            "quadratic_lhs": self.quadratic_lhs,
            "lhv_bound_odd": self.lhv_bound_odd,
            "lhv_bound_even_sum": self.lhv_bound_even_sum,
            "violation_ratio_sep": self.violation_ratio_sep,
            "violation_ratio_lhv": self.violation_ratio_lhv,
            "verdicts": {
                "entangled_certified": self.entangled_certified,
                "lhv_violated": self.lhv_violated,
            },
        }


def correlation(
    state: PureState | DensityMatrix,
    pairings: Sequence[PairingIndexSet],
    max_dim: int | None = DEFAULT_MAX_DIM,
) -> CorrelationReport:
    """Exact Tr(rho Sigma_I) together with its Hermitian parts and verdicts."""
    pairings = list(pairings)
    if len(pairings) != state.n or pairings[0].dim != state.d:
        raise DimensionMismatchError(
            f"{len(pairings)} index sets of dim {pairings[0].dim} do not match a state on {state.n} sites of dim {state.d}"
        )
    value = expectation(state, global_sigma(pairings, max_dim))
    re_part = expectation(state, global_sigma_plus(pairings, max_dim)).real
    im_part = expectation(state, global_sigma_minus(pairings, max_dim)).real
    return CorrelationReport(pairings, value, re_part, im_part)


@dataclass(frozen=True)
class SeparabilityVerdict:
    quadratic: bool
    linear_re: bool
    linear_im: bool
    linear_sum: bool

    @property
    def certified(self) -> bool:
        return self.quadratic or self.linear_re or self.linear_im or self.linear_sum

    def violated(self) -> list[str]:
        names = ("quadratic", "linear_re", "linear_im", "linear_sum")
        return [name for name in names if getattr(self, name)]


def check_separability(report: CorrelationReport, tol: float = CERTIFY_TOL) -> SeparabilityVerdict:
    """Evaluate the quadratic bound re^2 + im^2 <= 1 and the implied linear bounds.

    Flags are True where a bound is violated; any violation certifies
    entanglement.
    """
    re, im = abs(report.re_part), abs(report.im_part)
    return SeparabilityVerdict(
        quadratic=report.quadratic_lhs > 1 + tol,
        linear_re=re > 1 + tol,
        linear_im=im > 1 + tol,
        linear_sum=re + im > math.sqrt(2) + tol,
    )


def lhv_statistic(re_part: float, im_part: float, n: int) -> float:
    if n % 2:
        return max(abs(re_part), abs(im_part))
    return abs(re_part) + abs(im_part)


def lhv_bound(n: int) -> float:
    odd, even = lhv_bounds(n)
    return odd if n % 2 else even


@dataclass(frozen=True)
class LHVVerdict:
    violated: bool
    statistic: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.statistic / self.bound


def check_lhv(report: CorrelationReport, n: int | None = None, tol: float = CERTIFY_TOL) -> LHVVerdict:
    """Odd N: max(|Re|, |Im|) <= sqrt2^(N-1). Even N: |Re| + |Im| <= sqrt2^N."""
    n = report.n if n is None else n
    stat = lhv_statistic(report.re_part, report.im_part, n)
    bound = lhv_bound(n)
    return LHVVerdict(stat > bound + tol, stat, bound)


def werner_closed_form(n: int, d: int, p: float) -> float:
    """Tr(rho_W Sigma_I) for canonical index sets with eta = 1 on odd sites."""
    if d % 2 == 0:
        return p * 2 ** (n - 1)
    return p * (2 ** (n - 1) * (d - 1) / d + 1 / d) + (1 - p) / d**n


def werner_threshold_closed_form(n: int, d: int) -> float:
    if d % 2 == 0:
        return 2.0 ** (-(n - 1))
    return (d**n - 1) / ((2 * d) ** (n - 1) * (d - 1) + d ** (n - 1) - 1)


def bisect_crossing(f: Callable[[float], float], lo: float = 0.0, hi: float = 1.0, tol: float = BISECT_TOL) -> float | None:
    """Smallest-``p`` crossing of ``f`` from negative to non-negative on [lo, hi].

    Returns None when ``f(hi)`` stays below zero (beyond roundoff) or ``f(lo)``
    is already non-negative.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo >= 0 or f_hi < -1e-12:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SweepRow:
    p: float
    value: complex
    sep_violated: bool
    lhv_violated: bool


@dataclass
class WernerSweep:
    n: int
    d: int
    rows: list[SweepRow]
    numeric_threshold: float | None
    closed_form_threshold: float

    def to_csv(self, first_column: str = "p") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([first_column, "re", "im", "abs", "sep_violated", "lhv_violated"])
        for r in self.rows:
            w.writerow([fmt_real(r.p), fmt_real(r.value.real), fmt_real(r.value.imag), fmt_real(abs(r.value)),
                        int(r.sep_violated), int(r.lhv_violated)])
        return buf.getvalue()


def fmt_real(x: float) -> str:
    return "%.17g" % x


def _odd_safe_pairings(n: int, d: int, eta: complex = 1.0) -> list[PairingIndexSet]:
    return [canonical_pairing(d, eta) for _ in range(n)]


def werner_sweep(
    n: int,
    d: int,
    p_grid: Sequence[float],
    pairings: Sequence[PairingIndexSet] | None = None,
    max_dim: int | None = DEFAULT_MAX_DIM,
) -> WernerSweep:
    """Evaluate Tr(rho_W Sigma_I) numerically on a grid of mixing parameters.

    The crossing ``|Tr rho_W Sigma_I| = 1`` is located by bisection on the
    numerically evaluated correlation; the closed-form threshold is attached
    for comparison only.
    """
    grid = [float(p) for p in p_grid]
    if any(not 0.0 <= p <= 1.0 for p in grid):
        raise ParameterError("Werner sweep grid must lie within [0, 1]")
    if pairings is None:
        pairings = _odd_safe_pairings(n, d)
    sigma = global_sigma(pairings, max_dim)
    sigma_p = global_sigma_plus(pairings, max_dim)
    sigma_m = global_sigma_minus(pairings, max_dim)

    def evaluate(p: float) -> tuple[complex, float, float]:
        rho = werner_state(n, d, p, max_dim)
        return expectation(rho, sigma), expectation(rho, sigma_p).real, expectation(rho, sigma_m).real

    rows = []
    for p in grid:
        value, re, im = evaluate(p)
        rows.append(SweepRow(p, value, abs(value) > 1 + CERTIFY_TOL,
                             lhv_statistic(re, im, n) > lhv_bound(n) + CERTIFY_TOL))
    threshold = bisect_crossing(lambda p: abs(evaluate(p)[0]) - 1.0)
    return WernerSweep(n, d, rows, threshold, werner_threshold_closed_form(n, d))


@dataclass
class ScanResult:
    report: CorrelationReport
    examined: int
    strategy: str


def scan_index_sets(
    state: PureState | DensityMatrix,
    strategy: str = "exhaustive",
    cap: int = DEFAULT_SCAN_CAP,
    eta: complex = 1.0,
    max_dim: int | None = DEFAULT_MAX_DIM,
) -> ScanResult:
    """Search index-set combinations for the largest ``|Tr rho Sigma_I|``.

    Strategies
    ----------
    exhaustive
        Every one of ``count_pairings(D) ** N`` combinations; refused above ``cap``.
    greedy
        Coordinate ascent: sweep sites in order, replacing one site's index set
        at a time, until no single-site change improves the value.
    canonical
        Only the consecutive pairing on every site.

    Ties are broken by enumeration order, so results are deterministic.
    """
    n, d = state.n, state.d
    if strategy == "canonical":
        return ScanResult(correlation(state, _odd_safe_pairings(n, d, eta), max_dim), 1, strategy)
    candidates = enumerate_pairings(d, eta)
    if strategy == "exhaustive":
        total = count_pairings(d) ** n
        if total > cap:
            raise StrategyError(
                f"exhaustive scan needs {total} combinations, above the cap {cap}; use strategy='greedy'"
            )
        best = None
        examined = 0
        for combo in itertools.product(candidates, repeat=n):
            rep = correlation(state, combo, max_dim)
            examined += 1
            if best is None or abs(rep.value) > abs(best.value) + 1e-12:
                best = rep
        return ScanResult(best, examined, strategy)
    if strategy == "greedy":
        current = _odd_safe_pairings(n, d, eta)
        best = correlation(state, current, max_dim)
        examined = 1
        improved = True
        while improved:
            improved = False
            for site in range(n):
                for cand in candidates:
                    if cand == current[site]:
                        continue
                    trial = list(current)
                    trial[site] = cand
                    rep = correlation(state, trial, max_dim)
                    examined += 1
                    if abs(rep.value) > abs(best.value) + 1e-12:
                        best, current, improved = rep, trial, True
        return ScanResult(best, examined, strategy)
    raise StrategyError(f"unknown strategy {strategy!r}; choose exhaustive, greedy or canonical")
