"""Self-check harness behind ``sepbell verify``.

Each check records a name, the expected and actual values, the tolerance and
a pass flag. Everything is driven by a single seed so reports are
reproducible byte for byte.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .operators import (
    global_sigma,
    global_sigma_minus,
    global_sigma_plus,
    local_sigma,
    local_sigma_minus,
    local_sigma_plus,
    reconstruct,
    setting_decomposition,
)
from .oracles import (
    maximize_over_products,
    ppt_threshold,
    ppt_threshold_closed_form,
    sample_correlation,
    spectral_extremes,
)
from .pairings import canonical_pairing, count_pairings, enumerate_pairings
from .states import (
    ensemble_to_density,
    maximally_entangled,
    psi_mu,
    random_coeffs,
    random_ensemble,
    werner_state,
)
from .witnesses import correlation, werner_closed_form, werner_sweep


@dataclass
class Check:
    name: str
    expected: object
    actual: object
    tolerance: float
    passed: bool


def _brute_force_count(d: int) -> int:
    seen = set()
    for perm in itertools.permutations(range(d)):
        pairs = frozenset(tuple(sorted(perm[2 * r:2 * r + 2])) for r in range(d // 2))
        seen.add((pairs, perm[-1] if d % 2 else None))
    return len(seen)


def _num(x) -> object:
    if isinstance(x, complex):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


class Verifier:
    def __init__(self, n: int, d: int, seed: int, shots: int = 10_000, eta: complex = 1.0, max_dim: int | None = None):
        self.n, self.d, self.seed, self.shots, self.eta = n, d, seed, shots, eta
        self.max_dim = max_dim
        self.rng = np.random.default_rng(seed)
        self.checks: list[Check] = []

    def record(self, name: str, expected, actual, tol: float, passed: bool) -> None:
        self.checks.append(Check(name, _num(expected), _num(actual), tol, bool(passed)))

    def close(self, name: str, expected: float, actual: float, tol: float) -> None:
        self.record(name, expected, actual, tol, abs(actual - expected) <= tol)

    def at_most(self, name: str, bound: float, actual: float, tol: float) -> None:
        self.record(name, f"<= {bound}", actual, tol, actual <= bound + tol)

    def _child_seed(self) -> int:
        return int(self.rng.integers(2**63))

    def run(self) -> list[Check]:
        steps: list[Callable[[], None]] = [
            self.check_pairings,
            self.check_local_operators,
            self.check_basic_bound,
            self.check_global_operators,
            self.check_separable_bound,
            self.check_eigen_equations,
            self.check_maximal_values,
            self.check_werner,
            self.check_ppt,
            self.check_sampling,
        ]
        for step in steps:
            step()
        return self.checks

    def check_pairings(self) -> None:
        d = self.d
        self.record("pairing_count_formula", count_pairings(d), len(enumerate_pairings(d, self.eta)), 0,
                    count_pairings(d) == len(enumerate_pairings(d, self.eta)))
        if d <= 8:
            bf = _brute_force_count(d)
            self.record("pairing_count_brute_force", bf, count_pairings(d), 0, bf == count_pairings(d))
        keys = [p.key() for p in enumerate_pairings(d, self.eta)]
        self.record("pairing_no_duplicates", len(keys), len(set(keys)), 0, len(keys) == len(set(keys)))

    def check_local_operators(self) -> None:
        worst_plus = worst_minus = worst_herm = worst_spec = 0.0
        for pairing in enumerate_pairings(self.d, self.eta):
            sp_, sm = local_sigma_plus(pairing), local_sigma_minus(pairing)
            proj = np.zeros((self.d, self.d))
            if pairing.unpaired is not None:
                proj[pairing.unpaired, pairing.unpaired] = 1.0
            eye = np.eye(self.d)
            worst_plus = max(worst_plus, np.abs(sp_ @ sp_ - (eye - pairing.eta.imag**2 * proj)).max())
            worst_minus = max(worst_minus, np.abs(sm @ sm - (eye - pairing.eta.real**2 * proj)).max())
            worst_herm = max(worst_herm, np.abs(sp_ - sp_.conj().T).max(), np.abs(sm - sm.conj().T).max())
            worst_spec = max(worst_spec, np.abs(np.linalg.eigvalsh(sp_)).max(), np.abs(np.linalg.eigvalsh(sm)).max())
        self.close("sigma_plus_square_identity", 0.0, worst_plus, 1e-14)
        self.close("sigma_minus_square_identity", 0.0, worst_minus, 1e-14)
        self.close("local_hermiticity", 0.0, worst_herm, 1e-14)
        self.at_most("local_spectral_radius", 1.0, worst_spec, 1e-12)

    def check_basic_bound(self, samples: int = 2000) -> None:
        worst = 0.0
        for pairing in enumerate_pairings(self.d, self.eta):
            sigma = local_sigma(pairing)
            v = self.rng.standard_normal((samples, self.d)) + 1j * self.rng.standard_normal((samples, self.d))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            vals = np.abs(np.einsum("si,ij,sj->s", v.conj(), sigma, v))
            worst = max(worst, float(vals.max()))
        self.at_most("basic_bound_random_states", 1.0, worst, 1e-12)
        pairings = [canonical_pairing(self.d, self.eta)] * self.n
        opt = maximize_over_products(pairings, restarts=4, seed=self._child_seed())
        self.at_most("product_optimizer_upper", 1.0, opt.best_value, 1e-9)
        self.record("product_optimizer_attains", ">= 1 - 1e-06", opt.best_value, 1e-6, opt.best_value >= 1 - 1e-6)

    def check_global_operators(self) -> None:
        n, d = self.n, self.d
        pairings = [enumerate_pairings(d, self.eta)[int(self.rng.integers(count_pairings(d)))] for _ in range(n)]
        sigma = global_sigma(pairings, self.max_dim)
        m = pairings[0].num_pairs + d % 2
        self.record("global_nonzero_count", m**n, sigma.nnz, 0, sigma.nnz == m**n)
        if d**n <= 4096:
            dense = np.array([[1.0 + 0j]])
            for p in pairings:
                dense = np.kron(dense, local_sigma(p))
            self.close("global_matches_dense_kron", 0.0, float(np.abs(sigma.dense() - dense).max()), 1e-14)
        plus, minus = global_sigma_plus(pairings, self.max_dim), global_sigma_minus(pairings, self.max_dim)
        diff = (plus.matrix + 1j * minus.matrix - sigma.matrix).tocoo()
        self.close("global_split_into_hermitian_parts", 0.0, float(np.abs(diff.data).max(initial=0.0)), 1e-14)
        for part, op in (("plus", plus), ("minus", minus)):
            terms = setting_decomposition(pairings, part)
            self.record(f"decomposition_{part}_term_count", 2 ** (n - 1), len(terms), 0, len(terms) == 2 ** (n - 1))
            err = (reconstruct(terms, self.max_dim).matrix - op.matrix).tocoo()
            self.close(f"decomposition_{part}_reconstruction", 0.0, float(np.abs(err.data).max(initial=0.0)), 1e-12)

    def check_separable_bound(self, draws: int = 200) -> None:
        if self.d**self.n > 4096:
            return
        worst_abs = worst_quad = 0.0
        candidates = enumerate_pairings(self.d, self.eta)
        for _ in range(draws):
            ens = random_ensemble(self.n, self.d, int(self.rng.integers(1, 5)), seed=self._child_seed())
            pairings = [candidates[int(self.rng.integers(len(candidates)))] for _ in range(self.n)]
            rep = correlation(ensemble_to_density(ens), pairings, self.max_dim)
            worst_abs = max(worst_abs, abs(rep.value))
            worst_quad = max(worst_quad, rep.quadratic_lhs)
        self.at_most("separable_ensemble_abs_bound", 1.0, worst_abs, 1e-12)
        self.at_most("separable_ensemble_quadratic_bound", 1.0, worst_quad, 1e-12)

    def check_eigen_equations(self, draws: int = 5) -> None:
        n = self.n
        pairings = [canonical_pairing(self.d, self.eta)] * n
        plus, minus = global_sigma_plus(pairings, self.max_dim).matrix, global_sigma_minus(pairings, self.max_dim).matrix
        lam = 2.0 ** (n - 1)
        worst = 0.0
        w = np.exp(1j * np.pi / 4)
        for _ in range(draws):
            coeffs = random_coeffs(pairings, seed=self._child_seed())
            cases = [
                (plus, 1, lam), (plus, -1, -lam),
                (minus, 1j, lam), (minus, -1j, -lam),
                (plus + minus, w, 2 ** (n - 0.5)), (plus - minus, w.conjugate(), 2 ** (n - 0.5)),
            ]
            for op, mu, eig in cases:
                psi = psi_mu(pairings, coeffs, mu, self.max_dim).amps
                worst = max(worst, float(np.linalg.norm(op @ psi - eig * psi)))
        self.close("eigenvalue_equation_residual", 0.0, worst, 1e-10)
        spec = spectral_extremes(global_sigma_plus(pairings, self.max_dim))
        self.close("sigma_plus_spectral_max", lam, spec[1], 1e-10 * lam)
        self.close("sigma_plus_spectral_min", -lam, spec[0], 1e-10 * lam)
        lhv = math.sqrt(2) ** (n - 1)
        self.close("separability_over_lhv_ratio", lhv, spec[1] / lhv, 1e-10 * lhv)
        if self.d >= 4:
            c1 = random_coeffs(pairings, seed=self._child_seed())
            c2 = random_coeffs(pairings, seed=self._child_seed())
            a, b = psi_mu(pairings, c1, 1.0, self.max_dim), psi_mu(pairings, c2, 1.0, self.max_dim)
            fid = abs(np.vdot(a.amps, b.amps)) ** 2
            va = abs(correlation(a, pairings, self.max_dim).value)
            vb = abs(correlation(b, pairings, self.max_dim).value)
            self.record("continuum_fidelity", "< 0.99", fid, 0.0, fid < 0.99)
            self.close("continuum_equal_violation", 0.0, abs(va - vb) + abs(va - lam), 1e-10)

    def check_maximal_values(self) -> None:
        n, d = self.n, self.d
        pairings = [canonical_pairing(d, 1.0)] * n
        value = correlation(maximally_entangled(n, d, self.max_dim), pairings, self.max_dim).value
        expected = 2 ** (n - 1) if d % 2 == 0 else 2 ** (n - 1) * (d - 1) / d + 1 / d
        self.close("maximally_entangled_value", expected, value.real, 1e-10)
        self.close("maximally_entangled_value_imag", 0.0, value.imag, 1e-10)

    def check_werner(self) -> None:
        n, d = self.n, self.d
        grid = [round(0.1 * k, 10) for k in range(11)]
        sweep = werner_sweep(n, d, grid, max_dim=self.max_dim)
        worst = max(abs(r.value - werner_closed_form(n, d, r.p)) for r in sweep.rows)
        self.close("werner_closed_form_match", 0.0, worst, 1e-10)
        thr = sweep.numeric_threshold
        self.record("werner_threshold", sweep.closed_form_threshold, thr, 1e-6,
                    thr is not None and abs(thr - sweep.closed_form_threshold) <= 1e-6)

    def check_ppt(self) -> None:
        n, d = self.n, self.d
        if n < 2 or d**n > 4096:
            return
        thr = ppt_threshold(n, d, (0,))
        ref = ppt_threshold_closed_form(n, d)
        self.record("ppt_threshold", ref, thr, 1e-6, thr is not None and abs(thr - ref) <= 1e-6)
        wit = werner_sweep(n, d, [], max_dim=self.max_dim).numeric_threshold
        ok = thr is not None and wit is not None and thr < wit
        self.record("ppt_stronger_than_witness", "ppt < witness", [thr, wit], 0.0, ok)

    def check_sampling(self) -> None:
        if self.d**self.n > 4096:
            return
        pairings = [canonical_pairing(self.d, self.eta)] * self.n
        states = {
            "psi_mu": psi_mu(pairings, random_coeffs(pairings, seed=self._child_seed()), 1.0, self.max_dim),
            "werner_0.6": werner_state(self.n, self.d, 0.6, self.max_dim),
        }
        for label, state in states.items():
            exact = correlation(state, pairings, self.max_dim)
            re, im = sample_correlation(state, pairings, self.shots, seed=self._child_seed())
            for part, est, target in (("re", re, exact.re_part), ("im", im, exact.im_part)):
                tol = 5 * est.std_error + 1e-12
                self.close(f"sampling_{label}_{part}", target, est.mean, tol)
                self.record(f"sampling_{label}_{part}_settings", 2 ** (self.n - 1), est.num_settings, 0,
                            est.num_settings == 2 ** (self.n - 1))


def run_verification(n: int, d: int, seed: int, shots: int = 10_000, eta: complex = 1.0, max_dim: int | None = None) -> list[dict]:
    return [asdict(c) for c in Verifier(n, d, seed, shots, eta, max_dim).run()]
