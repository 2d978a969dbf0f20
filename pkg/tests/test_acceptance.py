"""Acceptance criteria 1-10.

Each test prints one ``PASS``/``FAIL`` line; run with ``-s`` to see them
inline, otherwise they are collected into the terminal summary.
"""

import cmath
import math
import subprocess
import sys

import numpy as np

from conftest import ACCEPTANCE_LINES, MATRIX, brute_force_pairing_count, dense_kron, haar_batch
from sepbell.operators import (
    global_sigma_minus,
    global_sigma_plus,
    local_sigma,
    local_sigma_minus,
    local_sigma_plus,
)
from sepbell.oracles import maximize_over_products, ppt_threshold, sample_correlation, spectral_extremes
from sepbell.pairings import canonical_pairing, count_pairings, enumerate_pairings
from sepbell.states import (
    ensemble_to_density,
    maximally_entangled,
    psi_mu,
    random_coeffs,
    random_ensemble,
    werner_state,
)
from sepbell.witnesses import correlation, werner_sweep

SEED = 20200130
ETAS = (1.0, 1j, cmath.exp(1j * math.pi / 3))


def verdict(k: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {title} [{detail}]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def reference_sigma(pairing) -> np.ndarray:
    s = np.zeros((pairing.dim, pairing.dim), dtype=complex)
    for i, j in pairing.pairs:
        s[i, j] = 2
    if pairing.unpaired is not None:
        s[pairing.unpaired, pairing.unpaired] = pairing.eta
    return s


def random_sets(rng, n, d, eta=None):
    sets = enumerate_pairings(d, cmath.exp(1j * rng.uniform(0, 2 * math.pi)) if eta is None else eta)
    return [sets[int(i)] for i in rng.integers(len(sets), size=n)]


def test_criterion_01_pairing_counts():
    rows = []
    for d in range(2, 9):
        expected = math.prod(range(d - 1, 0, -2)) if d % 2 == 0 else math.prod(range(d - 2, 0, -2)) * d
        got = len(enumerate_pairings(d))
        rows.append((d, got, expected, brute_force_pairing_count(d), count_pairings(d)))
    ok = all(g == e == b == c for _, g, e, b, c in rows)
    verdict(1, "pairing counts D=2..8", ok, ", ".join(f"D={d}:{g}" for d, g, *_ in rows))


def test_criterion_02_operator_identities():
    worst, checked = 0.0, 0
    for d in range(2, 7):
        for eta in ETAS:
            for p in enumerate_pairings(d, eta):
                s = reference_sigma(p)
                proj = np.zeros((d, d))
                if p.unpaired is not None:
                    proj[p.unpaired, p.unpaired] = 1
                sp_, sm = local_sigma_plus(p), local_sigma_minus(p)
                errs = [
                    np.abs(local_sigma(p) - s).max(),
                    np.abs(sp_ - (s + s.conj().T) / 2).max(),
                    np.abs(sm - (s - s.conj().T) / 2j).max(),
                    np.abs(sp_ @ sp_ - (np.eye(d) - p.eta.imag**2 * proj)).max(),
                    np.abs(sm @ sm - (np.eye(d) - p.eta.real**2 * proj)).max(),
                ]
                worst = max(worst, *errs)
                checked += 1
    verdict(2, "local operator identities", worst <= 1e-14, f"{checked} index sets, max entry error {worst:.1e}")


def test_criterion_03_basic_bound():
    rng = np.random.default_rng(SEED)
    worst, least_opt, cases = 0.0, 2.0, 0
    for d in range(2, 7):
        for eta in ETAS:
            for p in enumerate_pairings(d, eta):
                v = haar_batch(rng, 10_000, d)
                vals = np.abs(np.einsum("si,ij,sj->s", v.conj(), reference_sigma(p), v))
                worst = max(worst, float(vals.max()))
                opt = maximize_over_products([p], restarts=3, seed=int(rng.integers(2**32)))
                least_opt = min(least_opt, opt.best_value)
                worst = max(worst, opt.best_value)
                cases += 1
            if d % 2 == 0:
                break  # eta plays no role for even D
    ok = worst <= 1 + 1e-12 and least_opt >= 1 - 1e-6
    verdict(3, "single-qudit bound", ok, f"{cases} (D, I) cases, max |<sigma>| {worst!r}, min optimum {least_opt!r}")


def test_criterion_04_separable_bound():
    rng = np.random.default_rng(SEED + 4)
    worst_abs = worst_quad = 0.0
    for n, d in MATRIX:
        for _ in range(1000):
            ens = random_ensemble(n, d, int(rng.integers(1, 6)), seed=int(rng.integers(2**32)))
            rho = ensemble_to_density(ens)
            rep = correlation(rho, random_sets(rng, n, d))
            worst_abs = max(worst_abs, abs(rep.value))
            worst_quad = max(worst_quad, rep.re_part**2 + rep.im_part**2)
    ok = worst_abs <= 1 + 1e-12 and worst_quad <= 1 + 1e-12
    verdict(4, "separable bound", ok, f"8000 ensembles, max |Tr| {worst_abs:.6f}, max quadratic {worst_quad:.6f}")


def test_criterion_05_eigen_equations():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    w = cmath.exp(1j * math.pi / 4)
    continuum = []
    for n, d in MATRIX:
        lam = 2.0 ** (n - 1)
        for _ in range(10):
            pairings = random_sets(rng, n, d)
            plus, minus = global_sigma_plus(pairings).matrix, global_sigma_minus(pairings).matrix
            coeffs = random_coeffs(pairings, seed=int(rng.integers(2**32)))
            for op, mu, eig in ((plus, 1, lam), (plus, -1, -lam), (minus, 1j, lam), (minus, -1j, -lam),
                                (plus + minus, w, 2 ** (n - 0.5)), (plus - minus, w.conjugate(), 2 ** (n - 0.5))):
                psi = psi_mu(pairings, coeffs, mu).amps
                worst = max(worst, float(np.linalg.norm(op @ psi - eig * psi)))
        if d >= 4:
            pairings = random_sets(rng, n, d)
            a = psi_mu(pairings, random_coeffs(pairings, seed=int(rng.integers(2**32))), 1)
            b = psi_mu(pairings, random_coeffs(pairings, seed=int(rng.integers(2**32))), 1)
            fid = abs(np.vdot(a.amps, b.amps)) ** 2
            va, vb = correlation(a, pairings).value, correlation(b, pairings).value
            continuum.append((d, fid, max(abs(va - lam), abs(vb - lam))))
    ok = worst < 1e-10 and all(f < 0.99 and e <= 1e-10 for _, f, e in continuum)
    detail = f"max residual {worst:.1e}; continuum " + ", ".join(f"D={d} fidelity {f:.3f} gap {e:.1e}" for d, f, e in continuum)
    verdict(5, "eigenvalue equations", ok, detail)


def test_criterion_06_maximal_values():
    worst = 0.0
    for n, d in MATRIX:
        psi = np.zeros(d**n)
        stride = sum(d**k for k in range(n))
        psi[[i * stride for i in range(d)]] = 1 / math.sqrt(d)
        assert np.allclose(maximally_entangled(n, d).amps, psi)
        value = correlation(maximally_entangled(n, d), [canonical_pairing(d, 1.0)] * n).value
        expected = 2 ** (n - 1) if d % 2 == 0 else 2 ** (n - 1) * (d - 1) / d + 1 / d
        worst = max(worst, abs(value - expected))
    verdict(6, "maximally entangled values", worst <= 1e-10, f"max error {worst:.1e}")


def _dense_werner(n, d, p):
    psi = np.zeros(d**n)
    stride = sum(d**k for k in range(n))
    psi[[i * stride for i in range(d)]] = 1 / math.sqrt(d)
    return p * np.outer(psi, psi) + (1 - p) * np.eye(d**n) / d**n


def test_criterion_07_werner():
    grid = [k / 10 for k in range(11)]
    worst_val = worst_thr = 0.0
    for n, d in MATRIX:
        pairings = [canonical_pairing(d, 1.0)] * n
        sigma = dense_kron([reference_sigma(p) for p in pairings])
        sweep = werner_sweep(n, d, grid, pairings)
        for row in sweep.rows:
            if d % 2 == 0:
                formula = row.p * 2 ** (n - 1)
            else:
                formula = row.p * (2 ** (n - 1) * (d - 1) + 1) / d + (1 - row.p) / d**n
            dense = np.trace(_dense_werner(n, d, row.p) @ sigma)
            worst_val = max(worst_val, abs(row.value - formula), abs(dense - formula))
        if d % 2 == 0:
            p_star = 2.0 ** -(n - 1)
        else:
            p_star = (d**n - 1) / ((2 * d) ** (n - 1) * (d - 1) + d ** (n - 1) - 1)
        thr = sweep.numeric_threshold
        worst_thr = max(worst_thr, abs(thr - p_star) if thr is not None else math.inf)
    wit = werner_sweep(2, 2, []).numeric_threshold
    ppt = ppt_threshold(2, 2, (0,))
    pair_ok = abs(wit - 0.5) <= 1e-6 and abs(ppt - 1 / 3) <= 1e-6 and ppt < wit
    ok = worst_val <= 1e-10 and worst_thr <= 1e-6 and pair_ok
    verdict(7, "Werner values and thresholds", ok,
            f"value error {worst_val:.1e}, threshold error {worst_thr:.1e}, (2,2) witness {wit:.7f} vs PPT {ppt:.7f}")


def test_criterion_08_lhv_comparison():
    rng = np.random.default_rng(SEED + 8)
    worst = 0.0
    for n, d in MATRIX:
        for pairings in ([canonical_pairing(d, 1.0)] * n, random_sets(rng, n, d)):
            hi = spectral_extremes(global_sigma_plus(pairings))[1]
            lhv = math.sqrt(2) ** (n - 1)
            worst = max(worst, abs(hi - 2 ** (n - 1)) / 2 ** (n - 1), abs(hi / lhv - lhv) / lhv)
    verdict(8, "spectral maximum against LHV bound", worst <= 1e-10, f"max relative error {worst:.1e}")


def test_criterion_09_sampling():
    rng = np.random.default_rng(SEED + 9)
    worst_z, settings_ok, runs = 0.0, True, 0
    for n, d in MATRIX:
        pairings = random_sets(rng, n, d)
        mu = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        states = [
            psi_mu(pairings, random_coeffs(pairings, seed=int(rng.integers(2**32))), mu),
            werner_state(n, d, 0.6),
            ensemble_to_density(random_ensemble(n, d, 3, seed=int(rng.integers(2**32)))),
        ]
        for state in states:
            exact = correlation(state, pairings)
            re, im = sample_correlation(state, pairings, 100_000, seed=int(rng.integers(2**32)))
            for est, target in ((re, exact.re_part), (im, exact.im_part)):
                gap = abs(est.mean - target)
                if gap > 1e-12:
                    worst_z = max(worst_z, gap / est.std_error if est.std_error > 0 else math.inf)
                settings_ok &= est.num_settings == 2 ** (n - 1)
            runs += 1
    ok = worst_z <= 5 and settings_ok
    verdict(9, "finite-shot sampling", ok, f"{runs} state/index-set runs, worst |z| {worst_z:.2f}, settings ok {settings_ok}")


def test_criterion_10_reproducibility(tmp_path):
    identical = []
    for n, d in MATRIX:
        outs = []
        for tag in "ab":
            path = tmp_path / f"verify_{n}_{d}_{tag}.json"
            proc = subprocess.run([sys.executable, "-m", "sepbell", "verify", "--n", str(n), "--d", str(d),
                                   "--seed", "7", "--out", str(path)], capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            outs.append(path.read_bytes())
        identical.append(outs[0] == outs[1])
    verdict(10, "verify reports are byte-identical", all(identical), f"{sum(identical)}/{len(identical)} matrix entries")
