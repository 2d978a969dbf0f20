"""sepbell command-line interface.

Usage:
    sepbell witness --n 2 --d 2 --state psi-mu --mu 1 --pairing canonical
    sepbell sweep --n 3 --d 2 --family werner --grid 0:1:0.01 --format csv
    sepbell scan --n 2 --d 4 --state werner --p 0.8 --strategy exhaustive
    sepbell sample --n 2 --d 2 --state werner --p 0.6 --shots 100000
    sepbell verify --n 2 --d 3
    sepbell enumerate --d 4

Verdicts are part of the report; the exit status only says whether the
command ran (0), was misconfigured (2) or hit a size cap (3). ``verify`` exits
1 when any check fails.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import SepBellError, SizeLimitError
from .operators import DEFAULT_MAX_DIM, check_size
from .oracles import sample_correlation
from .pairings import PairingIndexSet, canonical_pairing, count_pairings, enumerate_pairings
from .states import (
    ensemble_to_density,
    load_state,
    maximally_entangled,
    maximally_mixed,
    psi_mu,
    random_coeffs,
    random_ensemble,
    random_product_state,
    uniform_coeffs,
    werner_state,
)
from .verification import run_verification
from .witnesses import (
    DEFAULT_SCAN_CAP,
    check_lhv,
    check_separability,
    correlation,
    fmt_real,
    lhv_bound,
    lhv_statistic,
    scan_index_sets,
    werner_sweep,
)

CAP_ENV = "SEPBELL_CAP_DIM"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(SepBellError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``1``, ``-i``, ``0.5+0.5j`` or ``phase:0.25`` (= exp(i*pi*0.25))."""
    text = text.strip()
    if text.startswith("phase:"):
        return cmath.exp(1j * math.pi * float(text[len("phase:"):]))
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` inclusive of ``stop`` (within half a step)."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError("grid needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _default_cap() -> tuple[int, str]:
    env = os.environ.get(CAP_ENV)
    if env:
        return int(env), f"env:{CAP_ENV}"
    return DEFAULT_MAX_DIM, "default"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="number of qudits N (default 2)")
    common.add_argument("--d", type=int, default=2, help="qudit dimension D (default 2)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--cap-dim", type=int, default=None, help=f"max D^N (default {DEFAULT_MAX_DIM} or ${CAP_ENV})")

    pairing = argparse.ArgumentParser(add_help=False)
    pairing.add_argument("--pairing", default="canonical",
                         help="'canonical', a JSON pairing (or list of N), or a path to such a JSON file")
    pairing.add_argument("--eta", type=_complex_arg, default=1 + 0j, help="phase of the unpaired level for odd D")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", default="psi-mu",
                       help="psi-mu | max-entangled | werner | mixed | product | separable | file:PATH")
    state.add_argument("--mu", type=_complex_arg, default=1 + 0j, help="phase mu for psi-mu, e.g. 1, -i, phase:0.25")
    state.add_argument("--p", type=float, default=0.5, help="Werner mixing parameter")
    state.add_argument("--coeffs", choices=("uniform", "random"), default="uniform", help="psi-mu site coefficients")
    state.add_argument("--terms", type=int, default=3, help="terms in a random separable ensemble")

    parser = argparse.ArgumentParser(prog="sepbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("witness", parents=[common, pairing, state], help="evaluate Tr(rho Sigma_I) and the inequalities")
    sw = sub.add_parser("sweep", parents=[common, pairing], help="Werner or mu-family sweep (CSV by default)")
    sw.add_argument("--family", choices=("werner", "mu"), default="werner")
    sw.add_argument("--grid", default="0:1:0.01", help="start:stop:step (mu family: fractions of a full turn)")
    sc = sub.add_parser("scan", parents=[common, state], help="search index sets for the largest correlation")
    sc.add_argument("--strategy", choices=("exhaustive", "greedy", "canonical"), default="exhaustive")
    sc.add_argument("--scan-cap", type=int, default=DEFAULT_SCAN_CAP)
    sc.add_argument("--eta", type=_complex_arg, default=1 + 0j)
    sa = sub.add_parser("sample", parents=[common, pairing, state], help="finite-shot estimate of the correlation")
    sa.add_argument("--shots", type=int, default=100_000, help="shots per measurement setting")
    ve = sub.add_parser("verify", parents=[common], help="run the self-check suite at (N, D)")
    ve.add_argument("--shots", type=int, default=10_000, help="shots per setting for the sampling checks")
    ve.add_argument("--eta", type=_complex_arg, default=1 + 0j)
    en = sub.add_parser("enumerate", parents=[common], help="list every index set for dimension D")
    en.add_argument("--eta", type=_complex_arg, default=1 + 0j)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Fully resolved config, echoed into every output header."""
    cap, source = (args.cap_dim, "flag") if args.cap_dim is not None else _default_cap()
    args.cap_dim = cap
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "json"
    if args.n < 1 or args.d < 2:
        raise UsageError("need --n >= 1 and --d >= 2")
    config = {}
    for key, value in sorted(vars(args).items()):
        if key == "out":
            continue
        if isinstance(value, complex):
            value = [value.real, value.imag]
        config[key] = value
    config["cap_dim_source"] = source
    return config


def resolve_pairings(args: argparse.Namespace) -> list[PairingIndexSet]:
    choice = args.pairing
    if choice == "canonical":
        return [canonical_pairing(args.d, args.eta) for _ in range(args.n)]
    text = Path(choice).read_text() if not choice.lstrip().startswith(("{", "[")) else choice
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data] * args.n
    pairings = [PairingIndexSet.from_dict(x) for x in data]
    if len(pairings) != args.n or any(p.dim != args.d for p in pairings):
        raise UsageError(f"pairing JSON must describe {args.n} index sets of dimension {args.d}")
    return pairings


def resolve_state(args: argparse.Namespace, pairings: list[PairingIndexSet] | None = None):
    n, d, cap = args.n, args.d, args.cap_dim
    check_size(n, d, cap)
    kind = args.state
    if kind.startswith("file:"):
        state = load_state(json.loads(Path(kind[len("file:"):]).read_text()))
        if (state.n, state.d) != (n, d):
            raise UsageError(f"state file holds n={state.n}, d={state.d}; flags say n={n}, d={d}")
        return state
    if kind == "psi-mu":
        pairings = pairings or [canonical_pairing(d, args.eta) for _ in range(n)]
        coeffs = uniform_coeffs(pairings) if args.coeffs == "uniform" else random_coeffs(pairings, args.seed)
        return psi_mu(pairings, coeffs, args.mu, cap)
    if kind == "max-entangled":
        return maximally_entangled(n, d, cap)
    if kind == "werner":
        return werner_state(n, d, args.p, cap)
    if kind == "mixed":
        return maximally_mixed(n, d, cap)
    if kind == "product":
        return random_product_state(n, d, args.seed)
    if kind == "separable":
        return ensemble_to_density(random_ensemble(n, d, args.terms, args.seed))
    raise UsageError(f"unknown state {kind!r}")


def report_payload(report) -> dict:
    out = report.to_dict()
    sep = check_separability(report)
    lhv = check_lhv(report)
    out["separability"] = {"violated": sep.violated(), "certified": sep.certified}
    out["lhv"] = {"violated": lhv.violated, "statistic": lhv.statistic, "bound": lhv.bound, "ratio": lhv.ratio}
    return out


def cmd_witness(args) -> tuple[object, int]:
    pairings = resolve_pairings(args)
    state = resolve_state(args, pairings)
    return report_payload(correlation(state, pairings, args.cap_dim)), EXIT_OK


def cmd_sweep(args) -> tuple[object, int]:
    pairings = resolve_pairings(args)
    grid = parse_grid(args.grid)
    if args.family == "werner":
        sweep = werner_sweep(args.n, args.d, grid, pairings, args.cap_dim)
        meta = {"numeric_threshold": sweep.numeric_threshold, "closed_form_threshold": sweep.closed_form_threshold}
        if args.format == "csv":
            return (meta, sweep.to_csv("p")), EXIT_OK
        rows = [{"p": r.p, "re": r.value.real, "im": r.value.imag, "abs": abs(r.value),
                 "sep_violated": r.sep_violated, "lhv_violated": r.lhv_violated} for r in sweep.rows]
        return {**meta, "rows": rows}, EXIT_OK
    # mu family: mu = exp(2 pi i t) on psi(mu) built from the same index sets
    coeffs = uniform_coeffs(pairings)
    rows = []
    for t in grid:
        rep = correlation(psi_mu(pairings, coeffs, cmath.exp(2j * math.pi * t), args.cap_dim), pairings, args.cap_dim)
        rows.append({"t": t, "re": rep.re_part, "im": rep.im_part, "abs": abs(rep.value),
                     "sep_violated": rep.entangled_certified, "lhv_violated": rep.lhv_violated})
    if args.format == "csv":
        lines = ["t,re,im,abs,sep_violated,lhv_violated"]
        for r in rows:
            lines.append(",".join([fmt_real(r["t"]), fmt_real(r["re"]), fmt_real(r["im"]), fmt_real(r["abs"]),
                                   str(int(r["sep_violated"])), str(int(r["lhv_violated"]))]))
        return ({}, "\n".join(lines) + "\n"), EXIT_OK
    return {"rows": rows}, EXIT_OK


def cmd_scan(args) -> tuple[object, int]:
    state = resolve_state(args)
    res = scan_index_sets(state, args.strategy, args.scan_cap, args.eta, args.cap_dim)
    return {"strategy": res.strategy, "examined": res.examined,
            "total_combinations": count_pairings(args.d) ** args.n, "best": report_payload(res.report)}, EXIT_OK


def cmd_sample(args) -> tuple[object, int]:
    pairings = resolve_pairings(args)
    state = resolve_state(args, pairings)
    re, im = sample_correlation(state, pairings, args.shots, args.seed)
    return {"re": re.to_dict(), "im": im.to_dict(),
            "lhv_statistic": lhv_statistic(re.mean, im.mean, args.n), "lhv_bound": lhv_bound(args.n),
            "abs_estimate": math.hypot(re.mean, im.mean)}, EXIT_OK


def cmd_verify(args) -> tuple[object, int]:
    checks = run_verification(args.n, args.d, args.seed, args.shots, args.eta, args.cap_dim)
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: expected={c['expected']} actual={c['actual']} tol={c['tolerance']}",
              file=sys.stderr)
    failed = [c["name"] for c in checks if not c["passed"]]
    return {"checks": checks, "failed": failed, "all_passed": not failed}, EXIT_FAIL if failed else EXIT_OK


def cmd_enumerate(args) -> tuple[object, int]:
    sets = enumerate_pairings(args.d, args.eta)
    return {"count": len(sets), "pairings": [p.to_dict() for p in sets]}, EXIT_OK


COMMANDS = {
    "witness": cmd_witness,
    "sweep": cmd_sweep,
    "scan": cmd_scan,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
}


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def render(config: dict, result, fmt: str) -> str:
    if fmt == "csv":
        meta, body = result if isinstance(result, tuple) else ({}, None)
        if body is None:
            raise UsageError("--format csv is only available for sweep")
        header = [f"# config: {json.dumps(config, sort_keys=True, default=_json_default)}"]
        header += [f"# {k}: {json.dumps(v, default=_json_default)}" for k, v in meta.items()]
        return "\n".join(header) + "\n" + body
    if isinstance(result, tuple):
        meta, body = result
        result = {**meta, "csv": body}
    return json.dumps({"config": config, "result": result}, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_atomic(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        result, code = COMMANDS[args.command](args)
        write_atomic(render(config, result, args.format), args.out)
    except SizeLimitError as exc:
        print(f"sepbell: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SepBellError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"sepbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
