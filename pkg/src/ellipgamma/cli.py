"""Command-line front end: evaluate integrals, verify identities, benchmark.

Subcommands
-----------
eval OBJECT    evaluate one object (theta, gamma, v, i1m, inm_direct,
               inm_det, u_qgt1) from a JSON parameter file or inline JSON
verify NAME    run seeded residual checks from the identity registry and
               emit one NDJSON report line per trial
bench          compare the determinant route against tensor quadrature for
               the two-dimensional integral at matched accuracy
report PATH    aggregate NDJSON report lines into a per-identity summary

Parameter files hold one object each: complex numbers are two-element
[re, im] arrays, bases under "p" and "q", parameters under "t", and the
flag "normalize_last" (default true) solves the final slot for the
balancing condition.  Report lines serialize every IdentityReport field in
full round-trip precision, so a rerun with the same seed is byte-identical.
Relative --out paths are joined onto $ELLIPGAMMA_OUTDIR when set.

Exit codes: 0 success, 1 invalid input or configuration, 2 verification
failure or non-convergence, 3 no admissible parameter draw found.
"""

from __future__ import annotations

import argparse
import glob
import json
import math
import os
import statistics
import sys
import time

from .errors import EllipticError, NonConvergent, SamplerInfeasible
from .identities import CHECKS, list_checks, run_check
from .integrals import (
    TypeIParams,
    VParams,
    i1m,
    inm_det_full,
    inm_direct,
    v_function,
    v_qgt1_solution,
)
from .quadrature import Contour, QuadSpec
from .sampling import draw_balanced, draw_base_pair, pairwise_separation, rng_for
from .specfun import DEFAULT_POLICY, BasePair, elliptic_gamma, theta

EVAL_OBJECTS = ("theta", "gamma", "v", "i1m", "inm_direct", "inm_det", "u_qgt1")


class _Parser(argparse.ArgumentParser):
    """Parser that exits with status 1 on usage errors.

    argparse defaults to exit code 2, which this interface reserves for
    verification failures.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _nm_pair(text: str):
    try:
        n_str, m_str = text.split(",")
        return int(n_str), int(m_str)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected N,M with integer N and M, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ellipgamma",
                     description="Elliptic hypergeometric integrals: "
                                 "evaluation and identity verification.")
    sub = parser.add_subparsers(dest="command", metavar="command",
                                parser_class=_Parser)

    pe = sub.add_parser("eval", help="evaluate one object from JSON parameters")
    pe.add_argument("object", choices=EVAL_OBJECTS,
                    help="which object to evaluate")
    pe.add_argument("--params", metavar="FILE",
                    help="JSON parameter file (one object per file)")
    pe.add_argument("--inline", metavar="JSON",
                    help="JSON parameter document given directly")
    pe.add_argument("--nodes", type=int, metavar="N",
                    help="quadrature node cap (per axis)")
    pe.add_argument("--rtol", type=float, metavar="X",
                    help="quadrature relative tolerance")
    pe.add_argument("--radius", type=float, default=1.0, metavar="R",
                    help="contour radius for v / i1m (default 1.0)")
    pe.add_argument("--out", metavar="FILE", help="also write the JSON result here")

    pv = sub.add_parser("verify", help="run identity checks, emit NDJSON reports")
    pv.add_argument("name", nargs="?",
                    help="registered check name, or 'all'")
    pv.add_argument("--trials", type=int, metavar="K",
                    help="seeded draws per check (default: registry setting)")
    pv.add_argument("--seed", type=int, default=0, metavar="S")
    pv.add_argument("--tol", type=float, metavar="X",
                    help="override the headline tolerance")
    pv.add_argument("--nm", type=_nm_pair, metavar="N,M",
                    help="select the N,M member of a check family")
    pv.add_argument("--out", metavar="FILE",
                    help="write NDJSON here instead of stdout")
    pv.add_argument("--list", action="store_true",
                    help="list registered checks and exit")

    pb = sub.add_parser("bench",
                        help="determinant route vs tensor quadrature cost")
    pb.add_argument("--nm", type=_nm_pair, default=(2, 0), metavar="N,M",
                    help="integral dimensions (N must be 2; M in {0,1})")
    pb.add_argument("--seed", type=int, default=0, metavar="S")
    pb.add_argument("--rtol", type=float, default=1e-9, metavar="X",
                    help="matched relative accuracy target for both routes")
    pb.add_argument("--out", metavar="FILE",
                    help="also write a JSON summary here")

    pr = sub.add_parser("report", help="summarize NDJSON report lines")
    pr.add_argument("path", help="NDJSON file or directory of *.ndjson/*.jsonl")
    return parser


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _resolve_out(path: str) -> str:
    outdir = os.environ.get("ELLIPGAMMA_OUTDIR")
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _as_complex(obj, label: str) -> complex:
    if isinstance(obj, bool):
        raise ValueError(f"{label} must be a number or [re, im] pair")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if (isinstance(obj, list) and len(obj) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in obj)):
        return complex(obj[0], obj[1])
    raise ValueError(f"{label} must be a number or [re, im] pair")


def _pair(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _load_document(args) -> dict:
    if args.inline is not None and args.params is not None:
        raise ValueError("give --params or --inline, not both")
    if args.inline is not None:
        text, source = args.inline, "--inline"
    elif args.params is not None:
        source = args.params
        try:
            with open(args.params, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValueError(f"cannot read parameter file: {exc}")
    else:
        raise ValueError("eval needs --params FILE or --inline JSON")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: invalid JSON ({exc})")
    if not isinstance(doc, dict):
        raise ValueError(f"{source}: expected a JSON object")
    return doc


def _quad_spec(args, tensor: bool) -> QuadSpec | None:
    if args.nodes is None and args.rtol is None:
        return None
    base = QuadSpec.tensor_default() if tensor else QuadSpec()
    n_max = args.nodes if args.nodes is not None else base.n_max
    rel_tol = args.rtol if args.rtol is not None else base.rel_tol
    return QuadSpec(n0=min(base.n0, n_max), n_max=n_max, rel_tol=rel_tol)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _eval_payload(args) -> dict:
    doc = _load_document(args)
    obj = args.object
    policy = DEFAULT_POLICY

    def need(key: str):
        if key not in doc:
            raise ValueError(f"parameter document is missing required key {key!r}")
        return doc[key]

    def base_pair() -> BasePair:
        return BasePair(_as_complex(need("p"), "p"), _as_complex(need("q"), "q"))

    def t_list() -> list:
        raw = need("t")
        if not isinstance(raw, list) or not raw:
            raise ValueError("'t' must be a non-empty list")
        return [_as_complex(v, f"t[{i}]") for i, v in enumerate(raw)]

    normalize = bool(doc.get("normalize_last", True))
    payload = {"object": obj}

    if obj in ("theta", "gamma"):
        t = t_list()
        if len(t) != 1:
            raise ValueError(f"{obj} takes exactly one argument in 't'")
        if obj == "theta":
            value = theta(t[0], _as_complex(need("p"), "p"), policy)
        else:
            value = elliptic_gamma(t[0], base_pair(), policy)
        payload.update(value=_pair(value), err_est=0.0, nodes_used=0,
                       converged=True)
        return payload

    if obj == "u_qgt1":
        # |q| > 1 here by design, so bypass the BasePair domain check
        p = _as_complex(need("p"), "p")
        q = _as_complex(need("q"), "q")
        t = t_list()
        if normalize:
            if len(t) != 8:
                raise ValueError("u_qgt1 takes exactly 8 parameters")
            prod = 1.0 + 0.0j
            for v in t[:-1]:
                prod *= v
            t[-1] = (p * q) ** 2 / prod
        value = v_qgt1_solution(t, p, q, _quad_spec(args, False), policy)
        payload.update(value=_pair(value), err_est=None, nodes_used=None,
                       converged=True)
        return payload

    base = base_pair()
    t = t_list()
    if obj == "v":
        params = VParams.make(t, base, normalize)
        res = v_function(params, _quad_spec(args, False),
                         Contour(args.radius), policy)
    else:
        n = int(doc.get("n", 1 if obj == "i1m" else 2))
        if obj == "i1m" and n != 1:
            raise ValueError("i1m is the one-dimensional integral; "
                             "use inm_direct or inm_det for n >= 2")
        m = int(doc.get("m", (len(t) - 2 * n - 4) // 2))
        params = TypeIParams.make(n, m, t, base, normalize)
        if obj == "i1m":
            res = i1m(params, _quad_spec(args, False), Contour(args.radius),
                      policy)
        elif obj == "inm_direct":
            res = inm_direct(params, _quad_spec(args, True), policy)
        else:
            a_slots = doc.get("a_slots")
            b_slots = doc.get("b_slots")
            det = inm_det_full(params, _quad_spec(args, False),
                               a_slots=a_slots, b_slots=b_slots, policy=policy)
            payload.update(value=_pair(det.value), err_est=None,
                           nodes_used=det.nodes_used, converged=det.converged,
                           prefactor=_pair(det.prefactor), det=_pair(det.det),
                           cond_est=det.cond_est)
            return payload
    err = res.err_est if math.isfinite(res.err_est) else None
    payload.update(value=_pair(res.value), err_est=err,
                   nodes_used=res.nodes_used, converged=res.converged)
    return payload


def cmd_eval(args) -> int:
    payload = _eval_payload(args)
    text = json.dumps(payload, sort_keys=True)
    print(text)
    if args.out:
        with open(_resolve_out(args.out), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if not payload.get("converged", True):
        print("ellipgamma eval: quadrature did not converge within the node cap",
              file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _resolve_names(name: str | None, nm) -> list:
    if name is None:
        raise ValueError("verify needs a check name or 'all' (see --list)")
    if name == "all":
        if nm is not None:
            raise ValueError("--nm cannot be combined with 'all'")
        return list(CHECKS)
    if nm is not None:
        n, m = nm
        candidates = (f"{name}-{n}-{m}", f"{name}-n{n}-m{m}", name)
        for cand in candidates:
            if cand in CHECKS:
                return [cand]
        raise ValueError(f"no registered check matches {name!r} with --nm {n},{m}")
    if name in CHECKS:
        return [name]
    raise ValueError(f"unknown check {name!r}; run 'ellipgamma verify --list'")


def cmd_verify(args) -> int:
    if args.list:
        for name, tol, trials, tags, doc in list_checks():
            print(f"{name:32s} tol={tol:<8g} trials={trials:<4d} "
                  f"[{','.join(tags)}] {doc}")
        return 0
    names = _resolve_names(args.name, args.nm)
    lines = []
    infeasible = []
    failures = 0
    t_start = time.perf_counter()
    for name in names:
        t0 = time.perf_counter()
        try:
            reports = run_check(name, seed=args.seed, trials=args.trials,
                                tol=args.tol)
        except SamplerInfeasible as exc:
            infeasible.append(name)
            print(f"{name}: no admissible draw ({exc})", file=sys.stderr)
            continue
        npass = sum(1 for r in reports if r.passed)
        failures += len(reports) - npass
        worst = max(r.residual for r in reports)
        print(f"{name}: {npass}/{len(reports)} pass, worst residual "
              f"{worst:.3e}, {time.perf_counter() - t0:.2f}s", file=sys.stderr)
        lines.extend(r.to_json() for r in reports)
    print(f"verify: {len(lines)} report lines, "
          f"{time.perf_counter() - t_start:.1f}s total", file=sys.stderr)
    text = "".join(line + "\n" for line in lines)
    if args.out:
        with open(_resolve_out(args.out), "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if infeasible:
        return 3
    return 2 if failures else 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args) -> int:
    n, m = args.nm
    if n != 2:
        raise ValueError("bench compares the two routes at n=2 only")
    if m not in (0, 1):
        raise ValueError("bench supports m in {0, 1}")
    rng = rng_for(args.seed, f"bench-{n}-{m}", 0)
    if m == 0:
        base = draw_base_pair(rng, (0.1, 0.16), (0.25, 0.33))
        windows = [(0.45, 0.75)] * 8
    else:
        base = draw_base_pair(rng, (0.1, 0.15), (0.25, 0.32))
        windows = [(0.42, 0.68)] * 10
    t = draw_balanced(rng, windows, base.pq ** (m + 1),
                      constraints=[pairwise_separation(delta=3e-2)])
    params = TypeIParams(2, m, t, base)

    det_spec = QuadSpec(rel_tol=args.rtol)
    tensor_spec = QuadSpec(n0=64, n_max=512, rel_tol=args.rtol)

    t0 = time.perf_counter()
    det = inm_det_full(params, det_spec)
    det_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    direct = inm_direct(params, tensor_spec)
    tensor_seconds = time.perf_counter() - t0

    det_evals = det.nodes_used
    tensor_evals = direct.nodes_used ** 2
    ratio = tensor_evals / det_evals
    scale = max(abs(det.value), abs(direct.value))
    agreement = abs(det.value - direct.value) / scale

    def fmt(z: complex) -> str:
        return f"{z.real:+.12e}{z.imag:+.12e}j"

    print(f"two-dimensional integral, surplus m={m}, "
          f"{2 * n + 2 * m + 4} parameters, seed {args.seed}, "
          f"target rtol {args.rtol:g}")
    print(f"{'route':8s} {'value':42s} {'evals':>10s} {'seconds':>9s}")
    print(f"{'det':8s} {fmt(det.value):42s} {det_evals:>10d} "
          f"{det_seconds:>9.3f}")
    print(f"{'tensor':8s} {fmt(direct.value):42s} {tensor_evals:>10d} "
          f"{tensor_seconds:>9.3f}")
    print(f"agreement (relative): {agreement:.3e}")
    print(f"eval ratio (tensor/det): {ratio:.1f}")

    if args.out:
        summary = {
            "n": n, "m": m, "seed": args.seed, "rtol": args.rtol,
            "det_value": _pair(det.value), "tensor_value": _pair(direct.value),
            "det_evals": det_evals, "tensor_evals": tensor_evals,
            "ratio": ratio, "agreement": agreement,
            "det_seconds": det_seconds, "tensor_seconds": tensor_seconds,
            "converged": bool(det.converged and direct.converged),
        }
        with open(_resolve_out(args.out), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(summary, sort_keys=True) + "\n")

    if not (det.converged and direct.converged):
        print("ellipgamma bench: a route failed to converge", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def cmd_report(args) -> int:
    path = args.path
    if os.path.isfile(path):
        files = [path]
    elif os.path.isdir(path):
        files = sorted(glob.glob(os.path.join(path, "*.ndjson"))
                       + glob.glob(os.path.join(path, "*.jsonl")))
    else:
        print(f"ellipgamma report: no such file or directory: {path}",
              file=sys.stderr)
        return 1

    records = []
    for fn in files:
        with open(fn, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    print(f"ellipgamma report: {fn}:{lineno}: "
                          "unparseable report line", file=sys.stderr)
                    return 1
                if not isinstance(rec, dict) or "name" not in rec:
                    print(f"ellipgamma report: {fn}:{lineno}: "
                          "not an identity report", file=sys.stderr)
                    return 1
                records.append(rec)

    groups: dict = {}
    for rec in records:
        groups.setdefault(rec["name"], []).append(rec)

    print(f"{'identity':32s} {'trials':>6s} {'pass':>5s} {'rate':>7s} "
          f"{'max residual':>13s} {'med nodes':>10s}")
    total = passed = 0
    for name in sorted(groups):
        recs = groups[name]
        npass = sum(1 for r in recs if r.get("passed"))
        total += len(recs)
        passed += npass
        max_res = max(float(r.get("residual", 0.0)) for r in recs)
        med_nodes = int(statistics.median(int(r.get("nodes", 0)) for r in recs))
        rate = 100.0 * npass / len(recs)
        print(f"{name:32s} {len(recs):>6d} {npass:>5d} {rate:>6.1f}% "
              f"{max_res:>13.3e} {med_nodes:>10d}")
    if records:
        print(f"{'TOTAL':32s} {total:>6d} {passed:>5d} "
              f"{100.0 * passed / total:>6.1f}%")
    return 0 if passed == total else 2


# ---------------------------------------------------------------------------

_HANDLERS = {"eval": cmd_eval, "verify": cmd_verify,
             "bench": cmd_bench, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("ellipgamma: error: a command is required", file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](args)
    except NonConvergent as exc:
        print(f"ellipgamma {args.command}: {exc}", file=sys.stderr)
        return 2
    except SamplerInfeasible as exc:
        print(f"ellipgamma {args.command}: {exc}", file=sys.stderr)
        return 3
    except (EllipticError, ValueError, OSError) as exc:
        print(f"ellipgamma {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
