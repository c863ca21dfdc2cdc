"""Command-line front end: ``pptfarm build|verify|audit|bounds|scan|layout``.

Exit codes: 0 success (or report produced), 1 failed verification,
2 invalid input, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import analysis, family
from .errors import CapacityError, PptFarmError
from .matrixio import format_float, load_family, save_matrix
from .tensor_core import DEFAULT_TOL, validate_density

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_CAPACITY = 0, 1, 2, 3

TRACE_DISTANCE_TOL = 1e-8


class UsageError(PptFarmError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _q_list(text: str) -> list:
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if tok.lower() in ("q*", "qstar"):
            out.append("qstar")
            continue
        try:
            out.append(float(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad q value {tok!r} (number or 'qstar')")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pptfarm",
        description="Build and audit the multipartite PPT state family.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("-n", "--parties", type=_int_list, help="party count n >= 2")
    fam.add_argument("--dA", type=int, help="local A dimension")
    fam.add_argument("--dB", type=int, help="local B dimension")
    fam.add_argument("--blocks", default="canonical",
                     help='"canonical" or a family description JSON file')

    qopt = argparse.ArgumentParser(add_help=False)
    qopt.add_argument("-q", "--q-grid", type=_q_list, dest="q",
                      help="mixing weight(s), comma separated; 'qstar' allowed")

    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--tol", type=float, default=DEFAULT_TOL, help="PSD tolerance")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--out", help="output file (default: stdout)")

    p = sub.add_parser("build", parents=[fam, qopt, out], help="export rho as a matrix file")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="format of the printed summary")

    sub.add_parser("verify", parents=[fam, qopt, tol, out],
                   help="density, orthogonality and trace-norm checks")

    p = sub.add_parser("audit", parents=[fam, qopt, tol, out], help="PPT audit over all cuts")
    p.add_argument("--cuts", choices=("canonical", "all"), default="canonical",
                   help="canonical: subsets of parties 2..n; all: every nonempty proper subset")
    p.add_argument("--resolution", type=float, default=1e-6, help="feasible-interval endpoint resolution")

    p = sub.add_parser("bounds", parents=[fam, out], help="closed-form bound report")
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("scan", parents=[fam, out], help="dimension scaling table")
    p.add_argument("--epsilon", type=_float_list, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("layout", parents=[fam, out], help="A-block occupancy grid")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _single(values, name):
    if values is None:
        return None
    if len(values) != 1:
        raise UsageError(f"{name} takes a single value here")
    return values[0]


def _family_inputs(args, need_q: bool):
    """Merge a family description file (if any) with command-line values."""
    values, blocks = {}, None
    if args.blocks != "canonical":
        values, blocks = load_family(args.blocks)
    n = _single(args.parties, "-n") if args.parties else values.get("n")
    d_A = args.dA if args.dA is not None else values.get("d_A")
    d_B = args.dB if args.dB is not None else values.get("d_B", 2)
    for name, v in (("-n", n), ("--dA", d_A)):
        if v is None:
            raise UsageError(f"{name} is required")
    qs = getattr(args, "q", None)
    if qs is None:
        qs = [values["q"]] if "q" in values else None
    if need_q and qs is None:
        raise UsageError("-q is required")
    base = family.FamilyParams(n, d_A, d_B)
    if qs is not None:
        qs = [analysis.q_star(n, d_A, d_B) if q == "qstar" else q for q in qs]
    return base, qs, blocks


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_build(args) -> int:
    base, qs, blocks = _family_inputs(args, need_q=True)
    params = base.with_q(_single(qs, "-q"))
    params.check_capacity()
    rho = family.build_mixture(params, blocks)
    if args.out:
        save_matrix(rho, args.out)
    nblocks = int(np.count_nonzero(family.block_layout(params.n, params.d_A) >= 0))
    summary = {"order": rho.order, "trace": rho.trace(), "blocks": nblocks}
    if args.format == "json":
        sys.stdout.write(_dump(summary))
    else:
        sys.stdout.write("".join(f"{k}: {format_float(v)}\n" for k, v in summary.items()))
    return EXIT_OK


def cmd_verify(args) -> int:
    base, qs, blocks = _family_inputs(args, need_q=True)
    base.check_capacity()
    ortho = family.support_orthogonality_check(base, blocks)
    entries = []
    for q in qs:
        params = base.with_q(q)
        rho = family.build_mixture(params, blocks)
        dens = validate_density(rho, args.tol)
        lem = analysis.verify_lemma1(params, blocks)
        entries.append({
            "q": params.q,
            "density": dens.as_dict(),
            "lemma1": {**lem.as_dict(), "tol": TRACE_DISTANCE_TOL, "passed": lem.residual <= TRACE_DISTANCE_TOL},
        })
    passed = ortho.passed and all(e["density"]["passed"] and e["lemma1"]["passed"] for e in entries)
    report = {
        "params": {"n": base.n, "d_A": base.d_A, "d_B": base.d_B},
        "orthogonality": ortho.as_dict(),
        "checks": entries,
        "passed": passed,
    }
    _emit(_dump(report), args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_audit(args) -> int:
    base, qs, blocks = _family_inputs(args, need_q=False)
    if qs is None:
        qs = [0.0, analysis.q_star(base.n, base.d_A, base.d_B), 1.0]
    threads = int(os.environ.get("PPTFARM_THREADS", "1") or 1)
    report = analysis.ppt_audit(base, qs, cuts=args.cuts, tol=args.tol,
                                resolution=args.resolution, blocks=blocks, threads=threads)
    _emit(_dump(report.as_dict()), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    n = _single(args.parties, "-n")
    if n is None:
        raise UsageError("-n is required")
    if args.dA is None and args.dB is None and args.epsilon is not None:
        report = analysis.dims_for_epsilon(n, args.epsilon)
    else:
        if args.dA is None or args.dB is None:
            raise UsageError("--dA and --dB are required (or give only --epsilon)")
        report = analysis.bound_report(n, args.dA, args.dB, args.epsilon)
    _emit(_dump(report.as_dict()), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    ns = args.parties or [2, 3, 4]
    rows = analysis.scaling_table(ns, args.epsilon)
    if args.format == "json":
        text = _dump(rows)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(analysis.SCALING_HEADER)
        for row in rows:
            writer.writerow([format_float(row[k]) for k in analysis.SCALING_HEADER])
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def render_layout(grid: np.ndarray) -> str:
    """Text grid: ``.`` empty, ``a`` a rho0 block, ``b<l>`` a block of label ``l``."""
    cells = [["." if g < 0 else "a" if g == 0 else f"b{g}" for g in row] for row in grid]
    width = max(len(c) for row in cells for c in row)
    return "".join(" ".join(c.rjust(width) for c in row) + "\n" for row in cells)


def cmd_layout(args) -> int:
    n = _single(args.parties, "-n")
    if n is None or args.dA is None:
        raise UsageError("-n and --dA are required")
    grid = family.block_layout(n, args.dA)
    if args.format == "json":
        lm = family.label_map(n, args.dA)
        doc = {
            "n": n,
            "d_A": args.dA,
            "size": int(grid.shape[0]),
            "rho0": [[r + 1, c + 1] for r, c in zip(*np.nonzero(grid == 0))],
            "labels": [
                {"l": lab.l, "alpha": list(lab.alpha.alpha), "i": lab.i, "j": lab.j,
                 "v": list(lab.v.components), "w": list(lab.w.components),
                 "v_flat": lab.v.flat, "w_flat": lab.w.flat}
                for lab in lm
            ],
            "blocks": [[int(r) + 1, int(c) + 1, int(grid[r, c])] for r, c in zip(*np.nonzero(grid >= 0))],
        }
        doc["rho0"] = [[int(r), int(c)] for r, c in doc["rho0"]]
        text = _dump(doc)
    else:
        text = render_layout(grid)
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "audit": cmd_audit,
    "bounds": cmd_bounds,
    "scan": cmd_scan,
    "layout": cmd_layout,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"pptfarm: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (PptFarmError, OSError, json.JSONDecodeError) as exc:
        print(f"pptfarm: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
