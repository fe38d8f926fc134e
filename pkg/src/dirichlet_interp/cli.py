"""Command-line interface.

Examples::

    dirichlet-interp gen example1 --r-grid e5,e5.5,e6,e6.5 --out ex1.json
    dirichlet-interp report ex1.json
    dirichlet-interp sweep example2 --r-grid e5,e5.5,e6,e6.5 --delta 0.5 --out ex2.csv
    dirichlet-interp oracle ob ex1.json --max-level 60

Exit codes: 0 success, 1 validation error, 2 infeasible construction.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import conditions, constructions
from .conditions import DEFAULT_DELTA_GRID, SequenceMeasure
from .errors import InfeasibleConstructionError, ValidationError
from .geometry import point_from_polar_depth
from .kernel import find_duplicates
from .report import report, rows_to_csv, sweep_example1, sweep_example2
from .sequence_file import dumps_sequence, parse_sequence

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2
DEFAULT_R_GRID = "e5,e5.5,e6,e6.5"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_real(token: str) -> float:
    """A real number, or ``eX`` meaning ``exp(X)``."""
    token = token.strip()
    try:
        if token[:1] in ("e", "E") and len(token) > 1:
            return math.exp(float(token[1:]))
        return float(token)
    except ValueError:
        raise ValidationError(f"cannot parse number {token!r}") from None


def parse_grid(text: str) -> list[float]:
    return [parse_real(tok) for tok in text.split(",") if tok.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=True) + "\n"


def _block_meta(p: constructions.BlockParams) -> dict:
    return {"R": p.R, "ell": p.ell, "N": p.N, "theta_mid": p.theta_mid}


def cmd_gen(args) -> int:
    if args.kind == "block":
        if args.R is None or args.ell is None or args.N is None:
            raise ValidationError("gen block needs --R, --ell and --N")
        p = constructions.BlockParams(parse_real(args.R), parse_real(args.ell), args.N, args.theta)
        chk = constructions.check_assumptions(p)
        meta = {"schedule": "block", "block": _block_meta(p),
                "assumptions": {"ok": chk.ok, "separation_margin": chk.separation_margin,
                                "count_margin": chk.count_margin}}
        _emit(dumps_sequence(constructions.block_points(p), meta), args.out)
        return EXIT_OK
    R_list = parse_grid(args.r_grid)
    if args.kind == "example1":
        u = constructions.assemble_example1(R_list)
        meta = {"schedule": "example1", "R_list": list(u.spec.R_sequence),
                "blocks": [_block_meta(b) for b in u.spec.blocks],
                "certificate": [{"block": c.block, "value": c.value, "threshold": c.threshold}
                                for c in u.certificate[1:]]}
    else:
        u = constructions.assemble_example2(R_list, args.delta)
        meta = {"schedule": "example2", "R_list": list(u.spec.R_sequence), "delta": args.delta,
                "blocks": [_block_meta(b) for b in u.spec.blocks],
                "mass_partial_sums": u.spec.mass_partial_sums}
    _emit(dumps_sequence(u.points, meta), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    seq = parse_sequence(args.file)
    dups = find_duplicates(seq.points)
    origin = [i for i, p in enumerate(seq.points) if p.is_origin]
    shallow = [i for i, p in enumerate(seq.points) if p.t > 0.5]
    summary = {"n_points": len(seq.points), "duplicates": [list(d) for d in dups],
               "origin": origin, "shallow": shallow, "valid": not dups and not origin}
    _emit(_json(summary), args.out)
    if shallow:
        log.warning("%d point(s) with |z| < 1/2", len(shallow))
    return EXIT_OK if summary["valid"] else EXIT_INVALID


def cmd_report(args) -> int:
    seq = parse_sequence(args.file)
    grid = parse_grid(args.delta_grid) if args.delta_grid else DEFAULT_DELTA_GRID
    _emit(_json(report(seq.points, grid).to_dict()), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    R_grid = parse_grid(args.r_grid)
    if args.kind == "example1":
        rows = sweep_example1(R_grid, union=args.union)
    else:
        rows = sweep_example2(R_grid, args.delta, union=args.union)
    _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    seq = parse_sequence(args.file)
    mu = SequenceMeasure.from_points(seq.points)
    exact, witness = conditions.ob_constant_exact(mu)
    dyadic = conditions.ob_constant_dyadic(mu, args.max_level)
    doc = {
        "ob_exact": exact,
        "witness": None if witness is None else {
            "theta_mid": witness.theta_mid, "theta_mid_lo": witness.theta_mid_lo, "length": witness.length},
        "ob_dyadic": dyadic,
        "max_level": args.max_level,
        "ratio": dyadic / exact if exact > 0 else None,
    }
    _emit(_json(doc), args.out)
    return EXIT_OK


def cmd_diag(args) -> int:
    if args.kind == "lemma2":
        z = point_from_polar_depth(parse_real(args.t), 0.0)
        rows = []
        for k in range(args.k_max + 1):
            d = conditions.lemma2_diameter(z, args.delta, k, probes=args.probes, seed=args.seed)
            rows.append({"k": k, "diameter": d, "ratio": d / (1.0 + conditions.dist_from_origin(z))})
        _emit(_json({"t": z.t, "delta": args.delta, "seed": args.seed, "rows": rows}), args.out)
    else:
        if not args.file:
            raise ValidationError("diag balls needs a sequence file")
        seq = parse_sequence(args.file)
        count = conditions.ball_count_profile(seq.points, args.c)
        _emit(_json({"c": args.c, "max_count": count}), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dirichlet-interp", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")

    gen = sub.add_parser("gen", help="generate a block or a counterexample union")
    gen.add_argument("kind", choices=["block", "example1", "example2"])
    gen.add_argument("--R", help="block: log(1/(1-r^2)); accepts eX for exp(X)")
    gen.add_argument("--ell", help="block: normalized arc length")
    gen.add_argument("--N", type=int, help="block: number of points")
    gen.add_argument("--theta", type=float, default=0.0, help="block: arc midpoint")
    gen.add_argument("--r-grid", default=DEFAULT_R_GRID)
    gen.add_argument("--delta", type=float, default=0.5)
    common(gen)
    gen.set_defaults(func=cmd_gen)

    chk = sub.add_parser("check", help="validate a sequence file")
    chk.add_argument("file")
    common(chk)
    chk.set_defaults(func=cmd_check)

    rep = sub.add_parser("report", help="all condition constants of a sequence file")
    rep.add_argument("file")
    rep.add_argument("--delta-grid", help="comma list of restricted-box exponents")
    common(rep)
    rep.set_defaults(func=cmd_report)

    sw = sub.add_parser("sweep", help="CSV sweep over a schedule")
    sw.add_argument("kind", choices=["example1", "example2"])
    sw.add_argument("--r-grid", default=DEFAULT_R_GRID)
    sw.add_argument("--delta", type=float, default=0.5)
    sw.add_argument("--union", action="store_true", help="report growing unions instead of single blocks")
    common(sw)
    sw.set_defaults(func=cmd_sweep)

    orc = sub.add_parser("oracle", help="exact vs dyadic one-box constant")
    orc.add_argument("which", choices=["ob"])
    orc.add_argument("file")
    orc.add_argument("--max-level", type=int, default=60)
    common(orc)
    orc.set_defaults(func=cmd_oracle)

    dg = sub.add_parser("diag", help="lemma diagnostics")
    dg.add_argument("kind", choices=["lemma2", "balls"])
    dg.add_argument("file", nargs="?")
    dg.add_argument("--t", default="e-16")
    dg.add_argument("--delta", type=float, default=0.5)
    dg.add_argument("--k-max", type=int, default=5)
    dg.add_argument("--probes", type=int, default=4096)
    dg.add_argument("--seed", type=int, default=0)
    dg.add_argument("--c", type=float, default=1.0)
    common(dg)
    dg.set_defaults(func=cmd_diag)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except InfeasibleConstructionError as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
