"""Command line: ``bks2 color | contexts | verify-model | build-product``.

Exit codes: 0 colorable / all checks pass, 1 non-colorable / some check
fails, 2 usage or input error.  Reports are JSON with sorted keys, or a
plain text rendering of the same content.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .catalogs import CATALOG_NAMES, CatalogError, builtin_catalog
from .coloring import count_valuations, export_cnf, search_valuation
from .exact_algebra import is_density
from .hv_model import (
    CheckReport,
    ModelError,
    build_product_model,
    check_at_least_one,
    check_bks2,
    check_born_all,
    check_joint_zero,
    check_orthogonal_additivity,
    model_hypergraph,
    validate_model,
)
from .hypergraph import RaySet, build_hypergraph
from .io import (
    InputError,
    format_rays,
    load_model,
    load_rays,
    load_state,
    model_to_json,
    parse_contexts_spec,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = ("born", "bks2", "lemma1", "lemma2", "joint", "all-checks")


class UsageError(Exception):
    pass


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(hashlib.sha256(c).digest())
    return "sha256:" + h.hexdigest()


def _rays_from_args(args) -> tuple[RaySet, str, list[str]]:
    if args.catalog:
        try:
            cat = builtin_catalog(args.catalog)
        except CatalogError as exc:
            raise UsageError(exc.args[0]) from None
        return cat.rayset(), f"catalog:{cat.name}", []
    rays, warnings = load_rays(args.rays)
    return rays, f"file:{args.rays}", warnings


def _ray_source(rays: RaySet) -> bytes:
    return format_rays(rays).encode()


# -- commands ------------------------------------------------------------------


def cmd_color(args) -> tuple[int, dict]:
    rays, source, warnings = _rays_from_args(args)
    h = build_hypergraph(rays)
    result = search_valuation(h)
    report: dict[str, Any] = {
        "source": source,
        "input_digest": _digest(_ray_source(rays)),
        "hypergraph": h.stats(),
        "verdict": result.verdict,
        "stats": result.stats.as_dict(),
        "warnings": warnings,
    }
    if result.witness is not None:
        report["witness"] = list(result.witness.values)
        if args.witness:
            report["witness_rays"] = [str(rays[i]) for i in result.witness.ones()]
    if args.count:
        c = count_valuations(h, args.cap)
        report["count"] = {"value": c.count, "exact": c.exact}
    if args.emit_cnf:
        Path(args.emit_cnf).write_text(export_cnf(h), encoding="ascii")
        report["cnf"] = args.emit_cnf
    return (EXIT_OK if result.colorable else EXIT_FAIL), report


def cmd_contexts(args) -> tuple[int, dict]:
    rays, source, warnings = _rays_from_args(args)
    h = build_hypergraph(rays)
    return EXIT_OK, {
        "source": source,
        "input_digest": _digest(_ray_source(rays)),
        "hypergraph": h.stats(),
        "rays": [str(r) for r in rays],
        "pairs": [list(p) for p in h.pairs],
        "contexts": [list(c) for c in h.contexts],
        "verdict": "ok",
        "warnings": warnings,
    }


def cmd_verify_model(args) -> tuple[int, dict]:
    model_bytes = Path(args.model).read_bytes()
    state_bytes = Path(args.state).read_bytes()
    m = load_model(args.model)
    d = load_state(args.state)
    report: dict[str, Any] = {
        "model": args.model,
        "state": args.state,
        "input_digest": _digest(model_bytes, state_bytes),
    }
    diag = is_density(d) if d.dimension == m.dimension else None
    if diag is None or not diag:
        why = diag.failure if diag is not None else f"dimension {d.dimension} != model dimension {m.dimension}"
        raise InputError(f"{args.state}: invalid density operator: {why}")

    reports: list[CheckReport] = [validate_model(m)]
    if reports[0].passed:
        check = args.check
        h, names = model_hypergraph(m)
        ctx_ids = list(range(len(h.contexts)))
        if args.context is not None:
            if not 0 <= args.context < len(h.contexts):
                raise UsageError(f"--context {args.context} out of range; the model has {len(h.contexts)} contexts")
            ctx_ids = [args.context]
        report["contexts"] = [
            {"index": k, "projectors": [names[r] for r in h.contexts[k]]} for k in ctx_ids
        ]
        wanted = CHECKS[:-1] if check == "all-checks" else (check,)
        if "born" in wanted:
            reports.append(check_born_all(m, d))
        if "bks2" in wanted:
            reports.append(check_bks2(m))
        for k in ctx_ids:
            rays = [h.rayset[r] for r in h.contexts[k]]
            for name, fn in (
                ("lemma1", lambda: check_at_least_one(m, rays)),
                ("lemma2", lambda: check_orthogonal_additivity(m, rays, d)),
                ("joint", lambda: check_joint_zero(m, rays)),
            ):
                if name in wanted:
                    r = fn()
                    reports.append(CheckReport(f"{r.name}[context {k}]", r.findings, r.equations, r.unchecked))
    checks = [r.as_dict() for r in reports]
    ok = all(r.passed for r in reports)
    report["checks"] = checks
    report["verdict"] = "pass" if ok else "fail"
    return (EXIT_OK if ok else EXIT_FAIL), report


def cmd_build_product(args) -> tuple[int, dict]:
    rays, warnings = load_rays(args.rays)
    d = load_state(args.state)
    contexts = parse_contexts_spec(args.contexts)
    for ctx in contexts:
        for r in ctx:
            if not 0 <= r < len(rays):
                raise InputError(f"ray id {r} out of range 0..{len(rays) - 1}")
    m = build_product_model(contexts, rays, d)
    text = json.dumps(model_to_json(m), sort_keys=True, indent=2) + "\n"
    Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK, {
        "input_digest": _digest(_ray_source(rays), Path(args.state).read_bytes()),
        "rays": [str(r) for r in rays],
        "contexts": [list(c) for c in contexts],
        "lambdas": len(m.lambdas),
        "output": args.output,
        "verdict": "ok",
        "warnings": warnings,
    }


# -- plumbing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default=argparse.SUPPRESS,
                        help="report format (default json)")

    p = _Parser(prog="bks2", description="Valuation search and hidden-variable model checks.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ray_source(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--catalog", metavar="NAME", help=f"one of: {', '.join(CATALOG_NAMES)}")
        g.add_argument("--rays", metavar="FILE", help="ray file")

    sp = sub.add_parser("color", parents=[common], help="search for a valuation")
    ray_source(sp)
    sp.add_argument("--count", action="store_true", help="also count all valuations")
    sp.add_argument("--cap", type=int, default=None, help="stop counting at N")
    sp.add_argument("--emit-cnf", metavar="FILE", help="write the DIMACS encoding")
    sp.add_argument("--witness", action="store_true", help="list the rays valued 1")
    sp.set_defaults(func=cmd_color)

    sp = sub.add_parser("contexts", parents=[common], help="list orthogonal pairs and contexts")
    ray_source(sp)
    sp.set_defaults(func=cmd_contexts)

    sp = sub.add_parser("verify-model", parents=[common], help="check a hidden-variable model")
    sp.add_argument("model", metavar="FILE")
    sp.add_argument("--state", metavar="FILE", required=True)
    sp.add_argument("--check", choices=CHECKS, default="all-checks")
    sp.add_argument("--all-checks", dest="check", action="store_const", const="all-checks")
    sp.add_argument("--context", type=int, metavar="IDX", default=None)
    sp.set_defaults(func=cmd_verify_model)

    sp = sub.add_parser("build-product", parents=[common], help="build a product model")
    sp.add_argument("--rays", metavar="FILE", required=True)
    sp.add_argument("--contexts", metavar="SPEC", required=True,
                    help='ray ids per context, e.g. "0,1;2,3"')
    sp.add_argument("--state", metavar="FILE", required=True)
    sp.add_argument("-o", "--output", metavar="FILE", required=True)
    sp.set_defaults(func=cmd_build_product)
    return p


def render_text(report: dict, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for key in sorted(report):
        val = report[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                lines.append(f"{pad}  -")
                lines.append(render_text(item, indent + 2))
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: {' '.join(json.dumps(v) if not isinstance(v, str) else v for v in val)}")
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(line for line in lines if line)


def emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "text":
        out.write(render_text(report) + "\n")
    else:
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    fmt = "json"
    try:
        args = parser.parse_args(argv)
        fmt = getattr(args, "report", "json")
        code, report = args.func(args)
    except UsageError as exc:
        emit({"command": argv, "verdict": "error", "error": f"usage: {exc}"}, fmt)
        return EXIT_USAGE
    except (InputError, ModelError, OSError, ValueError) as exc:
        emit({"command": argv, "verdict": "error", "error": str(exc)}, fmt)
        return EXIT_USAGE
    report["command"] = argv
    emit(report, fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
