"""Command line entry point ``lpcompact``.

Exit codes: 0 success, 1 unexpected internal error, 2 invalid input,
3 a certificate or extraction was refused.
"""
from __future__ import annotations

import argparse
import sys

from .scenarios.runner import (
    EXIT_ERROR, EXIT_INVALID, SCHEMA_VERSION, ScenarioError, dumps, load_scenario, run_scenario,
    write_outputs,
)


def _family_args(sp, default_family, default_eps):
    sp.add_argument("--family", default=default_family,
                    help="family name (see make_family); default %(default)s")
    sp.add_argument("--params", default="{}", help="family parameters as a JSON object")
    sp.add_argument("--p", type=float, default=2.0, help="Bochner exponent (default %(default)s)")
    sp.add_argument("--prefix", type=int, default=100, metavar="L", help="prefix length")
    sp.add_argument("--epsilon", type=float, default=default_eps, metavar="e")


def _common(sp):
    sp.add_argument("--out", metavar="dir", help="write report.json and CSV files here")
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    ap = argparse.ArgumentParser(prog="lpcompact",
                                 description="Compactness diagnostics in discrete L^p(mu; X).")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="run a scenario file")
    sp.add_argument("scenario")
    sp.add_argument("--prefix", type=int, metavar="L", help="override family.prefix_length")
    sp.add_argument("--epsilon", type=float, metavar="e",
                    help="override eps of every analysis that takes one")
    _common(sp)

    sp = sub.add_parser("extract", help="7-epsilon subsequence extraction")
    _family_args(sp, "rotating", 0.1)
    sp.add_argument("--cover-radius", type=float, help="default epsilon/4")
    _common(sp)

    sp = sub.add_parser("certify-ui", help="uniform integrability certificate from a net")
    _family_args(sp, "convergent", 0.1)
    _common(sp)

    sp = sub.add_parser("certify-tightness", help="tightness certificate from nets")
    _family_args(sp, "convergent", 0.1)
    sp.add_argument("--n-max", type=int)
    _common(sp)

    sp = sub.add_parser("witness-nontight", help="search for a non-tightness witness")
    _family_args(sp, "escaping_basis", 0.5)
    sp.add_argument("--delta", type=float, default=1.0, help="separation delta0")
    sp.add_argument("--q", type=float, help="weighted-L^q lattice norm (default p)")
    _common(sp)

    sp = sub.add_parser("remark", help="check the two-point counterexample")
    sp.add_argument("--c", type=float, nargs=2, default=(3.0, 4.0))
    sp.add_argument("--y", type=float, default=5.0)
    sp.add_argument("--resolution", type=float, default=1e-2)
    _common(sp)
    return ap


def _scenario_from_args(args):
    import json

    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"--params is not valid JSON: {exc.msg}", "--params") from exc
    cfg = {"schema_version": SCHEMA_VERSION, "p": args.p,
           "family": {"name": args.family, "params": params, "prefix_length": args.prefix}}
    eps = args.epsilon
    if args.command == "extract":
        a = {"kind": "theorem1", "eps": eps}
        if args.cover_radius is not None:
            a["cover_radius"] = args.cover_radius
    elif args.command == "certify-ui":
        a = {"kind": "ui_from_net", "eps": eps}
    elif args.command == "certify-tightness":
        a = {"kind": "tightness_from_nets", "eps": eps}
        if args.n_max is not None:
            a["n_max"] = args.n_max
    else:
        a = {"kind": "witness", "eps0": eps, "delta0": args.delta}
        cfg["E"] = {"kind": "lq", "q": args.q if args.q is not None else args.p}
    cfg["analyses"] = [a]
    return cfg


def _remark_scenario(args):
    return {"schema_version": SCHEMA_VERSION,
            "family": {"name": "remark", "params": {"resolution": 0.25}, "prefix_length": 1},
            "analyses": [{"kind": "remark", "c": list(args.c), "y": args.y,
                          "resolution": args.resolution}]}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            cfg = load_scenario(args.scenario)
            if args.prefix is not None and isinstance(cfg.get("family"), dict):
                cfg["family"]["prefix_length"] = args.prefix
            if args.epsilon is not None:
                for a in cfg.get("analyses", []):
                    if isinstance(a, dict) and "eps" in a:
                        a["eps"] = args.epsilon
        elif args.command == "remark":
            cfg = _remark_scenario(args)
        else:
            cfg = _scenario_from_args(args)
        run = run_scenario(cfg)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # internal failure, e.g. a chain check that did not hold
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.out:
        write_outputs(run, args.out, args.format)
    if args.format == "json":
        sys.stdout.write(dumps(run.report))
    else:
        for name, text in sorted(run.csv_files.items()):
            sys.stdout.write(f"# {name}\n{text}")
    for e in run.report["analyses"]:
        if e["status"] == "refused":
            print(f"refused ({e['kind']}): {e['reason']}", file=sys.stderr)
    return run.exit_code


if __name__ == "__main__":
    sys.exit(main())
