"""Command-line front end for sideinfo-bc.

Subcommands classify side-information graphs (graphs.py), trace region
slices and compare regions (regions.py), compute the group-4 thresholds
(bounds.py), run Fourier-Motzkin derivations (fme.py, derivations.py) and
simulate the transmission schemes (schemes.py, simulator.py).

Data goes to stdout or ``--out`` (written atomically); status lines go to
stderr. Exit codes: 0 ok, 1 derivation mismatch, 2 bad input, 3 bound
selector not defined for the configuration, 4 scheme not simulated,
5 resource guard hit.
"""

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np
from pydantic import ValidationError

from bounds import BoundError, ChannelParams, awgn_capacity, group4_thresholds
from derivations import builtins, verify
from fme import FMEError, eliminate_all, format_system, parse_system, remove_redundant
from graphs import GraphError, capacity_known, classification_table, decompose, enumerate_all, make_graph
from regions import SELECTORS, RegionError, SelectorError, contains, hausdorff_gap, region_for, slice2d
from schemes import SchemeError, UnsupportedSchemeError, scheme_for
from settings import Settings, load_channel, load_graph, load_settings
from simulator import MODES, CandidateGuardError, SimConfig, SimulationError, compare_decoders, rates_to_bits, run_sim

EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_SELECTOR = 3
EXIT_UNSUPPORTED = 4
EXIT_GUARD = 5

logger = logging.getLogger("sideinfo-bc")


def _axis(name: str) -> int:
    """``R2`` -> 1."""
    name = name.strip().upper()
    if not name.startswith("R") or not name[1:].isdigit() or int(name[1:]) < 1:
        raise ValueError(f"rate axis must look like R1, R2, ...; got {name!r}")
    return int(name[1:]) - 1


def _fixed(spec: str) -> "tuple[int, float]":
    """``R1=0.3`` -> (0, 0.3)."""
    axis, _, value = spec.partition("=")
    if not value:
        raise ValueError(f"--fix must look like R1=0.3; got {spec!r}")
    return _axis(axis), float(value)


def _floats(text: str) -> "list[float]":
    return [float(v) for v in text.split(",") if v.strip()]


def _write_output(text: str, out: "str | None") -> None:
    """Print to stdout, or replace ``out`` atomically."""
    if not out:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sideinfo-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    print(f"✅ Wrote {out}", file=sys.stderr)


def _channel(value: str) -> ChannelParams:
    model = load_channel(value)
    return ChannelParams(model.P, tuple(model.N))


def _graph(value: str):
    model = load_graph(value)
    return make_graph(model.Q, model.arcs)


def _settings(args: argparse.Namespace) -> Settings:
    base = load_settings(args.config)
    return base.with_overrides(
        param_grid=args.param_grid,
        refine_steps=args.refine_steps,
        workers=args.workers,
        seed=args.seed,
        member_tol=getattr(args, "member_tol", None),
        boundary_tol=getattr(args, "tol", None),
        slice_grid=getattr(args, "grid", None),
        contain_samples=getattr(args, "samples", None),
        max_candidate_bits=getattr(args, "max_candidate_bits", None),
    )


def cmd_classify(args: argparse.Namespace) -> None:
    if args.all:
        table = classification_table()
        rows = []
        for group, members in table.items():
            flags = "".join("K" if capacity_known(gm) else "." for gm in members)
            rows.append(f"G1{group}: {flags}")
        known = sum(capacity_known(gm) for members in table.values() for gm in members)
        total = len(enumerate_all(3))
        rows.append(f"{total} configurations, {known} capacity known, {total - known} unknown")
        _write_output("\n".join(rows) + "\n", args.out)
        return
    if not args.graph:
        raise ValueError("classify needs --graph or --all")
    g = _graph(args.graph)
    gm = decompose(g)
    known = capacity_known(gm)
    if args.out and args.out.endswith(".json"):
        payload = {
            "group": gm.group,
            "member": gm.member,
            "label": gm.label(),
            "side_information": {str(i): sorted(g.out_neighbors(i)) for i in g.receivers()},
            "capacity_known": known,
        }
        _write_output(json.dumps(payload, indent=2) + "\n", args.out)
        return
    lines = [f"group {gm.group}, member {gm.member}, capacity {'known' if known else 'unknown'}",
             f"configuration {gm.label()}"]
    lines += [f"O_{i} = {{{', '.join(map(str, sorted(g.out_neighbors(i))))}}}" for i in g.receivers()]
    _write_output("\n".join(lines) + "\n", args.out)


def cmd_region(args: argparse.Namespace) -> None:
    settings = _settings(args)
    g = _graph(args.graph)
    p = _channel(args.channel)
    region = region_for(args.bound, g, p, settings)
    fixed = _fixed(args.fix)
    result = slice2d(region, fixed, _axis(args.sweep), _axis(args.response), grid=settings.slice_grid)
    if not result.samples:
        print(f"⚠️ {args.fix} lies outside {region.label}; empty slice", file=sys.stderr)
    _write_output(result.to_csv(), args.out)


def cmd_compare(args: argparse.Namespace) -> None:
    settings = _settings(args)
    g = _graph(args.graph)
    p = _channel(args.channel)
    a = region_for(args.outer, g, p, settings)
    b = region_for(args.inner, g, p, settings)
    ok, witness = contains(a, b, samples=settings.contain_samples, tol=args.contain_tol, seed=settings.seed)
    report = {"outer": args.outer, "inner": args.inner, "contains": ok,
              "witness": None if witness is None else [float(w) for w in witness]}
    if args.fix:
        report["gap"] = hausdorff_gap(a, b, _fixed(args.fix), _axis(args.sweep), _axis(args.response),
                                      grid=settings.slice_grid)
    _write_output(json.dumps(report, indent=2) + "\n", args.out)


def cmd_thresholds(args: argparse.Namespace) -> None:
    p = _channel(args.channel)
    if args.r1:
        r1s = _floats(args.r1)
    else:
        r1s = list(np.linspace(0.0, awgn_capacity(p.P / p.N[0]), args.steps))
    lines = ["r1,r_thr3,r_thr3_prime"]
    for r1 in r1s:
        t = group4_thresholds(p, r1)
        lines.append(f"{r1:.9g},{t.r_thr3:.9g},{t.r_thr3_prime:.9g}")
    _write_output("\n".join(lines) + "\n", args.out)


def cmd_fme(args: argparse.Namespace) -> None:
    if args.list:
        _write_output("".join(f"{name}: {d.summary}\n" for name, d in builtins().items()), args.out)
        return
    if args.builtin:
        table = builtins()
        if args.builtin not in table:
            raise FMEError(f"unknown derivation {args.builtin!r}; use --list")
        projected, ok = verify(table[args.builtin], assignments=args.assignments, seed=args.seed or 0)
        _write_output(format_system(projected), args.out)
        if ok:
            print(f"✅ {args.builtin}: projection matches the target region", file=sys.stderr)
        else:
            print(f"❌ {args.builtin}: projection differs from the target region", file=sys.stderr)
            sys.exit(EXIT_MISMATCH)
        return
    if not args.system:
        raise FMEError("fme needs a system file, --builtin or --list")
    with open(args.system, "r", encoding="utf-8") as f:
        system = parse_system(f.read())
    variables = [v.strip() for v in (args.eliminate or "").split(",") if v.strip()]
    _write_output(format_system(remove_redundant(eliminate_all(system, variables))), args.out)


def cmd_simulate(args: argparse.Namespace) -> None:
    settings = _settings(args)
    g = _graph(args.graph)
    p = _channel(args.channel)
    gm = decompose(g)
    powers = _floats(args.powers) if args.powers else None
    spec = scheme_for(gm, g, powers)
    bits = rates_to_bits(spec, _floats(args.rates), args.n, args.max_bits)
    cfg = SimConfig(args.n, bits, args.trials, p, settings.seed)
    print(f"🔎 {gm.label()}: {spec.describe()}", file=sys.stderr)
    if args.mode == "compare":
        results = compare_decoders(spec, cfg, ("joint", "separate"), settings)
        payload = {r.mode: r.to_report().model_dump() for r in results}
        _write_output(json.dumps(payload, indent=2) + "\n", args.out)
        return
    _write_output(run_sim(spec, cfg, args.mode, settings).to_json() + "\n", args.out)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON settings file (flags override its values).")
    p.add_argument("--out", help="Output path (.csv/.json/.txt); stdout when omitted.")
    p.add_argument("--seed", type=int, help="Master seed for sampled and simulated results.")
    p.add_argument("--workers", type=int, help="Worker threads.")
    p.add_argument("--param-grid", type=int, help="Grid points per power-split dimension.")
    p.add_argument("--refine-steps", type=int, help="Refinement halvings around the best grid point.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")


def _parse_args(argv: "list[str] | None" = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Rate regions, derivations and simulations for the three-receiver AWGN "
                    "broadcast channel with receiver message side information."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Group/member classification of a side-information graph.")
    _add_common(p)
    p.add_argument("--graph", help='Graph JSON file or inline JSON, e.g. \'{"Q":3,"arcs":[[3,1]]}\'.')
    p.add_argument("--all", action="store_true", help="Summarize all 64 three-receiver configurations.")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("region", help="Boundary slice of a rate region as CSV.")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--channel", required=True, help='Channel JSON, e.g. \'{"P":10,"N":[1,2,4]}\'.')
    p.add_argument("--bound", required=True, choices=SELECTORS)
    p.add_argument("--fix", default="R1=0", help="Fixed rate, e.g. R1=0.3.")
    p.add_argument("--sweep", default="R2")
    p.add_argument("--response", default="R3")
    p.add_argument("--grid", type=int, help="Sweep samples.")
    p.add_argument("--tol", type=float, help="Boundary bisection resolution.")
    p.add_argument("--member-tol", type=float, help="Constraint slack accepted by membership.")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("compare", help="Sampled containment (and optional slice gap) of two regions.")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--outer", required=True, choices=SELECTORS)
    p.add_argument("--inner", required=True, choices=SELECTORS)
    p.add_argument("--samples", type=int, help="Boundary-biased sample points.")
    p.add_argument("--contain-tol", type=float, default=1e-6)
    p.add_argument("--fix", help="Also report the slice gap at this fixed rate, e.g. R1=0.3.")
    p.add_argument("--sweep", default="R2")
    p.add_argument("--response", default="R3")
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("thresholds", help="Group-4 thresholds R_thr3, R'_thr3 as CSV.")
    _add_common(p)
    p.add_argument("--channel", required=True)
    p.add_argument("--r1", help="Comma-separated R1 values.")
    p.add_argument("--steps", type=int, default=11, help="R1 grid size over [0, C(P/N1)] when --r1 is omitted.")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("fme", help="Fourier-Motzkin elimination of a linear system.")
    _add_common(p)
    p.add_argument("system", nargs="?", help="System text file.")
    p.add_argument("--eliminate", help="Comma-separated variables, eliminated in order.")
    p.add_argument("--builtin", help="Run a shipped derivation and check it against its target.")
    p.add_argument("--list", action="store_true", help="List shipped derivations.")
    p.add_argument("--assignments", type=int, default=100, help="Constant assignments for the check.")
    p.set_defaults(func=cmd_fme)

    p = sub.add_parser("simulate", help="Monte Carlo error rates of a member's scheme as JSON.")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--rates", required=True, help="Comma-separated R1,R2,R3 in bits per channel use.")
    p.add_argument("--powers", help="Comma-separated subcodebook power fractions (default: equal).")
    p.add_argument("--n", type=int, default=64, help="Blocklength.")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--max-bits", type=int, help="Cap on bits per message label.")
    p.add_argument("--max-candidate-bits", type=int, help="Exhaustive search guard.")
    p.add_argument("--mode", default="joint", choices=MODES + ("compare",))
    p.set_defaults(func=cmd_simulate)

    return parser.parse_args(argv)


def main(argv: "list[str] | None" = None) -> None:
    args = _parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SelectorError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        sys.exit(EXIT_SELECTOR)
    except UnsupportedSchemeError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        sys.exit(EXIT_UNSUPPORTED)
    except CandidateGuardError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        sys.exit(EXIT_GUARD)
    except (ValidationError, json.JSONDecodeError, OSError, GraphError, BoundError, RegionError,
            FMEError, SchemeError, SimulationError, ValueError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


if __name__ == "__main__":
    main()
