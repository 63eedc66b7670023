"""Command-line front end.

Every command writes one JSON report (header, body, findings) to stdout or
``--output``. Exit status: 0 success, 1 contract or parse error, 2 numeric
error, 3 when the run recorded a finding. Zeros are given with ``--zeros``
(inline text record) or ``--input`` (file); see :mod:`sendovlab.records`
for the format. Strata use the notation ``n:mu_1,...,mu_m/nu_1,...,nu_k``,
for example ``5:1,1,1,1,1/4`` for the fifth roots of unity.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

from . import __version__
from .cpoly import DEFAULT_TOL, Tolerances, ZeroConfig, critical_points
from .errors import BoundaryError, ContractError, NumericError, ParseError
from .records import dumps, parse_complex_list, parse_zeros, serialize_zeros
from .strata import classify_stratum, parse_stratum

__all__ = ["main", "parse_zeros", "serialize_zeros", "build_parser", "run"]

EXIT_OK, EXIT_CONTRACT, EXIT_NUMERIC, EXIT_FINDING = 0, 1, 2, 3
TOLERANCE_KEYS = ("tau_sep", "tau_cluster", "rank_threshold")
COMMANDS = ("classify", "crit", "rank-sweep", "track", "scan", "search", "sample", "kkt", "disk")


# --------------------------------------------------------------------------
# helpers


def _tolerances(args) -> Tolerances:
    tol = DEFAULT_TOL
    for key in TOLERANCE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            if not value > 0:
                raise ContractError(f"{key} must be positive")
            tol = replace(tol, **{key: float(value)})
    return tol


def _zeros(args, tol: Tolerances) -> ZeroConfig:
    if args.zeros is not None and args.input is not None:
        raise ContractError("give either --zeros or --input, not both")
    if args.zeros is not None:
        text = args.zeros
    elif args.input is not None:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    else:
        raise ContractError("no zeros given (use --zeros or --input)")
    return parse_zeros(text, tau_sep=tol.tau_sep)


def _finding(kind: str, value: float, config: ZeroConfig | None, source: str, **extra) -> dict:
    record = {"kind": kind, "value": value, "source": source}
    if config is not None:
        record["zeros"] = serialize_zeros(config)
    record.update(extra)
    return record


def _crit_body(crit) -> dict:
    return {
        "first_kind": [[loc, mult] for loc, mult in crit.first_kind],
        "second_kind": [[loc, nu] for loc, nu in crit.second_kind],
        "k": crit.k,
    }


def _state_record(state) -> dict:
    rec = state.to_record()
    rec["zeros"] = serialize_zeros(state.config)
    return rec


# --------------------------------------------------------------------------
# commands; each returns (body, findings)


def cmd_classify(args, tol):
    config = _zeros(args, tol)
    st = classify_stratum(config, tol)
    return {"zeros": config, "stratum": st.notation, "mu": list(st.mu), "nu": list(st.nu),
            "n": st.n, "m": st.m, "k": st.k, "s": st.s}, []


def cmd_crit(args, tol):
    from .extremal import sendov_S

    config = _zeros(args, tol)
    crit = critical_points(config, tol)
    body = {"zeros": config, **_crit_body(crit)}
    if config.n >= 2:
        body["S"] = sendov_S(config, crit=crit, tol=tol).value
    return body, []


def cmd_rank_sweep(args, tol):
    from .jacobian import rank_sweep

    if args.stratum is None:
        raise ContractError("rank-sweep needs --stratum")
    if args.samples < 0:
        raise ContractError("--samples must be nonnegative")
    stratum = parse_stratum(args.stratum)
    report = rank_sweep(stratum, args.samples, args.seed, tol, threads=args.threads)
    records = []
    findings = []
    for r in report.records:
        rec = {"index": r.index, "seed": r.seed, "margin": r.margin, "full_rank": r.full_rank}
        if r.config is not None:
            rec["zeros"] = r.config
        if r.error is not None:
            rec["error"] = r.error
        records.append(rec)
    for r in report.deficient:
        findings.append(_finding("rank-deficient", r.margin, r.config, f"rank-sweep {stratum.notation}",
                                 index=r.index, seed=r.seed))
    body = {"stratum": stratum.notation, "samples": args.samples, "min_margin": report.min_margin,
            "deficient": len(report.deficient), "failures": len(report.failures), "records": records}
    return body, findings


def _start_state(args, tol):
    from .continuation import ImplicitState

    config = _zeros(args, tol)
    state = ImplicitState.from_config(config, tol)
    return config, state


def cmd_track(args, tol):
    from .continuation import PathSpec, track

    _, state = _start_state(args, tol)
    if not args.waypoint:
        raise ContractError("track needs at least one --waypoint")
    path = PathSpec(tuple(parse_complex_list(w) for w in args.waypoint), max_step=args.max_step)
    findings = []
    try:
        trajectory = track(state, path, tol)
        status = "completed"
    except BoundaryError as exc:
        trajectory = exc.trajectory
        status = "boundary"
        last = exc.last_state
        findings.append(_finding("boundary", last.t if last else 0.0, last.config if last else None,
                                 "track", reason=exc.reason, message=str(exc)))
    body = {"stratum": state.stratum.notation, "status": status,
            "trajectory": [_state_record(s) for s in trajectory]}
    if args.export:
        _export_track(args.export, trajectory)
    return body, findings


def _export_track(path, trajectory):
    with open(path, "w", encoding="utf-8") as fh:
        for s in trajectory:
            cols = [s.t, s.residual]
            for z in list(s.config.locations) + list(s.xi):
                cols += [z.real, z.imag]
            fh.write(" ".join(format(c, ".16e") for c in cols) + "\n")


def _output_spec(text: str):
    kind, _, idx = text.partition(":")
    if kind not in ("xi", "z") or not idx.isdigit():
        raise ContractError(f"--of must look like xi:0 or z:1, got {text!r}")
    return kind, int(idx)


def cmd_scan(args, tol):
    from .continuation import scan_analyticity

    _, state = _start_state(args, tol)
    result = scan_analyticity(state, args.variable, args.radius, args.resolution,
                              output=_output_spec(args.of), tol=tol, threads=args.threads)
    body = {"stratum": state.stratum.notation, "variable": args.variable, "output": args.of,
            "radius": args.radius, "offsets": result.offsets, "values": result.values,
            "cr_residual": result.cr_residual, "max_residual": result.max_residual,
            "invalid": int((~result.valid).sum())}
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            for iy, y in enumerate(result.offsets):
                for ix, x in enumerate(result.offsets):
                    v, r = result.values[iy, ix], result.cr_residual[iy, ix]
                    fh.write(" ".join(format(c, ".16e") for c in (x, y, v.real, v.imag, r)) + "\n")
    return body, []


def _kkt_body(fit) -> dict:
    st, res = fit.state, fit.residual
    return {"i0": st.i0, "xi": st.xi, "lambda": st.lam, "theta_lambda": st.theta_lambda,
            "eta": list(st.eta), "boundary": list(fit.boundary), "residual": res.vector,
            "complex_form": res.complex_form, "dual_gap": res.dual_gap, "rms": fit.rms,
            "consistent": fit.consistent, "i0_on_boundary": res.i0_on_boundary}


def cmd_search(args, tol):
    from .extremal import local_search

    config = _zeros(args, tol)
    result = local_search(config, args.ell, args.steps, args.seed, step=args.step, tol=tol)
    body = {"start": config, "ell": args.ell, "best": result.best, "best_value": result.best_value,
            "initial_value": result.trace[0], "max_S": result.max_S, "accepted": result.accepted,
            "proposals": result.proposals,
            "degeneracies": [{"proposal": p, "step": s, "message": msg} for p, s, msg in result.degeneracies],
            "trace": result.trace,
            "kkt": _kkt_body(result.kkt) if result.kkt is not None else None}
    findings = [_finding(f.kind, f.value, f.config, f.source) for f in result.findings]
    return body, findings


def cmd_sample(args, tol):
    from .extremal import monte_carlo

    if args.n is None:
        raise ContractError("sample needs --n")
    result = monte_carlo(args.n, args.samples, args.seed, eps_report=args.eps_report,
                         threads=args.threads, tol=tol)
    body = {"n": args.n, "samples": args.samples, "max_S": result.max_S, "argmax": result.argmax,
            "screened_max": result.screened_max, "rechecks": result.rechecks,
            "eps_report": args.eps_report}
    findings = [_finding(f.kind, f.value, f.config, f.source) for f in result.findings]
    return body, findings


def cmd_kkt(args, tol):
    from .extremal import fit_multipliers, halfplane_cert

    config = _zeros(args, tol)
    fit = fit_multipliers(config, args.i0, free_i0=args.free_i0, tol=tol)
    body = {"zeros": config, **_kkt_body(fit)}
    certs = []
    for i in range(config.m):
        if i != args.i0 and abs(abs(config.locations[i]) - 1) <= 1e-10:
            c = halfplane_cert(config, i, args.i0, check=False, tol=tol)
            certs.append({"i": i, **asdict(c), "agree": c.agree})
    body["halfplane"] = certs
    return body, []


def cmd_disk(args, tol):
    from .extremal import enclosing_disk

    config = _zeros(args, tol)
    disk = enclosing_disk(config.locations, seed=args.seed)
    return {"center": disk.center, "radius": disk.radius, "support": list(disk.support)}, []


HANDLERS = {
    "classify": cmd_classify,
    "crit": cmd_crit,
    "rank-sweep": cmd_rank_sweep,
    "track": cmd_track,
    "scan": cmd_scan,
    "search": cmd_search,
    "sample": cmd_sample,
    "kkt": cmd_kkt,
    "disk": cmd_disk,
}


# --------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--tau-sep", dest="tau_sep", type=float, default=None,
                   help=f"zero separation tolerance (default {DEFAULT_TOL.tau_sep:g})")
    g.add_argument("--tau-cluster", dest="tau_cluster", type=float, default=None,
                   help=f"root merging tolerance, relative (default {DEFAULT_TOL.tau_cluster:g})")
    g.add_argument("--rank-threshold", dest="rank_threshold", type=float, default=None,
                   help=f"relative SVD rank threshold (default {DEFAULT_TOL.rank_threshold:g})")
    g.add_argument("--output", default=None, help="write the report here instead of stdout")
    g.add_argument("--findings", default=None, help="append findings (JSON lines) to this log")
    g.add_argument("--threads", type=int, default=None, help="worker threads (capped by SENDOVLAB_THREADS)")
    g.add_argument("--config", default=None, help="JSON file with option values; flags override it")
    return p


def _zero_args(p):
    p.add_argument("--zeros", default=None, help="zero record, e.g. 'n=2 m=2; 1 0 1; -1 0 1' or roots_of_unity:5")
    p.add_argument("--input", default=None, help="file holding a zero record")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sendovlab",
        description="Critical points of complex polynomials: classification, Jacobian rank, "
                    "continuation and Sendov-type extremal experiments.",
        epilog="Zero records: header 'n m' then rows 're im mult', separated by newlines or ';'. "
               "Strata: 'n:mu_1,...,mu_m/nu_1,...,nu_k', e.g. 5:1,1,1,1,1/4. "
               "Exit status: 0 ok, 1 contract error, 2 numeric error, 3 finding recorded.",
    )
    parser.add_argument("--version", action="version", version=f"sendovlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    common = _common()

    p = sub.add_parser("classify", parents=[common], help="stratum of a configuration")
    _zero_args(p)
    p = sub.add_parser("crit", parents=[common], help="critical points by kind")
    _zero_args(p)

    p = sub.add_parser("rank-sweep", parents=[common], help="certify the Jacobian rank over a stratum")
    p.add_argument("--stratum", default=None, help="stratum notation n:mu/nu")
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("track", parents=[common], help="follow critical points along a path of the free zeros")
    _zero_args(p)
    p.add_argument("--waypoint", action="append", default=None,
                   help="free-zero targets as comma-separated complex numbers (repeatable; write --waypoint=-0.5+1j,... when the first value is negative)")
    p.add_argument("--max-step", dest="max_step", type=float, default=0.05)
    p.add_argument("--export", default=None, help="write plot columns (t, residual, re/im of all points)")

    p = sub.add_parser("scan", parents=[common], help="Cauchy–Riemann scan of a tracked output")
    _zero_args(p)
    p.add_argument("--variable", type=int, default=0, help="index among the free zeros")
    p.add_argument("--radius", type=float, default=1e-2)
    p.add_argument("--resolution", type=int, default=11)
    p.add_argument("--of", default="xi:0", help="tracked output, xi:<j> or z:<i>")
    p.add_argument("--export", default=None, help="write plot columns (x, y, re, im, residual)")

    p = sub.add_parser("search", parents=[common], help="projected random ascent on S_ell")
    _zero_args(p)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--step", type=float, default=1e-2)

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo maximum of S over the unit disk")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--eps-report", dest="eps_report", type=float, default=1e-3)

    p = sub.add_parser("kkt", parents=[common], help="fit Kuhn–Tucker multipliers at a k = 1 configuration")
    _zero_args(p)
    p.add_argument("--i0", type=int, default=0)
    p.add_argument("--free-i0", dest="free_i0", action="store_true",
                   help="let eta_i0 be positive when z_i0 is on the unit circle")

    p = sub.add_parser("disk", parents=[common], help="smallest enclosing disk of the zero locations")
    _zero_args(p)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> list:
    """Merge a ``--config`` JSON file into the parser defaults; return argv with the command."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return argv
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config file: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(cfg, dict):
        raise ParseError("config file must hold a JSON object", 1, 1)
    cfg = dict(cfg)
    command = cfg.pop("command", None)
    given = next((a for a in argv if a in COMMANDS), None)
    if command is not None and command not in COMMANDS:
        raise ContractError(f"unknown command {command!r} in config")
    if given is None:
        if command is None:
            raise ContractError("config has no command and none was given")
        argv = [command] + list(argv)
    elif command is not None and command != given:
        raise ContractError(f"config is for {command!r} but {given!r} was requested")
    name = given or command
    subparser = parser._subparsers._group_actions[0].choices[name]
    dests = {a.dest for a in subparser._actions if a.dest != "help"}
    tolerances = cfg.pop("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ContractError("'tolerances' must be an object")
    for key in tolerances:
        if key not in TOLERANCE_KEYS:
            raise ContractError(f"unknown tolerance {key!r}")
    values = dict(tolerances)
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in dests or dest == "config":
            raise ContractError(f"unknown config key {key!r} for command {name!r}")
        values[dest] = value
    subparser.set_defaults(**values)
    return argv


def _header(args, tol: Tolerances) -> dict:
    return {"tool": "sendovlab", "version": __version__, "command": args.command, "seed": args.seed,
            "tolerances": {"tau_sep": tol.tau_sep, "tau_cluster": tol.tau_cluster,
                           "rank_threshold": tol.rank_threshold}}


def run(argv: list | None = None, stdout=None) -> tuple:
    """Parse ``argv``, execute, write the report; return ``(exit_code, report)``."""
    stdout = sys.stdout if stdout is None else stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    report = None
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(stdout)
            return EXIT_CONTRACT, None
        tol = _tolerances(args)
        body, findings = HANDLERS[args.command](args, tol)
        report = {"header": _header(args, tol), "body": body, "findings": findings}
        text = dumps(report)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        if findings and args.findings:
            with open(args.findings, "a", encoding="utf-8") as fh:
                for f in findings:
                    fh.write(dumps({"command": args.command, "seed": args.seed, **f}, indent=0).replace("\n", "") + "\n")
        return (EXIT_FINDING if findings else EXIT_OK), report
    except ContractError as exc:
        print(f"sendovlab: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT, report
    except NumericError as exc:
        print(f"sendovlab: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC, report
    except OSError as exc:
        print(f"sendovlab: error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT, report


def main(argv: list | None = None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as exc:  # argparse usage errors
        code = EXIT_CONTRACT if exc.code not in (0, None) else 0
    return code


if __name__ == "__main__":
    sys.exit(main())
