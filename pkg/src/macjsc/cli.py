"""Command line entry point: ``macjsc <subcommand> [options]``.

Exit codes: 0 success or feasible, 2 infeasible, 1 runtime error, 64 usage
error. JSON output keeps full precision; text output rounds to 6
significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import asdict

import numpy as np

from . import __version__
from .exceptions import MacjscError
from .pmf import JointPmf

# the bundled TBB is too old for numba; the default layer is used instead
warnings.filterwarnings("ignore", message="The TBB threading layer")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 64

PRESETS = {
    "full-side-info": "W = U over the binary adder MAC, decoder sees Z1, Z2 and V (feasible)",
    "cover80": "W = X = U over the binary adder MAC, no side information (infeasible)",
    "random-input": "W = U, inputs uniform on 4 symbols over a noiseless pair channel (feasible)",
    "independent": "independent uniform bits over the random-input channel (feasible, large margin)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _preset(name: str):
    from .instances import binary_pair, lossless_adder_system, lossless_random_input_system
    from .pmf import make_joint

    if name == "full-side-info":
        return lossless_adder_system(("Z1", "Z2", "V"))
    if name == "cover80":
        return lossless_adder_system((), False, source=binary_pair())
    if name == "random-input":
        return lossless_random_input_system()
    if name == "independent":
        return lossless_random_input_system(make_joint([("U1", 2), ("U2", 2)], np.full((2, 2), 0.25)))
    raise MacjscError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def _load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _system(args):
    from .region import SystemSpec

    if args.spec:
        d = _load(args.spec)
        if "preset" in d:
            return _preset(d["preset"])
        return SystemSpec.from_dict(d.get("system", d))
    if args.preset:
        return _preset(args.preset)
    raise MacjscError("need --spec or --preset")


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _emit(args, payload: dict, text: str | None = None, rows: list[dict] | None = None) -> None:
    fmt = args.format or ("text" if args.command == "paper" else "json")
    if fmt == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if not rows:
            raise MacjscError("this subcommand has no tabular output; use --format json or text")
        buf = io.StringIO()
        fields = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        out = buf.getvalue()
    else:
        if text is None:
            text = "\n".join(f"{k}: {_fmt(v)}" for k, v in payload.items())
        out = text.rstrip("\n") + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# -- subcommands ----------------------------------------------------------------------


def cmd_info(args) -> int:
    import numba

    payload = {
        "version": __version__,
        "threads": numba.get_num_threads(),
        "presets": PRESETS,
        "subcommands": ["info", "region", "multi", "gmac", "fit", "mc", "sim", "paper"],
    }
    lines = [f"macjsc {__version__}", f"threads: {payload['threads']}", "presets:"]
    lines += [f"  {k}: {v}" for k, v in PRESETS.items()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_region(args) -> int:
    from .region import check_orthogonal, check_theorem1

    spec = _system(args)
    rep = check_orthogonal(spec) if args.orthogonal else check_theorem1(spec)
    rows = [{"label": r.label, "lhs": r.lhs, "rhs": r.rhs, "margin": r.margin, "status": r.status} for r in rep.rows]
    _emit(args, rep.to_dict(), rep.to_text(), rows)
    return EXIT_OK if rep.verdict else EXIT_INFEASIBLE


def cmd_multi(args) -> int:
    from .region import MultiSpec, check_multiuser

    if args.spec:
        d = _load(args.spec)
        spec = _preset(d["preset"]).as_multi() if "preset" in d else MultiSpec.from_dict(d)
    elif args.preset:
        spec = _preset(args.preset).as_multi()
    else:
        raise MacjscError("need --spec or --preset")
    rep = check_multiuser(spec)
    rows = [{"label": r.label, "lhs": r.lhs, "rhs": r.rhs, "margin": r.margin, "status": r.status} for r in rep.rows]
    _emit(args, rep.to_dict(), rep.to_text(), rows)
    return EXIT_OK if rep.verdict else EXIT_INFEASIBLE


def cmd_gmac(args) -> int:
    from .gmac import GmacParams, gmac_outer_bounds, rho_feasibility_interval, sweep_rho
    from .pmf import entropy, mutual_info

    d = _load(args.spec) if args.spec else {}
    p = GmacParams(d.get("P1", args.P1), d.get("P2", args.P2), d.get("sigmaN2", args.noise), d.get("rho", args.rho))
    if args.sweep:
        lo, hi, num = args.sweep
        rows = sweep_rho(p, np.linspace(float(lo), float(hi), int(num)))
        text = "\n".join(
            f"rho={r['rho']:.6g}  I1={r['I1']:.6g}  I2={r['I2']:.6g}  Isum={r['Isum']:.6g}" for r in rows
        )
        _emit(args, {"params": asdict(p), "sweep": rows}, text, rows)
        return EXIT_OK
    i1, i2, isum = gmac_outer_bounds(p)
    payload = {"P1": p.P1, "P2": p.P2, "sigmaN2": p.sigmaN2, "rho": p.rho, "I1": i1, "I2": i2, "Isum": isum}
    if "source" in d:
        src = JointPmf.from_dict(d["source"])
        a, b = src.names[:2]
        iv = rho_feasibility_interval(
            p, entropy(src, a, b), entropy(src, b, a), entropy(src, (a, b)), mutual_info(src, a, b)
        )
        payload["interval"] = iv.to_dict()
    rows = [{k: v for k, v in payload.items() if k != "interval"}]
    _emit(args, payload, None, rows)
    return EXIT_OK


def cmd_fit(args) -> int:
    from .instances import asymmetric_pair
    from .mixture import fit_mixture

    src = JointPmf.from_dict(_load(args.spec)) if args.spec else asymmetric_pair()
    res = fit_mixture(
        src, args.rho, counts=tuple(args.components), n_starts=args.starts, seed=args.seed, maxfev=args.maxfev
    )
    payload = res.to_dict()
    payload["source"] = src.to_dict()
    text = (
        f"rho target: {res.rho_target:.6g}\n"
        f"normalized distortion: {res.normalized_distortion:.6g}\n"
        f"induced rho: {res.induced_rho:.6g}\n"
        f"max constraint residual: {float(np.abs(res.constraint_residuals).max()):.6g}\n"
        f"best start: {res.best_start} of {len(res.start_objectives)}"
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_mc(args) -> int:
    from .mc import TARGETS, GaussianInputs, McConfig, estimate_mi
    from .mixture import FitResult

    cfg = McConfig(n=args.n, seed=args.seed, sigmaN2=args.noise, powers=tuple(args.powers))
    if args.gaussian is not None:
        spec, src = GaussianInputs(args.powers[0], args.powers[1], args.gaussian), None
    elif args.spec:
        d = _load(args.spec)
        spec = FitResult.from_dict(d).spec
        if "source" not in d:
            raise MacjscError("fit file carries no source pmf")
        src = JointPmf.from_dict(d["source"])
    else:
        raise MacjscError("need --spec <fit.json> or --gaussian <rho>")
    targets = list(TARGETS) if args.target == "all" else [args.target]
    if src is None:
        targets = [t for t in targets if t in ("I1", "I2", "Isum")]
    out = {}
    for t in targets:
        e = estimate_mi(spec, src, t, cfg)
        out[t] = {"quantity": TARGETS[t], **e.to_dict()}
    rows = [{"target": t, **v} for t, v in out.items()]
    text = "\n".join(f"{v['quantity']:<16} {v['value']:.6g} +/- {v['stderr']:.2g}" for v in out.values())
    _emit(args, {"n": args.n, "seed": args.seed, "estimates": out}, text, rows)
    return EXIT_OK


def cmd_sim(args) -> int:
    from .coding import CodebookConfig, run_experiment

    d = _load(args.spec) if args.spec else {}
    spec = _system(args)
    ns = args.blocklengths or d.get("n", [4, 8, 12])
    kw = {k: d[k] for k in ("delta", "eps", "rates", "distinct_w") if k in d}
    results = []
    for n in ns:
        cfg = CodebookConfig(spec, int(n), trials=args.trials, seed=args.seed, **kw)
        results.append(run_experiment(cfg).to_dict())
    rows = [
        {"n": r["n"], "trials": r["trials"], "error_rate": r["error_rate"], **{f"rate_{k}": v for k, v in r["event_rates"].items()}}
        for r in results
    ]
    text = "\n".join(
        f"n={r['n']:<3} error={r['error_rate']:.6g} (+/- {r['error_halfwidth']:.2g})  "
        + " ".join(f"{k}={v:.3g}" for k, v in r["event_rates"].items())
        for r in results
    )
    _emit(args, {"seed": args.seed, "results": results}, text, rows)
    return EXIT_OK


def cmd_paper(args) -> int:
    from .reproduce import paper_report

    rep = paper_report(quick=args.quick)
    rows = [c.to_dict() for c in rep.claims]
    _emit(args, rep.to_dict(), rep.to_text(), rows)
    return EXIT_OK if rep.all_pass else EXIT_ERROR


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="input JSON file")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), help="default json, text for paper")

    p = _Parser(prog="macjsc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"macjsc {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("info", parents=[common], help="version, thread count and presets")

    for name, helptext in (("region", "two-user region check"), ("multi", "M-user region check")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--preset", choices=sorted(PRESETS))
        if name == "region":
            s.add_argument("--orthogonal", action="store_true", help="orthogonal-MAC check")

    g = sub.add_parser("gmac", parents=[common], help="Gaussian MAC bounds and correlation interval")
    g.add_argument("--P1", type=float, default=3.0)
    g.add_argument("--P2", type=float, default=4.0)
    g.add_argument("--noise", type=float, default=1.0)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--sweep", nargs=3, metavar=("LO", "HI", "NUM"), help="sweep rho over a grid")

    f = sub.add_parser("fit", parents=[common], help="fit Gaussian mixture codeword maps")
    f.add_argument("--rho", type=float, default=0.3)
    f.add_argument("--components", type=int, nargs="+", default=[2])
    f.add_argument("--starts", type=int, default=16)
    f.add_argument("--maxfev", type=int, default=20000)

    m = sub.add_parser("mc", parents=[common], help="Monte Carlo mutual information")
    m.add_argument("--target", default="all", choices=("all", "I1", "I2", "Isum", "I1c", "I2c"))
    m.add_argument("--n", type=int, default=1_000_000)
    m.add_argument("--powers", type=float, nargs=2, default=[3.0, 4.0])
    m.add_argument("--noise", type=float, default=1.0)
    m.add_argument("--gaussian", type=float, metavar="RHO", help="use correlated Gaussian inputs instead of a fit")

    s = sub.add_parser("sim", parents=[common], help="random-coding simulation")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--n", dest="blocklengths", type=int, nargs="+", help="block lengths")

    r = sub.add_parser("paper", parents=[common], help="recompute every published number")
    r.add_argument("--quick", action="store_true", help="fewer samples and starts")
    return p


COMMANDS = {
    "info": cmd_info,
    "region": cmd_region,
    "multi": cmd_multi,
    "gmac": cmd_gmac,
    "fit": cmd_fit,
    "mc": cmd_mc,
    "sim": cmd_sim,
    "paper": cmd_paper,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("MACJSC_THREADS")
    if threads:
        import numba

        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    try:
        return COMMANDS[args.command](args)
    except (MacjscError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"macjsc: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
