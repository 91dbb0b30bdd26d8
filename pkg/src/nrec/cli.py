"""Command-line frontend: build, simulate, census, verify, sweep.

Exit codes: 0 success/PASS, 1 verification FAIL, 2 usage or parameter error,
3 resource guard.  All outputs are JSON (structured reports) or CSV
(histograms); every integer is written as an exact decimal and every report
embeds a manifest describing the run.
"""

import argparse
import json
import sys

from . import __version__
from .census import (
    bifurcation_sweep,
    classic_check,
    composition_suite,
    full_census,
    sampled_census,
    seeded_window,
    verify_attainment,
    verify_period_support,
)
from .chains import common_spike_suite
from .construct import (
    build_coef1,
    build_coef3,
    build_z,
    canonical_initial,
    derive_params,
    interleave,
)
from .core import StateWindow, detect_cycle
from .errors import NrecError
from .io import canonical_json, equation_digest, equation_from_dict, equation_to_dict


def _manifest(command, params, digests=None):
    return {
        "command": command,
        "parameters": params,
        "version": __version__,
        "input_digests": digests or {},
    }


def _write_json(path, doc):
    text = json.dumps(doc, sort_keys=True, indent=2)
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as f:
            f.write(text + "\n")


def _write_histogram_csv(path, chi):
    with open(path, "w") as f:
        f.write("period,count\n")
        for p in sorted(chi):
            f.write("%d,%d\n" % (p, chi[p]))


def _load_equation(path):
    with open(path) as f:
        doc = json.load(f)
    eq = equation_from_dict(doc)
    return eq, equation_digest(eq)


def _build_equation(args):
    family = args.family.upper()
    params = derive_params(args.m, args.theta)
    if family == "COEF1":
        return build_coef1(params), params
    if family == "COEF2":
        slots = args.slots if args.slots is not None else params.s
        return interleave(build_coef1(params), slots), params
    if family == "COEF3":
        return build_coef3(params), params
    if family == "Z":
        if args.d is None:
            raise NrecError("family Z requires --d")
        return build_z(params, args.d), params
    raise NrecError("unknown family %r" % args.family)


def cmd_build(args):
    eq, params = _build_equation(args)
    doc = equation_to_dict(eq)
    doc["digest"] = equation_digest(eq)
    doc["provenance"] = _manifest(
        "build",
        {"m": args.m, "theta": params.theta, "family": args.family.upper(),
         "d": args.d, "slots": args.slots},
    )
    _write_json(args.out, doc)
    return 0


def _resolve_init(spec, eq, args):
    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    if kind == "zero":
        return StateWindow(eq.memory_k, 0)
    if kind == "hex":
        return StateWindow(eq.memory_k, int(rest, 16))
    if kind == "seed":
        return seeded_window(eq.memory_k, int(rest), 0)
    if kind == "canonical":
        if args.m is None:
            raise NrecError("canonical init requires --m (and optionally --theta)")
        params = derive_params(args.m, args.theta)
        return canonical_initial(params, int(rest))
    raise NrecError("unknown init spec %r" % spec)


def _rle(bits):
    runs = []
    for b in bits:
        if runs and runs[-1][0] == b:
            runs[-1][1] += 1
        else:
            runs.append([b, 1])
    return runs


def cmd_simulate(args):
    eq, digest = _load_equation(args.equation)
    init = _resolve_init(args.init, eq, args)
    summary = detect_cycle(eq, init, args.max_steps)
    doc = {
        "manifest": _manifest(
            "simulate",
            {"init": args.init, "steps": args.steps, "max_steps": args.max_steps},
            {"equation": digest},
        ),
        "init_hex": "%0*x" % ((eq.memory_k + 3) // 4, init.value),
        "transient": summary.transient,
        "period": summary.period,
        "attractor_key": summary.attractor_key,
        "attractor_bits": "".join(map(str, summary.attractor_bits)),
    }
    if args.steps:
        from .core import simulate

        doc["trajectory_rle"] = _rle(simulate(eq, init, args.steps))
    _write_json(args.out, doc)
    return 0


def cmd_census(args):
    eq, digest = _load_equation(args.equation)
    if args.mode == "exact":
        census = full_census(eq, partitions=args.workers,
                             checkpoint_path=args.checkpoint)
    else:
        if args.samples is None:
            raise NrecError("sampled mode requires --samples")
        census = sampled_census(eq, args.samples, args.seed, args.max_steps)
    doc = {
        # worker count is an execution detail: results are partition-invariant
        "manifest": _manifest(
            "census",
            {"mode": args.mode, "samples": args.samples, "seed": args.seed},
            {"equation": digest},
        ),
        "memory_k": census.memory_k,
        "total": census.total,
        "chi": {str(p): c for p, c in sorted(census.chi.items())},
        "witnesses_hex": {
            str(p): "%0*x" % ((eq.memory_k + 3) // 4, w)
            for p, w in sorted(census.witnesses.items())
        },
    }
    if census.transients is not None:
        doc["transient_histogram"] = {
            str(t): c for t, c in sorted(census.transients.items())
        }
    if args.out:
        _write_json(args.out + ".json", doc)
        _write_histogram_csv(args.out + ".csv", census.chi)
    else:
        _write_json(None, doc)
    return 0


def _run_suite(args):
    suite = args.suite.lower()
    if suite == "support":
        params = derive_params(args.m, args.theta)
        census = full_census(build_coef1(params))
        report = verify_period_support(census, {1, *params.primes})
        report["chi"] = {str(p): c for p, c in sorted(census.chi.items())}
        return report
    if suite == "containment":
        params = derive_params(args.m, args.theta)
        eq = interleave(build_coef1(params), params.s)
        census = sampled_census(eq, args.samples, args.seed, args.max_steps)
        from .construct import admissible_periods

        support = verify_period_support(census, admissible_periods(params, params.primes))
        attain = verify_attainment(params, None, args.max_steps)
        return {"pass": support["pass"] and attain["pass"],
                "containment": support, "attainment": attain}
    if suite == "halving":
        params = derive_params(args.m, args.theta)
        sweep = bifurcation_sweep(params, args.samples, args.seed, args.max_steps)
        return {"pass": sweep.ok, "nested": sweep.nested,
                "final_fixed_point": sweep.final_fixed_point, "rows": sweep.rows}
    if suite == "composition":
        params = derive_params(args.m, args.theta)
        report = composition_suite(params, args.cases, args.seed,
                                   max_steps=args.max_steps)
        report["cases"] = len(report.pop("cases"))
        return report
    if suite == "spike":
        return common_spike_suite(args.trials, args.seed)
    if suite == "classic":
        if args.kind is None:
            raise NrecError("classic suite requires --kind")
        return classic_check(args.kind, args.k, args.trials, args.seed,
                             b=args.b, j=args.j)
    raise NrecError("unknown suite %r" % args.suite)


def cmd_verify(args):
    report = _run_suite(args)
    doc = {
        "manifest": _manifest(
            "verify",
            {"suite": args.suite, "m": args.m, "theta": args.theta,
             "samples": args.samples, "seed": args.seed, "trials": args.trials,
             "cases": args.cases, "kind": args.kind, "k": args.k,
             "b": args.b, "j": args.j},
        ),
        "verdict": "PASS" if report["pass"] else "FAIL",
        "report": report,
    }
    _write_json(args.out, doc)
    return 0 if report["pass"] else 1


def cmd_sweep(args):
    params = derive_params(args.m, args.theta)
    sweep = bifurcation_sweep(params, args.samples, args.seed, args.max_steps)
    doc = {
        "manifest": _manifest(
            "sweep",
            {"m": args.m, "theta": params.theta, "samples": args.samples,
             "seed": args.seed},
        ),
        "verdict": "PASS" if sweep.ok else "FAIL",
        "nested": sweep.nested,
        "final_fixed_point": sweep.final_fixed_point,
        "rows": sweep.rows,
    }
    if args.out:
        _write_json(args.out + ".json", doc)
        with open(args.out + ".csv", "w") as f:
            f.write("d,predicted,observed,attained,containment,attainment\n")
            for r in sweep.rows:
                f.write("%d,%s,%s,%s,%s,%s\n" % (
                    r["d"],
                    ";".join(map(str, r["predicted"])),
                    ";".join(map(str, r["observed"])),
                    ";".join(map(str, r["attained"])),
                    int(r["containment"]), int(r["attainment"]),
                ))
    else:
        _write_json(None, doc)
    return 0 if sweep.ok else 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="nrec",
        description="Neuronal recurrence equations: construction, simulation, "
                    "chain analysis, basin censuses, and bifurcation sweeps.",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="construct an equation and write it as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--family", default="COEF1",
                   choices=["COEF1", "COEF2", "COEF3", "Z", "coef1", "coef2", "coef3", "z"])
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--slots", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="run a trajectory and report (T, p)")
    p.add_argument("equation")
    p.add_argument("--init", required=True,
                   help="zero | hex:HEX | canonical:I | seed:N")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10**7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("census", help="exact or sampled basin census")
    p.add_argument("equation")
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", default="0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--max-steps", type=int, default=10**7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True,
                   choices=["support", "containment", "halving", "composition",
                            "spike", "classic"])
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", default="0")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--kind", default=None,
                   choices=["palindromic", "j_palindromic", "geometric_neg", "geometric_pos"])
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--b", default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=10**7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="period-halving bifurcation sweep over d")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=int, default=None)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", default="0")
    p.add_argument("--max-steps", type=int, default=10**7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except NrecError as exc:
        sys.stderr.write("%s: %s\n" % (type(exc).__name__, exc))
        return exc.exit_code
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
