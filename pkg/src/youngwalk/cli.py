"""Command-line front end.

Subcommands: ``sample`` (initial diagrams), ``simulate`` (trajectory
ensembles), ``limit-shape`` (predicted flow curves plus a gnuplot script),
``kernels`` (decay-kernel tables), ``verify`` (the small-n exact-check
suite).  Every subcommand requires ``--seed`` -- there is no wall-clock
default, so identical invocations give identical bytes -- and every output
file embeds the tool version, a sha256 of the effective configuration, and
the seed.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .characters import moments_from_cumulants
from .diagrams import write_partitions
from .experiments import (
    PROFILE_GRID,
    ExperimentSpec,
    propagation_check,
    profiles_csv,
    run_ensemble,
    stats_csv,
    stats_json,
)
from .freeprob import markov_inverse, omega_t_cumulants
from .kernels import KernelQuery, f_value, g_alpha
from .resind import eigen_identity_residual, full_matrix, plancherel_vector
from .sampling import (
    Exponential,
    OneSidedStable,
    law_tag,
    parse_law,
    plancherel_growth,
    rectangle_initializer,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _metadata_lines(config_text: str, seed: int) -> list[str]:
    digest = hashlib.sha256(config_text.encode()).hexdigest()
    return [
        f"# version={__version__}",
        f"# config_sha256={digest}",
        f"# master_seed={seed}",
    ]


def _arg_config_text(command: str, pairs: list[tuple[str, object]]) -> str:
    """Canonical flat text for subcommands driven by flags, not a spec file."""
    lines = [f"command = {command}"]
    lines += [f"{k} = {v}" for k, v in sorted(pairs)]
    return "".join(line + "\n" for line in lines)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_spec(path: str, seed: int) -> ExperimentSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read spec file {path!r}: {exc}") from exc
    keys = {
        line.split("#", 1)[0].partition("=")[0].strip()
        for line in text.splitlines()
    }
    if "master_seed" not in keys:
        text += f"master_seed = {seed}\n"
    spec = ExperimentSpec.from_config(text)
    # the command line owns the seed: a seed inside the file is overridden
    return dataclasses.replace(spec, master_seed=seed)


def _flow_cumulants(spec: ExperimentSpec, ref, t: float) -> list[float]:
    """Predicted scaled cumulants at macroscopic time t under ``spec``'s clock."""
    ref = [float(v) for v in ref]
    if spec.scaling == "diffusive":
        mean = spec.law.mean if isinstance(spec.law, Exponential) else 1.0
        return [float(v) for v in omega_t_cumulants(ref, t, m=mean)]
    alpha = spec.law.alpha
    if spec.regime == "sub":
        return ref
    if spec.regime == "super":
        out = [0.0] * len(ref)
        if len(ref) > 2:
            out[2] = 1.0
        return out
    return [
        v if j < 3 else v * g_alpha(t * (j - 1) ** (1.0 / alpha), alpha)
        for j, v in enumerate(ref)
    ]


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    if args.n < 1:
        raise ValueError("--n must be a positive integer")
    if args.count < 0:
        raise ValueError("--count must be nonnegative")
    config = _arg_config_text(
        "sample",
        [
            ("n", args.n),
            ("count", args.count),
            ("initializer", args.initializer),
            ("aspect", repr(args.aspect)),
        ],
    )
    if args.initializer == "rectangle":
        diagrams = [rectangle_initializer(args.n, args.aspect)] * args.count
    else:
        diagrams = []
        for idx in range(args.count):
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence((args.seed, args.n, idx)))
            )
            diagrams.append(plancherel_growth(args.n, rng))
    body = write_partitions(diagrams) if diagrams else ""
    text = "\n".join(_metadata_lines(config, args.seed)) + "\n" + body
    _write_text(Path(args.out), text)
    print(f"wrote {args.count} diagram(s) of size {args.n} to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec, args.seed)
    stats = run_ensemble(spec, workers=args.workers)
    out = Path(args.out)
    if args.format == "json":
        _write_text(out / "stats.json", stats_json(stats))
        written = ["stats.json"]
    else:
        _write_text(out / "stats.csv", stats_csv(stats))
        _write_text(out / "profiles.csv", profiles_csv(stats))
        written = ["stats.csv", "profiles.csv"]
    ntraj = spec.trajectories * len(spec.n_grid)
    print(
        f"simulated {ntraj} trajectories ({law_tag(spec.law)}, "
        f"{spec.scaling} clock); wrote {', '.join(written)} in {out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# limit-shape
# ---------------------------------------------------------------------------


def _plot_script(csv_name: str, curves: list[tuple[int, float]], meta: list[str]) -> str:
    lines = list(meta)
    lines += [
        f"# gnuplot script for {csv_name} (header line is row 0)",
        "set datafile separator ','",
        "set xlabel 'x'",
        "set ylabel 'omega'",
        "set key outside",
    ]
    npts = PROFILE_GRID[2]
    plots = []
    for i, (n, t) in enumerate(curves):
        start = 1 + i * npts
        end = start + npts - 1
        plots.append(
            f"  '{csv_name}' every ::{start}::{end} using 3:4 "
            f"with lines title 'n={n} t={t:g}'"
        )
    lines.append("plot \\")
    lines.append(", \\\n".join(plots))
    return "\n".join(lines) + "\n"


def cmd_limit_shape(args) -> int:
    spec = _load_spec(args.spec, args.seed)
    meta = _metadata_lines(spec.config_text(), spec.master_seed)
    grid_x = np.linspace(*PROFILE_GRID)
    curves = []
    rows = []
    for n in spec.n_grid:
        ref = spec.reference_cumulants(n, args.order)
        for t in spec.time_points:
            flowed = _flow_cumulants(spec, ref, t)
            shape = markov_inverse(moments_from_cumulants(flowed), eps=args.eps)
            omega = shape(grid_x)
            curves.append((n, t))
            rows.extend(
                (n, t, float(x), float(w)) for x, w in zip(grid_x, omega)
            )
    out = Path(args.out)
    if args.format == "json":
        payload = {
            "version": __version__,
            "config_sha256": hashlib.sha256(spec.config_text().encode()).hexdigest(),
            "master_seed": spec.master_seed,
            "grid": list(PROFILE_GRID),
            "curves": [
                {
                    "n": n,
                    "t": t,
                    "omega": [w for (rn, rt, _, w) in rows if (rn, rt) == (n, t)],
                }
                for n, t in curves
            ],
        }
        _write_text(out / "limit_shape.json", json.dumps(payload, sort_keys=True, indent=1) + "\n")
        written = ["limit_shape.json"]
    else:
        lines = meta + ["n,t,x,omega"]
        lines += [f"{n},{t!r},{x!r},{w!r}" for n, t, x, w in rows]
        _write_text(out / "limit_shape.csv", "\n".join(lines) + "\n")
        _write_text(out / "limit_shape.gp", _plot_script("limit_shape.csv", curves, meta))
        written = ["limit_shape.csv", "limit_shape.gp"]
    print(f"wrote {len(curves)} limit-shape curve(s): {', '.join(written)} in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _parse_floats(text: str) -> list[float]:
    vals = [float(p) for p in text.replace(",", " ").split() if p]
    if not vals:
        raise ValueError("empty list")
    return vals


def _parse_ints(text: str) -> list[int]:
    vals = [int(p) for p in text.replace(",", " ").split() if p]
    if not vals:
        raise ValueError("empty list")
    return vals


def cmd_kernels(args) -> int:
    law = parse_law(args.law, mean=args.mean, alpha=args.alpha)
    ks = _parse_ints(args.k)
    ss = _parse_floats(args.s)
    if args.n < 1:
        raise ValueError("--n must be a positive integer")
    config = _arg_config_text(
        "kernels",
        [
            ("law", law_tag(law)),
            ("n", args.n),
            ("k", ",".join(str(k) for k in ks)),
            ("s", ",".join(repr(s) for s in ss)),
        ],
    )
    table = [
        (k, args.n, s, f_value(KernelQuery(k=k, n=args.n, s=s, law=law)))
        for k in ks
        for s in ss
    ]
    out = Path(args.out)
    if args.format == "json":
        payload = {
            "version": __version__,
            "config_sha256": hashlib.sha256(config.encode()).hexdigest(),
            "master_seed": args.seed,
            "law": law_tag(law),
            "rows": [
                {"k": k, "n": n, "s": s, "f": f} for k, n, s, f in table
            ],
        }
        _write_text(out, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        lines = _metadata_lines(config, args.seed) + ["k,n,s,f"]
        lines += [f"{k},{n},{s!r},{f!r}" for k, n, s, f in table]
        _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote kernel table ({len(table)} rows) to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_checks(level: str):
    """Yield (name, residual, tolerance) for the exact small-n suite."""
    n_top = 6 if level == "fast" else 8

    for n in range(2, n_top + 1):
        states, P = full_matrix(n)
        yield (
            f"row-stochasticity n={n}",
            float(np.max(np.abs(P.sum(axis=1) - 1.0))),
            1e-12,
        )
        pl = plancherel_vector(n)
        yield (
            f"plancherel-invariance n={n}",
            float(np.max(np.abs(pl @ P - pl))),
            1e-12,
        )
        yield (
            f"detailed-balance n={n}",
            float(np.max(np.abs(pl[:, None] * P - (pl[:, None] * P).T))),
            1e-12,
        )

    for rho in [(2,), (3,), (2, 2), (4,)]:
        yield (
            f"eigen-identity rho={rho}",
            eigen_identity_residual(rho, 6),
            1e-10,
        )

    rhos = [(2,), (3,)] if level == "fast" else [(2,), (3,), (2, 2)]
    for rho in rhos:
        for s in (0.5, 1.0, 2.0):
            yield (
                f"propagation n=6 rho={rho} s={s}",
                propagation_check(6, rho, Exponential(1.0), s),
                1e-10,
            )


def cmd_verify(args) -> int:
    config = _arg_config_text("verify", [("level", args.level)])
    results = []
    for name, residual, tol in _verify_checks(args.level):
        ok = residual <= tol
        results.append({"check": name, "residual": residual, "tol": tol, "ok": ok})
        print(f"{'PASS' if ok else 'FAIL'} {name}: residual={residual:.3e} tol={tol:g}")
    failed = [r for r in results if not r["ok"]]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if args.out:
        payload = {
            "version": __version__,
            "config_sha256": hashlib.sha256(config.encode()).hexdigest(),
            "master_seed": args.seed,
            "level": args.level,
            "passed": len(results) - len(failed),
            "failed": len(failed),
            "results": results,
        }
        _write_text(Path(args.out), json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return EXIT_OK if not failed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="youngwalk",
        description="Restriction-induction walks on Young diagrams: "
        "sampling, ensembles, limit shapes, decay kernels, verification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, out_required=True):
        p.add_argument(
            "--seed",
            type=int,
            required=True,
            help="master seed (mandatory; no wall-clock default)",
        )
        if out_required:
            p.add_argument("--out", required=True, help="output file or directory")
        p.add_argument(
            "--format",
            choices=("csv", "json"),
            default="csv",
            help="output format (default csv)",
        )

    p = sub.add_parser("sample", help="draw initial diagrams to a partition file")
    p.add_argument("--n", type=int, required=True, help="number of boxes")
    p.add_argument("--count", type=int, required=True, help="number of diagrams")
    p.add_argument(
        "--initializer",
        choices=("plancherel", "rectangle"),
        default="plancherel",
    )
    p.add_argument("--aspect", type=float, default=1.0)
    add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="run a trajectory ensemble from a spec file")
    p.add_argument("--spec", required=True, help="flat key = value spec file")
    p.add_argument("--workers", type=int, default=1)
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "limit-shape", help="emit predicted flow curves and a plot script"
    )
    p.add_argument("--spec", required=True, help="flat key = value spec file")
    p.add_argument("--order", type=int, default=16, help="cumulant order of the curves")
    p.add_argument("--eps", type=float, default=1e-3, help="inversion smoothing")
    add_common(p)
    p.set_defaults(func=cmd_limit_shape)

    p = sub.add_parser("kernels", help="tabulate the cycle decay kernel f(k, n, s)")
    p.add_argument("--law", required=True, help="exponential | stable | unit")
    p.add_argument("--mean", type=float, default=1.0, help="mean pause (exponential)")
    p.add_argument("--alpha", type=float, default=None, help="stable index")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", required=True, help="comma-separated cycle sizes")
    p.add_argument("--s", required=True, help="comma-separated chain times")
    add_common(p)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("verify", help="run the exact small-n check suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--out", help="optional JSON report path")
    p.add_argument(
        "--seed",
        type=int,
        required=True,
        help="master seed (mandatory; embedded in the report)",
    )
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for bad flags
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
