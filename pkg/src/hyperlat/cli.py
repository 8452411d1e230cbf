"""Command-line front end: reproducible runs, flat-file output, static plots.

Commands: sample | variance | spectrum | mixing | regress | plot.
Exit codes: 0 success, 1 numeric failure, 2 usage or domain error.
Every command is a pure function of (flags, input files): identical flags
and seed reproduce every data file byte for byte, regardless of --threads.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericError, UsageError
from .fgn import HurstIndex
from .pointproc import STATIONARIZED, depalmize, perturb_palm_lattice
from .spectrum import (
    empirical_structure_factor,
    is_on_dual_grid,
    structure_factor_curve,
)
from .stats import RadialVarianceTable, loglog_regress, number_variance_scan
from .streams import StreamKey
from .ergodicity import mixing_decay_check
from .tableio import (
    eprint,
    manifest_path,
    read_table,
    write_manifest,
    write_points,
    write_table,
)


def _key(seed: int) -> StreamKey:
    return StreamKey(master_seed=int(seed))


def _fit_json(fit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }


def _flag_dict(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "config")}


# --------------------------------------------------------------------------
# sample
# --------------------------------------------------------------------------


def cmd_sample(args) -> int:
    h = HurstIndex(args.h).h
    N = int(args.n) // 2
    if N < 1:
        raise UsageError("--n must be at least 2")
    key = _key(args.seed)
    cfg = perturb_palm_lattice(h, N, key.child(0), mode=args.fbm_mode)
    meta = {
        "kind": "points",
        "mode": "palm",
        "h": h,
        "n": int(args.n),
        "halfwidth": N,
        "fbm_mode": args.fbm_mode,
        "master_seed": int(args.seed),
        "tool_version": __version__,
    }
    if args.mode == STATIONARIZED:
        shift = args.shift if args.shift is not None else N / 4.0
        cfg = depalmize(cfg, shift, key.child(1))
        meta["mode"] = STATIONARIZED
        meta["shift_halfwidth"] = shift
    write_points(args.out, cfg.points, meta)
    write_manifest(
        manifest_path(args.out), "sample", _flag_dict(args), args.seed,
        [args.out], __version__,
    )
    return 0


# --------------------------------------------------------------------------
# variance / regress
# --------------------------------------------------------------------------


def _radii_from_args(args) -> np.ndarray:
    rmin = args.rmin if args.rmin is not None else 16.0
    rmax = args.rmax if args.rmax is not None else int(args.n) / 16.0
    if rmin <= 0 or rmax <= rmin:
        raise UsageError("need 0 < rmin < rmax")
    r = np.logspace(np.log10(rmin), np.log10(rmax), int(args.nr))
    return np.unique(np.round(r))


def cmd_variance(args) -> int:
    h = HurstIndex(args.h).h
    radii = _radii_from_args(args)
    table = number_variance_scan(
        h, int(args.n), radii, int(args.realizations), _key(args.seed),
        mode=args.mode, threads=int(args.threads), bootstrap=int(args.bootstrap),
    )
    fit = loglog_regress(table)
    out = Path(args.out)
    fit_path = out.with_name(out.stem + ".fit.json")
    meta = {"kind": "variance", "tool_version": __version__, **table.params,
            "realizations": table.realizations}
    write_table(
        out,
        {
            "r": table.radii,
            "mean_count": table.mean_count,
            "var_count": table.var_count,
            "var_stderr": table.var_stderr,
        },
        meta,
    )
    fit_path.write_text(json.dumps(_fit_json(fit), indent=2, sort_keys=True) + "\n")
    write_manifest(
        manifest_path(out), "variance", _flag_dict(args), args.seed,
        [str(out), str(fit_path)], __version__,
    )
    print(f"slope={fit.slope:.6g} r_squared={fit.r_squared:.6g}")
    return 0


def cmd_regress(args) -> int:
    meta, cols = read_table(args.infile)
    for c in ("r", "var_count"):
        if c not in cols:
            raise UsageError(f"{args.infile}: missing column {c!r}")
    table = RadialVarianceTable(
        radii=cols["r"],
        mean_count=cols.get("mean_count", np.zeros_like(cols["r"])),
        var_count=cols["var_count"],
        var_stderr=cols.get("var_stderr", np.ones_like(cols["r"])),
        realizations=int(float(meta.get("realizations", 2))),
        params=meta,
    )
    fit = loglog_regress(table)
    Path(args.out).write_text(json.dumps(_fit_json(fit), indent=2, sort_keys=True) + "\n")
    print(f"slope={fit.slope:.6g}")
    return 0


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    h = HurstIndex(args.h).h
    t = np.linspace(args.tmin, args.tmax, int(args.nt))
    if np.any(t <= 0):
        raise UsageError("t grid must be positive")
    meta = {"kind": "spectrum", "h": h, "method": args.mode,
            "master_seed": int(args.seed), "tool_version": __version__}
    if args.mode == "empirical":
        if int(args.realizations) < 2:
            raise UsageError("empirical mode needs at least 2 realizations")
        N = int(args.n) // 2
        w = N / 2.0
        if not np.all(is_on_dual_grid(t, w)):
            if args.snap_dual:
                t = np.unique(np.round(t * w / np.pi).clip(1) * np.pi / w)
            elif not args.allow_off_grid:
                raise UsageError(
                    f"t grid is not on the dual grid pi*k/{w}; use --snap-dual "
                    "or --allow-off-grid"
                )
        key = _key(args.seed)
        configs = [
            perturb_palm_lattice(h, N, key.child(1 + m))
            for m in range(int(args.realizations))
        ]
        curve = empirical_structure_factor(
            configs, t, w, allow_off_grid=args.allow_off_grid or args.snap_dual
        )
        meta.update({"n": int(args.n), "realizations": int(args.realizations),
                     "window_halfwidth": w})
        cols = {"t": curve.t, "s": curve.s,
                "method": np.array([curve.method] * len(curve.t)),
                "trunc": curve.trunc_info, "stderr": curve.stderr}
    else:
        curve = structure_factor_curve(h, t, method=args.mode, tol=args.tol)
        cols = {"t": curve.t, "s": curve.s,
                "method": np.array([curve.method] * len(curve.t)),
                "trunc": curve.trunc_info}
    write_table(args.out, cols, meta)
    write_manifest(
        manifest_path(args.out), "spectrum", _flag_dict(args), args.seed,
        [args.out], __version__,
    )
    return 0


# --------------------------------------------------------------------------
# mixing
# --------------------------------------------------------------------------


def cmd_mixing(args) -> int:
    h = HurstIndex(args.h).h
    if args.tmax <= args.tmin or args.tmin <= 0:
        raise UsageError("need 0 < tmin < tmax")
    t = np.logspace(np.log10(args.tmin), np.log10(args.tmax), int(args.nt))
    curve, verdict = mixing_decay_check(h, args.a, args.b, t)
    meta = {"kind": "mixing", "h": h, "a": args.a, "b": args.b,
            "verdict": str(verdict).lower(), "tool_version": __version__}
    if args.out:
        write_table(args.out, {"t": curve.t, "V": curve.values}, meta)
        write_manifest(
            manifest_path(args.out), "mixing", _flag_dict(args), 0,
            [args.out], __version__,
        )
    print(f"mixing: {str(verdict).lower()}")
    return 0


# --------------------------------------------------------------------------
# plot
# --------------------------------------------------------------------------


def _setup_matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "hyperlat"
    matplotlib.rcParams["svg.fonttype"] = "none"
    import matplotlib.pyplot as plt

    return plt


def cmd_plot(args) -> int:
    plt = _setup_matplotlib()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    kinds = set()
    for path in args.infiles:
        meta, cols = read_table(path)
        kind = meta.get("kind", "")
        kinds.add(kind)
        if kind == "variance":
            table = RadialVarianceTable(
                radii=cols["r"], mean_count=cols["mean_count"],
                var_count=cols["var_count"], var_stderr=cols["var_stderr"],
                realizations=int(float(meta.get("realizations", 2))), params=meta,
            )
            fit = loglog_regress(table)
            ax.errorbar(table.radii, table.var_count, yerr=table.var_stderr,
                        fmt="o", ms=3, label=f"h={meta.get('h', '?')}")
            rr = np.array([table.radii[0], table.radii[-1]])
            ax.plot(rr, np.exp(fit.intercept) * rr**fit.slope, "-",
                    label=f"slope={fit.slope:.6g}")
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_xlabel("r")
            ax.set_ylabel("Var[count in [-r, r]]")
        elif kind == "spectrum":
            ax.plot(cols["t"], cols["s"], marker=".", lw=1,
                    label=f"{meta.get('method', 's')} h={meta.get('h', '?')}")
            ax.set_xlabel("t")
            ax.set_ylabel("s(t)")
        elif kind == "mixing":
            ax.loglog(cols["t"], np.abs(cols["V"]), lw=1,
                      label=f"|V| h={meta.get('h', '?')}")
            ax.set_xlabel("t")
            ax.set_ylabel("|V(t)|")
        else:
            raise UsageError(f"{path}: no plot renderer for kind {kind!r}")
    ax.legend(loc="best")
    ax.set_title(" / ".join(sorted(kinds)))
    fig.tight_layout()
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return 0


# --------------------------------------------------------------------------
# parser plumbing
# --------------------------------------------------------------------------


def _build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="hyperlat",
        description="Hyperuniform point processes from fBm-perturbed lattices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name, func, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", type=str, default=None,
                       help="key=value file; explicit flags override")
        p.set_defaults(func=func)
        subs[name] = p
        return p

    p = add("sample", cmd_sample, help="sample one perturbed-lattice configuration")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="lattice sites (window [-n/2, n/2])")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--mode", choices=["palm", "stationarized"], default="palm")
    p.add_argument("--shift", type=float, default=None,
                   help="uniform-shift halfwidth for stationarized mode (default n/8)")
    p.add_argument("--fbm-mode", choices=["rebased", "independent"], default="rebased")
    p.add_argument("--threads", type=int, default=1)

    p = add("variance", cmd_variance, help="Monte Carlo number-variance scan + exponent fit")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--n", type=int, default=2**16)
    p.add_argument("--realizations", type=int, default=2000)
    p.add_argument("--rmin", type=float, default=None)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--nr", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--mode", choices=["palm", "stationarized"], default="stationarized")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--bootstrap", type=int, default=200)

    p = add("spectrum", cmd_spectrum, help="structure factor curves")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--mode", choices=["sum", "continuum", "asymptotic", "empirical"],
                   default="sum")
    p.add_argument("--tmin", type=float, default=0.5)
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--nt", type=int, default=26)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2**12, help="sites per empirical realization")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--snap-dual", action="store_true",
                   help="snap the t grid to the dual grid (empirical mode)")
    p.add_argument("--allow-off-grid", action="store_true",
                   help="accept off-dual-grid t despite windowing bias")
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--threads", type=int, default=1)

    p = add("mixing", cmd_mixing, help="mixing-criterion decay check")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--tmin", type=float, default=1.0)
    p.add_argument("--tmax", type=float, default=1000.0)
    p.add_argument("--nt", type=int, default=200)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--threads", type=int, default=1)

    p = add("regress", cmd_regress, help="refit a variance CSV")
    p.add_argument("--in", dest="infile", type=str, required=True)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--threads", type=int, default=1)

    p = add("plot", cmd_plot, help="render CSVs as a static SVG")
    p.add_argument("--in", dest="infiles", type=str, nargs="+", required=True)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--threads", type=int, default=1)

    return parser, subs


def _load_config(path: str) -> dict:
    cfg = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _apply_config(sp: argparse.ArgumentParser, cfg: dict) -> None:
    defaults = {}
    for action in sp._actions:
        if action.dest in cfg:
            raw = cfg[action.dest]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                defaults[action.dest] = action.type(raw)
            else:
                defaults[action.dest] = raw
            if action.required:
                action.required = False
    sp.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = _build_parser()
    try:
        if "--config" in argv:
            cfg_path = argv[argv.index("--config") + 1]
            cmd = next((a for a in argv if not a.startswith("-")), None)
            if cmd in subs:
                _apply_config(subs[cmd], _load_config(cfg_path))
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse errors already printed a message
        code = exc.code if isinstance(exc.code, int) else 2
        return code
    except (UsageError, ValueError, FileNotFoundError, IndexError) as exc:
        eprint(f"error: {exc}")
        return 2
    except NumericError as exc:
        eprint(f"numeric failure: {exc}")
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
