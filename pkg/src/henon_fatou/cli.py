"""Command line interface: ``henon-fatou <command> [options]``.

Exit status is 0 on success, 1 when a verification check fails, 2 for
usage or configuration errors and 3 for runtime or I/O failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

from .cycles import cycle_decomposition, format_cycle, format_slice_table
from .dynamics import Params, Step, iterate
from .errors import DisagreementError, OrbitLeftS, ParamError
from .limits import DEFAULT_TOL, conjugacy_phi, estimate_h
from .render import DEFAULT_BUDGET, DEFAULT_C, SliceSpec, render, write_outputs
from .serialize import csv_text, dumps, parse_complex
from .sets import WSchedule, sample_A, sample_S, sample_W_n, sector_pair, slice_index
from .verify import SUITES, ray_base, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class RuntimeFailure(Exception):
    """Raised after partial output has been written; maps to exit status 3."""


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every command."""

    m: int
    delta: float
    C: float
    R0: float | None
    budget: int
    tol: float
    seed: int
    out: str | None
    format: str

    @classmethod
    def from_args(cls, ns):
        return cls(ns.m, ns.delta, ns.C, ns.R0, ns.budget, ns.tol, ns.seed, ns.out, ns.format)

    def params(self):
        return Params(self.m, self.delta)

    def schedule(self):
        if self.R0 is not None and not self.R0 > 0:
            raise ParamError("R0 must be positive")
        return WSchedule.from_params(self.params(), self.R0)


def _complex_arg(text):
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair_arg(text):
    parts = text.split(",") if "," in text else list(text)
    try:
        a, b = (int(v) for v in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed sector pair {text!r}; use 'ab' or 'a,b'") from None
    return a, b


def _emit(cfg, text):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    with open(cfg.out, "w") as fh:
        fh.write(text)


def _require_format(cfg, allowed):
    if cfg.format not in allowed:
        raise UsageError(f"--format {cfg.format} is not supported here; use one of {allowed}")


# --- commands -----------------------------------------------------------------


def cmd_orbit(cfg, ns):
    _require_format(cfg, ("json", "csv"))
    p = cfg.params()
    if ns.n < 0:
        raise UsageError("--n must be >= 0")
    orbit = iterate((ns.z0, ns.w0), ns.n, p)
    rows = []
    for k in range(len(orbit)):
        z, w = complex(orbit.z[k]), complex(orbit.w[k])
        pair = sector_pair((z, w), p.m)
        flag = Step(int(orbit.flags[k])).name.lower() if k < len(orbit.flags) else ""
        rows.append((k, z.real, z.imag, w.real, w.imag, pair.label(p.m) if pair else "", flag))
    header = ["n", "re_z", "im_z", "re_w", "im_w", "sector_pair", "flag"]
    if cfg.format == "csv":
        _emit(cfg, csv_text(header, rows))
    else:
        doc = {
            "params": {"m": p.m, "delta": p.delta},
            "z0": ns.z0,
            "w0": ns.w0,
            "n": ns.n,
            "overflowed": orbit.overflowed,
            "rows": [dict(zip(header, r)) for r in rows],
        }
        _emit(cfg, dumps(doc))
    if len(orbit) < ns.n + 1:
        raise RuntimeFailure(f"orbit overflowed at step {len(orbit) - 1}, before n={ns.n}")


def cmd_cycles(cfg, ns):
    _require_format(cfg, ("json", "csv"))
    if cfg.m < 2:
        raise ParamError("m must be >= 2")
    m = cfg.m
    dec = cycle_decomposition(m)
    if cfg.format == "csv":
        rows = [
            (
                c.representative.label(m),
                c.period,
                " ".join(q.label(m) for q in c.members),
                c.slices[0],
                c.slices[1],
            )
            for c in dec.cycles
        ]
        _emit(cfg, csv_text(["representative", "period", "members", "h1_slice", "h2_slice"], rows))
        return
    doc = {
        "m": m,
        "count": len(dec.cycles),
        "cycles": [
            {
                "representative": c.representative.label(m),
                "period": c.period,
                "members": [q.label(m) for q in c.members],
                "sequence": format_cycle(c, m),
                "table": format_slice_table(c, m).split("\n"),
                "h1_slice": c.slices[0],
                "h2_slice": c.slices[1],
            }
            for c in dec.cycles
        ],
    }
    _emit(cfg, dumps(doc))


def cmd_verify(cfg, ns):
    _require_format(cfg, ("json", "csv"))
    p = cfg.params()
    cfg.schedule()
    results = run_suite(ns.suite, p, samples=ns.samples, seed=cfg.seed, R0=cfg.R0, tol=cfg.tol)
    passed = all(c.passed for _, c in results)
    if cfg.format == "csv":
        rows = [(s, c.name, c.passed, c.measured, c.relation, c.tolerance, c.detail) for s, c in results]
        _emit(cfg, csv_text(["suite", "check", "passed", "measured", "relation", "tolerance", "detail"], rows))
    else:
        doc = {
            "suite": ns.suite,
            "params": {"m": p.m, "delta": p.delta},
            "seed": cfg.seed,
            "samples": ns.samples,
            "passed": passed,
            "checks": [dict(suite=s, **c.to_dict()) for s, c in results],
        }
        _emit(cfg, dumps(doc))
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_render(cfg, ns):
    _require_format(cfg, ("ppm",))
    p = cfg.params()
    sched = cfg.schedule()
    if ns.width < 1 or ns.height < 1:
        raise UsageError("--width and --height must be >= 1")
    R0 = sched.R0
    center = ns.center if ns.center is not None else complex(10.5 * R0, 10.5 * R0)
    extent = ns.extent if ns.extent is not None else complex(19.0 * R0, 19.0 * R0)
    spec = SliceSpec(
        ns.mode,
        center,
        extent,
        ns.width,
        ns.height,
        fixed=ns.fixed,
        base=(ns.base_z, ns.base_w),
        direction=(ns.dir_z, ns.dir_w),
    )
    raster = render(spec, p, cfg.budget, cfg.C, ns.threads)
    written = write_outputs(raster, cfg.out or "render.ppm", png=ns.png)
    sys.stdout.write(
        dumps({"written": written, "classes": raster.class_counts(), "periods": raster.resolved_periods()})
    )


def cmd_sample(cfg, ns):
    _require_format(cfg, ("json", "csv"))
    p = cfg.params()
    sched = cfg.schedule()
    m = p.m
    if ns.count < 1:
        raise UsageError("--count must be >= 1")
    if ns.set == "S":
        pts = sample_S(ns.count, cfg.seed, m)
    elif ns.set == "A":
        M = ns.M if ns.M is not None else ray_base(sched)
        pts = sample_A(ns.pair, M, ns.count, cfg.seed, m)
    else:
        if not 0 <= ns.b < m or ns.n < 0:
            raise UsageError("W samples need 0 <= --b < m and --n >= 0")
        pts = sample_W_n(ns.n, ns.b, sched, ns.count, cfg.seed, edge=ns.edge)
    header = ["i", "re_z", "im_z", "re_w", "im_w"]
    rows = [(i, q[0].real, q[0].imag, q[1].real, q[1].imag) for i, q in enumerate(pts)]
    if cfg.format == "csv":
        _emit(cfg, csv_text(header, rows))
    else:
        doc = {
            "set": ns.set,
            "params": {"m": m, "delta": p.delta, "R0": sched.R0},
            "seed": cfg.seed,
            "points": [{"z": q[0], "w": q[1]} for q in pts],
        }
        _emit(cfg, dumps(doc))


def cmd_limits(cfg, ns):
    _require_format(cfg, ("json", "csv"))
    p = cfg.params()
    pt = (ns.z0, ns.w0)
    est = estimate_h(pt, p, cfg.tol)
    phi = conjugacy_phi(pt, p, cfg.tol)
    pair = sector_pair(pt, p.m)
    fields = {
        "h1": est.h1,
        "h2": est.h2,
        "delta1": est.delta1,
        "delta2": est.delta2,
        "phi_z": phi[0],
        "phi_w": phi[1],
        "terms": est.terms_used,
        "residual": est.residual,
        "ratio_gap": est.ratio_gap,
        "h1_slice": slice_index(est.h1, p.m),
        "h2_slice": slice_index(est.h2, p.m),
        "sector_pair": pair.label(p.m) if pair else None,
    }
    if cfg.format == "csv":
        _emit(cfg, csv_text(list(fields), [list(fields.values())]))
    else:
        _emit(cfg, dumps(dict(params={"m": p.m, "delta": p.delta}, z0=ns.z0, w0=ns.w0, **fields)))


# --- parser -------------------------------------------------------------------


def _common():
    c = argparse.ArgumentParser(add_help=False)
    g = c.add_argument_group("configuration")
    g.add_argument("--m", type=int, default=5, help="degree m >= 2 (default 5)")
    g.add_argument("--delta", type=float, default=3.0, help="delta > 2 (default 3)")
    g.add_argument("--C", type=float, default=DEFAULT_C, help="absorbing-slab constant (default 1)")
    g.add_argument("--R0", type=float, default=None, help="override the base radius of the W schedule")
    g.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="render iteration budget")
    g.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series truncation tolerance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="output path (stdout when omitted; render defaults to render.ppm)")
    return c


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="henon-fatou",
        description="Orbits, cycle tables, limit functions and slice renders for (z, w) -> (exp(-z^m) + a w, z).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, fmt="json", formats=("json", "csv", "ppm")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--format", choices=formats, default=fmt)
        return sp

    sp = add("orbit", "iterate one point")
    sp.add_argument("--z0", type=_complex_arg, required=True, help="complex literal RE+IMi")
    sp.add_argument("--w0", type=_complex_arg, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(run=cmd_orbit)

    sp = add("cycles", "cycle decomposition and limit-slice map")
    sp.set_defaults(run=cmd_cycles)

    sp = add("verify", "run self-check suites")
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--samples", type=int, default=50)
    sp.set_defaults(run=cmd_verify)

    sp = add("render", "classify a slice and write PPM plus JSON metadata", fmt="ppm")
    sp.add_argument("--mode", choices=("z-plane", "real-plane", "line"), default="real-plane")
    sp.add_argument("--center", type=_complex_arg, default=None)
    sp.add_argument("--extent", type=_complex_arg, default=None, help="X_SPAN+Y_SPANi")
    sp.add_argument("--width", type=int, default=256)
    sp.add_argument("--height", type=int, default=256)
    sp.add_argument("--fixed", type=_complex_arg, default=0j, help="w in z-plane mode")
    sp.add_argument("--base-z", type=_complex_arg, default=0j)
    sp.add_argument("--base-w", type=_complex_arg, default=0j)
    sp.add_argument("--dir-z", type=_complex_arg, default=1 + 0j)
    sp.add_argument("--dir-w", type=_complex_arg, default=0j)
    sp.add_argument("--threads", type=int, default=4)
    sp.add_argument("--png", action="store_true", help="also write a PNG (needs Pillow)")
    sp.set_defaults(run=cmd_render)

    sp = add("sample", "seeded points of S, A_ab or W_n")
    sp.add_argument("--set", choices=("S", "A", "W"), default="S")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--pair", type=_pair_arg, default=(0, 0), help="sector pair for A, e.g. 02")
    sp.add_argument("--M", type=float, default=None, help="ray base radius for A (default 10*R0)")
    sp.add_argument("--b", type=int, default=0, help="cycle representative (0, b) for W")
    sp.add_argument("--n", type=int, default=0, help="schedule step for W")
    sp.add_argument("--edge", action="store_true", help="bias W samples toward the boundary")
    sp.set_defaults(run=cmd_sample)

    sp = add("limits", "closed-form h1, h2 and the conjugacy at one point")
    sp.add_argument("--z0", type=_complex_arg, required=True)
    sp.add_argument("--w0", type=_complex_arg, required=True)
    sp.set_defaults(run=cmd_limits)
    return parser


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        if not (math.isfinite(cfg.delta) and math.isfinite(cfg.C) and math.isfinite(cfg.tol)):
            raise ParamError("numeric options must be finite")
        status = ns.run(cfg, ns)
    except (ParamError, UsageError, ValueError) as exc:
        print(f"henon-fatou: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeFailure, OrbitLeftS, DisagreementError, OverflowError, OSError) as exc:
        print(f"henon-fatou: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
