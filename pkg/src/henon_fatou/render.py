"""Classify points of a real 2-parameter slice of C^2 and rasterise the result.

Each pixel centre is iterated until its sector pairs follow a ``gamma``-cycle
for two full periods while staying in ``I(C) x I(C)``; it is then labelled
with the cycle's representative. Colour hue encodes the cycle and
brightness the position of ``h1`` inside its angular slice.

Rendering is split into 64x64 tiles in row-major order. Tiles are pure
functions of their inputs and are merged in index order, so the output is
byte-identical for any worker count.
"""

from __future__ import annotations

import colorsys
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cycles import SectorPair, cycle_decomposition, gamma, limit_slice_map
from .dynamics import iterate, step_arrays
from .errors import DisagreementError, OrbitLeftS, ParamError
from .limits import estimate_h, limit_arrays
from .serialize import dumps
from .sets import in_I, in_I_array, sector_index_array, sector_pair

TILE = 64
DEFAULT_BUDGET = 200
DEFAULT_C = 1.0

MODES = ("z-plane", "real-plane", "line")

UNRESOLVED_RGB = (128, 128, 128)
OVERFLOW_RGB = (255, 255, 255)
NON_SECTOR_RGB = (0, 0, 0)


class Kind(enum.IntEnum):
    CYCLE = 0
    UNRESOLVED = 1
    OVERFLOW_ESCAPE = 2
    NON_SECTOR = 3


KIND_NAMES = {
    Kind.CYCLE: "cycle",
    Kind.UNRESOLVED: "unresolved",
    Kind.OVERFLOW_ESCAPE: "overflow-escape",
    Kind.NON_SECTOR: "non-sector",
}


@dataclass(frozen=True)
class Classification:
    kind: Kind
    representative: SectorPair | None = None
    period: int | None = None
    iterations_used: int = 0
    h1_arg: float | None = None


@dataclass(frozen=True)
class SliceSpec:
    """A rectangle in a real 2-parameter family of points of C^2.

    ``center`` and ``extent`` are complex numbers whose real/imaginary parts
    give the horizontal/vertical centre and full span. In ``z-plane`` mode
    the pixel is ``(x + iy, fixed)``; in ``real-plane`` mode ``(x, y)``; in
    ``line`` mode ``base + (x + iy) * direction``.
    """

    mode: str
    center: complex
    extent: complex
    width: int
    height: int
    fixed: complex = 0j
    base: tuple = (0j, 0j)
    direction: tuple = (1 + 0j, 0j)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParamError(f"mode must be one of {MODES}, got {self.mode!r}")
        ext = complex(self.extent)
        if not (ext.real > 0 and ext.imag > 0 and math.isfinite(ext.real) and math.isfinite(ext.imag)):
            raise ParamError(f"extent must have positive real and imaginary spans, got {self.extent!r}")
        if self.width < 1 or self.height < 1:
            raise ParamError("resolution must be at least 1x1")

    def axes(self, r0, r1, c0, c1):
        """Pixel-centre coordinates ``(x, y)`` for rows ``r0:r1`` and columns ``c0:c1``."""
        c, e = complex(self.center), complex(self.extent)
        cols = np.arange(c0, c1, dtype=float)
        rows = np.arange(r0, r1, dtype=float)
        x = c.real - e.real / 2 + (cols + 0.5) * (e.real / self.width)
        y = c.imag + e.imag / 2 - (rows + 0.5) * (e.imag / self.height)
        return np.meshgrid(x, y)

    def points(self, r0, r1, c0, c1):
        x, y = self.axes(r0, r1, c0, c1)
        if self.mode == "z-plane":
            z = x + 1j * y
            w = np.full_like(z, complex(self.fixed))
        elif self.mode == "real-plane":
            z = x + 0j
            w = y + 0j
        else:
            t = x + 1j * y
            z = complex(self.base[0]) + t * complex(self.direction[0])
            w = complex(self.base[1]) + t * complex(self.direction[1])
        return z, w

    def to_json(self):
        def c(v):
            v = complex(v)
            return [v.real, v.imag]

        return {
            "mode": self.mode,
            "center": c(self.center),
            "extent": c(self.extent),
            "width": self.width,
            "height": self.height,
            "fixed": c(self.fixed),
            "base": [c(self.base[0]), c(self.base[1])],
            "direction": [c(self.direction[0]), c(self.direction[1])],
        }


def _h1_arg(h):
    if h is None or h == 0 or not np.isfinite(h):
        return None
    return math.atan2(h.imag, h.real)


def classify(pt, p, budget=DEFAULT_BUDGET, C=DEFAULT_C):
    """Dynamical fate of one point.

    ``cycle`` when, for two full periods, consecutive sector pairs follow
    ``gamma`` and every iterate in that window lies in ``I(C) x I(C)``;
    ``overflow-escape`` when the orbit overflows first; ``non-sector`` when
    no iterate ever enters ``S``; ``unresolved`` otherwise.
    """
    m = p.m
    if budget < 2 * m:
        raise ParamError(f"budget must be >= 2m = {2 * m}")
    decomp = cycle_decomposition(m)
    orbit = iterate(pt, budget, p)
    entered = False
    start = None
    prev = None
    for n, (z, w) in enumerate(zip(orbit.z, orbit.w)):
        pair = sector_pair((z, w), m)
        entered = entered or pair is not None
        if pair is None or not (in_I(z, C, m) and in_I(w, C, m)):
            start, prev = None, None
            continue
        if start is None or pair != gamma(prev, m):
            start = n
        prev = pair
        cyc = decomp.cycle_of(pair)
        if n - start >= 2 * cyc.period:
            try:
                est = estimate_h((z, w), p)
                h1 = est.h1 if n % 2 == 0 else est.h2
            except (OrbitLeftS, DisagreementError, OverflowError):
                h1 = None
            return Classification(Kind.CYCLE, cyc.representative, cyc.period, n, _h1_arg(h1))
    n_used = len(orbit) - 1
    if orbit.overflowed:
        return Classification(Kind.OVERFLOW_ESCAPE, iterations_used=n_used)
    if not entered:
        return Classification(Kind.NON_SECTOR, iterations_used=n_used)
    return Classification(Kind.UNRESOLVED, iterations_used=n_used)


@dataclass(frozen=True)
class _Tables:
    gamma_code: np.ndarray
    period: np.ndarray
    rep_b: np.ndarray


def _tables(m):
    decomp = cycle_decomposition(m)
    gamma_code = np.empty(m * m + 1, dtype=np.int64)
    period = np.zeros(m * m, dtype=np.int64)
    rep_b = np.zeros(m * m, dtype=np.int64)
    for a in range(m):
        for b in range(m):
            g = gamma((a, b), m)
            gamma_code[a * m + b] = g.a * m + g.b
    gamma_code[m * m] = -2  # "no previous pair" never matches
    for c in decomp.cycles:
        for q in c.members:
            period[q.a * m + q.b] = c.period
            rep_b[q.a * m + q.b] = c.representative.b
    return _Tables(gamma_code, period, rep_b)


def classify_arrays(z0, w0, p, budget=DEFAULT_BUDGET, C=DEFAULT_C):
    """Vectorised :func:`classify`.

    Returns ``(kind, rep_b, period, iterations, h1_arg)`` arrays; ``rep_b``
    and ``period`` are -1 and ``h1_arg`` NaN where not a cycle.
    """
    m = p.m
    if budget < 2 * m:
        raise ParamError(f"budget must be >= 2m = {2 * m}")
    tab = _tables(m)
    z = np.array(z0, dtype=complex).ravel()
    w = np.array(w0, dtype=complex).ravel()
    size = z.size
    kind = np.full(size, -1, dtype=np.int64)
    rep_b = np.full(size, -1, dtype=np.int64)
    period = np.full(size, -1, dtype=np.int64)
    iters = np.zeros(size, dtype=np.int64)
    snap_z = np.full(size, np.nan, dtype=complex)
    snap_w = np.full(size, np.nan, dtype=complex)
    snap_odd = np.zeros(size, dtype=bool)
    start = np.full(size, -1, dtype=np.int64)
    prev = np.full(size, m * m, dtype=np.int64)
    entered = np.zeros(size, dtype=bool)
    dead = ~(np.isfinite(z) & np.isfinite(w))
    kind[dead] = Kind.OVERFLOW_ESCAPE
    for n in range(budget + 1):
        open_ = kind < 0
        if not open_.any():
            break
        ka = sector_index_array(z, m)
        kb = sector_index_array(w, m)
        in_s = (ka >= 0) & (kb >= 0)
        entered |= in_s
        valid = in_s & in_I_array(z, C, m) & in_I_array(w, C, m)
        code = np.where(valid, ka * m + kb, m * m)
        cont = valid & (start >= 0) & (code == tab.gamma_code[prev])
        start = np.where(valid & ~cont, n, start)
        start = np.where(valid, start, -1)
        prev = np.where(valid, code, m * m)
        safe = np.where(valid, code, 0)
        done = open_ & valid & (n - start >= 2 * tab.period[safe])
        if done.any():
            kind[done] = Kind.CYCLE
            rep_b[done] = tab.rep_b[safe[done]]
            period[done] = tab.period[safe[done]]
            iters[done] = n
            snap_z[done] = z[done]
            snap_w[done] = w[done]
            snap_odd[done] = n % 2 == 1
        if n == budget:
            break
        z, w, _, over = step_arrays(z, w, p)
        newly = (kind < 0) & over
        kind[newly] = Kind.OVERFLOW_ESCAPE
        iters[newly] = n
    rest = kind < 0
    iters[rest] = budget
    kind[rest & entered] = Kind.UNRESOLVED
    kind[rest & ~entered] = Kind.NON_SECTOR
    h1_arg = np.full(size, np.nan)
    cyc = kind == Kind.CYCLE
    if cyc.any():
        lim = limit_arrays(snap_z[cyc], snap_w[cyc], p)
        h = np.where(snap_odd[cyc], lim.h2, lim.h1)
        h1_arg[cyc] = np.angle(h)
        h1_arg[cyc] = np.where(np.isfinite(h) & (h != 0), h1_arg[cyc], np.nan)
    return kind, rep_b, period, iters, h1_arg


def palette(m):
    """``{representative b: (r, g, b) floats}`` with evenly spread hues."""
    reps = [c.representative.b for c in cycle_decomposition(m).cycles]
    return {b: colorsys.hsv_to_rgb(i / len(reps), 0.8, 1.0) for i, b in enumerate(reps)}


def _colorize(kind, rep_b, h1_arg, m):
    rgb = np.zeros(kind.shape + (3,), dtype=np.uint8)
    rgb[kind == Kind.UNRESOLVED] = UNRESOLVED_RGB
    rgb[kind == Kind.OVERFLOW_ESCAPE] = OVERFLOW_RGB
    rgb[kind == Kind.NON_SECTOR] = NON_SECTOR_RGB
    pal = palette(m)
    width = 2 * math.pi / m
    for b, base in pal.items():
        sel = (kind == Kind.CYCLE) & (rep_b == b)
        if not sel.any():
            continue
        j1 = limit_slice_map(b, m)[0]
        off = np.remainder(h1_arg[sel] - j1 * width + math.pi, 2 * math.pi) - math.pi
        t = np.clip(off / width + 0.5, 0.0, 1.0)
        value = np.where(np.isfinite(t), 0.35 + 0.65 * t, 0.6)
        col = np.outer(value, np.asarray(base)) * 255.0
        rgb[sel] = np.clip(np.rint(col), 0, 255).astype(np.uint8)
    return rgb


@dataclass
class Raster:
    """Per-pixel classification and colours, row 0 at the top."""

    spec: SliceSpec
    m: int
    delta: float
    budget: int
    C: float
    rgb: np.ndarray
    kind: np.ndarray
    rep_b: np.ndarray
    period: np.ndarray
    iterations: np.ndarray
    h1_arg: np.ndarray

    def class_counts(self):
        """Pixel counts per class, cycles first in representative order."""
        out = []
        decomp = cycle_decomposition(self.m)
        for c in decomp.cycles:
            n = int(np.count_nonzero((self.kind == Kind.CYCLE) & (self.rep_b == c.representative.b)))
            if n:
                out.append(
                    {
                        "kind": "cycle",
                        "representative": c.representative.label(self.m),
                        "period": c.period,
                        "pixels": n,
                    }
                )
        for k in (Kind.UNRESOLVED, Kind.OVERFLOW_ESCAPE, Kind.NON_SECTOR):
            n = int(np.count_nonzero(self.kind == k))
            if n:
                out.append({"kind": KIND_NAMES[k], "pixels": n})
        return out

    def resolved_periods(self):
        return sorted({int(v) for v in np.unique(self.period[self.kind == Kind.CYCLE])})

    def metadata(self):
        pal = palette(self.m)
        return {
            "format": "P6",
            "slice": self.spec.to_json(),
            "params": {"m": self.m, "delta": self.delta},
            "budget": self.budget,
            "C": self.C,
            "palette": {
                "cycles": {
                    SectorPair(0, b).label(self.m): [round(255 * v) for v in rgb] for b, rgb in pal.items()
                },
                "unresolved": list(UNRESOLVED_RGB),
                "overflow-escape": list(OVERFLOW_RGB),
                "non-sector": list(NON_SECTOR_RGB),
                "brightness": "0.35 + 0.65 * position of arg(h1) across its slice",
            },
            "classes": self.class_counts(),
        }

    def ppm_bytes(self):
        h, w = self.rgb.shape[:2]
        return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(self.rgb).tobytes()


def thread_cap(threads):
    """``threads`` capped by the ``HENON_THREADS`` environment variable."""
    cap = os.environ.get("HENON_THREADS")
    threads = max(1, int(threads))
    if cap:
        threads = min(threads, max(1, int(cap)))
    return threads


def _tiles(spec):
    return [
        (r0, min(r0 + TILE, spec.height), c0, min(c0 + TILE, spec.width))
        for r0 in range(0, spec.height, TILE)
        for c0 in range(0, spec.width, TILE)
    ]


def render(spec, p, budget=DEFAULT_BUDGET, C=DEFAULT_C, threads=1):
    """Classify every pixel centre of ``spec`` and colour the result."""
    shape = (spec.height, spec.width)
    kind = np.empty(shape, dtype=np.int64)
    rep_b = np.empty(shape, dtype=np.int64)
    period = np.empty(shape, dtype=np.int64)
    iters = np.empty(shape, dtype=np.int64)
    h1_arg = np.empty(shape)

    def work(tile):
        r0, r1, c0, c1 = tile
        z, w = spec.points(r0, r1, c0, c1)
        return [a.reshape(r1 - r0, c1 - c0) for a in classify_arrays(z, w, p, budget, C)]

    tiles = _tiles(spec)
    with ThreadPoolExecutor(max_workers=thread_cap(threads)) as pool:
        results = list(pool.map(work, tiles))
    for (r0, r1, c0, c1), (k, rb, per, it, h) in zip(tiles, results):
        kind[r0:r1, c0:c1] = k
        rep_b[r0:r1, c0:c1] = rb
        period[r0:r1, c0:c1] = per
        iters[r0:r1, c0:c1] = it
        h1_arg[r0:r1, c0:c1] = h
    rgb = _colorize(kind, rep_b, h1_arg, p.m)
    return Raster(spec, p.m, p.delta, budget, C, rgb, kind, rep_b, period, iters, h1_arg)


def write_ppm(raster, path):
    with open(path, "wb") as fh:
        fh.write(raster.ppm_bytes())


def write_png(raster, path):
    """Write a PNG; returns ``False`` when Pillow is unavailable."""
    try:
        from PIL import Image
    except ImportError:
        return False
    Image.fromarray(raster.rgb, mode="RGB").save(path, format="PNG")
    return True


def write_outputs(raster, path, png=False):
    """Write ``path`` (PPM), ``path + '.json'`` (metadata) and optionally a PNG next to it."""
    write_ppm(raster, path)
    meta_path = f"{path}.json"
    with open(meta_path, "w") as fh:
        fh.write(dumps(raster.metadata()))
    written = [path, meta_path]
    if png:
        png_path = os.path.splitext(path)[0] + ".png"
        if write_png(raster, png_path):
            written.append(png_path)
    return written
