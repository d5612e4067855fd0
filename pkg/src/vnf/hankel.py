"""Smooth compactly supported weights and their Mellin and Hankel transforms.

A weight is a product over archimedean places.  A real-place factor is a
sum of signed bumps amp * exp(1 - 1/(1 - t^2)), t = (|x| - c)/r, supported
on sign*(c - r, c + r).  A complex-place factor is a radial bump in |z|
times e^{i k arg z}.  Measures are the self-dual ones: Lebesgue on R and
twice Lebesgue on C (so dx = 2 rho d rho d theta in polar coordinates).

Two routes compute w~_s(y) = int w(x) B_s(x y) dx:

* ``hankel_transform``: adaptive Gauss-Legendre directly in x, one y at a time;
* ``KernelTable``: after substituting t = x*y the kernel no longer depends on
  y, so B_s (real place) or its angular Fourier modes (complex place) are
  tabulated once on fixed Gauss-Legendre panels and every w~_s(y) becomes a
  weighted dot product.  This is the route the dual sums use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, ConfigError, DomainError, ZeroInput
from .specfun import kernel_complex_values, kernel_real_values

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_PANEL_CAP = 2**20


def bump(t):
    """exp(1 - 1/(1 - t^2)) on |t| < 1, zero elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


# ---------------------------------------------------------------------------
# weight specification


@dataclass(frozen=True)
class Bump:
    sign: int
    center: float
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ConfigError("bump sign must be +1 or -1")
        if not (0 < self.radius < self.center):
            raise ConfigError("bump needs 0 < radius < center so the support avoids 0")


@dataclass(frozen=True)
class RealFactor:
    components: tuple

    kind = "real"

    def __post_init__(self):
        if not self.components:
            raise ConfigError("real factor needs at least one bump")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for b in self.components:
            out += b.amplitude * bump((b.sign * x - b.center) / b.radius)
        return out

    @property
    def rmax(self):
        return max(b.center + b.radius for b in self.components)


@dataclass(frozen=True)
class ComplexFactor:
    center: float
    radius: float
    amplitude: float = 1.0
    k: int = 0

    kind = "complex"

    def __post_init__(self):
        if not (0 < self.radius < self.center):
            raise ConfigError("radial bump needs 0 < radius < center")
        if int(self.k) != self.k:
            raise ConfigError("angular frequency must be an integer")

    def radial(self, rho):
        return self.amplitude * bump((np.asarray(rho, dtype=float) - self.center) / self.radius)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.radial(np.abs(z)).astype(complex)
        if self.k:
            val *= np.exp(1j * self.k * np.angle(z))
        return val

    @property
    def rmax(self):
        return self.center + self.radius


@dataclass(frozen=True)
class WeightSpec:
    factors: tuple

    def places(self):
        return tuple(f.kind for f in self.factors)

    def to_dict(self):
        out = []
        for f in self.factors:
            if f.kind == "real":
                out.append({
                    "place": "real",
                    "components": [
                        {"sign": b.sign, "center": b.center, "radius": b.radius, "amplitude": b.amplitude}
                        for b in f.components
                    ],
                })
            else:
                out.append({"place": "complex", "center": f.center, "radius": f.radius,
                            "amplitude": f.amplitude, "k": f.k})
        return {"factors": out}

    @classmethod
    def from_dict(cls, data):
        try:
            facs = []
            for f in data["factors"]:
                if f["place"] == "real":
                    comps = tuple(
                        Bump(int(c.get("sign", 1)), float(c["center"]), float(c["radius"]),
                             float(c.get("amplitude", 1.0)))
                        for c in f["components"]
                    )
                    facs.append(RealFactor(comps))
                elif f["place"] == "complex":
                    facs.append(ComplexFactor(float(f["center"]), float(f["radius"]),
                                              float(f.get("amplitude", 1.0)), int(f.get("k", 0))))
                else:
                    raise ConfigError(f"unknown place {f['place']!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed weight specification: {exc}") from exc
        return cls(tuple(facs))


def real_bump(center, radius, amplitude=1.0, sign=1) -> RealFactor:
    return RealFactor((Bump(sign, center, radius, amplitude),))


def check_weight(w: WeightSpec, places):
    if w.places() != tuple(places):
        raise ConfigError(f"weight has places {w.places()}, field needs {tuple(places)}")


@dataclass(frozen=True)
class TransformResult:
    value: complex
    est_abs_err: float
    panels_used: int


def weight_eval(w: WeightSpec, x) -> complex:
    if len(x) != len(w.factors):
        raise ConfigError("one coordinate per place is required")
    out = 1.0 + 0j
    for f, xv in zip(w.factors, x):
        if xv == 0:
            raise ZeroInput("weights live on F_infinity^x; coordinate is zero")
        out *= complex(f(np.array([xv]))[0])
    return out


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre


def _gl_panel(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return half * (vals @ _GL_WEIGHTS), half * (np.abs(vals) @ _GL_WEIGHTS)


def adaptive_gl(f, edges, rtol=1e-11, atol=0.0, max_panels=_PANEL_CAP):
    """Integrate a vectorized f over the panels given by edges, bisecting until converged.

    The tolerance is relative to int |f| (oscillatory integrands can cancel far
    below their L1 size, and no quadrature resolves that).
    Returns (value, est_abs_err, panels_used).
    """
    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    total = 0j
    err = 0.0
    used = 0
    coarse, l1 = _gl_panel(f, a, b)
    scale = float(np.sum(l1))
    while a.size:
        m = 0.5 * (a + b)
        left, l1l = _gl_panel(f, a, m)
        right, l1r = _gl_panel(f, m, b)
        fine = left + right
        diff = np.abs(fine - coarse)
        thresh = max(rtol * scale, atol) * (b - a) / (edges[-1] - edges[0])
        ok = diff <= thresh
        total += np.sum(fine[ok])
        err += float(np.sum(diff[ok]))
        used += int(np.count_nonzero(ok)) * 2
        a, b, m = a[~ok], b[~ok], m[~ok]
        if used + 2 * a.size > max_panels:
            raise BudgetExceeded(f"adaptive quadrature exceeded {max_panels} panels")
        coarse = np.concatenate([left[~ok], right[~ok]])
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    return complex(total), err, max(used, 1)


def _uniform_edges(lo, hi, n):
    return np.linspace(lo, hi, max(int(n), 1) + 1)


# ---------------------------------------------------------------------------
# Mellin transforms


def _real_factor_mellin(f: RealFactor, s, log_power=0):
    total = 0j
    err = 0.0
    panels = 0
    for b in f.components:
        def g(x, b=b):
            v = b.amplitude * bump((x - b.center) / b.radius) * x ** complex(s)
            return v * np.log(x) ** log_power if log_power else v

        v, e, p = adaptive_gl(g, _uniform_edges(b.center - b.radius, b.center + b.radius, 8))
        total += v
        err += e
        panels += p
    return total, err, panels


def _complex_factor_mellin(f: ComplexFactor, s, log_power=0):
    if f.k != 0:
        return 0j, 0.0, 1

    def g(r):
        v = f.radial(r) * r ** (2 * complex(s)) * 2 * r
        return v * np.log(r * r) ** log_power if log_power else v

    v, e, p = adaptive_gl(g, _uniform_edges(f.center - f.radius, f.center + f.radius, 8))
    return 2 * np.pi * v, 2 * np.pi * e, p


def _factor_mellin(f, s, log_power=0):
    if f.kind == "real":
        return _real_factor_mellin(f, s, log_power)
    return _complex_factor_mellin(f, s, log_power)


def mellin(w: WeightSpec, s) -> TransformResult:
    """w~_s(0) = int w(x) ||x||^s dx, a product over places."""
    val = 1 + 0j
    err_rel = 0.0
    panels = 0
    for f in w.factors:
        v, e, p = _factor_mellin(f, s)
        val *= v
        err_rel += e / max(abs(v), 1e-300)
        panels += p
    return TransformResult(complex(val), abs(val) * err_rel, panels)


def mellin_log(w: WeightSpec) -> TransformResult:
    """w~'_0(0) = int w(x) log ||x|| dx (derivative of the Mellin transform at 0)."""
    base = [_factor_mellin(f, 0.0) for f in w.factors]
    logs = [_factor_mellin(f, 0.0, log_power=1) for f in w.factors]
    total = 0j
    err = 0.0
    panels = 0
    for i in range(len(w.factors)):
        term = logs[i][0]
        for j, bj in enumerate(base):
            if j != i:
                term *= bj[0]
        total += term
        err += logs[i][1] + base[i][1]
        panels += logs[i][2] + base[i][2]
    return TransformResult(complex(total), err, panels)


# ---------------------------------------------------------------------------
# per-point adaptive Hankel transform


def angular_nodes(t: float) -> int:
    """Half-circle trapezoid nodes for the angular integral at radius t.

    The integrand's Fourier content in the angle ends near 4 pi sqrt(t).
    """
    return int(24 + math.ceil(1.5 * 4 * np.pi * math.sqrt(t)))


def angular_mode(s, t, k=0, nodes=None):
    """A_k(t) = int_0^{2 pi} B_s(t e^{i phi}) e^{i k phi} d phi (complex place).

    Uses B_s(conj z) = B_s(z): A_k = 2 int_0^pi B_s(t e^{i phi}) cos(k phi) d phi.
    """
    t = float(t)
    n = nodes or angular_nodes(t)
    phi = np.pi * np.arange(n + 1) / n
    wts = np.full(n + 1, np.pi / n)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    vals, _, _ = kernel_complex_values(s, t * np.exp(1j * phi))
    if k:
        vals = vals * np.cos(k * phi)
    return 2 * complex(vals @ wts)


def _real_factor_transform(f: RealFactor, s, y, rtol):
    total = 0j
    err = 0.0
    panels = 0
    ay = abs(y)
    for b in f.components:
        lo, hi = b.center - b.radius, b.center + b.radius
        sgn = b.sign * (1 if y > 0 else -1)

        def g(x, b=b, sgn=sgn):
            vals, _, _ = kernel_real_values(s, sgn * x * ay)
            return b.amplitude * bump((x - b.center) / b.radius) * vals

        # phase 4 pi sqrt(x |y|) advances at most pi/2 per panel
        n = 8 + math.ceil((4 * np.pi * (math.sqrt(hi * ay) - math.sqrt(lo * ay))) / (np.pi / 2))
        v, e, p = adaptive_gl(g, _uniform_edges(lo, hi, n), rtol=rtol)
        total += v
        err += e
        panels += p
    return total, err, panels


def _complex_factor_transform(f: ComplexFactor, s, y, rtol):
    ay = abs(y)
    lo, hi = f.center - f.radius, f.center + f.radius
    nodes = angular_nodes(hi * ay)

    def g(rho):
        out = np.empty(rho.shape, dtype=complex)
        for i, r in enumerate(rho):
            out[i] = angular_mode(s, r * ay, f.k, nodes)
        return f.radial(rho) * 2 * rho * out

    n = 8 + math.ceil((8 * np.pi * (math.sqrt(hi * ay) - math.sqrt(lo * ay))) / (np.pi / 2))
    v, e, p = adaptive_gl(g, _uniform_edges(lo, hi, n), rtol=rtol)
    phase = np.exp(-1j * f.k * np.angle(y)) if f.k else 1.0
    return v * phase, e, p


def hankel_transform(w: WeightSpec, s, y, rtol=1e-10) -> TransformResult:
    """w~_s(y) = int w(x) B_s(x y) dx by adaptive quadrature, product over places."""
    if len(y) != len(w.factors):
        raise ConfigError("one coordinate per place is required")
    val = 1 + 0j
    err_rel = 0.0
    panels = 0
    for f, yv in zip(w.factors, y):
        if yv == 0:
            raise ZeroInput("Hankel transform needs nonzero coordinates")
        if f.kind == "real":
            v, e, p = _real_factor_transform(f, s, float(np.real(yv)), rtol)
        else:
            v, e, p = _complex_factor_transform(f, s, complex(yv), rtol)
        val *= v
        err_rel += e / max(abs(v), 1e-300)
        panels += p
    return TransformResult(complex(val), abs(val) * err_rel + 1e-300, panels)


# ---------------------------------------------------------------------------
# tabulated kernels


class KernelTable:
    """Kernel values at Gauss-Legendre nodes covering t in [t_lo, t_hi], extended on demand.

    place 'real': stores B_s(t) and B_s(-t); place 'complex': stores A_k(t).
    Panel widths are min(h_rel * t, phase_cap * sqrt(t) / (2 pi c)) with c = 1
    (real, phase 4 pi sqrt t) or c = 2 (complex, phase 8 pi sqrt t).
    """

    def __init__(self, place, s, k=0, h_rel=0.04, phase_cap=8 * np.pi, order=32):
        self.place = place
        self.gl_nodes, self.gl_weights = np.polynomial.legendre.leggauss(order)
        self.s = complex(s)
        self.k = int(k)
        self.h_rel = h_rel
        self.phase_cap = phase_cap
        self.c = 1.0 if place == "real" else 2.0
        self.edges = np.zeros(0)
        self.nodes = np.zeros(0)
        self.weights = np.zeros(0)
        self.pos = np.zeros(0, dtype=complex)
        self.neg = np.zeros(0, dtype=complex)

    def _width(self, t):
        return min(self.h_rel * t, self.phase_cap * math.sqrt(t) / (2 * np.pi * self.c))

    def _eval(self, t):
        if self.place == "real":
            p, _, _ = kernel_real_values(self.s, t)
            n, _, _ = kernel_real_values(self.s, -t)
            return p, n
        out = np.empty(t.shape, dtype=complex)
        # group nodes by the angular node count to vectorize
        counts = np.array([angular_nodes(x) for x in t])
        for n in np.unique(counts):
            idx = np.nonzero(counts == n)[0]
            phi = np.pi * np.arange(n + 1) / n
            wts = np.full(n + 1, np.pi / n)
            wts[0] *= 0.5
            wts[-1] *= 0.5
            if self.k:
                wts = wts * np.cos(self.k * phi)
            for start in range(0, idx.size, 256):
                sub = idx[start:start + 256]
                z = t[sub, None] * np.exp(1j * phi)[None, :]
                vals, _, _ = kernel_complex_values(self.s, z.ravel())
                out[sub] = 2 * (vals.reshape(z.shape) @ wts)
        return out, None

    def _panels(self, lo, hi):
        edges = [lo]
        t = lo
        while t < hi:
            t = t + self._width(t)
            edges.append(t)
        return np.array(edges)

    def _add(self, edges, front):
        a, b = edges[:-1], edges[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        x = (mid[:, None] + half[:, None] * self.gl_nodes[None, :]).ravel()
        wt = (half[:, None] * self.gl_weights[None, :]).ravel()
        p, n = self._eval(x)
        if n is None:
            n = np.zeros(0, dtype=complex)
        if front:
            self.edges = np.concatenate([edges[:-1], self.edges])
            self.nodes = np.concatenate([x, self.nodes])
            self.weights = np.concatenate([wt, self.weights])
            self.pos = np.concatenate([p, self.pos])
            self.neg = np.concatenate([n, self.neg])
        else:
            self.edges = np.concatenate([self.edges[:-1], edges]) if self.edges.size else edges
            self.nodes = np.concatenate([self.nodes, x])
            self.weights = np.concatenate([self.weights, wt])
            self.pos = np.concatenate([self.pos, p])
            self.neg = np.concatenate([self.neg, n])

    def ensure(self, lo, hi):
        """Make the table cover [lo, hi]."""
        if not self.edges.size:
            self._add(self._panels(lo, hi), front=False)
            return
        if hi > self.edges[-1]:
            self._add(self._panels(self.edges[-1], hi), front=False)
        if lo < self.edges[0]:
            # grow downward geometrically so the existing first edge stays an edge
            edges = [self.edges[0]]
            while edges[-1] > lo:
                edges.append(edges[-1] / (1 + self.h_rel))
            self._add(np.array(edges[::-1]), front=True)

    @property
    def size(self):
        return self.nodes.size


def _windowed_sums(table, values, lo, hi, weight_fn, chunk=4_000_000):
    """For each i: sum over table nodes t in [lo_i, hi_i] of weights*values*weight_fn(i, t)."""
    i0 = np.searchsorted(table.nodes, lo, side="left")
    i1 = np.searchsorted(table.nodes, hi, side="right")
    cnt = np.maximum(i1 - i0, 0)
    out = np.zeros(lo.shape, dtype=complex)
    start = 0
    n = lo.size
    while start < n:
        # take as many windows as fit in the chunk
        csum = np.cumsum(cnt[start:])
        stop = start + max(1, int(np.searchsorted(csum, chunk, side="right")))
        stop = min(stop, n)
        c = cnt[start:stop]
        tot = int(c.sum())
        if tot:
            owner = np.repeat(np.arange(start, stop), c)
            offs = np.arange(tot) - np.repeat(np.cumsum(c) - c, c)
            idx = np.repeat(i0[start:stop], c) + offs
            contrib = table.weights[idx] * values[idx] * weight_fn(owner, table.nodes[idx])
            out[start:stop] = np.bincount(owner - start, weights=contrib.real, minlength=stop - start) + 1j * np.bincount(
                owner - start, weights=contrib.imag, minlength=stop - start)
        start = stop
    return out


def real_factor_batch(f: RealFactor, table: KernelTable, y):
    """w~ for a real-place factor at many nonzero real y, via the kernel table."""
    y = np.asarray(y, dtype=float)
    ay = np.abs(y)
    out = np.zeros(y.shape, dtype=complex)
    for b in f.components:
        lo = ay * (b.center - b.radius)
        hi = ay * (b.center + b.radius)
        table.ensure(float(lo.min()), float(hi.max()))
        for sgn_y in (1, -1):
            sel = np.nonzero(np.sign(y) == sgn_y)[0]
            if not sel.size:
                continue
            vals = table.pos if b.sign * sgn_y > 0 else table.neg
            ays = ay[sel]

            def wfn(owner, t, ays=ays, b=b, sel0=sel):
                yy = ays[owner]
                return b.amplitude * bump((t / yy - b.center) / b.radius) / yy

            # owner indices are positions within sel
            out[sel] += _windowed_sums(table, vals, lo[sel], hi[sel], wfn)
    return out


def complex_factor_batch(f: ComplexFactor, table: KernelTable, y):
    """w~ for a complex-place factor at many nonzero complex y, via the A_k table."""
    y = np.asarray(y, dtype=complex)
    ay = np.abs(y)
    lo = ay * (f.center - f.radius)
    hi = ay * (f.center + f.radius)
    table.ensure(float(lo.min()), float(hi.max()))

    def wfn(owner, t):
        yy = ay[owner]
        return f.radial(t / yy) * 2 * t / (yy * yy)

    out = _windowed_sums(table, table.pos, lo, hi, wfn)
    if f.k:
        out *= np.exp(-1j * f.k * np.angle(y))
    return out


_CHEB_POINTS = 16
_CHEB_X = np.cos(np.pi * np.arange(_CHEB_POINTS) / (_CHEB_POINTS - 1))[::-1]
_CHEB_W = np.array([(-1.0) ** j * (0.5 if j in (0, _CHEB_POINTS - 1) else 1.0) for j in range(_CHEB_POINTS)])


class PanelInterpolant:
    """Piecewise Chebyshev interpolant of a transform factor g(r), r > 0.

    Panel widths min(h_rel * r, phase * sqrt(r) / (2 pi c sqrt(xmax))) keep the
    phase 4 pi c sqrt(xmax r) advance per panel below `phase`.
    """

    def __init__(self, fn, c, xmax, phase=np.pi / 2, h_rel=0.05):
        self.fn = fn
        self.c = c
        self.xmax = xmax
        self.phase = phase
        self.h_rel = h_rel
        self.edges = np.zeros(0)
        self.vals = np.zeros((0, _CHEB_POINTS), dtype=complex)

    def _width(self, r):
        return min(self.h_rel * r, self.phase * math.sqrt(r) / (2 * np.pi * self.c * math.sqrt(self.xmax)))

    def _fill(self, edges):
        a, b = edges[:-1], edges[1:]
        x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * _CHEB_X[None, :]
        return self.fn(x.ravel()).reshape(x.shape)

    def ensure(self, lo, hi):
        if not self.edges.size:
            edges = [lo]
            while edges[-1] < hi:
                edges.append(edges[-1] + self._width(edges[-1]))
            edges = np.array(edges)
            self.edges, self.vals = edges, self._fill(edges)
            return
        if hi > self.edges[-1]:
            edges = [self.edges[-1]]
            while edges[-1] < hi:
                edges.append(edges[-1] + self._width(edges[-1]))
            edges = np.array(edges)
            self.vals = np.concatenate([self.vals, self._fill(edges)])
            self.edges = np.concatenate([self.edges, edges[1:]])
        if lo < self.edges[0]:
            edges = [self.edges[0]]
            while edges[-1] > lo:
                edges.append(edges[-1] / (1 + self.h_rel))
            edges = np.array(edges[::-1])
            self.vals = np.concatenate([self._fill(edges), self.vals])
            self.edges = np.concatenate([edges[:-1], self.edges])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        self.ensure(float(r.min()), float(r.max()))
        idx = np.clip(np.searchsorted(self.edges, r, side="right") - 1, 0, self.edges.size - 2)
        a, b = self.edges[idx], self.edges[idx + 1]
        t = (2 * r - a - b) / (b - a)
        diff = t[:, None] - _CHEB_X[None, :]
        hit = diff == 0
        diff[hit] = 1.0
        q = _CHEB_W[None, :] / diff
        out = np.sum(q * self.vals[idx], axis=1) / np.sum(q, axis=1)
        rows, cols = np.nonzero(hit)
        out[rows] = self.vals[idx[rows], cols]
        return out


class TransformEngine:
    """Batched w~_s(y) for one weight and one s, with per-place kernel tables."""

    def __init__(self, w: WeightSpec, s, h_rel=0.04, phase_cap=8 * np.pi, order=32):
        self.w = w
        self.s = complex(s)
        self.tables = []
        for f in w.factors:
            k = f.k if f.kind == "complex" else 0
            self.tables.append(KernelTable(f.kind, self.s, k, h_rel=h_rel, phase_cap=phase_cap, order=order))
        self.interps = {}

    def factor_values(self, i, yv):
        f = self.w.factors[i]
        yv = np.asarray(yv)
        if np.any(yv == 0):
            raise ZeroInput("Hankel transform needs nonzero coordinates")
        if f.kind == "real":
            return real_factor_batch(f, self.tables[i], np.real(yv))
        return complex_factor_batch(f, self.tables[i], yv)

    def _interpolant(self, i, sign):
        key = (i, sign)
        if key not in self.interps:
            f = self.w.factors[i]
            if f.kind == "real":
                fn = lambda r, i=i, sign=sign: self.factor_values(i, sign * r)
                self.interps[key] = PanelInterpolant(fn, 1.0, f.rmax)
            else:
                # radial part: the angular factor e^{-ik arg y} is applied afterwards
                fn = lambda r, i=i: self.factor_values(i, r.astype(complex))
                self.interps[key] = PanelInterpolant(fn, 2.0, f.rmax)
        return self.interps[key]

    def factor_values_interp(self, i, yv):
        """Like factor_values, through piecewise Chebyshev interpolation in |y|."""
        f = self.w.factors[i]
        yv = np.asarray(yv)
        if np.any(yv == 0):
            raise ZeroInput("Hankel transform needs nonzero coordinates")
        out = np.empty(yv.shape, dtype=complex)
        if f.kind == "real":
            y = np.real(yv)
            for sign in (1, -1):
                sel = np.sign(y) == sign
                if np.any(sel):
                    out[sel] = self._interpolant(i, sign)(np.abs(y[sel]))
            return out
        out = self._interpolant(i, 1)(np.abs(yv))
        if f.k:
            out = out * np.exp(-1j * f.k * np.angle(yv))
        return out

    def values(self, ys, interpolate=False):
        """ys: array of shape (k, places) (or (k,) for one place)."""
        ys = np.asarray(ys)
        if ys.ndim == 1:
            ys = ys[:, None]
        fv = self.factor_values_interp if interpolate else self.factor_values
        out = np.ones(ys.shape[0], dtype=complex)
        for i in range(ys.shape[1]):
            out *= fv(i, ys[:, i])
        return out

    def envelope(self, i, ymax, per_decade=48, ymin=None, sign=None):
        """Non-increasing upper envelope of |w~| for factor i on a log grid up to ymax.

        For a real factor, sign = +1 or -1 restricts to y of that sign; None covers both.
        """
        f = self.w.factors[i]
        ymin = ymin or 1e-3
        grid = np.geomspace(ymin, ymax, max(int(per_decade * math.log10(ymax / ymin)), 8))
        if f.kind == "real":
            if sign is None:
                vals = np.maximum(np.abs(self.factor_values(i, grid)), np.abs(self.factor_values(i, -grid)))
            else:
                vals = np.abs(self.factor_values(i, sign * grid))
        else:
            vals = np.abs(self.factor_values(i, grid.astype(complex)))
        env = np.maximum.accumulate(vals[::-1])[::-1]
        return Envelope(grid, 4.0 * env)


@dataclass
class Envelope:
    """Upper bound for |w~| as a non-increasing step function of |y|."""

    grid: np.ndarray
    bound: np.ndarray

    def __call__(self, y):
        y = np.abs(np.asarray(y))
        idx = np.searchsorted(self.grid, y, side="right") - 1
        below = idx < 0
        idx = np.clip(idx, 0, self.grid.size - 1)
        out = self.bound[idx].copy()
        # below the grid, fall back to the largest recorded value times a log allowance
        out[below] = self.bound[0] * (1 + np.log(self.grid[0] / np.maximum(y[below], 1e-300)))
        beyond = y > self.grid[-1]
        out[beyond] = np.inf
        return out

    def reach(self, level):
        """Smallest grid |y| beyond which the bound stays below level (inf if never)."""
        ok = self.bound <= level
        if not ok[-1]:
            return math.inf
        bad = np.nonzero(~ok)[0]
        return float(self.grid[bad[-1] + 1]) if bad.size else float(self.grid[0])


# ---------------------------------------------------------------------------
# decay profile


def decay_profile(w: WeightSpec, s, direction, t_lo=4.0, t_hi=64.0, points=33):
    """Fit |w~_s(t * direction)| <= C t^{-A} on a geometric grid in [t_lo, t_hi].

    The fit uses the running maximum from the right (so oscillation zeros do not
    bias it); C is lifted so the bound holds on the grid, then multiplied by 4.
    """
    direction = np.asarray(direction)
    ts = np.geomspace(t_lo, t_hi, points)
    eng = TransformEngine(w, s)
    ys = ts[:, None] * direction[None, :]
    vals = np.abs(eng.values(ys))
    env = np.maximum.accumulate(vals[::-1])[::-1]
    env = np.maximum(env, 1e-300)
    slope, icpt = np.polyfit(np.log(ts), np.log(env), 1)
    A = -slope
    lift = np.max(np.log(env) - (icpt + slope * np.log(ts)))
    C = 4.0 * math.exp(icpt + lift)
    return C, A


# ---------------------------------------------------------------------------
# double transform (real place)


def _gl_grid(edges):
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wt = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, wt


def double_transform(w: WeightSpec, s, x0, R=4000.0, y_min=None):
    """int w~_s(y) B_s(x0 y) dy over y_min <= |y| <= R for a one-place real weight.

    The Hankel transform on a real place is an involution, so this returns w(x0)
    up to truncation.  x0 may be an array; w~ is computed once for all of them.
    Near 0 the integrand grows like |y|^{-2 |Re s|}, so the default y_min keeps
    the dropped piece y_min^{1 - 2 |Re s|} below 1e-8.
    """
    if w.places() != ("real",):
        raise ConfigError("double transform is implemented for a single real place")
    sigma = abs(complex(s).real)
    if sigma >= 0.5:
        raise DomainError("double transform needs |Re s| < 1/2")
    if y_min is None:
        y_min = min(1e-10, 10.0 ** (-8.0 / (1.0 - 2.0 * sigma)))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if np.any(x0 == 0):
        raise ZeroInput("x0 must be nonzero")
    f = w.factors[0]
    eng = TransformEngine(w, s)
    # joint phase 4 pi sqrt(y) (sqrt|x0| + sqrt(rmax)); at most pi per panel
    freq = math.sqrt(float(np.max(np.abs(x0)))) + math.sqrt(f.rmax)
    edges = list(np.geomspace(y_min, 1.0, int(4 * math.log10(1.0 / y_min)) + 2))
    y = 1.0
    while y < R:
        y = min(R, y + min(0.25 * y, math.sqrt(y) / (2 * freq)))
        edges.append(y)
    ys, wts = _gl_grid(np.array(edges))
    total = np.zeros(x0.shape, dtype=complex)
    for sgn in (1.0, -1.0):
        tw = wts * eng.values(sgn * ys)
        for j, x in enumerate(x0):
            kv, _, _ = kernel_real_values(s, sgn * ys * x)
            total[j] += complex(np.sum(tw * kv))
    return total
