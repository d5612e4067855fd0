"""Both sides of the divisor-function summation identity, and verification reports.

Left side:   N(a)^{-1/2} sum_{g in (aD)^{-1}, g != 0} psi_inf(g zeta) tau_s(g a D) w(g).
Right side:  sum_{+-} (N(D)/N(b))^{1/2 +- s} zeta_F(1 +- 2s) w~_{+-s}(0)
             + N(b)^{-1/2} sum_{g in (bD)^{-1}, g != 0} psi_S(g/zeta) tau_s(g b D) w~_s(g).

The left sum is finite.  The dual sum is truncated at ||g|| <= R with R doubled
from 4 until both the last shell and an envelope-based estimate of the next one
fall below tol * scale / 10.  Points whose envelope bound is negligible are
skipped without evaluating their transform; their total bound is reported.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import dataclasses
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import numberfield as nf
from .errors import (ConfigError, EnumerationCapExceeded, NonIntegralIdeal, PoleError,
                     TruncationBudgetExceeded)
from .hankel import TransformEngine, WeightSpec, check_weight, mellin, mellin_log
from .specfun import SpectralParameter
from .zeta import dedekind_zeta, laurent_at_1

S_SWITCH = 1e-3
R0 = 4.0
MIN_RADIUS = 16.0
# a point is skipped when its envelope bound times the divisor-size heuristic
# is below KEEP_FRACTION * tol * scale
KEEP_FRACTION = 1e-6


@dataclass
class ProblemInstance:
    F: nf.FieldDescriptor
    a_ideal: nf.FractionalIdeal
    zeta_shift: nf.FieldElement
    s: complex
    w: WeightSpec
    tol: float = 1e-6
    max_radius: float = 1e5
    reproducible: bool = True

    def __post_init__(self):
        self.s = SpectralParameter(complex(self.s)).s
        if not (1e-10 <= self.tol <= 1e-2):
            raise ConfigError("tol must lie in [1e-10, 1e-2]")
        if not self.max_radius > 0:
            raise ConfigError("max_radius must be positive")
        check_weight(self.w, self.F.places)
        self.zeta_shift = nf.parse_element(self.F, self.zeta_shift)
        self.a_ideal = nf.parse_ideal(self.F, self.a_ideal)


@dataclass
class VerificationReport:
    lhs: complex
    rhs_zeroth: complex
    rhs_dual: complex
    rhs: complex
    abs_err: float
    rel_err: float
    lhs_terms: int
    dual_terms: int
    radius_used: float
    regime: str
    timings: dict
    field: str = ""
    ideal: str = ""
    zeta: str = ""
    s: complex = 0j
    tol: float = 0.0
    b_norm: str = ""
    S: list = dataclasses.field(default_factory=list)
    extended: bool = False
    tail_bound: float = 0.0
    skipped_bound: float = 0.0
    dual_abs_sum: float = 0.0
    shells: list = dataclasses.field(default_factory=list)
    psi_sample: dict = dataclasses.field(default_factory=dict)
    status: str = "ok"
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "ok" and self.rel_err <= self.tol

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = [v.real, v.imag] if isinstance(v, complex) else v
        out["passed"] = self.passed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    CSV_FIELDS = ("field", "ideal", "zeta", "s_re", "s_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                  "abs_err", "rel_err", "lhs_terms", "dual_terms", "radius_used", "regime", "status")

    def csv_row(self) -> dict:
        return {
            "field": self.field, "ideal": self.ideal, "zeta": self.zeta,
            "s_re": repr(self.s.real), "s_im": repr(self.s.imag),
            "lhs_re": repr(self.lhs.real), "lhs_im": repr(self.lhs.imag),
            "rhs_re": repr(self.rhs.real), "rhs_im": repr(self.rhs.imag),
            "abs_err": repr(self.abs_err), "rel_err": repr(self.rel_err),
            "lhs_terms": self.lhs_terms, "dual_terms": self.dual_terms,
            "radius_used": repr(self.radius_used), "regime": self.regime, "status": self.status,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        wr.writeheader()
        wr.writerow(self.csv_row())
        return buf.getvalue()


# ---------------------------------------------------------------------------
# divisor function on a lattice


class TauEvaluator:
    """tau_s(g J) for g in J^{-1}, from the integer coordinates of g.

    With J^{-1} = q (Z a + Z (b + w)), the point m e1 + n e2 equals q (A + B w)
    where A = m a + n b, B = n, so g J = (A + B w) * (q J) and the valuations
    of the fixed ideal q J are added to those of A + B w.
    """

    def __init__(self, F, J, s):
        self.F = F
        self.s = complex(s)
        self.L = nf.inverse(J)
        q = self.L.scale
        if F.is_rational:
            self.base = q * J.scale
            self.base_exps = {}
        else:
            K = nf.scale_ideal(J, F.element(q))
            self.base_exps = {P: k for P, k in nf.factor_ideal(F, K)}
        self._cache = {}

    def _prime_power(self, nP, k):
        key = (nP, k)
        v = self._cache.get(key)
        if v is None:
            v = nf._tau_prime_power(nP, k, self.s)
            self._cache[key] = v
        return v

    def exponents(self, m, n):
        F = self.F
        if F.is_rational:
            x = abs(int(m)) * self.base
            if x.denominator != 1:
                raise NonIntegralIdeal("g J is not integral")
            return [(p, k) for p, k in nf.factor_int(int(x))]
        L = self.L
        A = int(m) * L.a + int(n) * L.b
        B = int(n)
        nrm = abs(A * A + A * B * F.t + B * B * F.n)
        primes = {p for p, _ in nf.factor_int(nrm)} | {P.p for P in self.base_exps}
        g = math.gcd(A, B)
        out = []
        for p in sorted(primes):
            mp = nf._vp(g, p)
            Ap, Bp = A // p**mp, B // p**mp
            for P in nf.primes_above(F, p):
                k = P.e * mp + nf._ord_integral_primitive(F, Ap, Bp, P) + self.base_exps.get(P, 0)
                if k < 0:
                    raise NonIntegralIdeal("g J is not integral")
                if k:
                    out.append((P.norm, k))
        return out

    def __call__(self, m, n=0):
        out = 1 + 0j
        for nP, k in self.exponents(m, n):
            out *= self._prime_power(nP, k)
        return out


# ---------------------------------------------------------------------------
# helpers


def _support_region(F, w):
    """Lattice-enumeration region covering supp(w)."""
    regs = []
    for f in w.factors:
        if f.kind == "real":
            ivs = []
            for b in f.components:
                lo, hi = b.center - b.radius, b.center + b.radius
                ivs.append((lo, hi) if b.sign > 0 else (-hi, -lo))
            regs.append(ivs)
        else:
            regs.append((f.center - f.radius, f.center + f.radius))
    if F.is_rational:
        return regs[0]
    if F.d > 0:
        return (regs[0], regs[1])
    return regs[0]


def _weight_values(w, pts):
    pts = np.asarray(pts)
    if pts.ndim == 1:
        pts = pts[:, None]
    out = np.ones(pts.shape[0], dtype=complex)
    for i, f in enumerate(w.factors):
        col = pts[:, i]
        out *= f(col.real if f.kind == "real" else col)
    return out


def _fsum_complex(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _ordered(m, n, pts):
    order = np.lexsort((m, n))
    return m[order], n[order], pts[order]


def _tau_hat(norms, sigma):
    """Heuristic size of |tau_s| for ideals of the given norms (log average times N^|sigma|)."""
    norms = np.maximum(np.asarray(norms, dtype=float), 1.0)
    return 2.0 * (1.0 + np.log1p(norms)) * norms ** abs(sigma)


def _covolume(F, I) -> float:
    if F.is_rational:
        return float(I.scale)
    return abs(float(np.linalg.det(nf.basis_embedding(F, I))))


def _norms_of(F, pts):
    pts = np.asarray(pts)
    if F.is_rational:
        return np.abs(pts.real)
    if F.d > 0:
        return np.abs(pts[:, 0] * pts[:, 1])
    return np.abs(pts) ** 2


# ---------------------------------------------------------------------------
# left side


def lhs_sum(P: ProblemInstance):
    """(value, term count, abs sum) of the finite left-hand sum."""
    F = P.F
    J = nf.mul(P.a_ideal, nf.different(F))
    tau = TauEvaluator(F, J, P.s)
    L = tau.L
    m, n, pts = nf.lattice_coords(F, L, _support_region(F, P.w))
    m, n, pts = _ordered(m, n, pts)
    wv = _weight_values(P.w, pts)
    keep = wv != 0
    m, n, wv = m[keep], n[keep], wv[keep]
    zeta = P.zeta_shift
    terms = []
    for mi, ni, wi in zip(m, n, wv):
        t = tau(mi, ni) * wi
        if not zeta.is_zero():
            g = nf.coords_to_element(F, L, mi, ni)
            t *= nf.psi_infty(F, g * zeta)
        terms.append(t)
    scale = 1.0 / math.sqrt(float(P.a_ideal.norm()))
    value = _fsum_complex(terms) * scale
    abs_sum = math.fsum(abs(t) for t in terms) * scale
    return value, len(terms), abs_sum


# ---------------------------------------------------------------------------
# zeroth terms


def _norm_ratio(F, dual) -> float:
    """N(D)/N(b)."""
    return float(Fraction(abs(F.disc) if not F.is_rational else 1) / dual.b_ideal.norm())


def zeroth_direct(F, w, s, X) -> complex:
    """sum_{+-} X^{1/2 +- s} zeta_F(1 +- 2s) w~_{+-s}(0)."""
    s = complex(s)
    total = 0j
    for sg in (1, -1):
        ss = sg * s
        total += X ** (0.5 + ss) * dedekind_zeta(F, 1 + 2 * ss) * mellin(w, ss).value
    return total


def zeroth_limit(F, w, X) -> complex:
    """Value at s = 0: sqrt(X) [c_{-1} (w~'_0(0) + log X w~_0(0)) + 2 c_0 w~_0(0)]."""
    lau = laurent_at_1(F)
    m0 = mellin(w, 0.0).value
    m1 = mellin_log(w).value
    return math.sqrt(X) * (lau.residue * (m1 + math.log(X) * m0) + 2 * lau.constant * m0)


def zeroth_near_zero(F, w, s, X, s_switch=S_SWITCH) -> complex:
    """Even-in-s interpolation Z(0) + c s^2 with c from a direct evaluation at 2 s_switch."""
    s = complex(s)
    z0 = zeroth_limit(F, w, X)
    if s == 0:
        return z0
    s2 = 2 * s_switch * s / abs(s)
    c = (zeroth_direct(F, w, s2, X) - z0) / (s2 * s2)
    return z0 + c * s * s


def zeroth_terms(P: ProblemInstance, dual, s_switch=S_SWITCH):
    """(value, regime) of the zeroth group of the right side."""
    if s_switch <= 0:
        raise PoleError("s_switch must be positive")
    X = _norm_ratio(P.F, dual)
    if abs(P.s) >= s_switch:
        return zeroth_direct(P.F, P.w, P.s, X), "generic_s"
    return zeroth_near_zero(P.F, P.w, P.s, X, s_switch), "s_near_zero_limit"


# ---------------------------------------------------------------------------
# dual sum


@dataclass
class DualSumResult:
    value: complex
    terms: int
    radius: float
    abs_sum: float
    tail_bound: float
    skipped_bound: float
    shells: list


class _Envelopes:
    """Per-place envelopes of |w~|, recomputed on a larger range when needed."""

    def __init__(self, F, engine, ymin):
        self.F = F
        self.engine = engine
        self.ymin = ymin
        self.ymax = 0.0
        self.env = None

    def ensure(self, ymax):
        if ymax <= self.ymax:
            return
        ymax = max(ymax, 4 * self.ymax)
        eng = self.engine
        if self.F.is_rational:
            self.env = [eng.envelope(0, ymax, ymin=self.ymin, sign=1), eng.envelope(0, ymax, ymin=self.ymin, sign=-1)]
        else:
            self.env = [eng.envelope(i, ymax, ymin=self.ymin) for i in range(len(eng.w.factors))]
        self.ymax = ymax

    def bound(self, pts):
        pts = np.asarray(pts)
        if self.F.is_rational:
            y = pts.real
            return np.where(y > 0, self.env[0](y), self.env[1](y))
        if pts.ndim == 1:
            return self.env[0](pts)
        out = np.ones(pts.shape[0])
        for i in range(pts.shape[1]):
            out *= self.env[i](pts[:, i])
        return out

    def at(self, i, y):
        return float(self.env[i](np.array([y]))[0])

    def integral(self, i, upto):
        g = self.env[i].grid
        b = self.env[i].bound
        sel = g <= upto
        return float(np.trapezoid(b[sel], g[sel])) + float(b[0] * g[0])


def _shell_points(F, L, Rp, R, envs, level):
    """Lattice points of L with Rp < ||y||_max <= R (per-place absolute value)."""
    if F.is_rational:
        ivs = [(-R, -Rp), (Rp, R)] if Rp > 0 else [(-R, R)]
        m, n, pts = nf.lattice_coords(F, L, ivs)
        keep = np.abs(pts) > Rp
        return m[keep], n[keep], pts[keep]
    if F.d < 0:
        m, n, pts = nf.lattice_coords(F, L, (Rp, R))
        keep = np.abs(pts) > Rp
        return m[keep], n[keep], pts[keep]
    # real quadratic: a band where one place is large, the other capped where the
    # envelope product can still exceed level
    parts = []
    for i in (0, 1) if Rp > 0 else (0,):
        j = 1 - i
        cap = R if i == 0 else Rp
        if Rp > 0:
            cap = min(cap, envs.env[j].reach(level / envs.at(i, Rp)))
        for band in ([(Rp, R)], [(-R, -Rp)]):
            reg = [None, None]
            reg[i] = band
            reg[j] = [(-cap, cap)]
            m, n, pts = nf.lattice_coords(F, L, (reg[0], reg[1]))
            a = np.abs(pts)
            keep = (a[:, i] > Rp) & (a[:, i] <= R) & (a[:, j] <= cap)
            parts.append((m[keep], n[keep], pts[keep]))
    m = np.concatenate([p[0] for p in parts])
    n = np.concatenate([p[1] for p in parts])
    pts = np.concatenate([p[2] for p in parts])
    return m, n, pts


def _next_shell_estimate(F, envs, R, covol, tau_R):
    """Envelope bound times expected point count for the shell (R, 2R]."""
    if F.is_rational:
        return tau_R * (envs.at(0, R) + envs.at(1, R)) * R / covol
    if F.d < 0:
        return tau_R * envs.at(0, R) * math.pi * 3 * R * R / covol
    i1 = envs.integral(0, 2 * R)
    i2 = envs.integral(1, 2 * R)
    return tau_R * 2 * R * (envs.at(0, R) * 2 * i2 + envs.at(1, R) * 2 * i1) / covol


def dual_sum(P: ProblemInstance, dual, scale=1.0, engine=None) -> DualSumResult:
    """Truncated dual sum; raises TruncationBudgetExceeded past max_radius."""
    F = P.F
    J = nf.mul(dual.b_ideal, nf.different(F))
    tau = TauEvaluator(F, J, P.s)
    L = tau.L
    NJ = float(J.norm())
    covol = _covolume(F, L)
    engine = engine or TransformEngine(P.w, P.s)
    sigma = P.s.real
    budget = P.tol * abs(scale)
    level_pt = KEEP_FRACTION * budget
    ymin = 1e-6 if (not F.is_rational and F.d > 0) else min(1e-3, 0.5 * covol)
    envs = _Envelopes(F, engine, ymin)
    zeta = P.zeta_shift
    S = dual.S
    norm_b = math.sqrt(float(dual.b_ideal.norm()))

    terms_all = []
    shells = []
    total_terms = 0
    skipped = 0.0
    Rp, R = 0.0, R0
    prev_small = False
    prev_abs = 0.0
    while True:
        if R > P.max_radius:
            partial = _fsum_complex(terms_all) / norm_b
            tail = shells[-1]["next_estimate"] if shells else math.inf
            raise TruncationBudgetExceeded(
                f"dual sum not converged at radius {Rp:g} (max_radius {P.max_radius:g})",
                partial=DualSumResult(partial, total_terms, Rp, math.fsum(abs(t) for t in terms_all) / norm_b,
                                      tail, skipped, shells),
                bound=tail)
        envs.ensure(4 * R)
        tau_R = float(_tau_hat(R ** (2 if (not F.is_rational and F.d < 0) else 1) * NJ, sigma))
        level_env = level_pt / tau_R
        m, n, pts = _shell_points(F, L, Rp, R, envs, level_env)
        m, n, pts = _ordered(m, n, pts)
        bnd = envs.bound(pts) * _tau_hat(_norms_of(F, pts) * NJ, sigma) if len(m) else np.zeros(0)
        keep = bnd >= level_pt
        skipped += float(np.sum(bnd[~keep]))
        m, n, pts = m[keep], n[keep], pts[keep]
        shell_terms = []
        if len(m):
            wt = engine.values(pts if pts.ndim > 1 else pts[:, None], interpolate=True)
            if S and F.is_rational:
                wt = wt * nf.psi_S_multiples(F, L.scale / zeta.a, m, S)
            for mi, ni, wi in zip(m, n, wt):
                t = tau(mi, ni) * wi
                if S and not F.is_rational:
                    g = nf.coords_to_element(F, L, mi, ni)
                    t *= nf.psi_S(F, g / zeta, S)
                shell_terms.append(t)
        terms_all.extend(shell_terms)
        total_terms += len(shell_terms)
        ssum = _fsum_complex(shell_terms) / norm_b
        sabs = math.fsum(abs(t) for t in shell_terms) / norm_b
        env_next = _next_shell_estimate(F, envs, R, covol, tau_R) / norm_b
        # observed decay of the shell abs-sums predicts the next shell
        ratio = min(1.0, sabs / prev_abs) if prev_abs > 0 else 1.0
        nxt = min(env_next, sabs * ratio)
        shells.append({"radius": R, "terms": len(shell_terms), "sum": [ssum.real, ssum.imag],
                       "abs_sum": sabs, "next_estimate": nxt, "envelope_estimate": env_next})
        small = sabs <= budget / 10 and nxt <= budget / 10
        if R >= MIN_RADIUS and small and prev_small:
            break
        prev_small = sabs <= budget
        prev_abs = sabs
        Rp, R = R, 2 * R
    value = _fsum_complex(terms_all) / norm_b
    abs_sum = math.fsum(abs(t) for t in terms_all) / norm_b
    return DualSumResult(value, total_terms, R, abs_sum, shells[-1]["envelope_estimate"], skipped / norm_b, shells)


# ---------------------------------------------------------------------------
# verification


def _psi_sample(P, dual):
    """psi_S(g / zeta) at the first positive basis element g of (bD)^{-1}."""
    F = P.F
    if not dual.S:
        return {}
    L = nf.inverse(nf.mul(dual.b_ideal, nf.different(F)))
    g = L.basis()[0]
    x = g / P.zeta_shift
    phase = nf.psi_S_phase(F, x, dual.S)
    v = nf.psi_S(F, x, dual.S)
    return {"gamma": str(g), "phase": str(phase), "value": [v.real, v.imag]}


def verify(P: ProblemInstance, engine=None) -> VerificationReport:
    """Compute both sides and return a report; a truncation failure gives a partial report."""
    F = P.F
    timings = {}
    t0 = time.perf_counter()
    dual = nf.dual_data(F, P.zeta_shift, P.a_ideal)
    timings["dual_data"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lhs, lhs_terms, lhs_abs = lhs_sum(P)
    timings["lhs"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    zeroth, regime = zeroth_terms(P, dual)
    timings["zeroth"] = time.perf_counter() - t0

    scale = max(abs(lhs), lhs_abs, abs(zeroth), 1e-300)
    status, message = "ok", ""
    t0 = time.perf_counter()
    try:
        ds = dual_sum(P, dual, scale=scale, engine=engine)
    except TruncationBudgetExceeded as exc:
        ds = exc.partial
        status, message = "budget_exceeded", str(exc)
    timings["dual"] = time.perf_counter() - t0

    rhs = zeroth + ds.value
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / max(abs(lhs), abs(rhs), 1e-300)
    unit = nf.unit_ideal(F)
    extended = (not P.zeta_shift.is_zero()) and not nf.equals(P.a_ideal, unit)
    return VerificationReport(
        lhs=complex(lhs), rhs_zeroth=complex(zeroth), rhs_dual=complex(ds.value), rhs=complex(rhs),
        abs_err=abs_err, rel_err=rel_err, lhs_terms=lhs_terms, dual_terms=ds.terms,
        radius_used=ds.radius, regime=regime, timings=timings,
        field=F.label(), ideal=str(P.a_ideal), zeta=str(P.zeta_shift), s=complex(P.s), tol=P.tol,
        b_norm=str(dual.b_ideal.norm()), S=[Q.label() for Q in dual.S], extended=extended,
        tail_bound=ds.tail_bound, skipped_bound=ds.skipped_bound, dual_abs_sum=ds.abs_sum,
        shells=ds.shells, psi_sample=_psi_sample(P, dual), status=status, message=message,
    )


# ---------------------------------------------------------------------------
# divisor averages


def divisor_average_check(F, a_ideal, s, V_grid, S_places=(), c=0.5, d=2.0, eps=0.1,
                          outer=64.0, cap=2_000_000):
    """Brute-force sums of |tau_s(g a)| / (|N g|^c ||g||_S^{d-c+sigma}) over g in a^{-1}
    with |g_v| <= V (v outside S) and V < |g_v| <= outer * V (v in S), divided by
    N(a)^{1+sigma+eps} N(V)^{1-c+sigma+eps} / ||V||_S^{d-c+sigma}.
    """
    a_ideal = nf.parse_ideal(F, a_ideal)
    s = complex(s)
    sigma = s.real
    if not (0 <= c - sigma < 1 < d):
        raise ConfigError("need 0 <= c - sigma < 1 < d")
    places = F.places
    S_places = tuple(S_places)
    deg = [1 if p == "real" else 2 for p in places]
    tau = TauEvaluator(F, a_ideal, s)
    L = tau.L
    na = float(a_ideal.norm())
    rows = []
    for V in V_grid:
        Vs = tuple(V) if isinstance(V, (tuple, list)) else (float(V),) * len(places)
        if any(v < 1 for v in Vs):
            raise ConfigError("V components must be >= 1")
        regs = []
        for i, p in enumerate(places):
            lo, hi = (Vs[i], outer * Vs[i]) if i in S_places else (0.0, Vs[i])
            if p == "real":
                regs.append([(-hi, -lo), (lo, hi)] if lo > 0 else [(-hi, hi)])
            else:
                regs.append((lo, hi))
        region = regs[0] if len(places) == 1 else (regs[0], regs[1])
        m, n, pts = nf.lattice_coords(F, L, region)
        if F.is_rational or F.d < 0:
            pts = pts.reshape(-1, 1)
        a = np.abs(pts)
        keep = np.ones(len(m), dtype=bool)
        for i in range(len(places)):
            if i in S_places:
                keep &= a[:, i] > Vs[i]
        m, n, pts = _ordered(m[keep], n[keep], pts[keep])
        if len(m) > cap:
            raise EnumerationCapExceeded(f"{len(m)} lattice points exceed the cap {cap}")
        a = np.abs(pts)
        normg = np.prod(a ** np.array(deg), axis=1)
        normS = np.prod([a[:, i] ** deg[i] for i in S_places], axis=0) if S_places else np.ones(len(m))
        vals = [abs(tau(mi, ni)) for mi, ni in zip(m, n)]
        total = math.fsum(v / (ng**c * ns ** (d - c + sigma)) for v, ng, ns in zip(vals, normg, normS))
        NV = math.prod(v**k for v, k in zip(Vs, deg))
        VS = math.prod(Vs[i] ** deg[i] for i in S_places) if S_places else 1.0
        shape = na ** (1 + sigma + eps) * NV ** (1 - c + sigma + eps) / VS ** (d - c + sigma)
        rows.append({"V": Vs, "count": len(m), "sum": total, "bound_shape": shape, "ratio": total / shape})
    return rows
