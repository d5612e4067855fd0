"""Command-line front end: `vnf verify`, `vnf eval <subject>`, `vnf selftest`.

Exit codes for verify: 0 identity holds within tol, 1 it does not,
2 bad configuration, 3 numerical budget exceeded (partial report written).
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import random
import sys
import time
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np
from referencing import Registry, Resource

from . import numberfield as nf
from . import specfun, zeta
from .errors import BudgetExceeded, ConfigError, VnfError
from .hankel import ComplexFactor, WeightSpec, hankel_transform, mellin, real_bump
from .summation import ProblemInstance, verify

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

SCHEMA_FILES = ("run_config.json", "weight_spec.json", "verification_report.json")


# ---------------------------------------------------------------------------
# schemas


def load_schema(name: str) -> dict:
    return json.loads(resources.files("vnf").joinpath("schemas", name).read_text())


def _registry():
    reg = Registry()
    for name in SCHEMA_FILES:
        reg = reg.with_resource(name, Resource.from_contents(load_schema(name)))
    return reg


def validate(instance, schema_name: str):
    """Raise ConfigError if instance does not match the named schema."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name), registry=_registry())
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.path) or "<root>"
        raise ConfigError(f"{schema_name}: {where}: {e.message}")


# ---------------------------------------------------------------------------
# run configuration


def default_weight(F) -> WeightSpec:
    """Bump weights used when a config names none: support [1, 4] on Q, [1, 19] per place otherwise."""
    if F.is_rational:
        return WeightSpec((real_bump(2.5, 1.5),))
    if F.d < 0:
        return WeightSpec((ComplexFactor(10.0, 9.0),))
    return WeightSpec((real_bump(10.0, 9.0), real_bump(10.0, 9.0)))


@dataclasses.dataclass
class RunConfig:
    field: str = "Q"
    ideal: str = "(1)"
    zeta: str = "0"
    s_re: float = 0.0
    s_im: float = 0.0
    weight: dict = None
    tol: float = 1e-6
    max_radius: float = 1e5
    reproducible: bool = True
    format: str = "json"
    out: str = None

    def to_dict(self) -> dict:
        d = {
            "field": self.field, "ideal": self.ideal, "zeta": self.zeta,
            "s": {"re": self.s_re, "im": self.s_im},
            "tol": self.tol, "max_radius": self.max_radius,
            "reproducible": self.reproducible, "format": self.format, "out": self.out,
        }
        if self.weight is not None:
            d["weight"] = self.weight
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        validate(data, "run_config.json")
        s = data.get("s", {})
        return cls(
            field=data["field"], ideal=data.get("ideal", "(1)"), zeta=data.get("zeta", "0"),
            s_re=float(s.get("re", 0.0)), s_im=float(s.get("im", 0.0)),
            weight=data.get("weight"), tol=float(data.get("tol", 1e-6)),
            max_radius=float(data.get("max_radius", 1e5)),
            reproducible=bool(data.get("reproducible", True)),
            format=data.get("format", "json"), out=data.get("out"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @property
    def s(self) -> complex:
        return complex(self.s_re, self.s_im)

    def problem(self) -> ProblemInstance:
        F = nf.make_field(self.field)
        if self.weight is None:
            w = default_weight(F)
        else:
            validate(self.weight, "weight_spec.json")
            w = WeightSpec.from_dict(self.weight)
        return ProblemInstance(F, self.ideal, self.zeta, self.s, w, tol=self.tol,
                               max_radius=self.max_radius, reproducible=self.reproducible)


def bundled_config(name: str) -> RunConfig:
    text = resources.files("vnf").joinpath("configs", f"{name}.json").read_text()
    return RunConfig.from_json(text)


def worker_count() -> int:
    """VNF_THREADS, validated; the computation itself runs serially."""
    raw = os.environ.get("VNF_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"VNF_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"VNF_THREADS must be a positive integer, got {raw!r}")
    return n


def seed() -> int:
    raw = os.environ.get("VNF_SEED", "20240101")
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"VNF_SEED must be an integer, got {raw!r}") from exc


# ---------------------------------------------------------------------------
# formatting


def fmt(x) -> str:
    """15 significant digits; complex numbers as a+bj, real-valued ones without the j part."""
    if isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool):
        return str(x)
    x = complex(x)
    if x.imag == 0:
        return f"{x.real:.15g}"
    return f"{x.real:.15g}{x.imag:+.15g}j"


def report_text(rep) -> str:
    lines = [
        f"field      {rep.field}",
        f"ideal      {rep.ideal}",
        f"zeta       {rep.zeta}",
        f"s          {fmt(rep.s)}",
        f"N(b)       {rep.b_norm}",
        f"S          {', '.join(rep.S) if rep.S else '-'}",
        f"lhs        {fmt(rep.lhs)}",
        f"rhs zeroth {fmt(rep.rhs_zeroth)}",
        f"rhs dual   {fmt(rep.rhs_dual)}",
        f"rhs        {fmt(rep.rhs)}",
        f"rel_err    {rep.rel_err:.3e}  (tol {rep.tol:.1e})",
        f"terms      lhs {rep.lhs_terms}, dual {rep.dual_terms}, radius {fmt(rep.radius_used)}",
        f"regime     {rep.regime}",
        f"status     {rep.status}{': ' + rep.message if rep.message else ''}",
        f"result     {'PASS' if rep.passed else 'FAIL'}",
    ]
    return "\n".join(lines) + "\n"


def render_report(rep, form: str) -> str:
    if form == "json":
        return rep.to_json() + "\n"
    if form == "csv":
        return rep.to_csv()
    return report_text(rep)


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verify


def _merge_flags(cfg: RunConfig, args) -> RunConfig:
    for name in ("field", "ideal", "zeta", "s_re", "s_im", "tol", "max_radius", "format", "out"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if args.reproducible is not None:
        cfg.reproducible = args.reproducible
    if cfg.format not in ("json", "csv", "text"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    return cfg


def cmd_verify(args) -> int:
    try:
        worker_count()
        if args.config:
            try:
                with open(args.config) as fh:
                    cfg = RunConfig.from_json(fh.read())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
        else:
            cfg = RunConfig()
        cfg = _merge_flags(cfg, args)
        P = cfg.problem()
    except VnfError as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rep = verify(P)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except VnfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.reproducible:
        rep.timings = {}
    _emit(render_report(rep, cfg.format), cfg.out)
    if rep.status != "ok":
        print(f"budget exceeded: {rep.message}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# eval


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _grid(text: str):
    try:
        lo, hi, n = text.split(",")
        n = int(n)
        lo, hi = float(lo), float(hi)
    except ValueError as exc:
        raise ConfigError(f"grid must be lo,hi,n; got {text!r}") from exc
    if n < 1:
        raise ConfigError("grid needs at least one point")
    return np.linspace(lo, hi, n)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow(r)
    return buf.getvalue()


def _weight_from_args(args, F) -> WeightSpec:
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_json(fh.read())
        if cfg.weight is not None:
            validate(cfg.weight, "weight_spec.json")
            return WeightSpec.from_dict(cfg.weight)
    return default_weight(F)


def _eval_kernel(args) -> str:
    s = complex(args.s, args.s_im)
    place = args.place
    if args.grid:
        xs = _grid(args.grid)
        if place == "real":
            vals, _, _ = specfun.kernel_real_values(s, xs)
        else:
            vals, _, _ = specfun.kernel_complex_values(s, xs.astype(complex))
        return _csv(["x", "re", "im"], [[fmt(x), fmt(v.real), fmt(v.imag)] for x, v in zip(xs, vals)])
    x = _complex_arg(args.x)
    if place == "real":
        if x.imag:
            raise ConfigError("real place needs a real x")
        v = specfun.kernel_real(s, x.real)
    else:
        v = specfun.kernel_complex(s, x)
    return fmt(v.value) + "\n"


def _eval_hankel(args) -> str:
    F = nf.make_field(args.field)
    w = _weight_from_args(args, F)
    s = complex(args.s, args.s_im)
    if args.grid:
        if len(w.factors) != 1:
            raise ConfigError("grids are only available for one-place weights")
        ys = _grid(args.grid)
        rows = []
        for y in ys:
            v = hankel_transform(w, s, (y,)).value
            rows.append([fmt(y), fmt(v.real), fmt(v.imag)])
        return _csv(["y", "re", "im"], rows)
    if args.y is None:
        raise ConfigError("eval hankel needs --y or --grid")
    y = tuple(_complex_arg(t) for t in args.y.split(";"))
    return fmt(hankel_transform(w, s, y).value) + "\n"


def _eval_mellin(args) -> str:
    F = nf.make_field(args.field)
    w = _weight_from_args(args, F)
    return fmt(mellin(w, complex(args.s, args.s_im)).value) + "\n"


def _eval_zeta(args) -> str:
    F = nf.make_field(args.field)
    if args.grid:
        rows = []
        for s in _grid(args.grid):
            v = zeta.dedekind_zeta(F, complex(s, args.s_im))
            rows.append([fmt(s), fmt(v.real), fmt(v.imag)])
        return _csv(["s", "re", "im"], rows)
    return fmt(zeta.dedekind_zeta(F, complex(args.s, args.s_im))) + "\n"


def _eval_laurent(args) -> str:
    L = zeta.laurent_at_1(nf.make_field(args.field))
    return f"residue {fmt(L.residue)}\nconstant {fmt(L.constant)}\n"


def _eval_tau(args) -> str:
    F = nf.make_field(args.field)
    I = nf.parse_ideal(F, args.ideal)
    return fmt(nf.tau_s(F, I, complex(args.s, args.s_im))) + "\n"


def _eval_dualdata(args) -> str:
    F = nf.make_field(args.field)
    a = nf.parse_ideal(F, args.ideal)
    dd = nf.dual_data(F, args.zeta, a)
    labels = ", ".join(P.label() for P in dd.S) or "-"
    return f"S {labels}\nb {dd.b_ideal}\nN(b) {dd.b_ideal.norm()}\n"


def _eval_psi(args) -> str:
    F = nf.make_field(args.field)
    x = nf.parse_element(F, args.x)
    bad = nf.bad_places(F, x)
    inf = nf.psi_infty(F, x)
    fin = nf.psi_S(F, x, bad)
    return (f"psi_infinity {fmt(inf)}\n"
            f"psi_finite {fmt(fin)}\n"
            f"places {', '.join(P.label() for P in bad) or '-'}\n"
            f"product {fmt(inf * fin)}\n")


EVALUATORS = {
    "kernel": _eval_kernel, "hankel": _eval_hankel, "mellin": _eval_mellin, "zeta": _eval_zeta,
    "laurent": _eval_laurent, "tau": _eval_tau, "dualdata": _eval_dualdata, "psi": _eval_psi,
}


def cmd_eval(args) -> int:
    try:
        text = EVALUATORS[args.subject](args)
    except (VnfError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


SELFTEST_FIELDS = ("Q", "Q(sqrt,-1)", "Q(sqrt,5)", "Q(sqrt,-5)", "Q(sqrt,2)", "Q(sqrt,-3)")


def _suite_laurent():
    worst = abs(zeta.laurent_at_1(nf.make_field("Q")).constant - zeta.EULER_GAMMA)
    worst = max(worst, abs(zeta.laurent_at_1(nf.make_field("Q(sqrt,-1)")).residue - math.pi / 4))
    # class number one, fundamental unit (1 + sqrt 5)/2
    r5 = 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)
    worst = max(worst, abs(zeta.laurent_at_1(nf.make_field("Q(sqrt,5)")).residue - r5))
    return worst, 1e-8


def _suite_functional_equation():
    worst = 0.0
    for name in SELFTEST_FIELDS:
        F = nf.make_field(name)
        for s in (0.3 + 0.5j, 0.7 - 1.5j, -0.4 + 2.0j):
            worst = max(worst, zeta.functional_equation_residual(F, s))
    return worst, 1e-9


def _suite_kernel_symmetry():
    worst = 0.0
    xs = np.array([0.05, 0.7, 3.0, 40.0, -0.3, -2.0])
    zs = np.array([0.2 + 0.1j, -1.5 + 0.5j, 3.0 - 4.0j, 30.0j])
    for s in (0.15, 0.3 + 0.2j, 0.45 - 0.3j):
        a, _, _ = specfun.kernel_real_values(s, xs)
        b, _, _ = specfun.kernel_real_values(-s, xs)
        worst = max(worst, float(np.max(np.abs(a - b) / (np.abs(a) + 1e-300))))
        a, _, _ = specfun.kernel_complex_values(s, zs)
        b, _, _ = specfun.kernel_complex_values(-s, zs)
        worst = max(worst, float(np.max(np.abs(a - b) / (np.abs(a) + 1e-300))))
    return worst, 1e-10


def _suite_kernel_reality():
    worst = 0.0
    xs = np.array([0.05, 0.7, 3.0, 40.0, -0.3, -2.0])
    zs = np.array([0.2 + 0.1j, -1.5 + 0.5j, 3.0 - 4.0j])
    for s in (0.0, 0.2, 0.45, 1.0):
        a, _, _ = specfun.kernel_real_values(s, xs)
        b, _, _ = specfun.kernel_complex_values(s, zs)
        worst = max(worst, float(np.max(np.abs(a.imag) / (np.abs(a) + 1e-300))),
                    float(np.max(np.abs(b.imag) / (np.abs(b) + 1e-300))))
    return worst, 1e-12


def _suite_kernel_dual_form():
    # the J-difference forms cancel exponentially once Im(4 pi sqrt x) is large,
    # so the points stay where they are well conditioned
    worst = 0.0
    xs = np.array([0.05, 0.7, 3.0, -0.05, -0.3])
    zs = np.array([0.2 + 0.1j, 0.8 - 0.4j, -0.01 + 0.002j])
    for s in (0.15, 0.3 + 0.2j):
        a, _, _ = specfun.kernel_real_values(s, xs)
        b = specfun.kernel_real_jform(s, xs)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        a, _, _ = specfun.kernel_complex_values(s, zs)
        b = specfun.kernel_complex_jform(s, zs)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
    return worst, 1e-8


def random_element(F, rng: random.Random) -> "nf.FieldElement":
    while True:
        a = Fraction(rng.randint(-60, 60), rng.randint(1, 90))
        b = Fraction(rng.randint(-60, 60), rng.randint(1, 90)) if not F.is_rational else Fraction(0)
        x = F.element(a, b)
        if not x.is_zero():
            return x


def _suite_character_triviality():
    rng = random.Random(seed())
    worst = 0.0
    for name in SELFTEST_FIELDS:
        F = nf.make_field(name)
        for _ in range(25):
            worst = max(worst, abs(nf.global_character(F, random_element(F, rng)) - 1))
    return worst, 1e-12


def _suite_tau():
    F = nf.make_field("Q")
    worst = abs(nf.tau_s(F, nf.parse_ideal(F, "(6)"), 0) - 4)
    G = nf.make_field("Q(sqrt,-1)")
    # (5) splits, so (5) has divisors 1, P, P', PP', P^2... : tau_0((5)) = 4
    worst = max(worst, abs(nf.tau_s(G, nf.parse_ideal(G, "(5)"), 0) - 4))
    # (3) is inert: divisors 1 and (3)
    worst = max(worst, abs(nf.tau_s(G, nf.parse_ideal(G, "(3)"), 0) - 2))
    return worst, 1e-12


def _suite_identity():
    cfg = RunConfig(field="Q", s_re=0.3, tol=1e-4)
    rep = verify(cfg.problem())
    return rep.rel_err, 1e-4


SELFTEST_SUITES = {
    "laurent": _suite_laurent,
    "functional_equation": _suite_functional_equation,
    "kernel_symmetry": _suite_kernel_symmetry,
    "kernel_reality": _suite_kernel_reality,
    "kernel_dual_form": _suite_kernel_dual_form,
    "character_triviality": _suite_character_triviality,
    "tau": _suite_tau,
    "identity": _suite_identity,
}

MUTATIONS = {
    "psi_sign": (nf._PSI_SIGN, "flip"),
    "kernel_asym": (specfun._MUTATIONS, "kernel_asym"),
}


def run_selftest(suites=None, mutate=()):
    """Run the named invariant suites; returns a list of (name, measured, limit, ok)."""
    names = suites or list(SELFTEST_SUITES)
    saved = {m: MUTATIONS[m][0][MUTATIONS[m][1]] for m in mutate}
    for m in mutate:
        table, key = MUTATIONS[m]
        table[key] = True
    rows = []
    try:
        for name in names:
            try:
                measured, limit = SELFTEST_SUITES[name]()
                ok = bool(measured <= limit)
            except VnfError as exc:
                measured, limit, ok = float("nan"), float("nan"), False
                print(f"{name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            rows.append((name, float(measured), float(limit), ok))
    finally:
        for m, v in saved.items():
            table, key = MUTATIONS[m]
            table[key] = v
    return rows


def cmd_selftest(args) -> int:
    try:
        worker_count()
        unknown = [n for n in (args.suite or []) if n not in SELFTEST_SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
    except VnfError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    rows = run_selftest(args.suite, args.mutate or ())
    width = max(len(r[0]) for r in rows)
    print(f"{'suite':<{width}}  {'measured':>10}  {'limit':>8}  result")
    for name, measured, limit, ok in rows:
        print(f"{name:<{width}}  {measured:>10.2e}  {limit:>8.0e}  {'pass' if ok else 'FAIL'}")
    failed = [r[0] for r in rows if not r[3]]
    print(f"{len(rows) - len(failed)}/{len(rows)} suites passed in {time.perf_counter() - t0:.1f} s")
    if failed:
        print("failures: " + ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vnf", description="Numerical checks of the divisor summation identity over Q and quadratic fields.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="compute both sides of the identity and report the discrepancy")
    v.add_argument("--config", help="RunConfig JSON file")
    v.add_argument("--field")
    v.add_argument("--ideal")
    v.add_argument("--zeta")
    v.add_argument("--s-re", dest="s_re", type=float)
    v.add_argument("--s-im", dest="s_im", type=float)
    v.add_argument("--tol", type=float)
    v.add_argument("--max-radius", dest="max_radius", type=float)
    v.add_argument("--reproducible", type=_bool, nargs="?", const=True, default=None)
    v.add_argument("--format", choices=("json", "csv", "text"))
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate one building block")
    e.add_argument("subject", choices=sorted(EVALUATORS))
    e.add_argument("--field", default="Q")
    e.add_argument("--ideal", default="(1)")
    e.add_argument("--zeta", default="0")
    e.add_argument("--place", choices=("real", "complex"), default="real")
    e.add_argument("--s", type=float, default=0.0, help="real part of s")
    e.add_argument("--s-im", dest="s_im", type=float, default=0.0)
    e.add_argument("--x", default="1", help="kernel argument, or field element for psi")
    e.add_argument("--y", help="Hankel argument, one number per place separated by ';'")
    e.add_argument("--grid", help="lo,hi,n: emit a CSV grid instead of a single value")
    e.add_argument("--config", help="RunConfig JSON file supplying the weight")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("selftest", help="run the invariant suites at reduced density")
    t.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    t.add_argument("--mutate", action="append", choices=sorted(MUTATIONS),
                   help="test hook: inject a known defect")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
