"""Command-line front end.

Exit codes: 0 success, 1 selftest failure, 2 configuration or parse error,
3 measure fails the condition-(M) check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import berezin, kernel, measure, toeplitz, verify
from .core_math import DomainError, SpaceParams, Tolerances

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_CONFIG = 2
EXIT_CONDITION_M = 3


class ConfigError(ValueError):
    pass


def complex_literal(text: str) -> complex:
    """Parse 're,im' (or a bare real) into a complex number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a complex literal 're,im', got {text!r}")


def p_value(text: str) -> float:
    v = math.inf if text.lower() in ("inf", "infinity") else float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("p must be > 0")
    return v


@dataclass
class RunConfig:
    alpha: float
    p_list: list = field(default_factory=lambda: [1.0])
    r: float = 1.0
    s: float | None = None
    degree: int = toeplitz.DEFAULT_DEGREE
    tolerances: Tolerances = field(default_factory=Tolerances)
    threads: int | None = None
    out: Path | None = None

    def validate(self):
        if self.degree < 0:
            raise ConfigError("--degree must be >= 0")
        if not self.r > 0:
            raise ConfigError("--r must be > 0")
        if any(not p > 0 for p in self.p_list):
            raise ConfigError("--p values must be > 0")
        s = self.r if self.s is None else self.s
        bound = self.r * math.sqrt(2.0)
        if not 0 < s < bound:
            raise ConfigError(f"lattice spacing s={s:g} must satisfy 0 < s < r*sqrt(2) = {bound:.6g}")
        return self

    @property
    def params(self) -> SpaceParams:
        return SpaceParams(self.alpha, 1, self.tolerances)


def _fmt(x: float) -> str:
    return repr(float(x))


def _extent(mu) -> float:
    if isinstance(mu, measure.AtomicMeasure):
        return float(np.max(np.abs(mu.positions))) if mu.positions.size else 0.0
    if isinstance(mu, measure.RadialCircles):
        return float(np.max(mu.radii)) if mu.radii.size else 0.0
    return float(mu.support_radius)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(args) -> int:
    kv = kernel.kernel_eval(SpaceParams(args.alpha), args.z, args.w)
    doc = {
        "value": [kv.value.real, kv.value.imag],
        "head_part": [kv.head_part.real, kv.head_part.imag],
        "tail_part": [kv.tail_part.real, kv.tail_part.imag],
        "truncation_terms": kv.truncation_terms,
    }
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(f"value            {_cfmt(kv.value)}")
        print(f"head_part        {_cfmt(kv.head_part)}")
        print(f"tail_part        {_cfmt(kv.tail_part)}")
        print(f"truncation_terms {kv.truncation_terms}")
    return EXIT_OK


def _cfmt(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}j"


def _condition_m(cfg: RunConfig, mu) -> int | None:
    rep = measure.condition_m_check(cfg.params, mu)
    if not rep.bounded:
        print(f"condition (M) check failed: {rep.note}", file=sys.stderr)
        return EXIT_CONDITION_M
    return None


def cmd_verify_abc(args) -> int:
    cfg = RunConfig(args.alpha, [args.p], args.r, args.s, args.degree, out=Path(args.out)).validate()
    mu = measure.load_measure(Path(args.measure))
    code = _condition_m(cfg, mu)
    if code is not None:
        return code
    rep = verify.run_equivalence_suite(cfg.params, mu, args.p, args.r, args.degree, s=args.s, R_B=args.radius)
    _write(cfg.out / "report.json", rep.to_json())
    _write(cfg.out / "report.csv", rep.to_csv())
    print(f"{'indicator':<12} {'value':>22} {'growth':>10}")
    for name in verify.BOUNDED_GROUP + verify.SCHATTEN_GROUP:
        g = rep.diagnostics["growth"].get(name, 1.0)
        print(f"{name:<12} {rep.indicators[name]:>22.15g} {g:>10.4g}")
    for k in ("bounded", "compact", "schatten", "summary"):
        print(f"verdict {k:<9} {rep.verdicts[k]}")
    return EXIT_OK


def cmd_toeplitz(args) -> int:
    cfg = RunConfig(args.alpha, degree=args.degree).validate()
    mu = measure.load_measure(Path(args.measure))
    code = _condition_m(cfg, mu)
    if code is not None:
        return code
    T = toeplitz.assemble(cfg.params, mu, args.degree)
    if args.out:
        out = Path(args.out)
        _write(out / "matrix.json", T.to_json() + "\n")
        _write(out / "matrix.csv", T.to_csv())
        _write(out / "eigenvalues.csv", T.eigenvalues_csv())
    print(f"D          {args.degree}")
    print(f"trace      {_fmt(T.trace())}")
    print(f"trace_alt  {_fmt(toeplitz.trace_formula(cfg.params, mu, args.degree))}")
    print(f"op_norm    {_fmt(T.op_norm())}")
    return EXIT_OK


def cmd_schatten(args) -> int:
    cfg = RunConfig(args.alpha, args.p, degree=args.degree).validate()
    mu = measure.load_measure(Path(args.measure))
    code = _condition_m(cfg, mu)
    if code is not None:
        return code
    T = toeplitz.assemble(cfg.params, mu, args.degree)
    for p in args.p:
        print(f"S_{p:g} {_fmt(toeplitz.schatten_norm(T, p))}")
    return EXIT_OK


def cmd_berezin(args) -> int:
    cfg = RunConfig(args.alpha, args.p).validate()
    mu = measure.load_measure(Path(args.measure))
    code = _condition_m(cfg, mu)
    if code is not None:
        return code
    grid = berezin.default_grid(args.grid_radius, args.grid_step, args.grid_angles)
    prof = berezin.berezin_profile(cfg.params, mu, grid)
    lp = {f"{p:g}": berezin.berezin_lp_norm(cfg.params, mu, p, args.radius).value for p in args.p}
    if args.out:
        out = Path(args.out)
        _write(out / "berezin.csv", prof.to_csv())
        _write(out / "berezin.json", berezin.aggregate_json(prof.sup, lp) + "\n")
    print(f"sup (grid) {_fmt(prof.sup)}")
    for p, v in lp.items():
        print(f"L^{p} {_fmt(v)}")
    return EXIT_OK


def cmd_lattice(args) -> int:
    cfg = RunConfig(0.0, args.p, args.r, args.s).validate()
    mu = measure.load_measure(Path(args.measure))
    max_radius = args.max_radius if args.max_radius is not None else _extent(mu) + args.r
    spec = measure.LatticeSpec(args.s, args.r, max(max_radius, args.s))
    seq = berezin.lattice_sequence(mu, spec)
    print(f"points {seq.points.size}")
    print(f"sup    {_fmt(seq.sup)}")
    for p in cfg.p_list:
        print(f"l^{p:g} {_fmt(seq.lp(p))}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = verify.run_selftest(args.only)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{status} {res.name:<34} {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fockop", description="Weighted Fock-space Toeplitz operator toolkit")
    ap.add_argument("--threads", type=int, default=None, help="worker threads for kernel sweeps")
    sub = ap.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="evaluate K^alpha(z, w)")
    k.add_argument("--alpha", type=float, required=True)
    k.add_argument("--z", type=complex_literal, required=True)
    k.add_argument("--w", type=complex_literal, required=True)
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=cmd_kernel)

    v = sub.add_parser("verify-abc", help="equivalence report for one measure")
    v.add_argument("--alpha", type=float, required=True)
    v.add_argument("--p", type=p_value, default=1.0)
    v.add_argument("--r", type=float, default=1.0)
    v.add_argument("--s", type=float, default=None, help="lattice spacing (default r)")
    v.add_argument("--measure", required=True)
    v.add_argument("--degree", type=int, default=toeplitz.DEFAULT_DEGREE)
    v.add_argument("--radius", type=float, default=8.0, help="truncation radius for L^p integrals")
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_verify_abc)

    t = sub.add_parser("toeplitz", help="assemble the Toeplitz matrix")
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--measure", required=True)
    t.add_argument("--degree", type=int, default=toeplitz.DEFAULT_DEGREE)
    t.add_argument("--out")
    t.set_defaults(func=cmd_toeplitz)

    s = sub.add_parser("schatten", help="Schatten norms of the Toeplitz matrix")
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--measure", required=True)
    s.add_argument("--degree", type=int, default=toeplitz.DEFAULT_DEGREE)
    s.add_argument("--p", type=p_value, nargs="+", default=[1.0])
    s.set_defaults(func=cmd_schatten)

    b = sub.add_parser("berezin", help="Berezin transform profile and L^p norms")
    b.add_argument("--alpha", type=float, default=0.0)
    b.add_argument("--measure", required=True)
    b.add_argument("--p", type=p_value, nargs="+", default=[1.0])
    b.add_argument("--radius", type=float, default=8.0)
    b.add_argument("--grid-radius", type=float, default=6.0)
    b.add_argument("--grid-step", type=float, default=0.5)
    b.add_argument("--grid-angles", type=int, default=16)
    b.add_argument("--out")
    b.set_defaults(func=cmd_berezin)

    lat = sub.add_parser("lattice", help="ball masses on a lattice")
    lat.add_argument("--s", type=float, required=True)
    lat.add_argument("--r", type=float, required=True)
    lat.add_argument("--measure", required=True)
    lat.add_argument("--p", type=p_value, nargs="+", default=[1.0])
    lat.add_argument("--max-radius", type=float, default=None)
    lat.set_defaults(func=cmd_lattice)

    st = sub.add_parser("selftest", help="run the invariant battery")
    st.add_argument("--only", nargs="*", default=None)
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    kernel.set_threads(args.threads)
    try:
        return args.func(args)
    except (ConfigError, measure.MeasureFormatError, measure.LatticeConfigError, DomainError,
            toeplitz.TrustRegionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
