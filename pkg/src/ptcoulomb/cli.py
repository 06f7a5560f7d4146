"""Command-line front end.

    ptcoulomb spectrum --N 2 --d 4
    ptcoulomb table1
    ptcoulomb perturb --N 2 --level 2 --order 1
    ptcoulomb sweep --N 2 --param d --start 1.5 --stop 4 --step 0.01

Exit codes: 0 success, 1 a verification check returned false, 2 usage or
configuration error (message and usage on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import DomainError, ModelParams, energy
from .perturb import rs_corrections, unperturbed_spectrum
from .secular import char_poly_f, format_h_form, reduced_secular, table1_check
from .spectra import (DEFAULT_TOL, BracketError, eigencharges, find_critical_d, refine_charges)
from .sturmian import ode_residual, sturmian, wavefunction_eval
from .verify import (lie_decompose, ode_shoot_refined, recurrence_operator, shift_invariance_check,
                     sl2_commutator_check)

SUBCOMMANDS = ("spectrum", "secular", "critical-d", "sturmian", "wavefunction", "perturb",
               "verify", "table1", "sweep")
VERIFY_MODES = ("shift", "sl2", "lie", "ode")
FORMATS = ("json", "csv", "pretty")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    N: int | None = None
    a: Fraction | None = None
    c: Fraction | None = None
    d: Fraction | None = None
    lam: Fraction | None = None
    f: Fraction | None = None
    level: int | None = None
    order: int | None = None
    tol: float | None = None
    x_max: float | None = None
    steps: int | None = None
    output: str = "json"
    seed: int | None = None
    mode: str | None = None
    param: str | None = None
    start: Fraction | None = None
    stop: Fraction | None = None
    step: Fraction | None = None
    jobs: int = 1

    def params(self) -> ModelParams:
        """Resolve (N, a, c) from c, d or lambda; at most one of the three may be set."""
        if self.N is None:
            raise UsageError("--N is required")
        given = [k for k in ("c", "d", "lam") if getattr(self, k) is not None]
        if len(given) > 1:
            names = ", ".join("--lambda" if k == "lam" else f"--{k}" for k in given)
            raise UsageError(f"conflicting options: {names}")
        a = self.a if self.a is not None else Fraction(0)
        try:
            if self.lam is not None:
                if a != 0:
                    raise UsageError("--lambda implies a = 0")
                return ModelParams.from_lambda(self.N, self.lam)
            if self.d is not None:
                return ModelParams.from_d(self.N, self.d, a)
            return ModelParams(self.N, a, self.c if self.c is not None else Fraction(1))
        except DomainError as exc:
            raise UsageError(str(exc)) from exc


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return {"num": str(obj.numerator), "den": str(obj.denominator)}
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if type(obj).__module__.startswith("mpmath"):
        return jsonable(complex(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(report: Any) -> str:
    return json.dumps(jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _pretty_scalar(v: Any) -> str:
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        return v["num"] if v["den"] == "1" else f"{v['num']}/{v['den']}"
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return f"{v['re']:.12g}" if v["im"] == 0 else f"{v['re']:.12g}{v['im']:+.12g}i"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _is_scalar(v: Any) -> bool:
    return not isinstance(v, (dict, list)) or (isinstance(v, dict) and set(v) in ({"num", "den"}, {"re", "im"}))


def dump_pretty(report: Any, indent: int = 0) -> str:
    pad = "  " * indent
    data = jsonable(report)
    lines = []
    if isinstance(data, dict) and not _is_scalar(data):
        for k, v in data.items():
            if _is_scalar(v):
                lines.append(f"{pad}{k}: {_pretty_scalar(v)}")
            elif isinstance(v, list) and all(_is_scalar(x) for x in v):
                lines.append(f"{pad}{k}: [" + ", ".join(_pretty_scalar(x) for x in v) + "]")
            else:
                lines.append(f"{pad}{k}:")
                lines.append(dump_pretty(v, indent + 1).rstrip("\n"))
    elif isinstance(data, list):
        for item in data:
            if _is_scalar(item):
                lines.append(f"{pad}- {_pretty_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                lines.append(dump_pretty(item, indent + 1).rstrip("\n"))
    else:
        lines.append(pad + _pretty_scalar(data))
    return "\n".join(lines) + "\n"


def dump_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, report) or (exit code, (header, rows)) for csv
# --------------------------------------------------------------------------

def _params_report(p: ModelParams) -> dict:
    return {"N": p.N, "a": p.a, "c": p.c, "d": p.d, "E": energy(p)}


def _tol(cfg: RunConfig) -> float:
    tol = DEFAULT_TOL if cfg.tol is None else cfg.tol
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


def cmd_spectrum(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params()
    spec = eigencharges(p, _tol(cfg))
    rep = _params_report(p)
    rep.update(charges=list(spec.charges), real=list(spec.reality_flags), all_real=spec.all_real,
               real_charges=spec.real_charges())
    return 0, rep


def cmd_secular(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params().to_exact()
    poly = char_poly_f(p)
    rep = _params_report(p)
    rep.update(polynomial=str(poly), coefficients=poly.coefficients(),
               reduced=format_h_form(reduced_secular(p.N), p.N))
    return 0, rep


def cmd_critical_d(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.N is None:
        raise UsageError("--N is required")
    if cfg.N < 1:
        raise UsageError("critical-d needs N >= 1")
    tol = 1e-10 if cfg.tol is None else cfg.tol
    if not tol > 0:
        raise UsageError("--tol must be positive")
    try:
        res = find_critical_d(cfg.N, tol)
    except BracketError as exc:
        return 1, {"N": cfg.N, "error": str(exc)}
    return 0, {"N": cfg.N, "d_critical": res.value, "bracket": list(res.bracket),
               "evaluations": len(res.trace)}


def _charge_for(cfg: RunConfig, p: ModelParams) -> Any:
    """--f if given, else the real charge with index --level (ascending order)."""
    if cfg.f is not None:
        return cfg.f
    real = eigencharges(p, _tol(cfg)).real_charges()
    level = 0 if cfg.level is None else cfg.level
    if not 0 <= level < len(real):
        raise UsageError(f"--level {level} outside 0..{len(real) - 1} (real charges only)")
    return real[level]


def _solution_report(sol) -> dict:
    return {"f": sol.f, "h": list(sol.h), "g": list(sol.g), "residual": sol.residual_norm,
            "left_residual": sol.left_residual_norm}


def cmd_sturmian(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params()
    tol = _tol(cfg)
    rep = _params_report(p)
    if cfg.f is not None:
        sol = sturmian(p, cfg.f)
        body = _solution_report(sol)
        if sol.params.exact:
            body["ode_residual_zero"] = ode_residual(sol).is_zero()
            ok = body["ode_residual_zero"]
        else:
            ok = sol.residual_norm <= tol
        rep["solutions"] = [body]
        rep["is_solution"] = ok
        return (0 if ok else 1), rep
    spec = eigencharges(p, tol)
    sols = []
    for z, real in zip(spec.charges, spec.reality_flags):
        sol = sturmian(p.to_float(), z.real if real else z)
        body = _solution_report(sol)
        body["real"] = real
        sols.append(body)
    rep["solutions"] = sols
    return 0, rep


def cmd_wavefunction(cfg: RunConfig) -> tuple[int, Any]:
    p = cfg.params()
    f = _charge_for(cfg, p)
    x_max = 6.0 if cfg.x_max is None else cfg.x_max
    n = 201 if cfg.steps is None else cfg.steps
    if not x_max > 0 or n < 2:
        raise UsageError("need --x-max > 0 and --steps >= 2")
    sol = sturmian(p.to_float(), float(f))
    x = np.linspace(-x_max, x_max, n)
    psi = wavefunction_eval(sol, x)
    if cfg.output == "csv":
        rows = [(xi, z.real, z.imag, abs(z) ** 2) for xi, z in zip(x, psi)]
        return 0, (("x", "re_psi", "im_psi", "abs2"), rows)
    rep = _params_report(p)
    rep.update(f=f, x=list(x), re_psi=list(psi.real), im_psi=list(psi.imag), abs2=list(np.abs(psi) ** 2))
    return 0, rep


def _exact_level_charge(N: int, lam: Fraction, guess_Y: float) -> complex:
    """Exact rescaled charge closest to a series estimate, polished at 40 digits."""
    p = ModelParams.from_lambda(N, lam)
    charges = refine_charges(p, eigencharges(p).charges, dps=40)
    ys = [complex(z) * float(lam) + N + 2 for z in charges]
    return min(ys, key=lambda y: abs(y - guess_Y))


def cmd_perturb(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.N is None:
        raise UsageError("--N is required")
    if cfg.c is not None or cfg.d is not None or cfg.a not in (None, 0):
        raise UsageError("perturb works at a = 0 and takes --lambda, not --c/--d")
    level = cfg.N if cfg.level is None else cfg.level
    order = 4 if cfg.order is None else cfg.order
    if not 0 <= level <= cfg.N:
        raise UsageError(f"--level must be in 0..{cfg.N}")
    if order < 1:
        raise UsageError("--order must be >= 1")
    series = rs_corrections(cfg.N, level, order)
    lvl = unperturbed_spectrum(cfg.N)[level]
    rep = {"N": cfg.N, "level": level, "order": order, "Y0": lvl.Y, "h0": list(lvl.h),
           "g0": list(lvl.g), "Y_corrections": list(series.Y_corrections),
           "h_corrections": [list(h) for h in series.h_corrections]}
    if cfg.lam is not None:
        partial = [float(v) for v in series.partial_sums(cfg.lam)]
        exact = _exact_level_charge(cfg.N, cfg.lam, partial[-1])
        rep.update(**{"lambda": cfg.lam, "partial_sums": partial, "exact_Y": exact,
                      "truncation_error": abs(exact - partial[-1])})
    return 0, rep


def cmd_table1(cfg: RunConfig) -> tuple[int, dict]:
    rows = table1_check()
    ok = all(r.ok for r in rows)
    return (0 if ok else 1), {"rows": [{"N": r.N, "computed": format_h_form(r.computed, r.N),
                                        "ok": r.ok} for r in rows],
                              "status": "PASS" if ok else "FAIL"}


def _verdict(mode: str, inputs: dict, passed: bool, metrics: Any) -> tuple[int, dict]:
    return (0 if passed else 1), {"mode": mode, "inputs": inputs, "pass": passed, "metrics": metrics}


def _verify_shift(cfg: RunConfig) -> tuple[int, dict]:
    seed = 0 if cfg.seed is None else cfg.seed
    rng = random.Random(seed)
    tol = _tol(cfg)
    samples = []
    if cfg.N is not None:
        samples.append((cfg.params(), rng.uniform(-2, 2)))
    else:
        for _ in range(50):
            p = ModelParams(rng.randint(0, 6), rng.uniform(-2, 2), rng.uniform(-5, 5))
            samples.append((p, rng.uniform(-3, 3)))
    out = []
    for p, delta in samples:
        r = shift_invariance_check(p.to_float(), delta, tol)
        out.append({"N": p.N, "a": float(p.a), "c": float(p.c), "delta": delta,
                    "deviation": r.deviation, "pass": r.ok})
    return _verdict("shift", {"seed": seed, "tol": tol, "samples": len(out)},
                    all(s["pass"] for s in out), out)


def _verify_sl2(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params().to_exact() if cfg.N is not None else None
    Ns = [p.N] if p else list(range(7))
    c = p.c if p else Fraction(5, 2)
    out = []
    for N in Ns:
        rep = sl2_commutator_check(N, c, N + 3)
        out.append({"N": N, "relations": rep.relations, "pass": rep.ok})
    return _verdict("sl2", {"N": Ns, "c": c}, all(s["pass"] for s in out), out)


def _verify_lie(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params().to_exact()
    T = recurrence_operator(p.N, p.c)
    res = lie_decompose(p.N, p.c)
    doubled = lie_decompose(p.N, p.c, convention="doubled")
    return _verdict("lie", {"N": p.N, "c": p.c}, res.ok, {
        "recurrence_columns": T.valid_columns,
        "standard_coefficients": list(res.coefficients) if res.ok else None,
        "doubled_generator_coefficients": list(doubled.coefficients) if doubled.ok else None,
        "candidate_hamiltonian_matches": res.candidate_matches})


def _verify_ode(cfg: RunConfig) -> tuple[int, dict]:
    p = cfg.params().to_float()
    steps = 4000 if cfg.steps is None else cfg.steps
    tol = 1e-6 if cfg.tol is None else cfg.tol
    f = _charge_for(cfg, p)
    try:
        res = ode_shoot_refined(p, float(f), steps=steps)
        control = ode_shoot_refined(p, float(f) + 0.1, steps=steps)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    passed = abs(res.defect) < tol and abs(control.defect) >= 1e3 * abs(res.defect)
    return _verdict("ode", {"N": p.N, "a": p.a, "c": p.c, "f": f, "E": energy(p), "steps": steps, "tol": tol},
                    passed, {"defect": abs(res.defect), "error_estimate": res.error_estimate,
                             "control_defect": abs(control.defect), "x_max": res.x_max})


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    mode = cfg.mode or "sl2"
    handlers = {"shift": _verify_shift, "sl2": _verify_sl2, "lie": _verify_lie, "ode": _verify_ode}
    if mode not in handlers:
        raise UsageError(f"unknown verify mode {mode!r}")
    return handlers[mode](cfg)


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

def grid_values(start: Fraction, stop: Fraction, step: Fraction) -> list[Fraction]:
    """Inclusive grid ``start, start + step, ...`` up to ``stop``; exact arithmetic."""
    if step <= 0:
        raise UsageError("--step must be positive")
    if stop < start:
        raise UsageError("empty grid: --stop is below --start")
    count = math.floor((stop - start) / step) + 1
    return [start + k * step for k in range(count)]


def _at_point(cfg: RunConfig, value: Fraction) -> ModelParams:
    changes = {"c": None, "d": None, "lam": None}
    changes[{"lambda": "lam"}.get(cfg.param, cfg.param)] = value
    return replace(cfg, **changes).params()


def _sweep_point(args: tuple[RunConfig, Fraction]) -> list:
    cfg, value = args
    p = _at_point(cfg, value)
    spec = eigencharges(p, _tol(cfg))
    row: list[Any] = [float(value)]
    row += [z.real for z in spec.charges] + [z.imag for z in spec.charges]
    row += [int(r) for r in spec.reality_flags]
    if cfg.param == "lambda" and cfg.level is not None:
        order = 4 if cfg.order is None else cfg.order
        partial = rs_corrections(cfg.N, cfg.level, order).partial_sums(value)
        exact = _exact_level_charge(cfg.N, value, float(partial[-1]))
        row += [float(v) for v in partial] + [exact.real]
    return row


def cmd_sweep(cfg: RunConfig) -> tuple[int, Any]:
    if cfg.param not in ("d", "c", "lambda"):
        raise UsageError("--param must be one of d, c, lambda")
    if cfg.start is None or cfg.stop is None or cfg.step is None:
        raise UsageError("sweep needs --start, --stop and --step")
    if cfg.N is None:
        raise UsageError("--N is required")
    if cfg.param == "lambda" and cfg.level is not None and not 0 <= cfg.level <= cfg.N:
        raise UsageError(f"--level must be in 0..{cfg.N}")
    values = grid_values(cfg.start, cfg.stop, cfg.step)
    for v in values:
        _at_point(cfg, v)  # surface configuration errors before any work starts
    tasks = [(cfg, v) for v in values]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))  # map keeps grid order
    else:
        rows = [_sweep_point(t) for t in tasks]
    n = cfg.N + 1
    header = [cfg.param] + [f"re_f{k}" for k in range(n)] + [f"im_f{k}" for k in range(n)]
    header += [f"real_f{k}" for k in range(n)]
    if cfg.param == "lambda" and cfg.level is not None:
        order = 4 if cfg.order is None else cfg.order
        header += [f"Y_order{k}" for k in range(order + 1)] + ["Y_exact"]
    if cfg.output == "csv":
        return 0, (header, rows)
    return 0, {"param": cfg.param, "N": cfg.N, "columns": header, "rows": rows}


COMMANDS = {"spectrum": cmd_spectrum, "secular": cmd_secular, "critical-d": cmd_critical_d,
            "sturmian": cmd_sturmian, "wavefunction": cmd_wavefunction, "perturb": cmd_perturb,
            "verify": cmd_verify, "table1": cmd_table1, "sweep": cmd_sweep}
CSV_COMMANDS = ("wavefunction", "sweep")


def run(config: RunConfig) -> tuple[int, str]:
    """Dispatch one configuration; returns the exit code and the serialized report."""
    if config.subcommand not in COMMANDS:
        raise UsageError(f"unknown subcommand {config.subcommand!r}")
    if config.output not in FORMATS:
        raise UsageError(f"unknown format {config.output!r}")
    if config.output == "csv" and config.subcommand not in CSV_COMMANDS:
        raise UsageError("csv output is available for wavefunction and sweep only")
    code, report = COMMANDS[config.subcommand](config)
    if config.output == "csv":
        return code, dump_csv(*report)
    if config.output == "pretty":
        return code, dump_pretty(report)
    return code, dump_json(report)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def rational(text: Any) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _common(parser: argparse.ArgumentParser) -> None:
    # every default is None so config-file values can fill the gaps
    parser.add_argument("--N", type=int)
    parser.add_argument("--a", type=rational)
    parser.add_argument("--c", type=rational)
    parser.add_argument("--d", type=rational)
    parser.add_argument("--lambda", dest="lam", type=rational)
    parser.add_argument("--f", type=rational)
    parser.add_argument("--level", type=int)
    parser.add_argument("--order", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--x-max", dest="x_max", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--format", dest="output", choices=FORMATS)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--config", type=Path, help="JSON file with the same keys; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptcoulomb", description="Sturmian eigencharges of the screened PT-symmetric Coulomb problem.")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    sub.required = True
    parser.set_defaults(_parsers={})
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        parser.get_default("_parsers")[name] = p
        _common(p)
        if name == "verify":
            p.add_argument("mode", nargs="?", choices=VERIFY_MODES)
        if name == "sweep":
            p.add_argument("--param", choices=("d", "c", "lambda"))
            p.add_argument("--start", type=rational)
            p.add_argument("--stop", type=rational)
            p.add_argument("--step", type=rational)
            p.add_argument("--jobs", type=int, default=1)
    return parser


CONFIG_KEYS = {"N": int, "a": rational, "c": rational, "d": rational, "lambda": rational, "lam": rational,
               "f": rational, "level": int, "order": int, "tol": float, "x_max": float, "x-max": float,
               "steps": int, "format": str, "output": str, "seed": int, "mode": str, "param": str,
               "start": rational, "stop": rational, "step": rational, "jobs": int}
ALIASES = {"lambda": "lam", "x-max": "x_max", "format": "output"}


def load_config(path: Path) -> dict:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    out = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        try:
            out[ALIASES.get(key, key)] = CONFIG_KEYS[key](value)
        except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"bad value for {key!r}: {exc}") from exc
    return out


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    merged = load_config(ns.config) if ns.config is not None else {}
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            merged[f.name] = v
    merged["subcommand"] = ns.subcommand
    merged.setdefault("output", "json")
    if merged.get("output") not in FORMATS:
        raise UsageError(f"unknown format {merged['output']!r}")
    return RunConfig(**merged)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(ns)
        code, text = run(config)
    except UsageError as exc:
        ns._parsers.get(ns.subcommand, parser).print_usage(sys.stderr)
        print(f"ptcoulomb: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
