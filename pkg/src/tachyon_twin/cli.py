"""Command-line driver: verification suites, scans and demos.

Every subcommand writes machine-readable output into ``--out`` (JSON with
sorted keys, CSV with '.' decimals).  Failed checks exit with status 1; bad
input or physics errors (off-shell legs, degenerate boosts) exit with
status 2 and a JSON error document on stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import settings
from .dynamics import (
    boost_process,
    covariance_residual,
    emission_process,
    load_process,
    yukawa_first_order,
)
from .errors import DegenerateBoost, TachyonTwinError
from .fock import FockState
from .kinematics import Flipped, ModeLabel, boost, classify_mode_boost, threshold_speed
from .lorentz_rep import (
    c_operator_transform_check,
    commutation_preservation_check,
    represent_boost,
    superposition_demo,
    trace_invariance_residual,
    unitarity_residual,
    basis_family,
    vacuum_invariance_check,
)
from .propagator import (
    ORDINARY,
    TACHYONIC,
    Interval,
    QuadratureParams,
    pauli_jordan,
    propagator_scan,
    write_scan_csv,
)
from . import sampling
from .twinspace import TwinState, reduced_amplitude, apply_twin_operator, schmidt_rank, trace_functional

log = logging.getLogger("tachyon_twin")


@dataclass(frozen=True)
class RunConfig:
    mass: float = 1.0
    n_max: int = 4
    label_tol: float = 1e-9
    prune: float = 1e-14
    rel_tol: float = 1e-6
    epsilon: float = 1e-2
    extrapolation_steps: int = 4
    degenerate_tol: float = 1e-9
    seed: int = 20240101
    out: str = "out"
    workers: int = 1

    def __post_init__(self):
        for name in ("mass", "label_tol", "prune", "rel_tol", "epsilon", "degenerate_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_max < 1 or self.workers < 1:
            raise ValueError("n_max and workers must be at least 1")

    def quadrature(self) -> QuadratureParams:
        return QuadratureParams(
            epsilon=self.epsilon,
            extrapolation_steps=self.extrapolation_steps,
            rel_tol=self.rel_tol,
            max_steps=max(8, self.extrapolation_steps),
        )

    def settings(self):
        return settings.using(
            n_max=self.n_max,
            label_tol=self.label_tol,
            prune=self.prune,
            degenerate_tol=self.degenerate_tol,
        )

    def outdir(self) -> Path:
        path = Path(self.out)
        path.mkdir(parents=True, exist_ok=True)
        return path


CONFIG_ALIASES = {"nmax": "n_max", "tol": "rel_tol", "label-tol": "label_tol", "tau_label": "label_tol"}


def read_config_file(path) -> dict:
    """Flat ``key = value`` text (``#`` comments) or a JSON object."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return json.loads(text)
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed config line: {line!r}")
        out[key.strip()] = value.strip()
    return out


def build_config(args) -> RunConfig:
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    values = {}
    if args.config:
        for key, value in read_config_file(args.config).items():
            key = CONFIG_ALIASES.get(key, key).replace("-", "_")
            if key not in fields:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = value
    flag_map = {
        "mass": args.mass, "n_max": args.nmax, "seed": args.seed, "out": args.out,
        "rel_tol": args.tol, "label_tol": args.label_tol, "workers": args.workers,
        "degenerate_tol": args.degenerate_tol, "epsilon": args.epsilon,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    cast = {"int": int, "float": float, "str": str}
    typed = {k: cast[fields[k].type](v) for k, v in values.items()}
    return RunConfig(**typed)


def dump_json(obj, path: Path | None = None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    if path is not None:
        path.write_text(text + "\n", encoding="utf-8")
    return text


def parse_floats(text: str | None) -> list:
    if text is None or text.strip() == "":
        return []
    return [float(v) for v in text.split(",") if v.strip()]


def parse_range(text: str) -> list:
    """``start:stop:count`` (inclusive) or a comma list."""
    if ":" in text:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count)).tolist()
    return parse_floats(text)


# -- invariance suite ----------------------------------------------------------


def _check(name, tolerance, fn):
    try:
        residual = float(fn())
        ok = residual <= tolerance
        entry = {"check_name": name, "max_residual": residual, "tolerance": tolerance, "pass": ok}
    except Exception as exc:  # a crashing check is a failed check
        entry = {"check_name": name, "max_residual": None, "tolerance": tolerance,
                 "pass": False, "error": f"{type(exc).__name__}: {exc}"}
    log.info("%s: %s", name, "pass" if entry["pass"] else "FAIL")
    return entry


def run_invariance_suite(cfg: RunConfig) -> dict:
    m = cfg.mass
    with cfg.settings():
        rng = np.random.default_rng(cfg.seed)
        pool = [sampling.random_label(rng, m) for _ in range(12)]

        def distinctness():
            return sum(
                1 for i, a in enumerate(pool) for b in pool[i + 1:] if a.matches(b)
            )

        def vacuum():
            return max(vacuum_invariance_check(sampling.random_boost(rng)) for _ in range(50))

        def commutators():
            worst = 0.0
            cases = (sampling.PRESERVED, sampling.FLIPPED, sampling.MIXED)
            for i in range(100):
                case = cases[i % 3]
                same = case != sampling.MIXED and i % 2 == 0
                L, k, l = sampling.boost_case_triple(rng, case, m, same=same)
                worst = max(worst, commutation_preservation_check(L, k, l, 1.0 if same else 0.0))
            return worst

        cases = (sampling.PRESERVED, sampling.FLIPPED, sampling.MIXED)

        def c_operator():
            worst = 0.0
            for i in range(21):
                L, k, other = sampling.boost_case_triple(rng, cases[i % 3], m)
                labels = [classify_mode_boost(L, lab).new_label for lab in (k, other)]
                # migration may stack both sides, plus one creation
                room = max((cfg.n_max - 1) // 2, 0)
                states = [sampling.random_twin_state(rng, labels, room, terms=2) for _ in range(5)]
                worst = max(worst, c_operator_transform_check(L, k, states))
            return worst

        def trace_invariance():
            worst = 0.0
            for i in range(51):
                L, k, l = sampling.boost_case_triple(rng, cases[i % 3], m)
                s = sampling.random_twin_state(rng, [k, l], cfg.n_max // 2)
                worst = max(worst, trace_invariance_residual(L, s))
            return worst

        def reduction():
            worst = 0.0
            labels = pool[:3]
            ops = [sampling.random_twin_operator(rng, labels) for _ in range(20)]
            states = [sampling.random_separable_state(rng, labels, cfg.n_max) for _ in range(20)]
            # O2^dagger O1 stacks two ladder strings on one side
            with settings.using(n_max=cfg.n_max + 6):
                for O in ops:
                    for s in states:
                        lhs = trace_functional(apply_twin_operator(O, s))
                        worst = max(worst, abs(lhs - reduced_amplitude(O, s)))
            return worst

        def unitarity():
            L, k, l = sampling.boost_case_triple(rng, sampling.MIXED, m)
            return unitarity_residual(L, basis_family([k, l], cfg.n_max))

        checks = [
            _check("label_distinctness", 0.0, distinctness),
            _check("vacuum_invariance", 0.0, vacuum),
            _check("commutation_preservation", 1e-12, commutators),
            _check("c_operator_transform", 1e-10, c_operator),
            _check("trace_invariance", 1e-10, trace_invariance),
            _check("reduction_identity", 1e-12, reduction),
            _check("truncated_unitarity", 1e-12, unitarity),
        ]
    return {
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks),
        "config": dataclasses.asdict(cfg),
    }


# -- demos ---------------------------------------------------------------------


def run_boost_demo(cfg: RunConfig, k, speed: float, direction=(1.0, 0.0, 0.0)) -> dict:
    m = cfg.mass
    with cfg.settings():
        label = ModeLabel(tuple(k), m)
        L = boost(direction, speed)
        try:
            action = classify_mode_boost(L, label)
        except DegenerateBoost as exc:
            exc.threshold_speed = threshold_speed(direction, label)
            raise
        flipped = isinstance(action, Flipped)
        before = TwinState.product(FockState.single(label), FockState.vacuum())
        after = represent_boost(L, before)
        report = {
            "mass": m,
            "k": list(label.k),
            "speed": speed,
            "direction": list(direction),
            "omega": label.omega,
            "threshold_speed": threshold_speed(direction, label),
            "classification": "Flipped" if flipped else "Preserved",
            "new_label": [c + 0.0 for c in action.new_label.k],
            "new_omega": action.new_label.omega,
            "single_particle": {
                "before": before.to_json(),
                "after": after.to_json(),
                "trace_before": _cplx(trace_functional(before)),
                "trace_after": _cplx(trace_functional(after)),
                "schmidt_rank_after": schmidt_rank(after),
            },
        }
        if flipped:
            stay = _preserved_partner(L, label)
            if stay is not None:
                sup_before, sup_after = superposition_demo(L, stay, label)
                report["superposition"] = {
                    "stay_label": list(stay.k),
                    "before": sup_before.to_json(),
                    "after": sup_after.to_json(),
                    "schmidt_rank_before": schmidt_rank(sup_before),
                    "schmidt_rank_after": schmidt_rank(sup_after),
                    "trace_before": _cplx(trace_functional(sup_before)),
                    "trace_after": _cplx(trace_functional(sup_after)),
                }
    return report


def _preserved_partner(L, label):
    candidate = ModeLabel(tuple(-c for c in label.k), label.m)
    try:
        if not isinstance(classify_mode_boost(L, candidate), Flipped):
            return candidate
    except DegenerateBoost:
        pass
    return None


def _cplx(z: complex) -> list:
    return [z.real, z.imag]


def format_boost_demo(report: dict) -> str:
    lines = [
        f"mode k = {tuple(report['k'])}, m = {report['mass']}, omega = {report['omega']:.6f}",
        f"boost speed {report['speed']} along {tuple(report['direction'])}"
        f" (sign flip threshold {report['threshold_speed']})",
        f"classification: {report['classification']}, new label {tuple(round(c, 6) for c in report['new_label'])}",
        f"|1_k> (x) <0|  ->  {'|0> (x) <1_l′|' if report['classification'] == 'Flipped' else '|1_l> (x) <0|'}",
        f"trace before/after: {report['single_particle']['trace_before']} / {report['single_particle']['trace_after']}",
    ]
    if "superposition" in report:
        sup = report["superposition"]
        lines.append(
            "superposition |0> (x) (<1_q| + <1_k|)/sqrt2: Schmidt rank "
            f"{sup['schmidt_rank_before']} -> {sup['schmidt_rank_after']}"
        )
    return "\n".join(lines)


def run_yukawa_covariance(cfg: RunConfig, process, speeds, direction=(1.0, 0.0, 0.0)) -> dict:
    amp = yukawa_first_order(process)
    rows = []
    for v in speeds:
        L = boost(direction, v)
        boosted = boost_process(L, process, cfg.degenerate_tol)
        migrated = [a.direction != b.direction for a, b in zip(process.legs, boosted.legs)]
        residual = covariance_residual(L, process)
        rows.append({
            "speed": v,
            "tachyon_migrated": any(migrated),
            "boosted_balance": yukawa_first_order(boosted).momentum_balance.as_array().tolist(),
            "residual": residual,
            "tolerance": 1e-9,
            "pass": residual <= 1e-9,
        })
    return {
        "process": process.to_json(),
        "amplitude": amp.to_json(),
        "rows": rows,
        "all_pass": all(r["pass"] for r in rows),
    }


def run_pauli_jordan(cfg: RunConfig, t_values, r_values, contrast: bool) -> list:
    q = cfg.quadrature()
    rows = []
    for t in t_values:
        for r in r_values:
            row = {"t": t, "r": r}
            kinds = (TACHYONIC, ORDINARY) if contrast else (TACHYONIC,)
            for kind in kinds:
                try:
                    est = pauli_jordan(Interval(t, r), cfg.mass, kind, q, return_error=True)
                    row[kind] = (est.value.real, est.value.imag, est.error)
                except TachyonTwinError:
                    row[kind] = (math.nan, math.nan, math.nan)
            rows.append(row)
    return rows


def write_pauli_jordan_csv(rows, path: Path, contrast: bool):
    import csv

    kinds = (TACHYONIC, ORDINARY) if contrast else (TACHYONIC,)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        header = ["t", "r"]
        for kind in kinds:
            header += [f"{kind}_re", f"{kind}_im", f"{kind}_err"]
        w.writerow(header)
        for row in rows:
            out = [repr(row["t"]), repr(row["r"])]
            for kind in kinds:
                out += [repr(float(v)) for v in row[kind]]
            w.writerow(out)


# -- argument parsing ----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value or JSON config file")
    common.add_argument("--mass", type=float)
    common.add_argument("--nmax", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--label-tol", type=float, dest="label_tol")
    common.add_argument("--degenerate-tol", type=float, dest="degenerate_tol")
    common.add_argument("--epsilon", type=float, help="largest damping in the extrapolation")
    common.add_argument("--workers", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tachyon-twin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("invariance-suite", parents=[common])

    scan = sub.add_parser("propagator-scan", parents=[common])
    scan.add_argument("--t-range", default="0.0:2.4:5")
    scan.add_argument("--r-range", default="0.3:3.0:5")
    scan.add_argument("--speeds", default="0.3,0.6,0.9")

    pj = sub.add_parser("pauli-jordan", parents=[common])
    pj.add_argument("--t-range", default="0.5")
    pj.add_argument("--r-range", default="2.0")
    pj.add_argument("--contrast", action="store_true", help="also evaluate the ordinary-mass control")

    demo = sub.add_parser("boost-demo", parents=[common])
    demo.add_argument("--k", default="1.5,0,0")
    demo.add_argument("--speed", type=float, default=0.9)
    demo.add_argument("--direction", default="1,0,0")

    yk = sub.add_parser("yukawa-covariance", parents=[common])
    yk.add_argument("--process", help="process JSON; default is the built-in emission")
    yk.add_argument("--speeds", default="0.3,0.6,0.9,0.99")
    yk.add_argument("--heavy-mass", type=float, default=2.0)

    sub.add_parser("run-all", parents=[common])
    return p


def _fail(exc: Exception, code: int = 2) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    threshold = getattr(exc, "threshold_speed", None)
    if threshold is not None:
        doc["threshold_speed"] = threshold
    sys.stderr.write(dump_json(doc) + "\n")
    return code


def _executor(cfg: RunConfig):
    if cfg.workers > 1:
        return concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers)
    return None


def cmd_invariance_suite(cfg: RunConfig) -> int:
    report = run_invariance_suite(cfg)
    dump_json(report, cfg.outdir() / "invariance_suite.json")
    for c in report["checks"]:
        print(f"{c['check_name']:<28} {'PASS' if c['pass'] else 'FAIL'}  "
              f"residual={c['max_residual']!r} tol={c['tolerance']!r}")
    return 0 if report["all_pass"] else 1


def cmd_propagator_scan(cfg: RunConfig, t_values, r_values, speeds) -> int:
    pool = _executor(cfg)
    try:
        mapper = pool.map if pool is not None else map
        rows = propagator_scan(t_values, r_values, speeds, cfg.mass, cfg.quadrature(), mapper=mapper)
    finally:
        if pool is not None:
            pool.shutdown()
    worst = write_scan_csv(rows, cfg.outdir() / "propagator_scan.csv")
    print(f"rows={len(rows)} max_relative_deviation={worst!r}")
    return 0


def cmd_pauli_jordan(cfg: RunConfig, t_values, r_values, contrast: bool) -> int:
    rows = run_pauli_jordan(cfg, t_values, r_values, contrast)
    write_pauli_jordan_csv(rows, cfg.outdir() / "pauli_jordan.csv", contrast)
    for row in rows:
        parts = [f"t={row['t']!r} r={row['r']!r}"]
        for kind in (TACHYONIC, ORDINARY):
            if kind in row:
                re, im, err = row[kind]
                parts.append(f"{kind}=({re:.6e}{im:+.6e}j) err={err:.1e}")
        print("  ".join(parts))
    return 0


def cmd_boost_demo(cfg: RunConfig, k, speed, direction) -> int:
    report = run_boost_demo(cfg, k, speed, direction)
    dump_json(report, cfg.outdir() / "boost_demo.json")
    print(format_boost_demo(report))
    return 0


def cmd_yukawa_covariance(cfg: RunConfig, process_file, speeds, heavy_mass) -> int:
    process = load_process(process_file) if process_file else emission_process(heavy_mass, cfg.mass)
    report = run_yukawa_covariance(cfg, process, speeds)
    dump_json(report, cfg.outdir() / "yukawa_covariance.json")
    print("speed  migrated  residual  pass")
    for r in report["rows"]:
        print(f"{r['speed']!r}  {r['tachyon_migrated']}  {r['residual']:.3e}  {r['pass']}")
    return 0 if report["all_pass"] else 1


def cmd_run_all(cfg: RunConfig) -> int:
    codes = [
        cmd_invariance_suite(cfg),
        cmd_boost_demo(cfg, (1.5, 0.0, 0.0), 0.9, (1.0, 0.0, 0.0)),
        cmd_yukawa_covariance(cfg, None, [0.3, 0.6, 0.9, 0.99], 2.0),
        cmd_pauli_jordan(cfg, [0.5], [2.0], True),
        cmd_propagator_scan(cfg, [0.3, 1.5], [0.3, 1.5], [0.3, 0.6, 0.9]),
    ]
    return max(codes)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        if args.command == "invariance-suite":
            return cmd_invariance_suite(cfg)
        if args.command == "propagator-scan":
            return cmd_propagator_scan(cfg, parse_range(args.t_range), parse_range(args.r_range),
                                       parse_floats(args.speeds))
        if args.command == "pauli-jordan":
            return cmd_pauli_jordan(cfg, parse_range(args.t_range), parse_range(args.r_range), args.contrast)
        if args.command == "boost-demo":
            return cmd_boost_demo(cfg, parse_floats(args.k), args.speed, tuple(parse_floats(args.direction)))
        if args.command == "yukawa-covariance":
            return cmd_yukawa_covariance(cfg, args.process, parse_floats(args.speeds), args.heavy_mass)
        if args.command == "run-all":
            return cmd_run_all(cfg)
    except (TachyonTwinError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        return _fail(exc)
    return 2


if __name__ == "__main__":
    sys.exit(main())
