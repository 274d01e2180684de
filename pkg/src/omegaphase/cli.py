"""Batch front end: reproducible experiments from a config file or flags,
with CSV/JSON artifacts written atomically.

No interactive mode and no environment variables: every run takes a
fully resolved configuration, echoes it into ``manifest.json``, and
produces byte-identical outputs on identical configs.  Exit codes: 0 on
success (budget exhaustion is a successful no-evidence result), 2 for
unreadable inputs (files, config, machine or spec parse errors), 3 for
constraint violations (parameters outside their stated ranges).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import chaitin, clock, phase, qpe
from .dyadic import BitString, Dyadic
from .tm import MachineParseError, MachineSpec, load_machine
from .zoo import ZOO, zoo_machine

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONSTRAINT = 3

COMMANDS = ("omega", "witness", "qpe", "clock", "sweep", "spectrum")


class ConfigError(ValueError):
    """Malformed or incomplete run configuration."""


@dataclass
class RunConfig:
    command: str
    output_dir: str
    format: str = "json"
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if not self.output_dir:
            raise ConfigError("output_dir is required")

    def manifest(self) -> dict:
        return {
            "command": self.command,
            "format": self.format,
            "output_dir": self.output_dir,
            "params": self.params,
        }

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls(
            command=data.get("command", ""),
            output_dir=data.get("output_dir", ""),
            format=data.get("format", "json"),
            params=data.get("params", {}),
        )


def _float_repr(x: float) -> str:
    return format(float(x), ".17g")


def _signed_log2(x: Fraction) -> float:
    if x == 0:
        return 0.0
    mag = math.log2(abs(x.numerator)) - math.log2(x.denominator)
    return mag if x > 0 else -mag


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _write_atomic(path, "\n".join(lines) + "\n")


def _load_machine_ref(ref: str) -> MachineSpec:
    if ref.startswith("zoo:"):
        name = ref.removeprefix("zoo:")
        if name not in ZOO:
            raise ConfigError(f"unknown zoo machine {name!r}; known: {sorted(ZOO)}")
        return zoo_machine(name)
    return load_machine(ref)


def _require(params: dict, key: str):
    if key not in params:
        raise ConfigError(f"missing required parameter {key!r}")
    return params[key]


# -- command implementations -------------------------------------------


def _run_omega(cfg: RunConfig, out: Path) -> None:
    machine = _load_machine_ref(_require(cfg.params, "machine"))
    stage = int(_require(cfg.params, "stage"))
    approx = chaitin.omega_approx(machine, stage)
    _write_json(out / "omega.json", approx.report())
    if cfg.params.get("include_sequence") or cfg.format == "csv":
        rows = []
        for s in range(1, stage + 1):
            value = chaitin.omega_approx(machine, s).value
            truncated = chaitin.omega_truncated_sequence(machine, s)[-1]
            rows.append([str(s), value.as_ratio_string(), truncated.as_ratio_string()])
        _write_csv(out / "omega_stages.csv", ["stage", "omega_s", "omega_s_trunc_s"], rows)


def _run_witness(cfg: RunConfig, out: Path) -> None:
    machine = _load_machine_ref(_require(cfg.params, "machine"))
    mode = cfg.params.get("mode", "w")
    if mode == "w":
        phi = Dyadic.parse(str(_require(cfg.params, "phi")))
        max_stage = int(_require(cfg.params, "max_stage"))
        halted_at = chaitin.witness_w(machine, phi, max_stage)
        payload = {
            "machine": machine.name,
            "mode": "w",
            "phi": phi.as_ratio_string(),
            "max_stage": max_stage,
            "halted_at": halted_at,
            "budget_exceeded": halted_at is None,
        }
    elif mode == "wprime":
        phibar = BitString(str(_require(cfg.params, "phibar")))
        m = int(_require(cfg.params, "m"))
        halts = chaitin.witness_wprime(machine, phibar, m)
        payload = {
            "machine": machine.name,
            "mode": "wprime",
            "phibar": str(phibar),
            "m": m,
            "halts": halts,
        }
    else:
        raise ConfigError(f"witness mode must be 'w' or 'wprime', got {mode!r}")
    _write_json(out / "witness.json", payload)


def _run_qpe(cfg: RunConfig, out: Path) -> None:
    mode = cfg.params.get("mode", "distribution")
    if mode == "distribution":
        phi = qpe.as_phase(str(_require(cfg.params, "phi")))
        n = int(_require(cfg.params, "n"))
        dist = qpe.qpe_distribution(phi, n)
        rows = []
        for z, prob in enumerate(dist.probabilities):
            estimate = Dyadic(z, n)
            rows.append([str(z), estimate.as_ratio_string(), _float_repr(prob)])
        _write_csv(out / "qpe.csv", ["z", "estimate", "probability"], rows)
        summary: dict = {"phi": str(phi), "n": n, "exact": dist.exact}
        if "m" in cfg.params:
            m = int(cfg.params["m"])
            if m < n:
                summary["tail_probability"] = qpe.tail_probability(phi, n, m)
                summary["tail_bound"] = 2.0 ** -(n - m)
            summary["m"] = m
            summary["success_probability"] = qpe.rounded_success_probability(phi, n, m)
            summary["success_bound"] = 1.0 - 2.0 ** -(n - m)
        _write_json(out / "qpe.json", summary)
    elif mode == "grid":
        den = int(cfg.params.get("grid_denominator", 257))
        n_max = int(cfg.params.get("n_max", 14))
        phis = [Fraction(k, den) for k in range(1, den)]
        rows = []
        violations = 0
        for n in range(2, n_max + 1):
            ms = list(range(1, n))
            worst_tail = 0.0
            worst_margin = 1.0
            for phi in phis:
                tails, successes = qpe.success_and_tail_grid(phi, n, ms)
                for m in ms:
                    bound = 2.0 ** -(n - m)
                    worst_tail = max(worst_tail, tails[m] / bound)
                    worst_margin = min(worst_margin, successes[m] - (1.0 - bound))
                    if tails[m] > bound or successes[m] < 1.0 - bound:
                        violations += 1
            rows.append([str(n), _float_repr(worst_tail), _float_repr(worst_margin)])
        _write_csv(
            out / "qpe_grid.csv", ["n", "max_tail_over_bound", "min_success_margin"], rows
        )
        _write_json(
            out / "qpe_grid.json",
            {"grid_denominator": den, "n_max": n_max, "violations": violations},
        )
    elif mode == "rounding":
        n_max = int(cfg.params.get("n_max", 12))
        checked, violations = rounding_lemma_scan(n_max)
        _write_json(
            out / "rounding.json",
            {"n_max": n_max, "checked_pairs": checked, "violations": violations},
        )
    else:
        raise ConfigError(f"unknown qpe mode {mode!r}")


def rounding_lemma_scan(n_max: int) -> tuple[int, int]:
    """Exhaustive rounding-lemma check on all dyadic grids up to n_max bits.

    For every n, m < n, every n-bit estimate within 2^-(m+1) (mod 1) of
    every n-bit phase must round-then-truncate into the phase's best
    m-bit approximations.  The per-point pipeline goes through the exact
    dyadic operations once; the pair loop compares precomputed images.
    """
    from .dyadic import interval_Im, round_up_mth, truncate

    checked = 0
    violations = 0
    for n in range(2, n_max + 1):
        size = 1 << n
        for m in range(1, n):
            images = np.empty(size, dtype=np.int64)
            for z in range(size):
                rounded = truncate(round_up_mth(Dyadic(z, n), m, n_bits=n), m)
                images[z] = rounded.numerator << (m - rounded.exponent)
            lo = np.empty(size, dtype=np.int64)
            hi = np.empty(size, dtype=np.int64)
            for w in range(size):
                members = interval_Im(Dyadic(w, n), m)
                scaled = sorted(v.numerator << (m - v.exponent) for v in members)
                lo[w] = scaled[0]
                hi[w] = scaled[-1]
            radius = 1 << (n - m - 1)  # estimates with |z - w| mod 2^n < radius
            for offset in range(-radius + 1, radius):
                z_idx = (np.arange(size) + offset) % size
                ok = (images[z_idx] == lo) | (images[z_idx] == hi)
                checked += size
                violations += int(np.count_nonzero(~ok))
    return checked, violations


def _spectral_payload(report: clock.SpectralReport, extra: dict) -> dict:
    payload = {
        "lambda0": report.lambda0,
        "lambda1": report.lambda1,
        "gap": report.gap,
        "residual": report.residual,
        "method": report.method,
    }
    payload.update(extra)
    return payload


def _run_clock(cfg: RunConfig, out: Path) -> None:
    mode = cfg.params.get("mode", "single")
    if mode == "single":
        method = cfg.params.get("method", "dense")
        if "spec_file" in cfg.params:
            spec = clock.read_clock_spec(cfg.params["spec_file"])
            mu = None
        else:
            T = int(_require(cfg.params, "T"))
            mu = float(_require(cfg.params, "mu"))
            spec = clock.case5_spec(T, mu)
        report = clock.ground_energy(spec, method=method)
        payload = _spectral_payload(
            report,
            {"T": spec.T, "mu": mu, "epsilon": clock.compute_epsilon(spec)},
        )
        _write_json(out / "clock.json", payload)
    elif mode == "cases":
        t_min = int(cfg.params.get("t_min", 1))
        t_max = int(cfg.params.get("t_max", 200))
        rows = []
        worst = 0.0
        for T in range(t_min, t_max + 1):
            for tag in (2, 4):
                closed = clock.case_eigenvalue(tag, T)
                dense = float(
                    np.linalg.eigvalsh(
                        clock.block_hamiltonian(clock.JordanBlock(tag, np.eye(1)), T)
                    )[0]
                )
                err = abs(closed - dense)
                worst = max(worst, err)
                rows.append([str(T), str(tag), _float_repr(closed), _float_repr(dense), _float_repr(err)])
        _write_csv(out / "clock_cases.csv", ["T", "case", "closed_form", "dense", "abs_err"], rows)
        _write_json(out / "clock_cases.json", {"t_min": t_min, "t_max": t_max, "max_abs_err": worst})
    elif mode == "grid":
        t_values = [int(t) for t in cfg.params.get("t_values", list(range(2, 65)))]
        mu_values = [float(m) for m in cfg.params.get("mu_values", [round(0.1 * k, 1) for k in range(1, 10)])]
        rows_data = clock.gap_law_grid(t_values, mu_values)
        rows = [
            [
                str(r["T"]),
                _float_repr(r["mu"]),
                str(r["root_count"]),
                _float_repr(r["k0"]),
                _float_repr(r["lambda0_root"]),
                _float_repr(r["lambda0_dense"]),
                _float_repr(r["epsilon"]),
                _float_repr(r["gap_ratio"]),
                _float_repr(r["k0_scaled"]),
            ]
            for r in rows_data
        ]
        _write_csv(
            out / "clock_grid.csv",
            ["T", "mu", "root_count", "k0", "lambda0_root", "lambda0_dense", "epsilon", "gap_ratio", "k0_scaled"],
            rows,
        )
        ratios = [r["gap_ratio"] for r in rows_data]
        scaled = [r["k0_scaled"] for r in rows_data]
        _write_json(
            out / "clock_grid.json",
            {
                "gap_ratio_min": min(ratios),
                "gap_ratio_max": max(ratios),
                "k0_scaled_min": min(scaled),
                "k0_scaled_max": max(scaled),
                "points": len(rows_data),
            },
        )
    elif mode == "jordan":
        dim = int(cfg.params.get("dim", 8))
        trials = int(cfg.params.get("trials", 50))
        seed = int(cfg.params.get("seed", 0))
        rng = np.random.default_rng(seed)
        worst_recon = 0.0
        worst_eps = 0.0
        case_counts = {str(k): 0 for k in range(1, 6)}
        for _ in range(trials):
            d = int(rng.integers(2, dim + 1))
            p = _random_projector(d, int(rng.integers(0, d + 1)), rng)
            q = _random_projector(d, int(rng.integers(0, d + 1)), rng)
            blocks = clock.jordan_decompose(p, q)
            p2, q2 = clock.reconstruct_projectors(blocks, d)
            worst_recon = max(
                worst_recon,
                float(np.max(np.abs(p2 - p))),
                float(np.max(np.abs(q2 - q))),
            )
            for b in blocks:
                case_counts[str(b.case_tag)] += 1
                if b.case_tag == 5:
                    small_in, small_out = b.projector_pair()
                    two = clock.ClockSpec(
                        1, 2, (np.eye(2, dtype=complex),),
                        (small_in.astype(complex),), small_out.astype(complex),
                    )
                    eps = clock.compute_epsilon(two)
                    worst_eps = max(worst_eps, abs(eps - (1.0 - b.mu)))
        _write_json(
            out / "jordan.json",
            {
                "dim": dim,
                "trials": trials,
                "seed": seed,
                "case_counts": case_counts,
                "max_reconstruction_error": worst_recon,
                "max_epsilon_mu_error": worst_eps,
            },
        )
    else:
        raise ConfigError(f"unknown clock mode {mode!r}")


def _random_projector(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(a)
    v = q[:, :rank]
    return v @ v.conj().T


def _model_from_params(params: dict) -> phase.SquareEnergyModel:
    kwargs = {}
    for key in ("xi", "poly_degree", "s_max_checked"):
        if key in params:
            kwargs[key] = int(params[key])
    for key in ("c1", "c2"):
        if key in params:
            kwargs[key] = float(params[key])
    if "comp_upper_k" in params:
        kwargs["comp_upper_k"] = Fraction(str(params["comp_upper_k"]))
    return phase.SquareEnergyModel(**kwargs)


def _run_sweep(cfg: RunConfig, out: Path) -> None:
    mode = cfg.params.get("mode", "classify")
    model = _model_from_params(cfg.params)
    if mode == "schedule":
        n_max = int(cfg.params.get("n_max", 10_000))
        ok = all(
            phase.schedule_constraint_ok(n, phase.choose_m(n)) for n in range(2, n_max + 1)
        )
        ms = [phase.choose_m(n) for n in range(2, n_max + 1)]
        monotone = all(a <= b for a, b in zip(ms, ms[1:]))
        s_prime = phase.find_s_prime(model)
        _write_json(
            out / "schedule.json",
            {
                "n_max": n_max,
                "constraint_ok": ok,
                "monotone": monotone,
                "s_prime": s_prime,
                "s_max_checked": model.s_max_checked,
            },
        )
        return
    if mode != "classify":
        raise ConfigError(f"unknown sweep mode {mode!r}")
    machine = _load_machine_ref(_require(cfg.params, "machine"))
    if "phis" in cfg.params:
        grid = [Dyadic.parse(str(p)) for p in cfg.params["phis"]]
    elif "grid_denominator" in cfg.params:
        den = int(cfg.params["grid_denominator"])
        if den < 1 or den & (den - 1):
            raise ConfigError("grid_denominator must be a power of two")
        exp = den.bit_length() - 1
        grid = [Dyadic(k, exp) for k in range(1, den + 1)]
    else:
        grid = []
    s_prime = phase.find_s_prime(model)
    budget = cfg.params.get("s_budget", "auto")
    s_budget = s_prime + 1 if budget == "auto" else int(budget)
    results = phase.sweep(grid, machine, s_budget, model)
    rows = []
    class_rows = []
    energy_lo_rows: list[list[str]] = []
    energy_hi_rows: list[list[str]] = []
    for r in results:
        rows.append(
            [
                r.phi.as_ratio_string(),
                r.classification,
                "" if r.witness_scale is None else str(r.witness_scale),
                "" if r.first_negative_s is None else str(r.first_negative_s),
                str(r.energy.lo),
                str(r.energy.hi),
            ]
        )
        class_rows.append(
            f"{_float_repr(float(r.phi))} {phase.order_parameter('gapless_sector' if r.gapless else 'trivial_sector')}"
        )
        for s, interval in r.trace:
            energy_lo_rows.append(f"{s} {_float_repr(_signed_log2(interval.lo))}")
            energy_hi_rows.append(f"{s} {_float_repr(_signed_log2(interval.hi))}")
    _write_csv(
        out / "sweep.csv",
        ["phi", "classification", "witness_scale", "first_negative_s", "energy_lower_bound", "energy_upper_bound"],
        rows,
    )
    _write_atomic(out / "phi_vs_class.dat", "\n".join(class_rows) + "\n")
    _write_atomic(out / "s_vs_energy_lower_log2.dat", "\n".join(energy_lo_rows) + "\n")
    _write_atomic(out / "s_vs_energy_upper_log2.dat", "\n".join(energy_hi_rows) + "\n")
    _write_json(
        out / "sweep.json",
        {
            "machine": machine.name,
            "s_prime": s_prime,
            "s_budget": s_budget,
            "gapless": sum(1 for r in results if r.gapless),
            "no_evidence": sum(1 for r in results if not r.gapless),
        },
    )


def _run_spectrum(cfg: RunConfig, out: Path) -> None:
    mode = cfg.params.get("mode", "xy")
    if mode == "xy":
        lengths = [int(x) for x in cfg.params.get("lengths", [4, 8, 16, 32, 64])]
        rows = []
        for L in lengths:
            spec = phase.xy_chain_spectrum(L)
            rows.append([str(L), _float_repr(spec.ground_energy), _float_repr(spec.gap)])
        _write_csv(out / "xy.csv", ["L", "ground_energy", "gap"], rows)
        levels_for = cfg.params.get("levels_for")
        if levels_for is not None:
            L = int(levels_for)
            spec = phase.xy_chain_spectrum(L)
            levels = spec.many_body() if L <= 16 else spec.many_body(max_levels=64)
            _write_csv(
                out / "xy_levels.csv",
                ["index", "energy"],
                [[str(i), _float_repr(e)] for i, e in enumerate(levels)],
            )
    elif mode == "compose":
        uu = [Fraction(str(x)) for x in _require(cfg.params, "uu")]
        dense = [Fraction(str(x)) for x in _require(cfg.params, "dense")]
        trivial = [Fraction(str(x)) for x in _require(cfg.params, "trivial")]
        beta = Fraction(str(_require(cfg.params, "beta")))
        composed = phase.compose_total_spectrum(uu, dense, trivial, beta)
        _write_csv(
            out / "compose.csv",
            ["energy", "origin"],
            [[str(e), origin] for e, origin in composed.entries],
        )
        sector = (
            "gapless_sector" if composed.ground_origin == "uu_dense" else "trivial_sector"
        )
        _write_json(
            out / "compose.json",
            {
                "lambda0": str(composed.lambda0),
                "lambda1": str(composed.lambda1),
                "gap": str(composed.gap),
                "ground_origin": composed.ground_origin,
                "order_parameter": phase.order_parameter(sector),
            },
        )
    else:
        raise ConfigError(f"unknown spectrum mode {mode!r}")


_RUNNERS = {
    "omega": _run_omega,
    "witness": _run_witness,
    "qpe": _run_qpe,
    "clock": _run_clock,
    "sweep": _run_sweep,
    "spectrum": _run_spectrum,
}


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration; artifacts land in its output_dir."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _RUNNERS[cfg.command](cfg, out)
    _write_json(out / "manifest.json", cfg.manifest())
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omegaphase",
        description="Batch experiments: staged halting probabilities, witnesses, "
        "phase-estimation bounds, clock spectra, phase sweeps, reference spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file with the full run")
        p.add_argument("--output-dir", help="artifact directory")
        p.add_argument("--format", choices=("csv", "json"), help="preferred table format")
        p.add_argument(
            "--param",
            "-p",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="set one parameter (JSON value or bare string); repeatable",
        )
    return parser


def _parse_param(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError(f"--param needs KEY=VALUE, got {item!r}")
    key, _, raw = item.partition("=")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = RunConfig.from_file(args.config)
            if cfg.command != args.command:
                raise ConfigError(
                    f"config command {cfg.command!r} does not match subcommand {args.command!r}"
                )
        else:
            cfg = RunConfig(command=args.command, output_dir=args.output_dir or "", params={})
        if args.output_dir:
            cfg.output_dir = args.output_dir
        if args.format:
            cfg.format = args.format
        for item in args.param:
            key, value = _parse_param(item)
            cfg.params[key] = value
        return run(cfg)
    except (ConfigError, MachineParseError, clock.ClockSpecParseError, FileNotFoundError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, KeyError, phase.SeparationError, clock.BracketError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    raise SystemExit(main())
