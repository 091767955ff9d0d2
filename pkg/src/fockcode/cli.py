"""Command-line experiment runner.

Every subcommand writes a table (CSV or JSON) to stdout.  CSV output starts
with a ``# schema:`` comment line; JSON output carries a ``schema`` key.
Exit codes: 0 success, 1 property failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import circuit, coder, fock, schumacher, source, thermo
from .errors import CorruptionError, FockcodeError, ResourceError, SideInfoMismatchError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG = 0, 1, 2
FIDELITY_TOL = 1e-10

TABLE3_COLUMNS = {
    "rank": "position in the probability ranking (1 = most probable)",
    "sequence": "eigen-letter sequence, '+' = larger eigenvalue, '-' = smaller",
    "codeword": "photon polarizations in modes 1..l, vacuum beyond",
    "probability": "probability of the sequence",
    "length": "codeword length = photon number",
}
SWEEP_COLUMNS = {
    "theta_deg": "source angle in degrees",
    "n": "letters per message",
    "S_letter": "von Neumann entropy per letter (bits)",
    "S_total": "n * S_letter",
    "L": "expected 1-1 codeword length = expected photon number",
    "side_info": "log2(n), bits of classical total-length information",
    "bound_landauer_n": "S_total - log2(n)",
    "bound_landauer_S": "S_total - log2(S_total)",
    "bound_cover": "S_total - log2(n) - 3",
    "bound_prisco": "S_total - log2(S_total+1) - S_total*log2(1+1/S_total)",
    "bound_prisco_log_s": "S_total - log2(S_total) - S_total*log2(1+1/S_total) (reported only)",
    "energy_ratio": "<H>_final / <H>_initial with unit mode frequencies",
    "adjusted_rate": "(L + log2 n) / n, bits per letter including side information",
    "deficit": "S_total - (L + side_info); <= 0 for a lossless scheme",
    "ok_landauer_n": "L >= bound_landauer_n",
    "ok_landauer_S": "L >= bound_landauer_S",
    "ok_cover": "L >= bound_cover",
    "ok_prisco": "L >= bound_prisco",
    "lossless": "deficit <= 1e-9",
}
ROUNDTRIP_COLUMNS = {
    "theta_deg": "source angle in degrees",
    "n": "letters per message",
    "samples": "random superpositions decoded (plus every basis message)",
    "min_fidelity": "worst |<input|decode(encode(input))>|^2",
    "side_info_check": "whether a wrong l_t was rejected",
    "status": "pass / fail / error message",
}
SCHUMACHER_COLUMNS = {
    "n": "letters per message",
    "epsilon": "typicality window",
    "dimension": "number of typical eigen-sequences",
    "rate": "log2(dimension)/n, empty when the typical set is empty",
    "fidelity": "probability mass of the typical subspace",
    "one_to_one_rate": "(L + log2 n)/n of the 1-1 code at the same n",
    "S_letter": "von Neumann entropy per letter",
}
BOUNDS_COLUMNS = {k: SWEEP_COLUMNS[k] for k in (
    "theta_deg", "n", "S_letter", "S_total", "L", "side_info", "bound_landauer_n",
    "bound_landauer_S", "bound_cover", "bound_prisco", "bound_prisco_log_s",
    "ok_landauer_n", "ok_landauer_S", "ok_cover", "ok_prisco",
)}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    theta_degrees: tuple[float, ...]
    n_values: tuple[int, ...]
    epsilon: float = 0.15
    symbol_order: str = "v-first"
    fmt: str = "csv"
    seed: int = 0
    cap: int = source.DEFAULT_CAP
    jobs: int = 1
    ensemble: source.LetterEnsemble | None = None

    def __post_init__(self):
        if self.ensemble is not None:
            object.__setattr__(self, "theta_degrees", (math.nan,))
        for t in self.theta_degrees:
            if self.ensemble is not None:
                break
            if not 0 < t < 180:
                raise ConfigError(f"theta must lie in (0, 180) degrees, got {t}")
        if any(n < 1 for n in self.n_values):
            raise ConfigError("message lengths must be >= 1")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")


# helpers


def _float_list(text: str) -> list[float]:
    """'45', '10,20,30' or an inclusive range 'start:stop:step'."""
    out = []
    for part in text.split(","):
        if ":" in part:
            start, stop, step = (float(x) for x in part.split(":"))
            k = 0
            while start + k * step <= stop + 1e-9:
                out.append(round(start + k * step, 9))
                k += 1
        else:
            out.append(float(part))
    return out


def _int_list(text: str) -> list[int]:
    """'3', '1,2,5' or an inclusive range '1-10'."""
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-"))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def eigensystem(theta_deg: float, ensemble: source.LetterEnsemble | None = None) -> source.EigenDecomposition:
    """Eigen-system of the two-letter angle source, or of ``ensemble`` when given."""
    if ensemble is None:
        ensemble = source.reference_ensemble(math.radians(theta_deg))
    return source.diagonalize(source.density_matrix(ensemble))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return repr(round(x, 12)) if math.isfinite(x) else ("-inf" if x < 0 else "inf")
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("-inf" if x < 0 else "inf")
    return x


def emit(name: str, columns: dict, rows: list[dict], fmt: str, extra: dict | None = None,
         comments: list[str] | None = None) -> str:
    schema = f"fockcode.{name}/{SCHEMA_VERSION}"
    if fmt == "json":
        payload = {"schema": schema, **(extra or {})}
        payload["rows"] = [{k: _json_value(r.get(k)) for k in columns} for r in rows]
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    for key, value in (extra or {}).items():
        buf.write(f"# {key}: {_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(k)) for k in columns])
    for line in comments or []:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _columns_epilog(columns: dict) -> str:
    width = max(len(k) for k in columns)
    return "columns:\n" + "\n".join(f"  {k:<{width}}  {v}" for k, v in columns.items())


# subcommands


def cmd_table3(cfg: ExperimentConfig, reference_table: bool = False) -> tuple[str, int]:
    theta, n = cfg.theta_degrees[0], cfg.n_values[0]
    eig = eigensystem(theta, cfg.ensemble)
    if reference_table:
        book = coder.reference_codebook_n3(eig) if n == 3 else coder.reference_codebook_n2(eig)
    else:
        book = coder.build_codebook(eig, n, cfg.symbol_order, cfg.cap)
    rows = [
        {
            "rank": e.rank,
            "sequence": source.sequence_label(e.sequence, book.dim),
            "codeword": e.codeword,
            "probability": e.probability,
            "length": e.length,
        }
        for e in book.entries()
    ]
    extra = {
        "theta_deg": theta,
        "n": n,
        "total_probability": float(book.probabilities.sum()),
        "L": coder.average_length(book),
    }
    footer = [f"total: probability={_fmt(extra['total_probability'])} L={_fmt(extra['L'])}"]
    return emit("table3", TABLE3_COLUMNS, rows, cfg.fmt, extra, comments=footer), EXIT_OK


def sweep_row(theta: float, n: int, cap: int = source.DEFAULT_CAP, symbol_order: str = "v-first",
              ensemble: source.LetterEnsemble | None = None) -> dict:
    eig = eigensystem(theta, ensemble)
    book = coder.build_codebook(eig, n, symbol_order, cap)
    S = source.shannon_entropy(eig.values)
    L = coder.average_length(book)
    rep = coder.compression_bounds(S, n, L)
    energy = thermo.energy_ratio_one_to_one(book)
    audit = thermo.landauer_audit(rep.S_total, L, rep.side_info_bits)
    return {
        "theta_deg": theta,
        "n": n,
        "S_letter": S,
        "S_total": rep.S_total,
        "L": L,
        "side_info": rep.side_info_bits,
        "bound_landauer_n": rep.bound_landauer_n,
        "bound_landauer_S": rep.bound_landauer_S,
        "bound_cover": rep.bound_cover,
        "bound_prisco": rep.bound_prisco,
        "bound_prisco_log_s": rep.bound_prisco_log_s,
        "energy_ratio": energy.ratio,
        "adjusted_rate": energy.adjusted_rate,
        "deficit": audit.deficit,
        "ok_landauer_n": rep.satisfied["landauer_n"],
        "ok_landauer_S": rep.satisfied["landauer_S"],
        "ok_cover": rep.satisfied["cover"],
        "ok_prisco": rep.satisfied["prisco"],
        "lossless": audit.lossless_consistent,
    }


def _sweep_task(args):
    theta, n, cap, order, ensemble = args
    try:
        return sweep_row(theta, n, cap, order, ensemble)
    except ResourceError as exc:
        return {"theta_deg": theta, "n": n, "warning": str(exc)}


def cmd_sweep(cfg: ExperimentConfig) -> tuple[str, int]:
    tasks = [(t, n, cfg.cap, cfg.symbol_order, cfg.ensemble) for t in cfg.theta_degrees for n in cfg.n_values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    results.sort(key=lambda r: (0.0 if math.isnan(r["theta_deg"]) else r["theta_deg"], r["n"]))
    rows = [r for r in results if "warning" not in r]
    warnings = [f"warning: skipped theta={r['theta_deg']} n={r['n']}: {r['warning']}" for r in results if "warning" in r]
    for w in warnings:
        print(w, file=sys.stderr)
    extra = {"warnings": warnings} if cfg.fmt == "json" and warnings else None
    return emit("sweep", SWEEP_COLUMNS, rows, cfg.fmt, extra, comments=warnings if cfg.fmt == "csv" else None), EXIT_OK


def random_message(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def roundtrip_check(theta: float, n: int, samples: int, seed: int, lt_offset: int = 0,
                    symbol_order: str = "v-first", ensemble: source.LetterEnsemble | None = None) -> dict:
    eig = eigensystem(theta, ensemble)
    book = coder.build_codebook(eig, n, symbol_order)
    rng = np.random.default_rng([seed, 0 if math.isnan(theta) else int(round(theta * 1000)), n])
    size = book.dim**n
    messages = [np.eye(size)[i] for i in range(size)]
    messages += [random_message(rng, size) for _ in range(samples)]
    row = {"theta_deg": theta, "n": n, "samples": samples}
    try:
        worst = 1.0
        for m in messages:
            out = coder.decode(coder.encode(m, book), book, n + lt_offset)
            worst = min(worst, coder.message_fidelity(m, out))
        try:
            coder.decode(coder.encode(messages[0], book), book, n + 1)
            row["side_info_check"] = False
        except SideInfoMismatchError:
            row["side_info_check"] = True
        row["min_fidelity"] = worst
        ok = worst >= 1 - FIDELITY_TOL and row["side_info_check"]
        row["status"] = "pass" if ok else "fail"
    except SideInfoMismatchError as exc:
        row["status"] = f"side-info mismatch: {exc}"
    except CorruptionError as exc:
        row["status"] = f"corruption at ket {exc.ket!r}: {exc}"
    return row


def cmd_roundtrip(cfg: ExperimentConfig, samples: int = 200, lt_offset: int = 0) -> tuple[str, int]:
    rows = [
        roundtrip_check(t, n, samples, cfg.seed, lt_offset, cfg.symbol_order, cfg.ensemble)
        for t in cfg.theta_degrees
        for n in cfg.n_values
    ]
    failed = [r for r in rows if r["status"] != "pass"]
    out = emit("roundtrip", ROUNDTRIP_COLUMNS, rows, cfg.fmt, {"failures": len(failed)})
    return out, EXIT_PROPERTY if failed else EXIT_OK


def cmd_schumacher(cfg: ExperimentConfig) -> tuple[str, int]:
    theta = cfg.theta_degrees[0]
    eig = eigensystem(theta, cfg.ensemble)
    S = source.shannon_entropy(eig.values)
    rows = []
    for n in cfg.n_values:
        ts = schumacher.typical_set(eig, n, cfg.epsilon, cfg.cap)
        book = coder.build_codebook(eig, n, cfg.symbol_order, cfg.cap)
        rows.append({
            "n": n,
            "epsilon": cfg.epsilon,
            "dimension": ts.dimension,
            "rate": schumacher.schumacher_rate(ts) if ts.dimension else math.nan,
            "fidelity": schumacher.projection_fidelity(ts),
            "one_to_one_rate": (coder.average_length(book) + math.log2(n)) / n,
            "S_letter": S,
        })
    return emit("schumacher", SCHUMACHER_COLUMNS, rows, cfg.fmt, {"theta_deg": theta}), EXIT_OK


def cmd_bounds(cfg: ExperimentConfig) -> tuple[str, int]:
    rows = [sweep_row(t, n, cfg.cap, cfg.symbol_order, cfg.ensemble) for t in cfg.theta_degrees for n in cfg.n_values]
    return emit("bounds", BOUNDS_COLUMNS, rows, cfg.fmt), EXIT_OK


def cmd_circuit_demo(cfg: ExperimentConfig, amplitudes: list[complex] | None = None) -> tuple[str, int]:
    if amplitudes is None:
        message = random_message(np.random.default_rng(cfg.seed), 4)
    else:
        message = np.asarray(amplitudes, dtype=complex)
        message = message / np.linalg.norm(message)
    eig = eigensystem(cfg.theta_degrees[0], cfg.ensemble)
    book = coder.reference_codebook_n2(eig)
    reference = coder.encode(message, book, basis="eigen")
    stages = [{"stage": s.stage, "state": s.state.to_json()} for s in circuit.trace_circuit(message)]
    branches = []
    for o in circuit.corrected_branches(message):
        branches.append({
            "outcome": o.result,
            "probability": o.probability,
            "corrected_state": o.post_state.to_json(),
            "fidelity_vs_encode": fock.fidelity(o.post_state, reference),
        })
    coherent = circuit.run_circuit(message, "coherent")
    report = {
        "schema": f"fockcode.circuit-demo/{SCHEMA_VERSION}",
        "input_pm_basis": [[complex(a).real, complex(a).imag] for a in message],
        "stages": stages,
        "branches": branches,
        "coherent_output": coherent.to_json(),
        "coherent_fidelity_vs_encode": fock.fidelity(coherent, reference),
        "encode_reference": reference.to_json(),
    }
    fids = [b["fidelity_vs_encode"] for b in branches] + [report["coherent_fidelity_vs_encode"]]
    code = EXIT_OK if min(fids) >= 1 - FIDELITY_TOL else EXIT_PROPERTY
    return json.dumps(report, indent=2) + "\n", code


# argument parsing


def _parse_amplitudes(text: str) -> list[complex]:
    return [complex(p.replace(" ", "")) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", type=_float_list, help="angle(s) in degrees: '45', '30,60' or '10:170:10'")
    common.add_argument("--n", type=_int_list, help="message length(s): '3', '1,2' or '1-10'")
    common.add_argument("--epsilon", type=float, default=0.15, help="typicality window (default 0.15)")
    common.add_argument("--symbol-order", choices=["v-first", "h-first"], default="v-first",
                        help="which photon polarization stands for binary 0")
    common.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=source.DEFAULT_CAP,
                        help="maximum number of enumerated sequences (default 2**22)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--ensemble", type=str,
                        help="JSON file {letters: [{amplitudes: [[re, im], ...], p: ...}]} replacing --theta")

    parser = argparse.ArgumentParser(prog="fockcode", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("table3", parents=[common], formatter_class=fmt,
                       help="codebook table (default theta=45, n=3)", epilog=_columns_epilog(TABLE3_COLUMNS))
    p.add_argument("--reference-table", action="store_true",
                   help="use the reference table codewords instead of canonical binary counting")
    sub.add_parser("sweep", parents=[common], formatter_class=fmt,
                   help="bounds and energy over a theta x n grid", epilog=_columns_epilog(SWEEP_COLUMNS))
    p = sub.add_parser("roundtrip", parents=[common], formatter_class=fmt,
                       help="seeded encode/decode fidelity suite", epilog=_columns_epilog(ROUNDTRIP_COLUMNS))
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--lt-offset", type=int, default=0, help="deliberately corrupt the side information")
    sub.add_parser("schumacher", parents=[common], formatter_class=fmt,
                   help="typical-subspace baseline against the 1-1 code", epilog=_columns_epilog(SCHUMACHER_COLUMNS))
    p = sub.add_parser("circuit-demo", parents=[common],
                       help="stage-by-stage two-photon circuit (JSON)")
    p.add_argument("--amps", type=_parse_amplitudes,
                   help="four comma-separated amplitudes for ++,+-,-+,-- (default: random from --seed)")
    sub.add_parser("bounds", parents=[common], formatter_class=fmt,
                   help="bound report for each (theta, n)", epilog=_columns_epilog(BOUNDS_COLUMNS))
    return parser


DEFAULTS = {
    "table3": ([45.0], [3]),
    "sweep": ([float(t) for t in range(10, 171, 10)], list(range(1, 11))),
    "roundtrip": ([30.0, 45.0, 60.0, 90.0, 135.0], list(range(1, 7))),
    "schumacher": ([45.0], list(range(1, 17))),
    "circuit-demo": ([45.0], [2]),
    "bounds": ([45.0], [3]),
}


def run(argv: list[str] | None = None) -> tuple[str, int]:
    parser = build_parser()
    args = parser.parse_args(argv)
    thetas, ns = DEFAULTS[args.command]
    try:
        ensemble = source.LetterEnsemble.from_json(Path(args.ensemble)) if args.ensemble else None
        cfg = ExperimentConfig(
            theta_degrees=tuple(args.theta or thetas),
            n_values=tuple(args.n or ns),
            epsilon=args.epsilon,
            symbol_order=args.symbol_order,
            fmt=args.fmt,
            seed=args.seed,
            cap=args.cap,
            jobs=args.jobs,
            ensemble=ensemble,
        )
    except (ConfigError, FockcodeError, OSError, KeyError, ValueError) as exc:
        return f"config error: {exc}\n", EXIT_CONFIG
    if cfg.cap > source.DEFAULT_CAP:
        print(f"warning: enumeration cap {cfg.cap} may need a lot of memory", file=sys.stderr)
    try:
        if args.command == "table3":
            return cmd_table3(cfg, args.reference_table)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "roundtrip":
            return cmd_roundtrip(cfg, args.samples, args.lt_offset)
        if args.command == "schumacher":
            return cmd_schumacher(cfg)
        if args.command == "circuit-demo":
            return cmd_circuit_demo(cfg, args.amps)
        return cmd_bounds(cfg)
    except (FockcodeError, ValueError) as exc:
        return f"config error: {exc}\n", EXIT_CONFIG


def main(argv: list[str] | None = None) -> int:
    out, code = run(argv)
    stream = sys.stderr if out.startswith("config error") else sys.stdout
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
