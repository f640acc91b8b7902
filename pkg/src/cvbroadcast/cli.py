"""Command-line front end.

Subcommands: ``broadcast``, ``purify``, ``conjugate``, ``sweep``, ``verify`` and
``bounds``. Exit codes: 0 success, 1 tolerance failure, 2 usage or validation
error. Relative ``--output`` paths are resolved against ``$CVBROADCAST_OUTPUT_DIR``
when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, circuits, fock

OUTPUT_DIR_ENV = "CVBROADCAST_OUTPUT_DIR"
SWEEP_HEADER = ["nbar_in", "N", "M", "gamma_in", "gamma_out", "bound", "nbar_out", "superbroadcast"]


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"``, ``"a-bi"``, ``"a"`` or ``"bi"`` (``j`` also accepted)."""
    t = text.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    m: int | None = None
    nbar: float = 0.0
    alpha: complex = 0j
    nbar_min: float = 0.0
    nbar_max: float = 1.0
    steps: int = 11
    nbar_list: list[float] | None = None
    n_list: list[int] | None = None
    m_list: list[int] | None = None
    kind: str | None = None
    cases: list[str] = field(default_factory=lambda: ["broadcast", "purify", "conjugate"])
    cutoff: int | None = None
    samples: int = 100_000
    seed: int | None = None
    gamma: float | None = None
    format: str = "text"
    output: str | None = None

    def validate(self) -> None:
        if self.command in ("broadcast", "purify", "conjugate", "bounds"):
            if self.n is None or self.m is None:
                raise UsageError(f"{self.command} needs --n and --m")
        if self.n is not None and self.n < 1 or self.m is not None and self.m < 1:
            raise UsageError("--n and --m must be positive")
        if self.nbar < 0:
            raise UsageError("--nbar must be non-negative")
        if self.command == "broadcast" and not self.m > self.n:
            raise UsageError("broadcast needs M > N (use purify for M <= N)")
        if self.command == "purify" and not self.m <= self.n:
            raise UsageError("purify needs M <= N")
        if self.command == "sweep":
            if self.steps < 1:
                raise UsageError("--steps must be positive")
            if not (self.n_list or self.n) or not (self.m_list or self.m):
                raise UsageError("sweep needs --n/--n-list and --m/--m-list")
            if self.nbar_list is not None and any(v < 0 for v in self.nbar_list) or self.nbar_min < 0:
                raise UsageError("sweep photon numbers must be non-negative")
        if self.command == "verify" and (self.n is None) != (self.m is None):
            raise UsageError("a custom verify case needs both --n and --m")
        if self.samples < 1:
            raise UsageError("--samples must be positive")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvbroadcast", description="Optimal continuous-variable broadcasting.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="text"):
        p.add_argument("--format", choices=["text", "json", "csv"], default=fmt)
        p.add_argument("--output", help="write the report here instead of stdout")

    def state_args(p):
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--nbar", type=float, default=0.0)
        p.add_argument("--alpha", type=parse_complex, default=0j)

    for name in ("broadcast", "purify", "conjugate"):
        p = sub.add_parser(name)
        state_args(p)
        common(p)

    p = sub.add_parser("sweep")
    state_args(p)
    p.add_argument("--nbar-min", type=float, default=0.0)
    p.add_argument("--nbar-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--nbar-list", type=_float_list)
    p.add_argument("--n-list", type=_int_list)
    p.add_argument("--m-list", type=_int_list)
    common(p, "csv")

    p = sub.add_parser("verify")
    state_args(p)
    p.add_argument("--kind", choices=["broadcast", "purify", "conjugate"])
    p.add_argument("--cases", type=lambda s: [v for v in s.split(",") if v], default=["broadcast", "purify", "conjugate"])
    p.add_argument("--cutoff", type=int)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    common(p)

    p = sub.add_parser("bounds")
    state_args(p)
    p.add_argument("--gamma", type=float, help="input noise sum; overrides --nbar")
    common(p)
    return parser


def parse_args(argv=None) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
    cfg.validate()
    return cfg


# --- commands --------------------------------------------------------------------


def _single_report(cfg: RunConfig) -> circuits.BroadcastReport:
    run = {
        "broadcast": circuits.run_broadcast,
        "purify": circuits.run_purify,
        "conjugate": circuits.run_phase_conjugate,
    }[cfg.command]
    return run(cfg.n, cfg.m, cfg.nbar, cfg.alpha)


def _sweep_row(report: circuits.BroadcastReport) -> dict:
    return {
        "nbar_in": report.nbar_in,
        "N": report.n,
        "M": report.m,
        "gamma_in": report.gamma_in,
        "gamma_out": report.gamma_out,
        "bound": report.bound,
        "nbar_out": report.output_nbar,
        "superbroadcast": report.superbroadcast,
    }


def _csv_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([_csv_value(row[k]) for k in SWEEP_HEADER])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _report_text(r: circuits.BroadcastReport) -> str:
    amp = r.per_copy_amplitude[0]
    lines = [
        f"{r.kind}: N={r.n} -> M={r.m}",
        f"  alpha_in       {r.alpha_in.real:.6f}{r.alpha_in.imag:+.6f}i",
        f"  copy amplitude {amp.real:.6f}{amp.imag:+.6f}i",
        f"  nbar_in        {r.nbar_in:.6f}",
        f"  gamma_in       {r.gamma_in:.6f}",
        f"  gamma_out      {r.gamma_out:.6f}",
        f"  nbar_out       {r.output_nbar:.6f}",
        f"  bound          {r.bound:.6f}  ({'saturated' if r.saturated else 'NOT saturated'})",
        f"  superbroadcast {'true' if r.superbroadcast else 'false'}" + ("  (at threshold)" if r.at_threshold else ""),
        "  correlations",
    ]
    lines += ["    " + " ".join(f"{v:9.6f}" for v in row) for row in r.correlations.real]
    return "\n".join(lines) + "\n"


def cmd_single(cfg: RunConfig) -> tuple[int, str]:
    report = _single_report(cfg)
    if cfg.format == "json":
        return 0, _json(report.to_dict())
    if cfg.format == "csv":
        return 0, _csv([_sweep_row(report)])
    return 0, _report_text(report)


def sweep_reports(cfg: RunConfig) -> list[circuits.BroadcastReport]:
    """Grid in deterministic order: nbar outermost, then N, then M."""
    if cfg.nbar_list is not None:
        nbars = list(cfg.nbar_list)
    else:
        nbars = list(np.linspace(cfg.nbar_min, cfg.nbar_max, cfg.steps))
    ns = cfg.n_list or [cfg.n]
    ms = cfg.m_list or [cfg.m]
    out = []
    for nbar in nbars:
        for n in ns:
            for m in ms:
                run = circuits.run_broadcast if m > n else circuits.run_purify
                out.append(run(n, m, float(nbar), cfg.alpha))
    return out


def cmd_sweep(cfg: RunConfig) -> tuple[int, str]:
    rows = [_sweep_row(r) for r in sweep_reports(cfg)]
    if cfg.format == "json":
        return 0, _json(rows)
    if cfg.format == "text":
        lines = ["  ".join(f"{h:>14}" for h in SWEEP_HEADER)]
        for row in rows:
            lines.append("  ".join(f"{_csv_value(row[h]) if isinstance(row[h], bool) else format(row[h], '.6g'):>14}" for h in SWEEP_HEADER))
        return 0, "\n".join(lines) + "\n"
    return 0, _csv(rows)


@dataclass(frozen=True)
class OracleCase:
    name: str
    kind: str
    n: int
    m: int
    nbar: float
    alpha: complex
    cutoff: int
    tol: float


DEFAULT_SUITE = (
    OracleCase("broadcast 2->2", "broadcast", 2, 2, 0.5, 0.3, 12, 2e-3),
    OracleCase("broadcast 2->3", "broadcast", 2, 3, 0.5, 0.2, 10, 5e-3),
    OracleCase("broadcast 1->2 coherent", "broadcast", 1, 2, 0.0, 0.4, 12, 2e-3),
    OracleCase("purify 2->1", "purify", 2, 1, 1.0, 0.3, 14, 2e-3),
    OracleCase("purify 3->1", "purify", 3, 1, 0.6, 0.0, 10, 5e-3),
    OracleCase("purify 2->2", "purify", 2, 2, 1.0, 0.0, 14, 2e-3),
    OracleCase("conjugate 2->1", "conjugate", 2, 1, 1.0, 0.3, 12, 1e-2),
    OracleCase("conjugate 1->1", "conjugate", 1, 1, 0.0, 0.0, 12, 1e-2),
)

DEFAULT_CUTOFF = {"broadcast": 10, "purify": 14, "conjugate": 12}


def run_oracle_case(case: OracleCase, samples: int = 100_000, seed: int | None = None) -> dict:
    """Compare one oracle run with the Gaussian simulator."""
    if case.kind == "broadcast":
        orc = fock.oracle_broadcast(case.n, case.m, case.nbar, case.alpha, case.cutoff)
        ref = (circuits.run_broadcast if case.m > case.n else circuits.run_purify)(case.n, case.m, case.nbar, case.alpha)
    elif case.kind == "purify":
        orc = fock.oracle_purify(case.n, case.m, case.nbar, case.alpha, case.cutoff)
        ref = circuits.run_purify(case.n, case.m, case.nbar, case.alpha)
    elif case.kind == "conjugate":
        orc = fock.oracle_phase_conjugate(case.n, case.m, case.nbar, case.alpha, case.cutoff, samples, seed)
        ref = circuits.run_phase_conjugate(case.n, case.m, case.nbar, case.alpha)
    else:
        raise UsageError(f"unknown oracle kind {case.kind!r}")
    ref_amp = ref.per_copy_amplitude[0]
    amp = complex(np.mean([c.amplitude for c in orc.copies]))
    d_nbar = abs(orc.nbar_out - ref.output_nbar)
    d_amp = abs(amp - ref_amp)
    tol_amp = 1e-2 * (1 + abs(case.alpha))
    passed = d_nbar <= case.tol and d_amp <= tol_amp and orc.min_fidelity >= fock.FIDELITY_TARGET
    return {
        "name": case.name,
        "kind": case.kind,
        "n": case.n,
        "m": case.m,
        "nbar_in": case.nbar,
        "alpha_re": complex(case.alpha).real,
        "alpha_im": complex(case.alpha).imag,
        "cutoff": case.cutoff,
        "samples": orc.samples,
        "gaussian_nbar_out": ref.output_nbar,
        "oracle_nbar_out": orc.nbar_out,
        "delta_nbar": d_nbar,
        "tol_nbar": case.tol,
        "gaussian_amp_re": ref_amp.real,
        "gaussian_amp_im": ref_amp.imag,
        "oracle_amp_re": amp.real,
        "oracle_amp_im": amp.imag,
        "delta_amplitude": d_amp,
        "tol_amplitude": tol_amp,
        "min_fidelity": orc.min_fidelity,
        "trace_deficit": orc.trace_deficit,
        "passed": bool(passed),
    }


def _verify_cases(cfg: RunConfig) -> list[OracleCase]:
    if cfg.n is not None:
        kind = cfg.kind or ("broadcast" if cfg.m >= cfg.n and cfg.m > 1 else "purify")
        cutoff = cfg.cutoff or DEFAULT_CUTOFF[kind]
        return [OracleCase(f"custom {kind} {cfg.n}->{cfg.m}", kind, cfg.n, cfg.m, cfg.nbar, cfg.alpha, cutoff,
                           1e-2 if kind == "conjugate" else 5e-3)]
    unknown = set(cfg.cases) - set(DEFAULT_CUTOFF)
    if unknown:
        raise UsageError(f"unknown verify case groups: {sorted(unknown)}")
    cases = [c for c in DEFAULT_SUITE if c.kind in cfg.cases]
    if cfg.cutoff is not None:
        cases = [OracleCase(c.name, c.kind, c.n, c.m, c.nbar, c.alpha, cfg.cutoff, c.tol) for c in cases]
    return cases


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    results = [run_oracle_case(c, cfg.samples, cfg.seed) for c in _verify_cases(cfg)]
    ok = all(r["passed"] for r in results)
    if cfg.format == "json":
        text = _json({"passed": ok, "cases": results})
    elif cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(results[0]), lineterminator="\n")
        writer.writeheader()
        for r in results:
            writer.writerow({k: _csv_value(v) for k, v in r.items()})
        text = buf.getvalue()
    else:
        lines = []
        for r in results:
            lines.append(
                f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']:<26} D={r['cutoff']:<3}"
                f" nbar gauss={r['gaussian_nbar_out']:.6f} oracle={r['oracle_nbar_out']:.6f}"
                f" delta={r['delta_nbar']:.2e} (tol {r['tol_nbar']:.0e})"
                f"  |d amp|={r['delta_amplitude']:.2e}  F={r['min_fidelity']:.6f}"
                f"  deficit={r['trace_deficit']:.1e}"
            )
        lines.append("all cases passed" if ok else "some cases FAILED")
        text = "\n".join(lines) + "\n"
    return (0 if ok else 1), text


def cmd_bounds(cfg: RunConfig) -> tuple[int, str]:
    gamma = cfg.gamma if cfg.gamma is not None else cfg.nbar + 0.5
    n, m = cfg.n, cfg.m
    out = {"gamma": gamma, "n": n, "m": m}
    out["broadcast_bound"] = bounds.broadcast_bound(gamma, n, m) if m > n else None
    out["purification_bound"] = bounds.purification_bound(gamma, n)
    out["phase_conj_bound"] = bounds.phase_conj_bound(gamma, n)
    out["amplifier_bound"] = bounds.amplifier_bound(gamma, m / n)
    out["superbroadcast_threshold"] = bounds.superbroadcast_threshold(n, m) if m > n >= 2 else None
    if cfg.format == "json":
        return 0, _json(out)
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(out))
        writer.writerow(["" if v is None else _csv_value(v) for v in out.values()])
        return 0, buf.getvalue()
    return 0, "".join(f"{k:<26}{'n/a' if v is None else v}\n" for k, v in out.items())


COMMANDS = {
    "broadcast": cmd_single,
    "purify": cmd_single,
    "conjugate": cmd_single,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
}


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        code, text = COMMANDS[cfg.command](cfg)
    except (UsageError, fock.ResourceGuardError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(text, cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
