"""Command-line entry point.

    psiepistemic <command> [--config PATH] [--seed N] [--out DIR] [--format csv|json]

Every command writes its data files plus ``manifest.json`` into ``--out``.
Exit codes: 0 success, 2 configuration error, 3 numerical or infeasibility
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .amplitudes import w_decay_amplitudes, w_decay_dGamma, w_decay_total_width, wh_amplitude_arrays, wh_dSigma
from .config import canonical, config_hash, constants_of, load, resolve, scenario_of
from .ensemble import run_experiment
from .errors import ConfigError, InfeasibleError, PsiEpistemicError
from .ontology import pbr_basis
from .oracles import w_decay_amplitudes_oracle, wh_production_amplitudes_oracle
from .povm import WDECAY_BASIS, AngularPartition, neutrino_povm, povm_outcome_prob, wdecay_angular_povm
from .stats import certainty_bound_one_sided, chi2_bound_two_sided, poisson_crossover, poisson_limit

COMMANDS = ("fig1", "fig2", "povm-table", "limits", "simulate", "pbr-verify", "selftest")
EXIT_IO = 4


class RunWriter:
    """Collects output files, writing them in call order, and records their digests."""

    def __init__(self, out: Path, fmt: str):
        self.out = out
        self.fmt = fmt
        self.outputs: dict[str, str] = {}

    def text(self, name: str, content: str) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
        self.outputs[name] = hashlib.sha256(content.encode()).hexdigest()

    def json(self, name: str, obj) -> None:
        self.text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def table(self, stem: str, columns: list[str], rows) -> None:
        rows = [[_plain(v) for v in row] for row in rows]
        if self.fmt == "json":
            self.json(f"{stem}.json", {"columns": columns, "rows": rows})
            return
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        self.text(f"{stem}.csv", buf.getvalue())


def _plain(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# --- commands ---------------------------------------------------------------


def cmd_fig1(cfg: dict, w: RunWriter) -> None:
    c = constants_of(cfg)
    x = np.linspace(-1.0, 1.0, int(cfg["fig1"]["n_points"]))
    cols = {lam: w_decay_dGamma(None, lam, cfg["ell"], c, cos_theta=x) for lam in (+1, -1, 0)}
    w.table("fig1", ["cos_theta", "dGamma_plus", "dGamma_minus", "dGamma_zero"], zip(x, cols[+1], cols[-1], cols[0]))


def cmd_fig2(cfg: dict, w: RunWriter) -> None:
    c = constants_of(cfg)
    f = cfg["fig2"]
    th = np.linspace(0.0, np.pi, int(f["n_theta"]))
    ts = np.linspace(0.0, np.pi, int(f["n_theta_star"]))
    T, TS = np.meshgrid(th, ts, indexing="ij")
    vals = {lam: wh_dSigma(T, TS, f["phi_star"], lam, f["sqrt_s"], c) for lam in (0, +1, -1)}
    rows = zip(T.ravel(), TS.ravel(), vals[0].ravel(), vals[+1].ravel(), vals[-1].ravel())
    w.table("fig2", ["theta", "theta_star", "dsigma_zero", "dsigma_plus", "dsigma_minus"], rows)


def _partition(section: dict) -> AngularPartition:
    if section["edges"] is not None:
        return AngularPartition(tuple(section["edges"]))
    return AngularPartition.isolation(float(section["eps"]))


def cmd_povm_table(cfg: dict, w: RunWriter) -> None:
    part = _partition(cfg["povm_table"])
    elements = wdecay_angular_povm(part, cfg["ell"], constants_of(cfg))
    rows = [(lo, hi, *(povm_outcome_prob(e, lam) for lam in WDECAY_BASIS)) for (lo, hi), e in zip(part.bins, elements)]
    w.table("povm_table", ["bin_lo", "bin_hi", "P_plus", "P_minus", "P_zero"], rows)


def cmd_limits(cfg: dict, w: RunWriter) -> None:
    lim = cfg["limits"]
    ns = [int(n) for n in lim["n_values"]]
    if any(n < 1 for n in ns):
        raise ConfigError("limits.n_values must be positive")
    rows = [(n, chi2_bound_two_sided(n, lim["expectation"]), certainty_bound_one_sided(n), poisson_limit(n)) for n in sorted(ns)]
    w.table("limits", ["n", "two_sided_chi2", "one_sided_certainty", "poisson_zero"], rows)
    w.json("limits_summary.json", {"poisson_tighter_than_one_sided_for_n_above": poisson_crossover()})


def cmd_pbr_verify(cfg: dict, w: RunWriter) -> None:
    p = cfg["pbr"]
    rows = []
    for a in p["alphas"]:
        try:
            b = pbr_basis(int(p["n"]), float(a), seed=int(cfg["seed"]))
            V = b.vectors
            ortho = float(np.abs(V.conj().T @ V - np.eye(V.shape[0])).max())
            complete = float(np.abs(V @ V.conj().T - np.eye(V.shape[0])).max())
            rows.append((float(a), True, b.residual, ortho, complete))
        except InfeasibleError as exc:
            rows.append((float(a), False, exc.residual, float("nan"), float("nan")))
    w.table("pbr_verify", ["alpha", "feasible", "max_overlap", "orthonormality", "completeness"], rows)


def cmd_simulate(cfg: dict, w: RunWriter) -> dict:
    scenario = scenario_of(cfg)
    counts, report = run_experiment(scenario, cfg["scenario"]["analysis"], cfg["scenario"]["delta_syst"])
    if w.fmt == "json":
        w.json("counts.json", {"bins": counts.labels, "counts": [int(k) for k in counts.counts], **counts.sidecar()})
    else:
        w.text("counts.csv", counts.to_csv())
        w.json("counts.meta.json", counts.sidecar())
    w.json("report.json", report.to_dict())
    w.text("config.json", json.dumps(cfg, indent=2, sort_keys=True) + "\n")
    return {"verdict": report.verdict}


def selftest_checks(cfg: dict) -> dict[str, bool]:
    c = constants_of(cfg)
    checks = {}
    a, o = w_decay_amplitudes(0.7, "mu", c), w_decay_amplitudes_oracle(0.7, "mu", c)
    checks["w_decay_oracle"] = all(abs(abs(a[k]) ** 2 - abs(o[k]) ** 2) <= 1e-10 * max(abs(o[k]) ** 2, 1e-300) + 1e-20 for k in a.keys())
    widths = [w_decay_total_width(lam, "mu", c) for lam in WDECAY_BASIS]
    checks["equal_widths"] = bool(np.ptp(widths) <= 1e-10 * widths[0])
    phys = wh_amplitude_arrays(1.1, 0.4, 0.0, 500.0, c)
    orc = wh_production_amplitudes_oracle(1.1, 0.4, 0.0, 500.0, c)
    checks["wh_oracle"] = all(abs(abs(phys[lam]) ** 2 - abs(orc[(-1, 1, lam)]) ** 2) <= 1e-8 * abs(orc[(-1, 1, lam)]) ** 2 for lam in WDECAY_BASIS)
    em, ep = neutrino_povm(2.0)
    checks["neutrino_completeness"] = bool(np.abs(em.matrix + ep.matrix - np.eye(2)).max() <= 1e-12)
    rows = sum(e.matrix for e in wdecay_angular_povm(AngularPartition.uniform(6), "e", c))
    checks["angular_rows"] = bool(np.abs(rows - np.eye(3)).max() <= 1e-10)
    checks["pbr_half_pi"] = pbr_basis(2, np.pi / 2).residual <= 1e-10
    checks["limits"] = abs(chi2_bound_two_sided(1000, 1.0) - np.sqrt(7.68e-3)) <= 1e-12 and poisson_limit(10**6) == 3e-6
    return checks


def cmd_selftest(cfg: dict, w: RunWriter) -> dict:
    checks = selftest_checks(cfg)
    w.json("selftest.json", checks)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise InfeasibleError(f"selftest failed: {', '.join(failed)}", float(len(failed)))
    return {"checks": len(checks)}


HANDLERS = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "povm-table": cmd_povm_table,
    "limits": cmd_limits,
    "simulate": cmd_simulate,
    "pbr-verify": cmd_pbr_verify,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psiepistemic", description="Helicity-based tests of psi-epistemic models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON config file (strict keys)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", type=Path, default=Path("psiepistemic-out"), help="output directory")
        p.add_argument("--format", choices=("csv", "json"), help="table format (default csv)")
    return parser


def _error(exc: BaseException, code: int, out: Path | None) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    if out is not None and code != EXIT_IO:
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.format is not None:
            overrides["format"] = args.format
        if overrides:
            cfg = resolve({k: v for k, v in cfg.items() if k != "schema_version"} | overrides)
        writer = RunWriter(args.out, cfg["format"])
        summary = HANDLERS[args.command](cfg, writer) or {}
        manifest = {
            "tool": "psiepistemic",
            "version": __version__,
            "command": args.command,
            "config_sha256": config_hash(cfg),
            "config": json.loads(canonical(cfg)),
            "seed": int(cfg["seed"]),
            "outputs": dict(writer.outputs),
            **summary,
        }
        writer.json("manifest.json", manifest)
    except PsiEpistemicError as exc:
        return _error(exc, exc.exit_code, args.out)
    except OSError as exc:
        return _error(exc, EXIT_IO, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
