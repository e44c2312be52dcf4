"""Command-line interface.

Exit codes: 0 success, 2 a certified negative answer (for example a system on
which fiber chaos is provably impossible), 1 any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import classify, io, lyapunov, spectral, synth
from ._parallel import ENV_THREADS
from .errors import InclusionError, InputError
from .linalg import SystemSpec

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2
COMMANDS = ("analyze", "feasibility", "synthesize", "simulate", "classify", "growth")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _word(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a word such as '1 2 2', got {text!r}") from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    format: str | None = None
    depth: int = 6
    horizon: int | None = None
    k_max: int = 10
    seed: int = 0
    tol: float | None = None
    threads: int | None = None
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 keeps meaning a certified negative."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="inclusionlab", description="Analyse switched linear systems x_n = S_sigma(n) x_(n-1).")
    common = _Parser(add_help=False)
    common.add_argument("--in", dest="input", help="system JSON file")
    common.add_argument("--out", dest="output", help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), help="default: csv when --out ends in .csv, else json")
    common.add_argument("--depth", type=_positive_int, default=6, help="word length for enumeration searches")
    common.add_argument("--horizon", type=_positive_int, help="number of steps")
    common.add_argument("--k-max", dest="k_max", type=_positive_int, default=10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive_float)
    common.add_argument("--threads", type=_positive_int, help=f"worker threads (default: ${ENV_THREADS} or 1)")
    common.add_argument("--json-errors", action="store_true", help="report errors as JSON on standard error")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="JSR and co-JSR bounds, stability, finiteness, reducibility")
    sub.add_parser("feasibility", parents=[common], help="search for chaos witnesses or impossibility certificates")
    sub.add_parser("growth", parents=[common], help="maximal product norms g_n and their polynomial exponent")

    s = sub.add_parser("synthesize", parents=[common], help="build a chaotic or zero-exponent switching law")
    s.add_argument("--mode", choices=("uniform", "zero", "rotation"), default="uniform")
    s.add_argument("--w-contract", type=_word)
    s.add_argument("--w-expand", type=_word)
    s.add_argument("--prefix", type=_word, default=())
    s.add_argument("--x0", type=_floats)
    s.add_argument("--band", type=_floats, default=[0.25, 4.0])
    s.add_argument("--rot-index", type=_positive_int, default=1)
    s.add_argument("--stable-x0", type=_floats)
    s.add_argument("--stable-law", help="law JSON driving the stable direction to zero")
    s.add_argument("--divergent-y0", type=_floats)
    s.add_argument("--divergent-law", help="law JSON driving the divergent direction to infinity")
    s.add_argument("--divergent-index", type=_positive_int, help="build a periodic divergent law from this symbol")
    s.add_argument("--u", type=_floats)
    s.add_argument("--eps", type=_floats, default=[0.5, 0.1, 9.9e-4])
    s.add_argument("--align-cap", type=_positive_int, default=1_000_000)
    s.add_argument("--drive-cap", type=_positive_int, default=10_000)

    m = sub.add_parser("simulate", parents=[common], help="trajectory log-norms or Monte-Carlo exponents")
    m.add_argument("--law", help="law JSON; omit for i.i.d. random switching")
    m.add_argument("--x0", type=_floats)
    m.add_argument("--trials", type=_positive_int, default=1)
    m.add_argument("--weights", type=_floats)

    c = sub.add_parser("classify", parents=[common], help="Balde-Jouan run analysis of a law")
    c.add_argument("--law", required=True, help="law JSON")
    c.add_argument("--delta", type=_positive_float, help="also run the stability check on --in with this threshold")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = {"command", "input", "output", "format", "depth", "horizon", "k_max", "seed", "tol", "threads"}
    opts = {k: v for k, v in vars(args).items() if k not in base}
    return RunConfig(args.command, args.input, args.output, args.format, args.depth, args.horizon, args.k_max,
                     args.seed, args.tol, args.threads, opts)


# -- commands --------------------------------------------------------------


def _need_system(cfg: RunConfig) -> SystemSpec:
    if not cfg.input:
        raise InputError("--in SYSTEM.json is required")
    sysm = io.load_system(cfg.input)
    if cfg.tol is not None:
        sysm = SystemSpec(np.array(sysm.matrices), sysm.nonsingularity_tol, cfg.tol, sysm.labels)
    return sysm


def cmd_analyze(cfg: RunConfig):
    S = _need_system(cfg)
    jt = spectral.jsr_bounds(S, cfg.depth, threads=cfg.threads)
    ct = spectral.cojsr_bounds(S, cfg.depth, threads=cfg.threads)
    st = spectral.periodic_stability_check(S, cfg.depth, threads=cfg.threads)
    fc = spectral.finiteness_candidate(S, cfg.depth, threads=cfg.threads)
    rp = spectral.reducibility_probe(S, min(cfg.depth, 3))
    payload = {"command": "analyze", "jsr": jt.to_dict(), "cojsr": ct.to_dict(), "periodic_stability": st.to_dict(),
               "finiteness": fc.to_dict(), "reducibility": rp.to_dict()}
    return payload, jt.csv_rows(), EXIT_OK


def cmd_feasibility(cfg: RunConfig):
    S = _need_system(cfg)
    v = spectral.chaos_feasibility(S, cfg.depth, tol=cfg.tol, threads=cfg.threads)
    code = EXIT_NEGATIVE if isinstance(v, spectral.InfeasibleCertified) else EXIT_OK
    d = v.to_dict()
    return {"command": "feasibility", "verdict": d}, (list(d), [list(d.values())]), code


def cmd_growth(cfg: RunConfig):
    S = _need_system(cfg)
    g = spectral.growth_curve(S, cfg.depth, threads=cfg.threads)
    return {"command": "growth", "growth": g.to_dict()}, g.csv_rows(), EXIT_OK


def cmd_synthesize(cfg: RunConfig):
    S = _need_system(cfg)
    o = cfg.options
    mode = o["mode"]
    if mode == "rotation":
        return _synth_rotation(S, cfg)
    wc, we = o.get("w_contract"), o.get("w_expand")
    verdict = None
    if wc is None or we is None:
        verdict = spectral.chaos_feasibility(S, cfg.depth, tol=cfg.tol, threads=cfg.threads)
        if isinstance(verdict, spectral.InfeasibleCertified):
            return {"command": "synthesize", "mode": mode, "verdict": verdict.to_dict()}, None, EXIT_NEGATIVE
        if not isinstance(verdict, spectral.FeasibleWitness):
            raise InclusionError(f"no witness words found up to depth {cfg.depth}; pass --w-contract/--w-expand")
        wc = wc or verdict.w_contract
        we = we or verdict.w_expand
    if mode == "uniform":
        res = synth.synthesize_uniform(S, wc, we, o.get("prefix") or (), cfg.k_max)
        payload = {"command": "synthesize", "mode": mode, "law": res.law.to_dict(), "certificate": res.cert.to_dict()}
        rows = (["k", "ell_k", "L_k", "norm_after_contract", "conorm_after_expand", "cumulative_length"],
                [[s.k, s.ell_k, s.L_k, s.norm_after_contract, s.conorm_after_expand, s.cumulative_length]
                 for s in res.cert.stages])
    else:
        x0 = o.get("x0") or [1.0] + [0.0] * (S.dim - 1)
        horizon = cfg.horizon or 10_000
        res = synth.synthesize_zero_exponent(S, wc, we, x0, tuple(o["band"]), horizon)
        payload = {"command": "synthesize", "mode": mode, **{k: v for k, v in res.to_dict().items() if k != "kind"}}
        rows = (["n", "log_norm"], [[i + 1, float(v)] for i, v in enumerate(res.log_norms)])
    if verdict is not None:
        payload["verdict"] = verdict.to_dict()
    return payload, rows, EXIT_OK


def _synth_rotation(S: SystemSpec, cfg: RunConfig):
    o = cfg.options
    r = o["rot_index"]
    if not o.get("stable_x0") or not o.get("stable_law"):
        raise InputError("rotation mode needs --stable-x0 and --stable-law")
    stable_law = io.load_law(o["stable_law"])
    if o.get("divergent_law"):
        div_law = io.load_law(o["divergent_law"])
        if not o.get("divergent_y0"):
            raise InputError("--divergent-law needs --divergent-y0")
        y0 = np.asarray(o["divergent_y0"], dtype=float)
    elif o.get("divergent_index"):
        div_law, y0, _ = synth.hyperbolic_divergent_law(S, r, o["divergent_index"])
    else:
        raise InputError("rotation mode needs --divergent-law or --divergent-index")
    x0 = np.asarray(o["stable_x0"], dtype=float)
    u = o.get("u") or [1.0, 0.0]
    inp = synth.RotationSynthInput(r, x0 / np.linalg.norm(x0), stable_law, y0 / np.linalg.norm(y0), div_law,
                                   np.asarray(u), tuple(o["eps"]), o["align_cap"], o["drive_cap"])
    res = synth.synthesize_rotation(S, inp)
    payload = {"command": "synthesize", "mode": "rotation", "divergent_law": div_law.to_dict(),
               **{k: v for k, v in res.to_dict().items() if k != "kind"}}
    rows = (["k", "eps", "min_norm", "min_index", "max_norm", "max_index", "cumulative_length"],
            [[s.k, s.eps, s.min_norm, s.min_index, s.max_norm, s.max_index, s.cumulative_length]
             for s in res.pointwise_cert])
    return payload, rows, EXIT_OK


def cmd_simulate(cfg: RunConfig):
    S = _need_system(cfg)
    o = cfg.options
    horizon = cfg.horizon or 1000
    if o.get("law"):
        law = io.load_law(o["law"])
        x0 = o.get("x0") or [1.0] + [0.0] * (S.dim - 1)
        rec = lyapunov.simulate(S, law, x0, horizon)
        summ = lyapunov.partial_exponents(rec)
        payload = {"command": "simulate", "trajectory": rec.to_dict(), "exponents": summ.to_dict()}
        return payload, rec.csv_rows(), EXIT_OK
    mc = lyapunov.random_switching_exponent(S, o.get("weights"), o["trials"], horizon, cfg.seed, threads=cfg.threads)
    payload = {"command": "simulate", "monte_carlo": mc.to_dict()}
    rows = (["trial", "exponent"], [[i, float(e)] for i, e in enumerate(mc.estimates)])
    return payload, rows, EXIT_OK


def cmd_classify(cfg: RunConfig):
    o = cfg.options
    law = io.load_law(o["law"])
    horizon = cfg.horizon or 1 << 14
    v = classify.bj_verdict(law, horizon)
    prof = classify.bj_run_profile(law, horizon)
    payload = {"command": "classify", "verdict": v.to_dict(), "profile": prof.to_dict()}
    if o.get("delta") is not None:
        S = _need_system(cfg)
        payload["stability"] = classify.stability_under_nonchaotic(S, law, horizon, o["delta"]).to_dict()
    rows = (["symbol", "start", "length"], [[k, s, l] for k in sorted(prof.runs) for s, l in prof.runs[k]])
    return payload, rows, EXIT_OK


HANDLERS = {"analyze": cmd_analyze, "feasibility": cmd_feasibility, "synthesize": cmd_synthesize,
            "simulate": cmd_simulate, "classify": cmd_classify, "growth": cmd_growth}


def run(cfg: RunConfig) -> int:
    """Dispatch one command and write its report; returns the exit code."""
    payload, rows, code = HANDLERS[cfg.command](cfg)
    fmt = cfg.format or ("csv" if cfg.output and cfg.output.lower().endswith(".csv") else "json")
    if fmt == "csv":
        if rows is None:
            raise InputError("this result has no tabular form; use --format json")
        io.write_text(io.csv_text(*rows), cfg.output)
    else:
        io.write_text(io.dumps(payload), cfg.output)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    try:
        return run(cfg)
    except (InclusionError, ValueError, ArithmeticError, IndexError, RuntimeError, OSError) as exc:
        if cfg.options.get("json_errors"):
            sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        else:
            sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
