"""Trajectories, partial Lyapunov exponents and Monte-Carlo exponents.

States are renormalised to unit length after every step and the logarithm of
each normalising factor is accumulated, so horizons of 10^6 steps neither
overflow nor underflow.  All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError, InputError, NumericError
from .linalg import SystemSpec
from .spectral import BoundsTable, CoBoundsTable
from .symbolic import BlockSchedule, LawProgram

MC_CHUNK = 64  # trials per batch; fixed so results never depend on thread count


@dataclass
class TrajectoryRecord:
    x0: np.ndarray
    law_id: str
    horizon: int
    log_norms: np.ndarray  # log|x_n| for n = 1..horizon
    checkpoints: np.ndarray  # step indices of the stored unit states
    renorm_states: np.ndarray  # x_n / |x_n| at the checkpoints
    final_state: np.ndarray = field(repr=False, default=None)

    @property
    def partial_exponents(self) -> np.ndarray:
        return self.log_norms / np.arange(1, self.horizon + 1)

    @property
    def log_norm0(self) -> float:
        return float(np.log(np.linalg.norm(self.x0)))

    def csv_rows(self) -> tuple[list[str], list[list]]:
        lam = self.partial_exponents
        return ["n", "log_norm", "partial_exponent"], [
            [n + 1, float(v), float(l)] for n, (v, l) in enumerate(zip(self.log_norms, lam))
        ]

    def to_dict(self) -> dict:
        return {
            "kind": "trajectory",
            "x0": self.x0.tolist(),
            "law_id": self.law_id,
            "horizon": self.horizon,
            "final_log_norm": float(self.log_norms[-1]),
            "final_partial_exponent": float(self.log_norms[-1] / self.horizon),
            "checkpoints": self.checkpoints.tolist(),
            "renorm_states": self.renorm_states.tolist(),
        }


def _as_x0(x0, d: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x0, dtype=float)).ravel()
    if x.shape != (d,):
        raise InputError(f"initial vector has {x.size} entries, system dimension is {d}")
    if not np.all(np.isfinite(x)) or not np.any(x):
        raise DomainError("initial vector must be finite and nonzero")
    return x


class Cursor:
    """Resumable renormalised trajectory: unit state ``u``, log-norm ``s``, step ``n``.

    Advancing in pieces performs exactly the same floating-point operations
    as advancing in one go, so a trajectory built incrementally replays
    bit-identically through ``simulate``.
    """

    def __init__(self, sys: SystemSpec, x0):
        self.sys = sys
        x = _as_x0(x0, sys.dim)
        r0 = float(np.linalg.norm(x))
        self.u = x / r0
        self.s = math.log(r0)
        self.n = 0
        self._F = [tuple(float(v) for v in M.ravel()) for M in sys.matrices] if sys.dim == 2 else None

    @property
    def norm(self) -> float:
        return math.exp(self.s)

    def advance(self, symbols: Sequence[int], keep: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray]:
        """Apply the symbols; returns log-norms after each and unit states at local steps ``keep``."""
        sys = self.sys
        d = sys.dim
        sym = np.asarray(symbols, dtype=np.int64).ravel()
        if sym.size and (sym.min() < 1 or sym.max() > sys.K):
            raise InputError("symbol outside alphabet")
        N = sym.size
        keep = list(keep)
        out = np.empty(N)
        kept = np.empty((len(keep), d))
        if N == 0:
            return out, kept
        if d == 1:
            a = sys.matrices[:, 0, 0][sym - 1]
            out[:] = np.cumsum(np.concatenate([[self.s], np.log(np.abs(a))]))[1:]
            signs = np.cumprod(np.sign(a)) * self.u[0]
            for j, c in enumerate(keep):
                kept[j] = signs[c - 1]
            self.u = np.array([signs[-1]])
            self.s = float(out[-1])
            self.n += N
            return out, kept
        s = self.s
        marks = {c: j for j, c in enumerate(keep)}
        hyp, log = math.hypot, math.log
        if d == 2:
            F = self._F
            u0, u1 = float(self.u[0]), float(self.u[1])
            for i, k in enumerate(sym.tolist()):
                a, b, c, e = F[k - 1]
                u0, u1 = a * u0 + b * u1, c * u0 + e * u1
                f = hyp(u0, u1)
                if not f > 0:
                    raise NumericError(f"state vanished at step {self.n + i + 1}")
                u0, u1 = u0 / f, u1 / f
                s += log(f)
                out[i] = s
                if i + 1 in marks:
                    kept[marks[i + 1]] = (u0, u1)
            self.u = np.array([u0, u1])
        else:
            u = self.u
            mats = sys.matrices
            for i, k in enumerate(sym.tolist()):
                u = mats[k - 1] @ u
                f = float(np.linalg.norm(u))
                if not f > 0:
                    raise NumericError(f"state vanished at step {self.n + i + 1}")
                u = u / f
                s += log(f)
                out[i] = s
                if i + 1 in marks:
                    kept[marks[i + 1]] = u
            self.u = u
        self.s = s
        self.n += N
        return out, kept


def trajectory_log_norms(sys: SystemSpec, symbols: Sequence[int], x0, keep: Sequence[int] = ()):
    """log|x_n| for n = 1..len(symbols), unit states at the steps in ``keep``, final unit state."""
    cur = Cursor(sys, x0)
    out, kept = cur.advance(symbols, keep)
    return out, kept, cur.u


def _law_id(law: LawProgram) -> str:
    try:
        d = law.to_dict()
    except Exception:
        return type(law).__name__
    if d.get("kind") == "periodic":
        return f"periodic:{d['prefix']}|{d['period']}"
    return str(d.get("kind", "law"))


def default_checkpoints(horizon: int) -> list[int]:
    return sorted({2**j for j in range(int(math.log2(horizon)) + 1)} | {horizon})


def simulate(sys: SystemSpec, law: LawProgram, x0, horizon: int, checkpoints: Sequence[int] | None = None) -> TrajectoryRecord:
    """Follow x_n = S_sigma(n) x_{n-1} for n = 1..horizon."""
    if horizon < 1:
        raise DomainError("horizon must be positive")
    x = _as_x0(x0, sys.dim)
    sym = law.take(horizon)
    cps = default_checkpoints(horizon) if checkpoints is None else sorted({int(c) for c in checkpoints if 1 <= c <= horizon})
    log_norms, states, final = trajectory_log_norms(sys, sym, x, cps)
    return TrajectoryRecord(x, _law_id(law), horizon, log_norms, np.asarray(cps, dtype=np.int64), states, final)


# -- partial exponents -----------------------------------------------------


@dataclass
class ExponentSummary:
    liminf_est: float
    limsup_est: float
    irregular: bool
    windows: list[tuple[int, int]]
    irregularity_tol: float
    horizon: int

    def to_dict(self) -> dict:
        return {"kind": "partial_exponents", "liminf_est": self.liminf_est, "limsup_est": self.limsup_est,
                "irregular": self.irregular, "windows": [list(w) for w in self.windows],
                "irregularity_tol": self.irregularity_tol, "horizon": self.horizon}


def default_windows(N: int) -> list[tuple[int, int]]:
    """[N/4, N/2] and [N/2, N]: wide enough to hold two successive dyadic scales."""
    return [(max(1, N // 4), max(1, N // 2)), (max(1, N // 2), N)]


def partial_exponents(rec: TrajectoryRecord, tail_windows: Sequence[tuple[int, int]] | None = None,
                      irregularity_tol: float = 1e-2) -> ExponentSummary:
    """min and max of lambda_n = log|x_n| / n over the tail windows (inclusive)."""
    N = rec.horizon
    windows = default_windows(N) if tail_windows is None else [tuple(map(int, w)) for w in tail_windows]
    lam = rec.partial_exponents
    vals = []
    for lo, hi in windows:
        if not 1 <= lo <= hi <= N:
            raise DomainError(f"window [{lo}, {hi}] outside 1..{N}")
        vals.append(lam[lo - 1:hi])
    v = np.concatenate(vals)
    lo_est, hi_est = float(v.min()), float(v.max())
    return ExponentSummary(lo_est, hi_est, hi_est - lo_est > irregularity_tol, list(windows), irregularity_tol, N)


# -- Monte Carlo -----------------------------------------------------------


@dataclass
class MonteCarloResult:
    mean: float
    stderr: float
    estimates: np.ndarray
    seed: int
    horizon: int
    weights: tuple[float, ...]
    laws: list[np.ndarray] | None = field(default=None, repr=False)
    x0s: np.ndarray | None = field(default=None, repr=False)
    min_log_norms: np.ndarray | None = field(default=None, repr=False)
    max_log_norms: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"kind": "monte_carlo", "mean": self.mean, "stderr": self.stderr, "seed": self.seed,
                "trials": int(self.estimates.size), "horizon": self.horizon, "weights": list(self.weights),
                "estimates": self.estimates.tolist()}


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Independent counter-based generator for one trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def sample_trial(K: int, d: int, weights: np.ndarray, horizon: int, seed: int, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """(x0 uniform on the unit sphere, i.i.d. symbols in 1..K) for one trial."""
    rng = trial_stream(seed, trial)
    x0 = rng.standard_normal(d)
    x0 /= np.linalg.norm(x0)
    sym = rng.choice(K, size=horizon, p=weights) + 1
    return x0, sym.astype(np.int64)


def _run_batch(mats: np.ndarray, syms: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Advance a batch of trajectories in lockstep; returns final, min and max log-norms."""
    T, N = syms.shape
    d = mats.shape[1]
    s = np.zeros(T)
    lo = np.full(T, np.inf)
    hi = np.full(T, -np.inf)
    if d == 1:
        logs = np.log(np.abs(mats[:, 0, 0]))[syms - 1]
        run = np.cumsum(logs, axis=1)
        return run[:, -1], run.min(axis=1), run.max(axis=1)
    X = X.copy()
    idx = syms - 1
    for n in range(N):
        M = mats[idx[:, n]]
        X = np.einsum("tij,tj->ti", M, X)
        f = np.sqrt(np.einsum("ti,ti->t", X, X))
        X /= f[:, None]
        s += np.log(f)
        np.minimum(lo, s, out=lo)
        np.maximum(hi, s, out=hi)
    return s, lo, hi


def random_switching_exponent(sys: SystemSpec, weights: Sequence[float] | None, trials: int, horizon: int, seed: int,
                              keep_laws: bool = False, threads: int | None = None) -> MonteCarloResult:
    """Top-exponent estimate lambda_N averaged over i.i.d. random laws.

    Trial t draws its initial direction and then its symbols from
    ``trial_stream(seed, t)``; trials are batched in fixed chunks, so the
    result is bit-identical for any thread count.
    """
    if trials < 1 or horizon < 1:
        raise DomainError("trials and horizon must be positive")
    K = sys.K
    w = np.full(K, 1.0 / K) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (K,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InputError("weights must be a probability vector over the alphabet")
    w = w / w.sum()

    def chunk(start: int):
        ids = range(start, min(trials, start + MC_CHUNK))
        draws = [sample_trial(K, sys.dim, w, horizon, seed, t) for t in ids]
        X = np.array([x for x, _ in draws])
        S = np.array([s for _, s in draws])
        fin, lo, hi = _run_batch(np.asarray(sys.matrices), S, X)
        return fin, lo, hi, X, (S if keep_laws else None)

    parts = ordered_map(chunk, range(0, trials, MC_CHUNK), threads)
    fin = np.concatenate([p[0] for p in parts])
    est = fin / horizon
    mean = float(np.mean(est))
    stderr = float(np.std(est, ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    laws = [row for p in parts for row in p[4]] if keep_laws else None
    return MonteCarloResult(mean, stderr, est, int(seed), horizon, tuple(float(x) for x in w), laws,
                            np.concatenate([p[3] for p in parts]),
                            np.concatenate([p[1] for p in parts]), np.concatenate([p[2] for p in parts]))


def explicit_law(symbols: Sequence[int]) -> BlockSchedule:
    """A finite law holding exactly the given symbols."""
    return BlockSchedule(symbols)


# -- consistency with JSR bounds -----------------------------------------


@dataclass
class ConsistencyCheck:
    index: int
    exponent: float
    lower: float
    upper: float
    ok: bool


@dataclass
class ConsistencyReport:
    checks: list[ConsistencyCheck]
    log_upper: float
    log_lower: float

    @property
    def violations(self) -> list[ConsistencyCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"kind": "exponent_consistency", "log_upper": self.log_upper, "log_lower": self.log_lower,
                "consistent": self.consistent,
                "checks": [{"index": c.index, "exponent": c.exponent, "lower": c.lower, "upper": c.upper, "ok": c.ok}
                           for c in self.checks]}


def exponent_vs_jsr_bounds(sys: SystemSpec, records: Sequence[TrajectoryRecord], bounds: BoundsTable,
                           cobounds: CoBoundsTable, tol: float | None = None) -> ConsistencyReport:
    """Check log(co-JSR lower) - slack <= lambda_N <= log(JSR upper) + slack.

    With U = g_m^(1/m) the best norm bound, |P_N| <= U^N * kappa where
    kappa = max(1, g_1 / U)^(m-1) covers the N mod m leftover steps; the
    co-norm side is symmetric.  slack = (log kappa + |log|x0||) / N.
    """
    tol = sys.atol if tol is None else tol
    up_row = min(bounds.rows, key=lambda r: (r.upper, r.n))
    lo_row = max(cobounds.rows, key=lambda r: (r.lower, -r.n))
    U, Lc = up_row.upper, lo_row.lower
    log_kappa_up = (up_row.n - 1) * max(0.0, math.log(sys.max_norm / U))
    log_kappa_lo = (lo_row.n - 1) * max(0.0, math.log(Lc / sys.min_conorm))
    checks = []
    for i, rec in enumerate(records):
        N = rec.horizon
        lam = float(rec.log_norms[-1] / N)
        x0 = abs(rec.log_norm0)
        hi = math.log(U) + (log_kappa_up + x0) / N + tol
        lo = math.log(Lc) - (log_kappa_lo + x0) / N - tol
        checks.append(ConsistencyCheck(i, lam, lo, hi, lo <= lam <= hi))
    return ConsistencyReport(checks, math.log(U), math.log(Lc))
