"""Constant-run analysis of switching laws.

A law that is nonchaotic in the Balde-Jouan sense must contain, arbitrarily
late, arbitrarily long runs of a single symbol.  Eventually periodic laws are
decided exactly from their canonical period; for other laws only finite run
evidence is available and verdicts say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg import SystemSpec, product_ledger
from .symbolic import EventuallyPeriodic, LawProgram


@dataclass
class RunProfile:
    horizon: int
    runs: dict[int, list[tuple[int, int]]]  # symbol -> [(start, length)], runs clipped at the horizon
    window_max: dict[int, list[int]]  # symbol -> longest run starting in [2^j, 2^(j+1)), per j
    running_max: dict[int, list[int]]
    growing: dict[int, bool]

    def to_dict(self) -> dict:
        return {
            "kind": "run_profile",
            "horizon": self.horizon,
            "symbols": {
                str(k): {"runs": [list(r) for r in self.runs[k]], "window_max": self.window_max[k],
                         "running_max": self.running_max[k], "growing": self.growing[k]}
                for k in sorted(self.runs)
            },
        }

    def sequence(self) -> np.ndarray:
        """The symbols on 1..horizon rebuilt from the runs."""
        out = np.zeros(self.horizon, dtype=np.int64)
        for k, rs in self.runs.items():
            for start, length in rs:
                out[start - 1:start - 1 + length] = k
        return out


def maximal_runs(seq: np.ndarray) -> list[tuple[int, int, int]]:
    """(symbol, start, length) for every maximal constant run; starts are 1-based."""
    if seq.size == 0:
        return []
    cut = np.flatnonzero(np.diff(seq)) + 1
    starts = np.concatenate([[0], cut])
    ends = np.concatenate([cut, [seq.size]])
    return [(int(seq[s]), int(s) + 1, int(e - s)) for s, e in zip(starts, ends)]


def bj_run_profile(law: LawProgram, horizon: int, late_fraction: float = 1 / 16) -> RunProfile:
    """Maximal-run decomposition on 1..horizon plus a dyadic growth envelope.

    A symbol counts as growing when the running maximum of its per-window
    longest run sets at least two records, the last of them in a window
    starting at or after ``late_fraction * horizon``; a run still open at the
    horizon and covering its second half also counts.
    """
    if horizon < 1:
        raise DomainError("horizon must be positive")
    seq = law.take(horizon)
    J = int(math.log2(horizon)) + 1
    runs: dict[int, list[tuple[int, int]]] = {}
    wmax: dict[int, list[int]] = {}
    for k, start, length in maximal_runs(seq):
        runs.setdefault(k, []).append((start, length))
        w = wmax.setdefault(k, [0] * J)
        j = int(math.log2(start))
        w[j] = max(w[j], length)
    rmax, growing = {}, {}
    for k, w in wmax.items():
        rm = list(np.maximum.accumulate(w))
        rmax[k] = [int(x) for x in rm]
        records = [j for j in range(J) if rm[j] > (rm[j - 1] if j else 0)]
        late = bool(records) and 2 ** records[-1] >= late_fraction * horizon
        start, length = runs[k][-1]
        open_tail = start + length - 1 == horizon and start <= horizon // 2 + 1
        growing[k] = (len(records) >= 2 and late) or open_tail
    return RunProfile(horizon, runs, wmax, rmax, growing)


@dataclass
class BJVerdict:
    verdict: str  # NonchaoticCertified | ChaoticCertified | CandidateNonchaotic | Undetermined
    reason: str
    horizon: int | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "bj_verdict", "verdict": self.verdict, "reason": self.reason,
                "horizon": self.horizon, "evidence": self.evidence}


def bj_verdict(law: LawProgram, horizon: int) -> BJVerdict:
    if isinstance(law, EventuallyPeriodic):
        if law.eventually_constant:
            return BJVerdict("NonchaoticCertified", f"eventually constant with symbol {law.period[0]}")
        return BJVerdict("ChaoticCertified", f"eventually periodic with period {list(law.period)}: "
                                             "constant runs are eventually bounded")
    prof = bj_run_profile(law, horizon)
    grow = sorted(k for k, g in prof.growing.items() if g)
    ev = {"growing_symbols": grow, "running_max": {str(k): v[-1] for k, v in prof.running_max.items()}}
    if grow:
        return BJVerdict("CandidateNonchaotic", "arbitrarily late, growing constant runs observed", horizon, ev)
    return BJVerdict("Undetermined", "no growing constant runs within the horizon", horizon, ev)


@dataclass
class NonchaoticStabilityReport:
    passed: bool
    crossing_index: int | None
    final_log_norm: float
    max_log_after_crossing: float | None
    horizon: int
    delta: float

    def to_dict(self) -> dict:
        return {"kind": "stability_under_law", "pass": self.passed, "crossing_index": self.crossing_index,
                "final_log_norm": self.final_log_norm, "max_log_after_crossing": self.max_log_after_crossing,
                "horizon": self.horizon, "delta": self.delta}


def stability_under_nonchaotic(sys: SystemSpec, law: LawProgram, horizon: int, delta: float,
                               tol: float | None = None) -> NonchaoticStabilityReport:
    """Pass iff |S(sigma(1..n))| reaches delta and never climbs back above it."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    tol = sys.atol if tol is None else tol
    ln, _ = product_ledger(sys, law.take(horizon))
    lim = math.log(delta) + tol
    hit = np.flatnonzero(ln <= lim)
    if hit.size == 0:
        return NonchaoticStabilityReport(False, None, float(ln[-1]), None, horizon, delta)
    i = int(hit[0])
    after = float(ln[i:].max())
    return NonchaoticStabilityReport(after <= lim, i + 1, float(ln[-1]), after, horizon, delta)
