"""Constructive synthesis of chaotic and zero-exponent switching laws.

Three constructions:

* ``synthesize_uniform`` alternates repeats of a contracting word and an
  expanding word so the running product's norm drops below 1/k and then its
  co-norm rises above k, for k = 1, 2, ...;
* ``synthesize_rotation`` uses an irrational rotation generator to steer a
  single trajectory alternately onto a stable and a divergent direction;
* ``synthesize_zero_exponent`` keeps one trajectory inside a fixed annulus.

Each returns a law plus a certificate whose numbers can be replayed
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import CapExceededError, DomainError, InputError, PreconditionError
from .linalg import (
    ScaledProduct,
    SystemSpec,
    Word,
    as_word,
    co_norm,
    operator_norm,
    product_ledger,
    word_product,
)
from .lyapunov import Cursor, simulate
from .symbolic import BlockSchedule, EventuallyPeriodic, LawProgram, Synthesized

DEFAULT_STAGE_CAP = 1_000_000


# -- certificates ----------------------------------------------------------


@dataclass(frozen=True)
class StageRecord:
    k: int
    ell_k: int
    L_k: int
    norm_after_contract: float
    conorm_after_expand: float
    cumulative_length: int
    target_contract: float
    target_expand: float

    @property
    def ordered(self) -> bool:
        """Whether ell_k < L_k, the ordering some presentations ask for."""
        return self.ell_k < self.L_k

    def to_dict(self) -> dict:
        return {"k": self.k, "ell_k": self.ell_k, "L_k": self.L_k,
                "norm_after_contract": self.norm_after_contract,
                "conorm_after_expand": self.conorm_after_expand,
                "cumulative_length": self.cumulative_length,
                "target_contract": self.target_contract, "target_expand": self.target_expand,
                "ordered": self.ordered}

    @classmethod
    def from_dict(cls, d: dict) -> "StageRecord":
        return cls(int(d["k"]), int(d["ell_k"]), int(d["L_k"]), float(d["norm_after_contract"]),
                   float(d["conorm_after_expand"]), int(d["cumulative_length"]),
                   float(d["target_contract"]), float(d["target_expand"]))


@dataclass
class ChaosCertificate:
    stages: list[StageRecord]
    prefix_word: Word
    w_contract: Word
    w_expand: Word

    @property
    def unordered_stages(self) -> list[int]:
        return [s.k for s in self.stages if not s.ordered]

    def stage_word(self, k: int) -> Word:
        """The law's symbols up to the end of stage k."""
        w = list(self.prefix_word)
        for s in self.stages[:k]:
            w += list(self.w_contract) * s.ell_k + list(self.w_expand) * s.L_k
        return tuple(w)

    def to_dict(self) -> dict:
        return {"kind": "chaos_certificate", "prefix_word": list(self.prefix_word),
                "w_contract": list(self.w_contract), "w_expand": list(self.w_expand),
                "unordered_stages": self.unordered_stages,
                "stages": [s.to_dict() for s in self.stages]}

    @classmethod
    def from_dict(cls, d: dict) -> "ChaosCertificate":
        return cls([StageRecord.from_dict(s) for s in d["stages"]], tuple(d["prefix_word"]),
                   tuple(d["w_contract"]), tuple(d["w_expand"]))


@dataclass
class UniformSynthesis:
    law: Synthesized
    cert: ChaosCertificate

    def to_dict(self) -> dict:
        return {"kind": "uniform_synthesis", "law": self.law.to_dict(), "certificate": self.cert.to_dict()}


# -- uniform construction ------------------------------------------------


def default_targets(k: int) -> tuple[float, float]:
    return 1.0 / k, float(k)


def check_witnesses(sys: SystemSpec, w_contract: Sequence[int], w_expand: Sequence[int], tol: float | None = None):
    """Validate |S(w_contract)| < 1 - tol and |S(w_expand)|_co > 1 + tol; return both products."""
    tol = sys.atol if tol is None else tol
    Wc = word_product(sys, w_contract)
    We = word_product(sys, w_expand)
    nc, ce = operator_norm(Wc), co_norm(We)
    if not nc < 1 - tol:
        raise PreconditionError(f"|S(w_contract)| < 1 fails: |S({list(w_contract)})| = {nc:.12g}")
    if not ce > 1 + tol:
        raise PreconditionError(f"|S(w_expand)|_co > 1 fails: |S({list(w_expand)})|_co = {ce:.12g}")
    return Wc, We


def synthesize_uniform(sys: SystemSpec, w_contract: Sequence[int], w_expand: Sequence[int], prefix: Sequence[int] = (),
                       k_max: int = 10, cap: int = DEFAULT_STAGE_CAP,
                       targets: Callable[[int], tuple[float, float]] = default_targets) -> UniformSynthesis:
    """Stage k appends the fewest repeats of w_contract putting the running
    product's norm below targets(k)[0], then the fewest repeats of w_expand
    putting its co-norm above targets(k)[1].  Counts are at least one.
    """
    wc = as_word(w_contract, sys.K)
    we = as_word(w_expand, sys.K)
    pre = as_word(prefix, sys.K, allow_empty=True)
    if k_max < 1:
        raise DomainError("k_max must be positive")
    Wc, We = check_witnesses(sys, wc, we)
    Wc_inv, We_inv = np.linalg.inv(Wc), np.linalg.inv(We)
    margin = sys.atol
    P0 = ScaledProduct.identity(sys.dim)
    for s in pre:
        P0 = P0.then(sys.matrices[s - 1], sys.inverses[s - 1])

    def step(state):
        k, P, length = state
        tc, te = targets(k)
        ell = 0
        while True:
            P = P.then(Wc, Wc_inv)
            ell += 1
            if P.log_norm() < math.log(tc) - margin:
                break
            if ell >= cap:
                raise CapExceededError(f"stage {k}: no contraction below {tc:.6g} within {cap} repeats")
        nc = math.exp(P.log_norm())
        L = 0
        while True:
            P = P.then(We, We_inv)
            L += 1
            if P.log_conorm() > math.log(te) + margin:
                break
            if L >= cap:
                raise CapExceededError(f"stage {k}: no expansion above {te:.6g} within {cap} repeats")
        ce = math.exp(P.log_conorm())
        length += ell * len(wc) + L * len(we)
        rec = StageRecord(k, ell, L, nc, ce, length, tc, te)
        return [(wc, ell), (we, L)], (k + 1, P, length), rec

    state = (1, P0, len(pre))
    stages, records = [], []
    for _ in range(k_max):
        try:
            blocks, state, rec = step(state)
        except CapExceededError as exc:
            raise CapExceededError(str(exc), partial=ChaosCertificate(records, pre, wc, we)) from None
        stages.append((blocks, None))
        records.append(rec)
    law = Synthesized(pre, stages, state, step, records)
    return UniformSynthesis(law, ChaosCertificate(records, pre, wc, we))


# -- replay and verification ---------------------------------------------


@dataclass
class ReplayLedger:
    n: np.ndarray
    log_norm: np.ndarray
    log_conorm: np.ndarray

    @property
    def log2_norm(self) -> np.ndarray:
        return self.log_norm / math.log(2)

    @property
    def log2_conorm(self) -> np.ndarray:
        return self.log_conorm / math.log(2)

    def csv_rows(self) -> tuple[list[str], list[list]]:
        return ["n", "log_norm", "log_conorm"], [[int(a), float(b), float(c)] for a, b, c in zip(self.n, self.log_norm, self.log_conorm)]


def replay_fixed_schedule(sys: SystemSpec, law: LawProgram, horizon: int) -> ReplayLedger:
    """Natural-log norm and co-norm of every prefix product S(sigma(1..n))."""
    if horizon < 1:
        raise DomainError("horizon must be positive")
    ln, lc = product_ledger(sys, law.take(horizon))
    return ReplayLedger(np.arange(1, horizon + 1), ln, lc)


@dataclass
class VerifyReport:
    passed: bool
    min_norm: tuple[int, float]
    max_conorm: tuple[int, float]
    log_min: float
    log_max: float
    horizon: int
    delta: float
    M: float

    def to_dict(self) -> dict:
        return {"kind": "verification", "pass": self.passed, "horizon": self.horizon, "delta": self.delta, "M": self.M,
                "min_norm": [self.min_norm[0], self.min_norm[1]], "max_conorm": [self.max_conorm[0], self.max_conorm[1]],
                "log_min": self.log_min, "log_max": self.log_max}


def _capped_exp(x: float) -> float:
    return math.exp(min(x, 700.0))


def _verify(low: np.ndarray, high: np.ndarray, horizon: int, delta: float, M: float) -> VerifyReport:
    if not 0 < delta < 1 < M:
        raise DomainError("need 0 < delta < 1 < M")
    i, j = int(np.argmin(low)), int(np.argmax(high))
    lmin, lmax = float(low[i]), float(high[j])
    ok = lmin < math.log(delta) and lmax > math.log(M)
    return VerifyReport(ok, (i + 1, _capped_exp(lmin)), (j + 1, _capped_exp(lmax)), lmin, lmax, horizon, delta, M)


def verify_uniform_chaotic(sys: SystemSpec, law: LawProgram, horizon: int, delta: float, M: float) -> VerifyReport:
    """Pass iff some prefix product has norm < delta and some has co-norm > M."""
    led = replay_fixed_schedule(sys, law, horizon)
    return _verify(led.log_norm, led.log_conorm, horizon, delta, M)


def verify_pointwise_chaotic(sys: SystemSpec, law: LawProgram, x0, horizon: int, delta: float, M: float) -> VerifyReport:
    """Pass iff the trajectory from x0 dips below delta and rises above M."""
    rec = simulate(sys, law, x0, horizon, checkpoints=())
    return _verify(rec.log_norms, rec.log_norms, horizon, delta, M)


# -- zero exponent ---------------------------------------------------------


@dataclass
class ExcursionBound:
    lower: float  # a * m_lo
    upper: float  # b * m_hi
    m_lo: float
    m_hi: float
    C: float  # log(upper / lower)

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "m_lo": self.m_lo, "m_hi": self.m_hi, "C": self.C}


@dataclass
class ZeroExponentResult:
    law: BlockSchedule
    excursion_bound: ExcursionBound
    first_crossing: int  # step at which the band guarantee starts
    log_norms: np.ndarray

    def to_dict(self) -> dict:
        return {"kind": "zero_exponent_synthesis", "law": self.law.to_dict(),
                "excursion_bound": self.excursion_bound.to_dict(), "first_crossing": self.first_crossing,
                "final_partial_exponent": float(self.log_norms[-1] / len(self.log_norms))}


def _run_length(symbols: Sequence[int]) -> list[tuple[Word, int]]:
    blocks: list[tuple[Word, int]] = []
    for s in symbols:
        if blocks and blocks[-1][0] == (s,):
            blocks[-1] = ((s,), blocks[-1][1] + 1)
        else:
            blocks.append(((s,), 1))
    return blocks


def _word_blocks(words: Sequence[Word]) -> list[tuple[Word, int]]:
    blocks: list[tuple[Word, int]] = []
    for w in words:
        if blocks and blocks[-1][0] == w:
            blocks[-1] = (w, blocks[-1][1] + 1)
        else:
            blocks.append((w, 1))
    return blocks


def _prefix_factors(sys: SystemSpec, w: Word) -> tuple[float, float]:
    lo, hi = 1.0, 1.0
    for m in range(1, len(w) + 1):
        P = word_product(sys, w[:m])
        lo = min(lo, co_norm(P))
        hi = max(hi, operator_norm(P))
    return lo, hi


def synthesize_zero_exponent(sys: SystemSpec, w_contract: Sequence[int], w_expand: Sequence[int], x0,
                             band: tuple[float, float], horizon: int) -> ZeroExponentResult:
    """Greedy annulus law: at each word boundary apply w_contract if |x| > 1, else w_expand.

    After the first crossing of |x| = 1 every word-boundary state lies in
    [|S(w_contract)|_co, |S(w_expand)|] within [a, b], and states inside a word
    are off by at most the prefix factors m_lo, m_hi.
    """
    a, b = map(float, band)
    if not 0 < a < 1 < b:
        raise PreconditionError("band must satisfy 0 < a < 1 < b")
    if horizon < 1:
        raise DomainError("horizon must be positive")
    wc = as_word(w_contract, sys.K)
    we = as_word(w_expand, sys.K)
    Wc, We = check_witnesses(sys, wc, we)
    if not a <= co_norm(Wc):
        raise PreconditionError(f"a <= |S(w_contract)|_co fails: {a:.12g} > {co_norm(Wc):.12g}")
    if not operator_norm(We) <= b:
        raise PreconditionError(f"|S(w_expand)| <= b fails: {operator_norm(We):.12g} > {b:.12g}")
    lo_c, hi_c = _prefix_factors(sys, wc)
    lo_e, hi_e = _prefix_factors(sys, we)
    m_lo, m_hi = min(lo_c, lo_e), max(hi_c, hi_e)
    cur = Cursor(sys, x0)
    logs = np.empty(horizon)
    words: list[Word] = []
    first = None
    above = cur.s > 0
    while cur.n < horizon:
        w = wc if cur.s > 0 else we
        w = w[: horizon - cur.n]
        start = cur.n
        out, _ = cur.advance(w)
        logs[start:cur.n] = out
        words.append(w)
        now_above = cur.s > 0
        if first is None and now_above != above:
            first = cur.n
        above = now_above
    lower, upper = a * m_lo, b * m_hi
    bound = ExcursionBound(lower, upper, m_lo, m_hi, math.log(upper / lower))
    full = [w for w in words if len(w)]
    law = BlockSchedule((), _word_blocks(full))
    return ZeroExponentResult(law, bound, horizon if first is None else first, logs)


# -- rotation construction -----------------------------------------------


@dataclass
class RotationSynthInput:
    rot_index: int
    stable_x0: np.ndarray
    stable_law: LawProgram
    divergent_y0: np.ndarray
    divergent_law: LawProgram
    u: np.ndarray
    eps_schedule: tuple[float, ...]
    align_cap: int = 1_000_000
    drive_cap: int = 10_000
    q_max: int = 64
    angle_tol: float = 1e-9
    amplification: str = "nominal"  # or "generator"

    def __post_init__(self):
        self.stable_x0 = np.asarray(self.stable_x0, dtype=float).ravel()
        self.divergent_y0 = np.asarray(self.divergent_y0, dtype=float).ravel()
        self.u = np.asarray(self.u, dtype=float).ravel()
        for name in ("stable_x0", "divergent_y0"):
            v = getattr(self, name)
            if abs(np.linalg.norm(v) - 1) > 1e-9:
                raise InputError(f"{name} must be a unit vector")
        if not np.any(self.u):
            raise InputError("target vector u must be nonzero")
        eps = tuple(float(e) for e in self.eps_schedule)
        if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise InputError("eps_schedule must be positive and strictly decreasing")
        self.eps_schedule = eps
        if self.amplification not in ("nominal", "generator"):
            raise InputError("amplification must be 'nominal' or 'generator'")


@dataclass(frozen=True)
class AlignmentRecord:
    target: str
    repeats: int
    delta: float
    angle: float  # line distance after alignment, recomputed from the state
    index: int  # law position after alignment
    m_star: int
    amplification: float

    def to_dict(self) -> dict:
        return {"target": self.target, "repeats": self.repeats, "delta": self.delta, "angle": self.angle,
                "index": self.index, "m_star": self.m_star, "amplification": self.amplification}


@dataclass(frozen=True)
class RotationStage:
    k: int
    eps: float
    align_down: AlignmentRecord
    drive_down: int
    min_norm: float
    min_index: int
    align_up: AlignmentRecord
    drive_up: int
    max_norm: float
    max_index: int
    cumulative_length: int

    def to_dict(self) -> dict:
        return {"k": self.k, "eps": self.eps, "align_down": self.align_down.to_dict(), "drive_down": self.drive_down,
                "min_norm": self.min_norm, "min_index": self.min_index, "align_up": self.align_up.to_dict(),
                "drive_up": self.drive_up, "max_norm": self.max_norm, "max_index": self.max_index,
                "cumulative_length": self.cumulative_length}


@dataclass
class RotationSynthesis:
    law: BlockSchedule
    pointwise_cert: list[RotationStage]
    u: np.ndarray
    rotation_angle: float

    def to_dict(self) -> dict:
        return {"kind": "rotation_synthesis", "law": self.law.to_dict(), "u": self.u.tolist(),
                "rotation_angle": self.rotation_angle, "stages": [s.to_dict() for s in self.pointwise_cert]}


def rotation_angle(R: np.ndarray, tol: float = 1e-9) -> float:
    """Signed angle theta with R = [[cos, -sin], [sin, cos]](theta); R must be a proper rotation."""
    R = np.asarray(R, dtype=float)
    if R.shape != (2, 2):
        raise DomainError("rotation generator must be 2x2")
    if np.max(np.abs(R.T @ R - np.eye(2))) > tol or np.linalg.det(R) < 0:
        raise PreconditionError("rotation generator is not a proper orthogonal matrix within tolerance")
    return math.atan2(R[1, 0], R[0, 0])


def check_irrational(theta: float, q_max: int = 64, tol: float = 1e-9) -> None:
    """Reject angles within tol of 2*pi*p/q for some q <= q_max."""
    alpha = (theta / (2 * math.pi)) % 1.0
    for q in range(1, q_max + 1):
        p = round(alpha * q)
        if abs(alpha - p / q) <= tol:
            raise PreconditionError(f"rotation angle is within {tol:g} of 2*pi*{p}/{q}")


def line_distance(v: np.ndarray, target: np.ndarray) -> float:
    """Angle in [0, pi/2] between the lines spanned by v and target."""
    cross = abs(v[0] * target[1] - v[1] * target[0])
    dot = abs(v[0] * target[0] + v[1] * target[1])
    return math.atan2(cross, dot)


def _find_alignment(phi: float, psi: float, theta: float, delta: float, start: int, cap: int) -> int | None:
    """Least n in [start, cap] with line distance of phi + n*theta to psi at most delta."""
    chunk = 1 << 16
    for lo in range(start, cap + 1, chunk):
        n = np.arange(lo, min(cap + 1, lo + chunk), dtype=np.float64)
        ang = np.mod(phi - psi + n * theta, math.pi)
        dist = np.minimum(ang, math.pi - ang)
        hit = np.flatnonzero(dist <= delta)
        if hit.size:
            return int(n[hit[0]])
    return None


def _plan(sys: SystemSpec, symbols: np.ndarray, x: np.ndarray, accept: Callable[[float, float], bool]):
    """Walk the nominal trajectory P_m x; return (m, log|P_m x|, log|P_m|) at the first accepted m."""
    U = np.eye(2)
    scale = 0.0
    for m, k in enumerate(symbols.tolist(), 1):
        U = sys.matrices[k - 1] @ U
        f = float(np.linalg.norm(U))
        U /= f
        scale += math.log(f)
        lx = scale + math.log(float(np.linalg.norm(U @ x)))
        lP = scale + math.log(operator_norm(U))
        if accept(lx, lP):
            return m, lx, lP
    return None


def synthesize_rotation(sys: SystemSpec, inp: RotationSynthInput, stage_count: int | None = None) -> RotationSynthesis:
    """Alternately align with the stable direction and drive down, then align
    with the divergent direction and drive up, one stage per eps_k.

    Alignment tolerance is budgeted in two passes: the nominal drive length
    m* is found first, then delta_k is chosen so the alignment error, amplified
    by at most |P_m*| (or (max_k |S_k|)^m* when amplification="generator"),
    cannot spoil the target.
    """
    if sys.dim != 2:
        raise DomainError("rotation synthesis needs a planar system")
    r = inp.rot_index
    if not 1 <= r <= sys.K:
        raise InputError("rot_index outside alphabet")
    theta = rotation_angle(sys.matrices[r - 1], inp.angle_tol)
    check_irrational(theta, inp.q_max, inp.angle_tol)
    eps_list = inp.eps_schedule if stage_count is None else inp.eps_schedule[:stage_count]
    if stage_count is not None and stage_count > len(inp.eps_schedule):
        raise InputError("stage_count exceeds the eps schedule")
    sym0 = inp.stable_law.take(inp.drive_cap)
    sym1 = inp.divergent_law.take(inp.drive_cap)
    gen_log = math.log(sys.max_norm)
    cur = Cursor(sys, inp.u)
    symbols: list[int] = []
    stages: list[RotationStage] = []
    margin = 1e-9

    def align(target: np.ndarray, delta: float, name: str, m_star: int, amp: float) -> AlignmentRecord:
        psi = math.atan2(target[1], target[0])
        start, total = 0, 0
        while True:
            phi = math.atan2(cur.u[1], cur.u[0])
            # search with a small inner margin, then confirm on the real state
            n = _find_alignment(phi, psi, theta, delta * (1 - 1e-6), start, inp.align_cap - total)
            if n is None:
                raise CapExceededError(f"alignment to the {name} direction needs more than {inp.align_cap} rotations "
                                       f"(delta={delta:.3g})")
            cur.advance(np.full(n, r, dtype=np.int64))
            symbols.extend([r] * n)
            total += n
            ang = line_distance(cur.u, target)
            if ang <= delta:
                return AlignmentRecord(name, total, delta, ang, cur.n, m_star, amp)
            start = 1

    def drive(seq: np.ndarray, stop: Callable[[float], bool], name: str) -> int:
        for m, k in enumerate(seq.tolist(), 1):
            cur.advance((k,))
            symbols.append(k)
            if stop(cur.s):
                return m
        raise CapExceededError(f"{name} drive exceeded drive_cap={inp.drive_cap}")

    for k, eps in enumerate(eps_list, 1):
        # down: nominal |v| |P_m x0| < eps / 2, then delta = eps / (2 |v| amp)
        s0 = cur.s
        plan = _plan(sys, sym0, inp.stable_x0, lambda lx, lP: s0 + lx < math.log(eps / 2))
        if plan is None:
            raise CapExceededError(f"stage {k}: stable law does not reach {eps / 2:.3g} within drive_cap={inp.drive_cap}")
        m_star, _, lP = plan
        log_amp = lP if inp.amplification == "nominal" else m_star * gen_log
        delta = min(math.pi / 2, math.exp(math.log(eps / 2) - s0 - log_amp))
        rec_down = align(inp.stable_x0, delta, "stable", m_star, math.exp(log_amp))
        d_down = drive(sym0, lambda s: s < math.log(eps) - margin, "stable")
        min_norm, min_index = math.exp(cur.s), cur.n
        # up: nominal |v| |P_m y0| > 2 / eps, delta = |P_m y0| / (2 amp)
        s1 = cur.s
        plan = _plan(sys, sym1, inp.divergent_y0, lambda lx, lP: s1 + lx > math.log(2 / eps))
        if plan is None:
            raise CapExceededError(f"stage {k}: divergent law does not reach {2 / eps:.3g} within drive_cap={inp.drive_cap}")
        m_star, lx, lP = plan
        log_amp = lP if inp.amplification == "nominal" else m_star * gen_log
        delta = min(math.pi / 2, 0.5 * math.exp(lx - log_amp))
        rec_up = align(inp.divergent_y0, delta, "divergent", m_star, math.exp(log_amp))
        d_up = drive(sym1, lambda s: s > -math.log(eps) + margin, "divergent")
        max_norm, max_index = math.exp(cur.s), cur.n
        stages.append(RotationStage(k, eps, rec_down, d_down, min_norm, min_index, rec_up, d_up, max_norm, max_index, cur.n))
    law = BlockSchedule((), _run_length(symbols)) if symbols else BlockSchedule((), ())
    return RotationSynthesis(law, stages, inp.u, theta)


def hyperbolic_divergent_law(sys: SystemSpec, rot_index: int, other_index: int, j_max: int = 32):
    """Periodic law (rot^j, other) with the largest growth rate rho(S_other R^j)^(1/(j+1)).

    Returns (law, unit expanding eigenvector, per-step rate).  Useful as the
    divergent input of ``synthesize_rotation`` when ``other`` alone only grows
    polynomially.
    """
    R = sys.matrices[rot_index - 1]
    S = sys.matrices[other_index - 1]
    best = None
    Rj = np.eye(sys.dim)
    for j in range(j_max + 1):
        P = S @ Rj
        vals, vecs = np.linalg.eig(P)
        i = int(np.argmax(np.abs(vals)))
        if abs(vals[i].imag) < 1e-12:
            rate = abs(vals[i].real) ** (1.0 / (j + 1))
            if best is None or rate > best[0] * (1 + 1e-12):
                v = np.real(vecs[:, i])
                best = (rate, j, v / np.linalg.norm(v))
        Rj = R @ Rj
    if best is None or best[0] <= 1:
        raise PreconditionError("no hyperbolic period of the form (rot^j, other) found")
    rate, j, v = best
    return EventuallyPeriodic((), (rot_index,) * j + (other_index,)), v, rate
