"""Joint spectral radius and co-radius bounds by exhaustive word enumeration.

Words of each length are enumerated in lexicographic order, so "first index
attaining the optimum" is the same as "lexicographically smallest witness".
Every search is charged against a budget of word evaluations; running out
yields an explicitly truncated result rather than a silently shorter one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError, InputError, NumericError
from .linalg import (
    SystemSpec,
    Word,
    batch_norms,
    word_product,
)

DEFAULT_BUDGET = 2_000_000
_LEVEL_CAP = 1 << 15  # largest level kept in memory in one piece


# -- enumeration -----------------------------------------------------------


def index_to_word(idx: int, n: int, K: int) -> Word:
    digits = []
    for _ in range(n):
        idx, r = divmod(idx, K)
        digits.append(r + 1)
    return tuple(reversed(digits))


def word_to_index(w: Sequence[int], K: int) -> int:
    idx = 0
    for s in w:
        idx = idx * K + (s - 1)
    return idx


def necklace_mask(n: int, K: int, start: int, count: int) -> np.ndarray:
    """True where the word is the smallest of its rotations."""
    if K**n >= 2**62:
        raise InputError("word space too large to index")
    idx = np.arange(start, start + count, dtype=np.int64)
    mask = np.ones(count, dtype=bool)
    for r in range(1, n):
        base = K ** (n - r)
        rot = (idx % base) * K**r + idx // base
        mask &= idx <= rot
    return mask


class _Levels:
    """Products of all words of each length, chunked and in lexicographic order."""

    def __init__(self, matrices: np.ndarray, cap: int = _LEVEL_CAP):
        self.S = np.asarray(matrices, dtype=float)
        self.K, self.d = self.S.shape[0], self.S.shape[1]
        self.cap = max(cap, self.K)
        self._stored = {0: np.eye(self.d)[None]}

    def level(self, n: int) -> np.ndarray:
        if n not in self._stored:
            prev = self.level(n - 1)
            # index(w + (k,)) = index(w) * K + k - 1; new symbol acts on the left
            P = np.einsum("kij,bjl->bkil", self.S, prev).reshape(-1, self.d, self.d)
            self._stored[n] = P
        return self._stored[n]

    def chunks(self, n: int) -> Iterator[tuple[int, np.ndarray]]:
        if self.K**n <= self.cap:
            yield 0, self.level(n)
            return
        t = 0
        while self.K ** (t + 1) <= self.cap and t + 1 < n:
            t += 1
        T = self.level(t)
        Kt = self.K**t
        step = max(1, self.cap // Kt)
        for start, H in self.chunks(n - t):
            for i in range(0, len(H), step):
                Hc = H[i:i + step]
                P = np.einsum("tij,hjk->htik", T, Hc).reshape(-1, self.d, self.d)
                yield (start + i) * Kt, P


@dataclass
class _LevelScan:
    n: int
    norms: np.ndarray
    conorms: np.ndarray
    rho: np.ndarray  # NaN off necklace representatives
    rho_co: np.ndarray


def _scan_chunk(args) -> tuple:
    n, K, start, P, spectra = args
    nm, cn = batch_norms(P)
    rho = np.full(len(P), np.nan)
    rco = np.full(len(P), np.nan)
    if spectra:
        mask = necklace_mask(n, K, start, len(P))
        if mask.any():
            sub = P[mask]
            if P.shape[-1] == 1:
                rho[mask] = np.abs(sub[:, 0, 0])
                rco[mask] = rho[mask]
            else:
                try:
                    ev = np.abs(np.linalg.eigvals(sub))
                except np.linalg.LinAlgError as exc:
                    raise NumericError(f"eigenvalue iteration failed at word length {n}: {exc}") from exc
                rho[mask] = ev.max(axis=1)
                rco[mask] = ev.min(axis=1)
    return nm, cn, rho, rco


def _scan_levels(sys_matrices: np.ndarray, n_max: int, budget: int, spectra: bool = True, threads: int | None = None):
    """Yield a _LevelScan per completed length; stop early when over budget."""
    lv = _Levels(sys_matrices)
    K = lv.K
    used = 0
    for n in range(1, n_max + 1):
        cost = K**n
        if used + cost > budget:
            return
        used += cost
        jobs = [(n, K, s, P, spectra) for s, P in lv.chunks(n)]
        parts = ordered_map(_scan_chunk, jobs, threads)
        yield _LevelScan(n, *(np.concatenate([p[i] for p in parts]) for i in range(4)))


def _best(values: np.ndarray, maximize: bool, rtol: float) -> tuple[float, int]:
    """Optimum and the first index within relative tolerance of it (NaN ignored)."""
    if maximize:
        best = float(np.nanmax(values))
        hits = np.flatnonzero(values >= best - rtol * abs(best))
    else:
        best = float(np.nanmin(values))
        hits = np.flatnonzero(values <= best + rtol * abs(best))
    return best, int(hits[0])


# -- bounds tables ---------------------------------------------------------


@dataclass(frozen=True)
class BoundsRow:
    n: int
    upper: float
    lower: float
    witness_upper: Word
    witness_lower: Word


@dataclass
class BoundsTable:
    """Per-length JSR bounds: upper from norms, lower from spectral radii."""

    rows: list[BoundsRow]
    requested_depth: int
    truncated: bool = False

    @property
    def completed_depth(self) -> int:
        return self.rows[-1].n if self.rows else 0

    @property
    def best_upper(self) -> float:
        return min(r.upper for r in self.rows)

    @property
    def best_lower(self) -> float:
        return max(r.lower for r in self.rows)

    @property
    def best_upper_witness(self) -> Word:
        return min(self.rows, key=lambda r: (r.upper, r.n)).witness_upper

    @property
    def best_lower_witness(self) -> Word:
        best = self.best_lower
        return next(r for r in self.rows if r.lower == best).witness_lower

    def to_dict(self) -> dict:
        return {
            "kind": "jsr_bounds",
            "requested_depth": self.requested_depth,
            "completed_depth": self.completed_depth,
            "truncated": self.truncated,
            "best_upper": self.best_upper,
            "best_lower": self.best_lower,
            "rows": [
                {"n": r.n, "upper": r.upper, "lower": r.lower,
                 "witness_upper": list(r.witness_upper), "witness_lower": list(r.witness_lower)}
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundsTable":
        rows = [BoundsRow(int(r["n"]), float(r["upper"]), float(r["lower"]),
                          tuple(r["witness_upper"]), tuple(r["witness_lower"])) for r in data["rows"]]
        return cls(rows, int(data["requested_depth"]), bool(data["truncated"]))

    def csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["n", "lower", "upper", "witness"]
        return header, [[r.n, r.lower, r.upper, " ".join(map(str, r.witness_upper))] for r in self.rows]


def jsr_bounds(sys: SystemSpec, n_max: int, budget: int = DEFAULT_BUDGET, threads: int | None = None) -> BoundsTable:
    """Exact per-length maxima of |S(w)|^(1/n) and rho(S(w))^(1/n) over all words."""
    if n_max < 1:
        raise DomainError("n_max must be positive")
    rows = []
    for scan in _scan_levels(sys.matrices, n_max, budget, threads=threads):
        n = scan.n
        up, iu = _best(scan.norms, True, sys.atol)
        lo, il = _best(scan.rho, True, sys.atol)
        rows.append(BoundsRow(n, up ** (1.0 / n), lo ** (1.0 / n), index_to_word(iu, n, sys.K), index_to_word(il, n, sys.K)))
    if not rows:
        raise DomainError(f"budget {budget} too small for even length-1 words")
    return BoundsTable(rows, n_max, truncated=len(rows) < n_max)


@dataclass(frozen=True)
class CoBoundsRow:
    n: int
    lower: float  # min |S(w)|_co^(1/n)
    upper: float  # min rho_co(S(w))^(1/n)
    witness_lower: Word
    witness_upper: Word
    direct_lower: float  # the same minimum computed on the original products


@dataclass
class CoBoundsTable:
    """Per-length co-JSR bounds, built from the JSR table of the inverse family."""

    rows: list[CoBoundsRow]
    requested_depth: int
    truncated: bool = False

    @property
    def completed_depth(self) -> int:
        return self.rows[-1].n if self.rows else 0

    @property
    def best_lower(self) -> float:
        return max(r.lower for r in self.rows)

    @property
    def best_upper(self) -> float:
        return min(r.upper for r in self.rows)

    @property
    def best_estimate(self) -> float:
        """Spectral side; exact for commuting and triangular families."""
        return self.best_upper

    @property
    def max_crosscheck_gap(self) -> float:
        return max(abs(r.lower - r.direct_lower) for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "kind": "cojsr_bounds",
            "requested_depth": self.requested_depth,
            "completed_depth": self.completed_depth,
            "truncated": self.truncated,
            "best_upper": self.best_upper,
            "best_lower": self.best_lower,
            "rows": [
                {"n": r.n, "lower": r.lower, "upper": r.upper, "direct_lower": r.direct_lower,
                 "witness_lower": list(r.witness_lower), "witness_upper": list(r.witness_upper)}
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoBoundsTable":
        rows = [CoBoundsRow(int(r["n"]), float(r["lower"]), float(r["upper"]), tuple(r["witness_lower"]),
                            tuple(r["witness_upper"]), float(r["direct_lower"])) for r in data["rows"]]
        return cls(rows, int(data["requested_depth"]), bool(data["truncated"]))

    def csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["n", "lower", "upper", "witness"]
        return header, [[r.n, r.lower, r.upper, " ".join(map(str, r.witness_lower))] for r in self.rows]


def cojsr_bounds(sys: SystemSpec, n_max: int, budget: int = DEFAULT_BUDGET, threads: int | None = None) -> CoBoundsTable:
    """Co-JSR bounds as reciprocals of the inverse family's JSR bounds.

    A word w' of the inverse family has product S(reverse(w'))^-1, so witnesses
    are reported reversed, as words of the original family.
    """
    inv = np.linalg.inv(sys.matrices)
    if not np.all(np.isfinite(inv)):
        bad = int(np.flatnonzero(~np.isfinite(inv).all(axis=(1, 2)))[0]) + 1
        raise NumericError(f"inverting matrix {bad} produced non-finite entries")
    inv_sys = SystemSpec(inv, sys.nonsingularity_tol, sys.atol)
    table = jsr_bounds(inv_sys, n_max, budget // 2 or 1, threads)
    direct = {}
    for scan in _scan_levels(sys.matrices, table.completed_depth, budget - budget // 2, spectra=False, threads=threads):
        direct[scan.n] = float(scan.conorms.min()) ** (1.0 / scan.n)
    rows = [
        CoBoundsRow(r.n, 1.0 / r.upper, 1.0 / r.lower, tuple(reversed(r.witness_upper)),
                    tuple(reversed(r.witness_lower)), direct.get(r.n, math.nan))
        for r in table.rows
    ]
    return CoBoundsTable(rows, n_max, truncated=table.truncated)


# -- periodic stability ----------------------------------------------------


@dataclass
class StabilityReport:
    verdict: str  # "AllStableUpTo" or "CounterexampleWord"
    depth: int
    max_ratio: float
    argmax: Word
    counterexample: Word | None = None
    counterexample_rho: float | None = None
    truncated: bool = False

    @property
    def stable(self) -> bool:
        return self.verdict == "AllStableUpTo"

    def to_dict(self) -> dict:
        return {
            "kind": "periodic_stability",
            "verdict": self.verdict,
            "depth": self.depth,
            "max_ratio": self.max_ratio,
            "argmax": list(self.argmax),
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "counterexample_rho": self.counterexample_rho,
            "truncated": self.truncated,
        }


def periodic_stability_check(sys: SystemSpec, L: int, tol: float | None = None, budget: int = DEFAULT_BUDGET,
                             threads: int | None = None) -> StabilityReport:
    """Look for a word with rho(S(w)) >= 1 among lengths 1..L (one word per rotation class).

    Words are visited in length-then-lexicographic order; the first one with
    rho >= 1 - tol ends the search.
    """
    if L < 1:
        raise DomainError("L must be positive")
    tol = sys.atol if tol is None else tol
    best, arg, depth = -math.inf, (), 0
    for scan in _scan_levels(sys.matrices, L, budget, threads=threads):
        n = scan.n
        ratio = scan.rho ** (1.0 / n)
        r, i = _best(ratio, True, sys.atol)
        if r > best * (1 + sys.atol):
            best, arg = r, index_to_word(i, n, sys.K)
        bad = np.flatnonzero(scan.rho >= 1 - tol)
        if bad.size:
            j = int(bad[0])
            return StabilityReport("CounterexampleWord", n, best, arg, index_to_word(j, n, sys.K), float(scan.rho[j]))
        depth = n
    return StabilityReport("AllStableUpTo", depth, best, arg, truncated=depth < L)


# -- chaos feasibility -----------------------------------------------------


@dataclass
class FeasibleWitness:
    w_contract: Word
    w_expand: Word
    contract_norm: float
    expand_conorm: float
    kind: str = field(default="FeasibleWitness", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "w_contract": list(self.w_contract), "w_expand": list(self.w_expand),
                "contract_norm": self.contract_norm, "expand_conorm": self.expand_conorm}


@dataclass
class InfeasibleCertified:
    """side: which behaviour is impossible ("expansion", "contraction" or "both")."""

    side: str
    n: int
    value: float
    max_norm: float
    min_conorm: float
    kind: str = field(default="InfeasibleCertified", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "side": self.side, "n": self.n, "value": self.value,
                "max_norm": self.max_norm, "min_conorm": self.min_conorm}


@dataclass
class Undetermined:
    depth: int
    best_contract_norm: float
    contract_witness: Word
    best_expand_conorm: float
    expand_witness: Word
    truncated: bool = False
    kind: str = field(default="Undetermined", init=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "depth": self.depth, "truncated": self.truncated,
                "best_contract_norm": self.best_contract_norm, "contract_witness": list(self.contract_witness),
                "best_expand_conorm": self.best_expand_conorm, "expand_witness": list(self.expand_witness)}


FeasibilityVerdict = FeasibleWitness | InfeasibleCertified | Undetermined


def verdict_from_dict(data: dict) -> FeasibilityVerdict:
    kind = data.get("kind")
    if kind == "FeasibleWitness":
        return FeasibleWitness(tuple(data["w_contract"]), tuple(data["w_expand"]),
                               float(data["contract_norm"]), float(data["expand_conorm"]))
    if kind == "InfeasibleCertified":
        return InfeasibleCertified(data["side"], int(data["n"]), float(data["value"]),
                                   float(data["max_norm"]), float(data["min_conorm"]))
    if kind == "Undetermined":
        return Undetermined(int(data["depth"]), float(data["best_contract_norm"]), tuple(data["contract_witness"]),
                            float(data["best_expand_conorm"]), tuple(data["expand_witness"]), bool(data["truncated"]))
    raise InputError(f"unknown verdict kind {kind!r}")


def chaos_feasibility(sys: SystemSpec, L: int, tol: float | None = None, budget: int = DEFAULT_BUDGET,
                      threads: int | None = None) -> FeasibilityVerdict:
    """Breadth-first search for a contracting and an expanding word.

    Certificates: if every length-n product has norm <= 1 the JSR is <= 1 and
    no product can ever have co-norm > 1 (expansion impossible); if every
    length-n product has co-norm >= 1 the co-JSR is >= 1 (contraction impossible).
    """
    if L < 1:
        raise DomainError("L must be positive")
    tol = sys.atol if tol is None else tol
    K = sys.K
    wc = we = None
    best_c, best_c_w = math.inf, ()
    best_e, best_e_w = -math.inf, ()
    depth = 0
    for scan in _scan_levels(sys.matrices, L, budget, spectra=False, threads=threads):
        n = scan.n
        gmax, gmin = float(scan.norms.max()), float(scan.conorms.min())
        exp_dead, con_dead = gmax <= 1 + tol, gmin >= 1 - tol
        if exp_dead or con_dead:
            side = "both" if exp_dead and con_dead else ("expansion" if exp_dead else "contraction")
            value = gmax if exp_dead else gmin
            return InfeasibleCertified(side, n, value, gmax, gmin)
        c, ic = _best(scan.norms, False, sys.atol)
        e, ie = _best(scan.conorms, True, sys.atol)
        if c < best_c * (1 - sys.atol):
            best_c, best_c_w = c, index_to_word(ic, n, K)
        if e > best_e * (1 + sys.atol):
            best_e, best_e_w = e, index_to_word(ie, n, K)
        if wc is None and c < 1 - tol:
            wc = (index_to_word(ic, n, K), c)
        if we is None and e > 1 + tol:
            we = (index_to_word(ie, n, K), e)
        depth = n
        if wc is not None and we is not None:
            return FeasibleWitness(wc[0], we[0], wc[1], we[1])
    return Undetermined(depth, best_c, best_c_w, best_e, best_e_w, truncated=depth < L)


# -- growth curves ---------------------------------------------------------


@dataclass
class GrowthCurve:
    points: list[tuple[int, float, Word]]
    exponent: float
    intercept: float
    residual: float
    fit_range: tuple[int, int]
    method: str
    requested_depth: int
    truncated: bool = False

    @property
    def completed_depth(self) -> int:
        return self.points[-1][0] if self.points else 0

    @property
    def values(self) -> np.ndarray:
        return np.array([g for _, g, _ in self.points])

    def to_dict(self) -> dict:
        return {
            "kind": "growth_curve",
            "method": self.method,
            "requested_depth": self.requested_depth,
            "completed_depth": self.completed_depth,
            "truncated": self.truncated,
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residual": self.residual,
            "fit_range": list(self.fit_range),
            "points": [{"n": n, "g": g, "witness": list(w)} for n, g, w in self.points],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GrowthCurve":
        pts = [(int(p["n"]), float(p["g"]), tuple(p["witness"])) for p in data["points"]]
        return cls(pts, float(data["exponent"]), float(data["intercept"]), float(data["residual"]),
                   tuple(data["fit_range"]), data["method"], int(data["requested_depth"]), bool(data["truncated"]))

    def csv_rows(self) -> tuple[list[str], list[list]]:
        return ["n", "g", "witness"], [[n, g, " ".join(map(str, w))] for n, g, w in self.points]


def _dominance_frontier(S: np.ndarray, n_max: int, budget: int, rtol: float):
    """Exact max norms for entrywise nonnegative families.

    If 0 <= P <= Q entrywise then T P <= T Q for every nonnegative T, and the
    operator norm is monotone on nonnegative matrices, so dominated products
    can never lead to a longer maximiser and are dropped.
    """
    K, d = S.shape[0], S.shape[1]
    front = np.eye(d)[None]
    words: list[Word] = [()]
    used = 0
    for n in range(1, n_max + 1):
        cost = len(front) * K
        if used + cost > budget:
            return
        used += cost
        cand = np.einsum("kij,bjl->bkil", S, front).reshape(-1, d, d)
        cwords = [w + (k + 1,) for w in words for k in range(K)]
        flat = cand.reshape(len(cand), -1)
        order = np.argsort(-flat.sum(axis=1), kind="stable")
        kept: list[int] = []
        for i in order:
            if kept and np.any(np.all(flat[kept] >= flat[i], axis=1)):
                continue
            kept.append(int(i))
        kept.sort()  # back to lexicographic order
        front = cand[kept]
        words = [cwords[i] for i in kept]
        norms, _ = batch_norms(front)
        g, i = _best(norms, True, rtol)
        yield n, g, words[i]


def growth_curve(sys: SystemSpec, n_max: int, budget: int = DEFAULT_BUDGET, method: str = "auto",
                 fit_range: tuple[int, int] | None = None, threads: int | None = None) -> GrowthCurve:
    """g_n = max over |w| = n of |S(w)|, and the slope s of log g_n against log n.

    method: "brute" enumerates all words; "dominance" uses the exact frontier
    search (nonnegative families only); "auto" picks brute force when the whole
    depth fits the budget and the frontier search otherwise, when applicable.
    The fit defaults to the last ceil(n_max / 2) lengths.
    """
    if n_max < 1:
        raise DomainError("n_max must be positive")
    nonneg = bool(np.all(sys.matrices >= 0))
    brute_cost = sum(sys.K**n for n in range(1, n_max + 1))
    if method == "auto":
        method = "brute" if brute_cost <= budget or not nonneg else "dominance"
    if method == "dominance" and not nonneg:
        raise DomainError("dominance search needs entrywise nonnegative matrices")
    if method == "brute":
        pts = []
        for scan in _scan_levels(sys.matrices, n_max, budget, spectra=False, threads=threads):
            g, i = _best(scan.norms, True, sys.atol)
            pts.append((scan.n, g, index_to_word(i, scan.n, sys.K)))
    elif method == "dominance":
        pts = list(_dominance_frontier(sys.matrices, n_max, budget, sys.atol))
    else:
        raise InputError(f"unknown growth method {method!r}")
    if fit_range is None:
        fit_range = (n_max - math.ceil(n_max / 2) + 1, n_max)
    sel = [(n, g) for n, g, _ in pts if fit_range[0] <= n <= fit_range[1] and g > 0]
    if len(sel) >= 2:
        x = np.log([n for n, _ in sel])
        y = np.log([g for _, g in sel])
        s, c = np.polyfit(x, y, 1)
        res = float(np.sqrt(np.mean((y - (s * x + c)) ** 2)))
    else:
        s = c = res = math.nan
    return GrowthCurve(pts, float(s), float(c), res, tuple(fit_range), method, n_max, truncated=len(pts) < n_max)


# -- finiteness candidates -------------------------------------------------


@dataclass
class FinitenessCandidate:
    word: Word
    value: float
    gap: float
    verified: bool

    def to_dict(self) -> dict:
        return {"kind": "finiteness_candidate", "word": list(self.word), "value": self.value,
                "gap": self.gap, "verified": self.verified}


def finiteness_candidate(sys: SystemSpec, n_max: int, tol: float | None = None, budget: int = DEFAULT_BUDGET,
                         threads: int | None = None) -> FinitenessCandidate:
    """Best spectral witness rho(S(w))^(1/|w|) and its gap to the best norm bound."""
    tol = sys.atol if tol is None else tol
    table = jsr_bounds(sys, n_max, budget, threads)
    value = table.best_lower
    gap = max(0.0, table.best_upper - value)
    return FinitenessCandidate(table.best_lower_witness, value, gap, gap <= tol)


# -- reducibility ----------------------------------------------------------


@dataclass(frozen=True)
class InvariantSubspace:
    basis: np.ndarray  # orthonormal columns
    residual: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass
class ReducibilityReport:
    candidates: list[InvariantSubspace]
    depth: int

    @property
    def none_found(self) -> bool:
        return not self.candidates

    def to_dict(self) -> dict:
        return {
            "kind": "reducibility_probe",
            "depth": self.depth,
            "none_found": self.none_found,
            "candidates": [{"basis": c.basis.T.tolist(), "residual": c.residual} for c in self.candidates],
        }


def invariance_residual(matrices: np.ndarray, Q: np.ndarray) -> float:
    """Largest sine of a principal angle between S_k V and V, over k."""
    worst = 0.0
    proj = np.eye(Q.shape[0]) - Q @ Q.T
    for M in matrices:
        img, _ = np.linalg.qr(M @ Q)
        worst = max(worst, float(np.linalg.norm(proj @ img, 2)))
    return worst


def _real_eigvecs(M: np.ndarray, imag_tol: float) -> tuple[list[np.ndarray], list[np.ndarray]]:
    vals, vecs = np.linalg.eig(M)
    lines, planes = [], []
    for j, lam in enumerate(vals):
        v = vecs[:, j]
        if abs(lam.imag) <= imag_tol * max(1.0, abs(lam)):
            r = np.real(v)
            if np.linalg.norm(r) > 0:
                lines.append(r / np.linalg.norm(r))
        elif lam.imag > 0:
            planes.append(np.column_stack([np.real(v), np.imag(v)]))
    return lines, planes


def _orthonormal(B: np.ndarray, tol: float = 1e-10) -> np.ndarray | None:
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return U[:, :r] if r else None


def _complement(v: np.ndarray) -> np.ndarray:
    U, _, _ = np.linalg.svd(v.reshape(-1, 1), full_matrices=True)
    return U[:, 1:]


def _complement_of(Q: np.ndarray) -> np.ndarray:
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, Q.shape[1]:]


def _same_subspace(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    if A.shape[1] != B.shape[1]:
        return False
    return float(np.linalg.norm(A - B @ (B.T @ A), 2)) <= tol


_SPAN_POOL = 32  # distinct eigenlines kept for multi-line spans
_SPAN_COMBOS = 5000


def reducibility_probe(sys: SystemSpec, depth: int = 2, tol: float = 1e-8, budget: int = 100_000) -> ReducibilityReport:
    """Search for a common invariant subspace among eigenvector-derived candidates.

    Candidates are real eigenvectors of every product of length <= depth and
    spans of several of them; for hyperplanes and other high-dimensional
    subspaces the same search runs on transposes and complements are taken.
    For d > 3 two-dimensional spans from complex eigenpairs are also tried.
    Accepted candidates are invariant within ``tol``; finding none proves nothing.
    """
    d = sys.dim
    if d == 1:
        return ReducibilityReport([], depth)
    mats = sys.matrices
    found: list[InvariantSubspace] = []

    def consider(Q):
        if Q is None or Q.shape[1] in (0, d):
            return
        if any(_same_subspace(Q, c.basis, 1e-6) for c in found):
            return
        res = invariance_residual(mats, Q)
        if res <= tol:
            found.append(InvariantSubspace(Q, res))

    words = []
    total = 0
    for n in range(1, depth + 1):
        if total + sys.K**n > budget:
            break
        total += sys.K**n
        words.extend(index_to_word(i, n, sys.K) for i in range(sys.K**n))
    for transpose in (False, True):
        pool: list[np.ndarray] = []
        for w in words:
            P = word_product(sys, w)
            lines, planes = _real_eigvecs(P.T if transpose else P, 1e-12)
            for v in lines:
                consider(_complement(v) if transpose else v.reshape(-1, 1))
                if len(pool) < _SPAN_POOL and all(abs(float(v @ u)) < 1 - 1e-9 for u in pool):
                    pool.append(v)
            if not transpose and d > 3:
                for B in planes:
                    consider(_orthonormal(B))
        # spans of several eigenlines, e.g. the leading block of a triangular family
        for r in range(2, d - 1 if transpose else d):
            for combo in itertools.islice(itertools.combinations(pool, r), _SPAN_COMBOS):
                Q = _orthonormal(np.column_stack(combo))
                if Q is not None and Q.shape[1] == r:
                    consider(_orthonormal(_complement_of(Q)) if transpose else Q)
    return ReducibilityReport(found, depth)


# -- block triangular co-JSR ---------------------------------------------


@dataclass
class BlockCoJSRReport:
    whole: CoBoundsTable
    blockA: CoBoundsTable
    blockB: CoBoundsTable
    min_rule_residual: float
    norm_side_residual: float

    def to_dict(self) -> dict:
        return {"kind": "block_cojsr", "whole": self.whole.to_dict(), "blockA": self.blockA.to_dict(),
                "blockB": self.blockB.to_dict(), "min_rule_residual": self.min_rule_residual,
                "norm_side_residual": self.norm_side_residual}


def block_cojsr_check(sys: SystemSpec, split: int, n_max: int = 6, tol: float | None = None,
                      budget: int = DEFAULT_BUDGET) -> BlockCoJSRReport:
    """Compare the co-JSR of a block upper-triangular family with the min over its diagonal blocks."""
    tol = sys.atol if tol is None else tol
    d = sys.dim
    if not 1 <= split < d:
        raise DomainError(f"split must lie in 1..{d - 1}")
    lower_left = sys.matrices[:, split:, :split]
    if np.max(np.abs(lower_left)) > tol:
        k = int(np.argmax(np.abs(lower_left).reshape(sys.K, -1).max(axis=1))) + 1
        raise DomainError(f"matrix {k} is not block upper-triangular for split {split}")
    A = SystemSpec(np.array(sys.matrices[:, :split, :split]), sys.nonsingularity_tol, sys.atol)
    B = SystemSpec(np.array(sys.matrices[:, split:, split:]), sys.nonsingularity_tol, sys.atol)
    whole = cojsr_bounds(sys, n_max, budget)
    ta = cojsr_bounds(A, whole.completed_depth, budget)
    tb = cojsr_bounds(B, whole.completed_depth, budget)
    res = abs(whole.best_upper - min(ta.best_upper, tb.best_upper))
    res_norm = abs(whole.best_lower - min(ta.best_lower, tb.best_lower))
    return BlockCoJSRReport(whole, ta, tb, res, res_norm)
