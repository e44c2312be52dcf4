"""Switching laws as programs over the one-sided shift space.

A law is never stored as a stream of symbols.  Three program shapes cover
everything the toolkit produces:

* ``EventuallyPeriodic``: a finite prefix followed by a repeated period;
* ``BlockSchedule``: a prefix followed by ``(word, repeats)`` blocks, either
  a finite list or extended on demand by an index-based block rule;
* ``Synthesized``: a block schedule whose continuation is produced by a
  deterministic, resumable generator (see ``inclusionlab.synth``).

Positions are 1-based: ``law.evaluate(1)`` is the first symbol applied.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, HorizonError, InputError
from .linalg import Word, as_word


class LawProgram:
    """Common interface of every switching-law representation."""

    #: number of defined positions, ``None`` for infinite laws
    horizon: int | None = None

    def evaluate(self, n: int) -> int:
        raise NotImplementedError

    def take(self, N: int) -> np.ndarray:
        """Symbols at positions 1..N as an int64 array."""
        self._check(N)
        return np.fromiter((self.evaluate(n) for n in range(1, N + 1)), dtype=np.int64, count=N)

    def shift(self, times: int = 1) -> "LawProgram":
        return ShiftedLaw(self, times)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check(self, n: int) -> None:
        if n < 0:
            raise DomainError(f"position {n} is not a natural number")
        if self.horizon is not None and n > self.horizon:
            raise HorizonError(f"law is defined on 1..{self.horizon}, position {n} requested")

    def __call__(self, n: int) -> int:
        return self.evaluate(n)


def _minimal_period(period: Word) -> Word:
    p = len(period)
    for q in range(1, p + 1):
        if p % q == 0 and period[:q] * (p // q) == period:
            return period[:q]
    return period


@dataclass(frozen=True, init=False)
class EventuallyPeriodic(LawProgram):
    """``prefix`` then ``period`` repeated forever, held in canonical form.

    Canonical form uses the primitive period and the shortest prefix, so
    two programs describing the same sequence compare equal.
    """

    prefix: Word
    period: Word

    def __init__(self, prefix: Iterable[int] = (), period: Iterable[int] = (1,)):
        prefix = as_word(prefix, allow_empty=True)
        period = _minimal_period(as_word(period))
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    horizon = None

    def evaluate(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"position {n} is not a natural number")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.period[(n - len(self.prefix) - 1) % len(self.period)]

    def take(self, N: int) -> np.ndarray:
        self._check(N)
        p = np.asarray(self.prefix, dtype=np.int64)
        rest = max(0, N - p.size)
        reps = -(-rest // len(self.period))
        tail = np.tile(np.asarray(self.period, dtype=np.int64), reps)[:rest]
        return np.concatenate([p, tail])[:N]

    def shift(self, times: int = 1) -> "EventuallyPeriodic":
        if times < 0:
            raise DomainError("shift count must be non-negative")
        drop = min(times, len(self.prefix))
        r = (times - drop) % len(self.period)
        return EventuallyPeriodic(self.prefix[drop:], self.period[r:] + self.period[:r])

    @property
    def eventually_constant(self) -> bool:
        return len(self.period) == 1

    def to_dict(self) -> dict:
        return {"kind": "periodic", "prefix": list(self.prefix), "period": list(self.period)}


def constant_law(k: int) -> EventuallyPeriodic:
    return EventuallyPeriodic((), (k,))


BlockRule = Callable[[int], tuple[Sequence[int], int]]


class BlockSchedule(LawProgram):
    """Prefix followed by ``(word, repeats)`` blocks.

    Without a ``rule`` the schedule is finite.  With one, block ``i`` (0-based)
    beyond the listed blocks is ``rule(i)``; blocks are materialised lazily and
    cached, which never changes the observable sequence.
    """

    def __init__(
        self,
        prefix: Iterable[int] = (),
        blocks: Iterable[tuple[Sequence[int], int]] = (),
        rule: BlockRule | None = None,
        rule_spec: dict | None = None,
    ):
        self.prefix = as_word(prefix, allow_empty=True)
        self._words: list[Word] = []
        self._repeats: list[int] = []
        self._ends: list[int] = []  # cumulative end positions, prefix included
        self._rule = rule
        self.rule_spec = rule_spec
        for w, r in blocks:
            self._append(w, r)

    def _append(self, word, repeats) -> None:
        w = as_word(word)
        r = int(repeats)
        if r < 1:
            raise InputError(f"block repeats must be positive, got {r}")
        start = self._ends[-1] if self._ends else len(self.prefix)
        self._words.append(w)
        self._repeats.append(r)
        self._ends.append(start + r * len(w))

    def _extend(self) -> bool:
        """Materialise one more block; False when the schedule is finite."""
        if self._rule is None:
            return False
        w, r = self._rule(len(self._words))
        self._append(w, r)
        return True

    @property
    def horizon(self) -> int | None:
        if self._rule is not None:
            return None
        return self._ends[-1] if self._ends else len(self.prefix)

    @property
    def blocks(self) -> list[tuple[Word, int]]:
        """Blocks materialised so far."""
        return list(zip(self._words, self._repeats))

    def _cover(self, n: int) -> None:
        self._check(n)
        while (self._ends[-1] if self._ends else len(self.prefix)) < n:
            if not self._extend():
                raise HorizonError(f"law is defined on 1..{self.horizon}, position {n} requested")

    def block_index(self, n: int) -> int:
        """0-based block holding position n (-1 inside the prefix)."""
        if n <= len(self.prefix):
            return -1
        self._cover(n)
        return bisect.bisect_left(self._ends, n)

    def evaluate(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"position {n} is not a natural number")
        i = self.block_index(n)
        if i < 0:
            return self.prefix[n - 1]
        start = self._ends[i - 1] if i > 0 else len(self.prefix)
        w = self._words[i]
        return w[(n - start - 1) % len(w)]

    def take(self, N: int) -> np.ndarray:
        self._cover(N)
        parts = [np.asarray(self.prefix, dtype=np.int64)]
        have = len(self.prefix)
        for w, r in zip(self._words, self._repeats):
            if have >= N:
                break
            parts.append(np.tile(np.asarray(w, dtype=np.int64), r))
            have += r * len(w)
        return np.concatenate(parts)[:N]

    def to_dict(self) -> dict:
        if self._rule is not None:
            if self.rule_spec is None:
                raise DomainError("rule-extended schedule has no serialisable description")
            return dict(self.rule_spec)
        return {
            "kind": "blocks",
            "prefix": list(self.prefix),
            "blocks": [[list(w), r] for w, r in zip(self._words, self._repeats)],
        }

    def __eq__(self, other):
        if not isinstance(other, BlockSchedule) or self.horizon is None or other.horizon is None:
            return NotImplemented
        return self.horizon == other.horizon and np.array_equal(self.take(self.horizon), other.take(other.horizon))

    __hash__ = None


def geometric_law(symbols: Sequence[int] = (1, 2), first: int = 2, ratio: int = 2, prefix: Sequence[int] = ()) -> BlockSchedule:
    """Runs of ``symbols`` in turn, block i holding ``first * ratio**i`` copies.

    The default ``(1, 2), 2, 2`` gives 11 2222 1^8 2^16 ..., the doubling-runs
    law that is fiber-chaotic for {1/2, 2} yet has arbitrarily long constant runs.
    """
    syms = as_word(symbols)
    if first < 1 or ratio < 1:
        raise InputError("first and ratio must be positive integers")
    spec = {"kind": "geometric", "prefix": list(prefix), "symbols": list(syms), "first": int(first), "ratio": int(ratio)}
    return BlockSchedule(prefix, (), rule=lambda i: ((syms[i % len(syms)],), first * ratio**i), rule_spec=spec)


class Synthesized(BlockSchedule):
    """Block schedule continued by a deterministic resumable generator.

    ``step(state) -> (blocks, new_state, record)`` produces the next stage.
    ``records`` holds one record per stage emitted in this snapshot;
    ``advance`` returns a new snapshot with more stages and leaves this one
    untouched.  Positions past the snapshot are still well defined: they are
    computed on a private continuation of the same generator.
    """

    def __init__(self, prefix, stages: Sequence[tuple[list, object]], state, step, records=()):
        super().__init__(prefix)
        self._step = step
        self._state = state
        self.records = tuple(records)
        self._stage_blocks = [list(b) for b, _ in stages] if stages else []
        for blocks in self._stage_blocks:
            for w, r in blocks:
                self._append(w, r)
        self._snapshot_len = self._ends[-1] if self._ends else len(self.prefix)
        self._cont_state = state

    horizon = None

    @property
    def materialized_length(self) -> int:
        return self._snapshot_len

    def _extend(self) -> bool:
        blocks, self._cont_state, _ = self._step(self._cont_state)
        if not blocks:
            raise DomainError("generator produced an empty stage")
        for w, r in blocks:
            self._append(w, r)
        return True

    def advance(self, stages: int = 1) -> "Synthesized":
        """New snapshot with ``stages`` more stages recorded."""
        state = self._state
        new_stages = [(b, None) for b in self._stage_blocks]
        records = list(self.records)
        for _ in range(stages):
            blocks, state, rec = self._step(state)
            new_stages.append((blocks, None))
            records.append(rec)
        return Synthesized(self.prefix, new_stages, state, self._step, records)

    @property
    def stage_blocks(self) -> list[list[tuple[Word, int]]]:
        return [list(b) for b in self._stage_blocks]

    def snapshot_schedule(self) -> BlockSchedule:
        """The materialised stages as a finite, serialisable schedule."""
        blocks = [b for stage in self._stage_blocks for b in stage]
        return BlockSchedule(self.prefix, blocks)

    def to_dict(self) -> dict:
        return self.snapshot_schedule().to_dict()


class ShiftedLaw(LawProgram):
    """The law read from position ``offset + 1`` on (the shift map iterated)."""

    def __init__(self, base: LawProgram, offset: int = 1):
        if offset < 0:
            raise DomainError("shift count must be non-negative")
        if isinstance(base, ShiftedLaw):
            base, offset = base.base, base.offset + offset
        self.base = base
        self.offset = offset

    @property
    def horizon(self) -> int | None:
        h = self.base.horizon
        return None if h is None else max(0, h - self.offset)

    def evaluate(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"position {n} is not a natural number")
        self._check(n)
        return self.base.evaluate(n + self.offset)

    def take(self, N: int) -> np.ndarray:
        self._check(N)
        return self.base.take(N + self.offset)[self.offset:]

    def shift(self, times: int = 1) -> "ShiftedLaw":
        return ShiftedLaw(self.base, self.offset + times)

    def to_dict(self) -> dict:
        return {"kind": "shifted", "offset": self.offset, "base": self.base.to_dict()}


def shift(law: LawProgram, times: int = 1) -> LawProgram:
    """The one-sided shift: ``shift(law)(n) == law(n + 1)``."""
    return law.shift(times)


def evaluate(law: LawProgram, n: int) -> int:
    return law.evaluate(n)


# -- metric and cylinders --------------------------------------------------


def law_metric_truncated(a: LawProgram, b: LawProgram, N: int, K: int) -> tuple[float, float]:
    """Partial sum of sum_n |a(n) - b(n)| / K**n over n <= N, plus the tail bound.

    The true distance lies in ``[value, value + tail]`` with tail = K**-N.
    """
    if N < 1 or K < 1:
        raise DomainError("N and K must be positive")
    diff = np.abs(a.take(N) - b.take(N)).astype(float)
    weights = float(K) ** -np.arange(1, N + 1, dtype=float)
    tail = float(K) ** -N if K > 1 else 0.0
    return float(np.sum(diff * weights)), tail


@dataclass(frozen=True)
class CylinderPattern:
    """Fixed symbols j_start..j_{start+len-1} (positions are 1-based)."""

    start: int
    symbols: Word

    def __post_init__(self):
        if self.start < 1:
            raise InputError("cylinder start index must be >= 1")
        object.__setattr__(self, "symbols", as_word(self.symbols))

    @property
    def stop(self) -> int:
        return self.start + len(self.symbols) - 1


def cylinder(*symbols: int, start: int = 1) -> CylinderPattern:
    return CylinderPattern(start, tuple(symbols))


def matches_cylinder(law: LawProgram, pat: CylinderPattern) -> bool:
    seq = law.take(pat.stop)[pat.start - 1:]
    return bool(np.array_equal(seq, np.asarray(pat.symbols)))


# -- serialisation ---------------------------------------------------------


def law_from_dict(data: dict) -> LawProgram:
    kind = data.get("kind")
    if kind == "periodic":
        return EventuallyPeriodic(data.get("prefix", ()), data["period"])
    if kind == "blocks":
        return BlockSchedule(data.get("prefix", ()), [(w, r) for w, r in data.get("blocks", ())])
    if kind == "geometric":
        return geometric_law(data["symbols"], data["first"], data["ratio"], data.get("prefix", ()))
    if kind == "shifted":
        return ShiftedLaw(law_from_dict(data["base"]), int(data["offset"]))
    raise InputError(f"unknown law kind {kind!r}")


def law_max_symbol(law: LawProgram, N: int) -> int:
    return int(law.take(N).max()) if N > 0 else 0
