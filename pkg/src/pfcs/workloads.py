"""Synthetic traces and JSON Lines trace files.

One event per line::

    {"op":"access","key":17}
    {"op":"relate","keys":[3,4,5]}

Generators are pure functions of their spec (including the seed) and yield
events lazily, so arbitrarily long traces stream in constant memory.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

U64_MAX = 2**64 - 1
GENERATORS = ("sequential", "zipf", "join")


class InvalidSpec(ValueError):
    pass


class TraceParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # "access" | "relate"
    keys: tuple[int, ...]

    @classmethod
    def access(cls, key: int) -> TraceEvent:
        return cls("access", (key,))

    @classmethod
    def relate(cls, keys: Iterable[int]) -> TraceEvent:
        return cls("relate", tuple(keys))

    @property
    def key(self) -> int:
        return self.keys[0]

    def to_json(self) -> str:
        if self.kind == "access":
            return f'{{"op":"access","key":{self.keys[0]}}}'
        return '{"op":"relate","keys":[' + ",".join(map(str, self.keys)) + "]}"


@dataclass(frozen=True)
class WorkloadSpec:
    generator: str = "zipf"
    n_elements: int = 1000
    n_events: int = 10_000
    zipf_theta: float = 0.99
    join_fanout: int = 2
    join_follow_prob: float = 1.0
    seed: int = 0

    def validate(self) -> WorkloadSpec:
        if self.generator not in GENERATORS:
            raise InvalidSpec(f"unknown generator {self.generator!r}")
        if self.n_elements < 1 or self.n_events < 0:
            raise InvalidSpec("need n_elements >= 1 and n_events >= 0")
        if not self.zipf_theta > 0:
            raise InvalidSpec("zipf_theta must be > 0")
        if not 0 <= self.join_follow_prob <= 1:
            raise InvalidSpec("join_follow_prob must lie in [0, 1]")
        if self.join_fanout < 1:
            raise InvalidSpec("join_fanout must be >= 1")
        if self.generator == "join" and self.n_elements < self.join_fanout + 1:
            raise InvalidSpec("join needs at least one parent with its children")
        if not 0 <= self.seed <= U64_MAX:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> WorkloadSpec:
        return cls(**d).validate()


class ZipfSampler:
    """Ranks 1..n with P(k) proportional to k**-theta.

    Rejection-inversion (Hormann & Derflinger 1996), as in Apache Commons
    RNG. Works for any theta > 0 including theta == 1.
    """

    def __init__(self, n: int, theta: float, rng: random.Random):
        if n < 1 or not theta > 0:
            raise ValueError("need n >= 1 and theta > 0")
        self.n = n
        self.theta = theta
        self.rng = rng
        self._h_x1 = self._h_integral(1.5) - 1.0
        self._h_n = self._h_integral(n + 0.5)
        self._s = 2.0 - self._h_integral_inv(self._h_integral(2.5) - self._h(2.0))

    @staticmethod
    def _helper1(x: float) -> float:  # log1p(x) / x
        return math.log1p(x) / x if abs(x) > 1e-8 else 1.0 - x * (0.5 - x * (1 / 3 - 0.25 * x))

    @staticmethod
    def _helper2(x: float) -> float:  # expm1(x) / x
        return math.expm1(x) / x if abs(x) > 1e-8 else 1.0 + x * 0.5 * (1.0 + x * (1 / 3) * (1.0 + 0.25 * x))

    def _h(self, x: float) -> float:
        return math.exp(-self.theta * math.log(x))

    def _h_integral(self, x: float) -> float:
        log_x = math.log(x)
        return self._helper2((1.0 - self.theta) * log_x) * log_x

    def _h_integral_inv(self, x: float) -> float:
        t = x * (1.0 - self.theta)
        if t < -1.0:
            t = -1.0
        return math.exp(self._helper1(t) * x)

    def sample(self) -> int:
        while True:
            u = self._h_n + self.rng.random() * (self._h_x1 - self._h_n)
            x = self._h_integral_inv(u)
            k = int(x + 0.5)
            k = 1 if k < 1 else self.n if k > self.n else k
            if k - x <= self._s or u >= self._h_integral(k + 0.5) - self._h(k):
                return k


def zipf_mass(n: int, theta: float, k: int = 1) -> float:
    """Exact probability of rank k: k**-theta / H(n, theta)."""
    return k**-theta / math.fsum(i**-theta for i in range(1, n + 1))


def join_layout(n_elements: int, fanout: int) -> list[tuple[int, list[int]]]:
    """(parent, children) blocks laid out contiguously from key 0."""
    block = fanout + 1
    return [(b * block, [b * block + j for j in range(1, block)]) for b in range(n_elements // block)]


def generate(spec: WorkloadSpec) -> Iterator[TraceEvent]:
    spec.validate()
    rng = random.Random(spec.seed)
    n, total = spec.n_elements, spec.n_events
    if spec.generator == "sequential":
        for i in range(total):
            yield TraceEvent.access(i % n)
        return
    if spec.generator == "zipf":
        z = ZipfSampler(n, spec.zipf_theta, rng)
        for _ in range(total):
            yield TraceEvent.access(z.sample() - 1)
        return
    blocks = join_layout(n, spec.join_fanout)
    for parent, children in blocks:
        yield TraceEvent.relate([parent, *children])
    z = ZipfSampler(len(blocks), spec.zipf_theta, rng)
    emitted = 0
    while emitted < total:
        parent, children = blocks[z.sample() - 1]
        yield TraceEvent.access(parent)
        emitted += 1
        if rng.random() < spec.join_follow_prob:
            for child in children:
                if emitted == total:
                    break
                yield TraceEvent.access(child)
                emitted += 1


def write_trace(path: str | Path, events: Iterable[TraceEvent]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for ev in events:
            f.write(ev.to_json())
            f.write("\n")
            count += 1
    return count


def _as_key(v, lineno: int) -> int:
    if type(v) is not int or not 0 <= v <= U64_MAX:
        raise TraceParseError(lineno, f"key {v!r} is not an unsigned 64-bit integer")
    return v


def parse_event(line: str, lineno: int = 0) -> TraceEvent:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceParseError(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise TraceParseError(lineno, "event must be a JSON object")
    op = obj.get("op")
    if op == "access":
        if set(obj) != {"op", "key"}:
            raise TraceParseError(lineno, "access event takes exactly op and key")
        return TraceEvent.access(_as_key(obj["key"], lineno))
    if op == "relate":
        keys = obj.get("keys")
        if set(obj) != {"op", "keys"} or not isinstance(keys, list):
            raise TraceParseError(lineno, "relate event takes op and a keys list")
        keys = [_as_key(k, lineno) for k in keys]
        if len(keys) < 2 or len(set(keys)) != len(keys):
            raise TraceParseError(lineno, "relate needs two or more distinct keys")
        return TraceEvent.relate(keys)
    raise TraceParseError(lineno, f"unknown op {op!r}")


def read_trace(path: str | Path) -> Iterator[TraceEvent]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            yield parse_event(line, lineno)
