"""Channel patterns, image spaces and probe-domain distributions.

Patterns are binary strings (0 = background, 1 = target); channel indices in
probe domains are 1-based.  Text formats: patterns as "0011", distributions
as semicolon-separated comma-lists, e.g. "1,2;2,3;3,1".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .errors import InvalidArgument, ResourceLimit

ENUMERATION_CAP = 10 ** 6


@dataclass(frozen=True)
class ChannelPattern:
    bits: tuple

    def __post_init__(self):
        if len(self.bits) < 1:
            raise InvalidArgument("pattern must have length >= 1")
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidArgument(f"pattern bits must be 0/1, got {self.bits}")

    @classmethod
    def from_string(cls, text: str) -> "ChannelPattern":
        if not text or set(text) - {"0", "1"}:
            raise InvalidArgument(f"pattern string must be over {{0,1}}, got {text!r}")
        return cls(tuple(int(ch) for ch in text))

    def __str__(self):
        return "".join(str(b) for b in self.bits)

    def __len__(self):
        return len(self.bits)


def hamming_distance(a: ChannelPattern, b: ChannelPattern) -> int:
    if len(a) != len(b):
        raise InvalidArgument(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a.bits, b.bits))


def target_count(a: ChannelPattern) -> int:
    return sum(a.bits)


@dataclass(frozen=True)
class ExplicitSpace:
    patterns: tuple

    def __post_init__(self):
        if not self.patterns:
            raise InvalidArgument("explicit image space must be nonempty")
        lengths = {len(p) for p in self.patterns}
        if len(lengths) != 1:
            raise InvalidArgument("explicit image space mixes pattern lengths")
        if len(set(self.patterns)) != len(self.patterns):
            raise InvalidArgument("explicit image space contains duplicates")

    @property
    def m(self) -> int:
        return len(self.patterns[0])

    @property
    def size(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class UCPF:
    """All m-length patterns with exactly u targets; |space| = C(m, u)."""

    m: int
    u: int

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.u <= self.m:
            raise InvalidArgument(f"need 0 <= u <= m, got u={self.u}, m={self.m}")

    @property
    def size(self) -> int:
        return comb(self.m, self.u)


@dataclass(frozen=True)
class BCPF:
    """Union of u-CPF spaces over a set of admissible target counts."""

    m: int
    target_counts: frozenset

    def __post_init__(self):
        if not self.target_counts:
            raise InvalidArgument("BCPF target-count set must be nonempty")
        if any(not 0 <= u <= self.m for u in self.target_counts):
            raise InvalidArgument(f"target counts must lie in 0..{self.m}")

    @property
    def size(self) -> int:
        return sum(comb(self.m, u) for u in self.target_counts)


@dataclass(frozen=True)
class UniformAll:
    """All 2^m binary patterns of length m."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgument("pattern length must be >= 1")

    @property
    def size(self) -> int:
        return 2 ** self.m


ImageSpace = ExplicitSpace | UCPF | BCPF | UniformAll


def space_size(space: ImageSpace) -> int:
    return space.size


def enumerate_space(space: ImageSpace, cap: int = ENUMERATION_CAP) -> list:
    """All patterns of the space in lexicographic order."""
    if space.size > cap:
        raise ResourceLimit(
            f"image space holds {space.size} patterns, above the cap of {cap}"
        )
    if isinstance(space, ExplicitSpace):
        return sorted(space.patterns, key=lambda p: p.bits)
    if isinstance(space, UniformAll):
        return [
            ChannelPattern(bits)
            for bits in itertools.product((0, 1), repeat=space.m)
        ]
    counts = {space.u} if isinstance(space, UCPF) else set(space.target_counts)
    patterns = []
    for u in counts:
        for positions in itertools.combinations(range(space.m), u):
            bits = [0] * space.m
            for p in positions:
                bits[p] = 1
            patterns.append(ChannelPattern(tuple(bits)))
    patterns.sort(key=lambda p: p.bits)
    return patterns


@dataclass(frozen=True)
class ProbeDomainDistribution:
    """Ordered collection of 1-based channel-index subsets covering 1..m."""

    m: int
    domains: tuple

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgument("pattern length must be >= 1")
        if not self.domains:
            raise InvalidArgument("distribution must contain at least one domain")
        covered = set()
        for dom in self.domains:
            if not dom:
                raise InvalidArgument("probe domains must be nonempty")
            if len(set(dom)) != len(dom):
                raise InvalidArgument(f"domain {dom} repeats an index")
            if any(not 1 <= i <= self.m for i in dom):
                raise InvalidArgument(f"domain {dom} leaves the range 1..{self.m}")
            covered.update(dom)
        if covered != set(range(1, self.m + 1)):
            missing = sorted(set(range(1, self.m + 1)) - covered)
            raise InvalidArgument(f"channels {missing} are not probed by any domain")

    @classmethod
    def from_string(cls, m: int, text: str) -> "ProbeDomainDistribution":
        try:
            domains = tuple(
                tuple(int(tok) for tok in part.split(","))
                for part in text.split(";")
                if part.strip()
            )
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse distribution {text!r}") from exc
        return cls(m=m, domains=domains)

    def __str__(self):
        return ";".join(",".join(str(i) for i in dom) for dom in self.domains)

    @property
    def total_width(self) -> int:
        return sum(len(dom) for dom in self.domains)

    @property
    def is_disjoint(self) -> bool:
        return self.total_width == self.m


@dataclass(frozen=True)
class ModifiedPattern:
    """Domain-wise concatenation of a pattern; the fixed-protocol image."""

    bits: tuple

    def __len__(self):
        return len(self.bits)


def is_valid_k(m: int, k: int) -> bool:
    """k-LNN validity: 1 <= k <= m-1 with k*m even (k*m/2 probe pairs)."""
    if m < 2:
        raise InvalidArgument(f"need at least 2 channels, got m={m}")
    return 1 <= k <= m - 1 and (k * m) % 2 == 0


def _ring_neighbours(m: int, k: int, j: int) -> list:
    """Ring neighbourhood: k/2 nearest on each side, plus the antipode for odd k.

    k = 1 (even m) degenerates to the disjoint adjacent pairing
    {1,2}, {3,4}, ... of the fixed protocol.
    """
    if k == 1:
        return [j + 1 if j % 2 else j - 1]
    out = []
    for step in range(1, k // 2 + 1):
        out.append((j - 1 + step) % m + 1)
        out.append((j - 1 - step) % m + 1)
    if k % 2:
        out.append((j - 1 + m // 2) % m + 1)
    return out


@lru_cache(maxsize=256)
def klnn_distribution(m: int, k: int) -> ProbeDomainDistribution:
    """Two-mode probe pairs in which every channel appears exactly k times."""
    if not is_valid_k(m, k):
        raise InvalidArgument(
            f"invalid k={k} for m={m}: need 1 <= k <= m-1 with k*m even"
        )
    pairs = set()
    for j in range(1, m + 1):
        for n in _ring_neighbours(m, k, j):
            pairs.add((min(j, n), max(j, n)))
    domains = tuple(sorted(pairs))
    return ProbeDomainDistribution(m=m, domains=domains)


def dynamic_to_fixed(a: ChannelPattern, s: ProbeDomainDistribution) -> ModifiedPattern:
    """Concatenate the pattern's bits over each domain, in domain order."""
    if len(a) != s.m:
        raise InvalidArgument(f"pattern length {len(a)} does not match m={s.m}")
    return ModifiedPattern(tuple(a.bits[i - 1] for dom in s.domains for i in dom))


@dataclass(frozen=True)
class ResourceBudget:
    """Probe copies together with the average channel use they realise."""

    m_copies: float
    m_bar: float

    def __post_init__(self):
        if self.m_copies < 0 or self.m_bar < 0:
            raise InvalidArgument("resource budget entries must be >= 0")

    @classmethod
    def for_distribution(
        cls, s: "ProbeDomainDistribution", m_copies: float
    ) -> "ResourceBudget":
        return cls(m_copies=m_copies, m_bar=average_channel_use(s, m_copies))


def average_channel_use(s: ProbeDomainDistribution, m_copies: float) -> float:
    """Mean number of probings per channel for an M-copy protocol."""
    if m_copies < 0:
        raise InvalidArgument(f"copies must be >= 0, got {m_copies}")
    return m_copies * s.total_width / s.m


def fair_copies(s: ProbeDomainDistribution, m_bar: float) -> float:
    """Probe copies (possibly fractional) that realise average channel use m_bar."""
    if m_bar < 0:
        raise InvalidArgument(f"average channel use must be >= 0, got {m_bar}")
    return m_bar * s.m / s.total_width
