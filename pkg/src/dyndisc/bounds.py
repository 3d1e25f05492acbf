"""Symbolic error polynomials and the closed-form discrimination bounds.

The total error quantity D[U, M] sums F^M over all ordered unequal pattern
pairs of an image space; with uniform priors the classification error obeys

    D[U, 2M] / (2 |U|^2)  <=  p_err  <=  D[U, M] / |U|.

For two-mode probe domains every pair fidelity is a monomial in the four
sub-fidelities, so D is a polynomial with integer exponents and
multiplicities.  The generic engine built here is the normalization
authority; the closed forms below reproduce it exactly, and the test suite
holds them to that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .channels import UniqueFidelitySet2
from .errors import InvalidArgument, NoThreshold, UnsupportedDomain
from .patterns import (
    ImageSpace,
    ProbeDomainDistribution,
    UCPF,
    enumerate_space,
    is_valid_k,
    space_size,
)

# exponent vectors are (e01, e11, e02, e12)
_LABEL_AXIS = {"01": 0, "11": 1, "02": 2, "12": 3}


@dataclass(frozen=True)
class ErrorPolynomial:
    """Multiset of fidelity monomials: exponent vector -> multiplicity."""

    terms: dict
    space_size: int

    def multiplicity_total(self) -> int:
        return sum(self.terms.values())

    def evaluate(self, fids: UniqueFidelitySet2, m_copies: float) -> float:
        """D(M): each monomial's exponents are scaled by the (real) copy count."""
        logs = [
            math.log(fids.f01),
            math.log(fids.f11),
            math.log(fids.f02),
            math.log(fids.f12),
        ]
        total = 0.0
        for expo, mult in self.terms.items():
            log_term = m_copies * sum(e * lg for e, lg in zip(expo, logs))
            total += mult * math.exp(log_term)
        return total

    def serialize(self) -> str:
        """Text lines "e01 e11 e02 e12 multiplicity", sorted lexicographically."""
        lines = [
            f"{e[0]} {e[1]} {e[2]} {e[3]} {mult}"
            for e, mult in sorted(self.terms.items())
        ]
        return "\n".join(lines)

    @classmethod
    def deserialize(cls, text: str, space_size: int) -> "ErrorPolynomial":
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise InvalidArgument(f"bad polynomial line {line!r}")
            e = tuple(int(x) for x in parts[:4])
            terms[e] = terms.get(e, 0) + int(parts[4])
        return cls(terms=terms, space_size=space_size)


@dataclass(frozen=True)
class BoundReport:
    """Lower/upper error-probability bounds plus optional classical comparison."""

    lower: float
    upper_raw: float
    upper: float
    m_copies: float
    m_bar: float
    classical_lower: float | None = None
    delta_adv: float | None = None

    def as_dict(self) -> dict:
        out = {
            "p_lower": self.lower,
            "p_upper_raw": self.upper_raw,
            "p_upper": self.upper,
            "M": self.m_copies,
            "Mbar": self.m_bar,
        }
        if self.classical_lower is not None:
            out["p_classical_lower"] = self.classical_lower
        if self.delta_adv is not None:
            out["delta_adv"] = self.delta_adv
        return out


def _classify_pair(sub_a: tuple, sub_b: tuple) -> str | None:
    """Sub-fidelity label for a two-bit sub-pattern pair, or None if equal."""
    if sub_a == sub_b:
        return None
    ta, tb = sub_a[0] + sub_a[1], sub_b[0] + sub_b[1]
    lo, hi = min(ta, tb), max(ta, tb)
    if (lo, hi) == (1, 1):
        return "11"
    return f"{lo}{hi}"


def build_error_polynomial(
    space: ImageSpace, s: ProbeDomainDistribution, cap: int = 10 ** 6
) -> ErrorPolynomial:
    """Exact error polynomial of a two-mode-constrained (fixed or dynamic) protocol.

    Every ordered unequal pattern pair contributes one monomial, obtained by
    classifying the modified sub-pattern pair on each probe domain.
    """
    if any(len(dom) != 2 for dom in s.domains):
        raise UnsupportedDomain(
            "the symbolic engine handles two-element domains only; "
            "use oracle.brute_total_error for general domain sizes"
        )
    patterns = enumerate_space(space, cap=cap)
    if patterns and len(patterns[0]) != s.m:
        raise InvalidArgument(
            f"space patterns have length {len(patterns[0])}, distribution has m={s.m}"
        )
    doms = [(i - 1, j - 1) for i, j in s.domains]
    terms: dict = {}
    for a in patterns:
        for b in patterns:
            if a == b:
                continue
            expo = [0, 0, 0, 0]
            for i, j in doms:
                label = _classify_pair((a.bits[i], a.bits[j]), (b.bits[i], b.bits[j]))
                if label is not None:
                    expo[_LABEL_AXIS[label]] += 1
            key = tuple(expo)
            terms[key] = terms.get(key, 0) + 1
    return ErrorPolynomial(terms=terms, space_size=len(patterns))


def evaluate_bounds(
    poly: ErrorPolynomial,
    fids: UniqueFidelitySet2,
    m_copies: float,
    m_bar: float | None = None,
) -> BoundReport:
    """Uniform-prior bounds from a polynomial: D(2M)/(2|U|^2) and D(M)/|U|."""
    if m_copies < 0:
        raise InvalidArgument(f"copies must be >= 0, got {m_copies}")
    size = poly.space_size
    lower = poly.evaluate(fids, 2.0 * m_copies) / (2.0 * size * size)
    upper_raw = poly.evaluate(fids, m_copies) / size
    return BoundReport(
        lower=max(lower, 0.0),
        upper_raw=upper_raw,
        upper=min(upper_raw, 1.0),
        m_copies=m_copies,
        m_bar=m_bar if m_bar is not None else m_copies,
    )


def _pow(f: float, exponent: float) -> float:
    # f in (0, 1]; exact at f == 1 for any exponent
    return math.exp(exponent * math.log(f)) if f != 1.0 else 1.0


def klnn_cpf_bound(
    m: int, k: int, m_copies: float, fids: UniqueFidelitySet2
) -> BoundReport:
    """Single-target CPF bounds of the k-LNN protocol.

    D(M) = km (F01^(2k-2) F11)^M + (2 C(m,2) - km) F01^(2kM), normalized over
    the m-pattern CPF space.
    """
    if not is_valid_k(m, k):
        raise InvalidArgument(
            f"invalid k={k} for m={m}: need 1 <= k <= m-1 with k*m even"
        )
    if m_copies < 0:
        raise InvalidArgument(f"copies must be >= 0, got {m_copies}")

    def big_d(x: float) -> float:
        near = k * m * _pow(_pow(fids.f01, 2 * k - 2) * fids.f11, x)
        far = (2 * comb(m, 2) - k * m) * _pow(fids.f01, 2 * k * x)
        return near + far

    lower = big_d(2.0 * m_copies) / (2.0 * m * m)
    upper_raw = big_d(m_copies) / m
    return BoundReport(
        lower=lower,
        upper_raw=upper_raw,
        upper=min(upper_raw, 1.0),
        m_copies=m_copies,
        m_bar=k * m_copies,
    )


def valid_distances(m: int, u: int, v: int) -> list:
    """Admissible Hamming distances between a u-target and a v-target pattern."""
    u, v = min(u, v), max(u, v)
    d_min = v - u
    d_max = min(u + v, 2 * m - (u + v))
    return list(range(d_min, d_max + 1, 2))


def counting_exponents(m: int, u: int, v: int, d: int):
    """Sub-fidelity exponents (e01, e11, e02, e12) of the all-pairs protocol.

    For patterns with u and v targets at Hamming distance d, probed with a
    TMSV pair on every channel pair, the output fidelity is
    F01^e01 F11^e11 F02^e02 F12^e12.  Closed forms solve the distance
    recursions e11(d) - e11(d-2) = d-1, e02(d) - e02(d-2) = d-2,
    e01(d) - e01(d-2) = 2m-(u+v)-2(d-1), e12(d) - e12(d-2) = (u+v)-2(d-1),
    anchored at d = v - u.
    """
    if not (0 <= u <= m and 0 <= v <= m):
        raise InvalidArgument(f"need 0 <= u, v <= m, got u={u}, v={v}, m={m}")
    u, v = min(u, v), max(u, v)
    d_min = v - u
    d_max = min(u + v, 2 * m - (u + v))
    if d < d_min or d > d_max or (d - d_min) % 2:
        raise InvalidArgument(
            f"distance d={d} invalid for (m={m}, u={u}, v={v}): "
            f"need {d_min} <= d <= {d_max} with d = {d_min} (mod 2)"
        )
    e01 = d * (2 * (m - v) - (d - d_min)) // 2
    e11 = (d * d - d_min * d_min) // 4
    e02 = (d * (d - 2) + d_min * d_min) // 4
    e12 = d * (2 * u - (d - d_min)) // 2
    return e01, e11, e02, e12


def unique_fidelity_kmax(
    m: int, u: int, v: int, d: int, fids: UniqueFidelitySet2, m_copies: float
) -> float:
    """Output fidelity F_[u:v|d]^M of the all-pairs (k = m-1) protocol."""
    e01, e11, e02, e12 = counting_exponents(m, u, v, d)
    log_f = (
        e01 * math.log(fids.f01)
        + e11 * math.log(fids.f11)
        + e02 * math.log(fids.f02)
        + e12 * math.log(fids.f12)
    )
    return math.exp(m_copies * log_f)


@lru_cache(maxsize=4096)
def _kmax_terms(m: int, u: int, v: int):
    """Pair counts, exponent vectors and distances between u/v-CPF spaces.

    For u == v the distance classes are d = 2(t-u) with t in (u, min(2u, m)];
    for u < v they are d = 2t-(u+v) with t in [v, min(u+v, m)].
    """
    counts = []
    expos = []
    dists = []
    if u == v:
        for t in range(u + 1, min(2 * u, m) + 1):
            counts.append(comb(m, t) * comb(t, u) * comb(u, 2 * u - t))
            dists.append(2 * (t - u))
            expos.append(counting_exponents(m, u, u, 2 * (t - u)))
    else:
        lo, hi = min(u, v), max(u, v)
        for t in range(hi, min(lo + hi, m) + 1):
            counts.append(comb(m, t) * comb(t, hi) * comb(hi, (lo + hi) - t))
            dists.append(2 * t - (lo + hi))
            expos.append(counting_exponents(m, lo, hi, 2 * t - (lo + hi)))
    counts_arr = np.array(counts, dtype=float)
    expos_arr = np.array(expos, dtype=float).reshape(len(counts), 4)
    dists_arr = np.array(dists, dtype=float)
    for arr in (counts_arr, expos_arr, dists_arr):
        arr.setflags(write=False)
    return counts_arr, expos_arr, dists_arr


def _fidelity_logs(fids: UniqueFidelitySet2) -> np.ndarray:
    return np.array(
        [
            math.log(fids.f01),
            math.log(fids.f11),
            math.log(fids.f02),
            math.log(fids.f12),
        ]
    )


def ucpf_total_error(
    m: int, u: int, m_copies: float, fids: UniqueFidelitySet2
) -> float:
    """Total error quantity over the u-target CPF space under the k_max protocol.

    Sum over union-sizes t of the ordered-pair count C(m,t) C(t,u) C(u,2u-t)
    times the unique fidelity at distance 2(t-u).
    """
    if not 0 <= u <= m:
        raise InvalidArgument(f"need 0 <= u <= m, got u={u}, m={m}")
    counts, expos, _ = _kmax_terms(m, u, u)
    if not counts.size:
        return 0.0
    return float(counts @ np.exp(m_copies * (expos @ _fidelity_logs(fids))))


def _cross_total_error(
    m: int, u: int, v: int, m_copies: float, fids: UniqueFidelitySet2
) -> float:
    """Ordered-pair error contribution between u-CPF and v-CPF spaces (u != v)."""
    counts, expos, _ = _kmax_terms(m, u, v)
    if not counts.size:
        return 0.0
    return float(counts @ np.exp(m_copies * (expos @ _fidelity_logs(fids))))


@lru_cache(maxsize=256)
def _bcpf_terms(m: int, target_counts: tuple):
    """Flattened term table for a whole bounded-CPF space."""
    blocks = [_kmax_terms(m, u, u) for u in target_counts]
    for u in target_counts:
        for v in target_counts:
            if u < v:
                counts, expos, dists = _kmax_terms(m, u, v)
                # both ordered directions carry the same fidelity
                blocks.append((2.0 * counts, expos, dists))
    counts_arr = np.concatenate([b[0] for b in blocks])
    expos_arr = np.concatenate([b[1] for b in blocks])
    dists_arr = np.concatenate([b[2] for b in blocks])
    for arr in (counts_arr, expos_arr, dists_arr):
        arr.setflags(write=False)
    return counts_arr, expos_arr, dists_arr


def bcpf_total_error(
    m: int, target_set, m_copies: float, fids: UniqueFidelitySet2
) -> float:
    counts = sorted(set(target_set))
    if not counts or any(not 0 <= u <= m for u in counts):
        raise InvalidArgument(f"target set must be a nonempty subset of 0..{m}")
    pair_counts, expos, _ = _bcpf_terms(m, tuple(counts))
    if not pair_counts.size:
        return 0.0
    return float(pair_counts @ np.exp(m_copies * (expos @ _fidelity_logs(fids))))


def bcpf_bounds(
    m: int, target_set, m_copies: float, fids: UniqueFidelitySet2
) -> BoundReport:
    """Bounded-CPF error bounds under the k_max protocol, Sigma-normalized."""
    counts = sorted(set(target_set))
    if not counts or any(not 0 <= u <= m for u in counts):
        raise InvalidArgument(f"target set must be a nonempty subset of 0..{m}")
    sigma = sum(comb(m, u) for u in counts)
    lower = bcpf_total_error(m, counts, 2.0 * m_copies, fids) / (2.0 * sigma * sigma)
    upper_raw = bcpf_total_error(m, counts, m_copies, fids) / sigma
    return BoundReport(
        lower=lower,
        upper_raw=upper_raw,
        upper=min(upper_raw, 1.0),
        m_copies=m_copies,
        m_bar=(m - 1) * m_copies,
    )


def ucpf_bounds(
    m: int, u: int, m_copies: float, fids: UniqueFidelitySet2
) -> BoundReport:
    """u-CPF error bounds under the k_max protocol."""
    size = comb(m, u)
    lower = ucpf_total_error(m, u, 2.0 * m_copies, fids) / (2.0 * size * size)
    upper_raw = ucpf_total_error(m, u, m_copies, fids) / size
    return BoundReport(
        lower=lower,
        upper_raw=upper_raw,
        upper=min(upper_raw, 1.0),
        m_copies=m_copies,
        m_bar=(m - 1) * m_copies,
    )


@dataclass(frozen=True)
class FixedUniformReport:
    """Compact uniform-pattern bound next to the generic-engine normalization.

    The compact product form carries prefactors that disagree with the generic
    engine by a factor 2^m (the engine's D equals 2^m times the compact D);
    both are reported and the engine value is authoritative.
    """

    compact: BoundReport
    engine: BoundReport
    normalization_ratio: float


def fixed_uniform_bound(
    m: int, m_copies: float, fids: UniqueFidelitySet2
) -> FixedUniformReport:
    """Disjoint-TMSV bounds for uniform patterns over an even channel count."""
    if m < 2 or m % 2:
        raise InvalidArgument(f"uniform fixed protocol needs even m >= 2, got {m}")

    def compact_d(x: float) -> float:
        bracket = (
            1.0
            + _pow(fids.f01, x)
            + _pow(fids.f12, x)
            + 0.5 * (_pow(fids.f11, x) + _pow(fids.f02, x))
        )
        return bracket ** (m / 2.0) - 1.0

    size = 2 ** m
    compact = BoundReport(
        lower=compact_d(2.0 * m_copies) / 2 ** (2 * m + 1),
        upper_raw=compact_d(m_copies) / size,
        upper=min(compact_d(m_copies) / size, 1.0),
        m_copies=m_copies,
        m_bar=m_copies,
    )
    # generic engine: D_engine = 2^m * D_compact, uniform-prior normalization
    engine_lower = size * compact_d(2.0 * m_copies) / (2.0 * size * size)
    engine_upper_raw = compact_d(m_copies)
    engine = BoundReport(
        lower=engine_lower,
        upper_raw=engine_upper_raw,
        upper=min(engine_upper_raw, 1.0),
        m_copies=m_copies,
        m_bar=m_copies,
    )
    return FixedUniformReport(
        compact=compact, engine=engine, normalization_ratio=float(size)
    )


def classical_cpf_lower(m: int, m_copies: float, f_cl: float) -> float:
    """Best known classical lower bound for single-target CPF."""
    if not 0 < f_cl <= 1:
        raise InvalidArgument(f"classical fidelity must be in (0, 1], got {f_cl}")
    return (m - 1) / (2.0 * m) * _pow(f_cl, 4.0 * m_copies)


def classical_space_lower(
    space: ImageSpace, m_copies: float, f_cl: float
) -> float:
    """Fidelity lower bound for the optimal classical protocol on any space.

    Classical outputs are channel-wise products, so a pattern pair at Hamming
    distance d has output fidelity f_cl^d; the bound is
    (1/2|U|^2) sum_pairs f_cl^(2Md), evaluated by distance counting.
    """
    if not 0 < f_cl <= 1:
        raise InvalidArgument(f"classical fidelity must be in (0, 1], got {f_cl}")
    if isinstance(space, UCPF) and space.u == 1:
        return classical_cpf_lower(space.m, m_copies, f_cl)
    size = space_size(space)
    pair_counts, _, dists = _bcpf_terms(space.m, tuple(_target_counts(space)))
    if not pair_counts.size:
        return 0.0
    if f_cl == 1.0:
        total = float(pair_counts.sum())
    else:
        total = float(pair_counts @ np.exp(2.0 * m_copies * math.log(f_cl) * dists))
    return total / (2.0 * size * size)


def _target_counts(space: ImageSpace) -> list:
    from .patterns import BCPF, ExplicitSpace, UniformAll

    if isinstance(space, UCPF):
        return [space.u]
    if isinstance(space, BCPF):
        return sorted(space.target_counts)
    if isinstance(space, UniformAll):
        return list(range(space.m + 1))
    if isinstance(space, ExplicitSpace):
        raise InvalidArgument("distance counting needs a structured image space")
    raise InvalidArgument(f"unknown image space {space!r}")


def advantage(p_cl_lb: float, p_q_ub: float) -> float:
    """Guaranteed-advantage log-ratio; positive certifies quantum advantage."""
    if p_cl_lb <= 0 or p_q_ub <= 0:
        raise InvalidArgument(
            f"advantage needs positive bounds, got ({p_cl_lb}, {p_q_ub})"
        )
    return math.log10(p_cl_lb / p_q_ub)


def copies_threshold(m: int, f_cl: float, fids: UniqueFidelitySet2) -> float:
    """Probe copies beyond which the k_max protocol guarantees advantage.

    Threshold = log10(2m) / [4 log10(f_cl) - log10(F01^(2(m-2)) F11)/(m-1)];
    a nonpositive denominator means no finite threshold exists.
    """
    if m < 2:
        raise InvalidArgument(f"need m >= 2, got {m}")
    if not 0 < f_cl <= 1:
        raise InvalidArgument(f"classical fidelity must be in (0, 1], got {f_cl}")
    quantum_log = (2 * (m - 2)) * math.log10(fids.f01) + math.log10(fids.f11)
    denom = 4.0 * math.log10(f_cl) - quantum_log / (m - 1)
    # denominators at rounding-noise scale (fidelities ~1 - eps) are not positive
    if denom <= 1e-12:
        raise NoThreshold(
            f"no finite copy threshold: denominator {denom:.6g} is not positive"
        )
    return math.log10(2.0 * m) / denom
