"""Brute-force reference computations on explicit covariance matrices.

Everything here works directly on full output covariance matrices: no
fidelity degeneracy, no multiplicativity shortcut, no counting arguments.
That makes it slow and small-scale, and exactly what the analytical engine
is validated against.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .channels import (
    LABELS,
    ChannelModel,
    subfidelity_closed_form,
    subfidelity_oracle,
)
from .errors import ClosedFormInvalid, InvalidArgument, ResourceLimit
from .gaussian import (
    CovarianceMatrix,
    ProbeEnergy,
    apply_gpi_pattern,
    cvghz_cm,
    direct_sum,
    gaussian_fidelity,
    single_mode_thermal_cm,
    tmsv_cm,
)
from .patterns import (
    ImageSpace,
    ProbeDomainDistribution,
    UniformAll,
    dynamic_to_fixed,
    enumerate_space,
    hamming_distance,
    klnn_distribution,
    target_count,
)

MAX_SPACE = 4096
MAX_MODIFIED_MODES = 24


@dataclass(frozen=True)
class OracleReport:
    value: float
    pair_count: int
    max_class_spread: float
    elapsed: float

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "pair_count": self.pair_count,
            "max_class_spread": self.max_class_spread,
            "elapsed_seconds": self.elapsed,
        }


def _probe_for_domain(width: int, energy: ProbeEnergy) -> CovarianceMatrix:
    if width == 1:
        # reduced state of any entangled probe mode; keeps the energy budget
        return single_mode_thermal_cm(energy)
    if width == 2:
        return tmsv_cm(energy)
    return cvghz_cm(width, energy)


def _output_states(
    patterns,
    s: ProbeDomainDistribution,
    model: ChannelModel,
    energy: ProbeEnergy,
):
    probe = direct_sum(*(_probe_for_domain(len(dom), energy) for dom in s.domains))
    outputs = []
    for pattern in patterns:
        modified = dynamic_to_fixed(pattern, s)
        params = [model.channel(bit) for bit in modified.bits]
        outputs.append(apply_gpi_pattern(probe, params))
    return outputs


def brute_total_error(
    space: ImageSpace,
    s: ProbeDomainDistribution,
    model: ChannelModel,
    energy: ProbeEnergy,
    m_copies: float,
) -> OracleReport:
    """Sum of F^M over all ordered unequal pattern pairs, from full CMs.

    Domains of any size are allowed: per-domain probes are TMSV pairs,
    CV-GHZ states for wider domains, and the single-mode thermal marginal
    for width-1 domains.
    """
    start = time.perf_counter()
    if space.size > MAX_SPACE:
        raise ResourceLimit(f"|U| = {space.size} exceeds the oracle cap {MAX_SPACE}")
    if s.total_width > MAX_MODIFIED_MODES:
        raise ResourceLimit(
            f"modified pattern length {s.total_width} exceeds "
            f"{MAX_MODIFIED_MODES} modes"
        )
    if m_copies < 0:
        raise InvalidArgument(f"copies must be >= 0, got {m_copies}")
    patterns = enumerate_space(space)
    outputs = _output_states(patterns, s, model, energy)
    total = 0.0
    pair_count = 0
    for i in range(len(outputs)):
        for j in range(i + 1, len(outputs)):
            f = gaussian_fidelity(outputs[i], outputs[j])
            total += 2.0 * f ** m_copies  # both ordered directions
            pair_count += 2
    return OracleReport(
        value=total,
        pair_count=pair_count,
        max_class_spread=0.0,
        elapsed=time.perf_counter() - start,
    )


def degeneracy_classes(
    m: int,
    model: ChannelModel,
    energy: ProbeEnergy,
    protocol: str,
) -> dict:
    """Fidelities of all ordered unequal pattern pairs, keyed by (u, v, d).

    protocol "cvghz": one m-mode entangled probe over unmodified patterns.
    protocol "kmax_tmsv": TMSV pairs on every channel pair, modified patterns.
    Ordered keys (u, v, d) and (v, u, d) are kept separate on purpose so the
    symmetry of the fidelity is itself testable.
    """
    if protocol == "cvghz":
        if m > 5:
            raise ResourceLimit(f"cvghz degeneracy check capped at m=5, got {m}")
        s = ProbeDomainDistribution(m=m, domains=(tuple(range(1, m + 1)),))
    elif protocol == "kmax_tmsv":
        if m > 4:
            raise ResourceLimit(f"kmax_tmsv degeneracy check capped at m=4, got {m}")
        s = klnn_distribution(m, m - 1)
    else:
        raise InvalidArgument(f"protocol must be 'cvghz' or 'kmax_tmsv', got {protocol!r}")
    patterns = enumerate_space(UniformAll(m))
    outputs = _output_states(patterns, s, model, energy)
    classes: dict = {}
    for i, pat_a in enumerate(patterns):
        for j, pat_b in enumerate(patterns):
            if i == j:
                continue
            key = (target_count(pat_a), target_count(pat_b), hamming_distance(pat_a, pat_b))
            classes.setdefault(key, []).append(
                gaussian_fidelity(outputs[i], outputs[j])
            )
    return classes


def verify_degeneracy(
    m: int,
    model: ChannelModel,
    energy: ProbeEnergy,
    protocol: str,
) -> OracleReport:
    """Within-class fidelity spread over all (u, v, d) degeneracy classes."""
    start = time.perf_counter()
    classes = degeneracy_classes(m, model, energy, protocol)
    spread = max(max(vals) - min(vals) for vals in classes.values())
    pair_count = sum(len(vals) for vals in classes.values())
    return OracleReport(
        value=spread,
        pair_count=pair_count,
        max_class_spread=spread,
        elapsed=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class ClosedFormValidation:
    """Per-label worst deviation of the closed forms from the oracle."""

    model_kind: str
    max_deviation: dict
    worst_point: dict
    invalid_points: dict

    def max_over_labels(self) -> float:
        return max(self.max_deviation.values())


def validate_closed_forms(model_grid) -> list:
    """Compare closed-form sub-fidelities with the oracle over a parameter grid.

    Returns one ClosedFormValidation per model kind present in the grid.
    Deviations are data, not errors; out-of-range closed forms are tallied
    separately (their deviation is measured against the carried oracle value).
    """
    if not model_grid:
        raise InvalidArgument("validation grid must be nonempty")
    by_kind: dict = {}
    for model, energy in model_grid:
        kind = type(model).__name__
        slot = by_kind.setdefault(
            kind,
            {
                "max_deviation": {label: 0.0 for label in LABELS},
                "worst_point": {label: None for label in LABELS},
                "invalid_points": {label: 0 for label in LABELS},
            },
        )
        for label in LABELS:
            oracle_value = subfidelity_oracle(label, model, energy)
            try:
                closed = subfidelity_closed_form(label, model, energy)
            except ClosedFormInvalid:
                # out-of-range closed form; counted, not folded into deviations
                slot["invalid_points"][label] += 1
                continue
            deviation = abs(closed - oracle_value)
            if deviation > slot["max_deviation"][label]:
                slot["max_deviation"][label] = deviation
                slot["worst_point"][label] = (model, energy.n_s)
    return [
        ClosedFormValidation(
            model_kind=kind,
            max_deviation=slot["max_deviation"],
            worst_point=slot["worst_point"],
            invalid_points=slot["invalid_points"],
        )
        for kind, slot in by_kind.items()
    ]
