"""Two-mode sub-fidelities and classical benchmark fidelities.

The four sub-fidelities F01, F11, F02, F12 are Bures fidelities between TMSV
outputs from two-channel sub-patterns with the minimal admissible Hamming
distance: 01 -> (00, 01), 11 -> (01, 10), 02 -> (00, 11), 12 -> (01, 11).

Each label has a closed form and a brute-force oracle path.  The oracle is
authoritative: closed forms are validated against it (see oracle module) and
raise ClosedFormInvalid, carrying the oracle value, whenever they leave
(0, 1].  The additive-noise F11/F02 closed forms fail that validation and are
kept only behind the closed_form flag; the pure-loss F01/F12 closed forms are
assembled from two-mode fidelity invariants, the only formulation found that
matches the oracle over the whole parameter range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ClosedFormInvalid, InvalidArgument
from .gaussian import (
    GpiChannelParams,
    ProbeEnergy,
    apply_gpi_pattern,
    gaussian_fidelity,
    tmsv_cm,
)

LABELS = ("01", "11", "02", "12")

SUB_PATTERNS = {
    "01": ((0, 0), (0, 1)),
    "11": ((0, 1), (1, 0)),
    "02": ((0, 0), (1, 1)),
    "12": ((0, 1), (1, 1)),
}

RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class PureLoss:
    """Quantum reading: background/target transmissivities of pure-loss cells."""

    eta_b: float
    eta_t: float

    def __post_init__(self):
        # eta = 0 admitted so the vacuum-replacement limit stays evaluable
        for name, eta in (("eta_b", self.eta_b), ("eta_t", self.eta_t)):
            if not 0 <= eta <= 1:
                raise InvalidArgument(f"{name} must be in [0, 1], got {eta}")

    def channel(self, bit: int) -> GpiChannelParams:
        return GpiChannelParams.pure_loss(self.eta_t if bit else self.eta_b)


@dataclass(frozen=True)
class AdditiveNoise:
    """Environment localisation: background/target added-noise variances."""

    nu_b: float
    nu_t: float

    def __post_init__(self):
        for name, nu in (("nu_b", self.nu_b), ("nu_t", self.nu_t)):
            if nu < 0:
                raise InvalidArgument(f"{name} must be >= 0, got {nu}")

    def channel(self, bit: int) -> GpiChannelParams:
        return GpiChannelParams.additive(self.nu_t if bit else self.nu_b)


ChannelModel = PureLoss | AdditiveNoise


@dataclass(frozen=True)
class UniqueFidelitySet2:
    """The four unique two-mode sub-fidelities for one channel model and energy."""

    f01: float
    f11: float
    f02: float
    f12: float

    def __post_init__(self):
        for name, f in self.as_dict().items():
            if not 0 < f <= 1 + 1e-12:
                raise InvalidArgument(f"sub-fidelity {name}={f} outside (0, 1]")

    def as_dict(self) -> dict:
        return {"01": self.f01, "11": self.f11, "02": self.f02, "12": self.f12}

    @classmethod
    def ones(cls) -> "UniqueFidelitySet2":
        return cls(1.0, 1.0, 1.0, 1.0)


def classical_fidelity(model: ChannelModel, energy: ProbeEnergy) -> float:
    """Single-channel output fidelity of the optimal classical probe.

    Coherent states for pure loss; for additive noise the optimal classical
    input is the vacuum, so the energy argument is ignored there.
    """
    if isinstance(model, PureLoss):
        return math.exp(-0.5 * energy.n_s * (model.eta_b - model.eta_t) ** 2)
    nu_t, nu_b = model.nu_t, model.nu_b
    return 1.0 / (math.sqrt((nu_t + 1.0) * (nu_b + 1.0)) - math.sqrt(nu_t * nu_b))


def subfidelity_oracle(label: str, model: ChannelModel, energy: ProbeEnergy) -> float:
    """Brute-force path: build the two output covariance matrices and compare."""
    if label not in SUB_PATTERNS:
        raise InvalidArgument(f"unknown sub-fidelity label {label!r}")
    probe = tmsv_cm(energy)
    pat_a, pat_b = SUB_PATTERNS[label]
    out_a = apply_gpi_pattern(probe, [model.channel(b) for b in pat_a])
    out_b = apply_gpi_pattern(probe, [model.channel(b) for b in pat_b])
    return gaussian_fidelity(out_a, out_b)


# --- pure-loss closed forms -------------------------------------------------

def _loss_f11(ns: float, eta_t: float, eta_b: float) -> float:
    ebar = eta_b * eta_t * (1.0 - eta_t) * (1.0 - eta_b)
    estar = eta_b + eta_t - 2.0 * eta_b * eta_t
    return 1.0 / (ns * (estar - 2.0 * math.sqrt(ebar)) + 1.0)


def _loss_f02(ns: float, eta_t: float, eta_b: float) -> float:
    # radicand orientation chosen positive on the physical domain
    ebar = eta_b * eta_t * (1.0 - eta_t) * (1.0 - eta_b)
    etil = (eta_b + eta_t - 2.0) * (eta_b + eta_t)
    rad = 1.0 + 4.0 * ns * ns * ebar - ns * etil
    return (2.0 * ns * math.sqrt(ebar) + math.sqrt(rad)) / (1.0 - ns * etil)


def _loss_f01(ns: float, eta_t: float, eta_b: float) -> float:
    """Fidelity of (B,B) vs (B,T) outputs, via the two-mode fidelity invariants.

    Writing y1, y2 for the fidelity-symplectic eigenvalues, the Bures fidelity
    is F^2 = prod_k (2 sqrt(y_k) + sqrt(4 y_k - 1)) / sqrt(det(V1+V2)).  The
    symmetric functions of y are evaluated from machine-derived factored
    polynomials so that the radicands vanish exactly at eta -> 1 instead of by
    floating-point cancellation.
    """
    n = ns
    gb2, gt2 = eta_b, eta_t
    gb = math.sqrt(eta_b)
    gt = math.sqrt(eta_t)
    n1 = n * (n + 1.0)

    # det(V1 + V2); equal for the x and p quadrature sectors
    a12 = 2.0 * (gb2 * n + 0.5)
    b12 = (gb2 + gt2) * n + 1.0
    c12 = (gb2 + gb * gt) * math.sqrt(n1)
    dpoly = a12 * b12 - c12 * c12

    # sqrt(det M1 det M2) = |ppoly| / 4
    ppoly = (
        4.0 * gb2 ** 3 * gt2 * n * n
        - 2.0 * gb2 ** 3 * n * n
        - 6.0 * gb2 ** 2 * gt2 * n * n
        + 3.0 * gb2 ** 2 * n * n
        - gb2 ** 2 * n
        - 2.0 * gb2 * gb * gt * n1
        + 3.0 * gb2 * gt2 * n * n
        - gb2 * gt2 * n
        + 3.0 * gb2 * n
        + gt2 * n
        + 1.0
    )
    p_hat = abs(ppoly) / 4.0

    # u = (4y1 - 1)(4y2 - 1), factored: 16 n^4 eta_b^3 eta_t (eta_b-1)^3 (eta_t-1)
    u_hat = 4.0 * n * n * gb2 * gb * gt * math.sqrt(
        max((1.0 - gb2) ** 3 * (1.0 - gt2), 0.0)
    )

    # q = y1(4y2-1) + y2(4y1-1), factored as n^2 eta_b (eta_b - 1) * qbig
    qbig = (
        (gb2 ** 4 * n * n - 2.0 * gb2 ** 3 * n * n + gb2 ** 3 * n - 3.0 * gb2 ** 2 * n - gb2)
        + gt * (2.0 * gb2 ** 2 * gb * n1)
        + gt2 * (
            -8.0 * gb2 ** 4 * n * n
            + 16.0 * gb2 ** 3 * n * n
            - 2.0 * gb2 ** 3 * n
            - 8.0 * gb2 ** 2 * n * n
            + 8.0 * gb2 ** 2 * n
            - 4.0 * gb2 * n
            + 2.0 * gb2
            - 1.0
        )
        + gt2 * gt * (2.0 * gb2 * gb * n1 * (1.0 - 2.0 * gb2))
        + gt2 * gt2 * (
            8.0 * gb2 ** 4 * n * n
            - 16.0 * gb2 ** 3 * n * n
            + 11.0 * gb2 ** 2 * n * n
            - 2.0 * gb2 ** 2 * n
            - 2.0 * gb2 * n * n
            + 3.0 * gb2 * n
            - n
        )
    )
    q_hat = n * n * gb2 * (gb2 - 1.0) * qbig

    f2_num = 4.0 * p_hat + u_hat + 2.0 * math.sqrt(max(q_hat + 2.0 * p_hat * u_hat, 0.0))
    return math.sqrt(f2_num) / dpoly


# --- additive-noise closed forms ---------------------------------------------

def _add_f01(ns: float, nu_t: float, nu_b: float) -> float:
    mu = ns + 0.5
    w_b = nu_b + 2.0 * mu

    def gam(ni, nj):
        return 2.0 * mu * (ni + nj) + ni * (2.0 * nj + 1.0) - nj

    g_bt, g_tb = gam(nu_b, nu_t), gam(nu_t, nu_b)
    gbar = 0.5 * (g_bt + g_tb)
    cross = math.sqrt(max(g_bt * g_tb, 0.0))
    num = math.sqrt(max(nu_b * w_b * (gbar + cross), 0.0)) + math.sqrt(
        max(1.0 + gbar + nu_b * w_b * (gbar + 2.0 + cross), 0.0)
    )
    return num / (gbar + 2.0 * nu_b * w_b + 1.0)


def _add_f11(ns: float, nu_t: float, nu_b: float) -> float:
    def nutil(ni, nj):
        return ns * (ni + nj) + ni * (nj + 1.0)

    n_tb, n_bt = nutil(nu_t, nu_b), nutil(nu_b, nu_t)
    return 1.0 / (2.0 * (n_tb - nu_t - math.sqrt(max(n_tb * n_bt, 0.0))) + 1.0)


def _add_f02(ns: float, nu_t: float, nu_b: float) -> float:
    mu = ns + 0.5
    w_t, w_b = nu_t + 2.0 * mu, nu_b + 2.0 * mu
    inner = 2.0 * nu_b * w_t * (2.0 * nu_t * w_b + 1.0) + nu_t * (w_t + 2.0 * mu) + nu_b + 1.0
    return 1.0 / (math.sqrt(max(inner, 0.0)) - 2.0 * math.sqrt(nu_b * nu_t * w_b * w_t))


def subfidelity_closed_form(label: str, model: ChannelModel, energy: ProbeEnergy) -> float:
    ns = energy.n_s
    if isinstance(model, PureLoss):
        table = {
            "01": lambda: _loss_f01(ns, model.eta_t, model.eta_b),
            "11": lambda: _loss_f11(ns, model.eta_t, model.eta_b),
            "02": lambda: _loss_f02(ns, model.eta_t, model.eta_b),
            "12": lambda: _loss_f01(ns, model.eta_b, model.eta_t),
        }
    else:
        table = {
            "01": lambda: _add_f01(ns, model.nu_t, model.nu_b),
            "11": lambda: _add_f11(ns, model.nu_t, model.nu_b),
            "02": lambda: _add_f02(ns, model.nu_t, model.nu_b),
            "12": lambda: _add_f01(ns, model.nu_b, model.nu_t),
        }
    if label not in table:
        raise InvalidArgument(f"unknown sub-fidelity label {label!r}")
    value = table[label]()
    if not math.isfinite(value) or not 0.0 < value <= 1.0 + RANGE_SLACK:
        oracle_value = subfidelity_oracle(label, model, energy)
        raise ClosedFormInvalid(
            f"closed-form F{label} = {value} outside (0, 1] for {model}; "
            f"oracle gives {oracle_value}",
            oracle_value,
        )
    return min(value, 1.0)


def subfidelity(
    label: str, model: ChannelModel, energy: ProbeEnergy, source: str = "oracle"
) -> float:
    """One two-mode sub-fidelity, via the closed form or the Gaussian oracle."""
    if source == "oracle":
        return subfidelity_oracle(label, model, energy)
    if source == "closed_form":
        return subfidelity_closed_form(label, model, energy)
    raise InvalidArgument(f"source must be 'closed_form' or 'oracle', got {source!r}")


def default_source(model: ChannelModel) -> str:
    """Validated default: loss closed forms pass, additive F11/F02 do not."""
    return "closed_form" if isinstance(model, PureLoss) else "oracle"


def unique_set(
    model: ChannelModel, energy: ProbeEnergy, source: str = "oracle"
) -> UniqueFidelitySet2:
    """All four sub-fidelities for one model and probe energy."""
    vals = {label: subfidelity(label, model, energy, source) for label in LABELS}
    return UniqueFidelitySet2(
        f01=vals["01"], f11=vals["11"], f02=vals["02"], f12=vals["12"]
    )
