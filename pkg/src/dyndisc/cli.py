"""Command-line front end: bound queries, parameter sweeps, thresholds, verification.

Exit codes: 0 success, 1 internal numerical failure, 2 argument errors.
Every error path prints a single line to stderr prefixed "error:".
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .bounds import (
    BoundReport,
    advantage,
    bcpf_bounds,
    classical_space_lower,
    copies_threshold,
    fixed_uniform_bound,
    klnn_cpf_bound,
    ucpf_bounds,
)
from .channels import (
    AdditiveNoise,
    PureLoss,
    classical_fidelity,
    default_source,
    unique_set,
)
from .errors import (
    ClosedFormInvalid,
    DynDiscError,
    InvalidArgument,
    NoThreshold,
    ResourceLimit,
    UnsupportedDomain,
)
from .gaussian import ProbeEnergy
from .patterns import BCPF, UCPF, UniformAll, fair_copies, klnn_distribution
from .verify import run_verification

THREADS_ENV = "DYNDISC_THREADS"

SWEEP_HEADER = "axis1,axis2,p_lower,p_upper,p_cl_lower,delta_adv,M,Mbar"

AXIS_NAMES = ("eta_t", "eta_b", "nu_t", "nu_b", "ns")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyndisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--model", choices=("loss", "add"), required=True)
        p.add_argument("--eta-b", type=float, help="background transmissivity (loss)")
        p.add_argument("--eta-t", type=float, help="target transmissivity (loss)")
        p.add_argument("--nu-b", type=float, help="background added noise (add)")
        p.add_argument("--nu-t", type=float, help="target added noise (add)")
        p.add_argument("--ns", type=float, required=True, help="mean photons per signal mode")
        p.add_argument(
            "--source",
            choices=("auto", "closed", "oracle"),
            default="auto",
            help="sub-fidelity source; auto = validated closed forms for loss, oracle otherwise",
        )

    def add_task_flags(p):
        p.add_argument("--task", choices=("cpf", "ucpf", "bcpf", "uniform"), required=True)
        p.add_argument("--m", type=int, required=True, help="number of channels")
        p.add_argument("--k", default=None, help="neighbourhood width (integer or 'max')")
        p.add_argument("--u", type=int, default=None, help="target count for ucpf")
        p.add_argument("--set", dest="target_set", default=None,
                       help="comma-separated target counts for bcpf, e.g. 1,2")

    def add_resource_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--copies", type=float, default=None, help="probe copies M")
        g.add_argument("--photons-per-channel", type=float, default=None,
                       help="fixed photon budget Mbar * ns per channel")
        g.add_argument("--mbar", type=float, default=None, help="fixed average channel use")

    p_bound = sub.add_parser("bound", help="single bound query")
    add_task_flags(p_bound)
    add_model_flags(p_bound)
    add_resource_flags(p_bound)
    p_bound.add_argument("--format", choices=("json", "text"), default="json")

    p_sweep = sub.add_parser("sweep", help="grid sweep to CSV")
    add_task_flags(p_sweep)
    add_model_flags(p_sweep)
    add_resource_flags(p_sweep)
    p_sweep.add_argument("--axis", action="append", required=True,
                         metavar="NAME:MIN:MAX:STEPS",
                         help="swept axis (1 or 2 of eta_t, eta_b, nu_t, nu_b, ns)")
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_thresh = sub.add_parser("threshold", help="probe copies needed for advantage")
    p_thresh.add_argument("--m", type=int, required=True)
    add_model_flags(p_thresh)

    p_verify = sub.add_parser("verify", help="oracle-vs-analytical verification suite")
    p_verify.add_argument("--level", choices=("quick", "full"), default="quick")

    return parser


def _build_model(args, overrides=None):
    values = {
        "eta_b": args.eta_b, "eta_t": args.eta_t,
        "nu_b": args.nu_b, "nu_t": args.nu_t, "ns": args.ns,
    }
    if overrides:
        values.update(overrides)
    if args.model == "loss":
        if values["eta_b"] is None or values["eta_t"] is None:
            raise InvalidArgument("loss model needs --eta-b and --eta-t")
        model = PureLoss(eta_b=values["eta_b"], eta_t=values["eta_t"])
    else:
        if values["nu_b"] is None or values["nu_t"] is None:
            raise InvalidArgument("additive model needs --nu-b and --nu-t")
        model = AdditiveNoise(nu_b=values["nu_b"], nu_t=values["nu_t"])
    return model, ProbeEnergy(values["ns"])


def _resolve_k(args) -> int:
    m = args.m
    if args.task in ("ucpf", "bcpf"):
        if args.k not in (None, "max"):
            raise InvalidArgument(f"task {args.task} is defined for k=max only")
        return m - 1
    if args.task == "uniform":
        if args.k not in (None, "1", 1):
            raise InvalidArgument("uniform task uses the disjoint k=1 protocol")
        return 1
    if args.k is None or args.k == "max":
        return m - 1
    try:
        return int(args.k)
    except ValueError:
        raise InvalidArgument(f"--k must be an integer or 'max', got {args.k!r}")


def _resolve_resources(args, k: int, energy: ProbeEnergy):
    """Quantum copies and the shared average channel use for fair comparison."""
    dist = klnn_distribution(args.m, k)
    if args.photons_per_channel is not None:
        if energy.n_s <= 0:
            raise InvalidArgument("photon budget needs ns > 0")
        m_bar = args.photons_per_channel / energy.n_s
        return fair_copies(dist, m_bar), m_bar
    if args.mbar is not None:
        return fair_copies(dist, args.mbar), args.mbar
    copies = 1.0 if args.copies is None else args.copies
    if copies < 0:
        raise InvalidArgument(f"copies must be >= 0, got {copies}")
    return copies, copies * dist.total_width / args.m


def _space_for_task(args):
    if args.task == "cpf":
        return UCPF(args.m, 1)
    if args.task == "ucpf":
        if args.u is None:
            raise InvalidArgument("task ucpf needs --u")
        return UCPF(args.m, args.u)
    if args.task == "bcpf":
        if not args.target_set:
            raise InvalidArgument("task bcpf needs --set, e.g. --set 1,2")
        counts = frozenset(int(tok) for tok in args.target_set.split(","))
        return BCPF(args.m, counts)
    return UniformAll(args.m)


def _evaluate_cell(args, overrides=None) -> dict:
    """One full bound evaluation: quantum bounds, classical bound, advantage."""
    model, energy = _build_model(args, overrides)
    source = args.source
    if source == "auto":
        source = default_source(model)
    elif source == "closed":
        source = "closed_form"
    fids = unique_set(model, energy, source)
    k = _resolve_k(args)
    m_copies, m_bar = _resolve_resources(args, k, energy)
    space = _space_for_task(args)

    if args.task == "cpf":
        report = klnn_cpf_bound(args.m, k, m_copies, fids)
    elif args.task == "ucpf":
        report = ucpf_bounds(args.m, space.u, m_copies, fids)
    elif args.task == "bcpf":
        report = bcpf_bounds(args.m, space.target_counts, m_copies, fids)
    else:
        report = fixed_uniform_bound(args.m, m_copies, fids).engine

    f_cl = classical_fidelity(model, energy)
    classical = classical_space_lower(space, m_bar, f_cl)
    delta = None
    if classical > 0 and report.upper > 0:
        delta = advantage(classical, report.upper)
    cell = BoundReport(
        lower=report.lower,
        upper_raw=report.upper_raw,
        upper=report.upper,
        m_copies=m_copies,
        m_bar=m_bar,
        classical_lower=classical,
        delta_adv=delta,
    )
    return cell.as_dict()


def cmd_bound(args) -> int:
    result = _evaluate_cell(args)
    result = {"task": args.task, "m": args.m, **result}
    if args.format == "json":
        print(json.dumps(result, sort_keys=True))
    else:
        width = max(len(key) for key in result)
        for key in sorted(result):
            print(f"{key:<{width}}  {result[key]}")
    return 0


def _parse_axis(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise InvalidArgument(f"axis must be NAME:MIN:MAX:STEPS, got {spec!r}")
    name, lo, hi, steps = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    if name not in AXIS_NAMES:
        raise InvalidArgument(f"axis name must be one of {AXIS_NAMES}, got {name!r}")
    if steps < 2:
        raise InvalidArgument(f"axis needs at least 2 steps, got {steps}")
    values = [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]
    return name, values


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def cmd_sweep(args) -> int:
    axes = [_parse_axis(spec) for spec in args.axis]
    if not 1 <= len(axes) <= 2:
        raise InvalidArgument(f"sweeps take 1 or 2 axes, got {len(axes)}")
    model_kind_axes = {"eta_t", "eta_b"} if args.model == "loss" else {"nu_t", "nu_b"}
    for name, _ in axes:
        if name != "ns" and name not in model_kind_axes:
            raise InvalidArgument(f"axis {name!r} does not apply to model {args.model!r}")

    if len(axes) == 1:
        cells = [((v,), {axes[0][0]: v}) for v in axes[0][1]]
    else:
        cells = [
            ((v1, v2), {axes[0][0]: v1, axes[1][0]: v2})
            for v1 in axes[0][1]
            for v2 in axes[1][1]
        ]

    def evaluate(cell):
        coords, overrides = cell
        result = _evaluate_cell(args, overrides)
        ax2 = coords[1] if len(coords) > 1 else None
        return ",".join(
            (
                _fmt(coords[0]),
                _fmt(ax2),
                _fmt(result["p_lower"]),
                _fmt(result["p_upper"]),
                _fmt(result.get("p_classical_lower")),
                _fmt(result.get("delta_adv")),
                _fmt(result["M"]),
                _fmt(result["Mbar"]),
            )
        )

    workers = max(1, int(os.environ.get(THREADS_ENV, "1")))
    if workers == 1:
        rows = [evaluate(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, cells))
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(SWEEP_HEADER + "\n")
            for row in rows:
                fh.write(row + "\n")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_threshold(args) -> int:
    model, energy = _build_model(args)
    source = default_source(model) if args.source == "auto" else (
        "closed_form" if args.source == "closed" else "oracle"
    )
    fids = unique_set(model, energy, source)
    f_cl = classical_fidelity(model, energy)
    out = {"m": args.m, "model": args.model, "ns": energy.n_s}
    try:
        out["threshold_copies"] = copies_threshold(args.m, f_cl, fids)
    except NoThreshold as exc:
        out["threshold_copies"] = None
        out["note"] = str(exc)
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    results = run_verification(args.level)
    failed = 0
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        failed += not check.passed
        print(f"{status} {check.name}: {check.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "bound": cmd_bound,
        "sweep": cmd_sweep,
        "threshold": cmd_threshold,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except SystemExit:
        raise
    except (InvalidArgument, ResourceLimit, UnsupportedDomain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ClosedFormInvalid, DynDiscError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
