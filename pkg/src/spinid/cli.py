"""Command-line front end.

Subcommands: analyze (identifiability verdict plus certificate),
identify (single reconstruction to CSV), reproduce-fig2 (the error
versus data-length sweep), oracle-check (linear model against the
density-matrix oracle), probe-atypical (frequency of degenerate
parameter draws). Report commands render a matching .png next to every
CSV they write.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import (
    AtypicalInstanceError,
    ConditioningError,
    DimensionError,
    ResourceLimitError,
    SpecFileError,
)
from .estimator import (
    default_error_scaling_spec,
    error_scaling_csv,
    identify_hamiltonian,
    run_error_scaling,
)
from .identifiability import (
    SearchBudget,
    VerdictStatus,
    assess_identifiability,
    atypicality_probe,
    certificate_to_text,
)
from .linsys import evolve_output
from .plotting import save_error_curve, save_estimate_chart
from .specfile import (
    ExperimentSpec,
    apply_overrides,
    dump_spec,
    load_spec_file,
)
from .spin_models import build_linear_model, parameter_locations, quantum_oracle_trace

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_DIMENSION = 3
EXIT_CONDITIONING = 4
EXIT_ATYPICAL = 5

_EPILOG = """\
exit codes:
  0  success
  2  spec file or argument parse error
  3  dimension or resource-limit error
  4  conditioning error (design or transform numerically unusable)
  5  atypical instance (measure-zero parameter configuration)

spec file grammar (flat key = value lines, '#' comments):
  family       exchange_no_field | exchange_with_field   (required)
  n            parameter count                           (required)
  theta        comma-separated reals                     (required)
  measurement  x1 | y1           (default x1)
  dt           sampling period   (default 0.1)
  N            data length       (default 100)
  q            truncation order  (default: floor(0.3 N) + 3)
  noise_sigma  per-sample noise  (default 0)
  repeats      Monte-Carlo runs  (default 1)
  seed         RNG seed          (default 0)
"""

_PREDICATES = ("zero_eigenvalue", "eigenvalue_pair_sum_zero", "multiple_eigenvalues")


def _print_error(exc: Exception) -> None:
    message = " ".join(str(exc).split())
    print(f"error: {message}", file=sys.stderr)


def _resolve_spec(args, default: ExperimentSpec | None = None) -> ExperimentSpec | None:
    """Load, override, and optionally dump the experiment spec.

    Returns None when --dump-spec consumed the invocation.
    """
    if getattr(args, "spec", None):
        spec = load_spec_file(args.spec)
    elif default is not None:
        spec = default
    else:
        raise SpecFileError("this command requires --spec PATH")
    if args.override:
        spec = apply_overrides(spec, args.override)
    if getattr(args, "seed", None) is not None:
        spec = spec.with_updates(seed=args.seed)
    if getattr(args, "repeats", None) is not None:
        spec = spec.with_updates(repeats=args.repeats)
    if args.dump_spec:
        print(dump_spec(spec), end="")
        return None
    return spec


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def cmd_analyze(args) -> int:
    spec = _resolve_spec(args)
    if spec is None:
        return EXIT_OK
    verdict = assess_identifiability(spec.model, SearchBudget(seed=spec.seed))
    scope = " (magnitude-only)" if verdict.magnitude_only else ""
    status = verdict.status.value.capitalize()
    print(f"verdict: {status}{scope}")
    print(f"expected for this family/measurement: {verdict.expected.value}")
    if verdict.unidentifiable_params:
        print(
            "parameters absent from the minimal subsystem: "
            + ", ".join(str(i) for i in verdict.unidentifiable_params)
        )
    if verdict.notes:
        print(f"notes: {verdict.notes}")
    if verdict.disagrees_with_theory:
        print("warning: numeric result disagrees with the family-level theory")
    if verdict.certificate is not None:
        out = (
            Path(args.out)
            if args.out
            else Path(args.spec).with_suffix(".certificate.txt")
        )
        out.write_text(certificate_to_text(verdict.certificate))
        tp = ", ".join(f"{t:.6g}" for t in verdict.certificate.theta_prime)
        print(f"indistinguishable alternative theta' = ({tp})")
        print(f"certificate: {out}")
    return EXIT_OK


def cmd_identify(args) -> int:
    spec = _resolve_spec(args)
    if spec is None:
        return EXIT_OK
    result = identify_hamiltonian(spec.model, spec.config())
    locations = parameter_locations(spec.model)
    out = Path(args.out) if args.out else Path("identify.csv")
    lines = [
        "param,row,col,theta_hat,entry_estimate,residual_norm,"
        "amplification,condition,truncation_bound"
    ]
    for param in sorted(locations):
        r, c, _ = locations[param][0]
        report = result.per_entry[(r, c)]
        lines.append(
            "%d,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g"
            % (
                param,
                r,
                c,
                result.theta_hat[param - 1],
                report.estimate,
                report.residual_norm,
                report.amplification,
                report.condition,
                report.bound.bound,
            )
        )
    out.write_text("\n".join(lines) + "\n")
    fig = save_estimate_chart(result, spec.model.theta, _figure_path(out))
    print(f"theta_hat: ({', '.join(f'{t:.6g}' for t in result.theta_hat)})")
    print(f"relative error: {result.relative_error:.6g}")
    print(f"wrote {out} and {fig}")
    return EXIT_OK


def cmd_reproduce_fig2(args) -> int:
    default = ExperimentSpec(
        model=default_error_scaling_spec(),
        dt=0.1,
        n_samples=100,
        noise_sigma=0.001,
        repeats=100,
        seed=42,
    )
    spec = _resolve_spec(args, default=default)
    if spec is None:
        return EXIT_OK
    grid = range(10, 101, 10)
    points = run_error_scaling(
        spec.model,
        grid,
        repeats=spec.repeats,
        seed=spec.seed,
        dt=spec.dt,
        noise_sigma=spec.noise_sigma,
        q=spec.q,
    )
    out = Path(args.out) if args.out else Path("fig2.csv")
    out.write_text(error_scaling_csv(points))
    fig = save_error_curve(points, _figure_path(out))
    first, last = points[0], points[-1]
    print(
        f"mean relative error: {first.mean_rel_error:.6g} (N={first.n_samples})"
        f" -> {last.mean_rel_error:.6g} (N={last.n_samples})"
    )
    print(f"wrote {out} and {fig}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    spec = _resolve_spec(args)
    if spec is None:
        return EXIT_OK
    times = np.linspace(0.0, args.tmax, 500)
    model = build_linear_model(spec.model)
    y_linear = evolve_output(model, times)
    y_oracle = quantum_oracle_trace(spec.model, times)
    deviation = float(np.max(np.abs(y_linear - y_oracle)))
    print(
        f"max |linear - oracle| over [0, {args.tmax:g}] "
        f"on 500 points: {deviation:.3e}"
    )
    return EXIT_OK


def cmd_probe_atypical(args) -> int:
    seed = args.seed if args.seed is not None else 0
    for predicate in _PREDICATES:
        freq = atypicality_probe(predicate, args.n, args.samples, seed)
        hits = round(freq * args.samples)
        print(f"{predicate}: {hits}/{args.samples} (frequency {freq:.3g})")
    return EXIT_OK


def _add_common(sub, *, spec_required: bool) -> None:
    sub.add_argument(
        "--spec",
        metavar="PATH",
        required=spec_required,
        help="experiment spec file",
    )
    sub.add_argument(
        "--override",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="override one spec key; repeatable",
    )
    sub.add_argument("--seed", type=int, default=None, help="override the spec seed")
    sub.add_argument(
        "--dump-spec",
        action="store_true",
        help="print the effective spec and exit without running",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinid",
        description="Identifiability analysis and entry-wise identification "
        "of single-probe spin-chain Hamiltonians.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser(
        "analyze",
        help="identifiability verdict; writes a certificate when unidentifiable",
    )
    _add_common(analyze, spec_required=True)
    analyze.add_argument("--out", metavar="PATH", help="certificate output path")
    analyze.set_defaults(func=cmd_analyze)

    identify = commands.add_parser(
        "identify", help="reconstruct parameters from simulated traces"
    )
    _add_common(identify, spec_required=True)
    identify.add_argument(
        "--repeats", type=int, default=None, help="override the spec repeat count"
    )
    identify.add_argument(
        "--out", metavar="PATH", help="estimate CSV path (default identify.csv)"
    )
    identify.set_defaults(func=cmd_identify)

    fig2 = commands.add_parser(
        "reproduce-fig2",
        help="mean relative error over the N = 10..100 grid "
        "(default: the reference 5-qubit chain)",
    )
    _add_common(fig2, spec_required=False)
    fig2.add_argument(
        "--repeats", type=int, default=None, help="override the spec repeat count"
    )
    fig2.add_argument(
        "--out", metavar="PATH", help="grid CSV path (default fig2.csv)"
    )
    fig2.set_defaults(func=cmd_reproduce_fig2)

    oracle = commands.add_parser(
        "oracle-check",
        help="compare the compressed linear model with the density-matrix oracle",
    )
    _add_common(oracle, spec_required=True)
    oracle.add_argument(
        "--tmax", type=float, default=5.0, help="time horizon (default 5)"
    )
    oracle.set_defaults(func=cmd_oracle_check)

    probe = commands.add_parser(
        "probe-atypical",
        help="sampled frequency of the measure-zero degeneracies",
    )
    probe.add_argument("--n", type=int, default=5, help="parameter count (odd)")
    probe.add_argument(
        "--samples", type=int, default=10000, help="number of random draws"
    )
    probe.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    probe.set_defaults(func=cmd_probe_atypical)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        _print_error(exc)
        return EXIT_SPEC
    except (DimensionError, ResourceLimitError) as exc:
        _print_error(exc)
        return EXIT_DIMENSION
    except ConditioningError as exc:
        _print_error(exc)
        return EXIT_CONDITIONING
    except AtypicalInstanceError as exc:
        _print_error(exc)
        return EXIT_ATYPICAL


if __name__ == "__main__":
    sys.exit(main())
