"""Command-line interface: ``clusterdj {run,verify,fit,characterize}``.

Exit status is 0 on success, 1 when a verification check fails and 2 for
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .characterization import (
    OutputTable,
    TableRow,
    bundled_reference_text,
    e_cluster_witness,
    fidelity_lower_bound,
    parse_reference_tables,
    render_table,
    witness_expectation,
)
from .checks import run_checks
from .core import InputError, fidelity_pure
from .deutsch import F_BALANCED, F_CONSTANT, BooleanFunction, FunctionClass, classify, dj_decide, dj_run
from .graphs import E_GRAPH, Frame, Graph, e_cluster, frame_transform, frame_transform_density
from .mbqc import (
    ROW_LABELS,
    FunctionKind,
    dj_pattern,
    empirical_distribution,
    enumerate_distribution,
    sample_outcomes,
)
from .noise import NOISELESS, NoiseProfile, apply_profile, fit_profile, noisy_distribution, sample_noisy

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2
PUBLISHED_WITNESS = -0.333


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    function: BooleanFunction
    profile: NoiseProfile = NOISELESS
    shots: int | None = None
    seed: int = 0
    frame: Frame = Frame.CLUSTER
    output_format: str = "text"
    output_path: Path | None = None

    def __post_init__(self) -> None:
        if self.shots is not None and self.shots < 1:
            raise UsageError("--shots must be >= 1")


@dataclass(frozen=True)
class RunReport:
    header: dict
    table: OutputTable | None

    def records(self) -> list[dict]:
        rows = [] if self.table is None else self.table.to_records()
        return [{"record": "header", **self.header}] + [{"record": "row", **r} for r in rows]


def _round(value):
    if isinstance(value, float):
        return round(value, 12)
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    return value


def to_jsonl(records: Sequence[dict]) -> str:
    return "".join(json.dumps(_round(r), sort_keys=True) + "\n" for r in records)


def _kind_for(f: BooleanFunction) -> FunctionKind | None:
    if f == F_BALANCED:
        return FunctionKind.BALANCED
    if f == F_CONSTANT:
        return FunctionKind.CONSTANT
    return None


def _decision(table: OutputTable) -> FunctionClass:
    best = max(table.rows, key=lambda r: r.ff)
    return FunctionClass.CONSTANT if best.label[:2] == "00" else FunctionClass.BALANCED


def run_experiment(config: RunConfig) -> RunReport:
    """Build the cluster, add noise, execute the pattern and tabulate the outputs."""
    f = config.function
    kind = _kind_for(f)
    header = {
        "function": f.format(),
        "profile": config.profile.format(),
        "seed": config.seed,
        "shots": config.shots,
        "frame": config.frame.value,
    }
    if kind is None:
        return _run_circuit(f, config, header)

    pattern = dj_pattern(kind).in_frame(config.frame)
    state = e_cluster()
    if config.frame is Frame.LABORATORY:
        state = frame_transform(state, Frame.LABORATORY)
    noisy = config.profile != NOISELESS
    if config.shots is None:
        if noisy:
            rho = apply_profile(e_cluster(), config.profile).rho
            if config.frame is Frame.LABORATORY:
                rho = frame_transform_density(rho, Frame.LABORATORY)
            dist = noisy_distribution(rho, pattern)
        else:
            dist = enumerate_distribution(state, pattern)
    else:
        if noisy:
            outcomes = sample_noisy(state, config.profile, pattern, config.shots, config.seed)
        else:
            outcomes = sample_outcomes(state, pattern, config.shots, config.seed)
        dist = empirical_distribution(outcomes)
    table = render_table(dist, kind, shots=config.shots)
    header.update(
        engine="mbqc",
        kind=kind.value,
        decision=_decision(table).value,
        oracle_calls=1,
    )
    return RunReport(header, table)


def _run_circuit(f: BooleanFunction, config: RunConfig, header: dict) -> RunReport:
    # only f_B and f_C have cluster patterns; other functions use the gate model
    if config.profile != NOISELESS:
        raise UsageError(f"noise is only modelled for the cluster patterns, not {f.format()}")
    if f.n != 2:
        raise UsageError("explicit functions must be on 2 bits (4 table entries)")
    cls = classify(f)
    if cls is FunctionClass.NEITHER:
        raise UsageError(f"{f.format()} is neither constant nor balanced")
    probs = [float(p) for p in dj_run(f).probabilities()]
    decision, calls = dj_decide(f, seed=config.seed)
    header.update(engine="circuit", kind=cls.value, decision=decision.value, oracle_calls=calls, shots=None)
    best = max(range(len(probs)), key=probs.__getitem__)
    rows = tuple(
        TableRow(label, probs[i], probs[i], expected=i == best) for i, label in enumerate(ROW_LABELS)
    )
    return RunReport(header, OutputTable(FunctionKind(cls.value), rows))


def format_run_text(report: RunReport) -> str:
    h = report.header
    lines = [
        f"function {h['function']} ({h['kind']}), engine {h['engine']}, frame {h['frame']}",
        f"noise {h['profile']}, "
        + ("exact enumeration" if h["shots"] is None else f"{h['shots']} shots, seed {h['seed']}"),
        f"decision: {h['decision']} (oracle calls: {h['oracle_calls']})",
        "",
    ]
    text = "\n".join(lines) + "\n"
    if report.table is not None:
        text += report.table.to_text()
    return text


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _parse_function(text: str) -> BooleanFunction:
    lowered = text.strip().lower()
    if lowered == "balanced":
        return F_BALANCED
    if lowered == "constant":
        return F_CONSTANT
    return BooleanFunction.parse(text)


def cmd_run(args: argparse.Namespace) -> int:
    if args.exact and args.shots is not None:
        raise UsageError("--exact and --shots are mutually exclusive")
    config = RunConfig(
        function=_parse_function(args.function),
        profile=NoiseProfile.parse(args.noise) if args.noise else NOISELESS,
        shots=args.shots,
        seed=args.seed,
        frame=Frame(args.frame),
        output_format=args.format,
        output_path=args.output,
    )
    report = run_experiment(config)
    text = to_jsonl(report.records()) if config.output_format == "json" else format_run_text(report)
    _emit(text, config.output_path)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    edges = None
    if args.corrupt_edges:
        edges = Graph(6, [e for e in E_GRAPH.sorted_edges() if e != (2, 3)])
    elif args.edges:
        edges = Graph.parse(args.edges, n_vertices=6)
    results = run_checks(edges)
    lines = [r.format() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    text = bundled_reference_text() if args.reference is None else _read_reference(args.reference)
    tables = parse_reference_tables(text, args.function)
    records: list[dict] = []
    chunks: list[str] = []
    for kind, ref in sorted(tables.items(), key=lambda kv: kv[0].value):
        ff_ref = ref.column("ff")
        if ff_ref is None:
            raise UsageError(f"{kind.value} reference has no FF column")
        result = fit_profile(ff_ref, kind, step=args.step, upper=args.upper)
        model = render_table(noisy_distribution(apply_profile(e_cluster(), result.profile), dj_pattern(kind)), kind)
        records.append(
            {
                "record": "fit",
                "function": kind.value,
                "profile": result.profile.format(),
                "visibilities": list(result.profile.visibilities),
                "tv_distance": result.tv_distance,
            }
        )
        for ref_row, model_row in zip(ref.rows, model.rows):
            records.append(
                {
                    "record": "row",
                    "function": kind.value,
                    "row_label": ref_row.label,
                    "reference_no_ff": ref_row.no_ff,
                    "reference_ff": ref_row.ff,
                    "model_no_ff": model_row.no_ff,
                    "model_ff": model_row.ff,
                }
            )
        chunks.append(_fit_text(kind, result, ref, model))
    _emit(to_jsonl(records) if args.format == "json" else "\n".join(chunks), args.output)
    return EXIT_OK


def _pct(p: float | None) -> str:
    return "n/a" if p is None else f"{100 * p:.1f}"


def _fit_text(kind, result, ref: OutputTable, model: OutputTable) -> str:
    v = result.profile.visibilities
    lines = [
        f"{kind.value}: fitted {result.profile.format()} "
        f"(V_EI={v[0]:.3f}, V_pol={v[1]:.3f}, V_rl={v[2]:.3f}), TV = {result.tv_distance:.4f}",
        f"{'Output':<8}{'ref No-FF':>11}{'ref FF':>9}{'model No-FF':>13}{'model FF':>10}",
    ]
    for r, m in zip(ref.rows, model.rows):
        lines.append(
            f"|{r.label}>  {_pct(r.no_ff):>11}{_pct(r.ff):>9}{_pct(m.no_ff):>13}{_pct(m.ff):>10}"
        )
    return "\n".join(lines) + "\n"


def _read_reference(path: Path) -> str:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if not text.strip():
        raise UsageError(f"{path} is empty")
    return text


def cmd_characterize(args: argparse.Namespace) -> int:
    profile = NoiseProfile.parse(args.noise) if args.noise else NOISELESS
    frame = Frame(args.frame)
    ideal = e_cluster()
    rho = apply_profile(ideal, profile).rho
    if frame is Frame.LABORATORY:
        rho = frame_transform_density(rho, frame)
        target = frame_transform(ideal, frame)
    else:
        target = ideal
    w = witness_expectation(rho, e_cluster_witness(frame))
    record = {
        "record": "characterization",
        "profile": profile.format(),
        "frame": frame.value,
        "witness": w,
        "fidelity_lower_bound": fidelity_lower_bound(w),
        "fidelity": fidelity_pure(rho, target),
        "purity": rho.purity(),
        "published_witness": PUBLISHED_WITNESS,
        "published_fidelity_bound": fidelity_lower_bound(PUBLISHED_WITNESS),
    }
    if args.format == "json":
        text = to_jsonl([record])
    else:
        text = (
            f"noise {record['profile']} ({frame.value} frame)\n"
            f"witness <W>            {w:+.4f}   (published {PUBLISHED_WITNESS:+.3f})\n"
            f"fidelity bound (1-W)/2 {record['fidelity_lower_bound']:.4f}   "
            f"(published {record['published_fidelity_bound']:.4f})\n"
            f"fidelity <E|rho|E>     {record['fidelity']:.4f}\n"
            f"genuine 6-qubit entanglement certified: {'yes' if w < 0 else 'no'}\n"
        )
    _emit(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clusterdj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", type=Path, default=None, help="write to a file instead of stdout")

    run = sub.add_parser("run", help="execute a Deutsch-Jozsa pattern on the cluster")
    run.add_argument("--function", default="balanced", help="balanced, constant or a literal like f=0110")
    run.add_argument("--noise", default=None, help="e.g. pEI:0.15,pPol:0.04,pRl:0.01")
    run.add_argument("--shots", type=int, default=None)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--exact", action="store_true", help="exact enumeration (default without --shots)")
    run.add_argument("--frame", choices=[f.value for f in Frame], default=Frame.CLUSTER.value)
    common(run)
    run.set_defaults(handler=cmd_run)

    verify = sub.add_parser("verify", help="run the state, pattern and circuit equivalence checks")
    verify.add_argument("--edges", default=None, help='cluster edge list, e.g. "1-4, 2-5, 3-6, 1-2, 2-3"')
    verify.add_argument("--corrupt-edges", action="store_true", help="drop edge 2-3 (negative control)")
    verify.add_argument("--output", type=Path, default=None)
    verify.set_defaults(handler=cmd_verify)

    fit = sub.add_parser("fit", help="fit a dephasing profile to reference output tables")
    fit.add_argument("reference", nargs="?", type=Path, default=None, help="defaults to the bundled data")
    fit.add_argument("--function", choices=[k.value for k in FunctionKind], default=None)
    fit.add_argument("--step", type=float, default=0.005)
    fit.add_argument("--upper", type=float, default=0.3)
    common(fit)
    fit.set_defaults(handler=cmd_fit)

    char = sub.add_parser("characterize", help="witness, fidelity bound and fidelity of a noisy cluster")
    char.add_argument("--noise", default=None)
    char.add_argument("--frame", choices=[f.value for f in Frame], default=Frame.CLUSTER.value)
    common(char)
    char.set_defaults(handler=cmd_characterize)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (UsageError, InputError) as exc:
        print(f"clusterdj {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
