"""Command-line front door: batch calibration, fitting, benchmarking, plots.

Commands print JSON summaries on stdout and write data files where asked.
Validation failures exit with code 2 and a one-line JSON diagnostic on
stderr; an argument evaluation halted by unresolved quantifiers exits with
code 3. All randomness is seed-controlled, so runs are byte-reproducible.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .argument import (
    Ambiguous,
    EvalConfig,
    GraphStructureError,
    PendingAmbiguities,
    QuantifierLexicon,
    UnknownQuantifierError,
    default_quantifier_lexicon,
    evaluate,
    evaluation_to_dict,
    graph_from_dict,
    lookup_quantifier,
    resolve_ambiguity,
)
from .bayes import (
    Bayesian,
    BenchConfig,
    Conservative,
    Verbal,
    run_benchmark,
    write_benchmark_csv,
)
from .elicitation import (
    CalibrationFailedError,
    InconsistentResponderError,
    SimulatedResponder,
    elicit_lexicon,
)
from .fuzzy import UnitFuzzyNumber
from .lexicon import Lexicon, LexiconError, default_lexicon
from .plotting import bench_svg, benchmark_rows, curve_svg, lexicon_csv, lexicon_svg
from .rasch import (
    UnfittableMatrixError,
    calibration_gap,
    difficulty_by_label,
    fit,
    read_records_csv,
    read_response_matrix_csv,
    write_curve_csv,
)

EXIT_VALIDATION = 2
EXIT_PENDING = 3


def _fail(error: str, detail, code: int = EXIT_VALIDATION) -> None:
    sys.stderr.write(json.dumps({"error": error, "detail": detail}, sort_keys=True) + "\n")
    sys.exit(code)


def _jsonable(x: float):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _emit(data: dict, output: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _write_text(text: str, output: str) -> None:
    Path(output).write_text(text, encoding="utf-8")


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        _fail("validation", f"cannot read {path}: {exc}")


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Verbal uncertainty toolkit."""


@main.group()
def lexicon() -> None:
    """Build and inspect label lexicons."""


@lexicon.command("default")
@click.option("-k", "--labels", "k", default=5, show_default=True, help="number of labels")
@click.option("--owner", default="default", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def lexicon_default(k: int, owner: str, output: Optional[str]) -> None:
    """Equidistant default lexicon as JSON."""
    try:
        lex = default_lexicon(k, owner)
    except ValueError as exc:
        _fail("validation", str(exc))
    _emit(lex.to_dict(), output)


@main.command()
@click.option("--labels", "label_spec", required=True, help="comma-separated label names")
@click.option(
    "--truth",
    "truth_file",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="JSON map of label name to trapezoid; defines the simulated subject",
)
@click.option("--owner", default="subject", show_default=True)
@click.option("--trials", default=400, show_default=True)
@click.option("--step-c", default=0.2, show_default=True)
@click.option("--pilot-reps", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def elicit(
    label_spec: str,
    truth_file: str,
    owner: str,
    trials: int,
    step_c: float,
    pilot_reps: int,
    seed: int,
    output: Optional[str],
) -> None:
    """Calibrate a lexicon from a simulated subject.

    Live subjects answer through the service's elicitation sessions instead.
    """
    names = [part.strip() for part in label_spec.split(",") if part.strip()]
    raw = _load_json(truth_file)
    try:
        truth = {name: UnitFuzzyNumber.from_dict(value) for name, value in raw.items()}
    except (ValueError, KeyError, TypeError) as exc:
        _fail("validation", f"bad truth file: {exc}")
    missing = [name for name in names if name not in truth]
    if missing:
        _fail("validation", f"labels missing from truth file: {missing}")
    responder = SimulatedResponder(truth, rng_seed=seed)
    try:
        lex = elicit_lexicon(
            responder, names, owner=owner, trials=trials, step_c=step_c, pilot_reps=pilot_reps
        )
    except (ValueError, CalibrationFailedError, InconsistentResponderError) as exc:
        _fail("validation", str(exc))
    _emit(lex.to_dict(), output)


@main.group()
def rasch() -> None:
    """Rasch-model fitting and calibration curves."""


@rasch.command("fit")
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def rasch_fit(matrix: str, output: Optional[str]) -> None:
    """Fit difficulties and abilities from a response-matrix CSV."""
    try:
        data = read_response_matrix_csv(matrix)
        result = fit(data)
    except (UnfittableMatrixError, ValueError) as exc:
        _fail("validation", str(exc))
    _emit(
        {
            "converged": result.converged,
            "iterations": result.iterations,
            "difficulties": {
                item: _jsonable(delta)
                for item, delta in zip(result.item_ids, result.difficulties)
            },
            "abilities": {
                subject: _jsonable(xi)
                for subject, xi in zip(result.subject_ids, result.abilities)
            },
            "dropped_subjects": list(result.dropped_subjects),
            "dropped_items": list(result.dropped_items),
        },
        output,
    )


@rasch.command("curve")
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False))
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--lexicon",
    "lexicon_file",
    type=click.Path(exists=True, dir_okay=False),
    help="lexicon JSON; defaults to the equidistant lexicon",
)
@click.option("--default-k", default=5, show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def rasch_curve(
    matrix: str, records: str, lexicon_file: Optional[str], default_k: int, output: str
) -> None:
    """Per-label mean success probability (calibration curve CSV)."""
    try:
        data = read_response_matrix_csv(matrix)
        recs = read_records_csv(records)
        lex = (
            Lexicon.from_dict(_load_json(lexicon_file))
            if lexicon_file
            else default_lexicon(default_k)
        )
        result = fit(data)
        curve = difficulty_by_label(result, recs, lex)
        gaps = calibration_gap(curve)
    except (UnfittableMatrixError, LexiconError, ValueError, KeyError) as exc:
        _fail("validation", str(exc))
    write_curve_csv(curve, output)
    _emit(
        {
            "rows": len(curve.rows),
            "skipped": curve.skipped,
            "max_abs_gap": gaps.max_abs_gap,
            "monotone": gaps.monotone,
        },
        None,
    )


@main.group()
def bayes() -> None:
    """Probability-revision benchmark."""


def _parse_kind(token: str):
    if token == "bayesian":
        return Bayesian()
    if token.startswith("conservative:"):
        return Conservative(float(token.split(":", 1)[1]))
    if token.startswith("verbal:"):
        spec = token.split(":", 1)[1]
        if spec.startswith("@"):
            return Verbal(Lexicon.from_dict(_load_json(spec[1:])))
        if spec.startswith("k") and spec[1:].isdigit():
            return Verbal(default_lexicon(int(spec[1:]), owner=spec))
        raise ValueError(f"verbal kind needs 'kN' or '@file', got {spec!r}")
    raise ValueError(f"unknown responder kind {token!r}")


@bayes.command("run")
@click.option("--ratio", default=0.7, show_default=True, help="bin success ratio")
@click.option("--draws", default=20, show_default=True)
@click.option("--prior", default=0.5, show_default=True)
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option(
    "--kinds",
    default="bayesian,conservative:0.5,verbal:k5",
    show_default=True,
    help="comma-separated: bayesian | conservative:KAPPA | verbal:kN | verbal:@lexicon.json",
)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def bayes_run(
    ratio: float, draws: int, prior: float, trials: int, seed: int, kinds: str, output: str
) -> None:
    """Run the benchmark and write the per-step deviation CSV."""
    try:
        config = BenchConfig(
            success_ratio=ratio, draws=draws, prior=prior, trials=trials, seed=seed
        )
        kind_list = [_parse_kind(token.strip()) for token in kinds.split(",") if token.strip()]
        result = run_benchmark(config, kind_list)
    except (ValueError, LexiconError) as exc:
        _fail("validation", str(exc))
    write_benchmark_csv(result, output)
    summary = {}
    for kind in result.kinds():
        values = result.curve(kind)
        summary[kind] = sum(values) / len(values)
    _emit({"config": config.to_dict(), "mean_abs_deviation": summary}, None)


@main.group()
def argue() -> None:
    """Evaluate argument files."""


def _parse_resolution(spec: str, graph, qlex) -> tuple[str, UnitFuzzyNumber]:
    if "=" not in spec:
        raise ValueError(f"--resolve needs WARRANT=INDEX or WARRANT=a,b,c,d, got {spec!r}")
    ref, value = spec.split("=", 1)
    warrant = next((w for w in graph.warrants if w.ref == ref), None)
    if warrant is None:
        raise ValueError(f"--resolve references unknown warrant {ref!r}")
    if "," in value:
        corners = [float(part) for part in value.split(",")]
        if len(corners) != 4:
            raise ValueError(f"custom trapezoid needs 4 corners, got {len(corners)}")
        return ref, UnitFuzzyNumber(*corners)
    if isinstance(warrant.quantifier, UnitFuzzyNumber):
        raise ValueError(f"warrant {ref!r} already has an explicit quantifier")
    looked = lookup_quantifier(warrant.quantifier, qlex)
    if not isinstance(looked, Ambiguous):
        raise ValueError(f"warrant {ref!r} is not ambiguous")
    return ref, resolve_ambiguity(looked, int(value)).meaning


@argue.command("eval")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--quantifiers", "quantifier_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicon_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--default-k", default=5, show_default=True)
@click.option("--aggregation", default="max", show_default=True)
@click.option("--rebuttal-style", default="complement", show_default=True)
@click.option(
    "--resolve",
    "resolves",
    multiple=True,
    help="WARRANT=SENSE_INDEX or WARRANT=a,b,c,d; repeatable",
)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def argue_eval(
    file: str,
    quantifier_file: Optional[str],
    lexicon_file: Optional[str],
    default_k: int,
    aggregation: str,
    rebuttal_style: str,
    resolves: tuple[str, ...],
    output: Optional[str],
) -> None:
    """Evaluate an argument file; pending ambiguities exit with code 3."""
    try:
        graph = graph_from_dict(_load_json(file))
        qlex = (
            QuantifierLexicon.from_dict(_load_json(quantifier_file))
            if quantifier_file
            else default_quantifier_lexicon()
        )
        out_lexicon = (
            Lexicon.from_dict(_load_json(lexicon_file))
            if lexicon_file
            else default_lexicon(default_k)
        )
        config = EvalConfig(aggregation=aggregation, rebuttal_style=rebuttal_style)
        resolutions = dict(_parse_resolution(spec, graph, qlex) for spec in resolves)
        outcome = evaluate(graph, qlex, out_lexicon, config=config, resolutions=resolutions)
    except UnknownQuantifierError as exc:
        _fail("unknown-quantifier", str(exc.args[0]))
    except (GraphStructureError, LexiconError, ValueError, KeyError, IndexError) as exc:
        _fail("validation", str(exc))
    if isinstance(outcome, PendingAmbiguities):
        _fail(
            "pending-ambiguity",
            [
                {
                    "warrant": item.warrant_ref,
                    "term": item.ambiguous.term,
                    "senses": [
                        {"description": s.description, "meaning": s.meaning.to_dict()}
                        for s in item.ambiguous.senses
                    ],
                }
                for item in outcome.items
            ],
            EXIT_PENDING,
        )
    _emit(evaluation_to_dict(outcome), output)


@main.group()
def plot() -> None:
    """Emit SVG charts (or CSV) from data files."""


@plot.command("lexicon")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--csv", "as_csv", is_flag=True, help="emit corner CSV instead of SVG")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def plot_lexicon(file: str, as_csv: bool, output: str) -> None:
    """Possibility functions of a lexicon file."""
    try:
        lex = Lexicon.from_dict(_load_json(file))
    except (LexiconError, KeyError, ValueError, TypeError) as exc:
        _fail("validation", str(exc))
    _write_text(lexicon_csv(lex) if as_csv else lexicon_svg(lex), output)


def _read_csv_rows(path: str) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            return list(csv.DictReader(handle))
    except OSError as exc:
        _fail("validation", f"cannot read {path}: {exc}")


@plot.command("curve")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def plot_curve(file: str, output: str) -> None:
    """Calibration curve SVG from a curve CSV."""
    rows = _read_csv_rows(file)
    if not rows or "median" not in rows[0] or "mean_probability" not in rows[0]:
        _fail("validation", f"{file} is not a calibration curve CSV")
    _write_text(curve_svg(rows), output)


@plot.command("bench")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def plot_bench(file: str, output: str) -> None:
    """Benchmark deviation curves SVG from a benchmark CSV."""
    rows = _read_csv_rows(file)
    if not rows or "mean_abs_deviation" not in rows[0]:
        _fail("validation", f"{file} is not a benchmark CSV")
    _write_text(bench_svg(rows), output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8351, show_default=True)
@click.option(
    "--data-dir",
    envvar="VERBA_DATA_DIR",
    default=None,
    help="persistence directory (also VERBA_DATA_DIR)",
)
def serve(host: str, port: int, data_dir: Optional[str]) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
