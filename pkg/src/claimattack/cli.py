"""Command-line entry point.

Stages can run as subcommands (``claimattack attack --config c.yaml``) or
through the ``--stage`` flag on the bare command. Exit codes: 0 success,
1 usage error, 2 stage-input error, 3 remote endpoint failure after
retries.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import ConfigError, ExperimentConfig, ScorerConfig, load_config
from .generation import GenerationError
from .pipeline import (
    STAGES,
    Experiment,
    StageInputError,
    bundle_digest,
    run_all,
    run_stage,
    stage_report,
    stage_stats,
    stage_validate_sample,
)
from .scoring import EndpointError


def _common(fn):
    fn = click.option("--dry-run", is_flag=True, help="Describe the stage without writing.")(fn)
    fn = click.option("--stub", "stub_spec", default=None,
                      help="Override scorers: constant:p | keyed:file.json | overlap.")(fn)
    fn = click.option("--out", default=None, help="Output directory (overrides config).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Experiment seed (overrides config).")(fn)
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(exists=True, dir_okay=False), help="Experiment config file.")(fn)
    return fn


def build_experiment(
    config_path: str, seed: int | None, out: str | None, stub_spec: str | None
) -> Experiment:
    cfg = load_config(config_path, seed=seed, out=out)
    if stub_spec:
        conditions = list(cfg.scorers) or ["claim_only", "gold_evidence"]
        cfg.scorers = {c: ScorerConfig(stub=stub_spec) for c in conditions}
    return Experiment(cfg)


def _announce(exp: Experiment, stage: str) -> None:
    click.echo(f"[{exp.experiment_id}] {stage}: out={exp.paths.out}")


def _maybe_dry_run(exp: Experiment, stage: str, dry_run: bool) -> bool:
    if dry_run:
        click.echo(f"dry-run: would run stage '{stage}' with seed={exp.cfg.seed} "
                   f"out={exp.paths.out} config_digest={exp.config_digest}")
    return dry_run


def _stage_command(stage: str, help_text: str):
    @cli.command(name=stage, help=help_text)
    @_common
    def _cmd(config_path, seed, out, stub_spec, dry_run, _stage=stage):
        exp = build_experiment(config_path, seed, out, stub_spec)
        if _maybe_dry_run(exp, _stage, dry_run):
            return
        _announce(exp, _stage)
        run_stage(exp, _stage)

    return _cmd


@click.group(invoke_without_command=True)
@click.option("--stage", "stage_name", default=None,
              help="Run one stage without a subcommand (ingest, attack, ...).")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None)
@click.option("--stub", "stub_spec", default=None)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def cli(ctx, stage_name, config_path, seed, out, stub_spec, dry_run):
    """Adversarial robustness harness for claim verification."""
    if ctx.invoked_subcommand is not None:
        return
    if stage_name is None:
        click.echo(ctx.get_help())
        return
    if config_path is None:
        raise click.UsageError("--stage requires --config")
    valid = (*STAGES, "validate-sample", "all")
    if stage_name not in valid:
        raise click.UsageError(f"unknown stage {stage_name!r}; choose from {', '.join(valid)}")
    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, stage_name, dry_run):
        return
    _announce(exp, stage_name)
    if stage_name == "all":
        run_all(exp)
        click.echo(f"report digest: {bundle_digest(exp.paths.reports)}")
    else:
        run_stage(exp, stage_name)


for _stage, _help in (
    ("ingest", "Normalize source datasets into the claim store."),
    ("index", "Build the BM25 page index."),
    ("attack", "Generate lexical and persuasion variants of test claims."),
    ("paraphrase", "Generate paraphrase variants of test claims."),
    ("score", "Score originals and variants under each condition."),
    ("select", "Run worst-case (oracle) variant selection."),
    ("retrieve", "Run retrieval for originals and variants."),
    ("evaluate", "Compute metric tables from the stores."),
):
    _stage_command(_stage, _help)


@cli.command(help="Report per-split label counts and averages.")
@_common
def stats(config_path, seed, out, stub_spec, dry_run):
    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, "stats", dry_run):
        return
    text = stage_stats(exp)
    click.echo(text, nl=False)


@cli.command(help="Render report CSVs and the summary.")
@click.option("--plots", is_flag=True, help="Also render static plot images (needs matplotlib).")
@_common
def report(config_path, seed, out, stub_spec, dry_run, plots):
    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, "report", dry_run):
        return
    _announce(exp, "report")
    reports_dir = stage_report(exp, plots=plots)
    click.echo(f"report digest: {bundle_digest(reports_dir)}")


@cli.command(name="validate-sample", help="Draw the stratified label-invariance sample.")
@_common
def validate_sample(config_path, seed, out, stub_spec, dry_run):
    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, "validate-sample", dry_run):
        return
    _announce(exp, "validate-sample")
    n, shortfalls = stage_validate_sample(exp)
    click.echo(f"sampled {n} validation items -> {exp.paths.validation_items}")
    for message in shortfalls:
        click.echo(f"shortfall: {message}", err=True)


@cli.command(name="all", help="Run every stage in order.")
@click.option("--plots", is_flag=True)
@_common
def run_all_cmd(config_path, seed, out, stub_spec, dry_run, plots):
    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, "all", dry_run):
        return
    _announce(exp, "all")
    run_all(exp, plots=plots)
    click.echo(f"report digest: {bundle_digest(exp.paths.reports)}")


@cli.command(name="annotate-serve", help="Serve the blind annotation API (and UI when built).")
@click.option("--port", type=int, default=8710)
@click.option("--host", default="127.0.0.1")
@click.option("--static-dir", default=None, type=click.Path(),
              help="Directory with the built annotation UI.")
@click.option("--export", "export_only", is_flag=True,
              help="Write per-technique stats and the inclusion partition, then exit.")
@_common
def annotate_serve(config_path, seed, out, stub_spec, dry_run, port, host, static_dir, export_only):
    from .annotation import (
        VerdictAnnotation,
        aggregate_rates,
        apply_exclusion,
        create_app,
        load_validation_items,
        stats_csv,
    )
    from .stores import read_jsonl

    exp = build_experiment(config_path, seed, out, stub_spec)
    if _maybe_dry_run(exp, "annotate-serve", dry_run):
        return
    items_path = exp.require(exp.paths.validation_items, "validate-sample")
    annotations_path = exp.paths.validation_annotations

    if export_only:
        items = load_validation_items(items_path)
        annotations = []
        if annotations_path.exists():
            for rec in read_jsonl(annotations_path):
                if rec.get("frozen"):
                    continue
                annotations.append(
                    VerdictAnnotation(
                        item_id=int(rec["item_id"]),
                        verdict=rec["verdict"],
                        annotator_id=rec.get("annotator_id", "default"),
                        timestamp=float(rec.get("timestamp", 0.0)),
                    )
                )
        stats_rows = aggregate_rates(annotations, items)
        exp.paths.validation_stats.parent.mkdir(parents=True, exist_ok=True)
        exp.paths.validation_stats.write_text(stats_csv(stats_rows), encoding="utf-8")
        partition = apply_exclusion(stats_rows)
        status_path = exp.paths.validation_stats.parent / "status.json"
        import json as _json

        status_path.write_text(
            _json.dumps(partition, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        click.echo(f"wrote {exp.paths.validation_stats} and {status_path}")
        return

    import uvicorn

    default_static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    static = static_dir or (str(default_static) if default_static.is_dir() else None)
    app = create_app(items_path, annotations_path, static_dir=static)
    click.echo(f"serving annotation API on http://{host}:{port} (items: {items_path})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        return 1
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except (StageInputError,) as exc:
        click.echo(f"stage input error: {exc}", err=True)
        return 2
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 2
    except (EndpointError, GenerationError) as exc:
        click.echo(f"endpoint error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
