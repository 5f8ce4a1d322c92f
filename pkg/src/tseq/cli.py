"""Command-line pipeline: synth, mine, screen, query, postcovid, translate,
plan, verify, bench.

Stages exchange plain files so each is independently testable: raw event
tables as CSV, mined sequences as either a numeric CSV
(patient_num,sequence,duration_days) or a directory of per-patient .tseq
files with a manifest, and label vocabularies as lookup TSVs written next to
the sequences. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import csv
import sys
import time
from pathlib import Path

import click
import numpy as np
import pandas as pd

from .chunking import DEFAULT_CHUNK_LIMIT, iter_chunks, plan_for_dbmart
from .encoding import DurationUnit, decode_sequence, encode_sequence
from .errors import MissingColumn, TseqError
from .ingestion import (
    LookupTables,
    first_occurrence_filter,
    parse_dbmart,
    translate_sequences,
    write_dbmart_csv,
)
from .mining import (
    ManifestEntry,
    MinerConfig,
    mine_all,
    mine_to_files,
    read_mined_dir,
    sort_dbmart,
    write_manifest,
)
from .model import Dbmart, SequenceArray
from .naive import naive_mine
from .postcovid import PostCovidConfig, run_postcovid
from .query import (
    filter_by_end,
    filter_by_min_duration,
    filter_by_start,
    transitive_end_sequences,
)
from .screening import SparsityConfig, sparsity_screen
from .synth import SynthConfig, generate

SEQUENCE_COLUMNS = ("patient_num", "sequence", "duration_days")


def _parse_threads(value: str) -> int | str:
    if value == "auto":
        return "auto"
    try:
        threads = int(value)
    except ValueError:
        raise click.BadParameter("threads must be a positive integer or 'auto'")
    if threads < 1:
        raise click.BadParameter("threads must be >= 1")
    return threads


def _note(ctx: click.Context, message: str) -> None:
    if ctx.obj.get("verbose"):
        click.echo(message, err=True)


def _read_sequences(path: str | Path) -> SequenceArray:
    """Sequences from either a numeric CSV or a file-based mining directory."""
    path = Path(path)
    if path.is_dir():
        return read_mined_dir(path)
    frame = pd.read_csv(path)
    for column in SEQUENCE_COLUMNS:
        if column not in frame.columns:
            raise MissingColumn(column)
    return SequenceArray(
        frame["patient_num"].to_numpy(np.uint32),
        frame["sequence"].to_numpy(np.uint64),
        frame["duration_days"].to_numpy(np.uint32),
    )


def _write_sequences_csv(path: str | Path, seqs: SequenceArray) -> None:
    frame = pd.DataFrame(
        {
            "patient_num": seqs.patient,
            "sequence": seqs.seq,
            "duration_days": seqs.duration,
        }
    )
    frame.to_csv(path, index=False)


def _lookup_dir(input_path: str | Path, override: str | None) -> Path:
    if override is not None:
        return Path(override)
    path = Path(input_path)
    return path if path.is_dir() else path.parent


def _canonical_mode(mode: str) -> str:
    aliases = {
        "memory": "in_memory",
        "in_memory": "in_memory",
        "files": "file_based",
        "file_based": "file_based",
    }
    try:
        return aliases[mode]
    except KeyError:
        raise click.BadParameter(f"unknown mode {mode!r}") from None


@click.group(name="tseq")
@click.option(
    "--threads",
    default="auto",
    show_default=True,
    envvar="TSEQ_THREADS",
    help="Worker count for mining; output does not depend on it.",
)
@click.option("-v", "--verbose", is_flag=True, help="Progress notes on stderr.")
@click.pass_context
def cli(ctx: click.Context, threads: str, verbose: bool) -> None:
    """Transitive temporal sequence mining over clinical event tables."""
    ctx.ensure_object(dict)
    ctx.obj["threads"] = _parse_threads(threads)
    ctx.obj["verbose"] = verbose


@cli.command()
@click.option("--patients", type=int, default=100, show_default=True)
@click.option("--avg-entries", type=int, default=50, show_default=True)
@click.option("--distinct-phenx", type=int, default=200, show_default=True)
@click.option("--date-span-days", type=int, default=730, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--output", "output_path", required=True, type=click.Path(dir_okay=False)
)
@click.pass_context
def synth(
    ctx: click.Context,
    patients: int,
    avg_entries: int,
    distinct_phenx: int,
    date_span_days: int,
    seed: int,
    output_path: str,
) -> None:
    """Write a reproducible synthetic event table CSV."""
    try:
        config = SynthConfig(patients, avg_entries, distinct_phenx, date_span_days, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    entries, lookups = generate(config)
    write_dbmart_csv(Dbmart.from_entries(entries), lookups, output_path)
    _note(ctx, f"wrote {len(entries)} entries to {output_path}")


def _load_dbmart(input_path: str, first_occurrence_only: bool):
    dbmart, lookups = parse_dbmart(input_path)
    if first_occurrence_only:
        dbmart = first_occurrence_filter(dbmart)
    return sort_dbmart(dbmart), lookups


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option("--mode", default="memory", show_default=True)
@click.option("--output", "output_path", type=click.Path(dir_okay=False))
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.option("--first-occurrence-only", is_flag=True)
@click.option("--include-same-date-pairs/--no-same-date-pairs", default=True)
@click.option(
    "--max-chunk-sequences", type=int, default=DEFAULT_CHUNK_LIMIT, show_default=True
)
@click.option("--plan-only", is_flag=True, help="Print the chunk plan TSV and stop.")
@click.pass_context
def mine(
    ctx: click.Context,
    input_path: str,
    mode: str,
    output_path: str | None,
    output_dir: str | None,
    first_occurrence_only: bool,
    include_same_date_pairs: bool,
    max_chunk_sequences: int,
    plan_only: bool,
) -> None:
    """Mine all transitive sequences from a raw event table."""
    mode = _canonical_mode(mode)
    dbmart, lookups = _load_dbmart(input_path, first_occurrence_only)
    plan = plan_for_dbmart(dbmart, max_chunk_sequences)
    if plan_only:
        click.echo(plan.to_tsv(), nl=False)
        return
    _note(ctx, f"{len(dbmart)} entries, {len(plan)} chunk(s)")

    started = time.perf_counter()
    if mode == "in_memory":
        if output_path is None:
            raise click.UsageError("in-memory mode requires --output")
        config = MinerConfig(
            workers=ctx.obj["threads"],
            include_same_date_pairs=include_same_date_pairs,
        )
        mined = SequenceArray.concat(
            [mine_all(chunk, config) for chunk in iter_chunks(dbmart, plan)]
        )
        _write_sequences_csv(output_path, mined)
        lookups.save(Path(output_path).parent)
        count = len(mined)
    else:
        if output_dir is None:
            raise click.UsageError("file-based mode requires --output-dir")
        # an empty table has zero chunks, so nothing below would create it
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        manifest: list[ManifestEntry] = []
        for chunk in iter_chunks(dbmart, plan):
            config = MinerConfig(
                mode="file_based",
                workers=ctx.obj["threads"],
                output_dir=output_dir,
                include_same_date_pairs=include_same_date_pairs,
            )
            manifest.extend(mine_to_files(chunk, config))
        write_manifest(Path(output_dir) / "manifest.tsv", manifest)
        lookups.save(output_dir)
        count = sum(entry.count for entry in manifest)
    elapsed = (time.perf_counter() - started) * 1000
    _note(ctx, f"mined {count} sequences in {elapsed:.0f} ms")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option(
    "--output", "output_path", required=True, type=click.Path(dir_okay=False)
)
@click.option("--sparsity-threshold", type=int, default=2, show_default=True)
@click.option(
    "--sparsity-mode",
    type=click.Choice(["occurrences", "distinct_patients"]),
    default="occurrences",
    show_default=True,
)
@click.option("--duration-sparsity", is_flag=True)
@click.option("--bucket-unit", default="months", show_default=True)
@click.option("--bucket-bits", type=int, default=8, show_default=True)
@click.pass_context
def screen(
    ctx: click.Context,
    input_path: str,
    output_path: str,
    sparsity_threshold: int,
    sparsity_mode: str,
    duration_sparsity: bool,
    bucket_unit: str,
    bucket_bits: int,
) -> None:
    """Drop sparse sequences from mined output."""
    try:
        config = SparsityConfig(
            threshold=sparsity_threshold,
            count_mode=sparsity_mode,
            duration_aware=duration_sparsity,
            bucket_unit=DurationUnit.from_name(bucket_unit),
            bucket_bits=bucket_bits,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    seqs = _read_sequences(input_path)
    kept = sparsity_screen(seqs, config)
    _write_sequences_csv(output_path, kept)
    _note(ctx, f"kept {len(kept)} of {len(seqs)} records")


def _labels_to_ids(lookups: LookupTables, label: str | None) -> int | None:
    return None if label is None else lookups.phenx_id(label)


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--lookup-dir", type=click.Path(exists=True, file_okay=False))
@click.option(
    "--output", "output_path", required=True, type=click.Path(dir_okay=False)
)
@click.option("--starts-with", help="Original phenX label.")
@click.option("--ends-with", help="Original phenX label.")
@click.option("--min-duration-days", type=int)
@click.option("--transitive-from", help="Original phenX label.")
@click.pass_context
def query(
    ctx: click.Context,
    input_path: str,
    lookup_dir: str | None,
    output_path: str,
    starts_with: str | None,
    ends_with: str | None,
    min_duration_days: int | None,
    transitive_from: str | None,
) -> None:
    """Filter sequences and write them with human-readable labels."""
    lookups = LookupTables.load(_lookup_dir(input_path, lookup_dir))
    seqs = _read_sequences(input_path)
    if transitive_from is not None:
        seqs = transitive_end_sequences(seqs, lookups.phenx_id(transitive_from))
    start = _labels_to_ids(lookups, starts_with)
    if start is not None:
        seqs = filter_by_start(seqs, start)
    end = _labels_to_ids(lookups, ends_with)
    if end is not None:
        seqs = filter_by_end(seqs, end)
    if min_duration_days is not None:
        seqs = filter_by_min_duration(seqs, min_duration_days)
    translate_sequences(seqs, lookups).to_csv(output_path, index=False)
    _note(ctx, f"wrote {len(seqs)} records")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--lookup-dir", type=click.Path(exists=True, file_okay=False))
@click.option(
    "--output", "output_path", required=True, type=click.Path(dir_okay=False)
)
@click.pass_context
def translate(
    ctx: click.Context, input_path: str, lookup_dir: str | None, output_path: str
) -> None:
    """Rewrite numeric sequences with their original labels."""
    lookups = LookupTables.load(_lookup_dir(input_path, lookup_dir))
    seqs = _read_sequences(input_path)
    translate_sequences(seqs, lookups).to_csv(output_path, index=False)
    _note(ctx, f"wrote {len(seqs)} records")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--lookup-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--covid-code", required=True, help="Original phenX label.")
@click.option("--min-months", type=int, default=2, show_default=True)
@click.option("--corr-threshold", type=float, default=0.7, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option(
    "--output-dir", required=True, type=click.Path(file_okay=False)
)
@click.pass_context
def postcovid(
    ctx: click.Context,
    input_path: str,
    lookup_dir: str | None,
    covid_code: str,
    min_months: int,
    corr_threshold: float,
    alpha: float,
    output_dir: str,
) -> None:
    """Identify persistent post-covid symptoms; write confirmed/excluded CSVs."""
    lookups = LookupTables.load(_lookup_dir(input_path, lookup_dir))
    seqs = _read_sequences(input_path)
    try:
        config = PostCovidConfig(
            covid_phenx=lookups.phenx_id(covid_code),
            min_persistence_months=min_months,
            correlation_threshold=corr_threshold,
            significance_alpha=alpha,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    report = run_postcovid(seqs, config)

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(
        {
            "patient_num": [lookups.patient_label(c.patient) for c in report.confirmed],
            "symptom": [lookups.phenx_label(c.symptom) for c in report.confirmed],
            "observations": [c.observation_count for c in report.confirmed],
            "bucket_span": [c.bucket_span for c in report.confirmed],
        }
    ).to_csv(out / "confirmed.csv", index=False)
    excluded_rows: dict[str, list] = {
        "patient_num": [],
        "symptom": [],
        "excluding_start": [],
        "excluding_end": [],
        "correlation": [],
        "p_value": [],
    }
    for e in report.excluded:
        alt_start, alt_end = decode_sequence(e.excluding_sequence)
        excluded_rows["patient_num"].append(lookups.patient_label(e.patient))
        excluded_rows["symptom"].append(lookups.phenx_label(e.symptom))
        excluded_rows["excluding_start"].append(lookups.phenx_label(alt_start))
        excluded_rows["excluding_end"].append(lookups.phenx_label(alt_end))
        excluded_rows["correlation"].append(e.correlation)
        excluded_rows["p_value"].append(e.p_value)
    pd.DataFrame(excluded_rows).to_csv(out / "excluded.csv", index=False)
    _note(
        ctx,
        f"{len(report.confirmed)} confirmed, {len(report.excluded)} excluded",
    )


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option(
    "--max-chunk-sequences", type=int, default=DEFAULT_CHUNK_LIMIT, show_default=True
)
def plan(input_path: str, max_chunk_sequences: int) -> None:
    """Print the chunk plan for an event table as TSV."""
    dbmart, _ = parse_dbmart(input_path)
    click.echo(plan_for_dbmart(sort_dbmart(dbmart), max_chunk_sequences).to_tsv(), nl=False)


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
)
@click.option(
    "--mined",
    "mined_path",
    type=click.Path(exists=True),
    help="Previously mined output (CSV or directory); default mines in-process.",
)
@click.pass_context
def verify(ctx: click.Context, input_path: str, mined_path: str | None) -> None:
    """Check engine output against the naive baseline; exit 2 on mismatch."""
    with open(input_path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        idx = {name: header.index(name) for name in ("patient_num", "start_date", "phenx")}
        rows = [
            (row[idx["patient_num"]], row[idx["start_date"]], row[idx["phenx"]])
            for row in reader
        ]
    dbmart, lookups = parse_dbmart(input_path)
    if mined_path is None:
        mined = mine_all(sort_dbmart(dbmart), MinerConfig(workers=ctx.obj["threads"]))
    else:
        mined = _read_sequences(mined_path)

    oracle_rows = naive_mine(rows)
    exp_patient = np.fromiter(
        (lookups.patient_id(r[0]) for r in oracle_rows), np.uint32, len(oracle_rows)
    )
    exp_seq = np.fromiter(
        (
            encode_sequence(lookups.phenx_id(r[1]), lookups.phenx_id(r[2]))
            for r in oracle_rows
        ),
        np.uint64,
        len(oracle_rows),
    )
    exp_dur = np.fromiter((r[3] for r in oracle_rows), np.uint32, len(oracle_rows))
    expected = SequenceArray(exp_patient, exp_seq, exp_dur).canonical_sort()
    actual = mined.canonical_sort()
    if expected.tobytes() == actual.tobytes():
        click.echo(f"equal: {len(actual)} records match the baseline")
        return
    raise TseqError(
        f"mismatch: engine produced {len(actual)} records, baseline {len(expected)}"
    )


@cli.command()
@click.option("--patients", type=int, default=1000, show_default=True)
@click.option("--avg-entries", type=int, default=400, show_default=True)
@click.option("--distinct-phenx", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--sparsity-threshold", type=int, default=2, show_default=True)
@click.pass_context
def bench(
    ctx: click.Context,
    patients: int,
    avg_entries: int,
    distinct_phenx: int,
    seed: int,
    sparsity_threshold: int,
) -> None:
    """Synth + mine + screen timing; one TSV line per stage on stdout."""
    started = time.perf_counter()
    entries, _ = generate(SynthConfig(patients, avg_entries, distinct_phenx, seed=seed))
    dbmart = sort_dbmart(Dbmart.from_entries(entries))
    synth_ms = (time.perf_counter() - started) * 1000
    click.echo(f"synth\t{synth_ms:.0f}\t{len(dbmart)}")

    started = time.perf_counter()
    mined = mine_all(dbmart, MinerConfig(workers=ctx.obj["threads"]))
    mine_ms = (time.perf_counter() - started) * 1000
    click.echo(f"mine\t{mine_ms:.0f}\t{len(mined)}")

    started = time.perf_counter()
    kept = sparsity_screen(mined, SparsityConfig(threshold=sparsity_threshold))
    screen_ms = (time.perf_counter() - started) * 1000
    click.echo(f"screen\t{screen_ms:.0f}\t{len(kept)}")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except TseqError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
