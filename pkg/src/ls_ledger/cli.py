"""Command-line front end: ingestion, metric computation, CSV export.

Every output is UTF-8 CSV with comma separators. Each file starts with
``#``-prefixed comment lines recording the command and the configuration
knobs that influenced it (seed included), followed by one header row.
Given the same input and configuration, reruns produce byte-identical
output directories.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import graph_metrics, interplay, ledger_ingest, snapshot, stream_core, temporal_metrics
from .errors import LedgerError

DEFAULT_BIN = 86_400  # one day
DEFAULT_WINDOW = 2_592_000  # 30 days
DEFAULT_SAMPLES = 100


@dataclass(frozen=True)
class RunConfig:
    out_dir: Path
    input_path: Path | None = None
    remuniter: str | None = None
    window: int = DEFAULT_WINDOW
    bin_width: int = DEFAULT_BIN
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    strict: bool = False
    ordered_pairs: bool = False

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin width must be positive")
        if self.window < self.bin_width:
            raise ValueError("window must be at least the bin width")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def _fmt(x, places: int = 4) -> str:
    """Fractions with a fixed number of decimals; None becomes NA."""
    if x is None:
        return "NA"
    if isinstance(x, float):
        return f"{x:.{places}f}"
    return str(x)


def _write_csv(path: Path, comments: list[str], header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def _comments(command: str, cfg: RunConfig, *extra: str) -> list[str]:
    parts = [f"ls-ledger {command}"]
    knobs = (
        f"bin={cfg.bin_width} window={cfg.window} samples={cfg.samples} "
        f"seed={cfg.seed} pair_convention="
        f"{'ordered' if cfg.ordered_pairs else 'unordered'}"
    )
    return [*parts, knobs, *extra]


def _load(cfg: RunConfig) -> snapshot.StreamBundle:
    return snapshot.load_bundle(cfg.out_dir)


# ---------------------------------------------------------------- commands


def cmd_ingest(cfg: RunConfig) -> None:
    """Parse the ledger, build streams and substreams, persist the snapshot,
    and export the substream repartitions."""
    with open(cfg.input_path, "r", encoding="utf-8") as fh:
        records = ledger_ingest.parse_records(fh, strict=cfg.strict)
    for line_no, message in records.issues:
        click.echo(f"warning: skipped line {line_no}: {message}", err=True)

    cls = ledger_ingest.classify_keys(records.identities, records.transactions)
    cert, tx = ledger_ingest.build_streams(records, cls)
    bundle = snapshot.build_bundle(cls.table, cls, cert, tx)
    snapshot.save_bundle(cfg.out_dir, bundle)

    report = ledger_ingest.repartition(tx, cls)
    _write_csv(
        cfg.out_dir / "repartition.csv",
        _comments("ingest", cfg, f"input={cfg.input_path}"),
        "substream,count,count_share,amount,amount_share",
        (
            (label, row.count, _fmt(row.count_share), row.amount, _fmt(row.amount_share))
            for label, row in report.rows.items()
        ),
    )

    if cfg.remuniter:
        filtered = ledger_ingest.filter_wallet(tx, cls.table.id_of(cfg.remuniter))
        filtered_report = ledger_ingest.repartition(filtered, cls)
        _write_csv(
            cfg.out_dir / "repartition_filtered.csv",
            _comments("ingest", cfg, f"input={cfg.input_path}", "remuniter removed"),
            "substream,count,count_share,amount,amount_share",
            (
                (label, row.count, _fmt(row.count_share), row.amount, _fmt(row.amount_share))
                for label, row in filtered_report.rows.items()
            ),
        )
        miners = ledger_ingest.identify_miners(tx, cls, cfg.remuniter)
        click.echo(f"miners:{len(miners)}")

    click.echo(
        f"identities:{len(records.identities)} "
        f"certs:{len(records.certifications)} txs:{len(records.transactions)}"
    )


def cmd_overview(cfg: RunConfig) -> None:
    """Activity series and rolling sums of the certification and member
    transaction streams, their correlation, and degree reports."""
    bundle = _load(cfg)
    cert, tx_mm = bundle.cert, bundle.tx_mm

    # bin both streams over the common enclosing interval so the series
    # share one grid; empty streams contribute no span of their own
    spans = [s.interval for s in (cert, tx_mm) if s.links] or [cert.interval]
    common = (min(t0 for t0, _ in spans), max(t1 for _, t1 in spans))
    series = {}
    for name, stream in (("cert", cert), ("txmm", tx_mm)):
        widened = stream_core.LinkStream(
            interval=common, nodes=stream.nodes, links=stream.links
        )
        binned = stream_core.activity_series(widened, cfg.bin_width)
        series[name] = (binned, stream_core.rolling_sum(binned, cfg.window))

    starts = series["cert"][0].bin_starts()
    _write_csv(
        cfg.out_dir / "activity.csv",
        _comments("overview", cfg),
        "bin_start,cert,txmm,cert_rolling,txmm_rolling",
        (
            (
                t,
                series["cert"][0].values[i],
                series["txmm"][0].values[i],
                series["cert"][1].values[i],
                series["txmm"][1].values[i],
            )
            for i, t in enumerate(starts)
        ),
    )

    degree_reports = {}
    for name, stream in (("cert", cert), ("txmm", tx_mm)):
        report = graph_metrics.degree_report(stream_core.induced_graph(stream))
        degree_reports[name] = report
        fname = "degrees.csv" if name == "cert" else f"degrees_{name}.csv"
        _write_csv(
            cfg.out_dir / fname,
            _comments("overview", cfg, f"stream={name}"),
            "node,in,out",
            (
                (bundle.table.key_of(n), report.in_degree[n], report.out_degree[n])
                for n in sorted(report.in_degree)
            ),
        )

    corr_rows = []
    for label, xs, ys in _degree_pairings(degree_reports["cert"], degree_reports["txmm"]):
        try:
            corr_rows.append((label, _fmt(graph_metrics.degree_correlation(xs, ys).r, 6)))
        except (LedgerError, ValueError):
            corr_rows.append((label, "NA"))
    _write_csv(
        cfg.out_dir / "degree_correlations.csv",
        _comments("overview", cfg),
        "pairing,pearson",
        corr_rows,
    )

    # activity correlation over the rolling sums, on the shared grid
    xs = dict(enumerate(series["cert"][1].values))
    ys = dict(enumerate(series["txmm"][1].values))
    try:
        r = graph_metrics.degree_correlation(xs, ys).r
        click.echo(f"activity_correlation:{r:.6f}")
    except (LedgerError, ValueError):
        click.echo("activity_correlation:NA (undefined)")


def _degree_pairings(cert_rep, txmm_rep):
    common = sorted(set(cert_rep.in_degree) & set(txmm_rep.in_degree))
    yield "cert_in~cert_out", cert_rep.in_degree, cert_rep.out_degree
    yield "txmm_in~txmm_out", txmm_rep.in_degree, txmm_rep.out_degree
    yield (
        "cert_out~txmm_out",
        {n: cert_rep.out_degree[n] for n in common},
        {n: txmm_rep.out_degree[n] for n in common},
    )
    yield (
        "cert_in~txmm_in",
        {n: cert_rep.in_degree[n] for n in common},
        {n: txmm_rep.in_degree[n] for n in common},
    )


def cmd_graph(cfg: RunConfig) -> None:
    """Clustering, triangles with their null-model comparison, and the
    certification distances of transacting-but-uncertified pairs."""
    bundle = _load(cfg)
    graphs = {
        "cert": stream_core.induced_graph(bundle.cert),
        "txmm": stream_core.induced_graph(bundle.tx_mm),
        "txaa": stream_core.induced_graph(bundle.substreams["AA"]),
    }

    for name, g in graphs.items():
        report = graph_metrics.clustering(g)
        fname = "clustering.csv" if name == "cert" else f"clustering_{name}.csv"
        _write_csv(
            cfg.out_dir / fname,
            _comments(
                "graph",
                cfg,
                f"stream={name}",
                f"average={report.average:.6f} (all nodes)",
                f"average_active={report.average_active:.6f} (degree >= 2 only)",
            ),
            "node,coefficient",
            (
                (bundle.table.key_of(n), _fmt(c, 6))
                for n, c in sorted(report.coefficients.items())
            ),
        )
        triangles = graph_metrics.triangle_count(g)
        click.echo(f"triangles_{name}:{triangles}")
        click.echo(f"clustering_{name}:{report.average:.6f}")

        if len(g.undirected_edges()) >= 2 and name != "txaa":
            null = graph_metrics.null_model_triangles(
                g, samples=cfg.samples, seed=cfg.seed
            )
            fname = "null_model.csv" if name == "cert" else f"null_model_{name}.csv"
            _write_csv(
                cfg.out_dir / fname,
                _comments(
                    "graph",
                    cfg,
                    f"stream={name}",
                    f"observed={null.observed} mean={null.mean:.4f} "
                    f"std={null.std:.4f} ratio={null.ratio:.4f}",
                ),
                "sample,triangles",
                enumerate(null.samples),
            )
            click.echo(f"null_ratio_{name}:{null.ratio:.4f}")

    # distances in the undirected certification graph between member pairs
    # that transact without any certification between them
    cert_rel = interplay.relation_sets(bundle.cert)
    tx_rel = interplay.relation_sets(bundle.tx_mm)
    uncertified = sorted(tx_rel.any - cert_rel.any)
    cert_graph = graphs["cert"]
    measurable = [
        p for p in uncertified if p[0] in cert_graph.nodes and p[1] in cert_graph.nodes
    ]
    dist = graph_metrics.distance_distribution(measurable, cert_graph)
    _write_csv(
        cfg.out_dir / "distances.csv",
        _comments(
            "graph",
            cfg,
            f"pairs={len(measurable)} unreachable={dist.unreachable}",
        ),
        "distance,count",
        sorted(dist.counts.items()),
    )


def cmd_closures(cfg: RunConfig) -> None:
    """2- and 3-closure of every link, for the certification stream and the
    member transaction stream."""
    bundle = _load(cfg)
    for name, stream in (("", bundle.cert), ("_txmm", bundle.tx_mm)):
        for k in (2, 3):
            dist = temporal_metrics.closure_distribution(stream, k=k)
            _write_csv(
                cfg.out_dir / f"closures_k{k}{name}.csv",
                _comments(
                    "closures", cfg, f"links={len(dist.results)} infinite={dist.infinite_count}"
                ),
                "t,source,target,lookback",
                (
                    (
                        res.link.t,
                        bundle.table.key_of(res.link.source),
                        bundle.table.key_of(res.link.target),
                        "inf" if res.lookback is None else res.lookback,
                    )
                    for res in dist.results
                ),
            )


def cmd_match(cfg: RunConfig) -> None:
    """Certification/transaction time matching, per-transaction
    certification classes, and first-transaction delays."""
    bundle = _load(cfg)
    cert, tx_mm = bundle.cert, bundle.tx_mm

    report = interplay.match_certifications(cert, tx_mm)
    _write_csv(
        cfg.out_dir / "match_cert.csv",
        _comments(
            "match",
            cfg,
            "fractions: "
            + " ".join(
                f"{cat.value}={report.fractions[cat]:.4f}"
                for cat in interplay.MatchCategory
            ),
            f"both_sided_pairs={report.both_sided}",
        ),
        "pair,anchor,category,delay",
        (
            (
                _pair_label(bundle, o.pair),
                o.anchor,
                o.category.value,
                "NA" if o.delay is None else o.delay,
            )
            for o in report.outcomes
        ),
    )

    tx_classes = interplay.classify_transactions(tx_mm, cert)
    _write_csv(
        cfg.out_dir / "tx_classes.csv",
        _comments(
            "match",
            cfg,
            "fractions: "
            + " ".join(
                f"{cat.value}={tx_classes.fractions[cat]:.4f}"
                for cat in interplay.TxCategory
            ),
        ),
        "t,from,to,category",
        (
            (
                ln.t,
                bundle.table.key_of(ln.source),
                bundle.table.key_of(ln.target),
                cat.value,
            )
            for ln, cat in zip(tx_mm.links, tx_classes.categories)
        ),
    )

    preceding = interplay.preceding_transaction_counts(cert, tx_mm)
    _write_csv(
        cfg.out_dir / "preceding_counts.csv",
        _comments("match", cfg),
        "pair,anchor,preceding_txs",
        (
            (_pair_label(bundle, pair), anchor, count)
            for pair, (anchor, count) in preceding.items()
        ),
    )

    delays = interplay.new_transaction_cert_delays(tx_mm, cert)
    _write_csv(
        cfg.out_dir / "new_tx_delays.csv",
        _comments("match", cfg, f"unmatched_pairs={delays.unmatched}"),
        "pair,first_tx,delay",
        (
            (
                _pair_label(bundle, d.pair),
                d.first_tx,
                "NA" if d.delay is None else d.delay,
            )
            for d in delays.delays
        ),
    )

    for cat in interplay.MatchCategory:
        click.echo(f"match_{cat.value}:{report.fractions[cat]:.4f}")
    for cat in interplay.TxCategory:
        click.echo(f"tx_{cat.value}:{tx_classes.fractions[cat]:.4f}")


def cmd_relations(cfg: RunConfig) -> None:
    """Relation-set ratio table and the certification fraction by
    transaction count."""
    bundle = _load(cfg)
    cert_rel = interplay.relation_sets(bundle.cert)
    tx_rel = interplay.relation_sets(bundle.tx_mm)
    n_members = len(bundle.cls.members)
    table = interplay.relation_ratio_table(
        cert_rel, tx_rel, n_members, ordered_pairs=cfg.ordered_pairs
    )
    _write_csv(
        cfg.out_dir / "ratios.csv",
        _comments("relations", cfg, f"members={n_members}"),
        "cell,numerator,denominator,value",
        (
            (c.label, c.numerator, c.denominator, _fmt(c.value))
            for c in table.cells
        ),
    )

    tau = interplay.pair_transaction_counts(bundle.tx_mm)
    rows = interplay.certification_fraction_by_k(tau, cert_rel)
    _write_csv(
        cfg.out_dir / "fraction_by_k.csv",
        _comments("relations", cfg),
        "k,n_pairs,frac_any,frac_bi",
        ((r.k, r.n_pairs, _fmt(r.frac_any), _fmt(r.frac_bi)) for r in rows),
    )


def cmd_neighborhoods(cfg: RunConfig) -> None:
    """Aggregated neighborhoods per stream and the inclusion of transaction
    neighborhoods within certification neighborhoods."""
    bundle = _load(cfg)
    cert, tx_mm = bundle.cert, bundle.tx_mm

    rows = []
    for name, stream in (("cert", cert), ("txmm", tx_mm)):
        for node in sorted(stream.nodes):
            for nbr in sorted(temporal_metrics.aggregated_neighborhood(stream, node)):
                rows.append(
                    (bundle.table.key_of(node), name, bundle.table.key_of(nbr))
                )
    _write_csv(
        cfg.out_dir / "neighborhoods.csv",
        _comments("neighborhoods", cfg),
        "node,stream,neighbor",
        rows,
    )

    overlap_rows = []
    for node in sorted(cert.nodes | tx_mm.nodes):
        res = temporal_metrics.neighborhood_overlap(node, cert, tx_mm)
        overlap_rows.append(
            (bundle.table.key_of(node), _fmt(res.inclusion), _fmt(res.jaccard))
        )
    _write_csv(
        cfg.out_dir / "overlap.csv",
        _comments("neighborhoods", cfg, "inclusion of txmm neighborhood in cert neighborhood"),
        "node,inclusion,jaccard",
        overlap_rows,
    )


def _pair_label(bundle: snapshot.StreamBundle, pair: tuple[int, int]) -> str:
    return f"{bundle.table.key_of(pair[0])}|{bundle.table.key_of(pair[1])}"


# ------------------------------------------------------------------- click


def _common_options(fn):
    fn = click.option(
        "--out",
        "out_dir",
        envvar="LS_LEDGER_OUT",
        required=True,
        type=click.Path(file_okay=False, path_type=Path),
        help="Output directory (env: LS_LEDGER_OUT).",
    )(fn)
    fn = click.option("--remuniter", default=None, help="Donation wallet key.")(fn)
    fn = click.option("--window", default=DEFAULT_WINDOW, show_default=True, help="Rolling window (s).")(fn)
    fn = click.option("--bin", "bin_width", default=DEFAULT_BIN, show_default=True, help="Bin width (s).")(fn)
    fn = click.option("--samples", default=DEFAULT_SAMPLES, show_default=True, help="Null-model samples.")(fn)
    fn = click.option("--seed", default=0, show_default=True, help="Null-model seed.")(fn)
    fn = click.option("--strict", is_flag=True, help="Abort on the first malformed line.")(fn)
    fn = click.option(
        "--ordered-pairs",
        is_flag=True,
        help="Normalize ratio rows 1-2 by ordered member pairs (default: unordered).",
    )(fn)
    return fn


def _config(out_dir: Path, input_path: Path | None = None, **kw) -> RunConfig:
    try:
        return RunConfig(out_dir=out_dir, input_path=input_path, **kw)
    except ValueError as err:
        raise click.UsageError(str(err))


def _run(command, cfg: RunConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    try:
        command(cfg)
    except (LedgerError, ValueError, KeyError) as err:
        raise click.ClickException(str(err))


@click.group()
def main():
    """Link-stream analytics over certification and transaction ledgers."""


@main.command("ingest")
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Line-delimited ledger records.",
)
@_common_options
def ingest_command(input_path, out_dir, remuniter, window, bin_width, samples, seed, strict, ordered_pairs):
    """Parse records, build all streams, and persist the snapshot."""
    cfg = _config(
        out_dir,
        input_path,
        remuniter=remuniter,
        window=window,
        bin_width=bin_width,
        samples=samples,
        seed=seed,
        strict=strict,
        ordered_pairs=ordered_pairs,
    )
    _run(cmd_ingest, cfg)


def _metric_command(name, fn, help_text):
    @main.command(name, help=help_text)
    @_common_options
    def _command(out_dir, remuniter, window, bin_width, samples, seed, strict, ordered_pairs):
        cfg = _config(
            out_dir,
            remuniter=remuniter,
            window=window,
            bin_width=bin_width,
            samples=samples,
            seed=seed,
            strict=strict,
            ordered_pairs=ordered_pairs,
        )
        _run(fn, cfg)

    _command.__name__ = f"{name}_command"
    return _command


_metric_command("overview", cmd_overview, "Activity series, rolling sums, degrees.")
_metric_command("graph", cmd_graph, "Clustering, triangles, null model, distances.")
_metric_command("closures", cmd_closures, "2- and 3-closure of every link.")
_metric_command("match", cmd_match, "Certification/transaction time matching.")
_metric_command("relations", cmd_relations, "Relation-set ratios and fraction by k.")
_metric_command("neighborhoods", cmd_neighborhoods, "Neighborhoods and overlap.")


if __name__ == "__main__":
    sys.exit(main())
