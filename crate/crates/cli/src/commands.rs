use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use log::{info, warn};

use paremio_core::corpus::{flatten_year_tuples, CorpusKind, PeriodTotals};
use paremio_core::export::write_series;
use paremio_core::matcher::TableKind;
use paremio_core::network::{
    betweenness_parallel, build_cooccurrence_graph, top_central_nodes, write_centrality, write_edges,
};
use paremio_core::timeseries::{bin_counts, ngram_series, rolling_average, BinSpec};
use paremio_core::zipf::{
    export_loglog, fit_power_law, rank_match_table, read_counts, write_fit_report, write_rank_table, RankRange,
    RankTable,
};
use paremio_core::{BinScheme, TemporalKey};

use crate::pipeline::{self, load_lexicon, match_stage, Scan};
use crate::{
    Failure, FlattenArgs, LexiconArgs, MatchArgs, NetworkArgs, NetworkOpts, ReportArgs, SeriesOpts, TimeseriesArgs,
    ZipfArgs, ZipfOpts,
};

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    Ok(BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

pub fn lexicon_check(args: &LexiconArgs) -> Result<(), Failure> {
    let lexicon = load_lexicon(args)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "entries\t{}", lexicon.len())?;
    for cat in [
        paremio_core::Category::Proverb,
        paremio_core::Category::ProverbialExpression,
        paremio_core::Category::Unknown,
    ] {
        let n = lexicon.iter().filter(|e| e.category == cat).count();
        writeln!(out, "category_{}\t{n}", cat.as_str())?;
    }
    writeln!(out, "collisions\t{}", lexicon.collisions().len())?;
    writeln!(out, "max_length\t{}", lexicon.max_len())?;
    writeln!(out, "length\tentries")?;
    for (len, n) in lexicon.length_histogram() {
        writeln!(out, "{len}\t{n}")?;
    }
    Ok(())
}

pub fn run_match(args: &MatchArgs) -> Result<(), Failure> {
    let scan = match_stage(args)?;
    info!(
        "{} documents, {} proverbs matched",
        scan.table.document_count(),
        scan.table.proverbs().count()
    );
    scan.finish()
}

pub fn run_timeseries(args: &TimeseriesArgs) -> Result<(), Failure> {
    let scan = match_stage(&args.scan)?;
    write_series_outputs(&scan, &args.series, &args.scan.out)?;
    scan.finish()
}

pub fn run_zipf(args: &ZipfArgs) -> Result<(), Failure> {
    pipeline::ensure_out(&args.out)?;
    if let Some(counts) = &args.counts {
        if !counts.is_file() {
            return Err(Failure::config(anyhow!(
                "--counts: {} does not exist",
                counts.display()
            )));
        }
        let text = fs::read_to_string(counts).with_context(|| format!("reading {}", counts.display()))?;
        let corpus_id = counts
            .file_stem()
            .map_or("counts".into(), |s| s.to_string_lossy().into_owned());
        let (_, ranks) = read_counts(&text, &corpus_id, args.zipf.ties)?;
        return write_zipf_outputs(&ranks, &args.zipf, &args.out);
    }
    let (Some(lexicon), Some(corpus)) = (&args.lexicon, &args.corpus) else {
        return Err(Failure::config(anyhow!(
            "zipf needs --counts, or both --lexicon and --corpus"
        )));
    };
    let scan_args = MatchArgs {
        lexicon: LexiconArgs {
            lexicon: lexicon.clone(),
            expressions: args.expressions.clone(),
            exclude_expressions: args.exclude_expressions,
            split_hyphens: args.split_hyphens,
        },
        corpus: corpus.clone(),
        out: args.out.clone(),
        workers: args.workers,
        ngram_length: args.ngram_length,
        cache_dir: args.cache_dir.clone(),
    };
    let scan = match_stage(&scan_args)?;
    let ranks = rank_match_table(&scan.table, &scan.lexicon, args.mode, args.zipf.ties)?;
    write_zipf_outputs(&ranks, &args.zipf, &args.out)?;
    scan.finish()
}

pub fn run_network(args: &NetworkArgs) -> Result<(), Failure> {
    let scan = match_stage(&args.scan)?;
    write_network_outputs(
        &scan,
        &args.network,
        pipeline::workers(args.scan.workers),
        &args.scan.out,
    )?;
    scan.finish()
}

pub fn run_report(args: &ReportArgs) -> Result<(), Failure> {
    let scan = match_stage(&args.scan)?;
    let out = &args.scan.out;
    write_series_outputs(&scan, &args.series, out)?;
    let ranks = rank_match_table(&scan.table, &scan.lexicon, args.series.mode, args.zipf.ties)?;
    write_zipf_outputs(&ranks, &args.zipf, out)?;
    if scan.table.kind() == TableKind::Documents {
        write_network_outputs(&scan, &args.network, pipeline::workers(args.scan.workers), out)?;
    } else {
        info!("network skipped: n-gram corpora carry no documents");
    }
    scan.finish()
}

pub fn flatten(args: &FlattenArgs) -> Result<(), Failure> {
    if !args.input.is_file() {
        return Err(Failure::config(anyhow!(
            "--input: {} does not exist",
            args.input.display()
        )));
    }
    let input = std::io::BufReader::new(fs::File::open(&args.input)?);
    let mut output = create(&args.output)?;
    let n = flatten_year_tuples(input, &mut output)?;
    output.flush()?;
    info!("wrote {n} rows to {}", args.output.display());
    Ok(())
}

fn default_bin(kind: CorpusKind) -> BinScheme {
    match kind {
        CorpusKind::Plaintext => BinScheme::Years(20),
        CorpusKind::NewsXml => BinScheme::Month,
        CorpusKind::NgramTsv => BinScheme::Year,
        CorpusKind::DailyFeed => BinScheme::Day,
    }
}

fn parse_key(value: &Option<String>, flag: &str) -> Result<Option<TemporalKey>, Failure> {
    match value {
        None => Ok(None),
        Some(s) => TemporalKey::parse(s)
            .map(Some)
            .ok_or_else(|| Failure::config(anyhow!("--{flag}: `{s}` is not YYYY or YYYY-MM-DD"))),
    }
}

fn write_series_outputs(scan: &Scan, opts: &SeriesOpts, out: &Path) -> Result<(), Failure> {
    let scheme = opts.bin.unwrap_or_else(|| default_bin(scan.manifest.kind));
    let from = parse_key(&opts.from, "from")?;
    let to = parse_key(&opts.to, "to")?;
    let series = match scan.table.kind() {
        TableKind::Documents => {
            let mut spec = BinSpec::new(scheme);
            match (from, to) {
                (Some(a), Some(b)) => spec = spec.with_range(a, b),
                (None, None) => {}
                _ => return Err(Failure::config(anyhow!("--from and --to must be given together"))),
            }
            bin_counts(&scan.table, &spec, opts.mode)?
        }
        TableKind::Periods => {
            if from.is_some() || to.is_some() {
                return Err(Failure::config(anyhow!("--from/--to apply to document corpora only")));
            }
            let empty = PeriodTotals::default();
            ngram_series(&scan.table, scan.totals.as_ref().unwrap_or(&empty), scheme, opts.mode)?
        }
    };
    let smoothed = series
        .iter()
        .map(|s| rolling_average(s, opts.window))
        .collect::<Result<Vec<_>, _>>()?;
    let mut f = create(&out.join("series.tsv"))?;
    write_series(&series, Some(&smoothed), &scan.lexicon, &mut f)?;
    f.flush()?;
    info!(
        "{} series over {} bins ({}, window {})",
        series.len(),
        series.first().map_or(0, |s| s.points.len()),
        scheme.width_label(),
        opts.window
    );
    Ok(())
}

fn write_zipf_outputs(ranks: &RankTable, opts: &ZipfOpts, out: &Path) -> Result<(), Failure> {
    let mut f = create(&out.join("ranks.tsv"))?;
    write_rank_table(ranks, &mut f)?;
    f.flush()?;
    let mut f = create(&out.join("loglog.tsv"))?;
    export_loglog(ranks, &mut f)?;
    f.flush()?;

    let fit_path = out.join("fit.txt");
    let range = match opts.fit_range {
        Some(r) => r,
        None if ranks.len() >= 3 => RankRange {
            from: 1,
            to: ranks.len(),
        },
        None => {
            warn!("only {} ranked proverbs; power-law fit skipped", ranks.len());
            if fit_path.exists() {
                fs::remove_file(&fit_path)?;
            }
            return Ok(());
        }
    };
    let fit = fit_power_law(ranks, range)?;
    let mut f = create(&fit_path)?;
    write_fit_report(&ranks.corpus_id, &fit, &mut f)?;
    f.flush()?;
    write_fit_report(&ranks.corpus_id, &fit, std::io::stdout().lock())?;
    Ok(())
}

fn write_network_outputs(scan: &Scan, opts: &NetworkOpts, workers: usize, out: &Path) -> Result<(), Failure> {
    if scan.table.kind() != TableKind::Documents {
        return Err(Failure::config(anyhow!(
            "network needs a document corpus; `{}` is pre-aggregated",
            scan.manifest.corpus_id
        )));
    }
    if opts.top == 0 {
        return Err(paremio_core::Error::InvalidTopK.into());
    }
    let graph = build_cooccurrence_graph(&scan.table, opts.node_kind, opts.max_nodes)?;
    let scores = betweenness_parallel(&graph, opts.normalized, workers)?;
    let top = top_central_nodes(&graph, &scores, opts.top)?;
    let mut f = create(&out.join("edges.tsv"))?;
    write_edges(&graph, &mut f)?;
    f.flush()?;
    let mut f = create(&out.join("centrality.tsv"))?;
    write_centrality(&top, &mut f)?;
    f.flush()?;
    info!("network: {} nodes, {} edges", graph.node_count(), graph.edge_count());
    Ok(())
}
