use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::{
    CliError, EvalArgs, IndexArgs, RankArgs, RerankArgs, SpecArgs, SweepArgs, EXIT_FAILURE,
};
use crate::corpus::{
    parse_qrels, parse_run, parse_topics, write_run, Corpus, ParseOptions, Qrels, RankedRun,
    Tokenizer,
};
use crate::error::Error;
use crate::eval::{
    compare_query_ids, paired, run_sweep, tune_mu, wilcoxon_two_sided, write_report_tsv, Grid,
    Metric, MetricFn, MetricReport,
};
use crate::index::Index;
use crate::lm::{query_log_likelihood, TermVector};
use crate::rerank::{likelihoods_from_logs, InitialList, QueryContext, RerankOutput, RerankSpec};
use crate::retrieval::initial_run;

type CliResult<T = ()> = Result<T, CliError>;

fn warn(msg: &str) {
    eprintln!("clustrank: warning: {msg}");
}

fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e).into())
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e).into())
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult {
    let mut out = create(path)?;
    f(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e).into())
}

/// Write to `path`, or to stdout when it is `None`.
fn write_or_stdout(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult {
    match path {
        Some(p) => write_file(p, f),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::new(EXIT_FAILURE, format!("stdout: {e}")))
        }
    }
}

fn load_index(path: &Path) -> CliResult<Index> {
    Index::load(path).map_err(CliError::bad_input)
}

fn load_qrels(path: &Path) -> CliResult<Qrels> {
    Ok(parse_qrels(open(path)?)?)
}

fn load_topics(path: &Path) -> CliResult<Vec<(String, String)>> {
    Ok(parse_topics(open(path)?)?)
}

fn sort_runs(runs: &mut [RankedRun]) {
    runs.sort_by(|a, b| compare_query_ids(&a.query_id, &b.query_id));
}

pub fn index(args: &IndexArgs) -> CliResult {
    let mut tokenizer = Tokenizer::new();
    if args.no_stem {
        tokenizer = tokenizer.without_stemming();
    }
    if let Some(path) = &args.stopwords {
        let text = fs::read_to_string(path).map_err(|e| CliError::bad_input(Error::io(path, e)))?;
        tokenizer = tokenizer.with_stopwords(text.split_whitespace());
    }
    let opts = ParseOptions {
        tokenizer,
        include_headlines: args.headlines,
    };
    let corpus = Corpus::load_path(&args.corpus, &opts).map_err(CliError::bad_input)?;
    let index = Index::build(corpus, opts.tokenizer).map_err(CliError::bad_input)?;
    let empty = index.docs().iter().filter(|d| d.length() == 0).count();
    if empty > 0 {
        warn(&format!(
            "{empty} documents have no terms and will never be retrieved"
        ));
    }
    Ok(index.save(&args.out)?)
}

/// In-vocabulary query vectors, with warnings for dropped terms.
fn query_vectors(index: &Index, topics: &[(String, String)]) -> Vec<(String, TermVector)> {
    topics
        .iter()
        .map(|(qid, text)| match index.query(qid, text) {
            Ok(q) => {
                if !q.oov_terms.is_empty() {
                    warn(&format!(
                        "query {qid}: ignoring terms not in the index: {}",
                        q.oov_terms.join(" ")
                    ));
                }
                let terms = q.in_vocabulary(index.collection());
                if terms.is_empty() {
                    warn(&format!("query {qid}: no indexed terms, empty ranking"));
                }
                (qid.clone(), terms)
            }
            Err(e) => {
                warn(&format!("{e}; empty ranking"));
                (qid.clone(), TermVector::new())
            }
        })
        .collect()
}

pub fn rank(args: &RankArgs) -> CliResult {
    let index = load_index(&args.index)?;
    let topics = load_topics(&args.topics)?;
    let queries = query_vectors(&index, &topics);
    let mu = match &args.tune {
        None => args.mu,
        Some(metric) => {
            let metric: Metric = metric.parse()?;
            let qrels = load_qrels(
                args.qrels
                    .as_deref()
                    .expect("clap requires qrels with tune"),
            )?;
            let (mu, table) = tune_mu(
                &queries,
                index.docs(),
                index.collection(),
                &qrels,
                metric,
                &args.mu_grid,
            )?;
            for (m, v) in table {
                eprintln!("mu={m}\t{v:.4}");
            }
            eprintln!("selected mu={mu}");
            mu
        }
    };
    let tag = format!("QL-mu{mu}");
    let mut runs = queries
        .par_iter()
        .map(|(qid, q)| {
            initial_run(
                qid,
                q,
                index.docs(),
                index.collection(),
                mu,
                args.depth,
                &tag,
            )
        })
        .collect::<Result<Vec<_>, Error>>()?;
    sort_runs(&mut runs);
    write_file(&args.out, |w| write_run(&runs, w))
}

struct Prepared {
    lists: Vec<InitialList>,
    queries: HashMap<String, TermVector>,
    likelihoods: Vec<Vec<f64>>,
}

fn spec_from(args: &SpecArgs) -> CliResult<RerankSpec> {
    let spec = RerankSpec {
        mode: args.mode.parse()?,
        scorer: args.score.parse()?,
        schema: args.graph.parse()?,
        delta: args.delta,
        k: args.k,
        lambda: args.lambda,
        smooth_lambda: args.smooth_lambda,
        reanchor: args.reanchor,
        tie: args.tie.parse()?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Read the initial run and cut each query's list to its top `n` documents.
fn prepare(args: &SpecArgs, index: &Index) -> CliResult<Prepared> {
    if args.n < 2 {
        return Err(Error::param("n", "the initial list must hold at least two documents").into());
    }
    if let Some(mu) = args.mu {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("must be positive, got {mu}")).into());
        }
    }
    let runs = parse_run(open(&args.run)?)?;
    let queries: HashMap<String, TermVector> = match &args.topics {
        Some(path) => query_vectors(index, &load_topics(path)?)
            .into_iter()
            .collect(),
        None => HashMap::new(),
    };
    let mut lists = Vec::with_capacity(runs.len());
    let mut likelihoods = Vec::with_capacity(runs.len());
    for run in runs {
        let mut docs = Vec::new();
        let mut scores = Vec::new();
        for e in run.entries.iter().take(args.n) {
            let doc = index.document(&e.docno).ok_or_else(|| {
                CliError::new(
                    EXIT_FAILURE,
                    format!(
                        "run {} references unknown document {}",
                        args.run.display(),
                        e.docno
                    ),
                )
            })?;
            if doc.length() == 0 {
                warn(&format!(
                    "query {}: skipping empty document {}",
                    run.query_id, e.docno
                ));
                continue;
            }
            docs.push(doc.clone());
            scores.push(e.score);
        }
        let logs: Vec<f64> = match (args.mu, queries.get(&run.query_id)) {
            (Some(mu), Some(q)) => docs
                .iter()
                .map(|d| query_log_likelihood(q, &d.terms, mu, index.collection()))
                .collect(),
            (Some(_), None) => {
                return Err(CliError::new(
                    EXIT_FAILURE,
                    format!("--mu needs --topics covering query {}", run.query_id),
                ))
            }
            (None, _) => scores.clone(),
        };
        likelihoods.push(likelihoods_from_logs(&logs));
        lists.push(InitialList::new(run.query_id, docs, scores)?);
    }
    Ok(Prepared {
        lists,
        queries,
        likelihoods,
    })
}

fn contexts<'a>(
    prep: Prepared,
    index: &'a Index,
    mu_edges: f64,
) -> CliResult<Vec<QueryContext<'a>>> {
    let Prepared {
        lists,
        queries,
        likelihoods,
    } = prep;
    lists
        .into_iter()
        .zip(likelihoods)
        .map(|(list, p)| {
            let query = queries.get(&list.query_id).cloned();
            let mut ctx =
                QueryContext::new(list, index.collection(), mu_edges)?.with_likelihoods(p)?;
            if let Some(q) = query {
                ctx = ctx.with_query(q);
            }
            Ok(ctx)
        })
        .collect()
}

fn rerank_all(
    contexts: &mut [QueryContext<'_>],
    spec: &RerankSpec,
) -> CliResult<Vec<RerankOutput>> {
    let mut outputs = contexts
        .par_iter_mut()
        .map(|ctx| ctx.rerank(spec))
        .collect::<Result<Vec<_>, Error>>()?;
    outputs.sort_by(|a, b| compare_query_ids(&a.run.query_id, &b.run.query_id));
    Ok(outputs)
}

fn write_top_clusters(outputs: &[RerankOutput], w: &mut dyn Write) -> io::Result<()> {
    for o in outputs {
        if let Some(top) = &o.top_cluster {
            writeln!(w, "{}\t{}", o.run.query_id, top.join(" "))?;
        }
    }
    Ok(())
}

fn check_query_text(spec: &RerankSpec, args: &SpecArgs) -> CliResult {
    if spec.scorer == crate::rerank::Scorer::QueryLikelihood && args.topics.is_none() {
        return Err(CliError::new(EXIT_FAILURE, "--score ql needs --topics"));
    }
    Ok(())
}

pub fn rerank(args: &RerankArgs) -> CliResult {
    let spec = spec_from(&args.spec)?;
    check_query_text(&spec, &args.spec)?;
    let index = load_index(&args.spec.index)?;
    let prep = prepare(&args.spec, &index)?;
    let mut ctxs = contexts(prep, &index, args.spec.mu_edges)?;
    let outputs = rerank_all(&mut ctxs, &spec)?;
    let runs: Vec<RankedRun> = outputs.iter().map(|o| o.run.clone()).collect();
    write_file(&args.out, |w| write_run(&runs, w))?;
    if let Some(path) = &args.top_clusters_out {
        write_file(path, |w| write_top_clusters(&outputs, w))?;
    }
    Ok(())
}

fn parse_top_clusters(path: &Path) -> CliResult<HashMap<String, Vec<String>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (qid, members) = l.split_once('\t').unwrap_or((l, ""));
            (
                qid.to_string(),
                members.split_whitespace().map(str::to_string).collect(),
            )
        })
        .collect())
}

fn run_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn eval(args: &EvalArgs) -> CliResult {
    if !args.top_clusters.is_empty() && args.top_clusters.len() != args.run.len() {
        return Err(CliError::new(
            EXIT_FAILURE,
            "give one --top-clusters file per --run, or none",
        ));
    }
    let qrels = load_qrels(&args.qrels)?;
    let mut reports = Vec::with_capacity(args.run.len());
    for (i, path) in args.run.iter().enumerate() {
        let runs = parse_run(open(path)?)?;
        let report = match args.top_clusters.get(i) {
            Some(tc) => {
                MetricReport::evaluate_with_clusters(&runs, &qrels, &parse_top_clusters(tc)?)
            }
            None => MetricReport::evaluate(&runs, &qrels),
        };
        reports.push((run_name(path), report));
    }
    let rows: Vec<(String, &MetricReport)> = reports.iter().map(|(n, r)| (n.clone(), r)).collect();
    write_or_stdout(args.out.as_deref(), |w| write_report_tsv(&rows, w))?;
    if let Some(path) = &args.pvalues {
        let metrics: [(&str, MetricFn); 3] = [
            ("prec@5", |q| q.prec5),
            ("prec@10", |q| q.prec10),
            ("MRR", |q| q.mrr),
        ];
        write_file(path, |w| {
            writeln!(w, "run_a\trun_b\tmetric\tqueries\tp_value")?;
            for (i, (na, a)) in reports.iter().enumerate() {
                for (nb, b) in &reports[i + 1..] {
                    for (name, f) in metrics {
                        let pairs = paired(a, b, f);
                        writeln!(
                            w,
                            "{na}\t{nb}\t{name}\t{}\t{:.6}",
                            pairs.len(),
                            wilcoxon_two_sided(&pairs)
                        )?;
                    }
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> CliResult {
    let base = spec_from(&args.spec)?;
    check_query_text(&base, &args.spec)?;
    let grid = Grid {
        deltas: args.delta_grid.clone(),
        ks: args.k_grid.clone(),
        lambdas: args.lambda_grid.clone(),
    };
    let qrels = load_qrels(&args.qrels)?;
    let index = load_index(&args.spec.index)?;
    let prep = prepare(&args.spec, &index)?;
    let mut ctxs = contexts(prep, &index, args.spec.mu_edges)?;
    let result = run_sweep(&mut ctxs, &base, &grid, &qrels)?;
    let rows: Vec<(String, &MetricReport)> = result
        .entries
        .iter()
        .map(|(s, r)| (s.to_string(), r))
        .collect();
    write_or_stdout(args.out.as_deref(), |w| write_report_tsv(&rows, w))?;
    let Some((setting, report)) = result.selected() else {
        return Err(CliError::new(EXIT_FAILURE, "empty parameter grid"));
    };
    eprintln!(
        "selected {} {setting}: prec@5 {:.4} prec@10 {:.4} MRR {:.4}",
        base.name(),
        report.mean_prec5,
        report.mean_prec10,
        report.mean_mrr
    );
    if let Some(path) = &args.selected_run {
        let outputs = rerank_all(&mut ctxs, &setting.apply(&base))?;
        let runs: Vec<RankedRun> = outputs.into_iter().map(|o| o.run).collect();
        write_file(path, |w| write_run(&runs, w))?;
    }
    Ok(())
}
