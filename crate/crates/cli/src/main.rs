//! `cws`: train and evaluate confidence-weighted semi-supervised models.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cws_cli::{run_experiment, run_gradcheck, DataSource, ExperimentManifest, SplitOptions};
use cws_core::annotate::{
    bm25_rank_all, lexicon_annotate, pairwise_weak_label, Bm25Params, SentimentLexicon, WeakLabel,
};
use cws_core::data::{
    class_index, class_name, gen_synth_ranking, gen_synth_sentiment, load_ranking_corpus,
    load_sentiment_corpus, RankingSynthSpec, SentimentSynthSpec,
};
use cws_core::eval::{
    macro_f1, mean_average_precision, ndcg_at_k, parse_qrels, parse_run_file, SEMEVAL_CLASSES,
};
use cws_core::model::Task;
use cws_core::Error;

#[derive(Parser)]
#[command(
    name = "cws",
    version,
    about = "Confidence-weighted semi-supervised training"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_task(s: &str) -> Result<Task, String> {
    match s.to_lowercase().as_str() {
        "ranking" => Ok(Task::Ranking),
        "sentiment" => Ok(Task::Sentiment),
        other => Err(format!(
            "unknown task {other:?} (expected ranking or sentiment)"
        )),
    }
}

#[derive(Args)]
struct DataArgs {
    /// Ranking documents TSV (`docid<TAB>text`).
    #[arg(long)]
    docs: Option<PathBuf>,
    /// Ranking queries TSV (`qid<TAB>text`).
    #[arg(long)]
    queries: Option<PathBuf>,
    /// TREC qrels file.
    #[arg(long)]
    qrels: Option<PathBuf>,
    /// Sentiment sentences JSONL.
    #[arg(long)]
    sentences: Option<PathBuf>,
    /// Sentiment lexicon TSV.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Pretrained embedding text file.
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

impl DataArgs {
    fn into_source(self, task: Task) -> Result<DataSource, Error> {
        match task {
            Task::Ranking => match (self.docs, self.queries, self.qrels) {
                (Some(docs), Some(queries), Some(qrels)) => Ok(DataSource::RankingFiles {
                    docs,
                    queries,
                    qrels,
                }),
                (None, None, None) => Ok(DataSource::SyntheticRanking(RankingSynthSpec::default())),
                _ => Err(Error::Config(
                    "ranking needs --docs, --queries, and --qrels together (or none for synthetic)"
                        .into(),
                )),
            },
            Task::Sentiment => match (self.sentences, self.lexicon) {
                (Some(sentences), Some(lexicon)) => Ok(DataSource::SentimentFiles {
                    sentences,
                    lexicon,
                    embeddings: self.embeddings,
                }),
                (None, None) => Ok(DataSource::SyntheticSentiment(SentimentSynthSpec::default())),
                _ => Err(Error::Config(
                    "sentiment needs --sentences and --lexicon together (or none for synthetic)"
                        .into(),
                )),
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a synthetic corpus to files.
    Synth {
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        noise_rate: Option<f64>,
    },
    /// Run the weak annotator over a corpus and write its labels.
    Annotate {
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[command(flatten)]
        data: DataArgs,
        /// Output path for the weak labels.
        #[arg(long)]
        out: PathBuf,
        /// Candidates harvested per query (ranking).
        #[arg(long, default_value_t = 25)]
        top_k: usize,
    },
    /// Train one strategy on one seed and persist metrics and curves.
    Train {
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        max_weak_batches: Option<usize>,
        #[arg(long)]
        checkpoint_every: Option<usize>,
    },
    /// Evaluate result files: a TREC run against qrels, or predictions
    /// against gold sentences.
    Eval {
        /// TREC run file (ranking).
        #[arg(long)]
        run: Option<PathBuf>,
        /// TREC qrels file (ranking).
        #[arg(long)]
        qrels: Option<PathBuf>,
        /// Predictions TSV (`id<TAB>label`, sentiment).
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Gold sentences JSONL (sentiment).
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Run a full experiment grid from a manifest.
    Experiment {
        #[arg(long)]
        manifest: PathBuf,
        /// Override the manifest output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Verify every analytic gradient against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        draws: usize,
        /// Corrupt one gradient to prove the harness can fail.
        #[arg(long, default_value_t = false)]
        inject_fault: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedStrategy(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version "errors" are successes
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(1);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Synth {
            task,
            out_dir,
            seed,
            noise_rate,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            match task {
                Task::Ranking => {
                    let mut spec = RankingSynthSpec {
                        seed,
                        ..Default::default()
                    };
                    if let Some(n) = noise_rate {
                        spec.noise_rate = n;
                    }
                    let corpus = gen_synth_ranking(&spec)?;
                    write_tsv(&out_dir.join("docs.tsv"), &corpus.documents)?;
                    write_tsv(&out_dir.join("queries.tsv"), &corpus.queries)?;
                    let mut qrels = String::new();
                    for (q, d, g) in corpus.qrels.iter() {
                        qrels.push_str(&format!("{q} 0 {d} {g}\n"));
                    }
                    std::fs::write(out_dir.join("qrels.txt"), qrels)?;
                    println!(
                        "wrote {} documents, {} queries, {} judgments to {}",
                        corpus.documents.len(),
                        corpus.queries.len(),
                        corpus.qrels.len(),
                        out_dir.display()
                    );
                }
                Task::Sentiment => {
                    let mut spec = SentimentSynthSpec {
                        seed,
                        ..Default::default()
                    };
                    if let Some(n) = noise_rate {
                        spec.noise_rate = n;
                    }
                    let synth = gen_synth_sentiment(&spec)?;
                    let mut jsonl = String::new();
                    for r in synth.labeled.iter().chain(&synth.unlabeled) {
                        let text = r.tokens.join(" ");
                        match r.label {
                            Some(c) => jsonl.push_str(&format!(
                                "{{\"id\":\"{}\",\"text\":\"{}\",\"label\":\"{}\"}}\n",
                                r.id,
                                text,
                                class_name(c)
                            )),
                            None => jsonl.push_str(&format!(
                                "{{\"id\":\"{}\",\"text\":\"{}\"}}\n",
                                r.id, text
                            )),
                        }
                    }
                    std::fs::write(out_dir.join("sentences.jsonl"), jsonl)?;
                    synth
                        .released_lexicon
                        .write_tsv(&out_dir.join("lexicon.tsv"))?;
                    let mut emb = String::new();
                    let mut words: Vec<&String> = synth.pretrained.keys().collect();
                    words.sort();
                    for w in words {
                        let values: Vec<String> = synth.pretrained[w]
                            .iter()
                            .map(|v| format!("{v:.6}"))
                            .collect();
                        emb.push_str(&format!("{w} {}\n", values.join(" ")));
                    }
                    std::fs::write(out_dir.join("embeddings.txt"), emb)?;
                    println!(
                        "wrote {} labeled + {} unlabeled sentences, lexicon of {}, embeddings to {}",
                        synth.labeled.len(),
                        synth.unlabeled.len(),
                        synth.released_lexicon.len(),
                        out_dir.display()
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Annotate {
            task,
            data,
            out,
            top_k,
        } => {
            match task {
                Task::Sentiment => {
                    let DataSource::SentimentFiles {
                        sentences, lexicon, ..
                    } = data.into_source(task)?
                    else {
                        return Err(Error::Config(
                            "annotate needs --sentences and --lexicon".into(),
                        ));
                    };
                    let (records, _) = load_sentiment_corpus(&sentences)?;
                    let lexicon = SentimentLexicon::load_tsv(&lexicon)?;
                    let mut text = String::from("# id\tp_pos\tp_neg\tp_neu\n");
                    let n = records.len();
                    for r in records {
                        let WeakLabel::Distribution(d) = lexicon_annotate(&lexicon, &r.tokens)
                        else {
                            unreachable!()
                        };
                        text.push_str(&format!(
                            "{}\t{:.6}\t{:.6}\t{:.6}\n",
                            r.id, d[0], d[1], d[2]
                        ));
                    }
                    std::fs::write(&out, text)?;
                    println!("annotated {n} sentences to {}", out.display());
                }
                Task::Ranking => {
                    let DataSource::RankingFiles {
                        docs,
                        queries,
                        qrels,
                    } = data.into_source(task)?
                    else {
                        return Err(Error::Config(
                            "annotate needs --docs, --queries, and --qrels".into(),
                        ));
                    };
                    let corpus = load_ranking_corpus(&docs, &queries, &qrels)?;
                    let index = cws_core::annotate::build_index(&corpus.documents)?;
                    let params = Bm25Params::default();
                    let mut text = String::from("# qid\tdoc_pos\tdoc_neg\tweak_label\n");
                    let mut pairs = 0usize;
                    for (qid, qtoks) in &corpus.queries {
                        if !corpus.qrels.grades_for(qid).is_empty() {
                            continue;
                        }
                        let ranked = bm25_rank_all(&index, &params, qtoks)?;
                        let candidates: Vec<(String, f64)> = ranked
                            .into_iter()
                            .filter(|(_, s)| *s > 0.0)
                            .take(top_k)
                            .collect();
                        for i in 0..candidates.len() {
                            for j in (i + 1)..candidates.len() {
                                let WeakLabel::Scalar(p) =
                                    pairwise_weak_label(candidates[i].1, candidates[j].1)?
                                else {
                                    unreachable!()
                                };
                                text.push_str(&format!(
                                    "{qid}\t{}\t{}\t{p:.6}\n",
                                    candidates[i].0, candidates[j].0
                                ));
                                pairs += 1;
                            }
                        }
                    }
                    std::fs::write(&out, text)?;
                    println!("annotated {pairs} pairs to {}", out.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Train {
            task,
            strategy,
            seed,
            data,
            out_dir,
            max_weak_batches,
            checkpoint_every,
        } => {
            let mut manifest = ExperimentManifest {
                task,
                data: data.into_source(task)?,
                strategies: vec![strategy],
                seeds: vec![seed],
                baseline: "WSO".into(),
                out_dir: None,
                config: Default::default(),
                split: SplitOptions::default(),
                dims: None,
            };
            manifest.config.max_weak_batches = max_weak_batches;
            manifest.config.checkpoint_every = checkpoint_every;
            let report = run_experiment(&manifest, &out_dir)?;
            print!("{}", report.metrics_csv());
            if !report.failures.is_empty() {
                return Err(Error::State(format!(
                    "{} cell(s) failed",
                    report.failures.len()
                )));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Eval {
            run,
            qrels,
            predictions,
            gold,
        } => {
            match (run, qrels, predictions, gold) {
                (Some(run), Some(qrels), None, None) => {
                    let runs = parse_run_file(&run)?;
                    let judgments = parse_qrels(&qrels)?;
                    let map = mean_average_precision(&runs, &judgments, 1000)?;
                    let ndcg = ndcg_at_k(&runs, &judgments, 20)?;
                    println!("map {map:.6}");
                    println!("ndcg@20 {ndcg:.6}");
                }
                (None, None, Some(predictions), Some(gold)) => {
                    let (records, _) = load_sentiment_corpus(&gold)?;
                    let gold_by_id: std::collections::HashMap<&str, usize> = records
                        .iter()
                        .filter_map(|r| r.label.map(|l| (r.id.as_str(), l)))
                        .collect();
                    let text = std::fs::read_to_string(&predictions)?;
                    let mut pred = Vec::new();
                    let mut truth = Vec::new();
                    for (idx, line) in text.lines().enumerate() {
                        if line.trim().is_empty() || line.starts_with('#') {
                            continue;
                        }
                        let Some((id, label)) = line.split_once('\t') else {
                            return Err(Error::Parse {
                                line: idx + 1,
                                msg: "prediction line needs id<TAB>label".into(),
                            });
                        };
                        let Some(class) = class_index(label.trim()) else {
                            return Err(Error::Parse {
                                line: idx + 1,
                                msg: format!("unknown label {label:?}"),
                            });
                        };
                        if let Some(&g) = gold_by_id.get(id) {
                            pred.push(class);
                            truth.push(g);
                        }
                    }
                    let f1 = macro_f1(&pred, &truth, &SEMEVAL_CLASSES)?;
                    println!("macro_f1 {f1:.6}");
                }
                _ => {
                    return Err(Error::Config(
                        "eval needs either --run with --qrels, or --predictions with --gold".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Experiment { manifest, out_dir } => {
            let manifest = ExperimentManifest::load(&manifest)?;
            let out = out_dir
                .or_else(|| manifest.out_dir.clone())
                .ok_or_else(|| {
                    Error::Config("no output directory (manifest out_dir or --out-dir)".into())
                })?;
            let report = run_experiment(&manifest, &out)?;
            print!("{}", report.metrics_csv());
            println!("results written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Gradcheck {
            draws,
            inject_fault,
        } => {
            let run = run_gradcheck(draws, inject_fault)?;
            if run.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn write_tsv(path: &std::path::Path, rows: &[(String, Vec<String>)]) -> Result<(), Error> {
    let mut text = String::new();
    for (id, tokens) in rows {
        text.push_str(&format!("{id}\t{}\n", tokens.join(" ")));
    }
    std::fs::write(path, text)?;
    Ok(())
}
