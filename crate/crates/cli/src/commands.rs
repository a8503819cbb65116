use std::fmt;
use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ppt_core::config::PipelineConfig;
use ppt_core::corpus::{atomic_write, corpus_report, depth_stats, pack, read_corpus, PackedCorpus};
use ppt_core::efficiency::{evaluate, plot_data, LossCurve, MrsReport};
use ppt_core::generate::{default_names, default_wordlist, gen_retrieval_eval};
use ppt_core::metamer::{ContextMode, NGramModel};
use ppt_core::pipeline::{self, generate_corpus, metamer_corpus, StepGeometry};
use ppt_core::recognize::{classify, recognize_shuffle, recognize_stack_kdyck, recognize_ww};
use ppt_core::token::{glyph_arity, parse_glyphs};
use ppt_core::{CorpusSource, Family, LanguageSpec, TokenId, TokenSeq};

use crate::{
    CheckArgs, Cli, Command, EvalGenArgs, FamilyArg, GenArgs, MetamerCommand, MetamerFitArgs, MetamerSampleArgs,
    MrsArgs, OutDir, PackArgs,
};

/// Bad flag combinations that clap cannot express.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref().map(PipelineConfig::load).transpose()?;
    match cli.command {
        Command::Gen(args) => match config {
            Some(config) if args.family.is_none() => gen_config(&config, &args.out),
            _ => gen(args),
        },
        Command::Check(args) => check(args),
        Command::Metamer(MetamerCommand::Fit(args)) => metamer_fit(args),
        Command::Metamer(MetamerCommand::Sample(args)) => metamer_sample(args),
        Command::Pack(args) => pack_lines(args),
        Command::Stats(args) => print_json(&depth_stats(&read_corpus(&args.corpus)?)?),
        Command::Report(args) => print_json(&corpus_report(&read_corpus(&args.corpus)?)),
        Command::Mrs(args) => mrs(args),
        Command::EvalGen(args) => eval_gen(args),
    }
}

fn out_dir(out: &OutDir, fallback: Option<&Path>) -> PathBuf {
    out.out
        .clone()
        .or_else(|| fallback.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn print_saved(path: &Path, corpus: &PackedCorpus) {
    let m = corpus.manifest();
    let geometry = StepGeometry::DEFAULT;
    println!("wrote {}", path.display());
    println!("source: {}", m.source.label());
    println!(
        "windows: {} x {}, tokens: {}, dropped: {}",
        corpus.rows(),
        m.window_length,
        m.total_tokens,
        m.dropped_tokens
    );
    println!(
        "tokens_per_step: {} (batch {} x {}), steps: {:.2}",
        geometry.tokens_per_step(),
        geometry.batch_size,
        geometry.sequence_length,
        geometry.steps(m.total_tokens)
    );
}

fn gen(args: GenArgs) -> Result<()> {
    let family: Family = args.family.ok_or_else(|| usage("--family is required"))?.into();
    let mut spec = LanguageSpec::new(family, args.k).with_seed(args.seed);
    if let Some(p) = args.p_open {
        spec = spec.with_p_open(p);
    }
    if let Some(d) = args.max_depth {
        spec = spec.with_max_depth(d);
    }
    if let Some(l) = args.max_length {
        spec = spec.with_max_length(l);
    }
    spec.validate()?;
    let name = args.name.unwrap_or_else(|| format!("{family}-k{}", args.k));
    let corpus = generate_corpus(&spec, args.tokens, args.window)?;
    let path = pipeline::save(&corpus, &out_dir(&args.out, None), &name)?;
    print_saved(&path, &corpus);
    Ok(())
}

fn gen_config(config: &PipelineConfig, out: &OutDir) -> Result<()> {
    let dir = out_dir(out, config.output_dir.as_deref());
    for (name, corpus) in pipeline::run_config(config, &dir)? {
        print_saved(&pipeline::corpus_path(&dir, &name), &corpus);
    }
    Ok(())
}

/// One input line as token ids: bracket glyphs, whitespace- or
/// comma-separated integers, or (for `ww`) the characters themselves.
fn parse_line(line: &str, k: Option<u32>, family: Option<FamilyArg>) -> Result<(Vec<TokenId>, Option<u32>)> {
    let text = line.trim();
    if let Some(arity) = glyph_arity(text) {
        let k = k.unwrap_or(arity);
        let tokens =
            parse_glyphs(text, k).ok_or_else(|| usage(format!("`{text}` uses bracket types beyond k = {k}")))?;
        return Ok((tokens, Some(k)));
    }
    let fields: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|f| !f.is_empty())
        .collect();
    let ids: Option<Vec<TokenId>> = fields.iter().map(|f| f.parse().ok()).collect();
    match ids {
        Some(ids) if fields.len() > 1 || matches!(family, Some(FamilyArg::Nested | FamilyArg::Shuffle)) => Ok((ids, k)),
        _ if matches!(family, None | Some(FamilyArg::Ww)) => Ok((text.chars().map(u32::from).collect(), None)),
        _ => Err(ppt_core::Error::InvalidSpec(format!("cannot read `{text}` as brackets or token ids")).into()),
    }
}

fn decide(family: FamilyArg, tokens: &[TokenId], k: Option<u32>) -> Result<bool> {
    let need_k = || k.ok_or_else(|| usage("token-id input needs -k for Dyck families"));
    Ok(match family {
        FamilyArg::Nested => recognize_stack_kdyck(tokens, need_k()?)?,
        FamilyArg::Shuffle => recognize_shuffle(tokens, need_k()?)?,
        FamilyArg::Ww => recognize_ww(tokens),
        FamilyArg::Random => return Err(usage("random-uniform has no recognizer")),
    })
}

fn check(args: CheckArgs) -> Result<()> {
    if let Some(path) = &args.corpus {
        return check_corpus(path, args.family, args.k);
    }
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line.context("reading stdin")?;
        let (tokens, k) = parse_line(&line, args.k, args.family)?;
        match args.family {
            Some(family) => {
                let verdict = if decide(family, &tokens, k)? {
                    "accept"
                } else {
                    "reject"
                };
                writeln!(out, "{verdict}")?;
            }
            None => match k {
                Some(k) => writeln!(out, "{}", serde_json::to_string(&classify(&tokens, k)?)?)?,
                None => writeln!(out, "{}", serde_json::json!({ "ww": recognize_ww(&tokens) }))?,
            },
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct CorpusCheck {
    family: String,
    documents: usize,
    truncated: usize,
    checked: usize,
    accepted: usize,
    acceptance_rate: f64,
}

fn check_corpus(path: &Path, family: Option<FamilyArg>, k: Option<u32>) -> Result<()> {
    let corpus = read_corpus(path)?;
    let m = corpus.manifest();
    let family = match (family, &m.source) {
        (Some(f), _) => f,
        (None, CorpusSource::Language(spec)) => match spec.family {
            Family::DyckNested => FamilyArg::Nested,
            Family::DyckShuffle => FamilyArg::Shuffle,
            Family::Ww => FamilyArg::Ww,
            Family::RandomUniform => FamilyArg::Random,
        },
        _ => return Err(usage("corpus has no language family; pass --family")),
    };
    let k = k.or(m.source.dyck_k()).or(Some(m.vocab_size / 2));
    let (mut checked, mut accepted, mut truncated) = (0, 0, 0);
    for (i, doc) in corpus.documents().enumerate() {
        // Truncated documents, and the last one if the window cut it, are skipped.
        let cut = i + 1 == corpus.document_count() && m.dropped_tokens > 0;
        if m.truncated[i] || cut {
            truncated += 1;
            continue;
        }
        checked += 1;
        accepted += decide(family, doc, k)? as usize;
    }
    let family: Family = family.into();
    print_json(&CorpusCheck {
        family: family.to_string(),
        documents: corpus.document_count(),
        truncated,
        checked,
        accepted,
        acceptance_rate: if checked == 0 {
            0.0
        } else {
            accepted as f64 / checked as f64
        },
    })
}

fn metamer_fit(args: MetamerFitArgs) -> Result<()> {
    let corpus = read_corpus(&args.corpus)?;
    let m = corpus.manifest();
    let mode = if args.continuous {
        ContextMode::Continuous
    } else {
        ContextMode::ResetAtBoundary
    };
    let model = NGramModel::fit(corpus.documents(), m.vocab_size, args.order, mode)?.with_source(m.source.label());
    model.save(&args.output)?;
    println!(
        "wrote {} (order {}, {} contexts, {} tokens)",
        args.output.display(),
        model.order(),
        model.context_count(),
        model.total_tokens()
    );
    Ok(())
}

fn metamer_sample(args: MetamerSampleArgs) -> Result<()> {
    let model = NGramModel::load(&args.model)?;
    let corpus = metamer_corpus(&model, args.tokens, args.doc_length, args.window, args.seed)?;
    let path = pipeline::save(&corpus, &out_dir(&args.out, None), &args.name)?;
    print_saved(&path, &corpus);
    Ok(())
}

fn pack_lines(args: PackArgs) -> Result<()> {
    let text = match &args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| ppt_core::Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<TokenId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ppt_core::Error::InvalidSpec(format!("line {}: {e}", i + 1)))?;
        docs.push(TokenSeq::new(tokens, args.vocab_size)?);
    }
    let description = args
        .input
        .as_ref()
        .map_or_else(|| "stdin".to_string(), |p| p.display().to_string());
    let corpus = pack(docs, args.window, CorpusSource::External { description }, args.seed)?;
    let path = pipeline::save(&corpus, &out_dir(&args.out, None), &args.name)?;
    print_saved(&path, &corpus);
    Ok(())
}

/// Shortest decimal that still shows one fractional digit: 8.0, 17.667.
fn number(x: f64) -> String {
    format!("{:?}", (x * 1000.0).round() / 1000.0)
}

fn print_report(r: &MrsReport) {
    println!("MRS={}", number(r.mrs));
    println!("MRS_tokens={}", number(r.mrs_tokens));
    println!("efficiency={}%", (r.efficiency * 1000.0).round() / 10.0);
    println!(
        "eval_step={} target_loss={} run_pt_steps={} run_ppt_steps={}{}",
        r.eval_step,
        r.target_loss,
        number(r.run.pt_steps),
        r.run.ppt_steps,
        if r.non_monotone { " (non-monotone crossing)" } else { "" }
    );
    println!("loss,baseline_steps,run_pt_steps,run_total_steps");
    for row in &r.table {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), number);
        println!(
            "{},{},{},{}",
            row.loss,
            row.baseline_steps,
            opt(row.run_pt_steps),
            opt(row.run_total_steps)
        );
    }
}

fn mrs(args: MrsArgs) -> Result<()> {
    let baseline = LossCurve::load(&args.baseline)?;
    let mut run = LossCurve::load(&args.run)?;
    if let Some(x) = args.ppt_steps {
        run = run.with_ppt_steps(x);
    }
    let eval_step = args.eval_step.unwrap_or(baseline.last_step() as f64);
    let raw = evaluate(&baseline, &run, eval_step)?;
    let smoothed = match args.smooth {
        Some(window) => Some(evaluate(&baseline.smoothed(window), &run.smoothed(window), eval_step)?),
        None => None,
    };
    if let Some(path) = &args.plot_data {
        atomic_write(path, plot_data(&[&baseline, &run]).as_bytes())?;
    }
    if args.json {
        return print_json(&serde_json::json!({ "raw": raw, "smoothed": smoothed }));
    }
    match &smoothed {
        Some(s) => {
            print_report(s);
            println!(
                "raw: MRS={} efficiency={}%",
                number(raw.mrs),
                (raw.efficiency * 1000.0).round() / 10.0
            );
        }
        None => print_report(&raw),
    }
    Ok(())
}

fn eval_gen(args: EvalGenArgs) -> Result<()> {
    let docs = gen_retrieval_eval(
        default_wordlist(),
        default_names(),
        args.list_len,
        args.count,
        args.seed,
    )?;
    let mut text = String::new();
    for doc in docs {
        text.push_str(&serde_json::to_string(&doc)?);
        text.push('\n');
    }
    match &args.output {
        Some(path) => Ok(atomic_write(path, text.as_bytes())?),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
