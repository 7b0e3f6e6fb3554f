use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use valuekit_core::curation::io::read_samples;
use valuekit_core::model::{
    evaluate, format_loss_trace, load_model, save_model, train as train_model, Mode, ModelConfig, TrainConfig,
    ValueModel,
};
use valuekit_core::reward::{
    escape_field, format_profile, format_radar, format_ranking, format_reward_trace, profile_speaker,
    reward as compute_reward, rerank_candidates, DialogueTrace, PersonaProfile, ValueFunction,
};
use valuekit_core::ValueDimension;
use valuekit_serve::{RemoteScorer, ServeConfig, Server, DEFAULT_BODY_LIMIT, DEFAULT_CONCURRENCY};

use crate::args::*;
use crate::meta::{sidecar_path, RunMeta};
use crate::text_io::{lines, read_input, read_lines, write};
use crate::{usage, Ctx};

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
const REMOTE_TIMEOUT: Duration = Duration::from_secs(30);

pub fn train(ctx: &Ctx, a: TrainArgs) -> anyhow::Result<()> {
    let file = &ctx.file.train;
    let mode = match (a.mode, &file.mode) {
        (Some(ModeArg::Regression), _) => Mode::Regression,
        (Some(ModeArg::Classification), _) => Mode::Classification,
        (None, Some(s)) => s.parse().map_err(|e| usage(format!("config train.mode: {e}")))?,
        (None, None) => Mode::Regression,
    };
    let defaults = ModelConfig::default();
    let mut model_cfg = ModelConfig {
        hash_dim: a.hash_dim.or(file.hash_dim).unwrap_or(defaults.hash_dim),
        embed_dim: a.embed_dim.or(file.embed_dim).unwrap_or(defaults.embed_dim),
        mode,
        seed: ctx.seed,
        ..defaults
    };
    if let Some(n) = a.ngram_order.or(file.ngram_order) {
        model_cfg.tokenizer.ngram_order = n;
    }
    let td = TrainConfig::default();
    let train_cfg = TrainConfig {
        learning_rate: a.learning_rate.or(file.learning_rate).unwrap_or(td.learning_rate),
        epochs: a.epochs.or(file.epochs).unwrap_or(td.epochs),
        batch_size: a.batch_size.or(file.batch_size).unwrap_or(td.batch_size),
        l2: a.l2.or(file.l2).unwrap_or(td.l2),
        seed: ctx.seed,
        mode,
    };
    train_cfg.validate().map_err(|e| usage(e.to_string()))?;

    let mut meta = RunMeta::new("train", ctx.seed);
    meta.input(&a.train)?;
    let samples = read_samples(&a.train)?;
    let mut model = ValueModel::new(model_cfg.clone()).map_err(|e| usage(e.to_string()))?;
    log::info!("training on {} samples for {} epochs", samples.len(), train_cfg.epochs);
    let trace = train_model(&mut model, &samples, &train_cfg)?;
    save_model(&model, &a.output)?;
    let trace_path = a.loss_trace.unwrap_or_else(|| sidecar_path(&a.output, "loss.tsv"));
    write(&trace_path, format_loss_trace(&trace))?;

    meta.param("model", &model_cfg);
    meta.param("train", &train_cfg);
    meta.count("train_samples", samples.len());
    meta.count("final_loss", trace.last().copied());
    if let Some(valid) = &a.valid {
        meta.input(valid)?;
        let vs = read_samples(valid)?;
        let report = evaluate(&model, &vs)?;
        log::info!("validation accuracy {:.4}, mse {:.4}", report.accuracy, report.mse);
        meta.count("valid_samples", vs.len());
        meta.count("valid_accuracy", report.accuracy);
        meta.count("valid_mse", report.mse);
    }
    meta.write_for(&a.output)?;
    Ok(())
}

pub fn eval(ctx: &Ctx, a: EvalArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("eval", ctx.seed);
    meta.input(&a.model)?;
    meta.input(&a.input)?;
    let model = load_model(&a.model)?;
    let samples = read_samples(&a.input)?;
    let report = evaluate(&model, &samples)?;
    write(&a.output, report.to_text())?;
    let json = a.json.unwrap_or_else(|| sidecar_path(&a.output, "json"));
    write(&json, report.to_json() + "\n")?;
    meta.count("samples", samples.len());
    meta.count("accuracy", report.accuracy);
    meta.count("mse", report.mse);
    meta.write_for(&a.output)?;
    Ok(())
}

fn open_scorer(s: &ScorerArgs, meta: &mut RunMeta) -> anyhow::Result<Box<dyn ValueFunction>> {
    match (&s.model, &s.endpoint) {
        (Some(path), _) => {
            meta.input(path)?;
            Ok(Box::new(load_model(path)?))
        }
        (None, Some(url)) => {
            meta.param("endpoint", url);
            Ok(Box::new(RemoteScorer::new(url.clone(), REMOTE_TIMEOUT)))
        }
        (None, None) => Err(usage("either --model or --endpoint is required")),
    }
}

fn read_texts(path: &Path, what: &str, meta: &mut RunMeta) -> anyhow::Result<Vec<String>> {
    let bytes = read_input(path)?;
    let label = if path.as_os_str() == "-" { "<stdin>".to_string() } else { path.display().to_string() };
    meta.input_bytes(label, &bytes);
    let texts = lines(&bytes, path)?;
    if texts.is_empty() {
        return Err(usage(format!("{}: no {what}", path.display())));
    }
    Ok(texts)
}

pub fn score(ctx: &Ctx, a: ScoreArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("score", ctx.seed);
    let texts = read_texts(&a.input, "texts to score", &mut meta)?;
    let scorer = open_scorer(&a.scorer, &mut meta)?;
    let vectors = scorer.value_vectors(&texts)?;
    let mut out = String::new();
    for d in ValueDimension::ALL {
        write!(out, "{}\t", d.code())?;
    }
    out.push_str("text\n");
    for (t, v) in texts.iter().zip(&vectors) {
        for u in v.components() {
            write!(out, "{u}\t")?;
        }
        writeln!(out, "{}", escape_field(t))?;
    }
    write(&a.output, out)?;
    meta.count("texts", texts.len());
    meta.write_for(&a.output)?;
    Ok(())
}

pub fn profile(ctx: &Ctx, a: ProfileArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("profile", ctx.seed);
    let utterances = read_texts(&a.input, "utterances", &mut meta)?;
    let scorer = open_scorer(&a.scorer, &mut meta)?;
    let p = profile_speaker(&utterances, &*scorer)?;
    write(&a.output, format_profile(&p))?;
    let radar = a.radar.unwrap_or_else(|| sidecar_path(&a.output, "radar.tsv"));
    write(&radar, format_radar(&p.profile))?;
    meta.count("utterances", utterances.len());
    meta.write_for(&a.output)?;
    Ok(())
}

pub fn reward(ctx: &Ctx, a: RewardArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("reward", ctx.seed);
    let persona = read_texts(&a.persona, "persona sentences", &mut meta)?;
    let utterances = read_texts(&a.utterances, "utterances", &mut meta)?;
    let scorer = open_scorer(&a.scorer, &mut meta)?;
    let outcome = compute_reward(&persona, &utterances, &*scorer, a.clamp_terms)?;
    write(&a.output, format_reward_trace(&outcome.result, &utterances))?;
    println!("{}", outcome.reward());
    meta.param("clamp_terms", a.clamp_terms);
    meta.count("persona", persona.len());
    meta.count("turns", utterances.len());
    meta.count("reward", outcome.reward());
    meta.write_for(&a.output)?;
    Ok(())
}

pub fn rerank(ctx: &Ctx, a: RerankArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("rerank", ctx.seed);
    let persona = read_texts(&a.persona, "persona sentences", &mut meta)?;
    let prior = match &a.prior {
        Some(p) => {
            meta.input(p)?;
            read_lines(p)?
        }
        None => Vec::new(),
    };
    let candidates = read_texts(&a.candidates, "candidates", &mut meta)?;
    let scorer = open_scorer(&a.scorer, &mut meta)?;
    let persona = PersonaProfile::build(&persona, &*scorer)?;
    let trace = if prior.is_empty() {
        DialogueTrace::default()
    } else {
        DialogueTrace::build(&prior, &*scorer)?
    };
    let ranked = rerank_candidates(&persona, &trace, &candidates, &*scorer, a.clamp_terms)?;
    write(&a.output, format_ranking(&ranked))?;
    meta.param("clamp_terms", a.clamp_terms);
    meta.count("prior_turns", prior.len());
    meta.count("candidates", candidates.len());
    meta.write_for(&a.output)?;
    Ok(())
}

pub fn serve(ctx: &Ctx, a: ServeArgs) -> anyhow::Result<()> {
    let file = &ctx.file.serve;
    let bind = a.bind.or_else(|| file.bind.clone()).unwrap_or_else(|| DEFAULT_BIND.into());
    let bind: SocketAddr = bind.parse().map_err(|_| usage(format!("invalid bind address `{bind}`")))?;
    let mut config = ServeConfig::new(bind, &a.model);
    config.body_limit = a.body_limit.or(file.body_limit).unwrap_or(DEFAULT_BODY_LIMIT);
    config.concurrency = a.concurrency.or(file.concurrency).unwrap_or(DEFAULT_CONCURRENCY);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting runtime")?;
    rt.block_on(async move {
        let server = Server::bind(&config).await?;
        eprintln!("serving on http://{}", server.local_addr()?);
        server
            .run(async {
                let _ = tokio::signal::ctrl_c().await;
                log::info!("interrupted, shutting down");
            })
            .await?;
        Ok(())
    })
}
