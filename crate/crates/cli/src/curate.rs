use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use valuekit_core::curation::io::{
    read_annotations, read_mapped_csv, read_samples, read_scenarios, write_samples, CsvMapping,
};
use valuekit_core::curation::{
    aggregate_annotations, agreement_report, expand_lexicon_associations, expand_lexicon_embedding,
    group_annotations, make_augmented, make_balanced, split_dataset, AssociationClient, ClientConfig,
    DroppedGroup, EmbeddingTable, Lexicon, LexiconMatcher, DEFAULT_RATIOS,
};
use valuekit_core::reward::escape_field;
use valuekit_core::AnnotatedSample;

use crate::args::*;
use crate::meta::{sidecar_path, RunMeta};
use crate::text_io::write;
use crate::{usage, Ctx};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_MIN_SIM: f64 = 0.6;
pub const DEFAULT_PER_KEYWORD: usize = 10;
pub const DEFAULT_MIN_AGREE: u32 = 3;
pub const DEFAULT_CACHE_DIR: &str = ".valuekit-cache/associations";

pub fn run(ctx: &Ctx, cmd: Curate) -> anyhow::Result<()> {
    match cmd {
        Curate::Match(a) => match_cmd(ctx, a),
        Curate::Expand(a) => expand(ctx, a),
        Curate::Associations(a) => associations(ctx, a),
        Curate::Aggregate(a) => aggregate(ctx, a),
        Curate::Kappa(a) => kappa(ctx, a),
        Curate::Split(a) => split(ctx, a),
        Curate::Balance(a) => balance(ctx, a),
        Curate::Augment(a) => augment(ctx, a),
        Curate::ImportCsv(a) => import_csv(ctx, a),
    }
}

fn load_lexicon(path: Option<&Path>, meta: &mut RunMeta) -> anyhow::Result<Lexicon> {
    match path {
        Some(p) => {
            meta.input(p)?;
            Ok(Lexicon::load(p)?)
        }
        None => {
            let lex = Lexicon::builtin();
            meta.input_bytes("<builtin lexicon>", lex.to_text().as_bytes());
            Ok(lex)
        }
    }
}

fn label_counts(samples: &[AnnotatedSample]) -> [usize; 3] {
    let mut c = [0; 3];
    for s in samples {
        c[(s.label + 1) as usize] += 1;
    }
    c
}

fn sample_counts(meta: &mut RunMeta, key: &str, samples: &[AnnotatedSample]) {
    let [neg, neu, pos] = label_counts(samples);
    meta.count(key, samples.len());
    meta.count(&format!("{key}_labels"), serde_json::json!({"-1": neg, "0": neu, "1": pos}));
}

fn match_cmd(ctx: &Ctx, a: MatchArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("curate match", ctx.seed);
    meta.input(&a.input)?;
    let scenarios = read_scenarios(&a.input)?;
    let lexicon = load_lexicon(a.lexicon.as_deref(), &mut meta)?;
    let matcher = LexiconMatcher::new(&lexicon);
    let mut out = String::from("id\tdimensions\n");
    let mut matched = 0;
    for s in &scenarios {
        let dims = matcher.match_text(&s.text);
        if !dims.is_empty() {
            matched += 1;
        }
        let codes: Vec<&str> = dims.iter().map(|d| d.code()).collect();
        writeln!(out, "{}\t{}", escape_field(&s.id), codes.join(","))?;
    }
    write(&a.output, out)?;
    meta.count("scenarios", scenarios.len());
    meta.count("matched", matched);
    meta.write_for(&a.output)?;
    Ok(())
}

fn expand(ctx: &Ctx, a: ExpandArgs) -> anyhow::Result<()> {
    let k = a.k.or(ctx.file.expand.k).unwrap_or(DEFAULT_K);
    let min_sim = a.min_sim.or(ctx.file.expand.min_sim).unwrap_or(DEFAULT_MIN_SIM);
    let mut meta = RunMeta::new("curate expand", ctx.seed);
    let lexicon = load_lexicon(a.lexicon.as_deref(), &mut meta)?;
    meta.input(&a.embeddings)?;
    let table = EmbeddingTable::load(&a.embeddings)?;
    let (expanded, report) = expand_lexicon_embedding(&lexicon, &table, k, min_sim)?;
    expanded.save(&a.output)?;
    meta.param("k", k);
    meta.param("min_sim", min_sim);
    meta.count("added", report.added.len());
    meta.count(
        "missing_keywords",
        report.missing.iter().map(|(d, w)| format!("{d}:{w}")).collect::<Vec<_>>(),
    );
    meta.write_for(&a.output)?;
    Ok(())
}

fn associations(ctx: &Ctx, a: AssociationsArgs) -> anyhow::Result<()> {
    let file = &ctx.file.associations;
    let per_keyword = a.per_keyword.or(file.per_keyword).unwrap_or(DEFAULT_PER_KEYWORD);
    let cache_dir = a
        .cache_dir
        .or_else(|| file.cache_dir.clone())
        .unwrap_or_else(|| DEFAULT_CACHE_DIR.into());
    let mut cfg = ClientConfig::new(&cache_dir);
    if let Some(url) = a.endpoint.or_else(|| file.endpoint.clone()) {
        cfg.base_url = url;
    }
    if let Some(secs) = a.timeout.or(file.timeout) {
        cfg.timeout = Duration::try_from_secs_f64(secs).map_err(|_| usage(format!("invalid timeout {secs}")))?;
    }
    let mut meta = RunMeta::new("curate associations", ctx.seed);
    let lexicon = load_lexicon(a.lexicon.as_deref(), &mut meta)?;
    meta.param("endpoint", &cfg.base_url);
    meta.param("per_keyword", per_keyword);
    let client = AssociationClient::new(cfg);
    let (expanded, added) = expand_lexicon_associations(&lexicon, &client, per_keyword)?;
    expanded.save(&a.output)?;
    meta.count("added", added.len());
    meta.write_for(&a.output)?;
    Ok(())
}

fn format_dropped(dropped: &[DroppedGroup]) -> String {
    let mut out = String::from("scenario_id\tdimension\tvotes\tmodal_count\treason\n");
    for d in dropped {
        let votes: Vec<&str> = d.votes.iter().map(|v| v.as_str()).collect();
        let reason = serde_json::to_value(d.reason).ok();
        let reason = reason.as_ref().and_then(|v| v.as_str()).unwrap_or("");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            escape_field(&d.scenario_id),
            d.dimension,
            votes.join(","),
            d.modal_count,
            reason
        );
    }
    out
}

fn aggregate(ctx: &Ctx, a: AggregateArgs) -> anyhow::Result<()> {
    let min_agree = a
        .min_agree
        .or(ctx.file.aggregate.min_agree)
        .unwrap_or(DEFAULT_MIN_AGREE);
    let mut meta = RunMeta::new("curate aggregate", ctx.seed);
    meta.input(&a.input)?;
    let annotations = read_annotations(&a.input)?;
    let agg = aggregate_annotations(&annotations, min_agree)?;
    write_samples(&a.output, &agg.samples)?;
    let dropped_path = a.dropped.unwrap_or_else(|| sidecar_path(&a.output, "dropped.tsv"));
    write(&dropped_path, format_dropped(&agg.dropped))?;
    meta.param("min_agree", min_agree);
    meta.count("annotations", annotations.len());
    sample_counts(&mut meta, "samples", &agg.samples);
    meta.count("dropped", agg.dropped.len());
    meta.count("dropped_report", dropped_path.display().to_string());
    meta.write_for(&a.output)?;
    Ok(())
}

fn kappa(ctx: &Ctx, a: KappaArgs) -> anyhow::Result<()> {
    let annotations = read_annotations(&a.input)?;
    let groups = group_annotations(&annotations)?;
    let report = agreement_report(&groups)?;
    println!("{:.4}", report.fleiss_kappa);
    if let Some(out) = &a.output {
        let mut meta = RunMeta::new("curate kappa", ctx.seed);
        meta.input(&a.input)?;
        write(out, serde_json::to_string_pretty(&report)? + "\n")?;
        meta.count("items", groups.len());
        meta.count("fleiss_kappa", report.fleiss_kappa);
        meta.count("raw_agreement", report.raw_agreement);
        meta.write_for(out)?;
    }
    Ok(())
}

fn split(ctx: &Ctx, a: SplitArgs) -> anyhow::Result<()> {
    let ratios = match a.ratios {
        Some(v) => [v[0], v[1], v[2]],
        None => ctx.file.split.ratios.unwrap_or(DEFAULT_RATIOS),
    };
    let mut meta = RunMeta::new("curate split", ctx.seed);
    meta.input(&a.input)?;
    let samples = read_samples(&a.input)?;
    let split = split_dataset(&samples, ratios, ctx.seed)?;
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for (name, part) in [("train", &split.train), ("valid", &split.valid), ("test", &split.test)] {
        write_samples(&a.out_dir.join(format!("{name}.jsonl")), part)?;
        sample_counts(&mut meta, name, part);
    }
    meta.param("ratios", ratios);
    meta.write_for(&a.out_dir.join("split"))?;
    let (tr, va, te) = split.counts();
    println!("{tr} / {va} / {te}");
    Ok(())
}

fn balance(ctx: &Ctx, a: BalanceArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("curate balance", ctx.seed);
    meta.input(&a.input)?;
    let samples = read_samples(&a.input)?;
    let balanced = make_balanced(&samples, ctx.seed)?;
    write_samples(&a.output, &balanced)?;
    sample_counts(&mut meta, "input", &samples);
    sample_counts(&mut meta, "samples", &balanced);
    meta.write_for(&a.output)?;
    Ok(())
}

fn augment(ctx: &Ctx, a: AugmentArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("curate augment", ctx.seed);
    meta.input(&a.input)?;
    let annotations = read_annotations(&a.input)?;
    let samples = make_augmented(&annotations)?;
    write_samples(&a.output, &samples)?;
    meta.count("annotations", annotations.len());
    sample_counts(&mut meta, "samples", &samples);
    meta.write_for(&a.output)?;
    Ok(())
}

fn import_csv(ctx: &Ctx, a: ImportCsvArgs) -> anyhow::Result<()> {
    let mut meta = RunMeta::new("curate import-csv", ctx.seed);
    let mapping: CsvMapping = match &a.mapping {
        Some(p) => {
            meta.input(p)?;
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => ctx
            .file
            .import
            .clone()
            .ok_or_else(|| usage("no column mapping: pass --mapping or an [import] table in --config"))?,
    };
    meta.input(&a.input)?;
    let samples = read_mapped_csv(&a.input, &mapping)?;
    write_samples(&a.output, &samples)?;
    meta.param("mapping", &mapping);
    sample_counts(&mut meta, "samples", &samples);
    meta.write_for(&a.output)?;
    Ok(())
}
