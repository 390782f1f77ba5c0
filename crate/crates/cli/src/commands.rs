// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hopcov_core::dataset::{load_json_dataset, load_tu_dataset};
use hopcov_core::fingerprint::fingerprint_dataset;
use hopcov_core::learn::evaluate_protocol;
use hopcov_core::stats::{
    companion_path, friedman_test, nemenyi_cd, significance_diagram, AccuracyTable,
};
use hopcov_core::{CdConvention, Dataset, FeatureMatrix, FingerprintConfig, ProtocolConfig};
use serde::Serialize;

use crate::artifact::{
    hash_input, meta_path, output_path, write_atomic, write_json, FingerprintSettings, InputSpec,
    RunConfig, StatsSettings,
};
use crate::{Cli, Command, Convention, FeatureArgs, Format};

// Propagates stdout errors (e.g. a closed pipe) instead of panicking.
macro_rules! out {
    ($($t:tt)*) => { write!(std::io::stdout(), $($t)*)? };
}
macro_rules! outln {
    ($($t:tt)*) => { writeln!(std::io::stdout(), $($t)*)? };
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut config = RunConfig {
        subcommand: "",
        input: None,
        fingerprint: None,
        evaluation: None,
        stats: None,
        outputs: Vec::new(),
        threads: cli.threads,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Summarize { input, json } => {
            config.subcommand = "summarize";
            let spec = input_spec(
                input.source.dir.as_deref(),
                input.source.file.as_deref(),
                input.format,
                input.name.as_deref(),
            )?;
            let dataset = load(&spec)?;
            let s = dataset.summarize();
            if *json {
                outln!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                outln!(
                    "{:<16} {:>8} {:>8} {:>11} {:>10} {:>10}",
                    "dataset",
                    "graphs",
                    "classes",
                    "categories",
                    "avg nodes",
                    "avg edges"
                );
                outln!(
                    "{:<16} {:>8} {:>8} {:>11} {:>10.2} {:>10.2}",
                    s.name,
                    s.num_graphs,
                    s.num_classes,
                    s.num_node_categories
                        .map_or("--".to_string(), |k| k.to_string()),
                    s.mean_nodes,
                    s.mean_edges
                );
            }
            Ok(())
        }
        Command::Extract {
            input,
            features,
            out,
        } => {
            config.subcommand = "extract";
            let spec = input_spec(
                input.source.dir.as_deref(),
                input.source.file.as_deref(),
                input.format,
                input.name.as_deref(),
            )?;
            let (cfg, settings) = fingerprint_config(features, Some(&spec.name))?;
            let out = output_path(
                out.as_deref(),
                &format!("{}_features.csv", spec.name.to_lowercase()),
            );
            config.fingerprint = Some(settings);
            config.outputs = vec![out.clone(), meta_path(&out)];
            config.input = Some(spec.clone());

            let dataset = load(&spec)?;
            let matrix = fingerprint_dataset(&dataset, &cfg)?;
            write_atomic(&out, matrix.to_csv_string().as_bytes())?;
            #[derive(Serialize)]
            struct ExtractResult<'a> {
                dimension: usize,
                rows: usize,
                feature_names: &'a [String],
                class_alphabet: &'a [String],
            }
            write_json(
                &meta_path(&out),
                &config,
                &hash_input(&spec.path)?,
                &ExtractResult {
                    dimension: matrix.num_features(),
                    rows: matrix.rows.len(),
                    feature_names: &matrix.names,
                    class_alphabet: &matrix.class_alphabet,
                },
            )?;
            outln!("dimension: {}", matrix.num_features());
            outln!("wrote {} ({} rows)", out.display(), matrix.rows.len());
            Ok(())
        }
        Command::Evaluate {
            features_csv,
            input,
            features,
            folds,
            repeats,
            split,
            trees,
            out,
        } => {
            config.subcommand = "evaluate";
            let protocol = ProtocolConfig {
                trees_grid: trees.clone(),
                repeats: *repeats,
                folds: *folds,
                split_fraction: *split,
                master_seed: cli.seed,
            };
            protocol.validate()?;
            config.evaluation = Some(protocol.clone());

            let (matrix, name, input_path) = if let Some(csv) = features_csv {
                let name = stem(csv);
                config.input = Some(InputSpec {
                    path: csv.clone(),
                    format: None,
                    name: name.clone(),
                });
                let file = File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
                (
                    FeatureMatrix::read_csv(BufReader::new(file), csv)?,
                    name,
                    csv.clone(),
                )
            } else {
                let spec = input_spec(
                    input.dir.as_deref(),
                    input.file.as_deref(),
                    input.format,
                    input.name.as_deref(),
                )?;
                let (cfg, settings) = fingerprint_config(features, Some(&spec.name))?;
                config.fingerprint = Some(settings);
                config.input = Some(spec.clone());
                let dataset = load(&spec)?;
                (
                    fingerprint_dataset(&dataset, &cfg)?,
                    spec.name.clone(),
                    spec.path.clone(),
                )
            };
            let out = output_path(
                out.as_deref(),
                &format!("{}_evaluation.json", name.to_lowercase()),
            );
            config.outputs = vec![out.clone()];

            let report = evaluate_protocol(
                &matrix.rows,
                &matrix.classes,
                &matrix.class_alphabet,
                &protocol,
            )?;
            write_json(&out, &config, &hash_input(&input_path)?, &report)?;
            out!("{}", report.to_table());
            outln!("wrote {}", out.display());
            Ok(())
        }
        Command::Compare {
            table,
            alpha,
            convention,
            algorithms,
            out,
            svg,
        } => {
            config.subcommand = "compare";
            let convention = match convention {
                Convention::Demsar => CdConvention::Demsar,
                Convention::Paper => CdConvention::Paper,
            };
            if !(*alpha == 0.05 || *alpha == 0.10) {
                bail!("--alpha must be 0.05 or 0.10");
            }
            let name = stem(table);
            let out = output_path(
                out.as_deref(),
                &format!("{}_comparison.json", name.to_lowercase()),
            );
            config.input = Some(InputSpec {
                path: table.clone(),
                format: None,
                name,
            });
            config.stats = Some(StatsSettings {
                alpha: *alpha,
                convention,
                algorithms: algorithms.clone(),
            });
            config.outputs = vec![out.clone()];
            if let Some(svg) = svg {
                config
                    .outputs
                    .extend([svg.clone(), companion_path(svg), meta_path(svg)]);
            }

            let full = AccuracyTable::read_csv(table)?;
            let t = match algorithms {
                Some(names) => {
                    let names: Vec<&str> = names.iter().map(String::as_str).collect();
                    full.select(&names)?
                }
                None => full.complete_columns(),
            };
            let friedman = friedman_test(&t)?;
            let nemenyi = nemenyi_cd(t.num_algorithms(), t.num_datasets(), *alpha, convention)?;
            let hash = hash_input(table)?;
            let diagram = match svg {
                Some(svg) => {
                    let d = significance_diagram(&friedman, &nemenyi, svg)?;
                    write_json(&meta_path(svg), &config, &hash, &d)?;
                    Some(d)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct CompareResult<'a> {
                datasets: &'a [String],
                friedman: &'a hopcov_core::FriedmanResult,
                nemenyi: &'a hopcov_core::NemenyiResult,
                diagram: Option<&'a hopcov_core::stats::DiagramData>,
            }
            write_json(
                &out,
                &config,
                &hash,
                &CompareResult {
                    datasets: &t.datasets,
                    friedman: &friedman,
                    nemenyi: &nemenyi,
                    diagram: diagram.as_ref(),
                },
            )?;

            outln!(
                "algorithms: {}  datasets: {}",
                t.num_algorithms(),
                t.num_datasets()
            );
            let mut order: Vec<usize> = (0..friedman.algorithms.len()).collect();
            order.sort_by(|&a, &b| friedman.average_ranks[a].total_cmp(&friedman.average_ranks[b]));
            for j in order {
                outln!(
                    "  {:<16} {:.3}",
                    friedman.algorithms[j],
                    friedman.average_ranks[j]
                );
            }
            outln!(
                "Friedman Q = {:.4}, p = {:.6}",
                friedman.q,
                friedman.p_value
            );
            outln!(
                "Nemenyi CD = {:.4} (alpha = {}, q = {:.4}, convention = {})",
                nemenyi.cd,
                nemenyi.alpha,
                nemenyi.q_value,
                nemenyi.convention
            );
            outln!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

fn input_spec(
    dir: Option<&Path>,
    file: Option<&Path>,
    format: Option<Format>,
    name: Option<&str>,
) -> Result<InputSpec> {
    let (path, default_format) = match (dir, file) {
        (Some(d), None) => (d.to_path_buf(), Format::Tu),
        (None, Some(f)) => (f.to_path_buf(), Format::Json),
        (Some(_), Some(_)) => bail!("give either --dir or --file, not both"),
        (None, None) => bail!("an input is required: --dir (TU directory) or --file (JSON)"),
    };
    let name = match name {
        Some(n) => n.to_string(),
        None => {
            let base = if path.is_dir() {
                path.canonicalize().unwrap_or_else(|_| path.clone())
            } else {
                path.clone()
            };
            stem(&base)
        }
    };
    Ok(InputSpec {
        path,
        format: Some(format.unwrap_or(default_format)),
        name,
    })
}

fn load(spec: &InputSpec) -> Result<Dataset> {
    let path: &PathBuf = &spec.path;
    Ok(match spec.format {
        Some(Format::Json) => load_json_dataset(path)?,
        _ => {
            if !path.is_dir() {
                return Err(hopcov_core::Error::MissingFile(path.clone()).into());
            }
            load_tu_dataset(path, &spec.name)?
        }
    })
}

/// Preset (explicit, or matching the dataset name), overridden by flags.
fn fingerprint_config(
    args: &FeatureArgs,
    dataset: Option<&str>,
) -> Result<(FingerprintConfig, FingerprintSettings)> {
    let base = match &args.preset {
        Some(p) => {
            Some(FingerprintConfig::preset(p).with_context(|| format!("unknown preset {p:?}"))?)
        }
        None => dataset.and_then(FingerprintConfig::preset),
    }
    .unwrap_or_default();
    let ids: Vec<u8> = args
        .features
        .clone()
        .unwrap_or_else(|| base.feature_ids.iter().copied().collect());
    let cfg = FingerprintConfig::new(
        ids.iter().copied(),
        args.eigenvectors.unwrap_or(base.num_eigenvectors),
        args.hops.unwrap_or(base.max_hop),
    );
    cfg.validate()?;
    let settings = FingerprintSettings {
        preset: args.preset.clone(),
        features: cfg.feature_ids.iter().copied().collect(),
        eigenvectors: cfg.num_eigenvectors,
        hops: cfg.max_hop,
    };
    Ok((cfg, settings))
}
