//! CSV tables and the JSON summary written next to them.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::preprocess::CorpusRecord;
use crate::experiments::{ConvergenceRecord, Outcome};
use crate::rates::Rate;

/// One CSV row of a convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRow<'a> {
    pub mode: &'a str,
    pub constraints: &'a str,
    pub level: usize,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "Linf")]
    pub linf: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    pub t_basis: f64,
    pub t_assembly: f64,
    pub t_solve: f64,
    pub nnz: usize,
    pub seed: u64,
}

pub fn level_rows(records: &[ConvergenceRecord], seed: u64) -> Vec<LevelRow<'_>> {
    records
        .iter()
        .flat_map(|r| {
            r.levels.iter().map(move |l| LevelRow {
                mode: &r.mode,
                constraints: &r.constraints,
                level: l.level,
                h: l.h,
                n: l.n_dofs,
                l2: l.l2,
                linf: l.linf,
                h1: l.h1,
                t_basis: l.t_basis,
                t_assembly: l.t_assembly,
                t_solve: l.t_solve,
                nnz: l.nnz,
                seed,
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RateSummary<'a> {
    pub mode: &'a str,
    pub constraints: &'a str,
    pub l2: &'a Rate,
    pub linf: &'a Rate,
    pub h1: &'a Rate,
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rates: Vec<RateSummary<'a>>,
    #[serde(flatten)]
    outcome: &'a Outcome,
}

fn rates(records: &[ConvergenceRecord]) -> Vec<RateSummary<'_>> {
    records
        .iter()
        .map(|r| RateSummary { mode: &r.mode, constraints: &r.constraints, l2: &r.l2, linf: &r.linf, h1: &r.h1 })
        .collect()
}

/// Writes `<name>.csv` (plus `<name>_translation.csv` for elasticity) and
/// `<name>_summary.json` into `dir`; returns the written paths.
pub fn write_outcome(dir: &Path, config: &ExperimentConfig, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let seed = config.seed;
    let mut written = Vec::new();
    let mut csv_at = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    let (name, summary_rates) = match outcome {
        Outcome::Convergence(r) => {
            write_csv(&csv_at("convergence.csv"), &level_rows(r, seed))?;
            ("convergence", rates(r))
        }
        Outcome::Ablation(r) => {
            write_csv(&csv_at("ablation.csv"), &level_rows(r, seed))?;
            ("ablation", rates(r))
        }
        Outcome::Conditioning(r) => {
            #[derive(Serialize)]
            struct Row<'a> {
                level: usize,
                n: usize,
                mode: &'a str,
                polygons: bool,
                n_polygons: usize,
                n_dofs: usize,
                condition: f64,
                seed: u64,
            }
            let rows: Vec<Row> = r
                .iter()
                .map(|c| Row {
                    level: c.level,
                    n: c.n,
                    mode: &c.mode,
                    polygons: c.polygons,
                    n_polygons: c.n_polygons,
                    n_dofs: c.n_dofs,
                    condition: c.condition,
                    seed,
                })
                .collect();
            write_csv(&csv_at("conditioning.csv"), &rows)?;
            ("conditioning", Vec::new())
        }
        Outcome::Resilience(r) => {
            write_csv(&csv_at("resilience.csv"), r)?;
            ("resilience", Vec::new())
        }
        Outcome::Elasticity(rep) => {
            write_csv(&csv_at("elasticity.csv"), &level_rows(&rep.convergence, seed))?;
            #[derive(Serialize)]
            struct Row {
                level: usize,
                linf: f64,
            }
            let rows: Vec<Row> = rep.translation_error.iter().enumerate().map(|(level, &linf)| Row { level, linf }).collect();
            write_csv(&csv_at("elasticity_translation.csv"), &rows)?;
            ("elasticity", rates(&rep.convergence))
        }
    };
    let summary = Summary { seed, config, rates: summary_rates, outcome };
    let path = dir.join(format!("{name}_summary.json"));
    write_json(&path, &summary)?;
    written.push(path);
    Ok(written)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

pub fn write_corpus(dir: &Path, seed: u64, records: &[CorpusRecord]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("preprocess.csv");
    write_csv(&csv, records)?;
    let json = dir.join("preprocess_summary.json");
    #[derive(Serialize)]
    struct S<'a> {
        seed: u64,
        meshes: usize,
        all_separated: bool,
        all_star_shaped: bool,
        max_merge_iterations: usize,
        max_area_error: f64,
        records: &'a [CorpusRecord],
    }
    write_json(
        &json,
        &S {
            seed,
            meshes: records.len(),
            all_separated: records.iter().all(|r| r.separated),
            all_star_shaped: records.iter().all(|r| r.star_shaped),
            max_merge_iterations: records.iter().map(|r| r.max_merge_iterations).max().unwrap_or(0),
            max_area_error: records.iter().map(|r| r.area_error).fold(0.0, f64::max),
            records,
        },
    )?;
    Ok(vec![csv, json])
}
