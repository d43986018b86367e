use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use gcm_core::degree_model::PartitionReport;
use gcm_core::degree_model::Repair;
use gcm_core::{DistributionSpec, Error, PreparedModel};
use serde::Serialize;

use crate::config::ModelArgs;
use crate::output::{write_edge_list, write_json};
use crate::{Outcome, Stage};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Edge-list output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metadata path (default: the edge-list path with `.json` appended)
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Metadata {
    n: usize,
    requested_n: usize,
    m: usize,
    b: usize,
    q: f64,
    h: Vec<usize>,
    mode: String,
    seed: u64,
    self_loops: usize,
    multiedges: usize,
    repair: Repair,
    distribution: DistributionSpec,
    partition: PartitionReport,
}

pub fn run(args: GenerateArgs) -> Outcome {
    let cfg = args.model.merged().config()?;
    let model = cfg.resolve_model().config()?;
    let n = cfg.n.ok_or_else(|| anyhow!("--n is required")).config()?;
    let q = cfg.q_or_default().config()?;
    let out = args
        .out
        .or(cfg.output.clone())
        .ok_or_else(|| anyhow!("--out is required"))
        .config()?;
    if !model.h.is_involution() {
        return Err(Error::NotInvolution).config();
    }
    let seed = cfg.seed_or_default();
    let prepared = PreparedModel::from_partition(model.partition.clone(), n, q, model.h.clone()).config()?;
    let graph = prepared.generate(seed).runtime()?;

    let meta_path = args.meta.unwrap_or_else(|| {
        let mut p = out.clone().into_os_string();
        p.push(".json");
        p.into()
    });
    write_edge_list(&graph, &out).runtime()?;
    let meta = Metadata {
        n: graph.n,
        requested_n: n,
        m: graph.m(),
        b: graph.b,
        q,
        h: model.h.one_based(),
        mode: model.label,
        seed,
        self_loops: graph.self_loops(),
        multiedges: graph.multiedges(),
        repair: prepared.sequence.repair.clone(),
        distribution: model.spec,
        partition: model.partition.report(),
    };
    write_json(&meta, &meta_path).runtime()?;
    println!(
        "wrote {} ({} vertices, {} edges) and {}",
        out.display(),
        graph.n,
        graph.m(),
        meta_path.display()
    );
    Ok(())
}
