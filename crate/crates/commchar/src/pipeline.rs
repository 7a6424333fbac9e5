//! Stage driver.
//!
//! Output directory layout:
//!
//! ```text
//! communities.csv   measures.csv   database.txt   patterns.tsv
//! reports/community_<id>.json      summary.txt
//! config.toml       manifest.json
//! ```
//!
//! A stage reads what it needs from memory when an earlier stage ran in the
//! same invocation and from the output directory otherwise, so stages can be
//! run one at a time or resumed. Files of a stage are written under
//! temporary names and renamed only when the whole stage succeeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use commchar_core::{
    build_report, filter_small, louvain, mine_closed_with, modularity, split_by_class,
    CommunityReport, CommunityStructure, DescriptorSet, DynamicNetwork, MeasureTable,
    MinedPattern, SequenceDatabase,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{PipelineConfig, Stage};
use crate::error::{Error, Result};
use crate::io;
use crate::report;

pub const COMMUNITIES: &str = "communities.csv";
pub const MEASURES: &str = "measures.csv";
pub const DATABASE: &str = "database.txt";
pub const PATTERNS: &str = "patterns.tsv";
pub const REPORTS: &str = "reports";
pub const SUMMARY: &str = "summary.txt";
pub const CONFIG: &str = "config.toml";
pub const MANIFEST: &str = "manifest.json";

fn stage_outputs(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::Communities => &[COMMUNITIES],
        Stage::Measures => &[MEASURES],
        Stage::Mine => &[DATABASE, PATTERNS],
        Stage::Characterize => &[REPORTS, SUMMARY],
    }
}

pub fn report_file(community: usize) -> String {
    format!("community_{community}.json")
}

/// Files written by one stage, committed together.
struct Staged {
    dir: PathBuf,
    pending: Vec<(PathBuf, PathBuf)>,
}

impl Staged {
    fn new(dir: &Path) -> Self {
        Staged {
            dir: dir.to_path_buf(),
            pending: Vec::new(),
        }
    }

    /// Temporary path standing in for `name` until commit.
    fn path(&mut self, name: &str) -> PathBuf {
        let tmp = self.dir.join(format!(".{name}.partial"));
        self.pending.push((tmp.clone(), self.dir.join(name)));
        tmp
    }

    fn commit(mut self) -> Result<()> {
        for (tmp, dest) in std::mem::take(&mut self.pending) {
            if dest.is_dir() {
                fs::remove_dir_all(&dest).map_err(|e| Error::io(&dest, e))?;
            }
            fs::rename(&tmp, &dest).map_err(|e| Error::io(&dest, e))?;
        }
        Ok(())
    }
}

impl Drop for Staged {
    fn drop(&mut self) {
        for (tmp, _) in &self.pending {
            let _ = if tmp.is_dir() {
                fs::remove_dir_all(tmp)
            } else {
                fs::remove_file(tmp)
            };
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub name: &'static str,
    /// `ran` or `resumed`.
    pub status: &'static str,
    pub seconds: f64,
    pub outputs: Vec<&'static str>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct NetworkInfo {
    pub nodes: usize,
    pub slices: usize,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub config: &'static str,
    pub network: Option<NetworkInfo>,
    pub communities: Option<usize>,
    pub modularity: Option<f64>,
    pub patterns: Option<usize>,
    pub characterized: Option<usize>,
    pub stages: Vec<StageRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            tool: "commchar",
            version: env!("CARGO_PKG_VERSION"),
            core_version: commchar_core::VERSION,
            config: CONFIG,
            network: None,
            communities: None,
            modularity: None,
            patterns: None,
            characterized: None,
            stages: Vec::new(),
        }
    }
}

/// State shared by the stages of one invocation.
pub struct Pipeline<'a> {
    cfg: &'a PipelineConfig,
    resume: bool,
    net: Option<DynamicNetwork>,
    comm: Option<CommunityStructure>,
    measures: Option<MeasureTable>,
    specs: Option<DescriptorSet>,
    db: Option<SequenceDatabase>,
    patterns: Option<Vec<MinedPattern>>,
    reports: Vec<CommunityReport>,
    manifest: Manifest,
}

impl<'a> Pipeline<'a> {
    pub fn new(cfg: &'a PipelineConfig, resume: bool) -> Self {
        Pipeline {
            cfg,
            resume,
            net: None,
            comm: None,
            measures: None,
            specs: None,
            db: None,
            patterns: None,
            reports: Vec::new(),
            manifest: Manifest::default(),
        }
    }

    fn out(&self) -> &Path {
        &self.cfg.out
    }

    fn existing(&self, name: &str, stage: Stage) -> Result<PathBuf> {
        let p = self.out().join(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(Error::Usage(format!(
                "{} not found; run the `{}` stage first",
                p.display(),
                stage.name()
            )))
        }
    }

    pub fn network(&mut self) -> Result<&DynamicNetwork> {
        if self.net.is_none() {
            let edges = self.cfg.edges.as_deref().ok_or_else(|| {
                Error::Usage("no edge file given (--edges or `edges` in the config)".to_string())
            })?;
            let net = io::load_network(edges, self.cfg.attrs.as_deref())?;
            log::info!("network: {} nodes, {} slices", net.n(), net.slices());
            self.manifest.network = Some(NetworkInfo {
                nodes: net.n(),
                slices: net.slices(),
                attributes: net.attribute_names().to_vec(),
            });
            self.net = Some(net);
        }
        Ok(self.net.as_ref().unwrap())
    }

    fn specs(&mut self) -> Result<&DescriptorSet> {
        if self.specs.is_none() {
            let names = self.network()?.attribute_names().to_vec();
            self.specs = Some(self.cfg.descriptor_set(&names)?);
        }
        Ok(self.specs.as_ref().unwrap())
    }

    fn communities(&mut self) -> Result<&CommunityStructure> {
        if self.comm.is_none() {
            let path = self.existing(COMMUNITIES, Stage::Communities)?;
            let comm = io::read_communities(&path, self.network()?)?;
            self.comm = Some(comm);
        }
        Ok(self.comm.as_ref().unwrap())
    }

    fn measures(&mut self) -> Result<&MeasureTable> {
        if self.measures.is_none() {
            let path = self.existing(MEASURES, Stage::Measures)?;
            let table = io::read_measures(&path, self.network()?)?;
            self.measures = Some(table);
        }
        Ok(self.measures.as_ref().unwrap())
    }

    fn database(&mut self) -> Result<&SequenceDatabase> {
        if self.db.is_none() {
            let path = self.existing(DATABASE, Stage::Mine)?;
            self.specs()?;
            let db = io::read_database(&path, self.net.as_ref().unwrap(), self.specs.as_ref().unwrap())?;
            self.db = Some(db);
        }
        Ok(self.db.as_ref().unwrap())
    }

    fn patterns(&mut self) -> Result<&[MinedPattern]> {
        if self.patterns.is_none() {
            let path = self.existing(PATTERNS, Stage::Mine)?;
            let patterns = io::read_patterns(&path, self.specs()?)?;
            self.patterns = Some(patterns);
        }
        Ok(self.patterns.as_deref().unwrap())
    }

    /// Runs `stages` in pipeline order and writes the config echo and the
    /// manifest.
    pub fn run(&mut self, stages: &[Stage]) -> Result<()> {
        fs::create_dir_all(self.out()).map_err(|e| Error::io(self.out(), e))?;
        let mut stages = stages.to_vec();
        stages.sort();
        stages.dedup();
        for stage in stages {
            let start = Instant::now();
            let outputs = stage_outputs(stage);
            let done = self.resume && outputs.iter().all(|o| self.out().join(o).exists());
            if done {
                log::info!("stage {}: outputs present, skipped", stage.name());
            } else {
                log::info!("stage {}", stage.name());
                self.run_stage(stage).map_err(|e| Error::Stage {
                    stage: stage.name(),
                    source: Box::new(e),
                })?;
            }
            self.manifest.stages.push(StageRecord {
                name: stage.name(),
                status: if done { "resumed" } else { "ran" },
                seconds: start.elapsed().as_secs_f64(),
                outputs: outputs.to_vec(),
            });
        }
        let mut staged = Staged::new(self.out());
        let cfg_path = staged.path(CONFIG);
        fs::write(&cfg_path, self.cfg.to_toml()).map_err(|e| Error::io(&cfg_path, e))?;
        let manifest_path = staged.path(MANIFEST);
        let mut json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        json.push('\n');
        fs::write(&manifest_path, json).map_err(|e| Error::io(&manifest_path, e))?;
        staged.commit()
    }

    fn run_stage(&mut self, stage: Stage) -> Result<()> {
        match stage {
            Stage::Communities => self.stage_communities(),
            Stage::Measures => self.stage_measures(),
            Stage::Mine => self.stage_mine(),
            Stage::Characterize => self.stage_characterize(),
        }
    }

    fn stage_communities(&mut self) -> Result<()> {
        let cfg = self.cfg;
        self.network()?;
        let net = self.net.as_ref().unwrap();
        let comm = match &cfg.communities {
            Some(path) => io::read_communities(path, net)?,
            None => louvain(&net.aggregate(), cfg.seed),
        };
        let gw = net.aggregate();
        let q = if gw.total_weight() > 0 {
            Some(modularity(&gw, &comm)?)
        } else {
            None
        };
        log::info!("{} communities, modularity {:?}", comm.count(), q);
        let mut staged = Staged::new(&cfg.out);
        io::write_communities(&staged.path(COMMUNITIES), net, &comm)?;
        staged.commit()?;
        self.manifest.communities = Some(comm.count());
        self.manifest.modularity = q;
        self.comm = Some(comm);
        Ok(())
    }

    fn stage_measures(&mut self) -> Result<()> {
        self.network()?;
        self.communities()?;
        let net = self.net.as_ref().unwrap();
        let comm = self.comm.as_ref().unwrap();
        let slices = (1..=net.slices())
            .into_par_iter()
            .map(|t| MeasureTable::compute_slice(net, comm, t))
            .collect::<commchar_core::Result<Vec<_>>>()?;
        let table = MeasureTable::from_slices(net.n(), slices);
        let mut staged = Staged::new(self.out());
        io::write_measures(&staged.path(MEASURES), net, &table)?;
        staged.commit()?;
        self.measures = Some(table);
        Ok(())
    }

    fn stage_mine(&mut self) -> Result<()> {
        self.specs()?;
        self.communities()?;
        self.measures()?;
        let net = self.net.as_ref().unwrap();
        let specs = self.specs.as_ref().unwrap();
        let db = SequenceDatabase::build(
            net,
            self.measures.as_ref().unwrap(),
            self.comm.as_ref().unwrap(),
            specs,
        )?;
        let mut staged = Staged::new(self.out());
        io::write_database(&staged.path(DATABASE), net, &db, specs)?;
        let patterns = mine_closed_with(db.sequences(), self.cfg.min_sup, self.cfg.miner_limits())?;
        log::info!("{} closed patterns at min_sup {}", patterns.len(), self.cfg.min_sup);
        io::write_patterns(&staged.path(PATTERNS), &patterns, specs)?;
        staged.commit()?;
        self.manifest.patterns = Some(patterns.len());
        self.db = Some(db);
        self.patterns = Some(patterns);
        Ok(())
    }

    fn stage_characterize(&mut self) -> Result<()> {
        self.specs()?;
        self.database()?;
        self.patterns()?;
        let net = self.net.as_ref().unwrap();
        let specs = self.specs.as_ref().unwrap();
        let db = self.db.as_ref().unwrap();
        let groups = split_by_class(self.patterns.as_deref().unwrap())?;
        let eligible = filter_small(db.communities(), self.cfg.min_community_size);
        let max = self.cfg.max_patterns;
        let reports = eligible
            .par_iter()
            .map(|&c| build_report(db, &groups, c, max))
            .collect::<commchar_core::Result<Vec<_>>>()?;

        let mut staged = Staged::new(self.out());
        let dir = staged.path(REPORTS);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for r in &reports {
            let path = dir.join(report_file(r.community));
            let doc = report::report_doc(r, net, specs);
            fs::write(&path, report::to_json(&doc)).map_err(|e| Error::io(&path, e))?;
        }
        let summary_path = staged.path(SUMMARY);
        fs::write(&summary_path, report::summary(&reports, net, specs))
            .map_err(|e| Error::io(&summary_path, e))?;
        staged.commit()?;
        self.manifest.characterized = Some(reports.iter().filter(|r| r.is_characterized()).count());
        self.reports = reports;
        Ok(())
    }

    /// Reports built by the characterize stage of this invocation.
    pub fn reports(&self) -> &[CommunityReport] {
        &self.reports
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }
}

/// Runs `stages` inside a worker pool capped at `cfg.threads`.
pub fn run(cfg: &PipelineConfig, stages: &[Stage], resume: bool) -> Result<Manifest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut p = Pipeline::new(cfg, resume);
        p.run(stages)?;
        Ok(p.manifest().clone())
    })
}
