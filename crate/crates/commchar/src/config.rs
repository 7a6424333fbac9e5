//! Pipeline configuration: a TOML file, every key optional. Relative paths
//! are resolved against the directory of the file.
//!
//! ```toml
//! min_sup = 0.02
//! min_community_size = 2
//! seed = 42
//! max_patterns = 10
//! max_candidates = 5000000
//! threads = 4
//! out = "out"
//! edges = "edges.csv"
//! attrs = "attrs.csv"
//! communities = "external.csv"   # skip detection, use this assignment
//! stages = ["communities", "measures", "mine", "characterize"]
//!
//! [measures.degree]
//! breakpoints = [3, 10, 30]
//! enabled = true
//! emit_zero = true
//!
//! [attributes.default]
//! breakpoints = [1, 2, 3, 4, 5]
//! emit_zero = false
//!
//! [attributes.aggregate]
//! names = ["total_conf", "total_journal"]
//! breakpoints = [5, 10, 20, 50]
//! emit_zero = false
//!
//! [attributes.override.ICML]
//! breakpoints = [1, 3]
//! emit_zero = false
//! ```
//!
//! Descriptors are ordered measures first (in the order above: degree,
//! int_degree, transitivity, z, participation, embeddedness), then
//! attributes by name.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use commchar_core::{DescriptorSet, DescriptorSpec, Measure, MinerLimits};
use toml::{Table, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BinRule {
    pub breakpoints: Vec<f64>,
    pub emit_zero: bool,
}

impl BinRule {
    fn new(breakpoints: &[f64], emit_zero: bool) -> Self {
        BinRule {
            breakpoints: breakpoints.to_vec(),
            emit_zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRule {
    pub measure: Measure,
    pub rule: BinRule,
    pub enabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Communities,
    Measures,
    Mine,
    Characterize,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Communities, Stage::Measures, Stage::Mine, Stage::Characterize];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Communities => "communities",
            Stage::Measures => "measures",
            Stage::Mine => "mine",
            Stage::Characterize => "characterize",
        }
    }

    pub fn from_name(name: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub edges: Option<PathBuf>,
    pub attrs: Option<PathBuf>,
    pub communities: Option<PathBuf>,
    pub out: PathBuf,
    pub min_sup: f64,
    pub min_community_size: usize,
    pub seed: u64,
    pub max_patterns: usize,
    pub max_candidates: usize,
    pub threads: Option<usize>,
    pub stages: Vec<Stage>,
    /// One rule per measure, in [`Measure::ALL`] order.
    pub measures: Vec<MeasureRule>,
    pub attribute_default: BinRule,
    pub aggregate_names: Vec<String>,
    pub aggregate_rule: BinRule,
    pub attribute_overrides: BTreeMap<String, BinRule>,
}

fn default_measure(m: Measure) -> MeasureRule {
    let (bps, enabled): (&[f64], bool) = match m {
        Measure::Degree => (&[3.0, 10.0, 30.0], true),
        Measure::InternalDegree => (&[3.0, 10.0, 30.0], false),
        Measure::Transitivity => (&[0.35, 0.5, 0.7], true),
        Measure::WithinModuleDegree => (&[2.5], true),
        Measure::Participation => (&[0.05, 0.6, 0.8], true),
        Measure::Embeddedness => (&[0.3, 0.7], true),
    };
    MeasureRule {
        measure: m,
        rule: BinRule::new(bps, true),
        enabled,
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            edges: None,
            attrs: None,
            communities: None,
            out: PathBuf::from("out"),
            min_sup: 0.02,
            min_community_size: 2,
            seed: 42,
            max_patterns: 10,
            max_candidates: MinerLimits::default().max_candidates,
            threads: None,
            stages: Stage::ALL.to_vec(),
            measures: Measure::ALL.into_iter().map(default_measure).collect(),
            attribute_default: BinRule::new(&[1.0, 2.0, 3.0, 4.0, 5.0], false),
            aggregate_names: vec!["total_conf".to_string(), "total_journal".to_string()],
            aggregate_rule: BinRule::new(&[5.0, 10.0, 20.0, 50.0], false),
            attribute_overrides: BTreeMap::new(),
        }
    }
}

/// Collects every problem found while walking a TOML table.
#[derive(Default)]
struct Walker {
    errors: Vec<String>,
    /// Directory relative paths are resolved against.
    base: Option<PathBuf>,
}

impl Walker {
    fn unknown_keys(&mut self, table: &Table, ctx: &str, known: &[&str]) {
        for key in table.keys() {
            if !known.contains(&key.as_str()) {
                self.errors.push(format!("{}: unknown key", join(ctx, key)));
            }
        }
    }

    fn bad(&mut self, ctx: &str, key: &str, expected: &str) {
        self.errors.push(format!("{}: expected {expected}", join(ctx, key)));
    }

    fn float(&mut self, t: &Table, ctx: &str, key: &str, into: &mut f64) {
        match t.get(key) {
            None => {}
            Some(Value::Float(x)) => *into = *x,
            Some(Value::Integer(i)) => *into = *i as f64,
            Some(_) => self.bad(ctx, key, "a number"),
        }
    }

    fn uint<T: TryFrom<i64>>(&mut self, t: &Table, ctx: &str, key: &str, into: &mut T) {
        match t.get(key) {
            None => {}
            Some(Value::Integer(i)) => match T::try_from(*i) {
                Ok(v) if *i >= 0 => *into = v,
                _ => self.bad(ctx, key, "a non-negative integer"),
            },
            Some(_) => self.bad(ctx, key, "a non-negative integer"),
        }
    }

    fn boolean(&mut self, t: &Table, ctx: &str, key: &str, into: &mut bool) {
        match t.get(key) {
            None => {}
            Some(Value::Boolean(b)) => *into = *b,
            Some(_) => self.bad(ctx, key, "true or false"),
        }
    }

    fn path(&mut self, t: &Table, ctx: &str, key: &str, into: &mut Option<PathBuf>) {
        match t.get(key) {
            None => {}
            Some(Value::String(s)) => match &self.base {
                None => *into = Some(PathBuf::from(s)),
                Some(base) => match std::path::absolute(base.join(s)) {
                    Ok(p) => *into = Some(p),
                    Err(e) => self.errors.push(format!("{}: {e}", join(ctx, key))),
                },
            },
            Some(_) => self.bad(ctx, key, "a path string"),
        }
    }

    fn strings(&mut self, t: &Table, ctx: &str, key: &str) -> Option<Vec<String>> {
        let v = t.get(key)?;
        let out = v
            .as_array()
            .and_then(|a| a.iter().map(|x| x.as_str().map(str::to_string)).collect());
        if out.is_none() {
            self.bad(ctx, key, "an array of strings");
        }
        out
    }

    fn table<'a>(&mut self, t: &'a Table, ctx: &str, key: &str) -> Option<&'a Table> {
        match t.get(key) {
            None => None,
            Some(Value::Table(inner)) => Some(inner),
            Some(_) => {
                self.bad(ctx, key, "a table");
                None
            }
        }
    }

    fn rule(&mut self, t: &Table, ctx: &str, extra: &[&str], into: &mut BinRule) {
        let mut known = vec!["breakpoints", "emit_zero"];
        known.extend_from_slice(extra);
        self.unknown_keys(t, ctx, &known);
        if let Some(v) = t.get("breakpoints") {
            let bps: Option<Vec<f64>> = v.as_array().and_then(|a| {
                a.iter()
                    .map(|x| match x {
                        Value::Float(f) => Some(*f),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    })
                    .collect()
            });
            match bps {
                Some(bps) => into.breakpoints = bps,
                None => self.bad(ctx, "breakpoints", "an array of numbers"),
            }
        }
        self.boolean(t, ctx, "emit_zero", &mut into.emit_zero);
    }
}

fn join(ctx: &str, key: &str) -> String {
    if ctx.is_empty() {
        key.to_string()
    } else {
        format!("{ctx}.{key}")
    }
}

const TOP_KEYS: [&str; 13] = [
    "edges",
    "attrs",
    "communities",
    "out",
    "min_sup",
    "min_community_size",
    "seed",
    "max_patterns",
    "max_candidates",
    "threads",
    "stages",
    "measures",
    "attributes",
];

impl PipelineConfig {
    /// Reads and validates a configuration file. Missing keys take their
    /// defaults; an empty file yields the default configuration. Relative
    /// paths in the file are relative to the file and stored absolute.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse_in(&text, Some(base))
    }

    /// Parses configuration text; paths are kept as written.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_in(text, None)
    }

    fn parse_in(text: &str, base: Option<&Path>) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))?;
        let mut cfg = PipelineConfig::default();
        let mut w = Walker {
            errors: Vec::new(),
            base: base.map(Path::to_path_buf),
        };
        w.unknown_keys(&table, "", &TOP_KEYS);
        w.path(&table, "", "edges", &mut cfg.edges);
        w.path(&table, "", "attrs", &mut cfg.attrs);
        w.path(&table, "", "communities", &mut cfg.communities);
        let mut out = None;
        w.path(&table, "", "out", &mut out);
        if let Some(out) = out {
            cfg.out = out;
        }
        w.float(&table, "", "min_sup", &mut cfg.min_sup);
        w.uint(&table, "", "min_community_size", &mut cfg.min_community_size);
        w.uint(&table, "", "seed", &mut cfg.seed);
        w.uint(&table, "", "max_patterns", &mut cfg.max_patterns);
        w.uint(&table, "", "max_candidates", &mut cfg.max_candidates);
        if table.contains_key("threads") {
            let mut threads = 0usize;
            w.uint(&table, "", "threads", &mut threads);
            cfg.threads = Some(threads);
        }
        if let Some(names) = w.strings(&table, "", "stages") {
            cfg.stages.clear();
            for name in names {
                match Stage::from_name(&name) {
                    Some(s) if !cfg.stages.contains(&s) => cfg.stages.push(s),
                    Some(_) => w.errors.push(format!("stages: `{name}` listed twice")),
                    None => w.errors.push(format!("stages: unknown stage `{name}`")),
                }
            }
            cfg.stages.sort();
        }

        if let Some(measures) = w.table(&table, "", "measures") {
            let names: Vec<&str> = Measure::ALL.iter().map(|m| m.name()).collect();
            w.unknown_keys(measures, "measures", &names);
            for rule in &mut cfg.measures {
                let ctx = format!("measures.{}", rule.measure.name());
                if let Some(t) = w.table(measures, "measures", rule.measure.name()) {
                    w.rule(t, &ctx, &["enabled"], &mut rule.rule);
                    w.boolean(t, &ctx, "enabled", &mut rule.enabled);
                }
            }
        }

        if let Some(attrs) = w.table(&table, "", "attributes") {
            w.unknown_keys(attrs, "attributes", &["default", "aggregate", "override"]);
            if let Some(t) = w.table(attrs, "attributes", "default") {
                w.rule(t, "attributes.default", &[], &mut cfg.attribute_default);
            }
            if let Some(t) = w.table(attrs, "attributes", "aggregate") {
                w.rule(t, "attributes.aggregate", &["names"], &mut cfg.aggregate_rule);
                if let Some(names) = w.strings(t, "attributes.aggregate", "names") {
                    cfg.aggregate_names = names;
                }
            }
            if let Some(t) = w.table(attrs, "attributes", "override") {
                for name in t.keys() {
                    let ctx = format!("attributes.override.{name}");
                    if let Some(inner) = w.table(t, "attributes.override", name) {
                        let mut rule = cfg.attribute_rule(name).clone();
                        w.rule(inner, &ctx, &[], &mut rule);
                        cfg.attribute_overrides.insert(name.clone(), rule);
                    }
                }
            }
        }

        let mut errors = w.errors;
        if let Err(Error::Config(more)) = cfg.check() {
            errors.extend(more);
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Checks value ranges, breakpoints and input paths, reporting every
    /// problem at once.
    pub fn check(&self) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.min_sup > 0.0 && self.min_sup <= 1.0) {
            errors.push(format!("min_sup: {} is outside (0, 1]", self.min_sup));
        }
        if self.min_community_size == 0 {
            errors.push("min_community_size: must be at least 1".to_string());
        }
        if self.max_patterns == 0 {
            errors.push("max_patterns: must be at least 1".to_string());
        }
        if self.max_candidates == 0 {
            errors.push("max_candidates: must be at least 1".to_string());
        }
        if self.seed > i64::MAX as u64 {
            errors.push(format!("seed: must be at most {}", i64::MAX));
        }
        if self.threads == Some(0) {
            errors.push("threads: must be at least 1".to_string());
        }
        for rule in &self.measures {
            if let Err(e) = DescriptorSpec::measure(rule.measure, rule.rule.breakpoints.clone()) {
                errors.push(format!("measures.{}: {e}", rule.measure.name()));
            }
        }
        let mut rules = vec![
            ("attributes.default".to_string(), &self.attribute_default),
            ("attributes.aggregate".to_string(), &self.aggregate_rule),
        ];
        rules.extend(
            self.attribute_overrides
                .iter()
                .map(|(n, r)| (format!("attributes.override.{n}"), r)),
        );
        for (ctx, rule) in rules {
            if let Err(e) = DescriptorSpec::attribute("attribute", rule.breakpoints.clone(), rule.emit_zero) {
                let reason = match e {
                    commchar_core::Error::InvalidDescriptor { reason, .. } => reason,
                    other => other.to_string(),
                };
                errors.push(format!("{ctx}: {reason}"));
            }
        }
        for (key, path) in [("edges", &self.edges), ("attrs", &self.attrs), ("communities", &self.communities)] {
            if let Some(p) = path {
                if let Err(e) = File::open(p) {
                    errors.push(format!("{key}: cannot read {}: {e}", p.display()));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Binning rule for attribute `name`: override, then aggregate, then
    /// default.
    pub fn attribute_rule(&self, name: &str) -> &BinRule {
        if let Some(r) = self.attribute_overrides.get(name) {
            r
        } else if self.aggregate_names.iter().any(|n| n == name) {
            &self.aggregate_rule
        } else {
            &self.attribute_default
        }
    }

    /// Enabled measures, then every attribute of the network by name.
    pub fn descriptor_set(&self, attribute_names: &[String]) -> Result<DescriptorSet> {
        let mut specs = Vec::new();
        for rule in self.measures.iter().filter(|r| r.enabled) {
            specs.push(DescriptorSpec::measure(rule.measure, rule.rule.breakpoints.clone())?);
        }
        let mut names = attribute_names.to_vec();
        names.sort();
        for name in &names {
            let rule = self.attribute_rule(name);
            specs.push(DescriptorSpec::attribute(name, rule.breakpoints.clone(), rule.emit_zero)?);
        }
        Ok(DescriptorSet::new(specs)?)
    }

    pub fn miner_limits(&self) -> MinerLimits {
        MinerLimits {
            max_candidates: self.max_candidates,
        }
    }

    /// Fully resolved configuration as TOML; parsing it back yields an equal
    /// configuration.
    pub fn to_toml(&self) -> String {
        let mut t = Table::new();
        let path = |p: &Path| Value::String(p.to_string_lossy().into_owned());
        for (key, p) in [("edges", &self.edges), ("attrs", &self.attrs), ("communities", &self.communities)] {
            if let Some(p) = p {
                t.insert(key.into(), path(p));
            }
        }
        t.insert("out".into(), path(&self.out));
        t.insert("min_sup".into(), Value::Float(self.min_sup));
        t.insert("min_community_size".into(), Value::Integer(self.min_community_size as i64));
        t.insert("seed".into(), Value::Integer(self.seed as i64));
        t.insert("max_patterns".into(), Value::Integer(self.max_patterns as i64));
        t.insert("max_candidates".into(), Value::Integer(self.max_candidates as i64));
        if let Some(n) = self.threads {
            t.insert("threads".into(), Value::Integer(n as i64));
        }
        t.insert(
            "stages".into(),
            Value::Array(self.stages.iter().map(|s| Value::String(s.name().into())).collect()),
        );

        let rule_table = |r: &BinRule| {
            let mut t = Table::new();
            t.insert(
                "breakpoints".into(),
                Value::Array(r.breakpoints.iter().map(|&b| Value::Float(b)).collect()),
            );
            t.insert("emit_zero".into(), Value::Boolean(r.emit_zero));
            t
        };
        let mut measures = Table::new();
        for rule in &self.measures {
            let mut m = rule_table(&rule.rule);
            m.insert("enabled".into(), Value::Boolean(rule.enabled));
            measures.insert(rule.measure.name().into(), Value::Table(m));
        }
        t.insert("measures".into(), Value::Table(measures));

        let mut attrs = Table::new();
        attrs.insert("default".into(), Value::Table(rule_table(&self.attribute_default)));
        let mut agg = rule_table(&self.aggregate_rule);
        agg.insert(
            "names".into(),
            Value::Array(self.aggregate_names.iter().map(|n| Value::String(n.clone())).collect()),
        );
        attrs.insert("aggregate".into(), Value::Table(agg));
        if !self.attribute_overrides.is_empty() {
            let overrides = self
                .attribute_overrides
                .iter()
                .map(|(n, r)| (n.clone(), Value::Table(rule_table(r))))
                .collect();
            attrs.insert("override".into(), Value::Table(overrides));
        }
        t.insert("attributes".into(), Value::Table(attrs));
        toml::to_string(&t).expect("plain tables always serialize")
    }
}
