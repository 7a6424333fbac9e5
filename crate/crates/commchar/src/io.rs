//! File formats.
//!
//! | file | format |
//! |------|--------|
//! | edges | CSV `t,u,v`, 1-based slices, one row per slice and edge |
//! | attributes | CSV `t,node,attr,value` |
//! | measures | CSV `t,node,degree,int_degree,transitivity,z,participation,embeddedness` |
//! | communities | CSV `node,community` |
//! | database | `node<TAB>(item,item)…(class=c)` |
//! | patterns | `support<TAB>class<TAB>(item,item)…`, class `-` when untagged |
//!
//! Nodes are identified by their labels in every file; dense ids follow the
//! sorted label order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use commchar_core::{
    CommunityStructure, DescriptorSet, DynamicNetwork, Item, MeasureTable, MinedPattern,
    NodeId, NodeMeasures, Sequence, SequenceDatabase,
};

use crate::error::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn csv_reader(path: &Path, header: &[&str]) -> Result<csv::Reader<File>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let found = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `{}`", header.join(",")),
        ));
    }
    Ok(rdr)
}

fn records(
    path: &Path,
    header: &[&str],
) -> Result<impl Iterator<Item = Result<(u64, csv::StringRecord)>>> {
    let path = path.to_path_buf();
    let rdr = csv_reader(&path, header)?;
    Ok(rdr.into_records().map(move |r| {
        r.map(|rec| (rec.position().map_or(0, |p| p.line()), rec))
            .map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(&path, line, e.to_string())
            })
    }))
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(path, line, format!("invalid {name} `{raw}`")))
}

fn parse_slice(path: &Path, line: u64, raw: &str) -> Result<usize> {
    let t: usize = parse_field(path, line, "slice", raw)?;
    if t == 0 {
        return Err(Error::parse(path, line, "slice indices start at 1"));
    }
    Ok(t)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, 0, format!("{other:?}")),
    }
}

/// Reads an edge list and an optional attribute table.
///
/// The node set is the union of labels seen in both files and the number of
/// slices is the largest slice index seen. Duplicate edge rows are dropped
/// with a warning; conflicting attribute rows are an error.
pub fn load_network(edges: &Path, attrs: Option<&Path>) -> Result<DynamicNetwork> {
    let mut edge_rows = Vec::new();
    for r in records(edges, &["t", "u", "v"])? {
        let (line, rec) = r?;
        let t = parse_slice(edges, line, &rec[0])?;
        let (u, v) = (rec[1].to_string(), rec[2].to_string());
        if u == v {
            return Err(Error::parse(edges, line, format!("self-loop on `{u}`")));
        }
        edge_rows.push((line, t, u, v));
    }
    let mut attr_rows = Vec::new();
    if let Some(path) = attrs {
        for r in records(path, &["t", "node", "attr", "value"])? {
            let (line, rec) = r?;
            let t = parse_slice(path, line, &rec[0])?;
            let value: f64 = parse_field(path, line, "value", &rec[3])?;
            if !value.is_finite() {
                return Err(Error::parse(path, line, "attribute values must be finite"));
            }
            attr_rows.push((line, t, rec[1].to_string(), rec[2].to_string(), value));
        }
    }

    let labels: BTreeSet<&str> = edge_rows
        .iter()
        .flat_map(|(_, _, u, v)| [u.as_str(), v.as_str()])
        .chain(attr_rows.iter().map(|r| r.2.as_str()))
        .collect();
    let labels: Vec<String> = labels.into_iter().map(str::to_string).collect();
    let id = |l: &str| NodeId(labels.binary_search_by(|x| x.as_str().cmp(l)).unwrap() as u32);
    let slices = edge_rows
        .iter()
        .map(|r| r.1)
        .chain(attr_rows.iter().map(|r| r.1))
        .max()
        .unwrap_or(0);

    let mut b = DynamicNetwork::builder(labels.len(), slices);
    for (line, t, u, v) in &edge_rows {
        if !b.edge(*t, id(u), id(v))? {
            log::warn!("{}:{line}: duplicate edge {u},{v} at slice {t} ignored", edges.display());
        }
    }
    if let Some(path) = attrs {
        for (line, t, node, attr, value) in &attr_rows {
            match b.attribute(attr, *t, id(node), *value)? {
                Some(prev) if prev != *value => {
                    return Err(Error::parse(
                        path,
                        *line,
                        format!("conflicting values {prev} and {value} for {attr} of `{node}` at slice {t}"),
                    ))
                }
                Some(_) => log::warn!("{}:{line}: duplicate attribute row ignored", path.display()),
                None => {}
            }
        }
    }
    b.labels(labels);
    Ok(b.build()?)
}

pub fn label(net: &DynamicNetwork, v: NodeId) -> String {
    net.label(v).map_or_else(|| v.0.to_string(), str::to_string)
}

fn node_index(net: &DynamicNetwork) -> BTreeMap<String, NodeId> {
    net.nodes().map(|v| (label(net, v), v)).collect()
}

/// Writes the network in the formats read by [`load_network`]. Nodes with
/// neither an edge nor an attribute value are not representable.
pub fn save_network(net: &DynamicNetwork, edges: &Path, attrs: &Path) -> Result<()> {
    let mut w = csv_writer(edges)?;
    let err = |e| csv_error(edges, e);
    w.write_record(["t", "u", "v"]).map_err(err)?;
    for t in 1..=net.slices() {
        for &(u, v) in net.edges(t)? {
            w.write_record([t.to_string(), label(net, u), label(net, v)])
                .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::io(edges, e))?;

    let mut w = csv_writer(attrs)?;
    let err = |e| csv_error(attrs, e);
    w.write_record(["t", "node", "attr", "value"]).map_err(err)?;
    for (a, name) in net.attribute_names().iter().enumerate() {
        for t in 1..=net.slices() {
            for v in net.nodes() {
                if let Some(x) = net.attribute(a, t, v)? {
                    w.write_record([t.to_string(), label(net, v), name.clone(), x.to_string()])
                        .map_err(err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| Error::io(attrs, e))
}

const MEASURE_HEADER: [&str; 8] = [
    "t",
    "node",
    "degree",
    "int_degree",
    "transitivity",
    "z",
    "participation",
    "embeddedness",
];

pub fn write_measures(path: &Path, net: &DynamicNetwork, table: &MeasureTable) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| csv_error(path, e);
    w.write_record(MEASURE_HEADER).map_err(err)?;
    for t in 1..=table.slices() {
        for v in net.nodes() {
            let m = table.get(t, v);
            w.write_record([
                t.to_string(),
                label(net, v),
                m.degree.to_string(),
                m.internal_degree.to_string(),
                m.transitivity.to_string(),
                m.z.to_string(),
                m.participation.to_string(),
                m.embeddedness.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_measures(path: &Path, net: &DynamicNetwork) -> Result<MeasureTable> {
    let index = node_index(net);
    let mut rows: Vec<Vec<Option<NodeMeasures>>> = vec![vec![None; net.n()]; net.slices()];
    for r in records(path, &MEASURE_HEADER)? {
        let (line, rec) = r?;
        let t = parse_slice(path, line, &rec[0])?;
        if t > net.slices() {
            return Err(Error::parse(path, line, format!("slice {t} beyond {}", net.slices())));
        }
        let v = *index
            .get(&rec[1])
            .ok_or_else(|| Error::parse(path, line, format!("unknown node `{}`", &rec[1])))?;
        let m = NodeMeasures {
            degree: parse_field(path, line, "degree", &rec[2])?,
            internal_degree: parse_field(path, line, "int_degree", &rec[3])?,
            transitivity: parse_field(path, line, "transitivity", &rec[4])?,
            z: parse_field(path, line, "z", &rec[5])?,
            participation: parse_field(path, line, "participation", &rec[6])?,
            embeddedness: parse_field(path, line, "embeddedness", &rec[7])?,
        };
        rows[t - 1][v.index()] = Some(m);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(v, m)| {
                    m.ok_or_else(|| {
                        Error::parse(
                            path,
                            0,
                            format!("missing row for node `{}` at slice {}", label(net, NodeId(v as u32)), s + 1),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureTable::from_rows(net.n(), rows)?)
}

pub fn write_communities(path: &Path, net: &DynamicNetwork, comm: &CommunityStructure) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| csv_error(path, e);
    w.write_record(["node", "community"]).map_err(err)?;
    for v in net.nodes() {
        w.write_record([label(net, v), comm.community_of(v).to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a `node,community` assignment. Community labels are arbitrary
/// strings; ids are re-assigned by decreasing size. Every node must be
/// listed exactly once.
pub fn read_communities(path: &Path, net: &DynamicNetwork) -> Result<CommunityStructure> {
    let index = node_index(net);
    let mut labels: Vec<Option<String>> = vec![None; net.n()];
    for r in records(path, &["node", "community"])? {
        let (line, rec) = r?;
        let v = *index
            .get(&rec[0])
            .ok_or_else(|| Error::parse(path, line, format!("unknown node `{}`", &rec[0])))?;
        if labels[v.index()].replace(rec[1].to_string()).is_some() {
            return Err(Error::parse(path, line, format!("node `{}` listed twice", &rec[0])));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| {
            l.ok_or_else(|| {
                Error::parse(path, 0, format!("node `{}` has no community", label(net, NodeId(v as u32))))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // keep numeric ids numeric so that a written structure reads back unchanged
    if let Ok(ids) = labels.iter().map(|l| l.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>() {
        if let Ok(c) = CommunityStructure::from_assignment(ids.clone()) {
            return Ok(c);
        }
        return Ok(CommunityStructure::from_labels(&ids));
    }
    Ok(CommunityStructure::from_labels(&labels))
}

pub fn write_database(
    path: &Path,
    net: &DynamicNetwork,
    db: &SequenceDatabase,
    specs: &DescriptorSet,
) -> Result<()> {
    let mut w = create(path)?;
    for v in net.nodes() {
        writeln!(w, "{}\t{}", label(net, v), specs.format_sequence(db.sequence(v)))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn lines(path: &Path) -> Result<impl Iterator<Item = Result<(u64, String)>>> {
    let path: PathBuf = path.to_path_buf();
    let reader = BufReader::new(open(&path)?);
    Ok(reader
        .lines()
        .enumerate()
        .map(move |(i, l)| l.map(|l| (i as u64 + 1, l)).map_err(|e| Error::io(&path, e))))
}

/// Reads a database dump; the community structure is taken from the class
/// items.
pub fn read_database(path: &Path, net: &DynamicNetwork, specs: &DescriptorSet) -> Result<SequenceDatabase> {
    let index = node_index(net);
    let mut entries: Vec<Option<Sequence>> = vec![None; net.n()];
    for l in lines(path)? {
        let (line, text) = l?;
        if text.is_empty() {
            continue;
        }
        let (node, seq) = text
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, line, "expected `node<TAB>sequence`"))?;
        let v = *index
            .get(node)
            .ok_or_else(|| Error::parse(path, line, format!("unknown node `{node}`")))?;
        let seq = specs
            .parse_sequence(seq)
            .ok_or_else(|| Error::parse(path, line, "malformed sequence"))?;
        entries[v.index()] = Some(seq);
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(v, e)| {
            e.ok_or_else(|| Error::parse(path, 0, format!("missing entry for `{}`", label(net, NodeId(v as u32)))))
        })
        .collect::<Result<Vec<_>>>()?;
    let classes = entries
        .iter()
        .map(|s| match s.itemsets().last().map(Vec::as_slice) {
            Some([Item::Class(c)]) => Ok(*c as usize),
            _ => Err(Error::parse(path, 0, "every entry must end with a class itemset")),
        })
        .collect::<Result<Vec<_>>>()?;
    let comm = CommunityStructure::from_assignment(classes)?;
    Ok(SequenceDatabase::from_entries(entries, comm)?)
}

/// Writes patterns with their class item stripped into the second column.
pub fn write_patterns(path: &Path, patterns: &[MinedPattern], specs: &DescriptorSet) -> Result<()> {
    let mut w = create(path)?;
    for p in patterns {
        let sets = p.sequence.itemsets();
        let (class, body) = match p.class_tag {
            Some(c) => (c.to_string(), &sets[..sets.len() - 1]),
            None => ("-".to_string(), sets),
        };
        if body.is_empty() {
            continue;
        }
        let body = specs.format_sequence(&Sequence::new(body.to_vec()));
        writeln!(w, "{}\t{class}\t{body}", p.support_count).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_patterns(path: &Path, specs: &DescriptorSet) -> Result<Vec<MinedPattern>> {
    let mut out = Vec::new();
    for l in lines(path)? {
        let (line, text) = l?;
        if text.is_empty() {
            continue;
        }
        let mut cols = text.split('\t');
        let (Some(count), Some(class), Some(seq), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::parse(path, line, "expected `support<TAB>class<TAB>sequence`"));
        };
        let count: usize = parse_field(path, line, "support", count)?;
        let seq = specs
            .parse_sequence(seq)
            .filter(|s| !s.is_empty() && s.itemsets().iter().all(|set| !set.is_empty()))
            .ok_or_else(|| Error::parse(path, line, "malformed pattern"))?;
        let seq = match class {
            "-" => seq,
            c => seq.concat(Item::Class(parse_field(path, line, "class", c)?)),
        };
        out.push(MinedPattern::new(seq, count));
    }
    Ok(out)
}
