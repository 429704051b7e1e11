use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::jsparse::FileId;

use super::DependencyGraph;

/// Partition assignment of every file plus the resulting edge cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceMap {
    pub k: usize,
    pub partition_of: BTreeMap<FileId, usize>,
    /// Number of shared names carried by edges between partitions.
    pub cut_weight: usize,
}

impl IndependenceMap {
    pub fn partition(&self, file: FileId) -> usize {
        self.partition_of.get(&file).copied().unwrap_or(0)
    }

    pub fn files_in(&self, p: usize) -> impl Iterator<Item = FileId> + '_ {
        self.partition_of.iter().filter(move |(_, &q)| q == p).map(|(&f, _)| f)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Greedy affinity partitioning. Files are visited by (component, size
/// descending, path); each goes to the partition it shares the most names
/// with, subject to a load cap of 1.5x the mean; ties and files without
/// affinity go to the least-loaded partition.
pub fn partition_graph(g: &DependencyGraph, k: usize) -> IndependenceMap {
    let k = k.max(1);
    let n = g.files.len();
    let index: BTreeMap<FileId, usize> = g.files.iter().enumerate().map(|(i, f)| (f.id, i)).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in &g.edges {
        let (a, b) = (index[&e.from], index[&e.to]);
        adj[a].push((b, e.names.len()));
        adj[b].push((a, e.names.len()));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }

    // Components ranked by total size descending, then smallest path.
    let mut comp: BTreeMap<usize, (usize, &str)> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let f = &g.files[i];
        let e = comp.entry(r).or_insert((0, f.path.as_str()));
        e.0 += f.size;
        if f.path.as_str() < e.1 {
            e.1 = f.path.as_str();
        }
    }
    let mut ranked: Vec<(usize, (usize, &str))> = comp.into_iter().collect();
    ranked.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.cmp(b.1 .1)));
    let rank: BTreeMap<usize, usize> = ranked.iter().enumerate().map(|(i, (r, _))| (*r, i)).collect();

    let mut order: Vec<usize> = (0..n).collect();
    let comp_rank: Vec<usize> = (0..n).map(|i| rank[&find(&mut parent, i)]).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (&g.files[a], &g.files[b]);
        comp_rank[a].cmp(&comp_rank[b]).then(fb.size.cmp(&fa.size)).then(fa.path.cmp(&fb.path))
    });

    let total: usize = g.files.iter().map(|f| f.size).sum();
    let cap = (total as f64 * 1.5 / k as f64).ceil() as usize;
    let mut load = vec![0usize; k];
    let mut assign: Vec<Option<usize>> = vec![None; n];
    for &i in &order {
        let size = g.files[i].size;
        let mut affinity = vec![0usize; k];
        for &(j, w) in &adj[i] {
            if let Some(p) = assign[j] {
                affinity[p] += w;
            }
        }
        let least_loaded = |load: &[usize], allowed: &dyn Fn(usize) -> bool| {
            (0..k).filter(|&p| allowed(p)).min_by_key(|&p| (load[p], p))
        };
        let best_aff = (0..k).filter(|&p| load[p] + size <= cap).map(|p| affinity[p]).max().unwrap_or(0);
        let choice = if best_aff > 0 {
            least_loaded(&load, &|p| affinity[p] == best_aff && load[p] + size <= cap)
        } else {
            None
        }
        .or_else(|| least_loaded(&load, &|_| true))
        .unwrap();
        assign[i] = Some(choice);
        load[choice] += size;
    }

    let partition_of: BTreeMap<FileId, usize> = g.files.iter().zip(&assign).map(|(f, p)| (f.id, p.unwrap())).collect();
    let cut_weight =
        g.edges.iter().filter(|e| partition_of[&e.from] != partition_of[&e.to]).map(|e| e.names.len()).sum();
    IndependenceMap { k, partition_of, cut_weight }
}
