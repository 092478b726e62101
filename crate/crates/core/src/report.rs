//! Check outcomes and violation witnesses shared by the layer audit and the
//! stability checker.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::hierarchy::{NodeRef, SegmentForest};

/// Which side of an inclusion a witness node lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Side {
    X,
    Y,
}

/// A hierarchy node in replayable form: rebuild the hierarchy of `side`,
/// then `node_at(s, members[0])` recovers it.
#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize)]
pub struct WitnessNode {
    pub role: String,
    pub side: Side,
    pub s: f64,
    pub members: Vec<usize>,
}

impl WitnessNode {
    pub fn new(role: &str, side: Side, forest: &SegmentForest, node: &NodeRef) -> Self {
        Self {
            role: role.to_string(),
            side,
            s: node.s(),
            members: forest.members(node).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub nodes: Vec<WitnessNode>,
    pub values: BTreeMap<String, f64>,
    pub note: String,
}

impl Witness {
    pub fn new(note: impl Into<String>) -> Self {
        Self {
            nodes: Vec::new(),
            values: BTreeMap::new(),
            note: note.into(),
        }
    }

    pub fn node(mut self, node: WitnessNode) -> Self {
        self.nodes.push(node);
        self
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    fn sort_key(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub tested: usize,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
}

impl CheckResult {
    pub fn violations(&self) -> usize {
        self.witnesses.len()
    }
}

/// Accumulates one check over its instance universe.
#[derive(Debug)]
pub struct Tally {
    id: &'static str,
    tested: usize,
    witnesses: Vec<Witness>,
}

impl Tally {
    pub fn new(id: &'static str) -> Self {
        Self {
            id,
            tested: 0,
            witnesses: Vec::new(),
        }
    }

    /// Records one instance; `witness` is only built when `ok` is false.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.tested += 1;
        if !ok {
            self.witnesses.push(witness());
        }
    }

    pub fn fail(&mut self, witness: Witness) {
        self.tested += 1;
        self.witnesses.push(witness);
    }

    /// Folds in an already finished result of the same check.
    pub fn absorb(&mut self, part: CheckResult) {
        self.tested += part.tested;
        self.witnesses.extend(part.witnesses);
    }

    pub fn finish(mut self) -> CheckResult {
        self.witnesses.sort_by_cached_key(Witness::sort_key);
        CheckResult {
            id: self.id.to_string(),
            tested: self.tested,
            passed: self.witnesses.is_empty(),
            witnesses: self.witnesses,
        }
    }
}
