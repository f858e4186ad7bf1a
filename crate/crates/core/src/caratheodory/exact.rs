//! Exact delta-premeasure on small finite instances.
//!
//! Best-first branch and bound over subcollections of explicit candidate
//! sets. Determinism: the incumbent starts from the greedy cover, improves
//! only strictly, branches in candidate order, and reports costs summed in
//! ascending candidate order.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::caratheodory::{CoverEstimate, ExtReal, SizeFunction};
use crate::error::{GmtError, Result};
use crate::metric::{FiniteSpace, MetricSpace, Point, SetRep};

/// Candidate list cap. The search scans the whole list at every node, so this
/// bounds per-node work; a full subset enumeration of a 12 point space fits.
pub const MAX_CANDIDATES: usize = 4096;

const MAX_TARGET_BITS: usize = 32;
const NODE_BUDGET: usize = 1 << 22;

struct Instance {
    /// Cost per admissible candidate (may be +infinity for table sizes).
    cost: Vec<f64>,
    /// Coverage of the target, one bit per target element.
    mask: Vec<u32>,
    /// Admissible candidates as sorted label sets.
    members: Vec<Vec<usize>>,
    full: u32,
    target: Vec<usize>,
}

fn prepare(
    space: &FiniteSpace,
    target: &[usize],
    candidates: &[Vec<usize>],
    z: &SizeFunction,
    delta: f64,
) -> Result<Instance> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(GmtError::Invalid("delta must be nonnegative and finite".into()));
    }
    if candidates.len() > MAX_CANDIDATES {
        return Err(GmtError::Unsupported(format!(
            "at most {MAX_CANDIDATES} candidate sets are supported, got {}",
            candidates.len()
        )));
    }
    let mut tgt: Vec<usize> = target.to_vec();
    for &i in &tgt {
        if i >= space.len() {
            return Err(GmtError::UnknownLabel(i));
        }
    }
    tgt.sort_unstable();
    tgt.dedup();
    if tgt.len() > MAX_TARGET_BITS {
        return Err(GmtError::Unsupported(format!(
            "targets above {MAX_TARGET_BITS} elements are not supported"
        )));
    }
    let msp = MetricSpace::Finite(space.clone());
    let mut cost = Vec::new();
    let mut mask = Vec::new();
    let mut members = Vec::new();
    for cand in candidates {
        if cand.is_empty() {
            return Err(GmtError::EmptySet);
        }
        let mut m = cand.clone();
        m.sort_unstable();
        m.dedup();
        if space.subset_diameter(&m)? > delta {
            continue;
        }
        let bits = m.iter().fold(0u32, |acc, lbl| {
            match tgt.binary_search(lbl) {
                Ok(b) => acc | (1 << b),
                Err(_) => acc,
            }
        });
        let points = m.iter().map(|&i| Point::Label(i)).collect();
        let c = z.size_value(&msp, &SetRep::cloud(points)?)?;
        cost.push(c);
        mask.push(bits);
        members.push(m);
    }
    let full = ((1u64 << tgt.len()) - 1) as u32;
    Ok(Instance { cost, mask, members, full, target: tgt })
}

fn infeasible_estimate(space: &FiniteSpace, inst: &Instance, delta: f64) -> CoverEstimate {
    let union = inst.mask.iter().fold(0u32, |a, &m| a | m);
    let missing_bit = (!union & inst.full).trailing_zeros() as usize;
    let witness = space.labels()[inst.target[missing_bit]].clone();
    CoverEstimate {
        value: ExtReal(f64::INFINITY),
        delta,
        cover: Vec::new(),
        exact: true,
        gap_bound: None,
        infeasible_witness: Some(witness),
    }
}

/// Greedy choice by cost per newly covered element; ties take the earlier
/// candidate. Returns instance indices, or None when stuck.
fn greedy_choice(inst: &Instance) -> Option<Vec<usize>> {
    let mut covered = 0u32;
    let mut chosen = Vec::new();
    while covered != inst.full {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..inst.cost.len() {
            let new_bits = (inst.mask[i] & !covered).count_ones();
            if new_bits == 0 {
                continue;
            }
            let ratio = inst.cost[i] / new_bits as f64;
            if best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, i));
            }
        }
        let (_, i) = best?;
        chosen.push(i);
        covered |= inst.mask[i];
    }
    chosen.sort_unstable();
    chosen.dedup();
    Some(chosen)
}

/// Sum of candidate costs in ascending index order (canonical rounding).
fn canonical_value(inst: &Instance, chosen: &[usize]) -> f64 {
    let mut sorted = chosen.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.iter().map(|&i| inst.cost[i]).sum()
}

fn estimate_from_chosen(inst: &Instance, chosen: &[usize], delta: f64, exact: bool) -> CoverEstimate {
    let mut sorted = chosen.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let cover = sorted
        .iter()
        .map(|&i| {
            let points = inst.members[i].iter().map(|&l| Point::Label(l)).collect();
            SetRep::Cloud(points)
        })
        .collect();
    CoverEstimate {
        value: ExtReal(canonical_value(inst, &sorted)),
        delta,
        cover,
        exact,
        gap_bound: exact.then_some(0.0),
        infeasible_witness: None,
    }
}

struct Node {
    bound: f64,
    seq: u64,
    cost: f64,
    covered: u32,
    chosen: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: prefer smaller bound, then smaller seq
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Exact infimum over subcollections of the admissible candidates covering
/// the target. Delta zero admits only zero-diameter candidates, which matches
/// the limit the approximating measure takes.
pub fn zeta_delta_exact(
    space: &FiniteSpace,
    target: &[usize],
    candidates: &[Vec<usize>],
    z: &SizeFunction,
    delta: f64,
) -> Result<CoverEstimate> {
    let inst = prepare(space, target, candidates, z, delta)?;
    if inst.full == 0 {
        return Ok(CoverEstimate::empty(delta));
    }
    if inst.mask.iter().fold(0u32, |a, &m| a | m) != inst.full {
        return Ok(infeasible_estimate(space, &inst, delta));
    }
    let greedy = greedy_choice(&inst).expect("feasible instance");
    let mut incumbent_value = canonical_value(&inst, &greedy);
    let mut incumbent = greedy;

    let min_ratio = (0..inst.cost.len())
        .filter(|&i| inst.cost[i].is_finite() && inst.mask[i] != 0)
        .map(|i| inst.cost[i] / inst.mask[i].count_ones() as f64)
        .fold(f64::INFINITY, f64::min);
    let min_ratio = if min_ratio.is_finite() { min_ratio } else { 0.0 };

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seen: HashMap<u32, f64> = HashMap::new();
    let mut seq = 0u64;
    heap.push(Node {
        bound: inst.full.count_ones() as f64 * min_ratio,
        seq,
        cost: 0.0,
        covered: 0,
        chosen: Vec::new(),
    });
    let mut pops = 0usize;
    while let Some(node) = heap.pop() {
        pops += 1;
        if pops > NODE_BUDGET {
            return Err(GmtError::Solver("branch and bound node budget exceeded".into()));
        }
        if node.bound >= incumbent_value {
            break;
        }
        if let Some(&better) = seen.get(&node.covered) {
            if better < node.cost {
                continue;
            }
        }
        let elem = (!node.covered & inst.full).trailing_zeros();
        for i in 0..inst.cost.len() {
            if inst.mask[i] & (1 << elem) == 0 {
                continue;
            }
            let covered = node.covered | inst.mask[i];
            let cost = node.cost + inst.cost[i];
            let mut chosen = node.chosen.clone();
            chosen.push(i);
            if covered == inst.full {
                let value = canonical_value(&inst, &chosen);
                if value < incumbent_value {
                    incumbent_value = value;
                    incumbent = chosen;
                }
                continue;
            }
            let remaining = (!covered & inst.full).count_ones() as f64;
            let bound = cost + remaining * min_ratio;
            if bound >= incumbent_value {
                continue;
            }
            match seen.get(&covered) {
                Some(&better) if better <= cost => continue,
                _ => {
                    seen.insert(covered, cost);
                }
            }
            seq += 1;
            heap.push(Node { bound, seq, cost, covered, chosen });
        }
    }
    Ok(estimate_from_chosen(&inst, &incumbent, delta, true))
}

/// Greedy feasible cover of the same instance; an upper bound on the exact
/// value by construction (the exact solver starts from this incumbent).
pub fn zeta_delta_greedy(
    space: &FiniteSpace,
    target: &[usize],
    candidates: &[Vec<usize>],
    z: &SizeFunction,
    delta: f64,
) -> Result<CoverEstimate> {
    let inst = prepare(space, target, candidates, z, delta)?;
    if inst.full == 0 {
        return Ok(CoverEstimate::empty(delta));
    }
    match greedy_choice(&inst) {
        Some(chosen) => Ok(estimate_from_chosen(&inst, &chosen, delta, false)),
        None => Ok(infeasible_estimate(space, &inst, delta)),
    }
}

/// The approximating measure of a finite target: the supremum of the exact
/// premeasure over shrinking delta, reached once only zero-diameter
/// candidates remain admissible.
pub fn psi_exact(
    space: &FiniteSpace,
    target: &[usize],
    candidates: &[Vec<usize>],
    z: &SizeFunction,
) -> Result<CoverEstimate> {
    zeta_delta_exact(space, target, candidates, z, 0.0)
}
