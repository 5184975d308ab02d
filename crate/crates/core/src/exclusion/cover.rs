use super::{caves_criterion, povm_from_caves_triple, verify_strong, Povm, PovmElement};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};

/// Smallest family of `sets` whose union is `0..universe`, by iterative-deepening
/// depth-first search that always branches on the element with the fewest options.
/// Returns indices into `sets`, or `None` when no cover exists. `universe <= 64`.
pub fn minimum_set_cover(universe: usize, sets: &[Vec<usize>]) -> Option<Vec<usize>> {
    assert!(universe <= 64, "set cover universe limited to 64 elements");
    let full: u64 = if universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
    let masks: Vec<u64> = sets.iter().map(|s| s.iter().fold(0u64, |m, &i| m | (1 << i))).collect();
    if masks.iter().fold(0, |a, m| a | m) & full != full {
        return None;
    }
    if universe == 0 {
        return Some(Vec::new());
    }
    let largest = masks.iter().map(|m| m.count_ones()).max().unwrap_or(1).max(1) as usize;
    let containing: Vec<Vec<usize>> =
        (0..universe).map(|e| (0..masks.len()).filter(|&s| masks[s] & (1 << e) != 0).collect()).collect();

    fn dfs(covered: u64, full: u64, depth: usize, largest: usize, masks: &[u64], containing: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
        if covered == full {
            return true;
        }
        let missing = (full & !covered).count_ones() as usize;
        if depth == 0 || missing > depth * largest {
            return false;
        }
        let pick = (0..containing.len())
            .filter(|&e| covered & (1 << e) == 0)
            .min_by_key(|&e| containing[e].len())
            .expect("an uncovered element exists");
        for &s in &containing[pick] {
            chosen.push(s);
            if dfs(covered | masks[s], full, depth - 1, largest, masks, containing, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let lower = universe.div_ceil(largest);
    for depth in lower..=universe {
        let mut chosen = Vec::new();
        if dfs(0, full, depth, largest, &masks, &containing, &mut chosen) {
            return Some(chosen);
        }
    }
    None
}

/// Uniform mixture of exclusion measurements of subsets that together cover the ensemble.
pub fn compose_union(e: &Ensemble, subsets: &[(Vec<String>, Povm)], tol: f64) -> Result<Povm> {
    if subsets.is_empty() {
        return Err(Error::CoverIncomplete(e.labels().first().cloned().unwrap_or_default()));
    }
    let mut covered = vec![false; e.len()];
    for (labels, povm) in subsets {
        let idx = labels.iter().map(|l| e.index_of(l)).collect::<Result<Vec<_>>>()?;
        for &i in &idx {
            covered[i] = true;
        }
        let report = verify_strong(&e.subset(&idx), povm, tol)?;
        if !report.pass {
            return Err(Error::SubsetCertificate(labels.join(",")));
        }
    }
    if let Some(i) = covered.iter().position(|c| !c) {
        return Err(Error::CoverIncomplete(e.labels()[i].clone()));
    }
    let w = 1.0 / subsets.len() as f64;
    let elements: Vec<PovmElement> = subsets
        .iter()
        .flat_map(|(_, p)| p.elements().iter().map(move |el| PovmElement { label: el.label.clone(), op: el.op.scale(w) }))
        .collect();
    Povm::new(e.layout().clone(), elements)
}

/// Searches for antidistinguishable triples covering the ensemble and composes their
/// measurements. Returns the chosen triples (as indices) and the composed measurement.
pub fn find_triple_cover(e: &Ensemble, tol: f64) -> Option<(Vec<[usize; 3]>, Povm)> {
    let n = e.len();
    if !(3..=64).contains(&n) {
        return None;
    }
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let s = [e.states()[i].clone(), e.states()[j].clone(), e.states()[k].clone()];
                if caves_criterion(&s).map(|r| r.antidistinguishable()).unwrap_or(false) {
                    triples.push([i, j, k]);
                }
            }
        }
    }
    loop {
        let sets: Vec<Vec<usize>> = triples.iter().map(|t| t.to_vec()).collect();
        let chosen = minimum_set_cover(n, &sets)?;
        let mut parts = Vec::with_capacity(chosen.len());
        let mut failed = None;
        for &c in &chosen {
            let sub = e.subset(&triples[c]);
            match povm_from_caves_triple(&sub) {
                Ok(p) => parts.push((sub.labels().to_vec(), p)),
                Err(_) => {
                    failed = Some(c);
                    break;
                }
            }
        }
        match failed {
            Some(c) => {
                triples.remove(c);
            }
            None => {
                let povm = compose_union(e, &parts, tol).ok()?;
                return Some((chosen.iter().map(|&c| triples[c]).collect(), povm));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;

    #[test]
    fn set_cover_finds_minimum() {
        let sets = vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 3], vec![1, 4], vec![5]];
        let c = minimum_set_cover(6, &sets).unwrap();
        assert_eq!(c.len(), 2);
        assert!(minimum_set_cover(7, &sets).is_none());
    }

    #[test]
    fn duan_cover_is_found() {
        let e = catalog("duan4", &[]).unwrap();
        let parts: Vec<(Vec<String>, Povm)> = [[0usize, 2, 3], [1, 2, 3]]
            .iter()
            .map(|t| {
                let sub = e.subset(t);
                (sub.labels().to_vec(), povm_from_caves_triple(&sub).unwrap())
            })
            .collect();
        let p = compose_union(&e, &parts, 1e-9).unwrap();
        assert_eq!(p.len(), 6);
        assert!(verify_strong(&e, &p, 1e-9).unwrap().pass);
    }

    #[test]
    fn single_subset_keeps_weight_one() {
        let e = catalog("trine3", &[]).unwrap();
        let p = povm_from_caves_triple(&e).unwrap();
        let c = compose_union(&e, &[(e.labels().to_vec(), p.clone())], 1e-9).unwrap();
        for (a, b) in c.ops().zip(p.ops()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn incomplete_cover_is_an_error() {
        let e = catalog("duan4", &[]).unwrap();
        let sub = e.subset(&[0, 2, 3]);
        let p = povm_from_caves_triple(&sub).unwrap();
        let r = compose_union(&e, &[(sub.labels().to_vec(), p)], 1e-9);
        assert!(matches!(r, Err(Error::CoverIncomplete(l)) if l == "D2"));
    }
}
