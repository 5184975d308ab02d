use super::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::{permute_subsystems, tensor_all, PartyLayout};
use crate::State;

/// All repetition-free length-`n` sequences of an ensemble, repartitioned so that
/// each party holds its `n` subsystems contiguously.
#[derive(Clone, Debug)]
pub struct SequenceEnsemble {
    parent: Ensemble,
    n: usize,
    tuples: Vec<Vec<usize>>,
    ensemble: Ensemble,
}

impl SequenceEnsemble {
    pub fn parent(&self) -> &Ensemble {
        &self.parent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Parent indices `(i_1, ..., i_n)` per sequence, in label order.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// `"(a,b,...)"` for parent labels `a, b, ...`.
pub fn sequence_label(parent: &Ensemble, tuple: &[usize]) -> String {
    let names: Vec<&str> = tuple.iter().map(|&i| parent.labels()[i].as_str()).collect();
    format!("({})", names.join(","))
}

fn tuples(count: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(count: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..count {
            if !cur.contains(&i) {
                cur.push(i);
                rec(count, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(count, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Builds `S^[n]` in lexicographic tuple order.
pub fn sequence_ensemble(e: &Ensemble, n: usize) -> Result<SequenceEnsemble> {
    if n == 0 || n > e.len() {
        return Err(Error::Range(format!("sequence length {n} not in 1..={}", e.len())));
    }
    let k = e.layout().party_count();
    let dims = e.layout().dims();
    let seq_dims: Vec<usize> = dims.iter().map(|&d| d.pow(n as u32)).collect();
    let layout = PartyLayout::new(seq_dims.clone(), e.layout().names().to_vec())?;
    let tuples = tuples(e.len(), n);
    let labels: Vec<String> = tuples.iter().map(|t| sequence_label(e, t)).collect();
    let name = format!("{}^[{n}]", e.name());

    let ensemble = match e.factors() {
        Some(factors) => {
            let seq_factors = tuples
                .iter()
                .map(|t| {
                    (0..k)
                        .map(|p| {
                            let parts: Vec<State> = t.iter().map(|&i| factors[i][p].clone()).collect();
                            let joint = tensor_all(&parts).expect("n >= 1");
                            let local = PartyLayout::new(vec![seq_dims[p]], vec![layout.names()[p].clone()])?;
                            joint.with_layout(local)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ensemble::from_factors(name, layout, labels, seq_factors)?
        }
        None => {
            // sequence order is slot-major (s, p); the target is party-major (p, s)
            let flat_dims: Vec<usize> = (0..n).flat_map(|_| dims.iter().copied()).collect();
            let perm: Vec<usize> = (0..k).flat_map(|p| (0..n).map(move |s| s * k + p)).collect();
            let states = tuples
                .iter()
                .map(|t| {
                    let parts: Vec<State> = t.iter().map(|&i| e.states()[i].clone()).collect();
                    let joint = tensor_all(&parts).expect("n >= 1");
                    let amps = permute_subsystems(joint.amplitudes(), &flat_dims, &perm);
                    State::new(amps, layout.clone())
                })
                .collect::<Result<Vec<_>>>()?;
            Ensemble::new(name, labels, states)?
        }
    };
    Ok(SequenceEnsemble { parent: e.clone(), n, tuples, ensemble })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, kets, local_part};
    use crate::qcore::tensor;

    #[test]
    fn counts_are_falling_factorials() {
        for &(big_n, name) in &[(3usize, "su3"), (4, "pbr4"), (9, "bennett9")] {
            let e = catalog(name, &[]).unwrap();
            let mut expect = 1;
            for n in 1..=3.min(big_n) {
                expect *= big_n - n + 1;
                assert_eq!(sequence_ensemble(&e, n).unwrap().len(), expect);
            }
        }
    }

    #[test]
    fn su3_pairs_match_display() {
        let e = catalog("su3", &[]).unwrap();
        let s = sequence_ensemble(&e, 2).unwrap();
        assert_eq!(s.ensemble().labels()[0], "(psi1,psi2)");
        // |psi12> = |00>_A |0+>_B
        let expect = tensor(
            &tensor(&tensor(&kets::zero(), &kets::zero()), &kets::zero()),
            &kets::plus(),
        );
        assert!(s.ensemble().states()[0].max_abs_diff(&expect) < 1e-12);
        let a = local_part(s.ensemble(), "A").unwrap();
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn product_and_permuted_constructions_agree() {
        for name in ["su3", "pbr4", "duan4"] {
            let e = catalog(name, &[]).unwrap();
            let plain = Ensemble::new(name, e.labels().to_vec(), e.states().to_vec()).unwrap();
            let a = sequence_ensemble(&e, 2).unwrap();
            let b = sequence_ensemble(&plain, 2).unwrap();
            for (x, y) in a.ensemble().states().iter().zip(b.ensemble().states()) {
                assert!(x.max_abs_diff(y) < 1e-12, "{name}");
            }
        }
        let e = catalog("nl2", &[1.0]).unwrap();
        let plain = Ensemble::new("nl2", e.labels().to_vec(), e.states().to_vec()).unwrap();
        let a = sequence_ensemble(&e, 2).unwrap();
        let b = sequence_ensemble(&plain, 2).unwrap();
        for (x, y) in a.ensemble().states().iter().zip(b.ensemble().states()) {
            assert!(x.max_abs_diff(y) < 1e-12);
        }
    }

    #[test]
    fn n_out_of_range() {
        let e = catalog("su3", &[]).unwrap();
        assert!(sequence_ensemble(&e, 0).is_err());
        assert!(sequence_ensemble(&e, 4).is_err());
    }
}
