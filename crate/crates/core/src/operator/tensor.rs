//! Factor-aware operations: tensor products, partial trace, embeddings,
//! factor permutations, and channel application on subsystems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::matrix::ComplexMatrix;
use crate::operator::space::{Factor, HilbertSpace};
use crate::operator::types::{CptpChannel, DensityOperator, HermitianObservable};

/// Tensor product of observables; factor labels must stay unique.
pub fn tensor_obs(a: &HermitianObservable, b: &HermitianObservable) -> Result<HermitianObservable> {
    let space = a.space().tensor(b.space())?;
    Ok(HermitianObservable::from_symmetrized(
        space,
        a.matrix().kron(b.matrix()),
    ))
}

/// Tensor product of states.
pub fn tensor_density(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let obs = tensor_obs(a.as_observable(), b.as_observable())?;
    Ok(DensityOperator::from_trusted(obs))
}

/// n-fold tensor power with relabeled factors `label.k` for copy k = 1..n.
pub fn tensor_power_density(rho: &DensityOperator, n: usize) -> Result<DensityOperator> {
    if n == 0 {
        return Err(Error::config("tensor power needs n >= 1"));
    }
    let mut out: Option<DensityOperator> = None;
    for copy in 1..=n {
        let relabeled = relabel_density(rho, &format!(".{}", copy))?;
        out = Some(match out {
            None => relabeled,
            Some(acc) => tensor_density(&acc, &relabeled)?,
        });
    }
    Ok(out.unwrap())
}

fn relabel_space(space: &HilbertSpace, suffix: &str) -> Result<HilbertSpace> {
    HilbertSpace::from_factors(
        space
            .factors()
            .iter()
            .map(|f| Factor {
                label: format!("{}{}", f.label, suffix),
                dim: f.dim,
            })
            .collect(),
    )
}

pub fn relabel_density(rho: &DensityOperator, suffix: &str) -> Result<DensityOperator> {
    let space = relabel_space(rho.space(), suffix)?;
    Ok(DensityOperator::from_trusted(
        HermitianObservable::from_symmetrized(space, rho.matrix().clone()),
    ))
}

/// Trace out every factor not named in `keep`; the result lives on the kept
/// factors in their original order. Passing all labels returns the operator
/// unchanged; tracing everything is expressed by `trace()` instead.
pub fn partial_trace(a: &HermitianObservable, keep: &[&str]) -> Result<HermitianObservable> {
    let space = a.space();
    for k in keep {
        if !space.has_label(k) {
            return Err(Error::config(format!("unknown factor label '{}'", k)));
        }
    }
    let keep_positions: Vec<usize> = space
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, f)| keep.contains(&f.label.as_str()))
        .map(|(i, _)| i)
        .collect();
    if keep_positions.is_empty() {
        return Err(Error::config(
            "partial trace must keep at least one factor; use trace() for the full trace",
        ));
    }
    let drop_positions: Vec<usize> = (0..space.factors().len())
        .filter(|i| !keep_positions.contains(i))
        .collect();
    if drop_positions.is_empty() {
        return Ok(a.clone());
    }

    let sub = space.subspace(keep)?;
    let dsub = sub.total_dim();
    let drop_dims: Vec<usize> = drop_positions
        .iter()
        .map(|&i| space.factors()[i].dim)
        .collect();
    let drop_total: usize = drop_dims.iter().product();

    let mut drop_strides = vec![1usize; drop_dims.len()];
    for i in (0..drop_dims.len().saturating_sub(1)).rev() {
        drop_strides[i] = drop_strides[i + 1] * drop_dims[i + 1];
    }

    let mut out = ComplexMatrix::zeros(dsub, dsub);
    let nfac = space.factors().len();
    let mut full_i = vec![0usize; nfac];
    let mut full_j = vec![0usize; nfac];

    for i_sub in 0..dsub {
        let sub_i = sub.unravel(i_sub);
        for j_sub in 0..dsub {
            let sub_j = sub.unravel(j_sub);
            let mut acc = C64::new(0.0, 0.0);
            for d_flat in 0..drop_total {
                for (slot, &pos) in drop_positions.iter().enumerate() {
                    let idx = (d_flat / drop_strides[slot]) % drop_dims[slot];
                    full_i[pos] = idx;
                    full_j[pos] = idx;
                }
                for (slot, &pos) in keep_positions.iter().enumerate() {
                    full_i[pos] = sub_i[slot];
                    full_j[pos] = sub_j[slot];
                }
                acc += a.matrix()[(space.ravel(&full_i), space.ravel(&full_j))];
            }
            out[(i_sub, j_sub)] = acc;
        }
    }
    Ok(HermitianObservable::from_symmetrized(sub, out))
}

/// Partial trace of a state; trace preservation keeps it a valid state.
pub fn partial_trace_density(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let obs = partial_trace(rho.as_observable(), keep)?;
    Ok(DensityOperator::from_trusted(obs))
}

/// Extend an operator by identity onto the remaining factors of `full`.
/// The operator's factors must all appear in `full` (any positions).
pub fn embed(op: &HermitianObservable, full: &HilbertSpace) -> Result<HermitianObservable> {
    let sub = op.space();
    let positions: Vec<usize> = sub
        .factors()
        .iter()
        .map(|f| {
            full.position(&f.label).ok_or_else(|| {
                Error::config(format!("factor '{}' not present in the target space", f.label))
            })
        })
        .collect::<Result<_>>()?;
    for (f, &pos) in sub.factors().iter().zip(&positions) {
        if full.factors()[pos].dim != f.dim {
            return Err(Error::config(format!(
                "factor '{}' has dimension {} in the target space, expected {}",
                f.label, full.factors()[pos].dim, f.dim
            )));
        }
    }

    let d = full.total_dim();
    let mut out = ComplexMatrix::zeros(d, d);
    let nfac = full.factors().len();
    for i in 0..d {
        let ti = full.unravel(i);
        for j in 0..d {
            let tj = full.unravel(j);
            // Identity on the untouched factors.
            let mut diag_ok = true;
            for pos in 0..nfac {
                if !positions.contains(&pos) && ti[pos] != tj[pos] {
                    diag_ok = false;
                    break;
                }
            }
            if !diag_ok {
                continue;
            }
            let sub_i: Vec<usize> = positions.iter().map(|&p| ti[p]).collect();
            let sub_j: Vec<usize> = positions.iter().map(|&p| tj[p]).collect();
            out[(i, j)] = op.matrix()[(sub.ravel(&sub_i), sub.ravel(&sub_j))];
        }
    }
    Ok(HermitianObservable::from_symmetrized(full.clone(), out))
}

/// Reorder tensor factors to match `target` (same labels and dims, possibly
/// different order).
pub fn permute_factors(op: &HermitianObservable, target: &HilbertSpace) -> Result<HermitianObservable> {
    let src = op.space();
    if src == target {
        return Ok(op.clone());
    }
    if src.factors().len() != target.factors().len() {
        return Err(Error::config("factor permutation must preserve the factor set"));
    }
    // target factor t sits at src position map[t].
    let map: Vec<usize> = target
        .factors()
        .iter()
        .map(|f| {
            src.position(&f.label)
                .ok_or_else(|| Error::config(format!("factor '{}' missing from source", f.label)))
        })
        .collect::<Result<_>>()?;
    for (f, &pos) in target.factors().iter().zip(&map) {
        if src.factors()[pos].dim != f.dim {
            return Err(Error::config(format!("factor '{}' dimension mismatch", f.label)));
        }
    }
    let d = target.total_dim();
    let mut out = ComplexMatrix::zeros(d, d);
    let mut src_i = vec![0usize; map.len()];
    let mut src_j = vec![0usize; map.len()];
    for i in 0..d {
        let ti = target.unravel(i);
        for j in 0..d {
            let tj = target.unravel(j);
            for (t_pos, &s_pos) in map.iter().enumerate() {
                src_i[s_pos] = ti[t_pos];
                src_j[s_pos] = tj[t_pos];
            }
            out[(i, j)] = op.matrix()[(src.ravel(&src_i), src.ravel(&src_j))];
        }
    }
    Ok(HermitianObservable::from_symmetrized(target.clone(), out))
}

pub fn permute_density(rho: &DensityOperator, target: &HilbertSpace) -> Result<DensityOperator> {
    Ok(DensityOperator::from_trusted(permute_factors(
        rho.as_observable(),
        target,
    )?))
}

/// `Tr[L rho]` where the two operators carry the same factor set in possibly
/// different orders.
pub fn trace_pair(l: &HermitianObservable, rho: &DensityOperator) -> Result<f64> {
    if l.space() == rho.space() {
        return rho.expectation(l);
    }
    let aligned = permute_density(rho, l.space())?;
    aligned.expectation(l)
}

/// Apply a channel to the named input factors of a state.
///
/// The channel input factors must appear in the state space (in the same
/// relative order); the output space replaces them at the position of the
/// first input factor.
pub fn apply_channel_on(
    state: &DensityOperator,
    channel: &CptpChannel,
) -> Result<DensityOperator> {
    let full_in = state.space();
    let cin = channel.input_space();
    let cout = channel.output_space();

    let in_positions: Vec<usize> = cin
        .factors()
        .iter()
        .map(|f| {
            full_in.position(&f.label).ok_or_else(|| {
                Error::config(format!("channel input factor '{}' missing from state", f.label))
            })
        })
        .collect::<Result<_>>()?;
    for w in in_positions.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::config(
                "channel input factors must appear in the state space in channel order",
            ));
        }
    }
    for (f, &pos) in cin.factors().iter().zip(&in_positions) {
        if full_in.factors()[pos].dim != f.dim {
            return Err(Error::config(format!(
                "channel input factor '{}' dimension mismatch",
                f.label
            )));
        }
    }
    for f in cout.factors() {
        if full_in.has_label(&f.label) && !cin.has_label(&f.label) {
            return Err(Error::config(format!(
                "channel output label '{}' collides with an untouched state factor",
                f.label
            )));
        }
    }

    // Output factor list: drop the channel inputs, insert the outputs at the
    // first input slot.
    let insert_at = in_positions[0];
    let mut out_factors: Vec<Factor> = Vec::new();
    for (pos, f) in full_in.factors().iter().enumerate() {
        if pos == insert_at {
            out_factors.extend(cout.factors().iter().cloned());
        }
        if !in_positions.contains(&pos) {
            out_factors.push(f.clone());
        }
    }
    let full_out = HilbertSpace::from_factors(out_factors)?;

    let spectator_positions_in: Vec<usize> = (0..full_in.factors().len())
        .filter(|p| !in_positions.contains(p))
        .collect();
    let out_positions: Vec<usize> = cout
        .factors()
        .iter()
        .map(|f| full_out.position(&f.label).unwrap())
        .collect();
    let spectator_positions_out: Vec<usize> = (0..full_out.factors().len())
        .filter(|p| !out_positions.contains(p))
        .collect();

    let din = full_in.total_dim();
    let dout = full_out.total_dim();
    let mut acc = ComplexMatrix::zeros(dout, dout);

    for kraus in channel.kraus() {
        // Lift the Kraus operator to the full spaces.
        let mut lifted = ComplexMatrix::zeros(dout, din);
        for o in 0..dout {
            let to = full_out.unravel(o);
            for i in 0..din {
                let ti = full_in.unravel(i);
                let mut spect_ok = true;
                for (sp_out, sp_in) in spectator_positions_out.iter().zip(&spectator_positions_in) {
                    if to[*sp_out] != ti[*sp_in] {
                        spect_ok = false;
                        break;
                    }
                }
                if !spect_ok {
                    continue;
                }
                let sub_o: Vec<usize> = out_positions.iter().map(|&p| to[p]).collect();
                let sub_i: Vec<usize> = in_positions.iter().map(|&p| ti[p]).collect();
                lifted[(o, i)] = kraus[(cout.ravel(&sub_o), cin.ravel(&sub_i))];
            }
        }
        acc = acc.add(&lifted.mul(state.matrix()).mul(&lifted.dagger()));
    }

    Ok(DensityOperator::from_trusted(
        HermitianObservable::from_symmetrized(full_out, acc),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::space::HilbertSpace;

    fn qubit(label: &str) -> HilbertSpace {
        HilbertSpace::single(label, 2).unwrap()
    }

    #[test]
    fn product_state_partial_trace() {
        // Tr_B(rho_A (x) rho_B) = rho_A.
        let a = DensityOperator::diagonal(qubit("A"), &[0.75, 0.25]).unwrap();
        let b = DensityOperator::pure(qubit("B"), &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)])
            .unwrap();
        let ab = tensor_density(&a, &b).unwrap();
        let back = partial_trace_density(&ab, &["A"]).unwrap();
        assert!(back.matrix().sub(a.matrix()).max_abs() < 1e-12);
        // Trace of the full space equals 1.
        assert!((ab.as_observable().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        // Hand computation: Tr_B |Phi+><Phi+| = I/2.
        let sp = qubit("A").tensor(&qubit("B")).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let bell = DensityOperator::pure(
            sp,
            &[
                C64::new(inv, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(inv, 0.0),
            ],
        )
        .unwrap();
        let red = partial_trace_density(&bell, &["A"]).unwrap();
        let expected = ComplexMatrix::diag(&[0.5, 0.5]);
        assert!(red.matrix().sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn embed_and_permute_round_trip() {
        let sp_abc = HilbertSpace::new(vec![("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let on_c = HermitianObservable::new(
            HilbertSpace::single("c", 2).unwrap(),
            ComplexMatrix::diag(&[1.0, -1.0]),
        )
        .unwrap();
        let full = embed(&on_c, &sp_abc).unwrap();
        assert!((full.trace() - 0.0).abs() < 1e-12);

        let target = HilbertSpace::new(vec![("c", 2), ("a", 2), ("b", 3)]).unwrap();
        let permuted = permute_factors(&full, &target).unwrap();
        let back = permute_factors(&permuted, &sp_abc).unwrap();
        assert!(back.matrix().sub(full.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn channel_on_subsystem_replaces_factor() {
        // Swap-to-|0> channel on factor b of a two-qubit state.
        let in_sp = qubit("b");
        let out_sp = qubit("h");
        let k0 = ComplexMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let k1 = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let reset = CptpChannel::new(in_sp, out_sp, vec![k0, k1]).unwrap();

        let ab = tensor_density(
            &DensityOperator::diagonal(qubit("a"), &[0.25, 0.75]).unwrap(),
            &DensityOperator::diagonal(qubit("b"), &[0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let out = apply_channel_on(&ab, &reset).unwrap();
        assert_eq!(out.space().labels(), vec!["a", "h"]);
        let on_h = partial_trace_density(&out, &["h"]).unwrap();
        assert!((on_h.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        let on_a = partial_trace_density(&out, &["a"]).unwrap();
        assert!((on_a.matrix()[(1, 1)].re - 0.75).abs() < 1e-12);
    }
}
