//! Greedy maximum coverage and partial set cover over circuit regions, with
//! brute-force optima for checking the approximation guarantees.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::circuit::{union_circuit, PolyhedraCircuit};
use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, LinearInequality};
use crate::measure::Measurer;
use crate::scalar::Field;

mod manifest;

pub use manifest::{load_manifest, parse_manifest, Manifest, Objective};

/// Largest number of subsets the brute-force optima will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Volume,
    Lattice,
}

#[derive(Clone, Debug)]
pub struct Region {
    pub name: String,
    pub circuit: PolyhedraCircuit,
}

#[derive(Clone, Debug)]
pub struct CoverageInstance {
    dim: usize,
    regions: Vec<Region>,
    mode: Mode,
}

impl CoverageInstance {
    pub fn new(dim: usize, regions: Vec<Region>, mode: Mode) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::EmptyList);
        }
        for r in &regions {
            if r.circuit.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.circuit.dim() });
            }
        }
        Ok(CoverageInstance { dim, regions, mode })
    }

    /// One region per polyhedron, named `S1..Sm`.
    pub fn from_polyhedra(polys: &[HPolyhedron], mode: Mode) -> Result<Self> {
        let first = polys.first().ok_or(Error::EmptyList)?;
        let regions = polys
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(Region { name: format!("S{}", i + 1), circuit: PolyhedraCircuit::from_polyhedron(p)? }))
            .collect::<Result<Vec<_>>>()?;
        CoverageInstance::new(first.dim(), regions, mode)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        CoverageInstance { mode, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    TargetReached,
    /// No candidate added anything; the remaining picks were padded.
    ZeroGain { padded: usize },
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Budget => write!(f, "budget"),
            StopReason::TargetReached => write!(f, "target reached"),
            StopReason::ZeroGain { padded } => write!(f, "zero gain ({padded} padded)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace<F> {
    /// 1-based region indices in pick order.
    pub picks: Vec<usize>,
    pub gains: Vec<F>,
    pub cumulative: Vec<F>,
    pub stop: StopReason,
    /// Cover target `(1-α)(1-β)·total`, for set-cover runs.
    pub target: Option<F>,
}

impl<F: Field> GreedyTrace<F> {
    pub fn value(&self) -> F {
        self.cumulative.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn k(&self) -> usize {
        self.picks.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverParams<F> {
    alpha: F,
    beta: F,
}

impl<F: Field> CoverParams<F> {
    /// Requires `0 < α < 1` and `0 ≤ β < 1`.
    pub fn new(alpha: F, beta: F) -> Result<Self> {
        if !(alpha > F::zero() && alpha < F::one()) {
            return Err(Error::InvalidParams(format!("alpha {alpha} not in (0, 1)")));
        }
        if !(beta >= F::zero() && beta < F::one()) {
            return Err(Error::InvalidParams(format!("beta {beta} not in [0, 1)")));
        }
        Ok(CoverParams { alpha, beta })
    }

    pub fn alpha(&self) -> &F {
        &self.alpha
    }

    pub fn beta(&self) -> &F {
        &self.beta
    }
}

/// Greedy and brute-force solvers over one measurer.
#[derive(Clone)]
pub struct Solver<F> {
    measurer: Measurer<F>,
}

impl<F: Field> Default for Solver<F> {
    fn default() -> Self {
        Solver::new(Measurer::default())
    }
}

impl<F: Field> Solver<F> {
    pub fn new(measurer: Measurer<F>) -> Self {
        Solver { measurer }
    }

    pub fn measurer(&self) -> &Measurer<F> {
        &self.measurer
    }

    /// Measure of the union of the regions at the given 0-based indices.
    pub fn union_measure(&self, inst: &CoverageInstance, idx: &[usize]) -> Result<F> {
        if idx.is_empty() {
            return Ok(F::zero());
        }
        let parts: Vec<&PolyhedraCircuit> = idx.iter().map(|&i| &inst.regions[i].circuit).collect();
        let c = PolyhedraCircuit::union_of(&parts)?;
        match inst.mode {
            Mode::Volume => Ok(self.measurer.circuit_volume(&c)?.value),
            Mode::Lattice => Ok(F::from_bigint(&BigInt::from(self.measurer.circuit_lattice_count(&c)?.value))),
        }
    }

    /// Best next pick: largest marginal gain, lowest index on ties.
    fn best_pick(&self, inst: &CoverageInstance, picked: &[usize], current: &F) -> Result<Option<(usize, F)>> {
        let candidates: Vec<usize> = (0..inst.len()).filter(|i| !picked.contains(i)).collect();
        let values = candidates
            .par_iter()
            .map(|&j| {
                let mut with = picked.to_vec();
                with.push(j);
                self.union_measure(inst, &with)
            })
            .collect::<Result<Vec<F>>>()?;
        let mut best: Option<(usize, F)> = None;
        for (&j, v) in candidates.iter().zip(values) {
            let gain = v - current.clone();
            if best.as_ref().is_none_or(|(_, g)| gain > *g) {
                best = Some((j, gain));
            }
        }
        Ok(best)
    }

    /// `k` greedy picks maximizing the union measure in the instance's mode.
    pub fn greedy_max(&self, inst: &CoverageInstance, k: usize) -> Result<GreedyTrace<F>> {
        if k == 0 || k > inst.len() {
            return Err(Error::InvalidBudget { k, m: inst.len() });
        }
        let mut picked = Vec::with_capacity(k);
        let mut gains = Vec::with_capacity(k);
        let mut cumulative = Vec::with_capacity(k);
        let mut current = F::zero();
        let mut stop = StopReason::Budget;
        while picked.len() < k {
            let (j, gain) = self.best_pick(inst, &picked, &current)?.expect("k <= m leaves a candidate");
            if gain.is_zero() {
                let padded = k - picked.len();
                let rest: Vec<usize> = (0..inst.len()).filter(|i| !picked.contains(i)).take(padded).collect();
                for i in rest {
                    picked.push(i);
                    gains.push(F::zero());
                    cumulative.push(current.clone());
                }
                stop = StopReason::ZeroGain { padded };
                break;
            }
            current = current + gain.clone();
            picked.push(j);
            gains.push(gain);
            cumulative.push(current.clone());
        }
        Ok(GreedyTrace { picks: picked.iter().map(|i| i + 1).collect(), gains, cumulative, stop, target: None })
    }

    pub fn greedy_max_volume(&self, inst: &CoverageInstance, k: usize) -> Result<GreedyTrace<F>> {
        self.greedy_max(&inst.with_mode(Mode::Volume), k)
    }

    pub fn greedy_max_lattice(&self, inst: &CoverageInstance, k: usize) -> Result<GreedyTrace<F>> {
        self.greedy_max(&inst.with_mode(Mode::Lattice), k)
    }

    /// Greedy picks until the union reaches `(1-α)(1-β)` of the whole union.
    pub fn greedy_cover(&self, inst: &CoverageInstance, params: &CoverParams<F>) -> Result<GreedyTrace<F>> {
        let all: Vec<usize> = (0..inst.len()).collect();
        let total = self.union_measure(inst, &all)?;
        let target = (F::one() - params.alpha.clone()) * (F::one() - params.beta.clone()) * total;
        let mut picked = Vec::new();
        let mut gains = Vec::new();
        let mut cumulative = Vec::new();
        let mut current = F::zero();
        while current < target {
            let (j, gain) = self.best_pick(inst, &picked, &current)?.expect("target below total leaves a candidate");
            current = current + gain.clone();
            picked.push(j);
            gains.push(gain);
            cumulative.push(current.clone());
        }
        Ok(GreedyTrace {
            picks: picked.iter().map(|i| i + 1).collect(),
            gains,
            cumulative,
            stop: StopReason::TargetReached,
            target: Some(target),
        })
    }

    pub fn greedy_cover_volume(&self, inst: &CoverageInstance, params: &CoverParams<F>) -> Result<GreedyTrace<F>> {
        self.greedy_cover(&inst.with_mode(Mode::Volume), params)
    }

    pub fn greedy_cover_lattice(&self, inst: &CoverageInstance, params: &CoverParams<F>) -> Result<GreedyTrace<F>> {
        self.greedy_cover(&inst.with_mode(Mode::Lattice), params)
    }

    /// Exact maximum union measure over all `k`-subsets.
    pub fn brute_force_opt(&self, inst: &CoverageInstance, k: usize) -> Result<F> {
        let m = inst.len();
        if k == 0 || k > m {
            return Err(Error::InvalidBudget { k, m });
        }
        let subsets = binomial(m, k);
        if subsets > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge(format!("C({m},{k}) = {subsets} subsets")));
        }
        let combos: Vec<Vec<usize>> = (0..m).combinations(k).collect();
        let values = combos.par_iter().map(|s| self.union_measure(inst, s)).collect::<Result<Vec<F>>>()?;
        Ok(values.into_iter().max().expect("at least one subset"))
    }

    /// Fewest regions whose union reaches `(1-β)` of the whole union.
    pub fn brute_force_min_cover(&self, inst: &CoverageInstance, params: &CoverParams<F>) -> Result<usize> {
        let m = inst.len();
        if m >= 64 || 1u64 << m > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge(format!("2^{m} subsets")));
        }
        let all: Vec<usize> = (0..m).collect();
        let total = self.union_measure(inst, &all)?;
        let target = (F::one() - params.beta.clone()) * total;
        for size in 0..=m {
            let combos: Vec<Vec<usize>> = (0..m).combinations(size).collect();
            let hit = combos
                .par_iter()
                .map(|s| self.union_measure(inst, s).map(|v| v >= target))
                .collect::<Result<Vec<bool>>>()?;
            if hit.into_iter().any(|h| h) {
                return Ok(size);
            }
        }
        unreachable!("the full set reaches its own measure")
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// Geometric instance for a classical set-cover instance over `1..=n`.
///
/// Element `j` becomes the unit square `[2(j-1), 2j-1] × [0, 1]`; set `S_i`
/// becomes those squares together with the zero-area segment
/// `0 ≤ x ≤ 2n-1, y = 1/2`, so any union of regions has area equal to the
/// size of the corresponding union of sets.
pub fn reduce_classical(sets: &[Vec<i64>], n: usize) -> Result<CoverageInstance> {
    if sets.is_empty() {
        return Err(Error::EmptyList);
    }
    let row = |a: [i64; 2], b: i64| LinearInequality::le(&a, b).expect("nonzero row");
    let segment = HPolyhedron::new(
        2,
        vec![row([-1, 0], 0), row([1, 0], 2 * n as i64 - 1), row([0, 2], 1), row([0, -2], -1)],
    )?;
    let mut regions = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        let mut polys = vec![segment.clone()];
        let mut members: Vec<i64> = set.clone();
        members.sort_unstable();
        members.dedup();
        for &j in &members {
            if j < 1 || j > n as i64 {
                return Err(Error::ElementOutsideUniverse { element: j, n });
            }
            polys.push(HPolyhedron::integer_box(&[2 * (j - 1), 0], &[2 * j - 1, 1])?);
        }
        regions.push(Region { name: format!("S{}", i + 1), circuit: union_circuit(&polys)? });
    }
    CoverageInstance::new(2, regions, Mode::Volume)
}

/// Random classical instance: `m` sets over `1..=n`, each element kept with probability 1/2.
pub fn random_classical(n: usize, m: usize, seed: u64) -> Vec<Vec<i64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| (1..=n as i64).filter(|_| rng.gen_bool(0.5)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn frac(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn intervals(spec: &[(i64, i64)], mode: Mode) -> CoverageInstance {
        let polys: Vec<HPolyhedron> =
            spec.iter().map(|&(lo, hi)| HPolyhedron::integer_box(&[lo], &[hi]).unwrap()).collect();
        CoverageInstance::from_polyhedra(&polys, mode).unwrap()
    }

    fn solver() -> Solver<Q> {
        Solver::default()
    }

    #[test]
    fn greedy_max_volume_examples() {
        let inst = intervals(&[(0, 3), (2, 4), (5, 6)], Mode::Volume);
        let t = solver().greedy_max_volume(&inst, 2).unwrap();
        assert_eq!(t.picks, vec![1, 2]);
        assert_eq!(t.value(), q(4));
        assert_eq!(t.stop, StopReason::Budget);
        let all = solver().greedy_max_volume(&inst, 3).unwrap();
        assert_eq!(all.value(), solver().union_measure(&inst, &[0, 1, 2]).unwrap());
        let one = solver().greedy_max_volume(&inst, 1).unwrap();
        assert_eq!(one.picks, vec![1]);
        assert!(matches!(solver().greedy_max(&inst, 0), Err(Error::InvalidBudget { .. })));
    }

    #[test]
    fn greedy_max_lattice_examples() {
        let inst = intervals(&[(0, 3), (2, 4), (6, 6)], Mode::Lattice);
        let t = solver().greedy_max_lattice(&inst, 2).unwrap();
        assert_eq!((t.picks.clone(), t.value()), (vec![1, 2], q(5)));
        assert_eq!(t.gains, vec![q(4), q(1)]);
        let single = intervals(&[(0, 9)], Mode::Lattice);
        assert_eq!(solver().greedy_max_lattice(&single, 1).unwrap().value(), q(10));
        // 1 ≤ 3x ≤ 2 has no integer point.
        let thin = HPolyhedron::new(
            1,
            vec![LinearInequality::le(&[3], 2).unwrap(), LinearInequality::le(&[-3], -1).unwrap()],
        )
        .unwrap();
        let empty = CoverageInstance::from_polyhedra(&[thin], Mode::Lattice).unwrap();
        let t = solver().greedy_max_lattice(&empty, 1).unwrap();
        assert_eq!((t.value(), t.gains.clone()), (q(0), vec![q(0)]));
        assert_eq!(t.stop, StopReason::ZeroGain { padded: 1 });
    }

    #[test]
    fn greedy_cover_examples() {
        let s = solver();
        let half = CoverParams::new(frac(1, 2), q(0)).unwrap();
        let t = s.greedy_cover_lattice(&intervals(&[(0, 9)], Mode::Lattice), &half).unwrap();
        assert_eq!((t.k(), t.value()), (1, q(10)));
        let two_fifths = CoverParams::new(frac(2, 5), q(0)).unwrap();
        let t = s.greedy_cover_lattice(&intervals(&[(0, 4), (5, 9)], Mode::Lattice), &two_fifths).unwrap();
        assert_eq!((t.picks.clone(), t.target.clone()), (vec![1, 2], Some(q(6))));
        let t = s.greedy_cover_volume(&intervals(&[(0, 1), (1, 2)], Mode::Volume), &half).unwrap();
        assert_eq!((t.k(), t.target.clone()), (1, Some(q(1))));
        let quarter = CoverParams::new(frac(1, 4), q(0)).unwrap();
        let t = s.greedy_cover_volume(&intervals(&[(0, 4), (4, 8)], Mode::Volume), &quarter).unwrap();
        assert_eq!((t.k(), t.target.clone()), (2, Some(q(6))));
        assert!(CoverParams::new(q(0), q(0)).is_err());
        assert!(CoverParams::new(frac(1, 2), q(1)).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let s = solver();
        let inst = intervals(&[(0, 3), (2, 4), (5, 6)], Mode::Volume);
        assert_eq!(s.brute_force_opt(&inst, 2).unwrap(), q(4));
        assert_eq!(s.brute_force_opt(&inst, 3).unwrap(), q(5));
        assert!(matches!(s.brute_force_opt(&inst, 0), Err(Error::InvalidBudget { .. })));

        let exact = CoverParams::new(frac(1, 2), q(0)).unwrap();
        assert_eq!(s.brute_force_min_cover(&intervals(&[(0, 4), (5, 9)], Mode::Lattice), &exact).unwrap(), 2);
        assert_eq!(s.brute_force_min_cover(&intervals(&[(0, 9), (2, 3)], Mode::Lattice), &exact).unwrap(), 1);
        let half = CoverParams::new(frac(1, 2), frac(1, 2)).unwrap();
        assert_eq!(s.brute_force_min_cover(&intervals(&[(0, 9), (2, 3)], Mode::Lattice), &half).unwrap(), 1);
    }

    #[test]
    fn reduction_examples() {
        let s = solver();
        let inst = reduce_classical(&[vec![1, 2], vec![2, 3]], 3).unwrap();
        assert_eq!(s.union_measure(&inst, &[0, 1]).unwrap(), q(3));
        let one = reduce_classical(&[vec![1]], 1).unwrap();
        assert_eq!(s.union_measure(&one, &[0]).unwrap(), q(1));
        let empty = reduce_classical(&[vec![]], 2).unwrap();
        assert_eq!(s.union_measure(&empty, &[0]).unwrap(), q(0));
        assert!(matches!(
            reduce_classical(&[vec![4]], 3),
            Err(Error::ElementOutsideUniverse { element: 4, n: 3 })
        ));
    }

    #[test]
    fn random_classical_is_seeded() {
        assert_eq!(random_classical(8, 5, 7), random_classical(8, 5, 7));
        assert!(random_classical(8, 5, 7).iter().flatten().all(|&e| (1..=8).contains(&e)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn trace_identity_and_diminishing_gains(
            spec in proptest::collection::vec((0i64..10, 0i64..4), 1..=4),
            lattice in any::<bool>(),
        ) {
            let spec: Vec<(i64, i64)> = spec.into_iter().map(|(lo, w)| (lo, lo + w)).collect();
            let mode = if lattice { Mode::Lattice } else { Mode::Volume };
            let inst = intervals(&spec, mode);
            let s = solver();
            let t = s.greedy_max(&inst, inst.len()).unwrap();
            let mut prev = q(0);
            for (step, pick) in t.picks.iter().enumerate() {
                let chosen: Vec<usize> = t.picks[..=step].iter().map(|p| p - 1).collect();
                let v = s.union_measure(&inst, &chosen).unwrap();
                prop_assert_eq!(v.clone() - prev.clone(), t.gains[step].clone(), "pick {}", pick);
                prev = v;
            }
            prop_assert!(t.gains.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn dilation_keeps_the_pick_sequence(
            spec in proptest::collection::vec((-3i64..3, -3i64..3, 0i64..3, 0i64..3), 1..=3),
            factor in 2i64..4,
        ) {
            let make = |f: i64| {
                let polys: Vec<HPolyhedron> = spec
                    .iter()
                    .map(|&(x, y, w, h)| HPolyhedron::integer_box(&[f * x, f * y], &[f * (x + w), f * (y + h)]).unwrap())
                    .collect();
                CoverageInstance::from_polyhedra(&polys, Mode::Volume).unwrap()
            };
            let s = solver();
            let k = spec.len();
            prop_assert_eq!(s.greedy_max(&make(1), k).unwrap().picks, s.greedy_max(&make(factor), k).unwrap().picks);
        }
    }
}
