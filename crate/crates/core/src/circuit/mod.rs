//! Polyhedra circuits: DAGs of half-space leaves combined by union and
//! intersection gates, with a single output gate.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, LinearInequality, Point};
use crate::scalar::Field;

mod parse;

pub use parse::{parse_circuit, ParseDiagnostic, ParsedCircuit, Severity};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(LinearInequality),
    Union(Vec<GateId>),
    Intersection(Vec<GateId>),
}

/// A validated circuit. Children always precede their parents in `gates`, so
/// evaluation in index order is a topological traversal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyhedraCircuit {
    dim: usize,
    gates: Vec<Gate>,
    names: Vec<String>,
    output: GateId,
}

impl PolyhedraCircuit {
    pub fn new(dim: usize, gates: Vec<Gate>, names: Vec<String>, output: GateId) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidCircuit(msg));
        if names.len() != gates.len() {
            return invalid("one name per gate required".into());
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return invalid(format!("duplicate gate name `{n}`"));
            }
        }
        if output >= gates.len() {
            return invalid("output gate out of range".into());
        }
        let mut inputs = 0;
        for (id, g) in gates.iter().enumerate() {
            match g {
                Gate::Input(ineq) => {
                    if ineq.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: ineq.dim() });
                    }
                    inputs += 1;
                }
                Gate::Union(ch) | Gate::Intersection(ch) => {
                    if ch.is_empty() {
                        return invalid(format!("gate `{}` has no children", names[id]));
                    }
                    if let Some(&bad) = ch.iter().find(|&&c| c >= id) {
                        return invalid(format!(
                            "gate `{}` references gate {bad} which is not defined before it",
                            names[id]
                        ));
                    }
                }
            }
        }
        if inputs == 0 {
            return invalid("circuit has no input gates".into());
        }
        Ok(PolyhedraCircuit { dim, gates, names, output })
    }

    /// The circuit whose region is the polyhedron: one intersection over its rows.
    pub fn from_polyhedron(poly: &HPolyhedron) -> Result<Self> {
        union_circuit(std::slice::from_ref(poly))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn gate_id(&self, name: &str) -> Option<GateId> {
        self.names.iter().position(|n| n == name)
    }

    /// Input inequalities in gate order.
    pub fn leaves(&self) -> impl Iterator<Item = &LinearInequality> {
        self.gates.iter().filter_map(|g| match g {
            Gate::Input(ineq) => Some(ineq),
            _ => None,
        })
    }

    /// Gates that the output does not depend on.
    pub fn unused_gates(&self) -> Vec<GateId> {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for id in (0..self.gates.len()).rev() {
            if !live[id] {
                continue;
            }
            if let Gate::Union(ch) | Gate::Intersection(ch) = &self.gates[id] {
                for &c in ch {
                    live[c] = true;
                }
            }
        }
        (0..self.gates.len()).filter(|&i| !live[i]).collect()
    }

    /// Point membership in the output region. Strict leaves exclude their boundary.
    pub fn contains<F: Field>(&self, p: &Point<F>) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        let mut values = Vec::with_capacity(self.output + 1);
        for g in &self.gates[..=self.output] {
            let v = match g {
                Gate::Input(ineq) => ineq.holds(p)?,
                Gate::Union(ch) => ch.iter().any(|&c| values[c]),
                Gate::Intersection(ch) => ch.iter().all(|&c| values[c]),
            };
            values.push(v);
        }
        Ok(values[self.output])
    }

    fn map_leaves(&self, f: impl Fn(&LinearInequality) -> LinearInequality) -> Self {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(ineq) => Gate::Input(f(ineq)),
                other => other.clone(),
            })
            .collect();
        PolyhedraCircuit { gates, ..self.clone() }
    }

    /// Strict leaves `a·x < b` become `a·x ≤ b`; the region changes only on a
    /// measure-zero set.
    pub fn canonicalize_for_volume(&self) -> Self {
        self.map_leaves(LinearInequality::closed)
    }

    /// Strict leaves `a·x < b` become `a·x ≤ b - 1`; membership of every
    /// integer point is unchanged.
    pub fn canonicalize_for_lattice(&self) -> Self {
        self.map_leaves(LinearInequality::lattice_closed)
    }

    /// Same structure with every leaf's strictness replaced.
    pub fn with_leaf_strictness(&self, mut strict: impl FnMut(usize) -> bool) -> Self {
        let mut idx = 0;
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(ineq) => {
                    let s = strict(idx);
                    idx += 1;
                    Gate::Input(ineq.with_strict(s))
                }
                other => other.clone(),
            })
            .collect();
        PolyhedraCircuit { gates, ..self.clone() }
    }

    /// The complement region: leaves negated, unions and intersections swapped.
    pub fn complement(&self) -> Self {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(ineq) => Gate::Input(ineq.negated()),
                Gate::Union(ch) => Gate::Intersection(ch.clone()),
                Gate::Intersection(ch) => Gate::Union(ch.clone()),
            })
            .collect();
        PolyhedraCircuit { gates, ..self.clone() }
    }

    /// Intersection with the closed box `lo ≤ x ≤ hi`.
    pub fn clipped<F: Field>(&self, lo: &[F], hi: &[F]) -> Result<Self> {
        for side in [lo, hi] {
            if side.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: side.len() });
            }
        }
        let mut out = self.clone();
        let mut children = vec![self.output];
        for k in 0..self.dim {
            for (bound, sign) in [(&hi[k], 1i64), (&lo[k], -1i64)] {
                let q = bound.to_big_rational();
                let mut a = vec![BigInt::from(0); self.dim];
                a[k] = q.denom() * sign;
                let b = q.numer() * sign;
                let name = out.fresh_name(&format!("clip_{}_{}", if sign > 0 { "hi" } else { "lo" }, k + 1));
                out.gates.push(Gate::Input(LinearInequality::new(a, b, false)?));
                out.names.push(name);
                children.push(out.gates.len() - 1);
            }
        }
        let name = out.fresh_name("clipped");
        out.gates.push(Gate::Intersection(children));
        out.names.push(name);
        out.output = out.gates.len() - 1;
        Ok(out)
    }

    fn fresh_name(&self, base: &str) -> String {
        if !self.names.iter().any(|n| n == base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|cand| !self.names.iter().any(|n| n == cand))
            .expect("unbounded name supply")
    }

    /// One circuit whose region is the union of the given circuits' regions.
    pub fn union_of(parts: &[&PolyhedraCircuit]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyList)?;
        let dim = first.dim;
        let mut gates = Vec::new();
        let mut names = Vec::new();
        let mut outputs = Vec::with_capacity(parts.len());
        for (i, part) in parts.iter().enumerate() {
            if part.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: part.dim });
            }
            let offset = gates.len();
            for (g, n) in part.gates.iter().zip(&part.names) {
                gates.push(match g {
                    Gate::Input(ineq) => Gate::Input(ineq.clone()),
                    Gate::Union(ch) => Gate::Union(ch.iter().map(|c| c + offset).collect()),
                    Gate::Intersection(ch) => Gate::Intersection(ch.iter().map(|c| c + offset).collect()),
                });
                names.push(format!("r{}_{}", i + 1, n));
            }
            outputs.push(part.output + offset);
        }
        gates.push(Gate::Union(outputs));
        names.push("union".to_string());
        let output = gates.len() - 1;
        PolyhedraCircuit::new(dim, gates, names, output)
    }
}

/// One intersection gate per polyhedron over its rows, joined by a union output.
pub fn union_circuit(polys: &[HPolyhedron]) -> Result<PolyhedraCircuit> {
    let first = polys.first().ok_or(Error::EmptyList)?;
    let dim = first.dim();
    let mut gates = Vec::new();
    let mut names = Vec::new();
    let mut parts = Vec::with_capacity(polys.len());
    for (i, poly) in polys.iter().enumerate() {
        if poly.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: poly.dim() });
        }
        if poly.rows().is_empty() {
            return Err(Error::InvalidCircuit(format!("polyhedron {} has no rows", i + 1)));
        }
        let start = gates.len();
        for (j, row) in poly.rows().iter().enumerate() {
            gates.push(Gate::Input(row.clone()));
            names.push(format!("p{}_h{}", i + 1, j + 1));
        }
        gates.push(Gate::Intersection((start..gates.len()).collect()));
        names.push(format!("p{}", i + 1));
        parts.push(gates.len() - 1);
    }
    gates.push(Gate::Union(parts));
    names.push("union".to_string());
    let output = gates.len() - 1;
    PolyhedraCircuit::new(dim, gates, names, output)
}

impl fmt::Display for PolyhedraCircuit {
    /// Prints the circuit DSL; the output reparses to an identical circuit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for (g, name) in self.gates.iter().zip(&self.names) {
            match g {
                Gate::Input(ineq) => writeln!(f, "ineq {name}: {ineq}")?,
                Gate::Union(ch) | Gate::Intersection(ch) => {
                    let op = if matches!(g, Gate::Union(_)) { "or" } else { "and" };
                    write!(f, "gate {name}: {op}")?;
                    for &c in ch {
                        write!(f, " {}", self.names[c])?;
                    }
                    writeln!(f)?;
                }
            }
        }
        writeln!(f, "output {}", self.names[self.output])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type P = Point<BigRational>;

    pub(crate) const SEC3: &str = "\
# ((-x < -1) and (x <= 3)) or ((-x <= -2) and (x <= 5))
dim 1
ineq h1: -1 x1 < -1
ineq h2: 1 x1 <= 3
ineq h3: -1 x1 <= -2
ineq h4: 1 x1 <= 5
gate g1: and h1 h2
gate g2: and h3 h4
gate g3: or g1 g2
output g3
";

    fn sec3() -> PolyhedraCircuit {
        parse_circuit(SEC3).unwrap().circuit
    }

    fn half(p: &[i64]) -> P {
        Point::new(p.iter().map(|&v| BigRational::new(v.into(), 2.into())).collect())
    }

    #[test]
    fn sec3_membership() {
        let c = sec3();
        assert_eq!(c.gates().len(), 7);
        assert!(c.contains(&P::from_ints(&[4])).unwrap());
        assert!(!c.contains(&P::from_ints(&[1])).unwrap());
        assert!(c.contains(&P::from_ints(&[5])).unwrap());
        assert!(c.contains(&half(&[3])).unwrap());
        assert!(!c.contains(&half(&[11])).unwrap());
        assert!(c.contains(&P::from_ints(&[1, 2])).is_err());
    }

    #[test]
    fn volume_canonicalization() {
        let c = sec3();
        let v = c.canonicalize_for_volume();
        assert!(v.leaves().all(|l| !l.is_strict()));
        assert_eq!(v.leaves().next().unwrap(), &LinearInequality::le(&[-1], -1).unwrap());
        // closed version covers [1, 5]
        assert!(v.contains(&P::from_ints(&[1])).unwrap());
        assert!(v.contains(&P::from_ints(&[5])).unwrap());
        assert!(!v.contains(&half(&[1])).unwrap());
        let closed = v.canonicalize_for_volume();
        assert_eq!(closed, v);
    }

    #[test]
    fn lattice_canonicalization() {
        let c = sec3().canonicalize_for_lattice();
        assert_eq!(c.leaves().next().unwrap(), &LinearInequality::le(&[-1], -2).unwrap());
        assert_eq!(c.leaves().nth(1).unwrap(), &LinearInequality::le(&[1], 3).unwrap());
        let leaf = LinearInequality::lt(&[1], 1).unwrap().lattice_closed();
        assert_eq!(leaf, LinearInequality::le(&[1], 0).unwrap());
    }

    #[test]
    fn union_circuit_shapes() {
        let a = HPolyhedron::integer_box(&[0, 0], &[1, 1]).unwrap();
        let b = HPolyhedron::integer_box(&[2, 2], &[3, 3]).unwrap();
        let c = union_circuit(&[a.clone(), b]).unwrap();
        let inter = c.gates().iter().filter(|g| matches!(g, Gate::Intersection(_))).count();
        assert_eq!(inter, 2);
        assert!(matches!(&c.gates()[c.output()], Gate::Union(ch) if ch.len() == 2));
        let single = union_circuit(std::slice::from_ref(&a)).unwrap();
        assert!(matches!(&single.gates()[single.output()], Gate::Union(ch) if ch.len() == 1));
        let other = HPolyhedron::integer_box(&[0], &[1]).unwrap();
        assert!(matches!(union_circuit(&[a, other]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(union_circuit(&[]), Err(Error::EmptyList)));
    }

    #[test]
    fn complement_and_clip() {
        let c = sec3();
        let comp = c.complement();
        for x in -4..=16 {
            let p = half(&[x]);
            assert_ne!(c.contains(&p).unwrap(), comp.contains(&p).unwrap());
        }
        let lo = [BigRational::new(3.into(), 1.into())];
        let hi = [BigRational::new(9.into(), 2.into())];
        let clipped = c.clipped(&lo, &hi).unwrap();
        assert!(clipped.contains(&P::from_ints(&[4])).unwrap());
        assert!(clipped.contains(&half(&[9])).unwrap());
        assert!(!clipped.contains(&P::from_ints(&[5])).unwrap());
    }

    #[test]
    fn print_reparses_identically() {
        let c = sec3();
        let again = parse_circuit(&c.to_string()).unwrap().circuit;
        assert_eq!(c, again);
        let merged = PolyhedraCircuit::union_of(&[&c, &c.complement()]).unwrap();
        assert_eq!(parse_circuit(&merged.to_string()).unwrap().circuit, merged);
    }

    #[test]
    fn unused_gates_detected() {
        let text = "dim 1\nineq a: 1 x1 <= 1\nineq b: 1 x1 <= 2\noutput a\n";
        let parsed = parse_circuit(text).unwrap();
        assert_eq!(parsed.circuit.unused_gates(), vec![1]);
        assert_eq!(parsed.warnings.len(), 1);
    }

    fn arb_box() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
        proptest::collection::vec((-4i64..4, 0i64..4), 2).prop_map(|v| {
            (v.iter().map(|(l, _)| *l).collect(), v.iter().map(|(l, w)| l + w).collect())
        })
    }

    proptest! {
        #[test]
        fn union_circuit_is_pointwise_or(
            boxes in proptest::collection::vec(arb_box(), 1..4),
            px in -20i64..20, py in -20i64..20, den in 1i64..4,
        ) {
            let polys: Vec<HPolyhedron> = boxes
                .iter()
                .map(|(lo, hi)| HPolyhedron::integer_box(lo, hi).unwrap())
                .collect();
            let c = union_circuit(&polys).unwrap();
            let p = P::new(vec![BigRational::new(px.into(), den.into()), BigRational::new(py.into(), den.into())]);
            let expected = polys.iter().any(|poly| poly.contains(&p).unwrap());
            prop_assert_eq!(c.contains(&p).unwrap(), expected);
        }

        #[test]
        fn closing_leaves_only_grows_region(
            mask in 0u32..16, x2 in -4i64..16,
        ) {
            let c = sec3().with_leaf_strictness(|i| mask & (1 << i) != 0);
            let p = half(&[x2]);
            if c.contains(&p).unwrap() {
                prop_assert!(c.canonicalize_for_volume().contains(&p).unwrap());
            }
        }
    }
}
