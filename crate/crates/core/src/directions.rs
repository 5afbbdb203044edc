//! Directions determined by point sets and functions in `AG(2, q)`.
//!
//! The direction set of `U = {(x_i, y_i)}` is the set of slopes
//! `(y_j - y_i) / (x_j - x_i)` over pairs of distinct points, with `inf`
//! recorded for vertical pairs. For the graph of `f` this is the set of secant
//! slopes, which never contains `inf`.
//!
//! Additive maps are handled through [`LinearizedMap`], `f(x) = sum c_i
//! x^(p^i)`. For those every difference quotient collapses to `f(u)/u` with
//! `u = x - y`, so their direction set costs `q - 1` evaluations instead of
//! `q^2 / 2`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::field::{Element, FieldCtx};
use crate::mult::CosetUnion;

pub use crate::mult::triple_quotient_size;

/// Subset of `F_q` plus an optional vertical direction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectionSet {
    slopes: Bitset,
    infinity: bool,
}

/// Wire form: sorted slope encodings and the infinity flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionSetSpec {
    pub slopes: Vec<u32>,
    pub infinity: bool,
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_set();
        list.entries(self.slopes.iter());
        if self.infinity {
            list.entry(&"inf");
        }
        list.finish()
    }
}

impl DirectionSet {
    pub fn empty(field: &FieldCtx) -> Self {
        DirectionSet { slopes: Bitset::new(field.q() as usize), infinity: false }
    }

    pub fn from_slopes(field: &FieldCtx, slopes: impl IntoIterator<Item = Element>, infinity: bool) -> Self {
        let mut set = Self::empty(field);
        for s in slopes {
            set.insert(s);
        }
        set.infinity = infinity;
        set
    }

    #[inline]
    pub fn insert(&mut self, slope: Element) -> bool {
        self.slopes.insert(slope.0 as usize)
    }

    pub fn insert_infinity(&mut self) {
        self.infinity = true;
    }

    #[inline]
    pub fn contains(&self, slope: Element) -> bool {
        self.slopes.contains(slope.0 as usize)
    }

    pub fn has_infinity(&self) -> bool {
        self.infinity
    }

    /// `|slopes| + [inf]`.
    pub fn len(&self) -> usize {
        self.slopes.count() + self.infinity as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Finite slopes in increasing encoding order.
    pub fn slopes(&self) -> Vec<Element> {
        self.slopes.iter().map(|i| Element(i as u32)).collect()
    }

    pub fn is_subset_of(&self, set: &CosetUnion) -> bool {
        !self.infinity && self.slopes.iter().all(|s| set.contains(Element(s as u32)))
    }

    /// `c * D`; the vertical direction is fixed.
    pub fn scaled(&self, field: &FieldCtx, c: Element) -> Self {
        Self::from_slopes(field, self.slopes().into_iter().map(|s| field.mul(c, s)), self.infinity)
    }

    pub fn spec(&self) -> DirectionSetSpec {
        DirectionSetSpec { slopes: self.slopes.iter().map(|s| s as u32).collect(), infinity: self.infinity }
    }
}

/// A duplicate-free set of points of `AG(2, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<(Element, Element)>,
}

impl PointSet {
    pub fn new(points: Vec<(Element, Element)>) -> Result<Self> {
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint);
        }
        Ok(PointSet { points })
    }

    /// `{(x, f(x))}` for a value table indexed by encoding.
    pub fn graph(table: &[Element]) -> Self {
        PointSet { points: table.iter().enumerate().map(|(x, &y)| (Element(x as u32), y)).collect() }
    }

    pub fn points(&self) -> &[(Element, Element)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn directions_of_point_set(field: &FieldCtx, set: &PointSet) -> Result<DirectionSet> {
    let pts = set.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let mut out = DirectionSet::empty(field);
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        for &(xj, yj) in &pts[i + 1..] {
            let dx = field.sub(xj, xi);
            if dx.is_zero() {
                out.insert_infinity();
            } else {
                out.insert(field.div(field.sub(yj, yi), dx)?);
            }
        }
    }
    Ok(out)
}

fn check_table(field: &FieldCtx, table: &[Element]) -> Result<()> {
    if table.len() != field.q() as usize {
        return Err(Error::TableLength { got: table.len(), expected: field.q() as usize });
    }
    if let Some(bad) = table.iter().find(|y| y.0 >= field.q()) {
        return Err(Error::ElementOutOfRange { value: bad.0 as u64, q: field.q() as u64 });
    }
    Ok(())
}

/// Secant slopes of the graph of `f`, given as a length-`q` value table.
pub fn directions_of_function(field: &FieldCtx, table: &[Element]) -> Result<DirectionSet> {
    check_table(field, table)?;
    let mut out = DirectionSet::empty(field);
    let q = field.q();
    for x in 0..q {
        let fx = table[x as usize];
        for y in x + 1..q {
            let dx = field.sub(Element(y), Element(x));
            let dy = field.sub(table[y as usize], fx);
            out.insert(field.div(dy, dx)?);
        }
    }
    Ok(out)
}

/// `f(x + y) = f(x) + f(y)` for all pairs, stopping at the first failure.
pub fn is_additive(field: &FieldCtx, table: &[Element]) -> Result<bool> {
    check_table(field, table)?;
    for x in field.elements() {
        let fx = table[x.0 as usize];
        for y in field.elements() {
            if table[field.add(x, y).0 as usize] != field.add(fx, table[y.0 as usize]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `f(x) = a x^(p^j) + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusWitness {
    pub a: Element,
    pub j: u32,
    pub b: Element,
}

/// Finds `(a, j, b)` with `f(x) = a x^(p^j) + b`. The constant map gets
/// `a = 0, j = 0`; otherwise the witness is unique. Candidate `j` come from
/// interpolating `f(1)` and `f(g)` and are then checked at every point.
pub fn is_frobenius_linear(field: &FieldCtx, table: &[Element]) -> Result<Option<FrobeniusWitness>> {
    check_table(field, table)?;
    let b = table[0];
    let a = field.sub(table[1], b);
    if a.is_zero() {
        let constant = table.iter().all(|&y| y == b);
        return Ok(constant.then_some(FrobeniusWitness { a, j: 0, b }));
    }
    let g = field.generator();
    let fg = field.sub(table[g.0 as usize], b);
    for j in 0..field.n() {
        if field.mul(a, field.frobenius(g, j)) != fg {
            continue;
        }
        let fits = field.elements().all(|x| table[x.0 as usize] == field.add(field.mul(a, field.frobenius(x, j)), b));
        if fits {
            return Ok(Some(FrobeniusWitness { a, j, b }));
        }
    }
    Ok(None)
}

/// An additive map `f(x) = sum_i c_i x^(p^i)` on `F_{p^n}`.
#[derive(Clone)]
pub struct LinearizedMap {
    field: Arc<FieldCtx>,
    coeffs: Vec<Element>,
}

impl fmt::Debug for LinearizedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearizedMap{:?}", self.coeffs.iter().map(|c| c.0).collect::<Vec<_>>())
    }
}

impl PartialEq for LinearizedMap {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl Eq for LinearizedMap {}

impl LinearizedMap {
    pub fn new(field: Arc<FieldCtx>, coeffs: Vec<Element>) -> Result<Self> {
        if coeffs.len() != field.n() as usize {
            return Err(Error::ParamOutOfRange(format!(
                "a linearized map on F_{} needs {} coefficients, got {}",
                field.q(),
                field.n(),
                coeffs.len()
            )));
        }
        for c in &coeffs {
            field.element(c.0 as u64)?;
        }
        Ok(LinearizedMap { field, coeffs })
    }

    /// `x -> c x^(p^j)`.
    pub fn monomial(field: Arc<FieldCtx>, c: Element, j: u32) -> Result<Self> {
        let mut coeffs = vec![Element::ZERO; field.n() as usize];
        coeffs[(j % field.n()) as usize] = c;
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn coeff_encodings(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    #[inline]
    pub fn eval(&self, x: Element) -> Element {
        let f = &*self.field;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Element::ZERO, |acc, (i, &c)| f.add(acc, f.mul(c, f.frobenius(x, i as u32))))
    }

    pub fn table(&self) -> Vec<Element> {
        self.field.elements().map(|x| self.eval(x)).collect()
    }

    /// `{f(x)/x : x != 0}`.
    pub fn directions(&self) -> DirectionSet {
        let f = &*self.field;
        let mut out = DirectionSet::empty(f);
        for x in f.nonzero() {
            out.insert(f.div(self.eval(x), x).expect("x nonzero"));
        }
        out
    }

    /// `(c, j)` when exactly one coefficient `c = c_j` is nonzero.
    pub fn monomial_part(&self) -> Option<(Element, u32)> {
        let mut nonzero = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let (j, &c) = nonzero.next()?;
        nonzero.next().is_none().then_some((c, j as u32))
    }

    /// `x -> c f(x)`.
    pub fn scaled(&self, c: Element) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(c, a)).collect();
        LinearizedMap { field: self.field.clone(), coeffs }
    }

    /// `sigma o f o sigma^-1` for the Frobenius `sigma`: every coefficient
    /// raised to the `p`-th power.
    pub fn frobenius_conjugate(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.field.frobenius(a, 1)).collect();
        LinearizedMap { field: self.field.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn point_set_examples() {
        let f = build_field(5, 1).unwrap();
        let e = |k: u32| Element(k);
        let vertical = PointSet::new(vec![(e(0), e(0)), (e(0), e(1))]).unwrap();
        let d = directions_of_point_set(&f, &vertical).unwrap();
        assert!(d.has_infinity());
        assert_eq!(d.len(), 1);
        let line = PointSet::new(vec![(e(0), e(0)), (e(1), e(1)), (e(2), e(2))]).unwrap();
        assert_eq!(directions_of_point_set(&f, &line).unwrap().slopes(), vec![e(1)]);
        assert_eq!(directions_of_point_set(&f, &PointSet::new(vec![(e(0), e(0))]).unwrap()), Err(Error::TooFewPoints));
        assert_eq!(PointSet::new(vec![(e(1), e(1)), (e(1), e(1))]), Err(Error::DuplicatePoint));
    }

    #[test]
    fn squares_over_f5_determine_every_direction() {
        let f = build_field(5, 1).unwrap();
        let table: Vec<Element> = f.elements().map(|x| f.mul(x, x)).collect();
        let d = directions_of_function(&f, &table).unwrap();
        assert_eq!(d.slopes(), f.elements().collect::<Vec<_>>());
        assert!(!d.has_infinity());
        assert_eq!(d, directions_of_point_set(&f, &PointSet::graph(&table)).unwrap());
        assert!(!is_additive(&f, &table).unwrap());
    }

    #[test]
    fn identity_constant_and_zero_maps() {
        let f = build_field(3, 2).unwrap();
        let id: Vec<Element> = f.elements().collect();
        assert_eq!(directions_of_function(&f, &id).unwrap().slopes(), vec![Element::ONE]);
        let constant = vec![Element(4); 9];
        assert_eq!(directions_of_function(&f, &constant).unwrap().slopes(), vec![Element::ZERO]);
        let zero = LinearizedMap::new(f.clone(), vec![Element::ZERO; 2]).unwrap();
        assert_eq!(zero.directions().slopes(), vec![Element::ZERO]);
        let c = Element(5);
        let scalar = LinearizedMap::monomial(f.clone(), c, 0).unwrap();
        assert_eq!(scalar.directions().slopes(), vec![c]);
        assert!(is_additive(&f, &scalar.table()).unwrap());
        assert!(matches!(directions_of_function(&f, &id[..4]), Err(Error::TableLength { got: 4, expected: 9 })));
    }

    #[test]
    fn frobenius_linear_witnesses() {
        let f = build_field(3, 2).unwrap();
        let affine: Vec<Element> = f.elements().map(|x| f.add(f.mul(Element(2), x), Element(1))).collect();
        assert_eq!(
            is_frobenius_linear(&f, &affine).unwrap(),
            Some(FrobeniusWitness { a: Element(2), j: 0, b: Element(1) })
        );
        let frob: Vec<Element> = f.elements().map(|x| f.frobenius(x, 1)).collect();
        assert_eq!(
            is_frobenius_linear(&f, &frob).unwrap(),
            Some(FrobeniusWitness { a: Element::ONE, j: 1, b: Element::ZERO })
        );
        let constant = vec![Element(7); 9];
        assert_eq!(
            is_frobenius_linear(&f, &constant).unwrap(),
            Some(FrobeniusWitness { a: Element::ZERO, j: 0, b: Element(7) })
        );
        let square: Vec<Element> = f.elements().map(|x| f.mul(x, x)).collect();
        assert_eq!(is_frobenius_linear(&f, &square).unwrap(), None);
    }

    #[test]
    fn frobenius_power_directions_are_power_residues() {
        for &(p, n) in &[(3u64, 2u32), (5, 2), (2, 4), (3, 3)] {
            let f = build_field(p, n).unwrap();
            for j in 0..n {
                let map = LinearizedMap::monomial(f.clone(), Element::ONE, j).unwrap();
                let k = p.pow(j) - 1;
                let want = if k == 0 {
                    vec![Element::ONE]
                } else {
                    CosetUnion::power_residues(f.clone(), k).unwrap().elements()
                };
                assert_eq!(map.directions().slopes(), want, "F_{} j={j}", f.q());
            }
        }
    }

    #[test]
    fn monomial_part_and_conjugation() {
        let f = build_field(5, 2).unwrap();
        let m = LinearizedMap::monomial(f.clone(), Element(7), 1).unwrap();
        assert_eq!(m.monomial_part(), Some((Element(7), 1)));
        let mixed = LinearizedMap::new(f.clone(), vec![Element(1), Element(10)]).unwrap();
        assert_eq!(mixed.monomial_part(), None);
        let conj = mixed.frobenius_conjugate();
        for x in f.elements() {
            let lhs = conj.eval(f.frobenius(x, 1));
            let rhs = f.frobenius(mixed.eval(x), 1);
            assert_eq!(lhs, rhs);
        }
        assert!(LinearizedMap::new(f, vec![Element(1)]).is_err());
    }
}
