//! The map `f(x) = x + u x^5` on `F_25`, `u^2 = 2`: additive, not of the
//! form `a x^(p^j) + b`, yet every direction lies in a union of three cosets
//! of `F_5^*`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::directions::{is_frobenius_linear, LinearizedMap};
use crate::error::Result;
use crate::field::{build_field, Element, FieldCtx, FieldSpec};
use crate::mult::{CosetSpec, CosetUnion};
use crate::search::check_p_bound;

/// `(a, b)` with `x = a + b u`, both in `0..5`.
pub type UCoords = (u32, u32);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F25Example {
    pub field: FieldSpec,
    /// Encoding of `u = 2t`.
    pub u: u32,
    pub fourth_powers: Vec<UCoords>,
    pub directions: Vec<UCoords>,
    pub direction_encodings: Vec<u32>,
    /// `uH + (1+u)H + (1-u)H` with `H = F_5^*`.
    pub cosets: CosetSpec,
    pub directions_inside: bool,
    pub frobenius_linear: bool,
    pub direction_count: u32,
    pub set_size: u64,
    pub triple_quotient_size: u64,
    pub p_bound: bool,
}

/// `a + b u` coordinates in `F_25` with `u = 2t`, `t^2 = 3`.
pub fn u_coords(field: &FieldCtx, x: Element) -> UCoords {
    let c = field.coeffs(x);
    // t = 3u since 2 * 3 = 1 mod 5
    (c[0], 3 * c[1] % 5)
}

/// `a+bu` with `b` printed as a signed residue, e.g. `2-2u`, `3u`, `4`.
pub fn format_u(coords: UCoords) -> String {
    let (a, b) = coords;
    let (sign, mag) = if b > 2 { ('-', 5 - b) } else { ('+', b) };
    let ubit = match mag {
        0 => String::new(),
        1 => "u".to_string(),
        m => format!("{m}u"),
    };
    match (a, mag) {
        (a, 0) => a.to_string(),
        (0, _) if b == 1 => "u".to_string(),
        (0, _) => format!("{b}u"),
        (a, _) => format!("{a}{sign}{ubit}"),
    }
}

pub fn f25_u(field: &FieldCtx) -> Element {
    field.from_coeffs(&[0, 2]).expect("t lies in F_25")
}

pub fn f25_example() -> Result<F25Example> {
    let field: Arc<FieldCtx> = build_field(5, 2)?;
    let u = f25_u(&field);
    let one = Element::ONE;
    let f = LinearizedMap::new(field.clone(), vec![one, u])?;
    let dirs = f.directions();
    let cosets = CosetUnion::closure_of(field.clone(), 6, [u, field.add(one, u), field.sub(one, u)])?;
    let fourth = CosetUnion::power_residues(field.clone(), 4)?;

    let mut fourth_powers: Vec<UCoords> = fourth.elements().into_iter().map(|x| u_coords(&field, x)).collect();
    fourth_powers.sort_unstable();
    let mut directions: Vec<UCoords> = dirs.slopes().into_iter().map(|x| u_coords(&field, x)).collect();
    directions.sort_unstable();
    Ok(F25Example {
        field: field.spec(),
        u: u.0,
        fourth_powers,
        directions,
        direction_encodings: dirs.slopes().iter().map(|x| x.0).collect(),
        cosets: cosets.spec(),
        directions_inside: dirs.is_subset_of(&cosets),
        frobenius_linear: is_frobenius_linear(&field, &f.table())?.is_some(),
        direction_count: dirs.len() as u32,
        set_size: cosets.len(),
        triple_quotient_size: cosets.triple_quotient_size(),
        p_bound: check_p_bound(5, 2, 6, cosets.r() as u64)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_squared_is_two() {
        let field = build_field(5, 2).unwrap();
        let u = f25_u(&field);
        assert_eq!(u, Element(10));
        assert_eq!(field.mul(u, u), Element(2));
        assert_eq!(u_coords(&field, u), (0, 1));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_u((4, 0)), "4");
        assert_eq!(format_u((2, 3)), "2-2u");
        assert_eq!(format_u((0, 3)), "3u");
        assert_eq!(format_u((0, 2)), "2u");
        assert_eq!(format_u((1, 1)), "1+u");
        assert_eq!(format_u((1, 4)), "1-u");
    }
}
