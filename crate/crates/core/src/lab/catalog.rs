//! Named identities: small verified fixtures and metadata for the large
//! polygon identities whose full term lists are not shipped.

use super::{Identity, Status};
use crate::arith::{int, parse_ratfunc, BigRat};
use crate::mpl::{func, Composition, Expression, FunctionTerm, Kind};
use crate::polygon::{cyclic_ratio, instantiate, DecoratedCell, Symmetrize, TermTemplate};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub weight: usize,
    pub description: &'static str,
    pub identity: Option<Identity>,
    pub polygon: Option<usize>,
    pub orbits: Option<usize>,
    /// Functions appearing in the identity, as `IN_{...}` names.
    pub functions: &'static [&'static str],
}

/// Σ over the five cyclic rotations of `Li_2` at the cyclic ratio
/// `[x_i, x_{i+1}, x_{i+2}, x_{i+3}]`, points `x1..x5`.
pub fn five_term() -> Expression {
    let mut e = Expression::new(5);
    for j in 0..5 {
        let idx: Vec<usize> = (0..4).map(|k| (j + k) % 5 + 1).collect();
        let r = cyclic_ratio(&idx, 5).expect("valid indices");
        e.push(FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![r])));
    }
    e
}

fn li2_pair(a: &str, b: &str) -> Expression {
    let mut e = Expression::new(1);
    for s in [a, b] {
        e.push(FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![parse_ratfunc(s, 1).unwrap()])));
    }
    e
}

/// `I(0; a1..an; 1) = (−1)^n I(0; 1−an, …, 1−a1; 1)` for a depth-3, weight-3
/// word with nonzero letters.
fn reversal() -> Expression {
    let n = 3;
    let rf = |s: &str| parse_ratfunc(s, n).unwrap();
    let mut e = Expression::new(n);
    e.push(FunctionTerm::new(int(1), func(Kind::I, &[1, 1, 1], vec![rf("x1"), rf("x2"), rf("x3")])));
    e.push(FunctionTerm::new(
        int(1),
        func(Kind::I, &[1, 1, 1], vec![rf("1 - x3"), rf("1 - x2"), rf("1 - x1")]),
    ));
    e
}

/// The leading orbit of the weight-5 octagon identity.
pub fn q5_first_template() -> TermTemplate {
    let cell = |v: &[usize], order| DecoratedCell {
        vertices: v.to_vec(),
        anchor: 1,
        order,
    };
    TermTemplate {
        coeff: BigRat::from_integer((-4).into()),
        kind: Kind::IN,
        comp: Composition::new(vec![3, 1, 1]).expect("composition"),
        cells: vec![cell(&[1, 2, 3, 4], 1), cell(&[1, 4, 5, 6], 2), cell(&[1, 6, 7, 8], 3)],
        symmetrize: Symmetrize::Cyclic,
        polygon: 8,
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    let verified = |name: &str, e: Expression| Some(Identity::new(name, e, Status::Verified));
    let mut q5 = Identity::new(
        "Q5-first-orbit",
        instantiate(&q5_first_template()).expect("valid template"),
        Status::Conjectured,
    );
    q5.polygon = Some(8);
    vec![
        CatalogEntry {
            name: "fiveterm",
            weight: 2,
            description: "five-term relation of the dilogarithm on five points",
            identity: verified("fiveterm", five_term()),
            polygon: Some(5),
            orbits: Some(1),
            functions: &["Li_2"],
        },
        CatalogEntry {
            name: "inversion",
            weight: 2,
            description: "Li_2(x) + Li_2(1/x)",
            identity: verified("inversion", li2_pair("x1", "1/x1")),
            polygon: None,
            orbits: None,
            functions: &["Li_2"],
        },
        CatalogEntry {
            name: "reflection",
            weight: 2,
            description: "Li_2(x) + Li_2(1 - x)",
            identity: verified("reflection", li2_pair("x1", "1 - x1")),
            polygon: None,
            orbits: None,
            functions: &["Li_2"],
        },
        CatalogEntry {
            name: "reversal",
            weight: 3,
            description: "I_{1,1,1}(x,y,z) + I_{1,1,1}(1-z,1-y,1-x), path reversal composed with t -> 1-t",
            identity: verified("reversal", reversal()),
            polygon: None,
            orbits: None,
            functions: &["I_{1,1,1}"],
        },
        CatalogEntry {
            name: "Q5",
            weight: 5,
            description: "weight 5 octagon identity; only the leading orbit (coefficient -4) is shipped",
            identity: Some(q5),
            polygon: Some(8),
            orbits: None,
            functions: &["IN_{3,1,1}", "IN_{3,2}", "IN_{4,1}", "IN_{5}"],
        },
        CatalogEntry {
            name: "Q6",
            weight: 6,
            description: "weight 6 decagon identity (metadata only)",
            identity: None,
            polygon: Some(10),
            orbits: None,
            functions: &["IN_{4,1,1}", "IN_{4,2}", "IN_{5,1}", "IN_{6}"],
        },
        CatalogEntry {
            name: "Q6^4",
            weight: 6,
            description: "cyclically symmetric weight 6, depth 4 identity on 12 points (metadata only)",
            identity: None,
            polygon: Some(12),
            orbits: Some(168),
            functions: &[],
        },
        CatalogEntry {
            name: "Q7",
            weight: 7,
            description: "cyclically symmetric weight 7, depth 4 identity on 12 points (metadata only)",
            identity: None,
            polygon: Some(12),
            orbits: Some(121),
            functions: &[
                "IN_{4,1,1,1}",
                "IN_{5,1,1}",
                "IN_{4,2,1}",
                "IN_{6,1}",
                "IN_{5,2}",
                "IN_{4,3}",
                "IN_{7}",
            ],
        },
    ]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::verify;

    #[test]
    fn shipped_fixtures_verify() {
        for e in catalog() {
            if let Some(id) = &e.identity {
                if id.status == Status::Verified {
                    assert!(verify(&id.expr).unwrap().is_verified(), "{} fails", e.name);
                }
            }
        }
    }

    #[test]
    fn lookup() {
        assert!(catalog_entry("fiveterm").is_some());
        assert!(catalog_entry("q6^4").is_some());
        assert!(catalog_entry("nothing").is_none());
    }
}
