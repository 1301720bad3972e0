//! Linear relations among Li_2 at the cross-ratios of five points.

use std::collections::BTreeMap;

use polygonal_mpl::arith::{int, RatFunc};
use polygonal_mpl::lab::{search, SearchLimits, SearchProblem};
use polygonal_mpl::mpl::{func, Expression, FunctionTerm, Kind};
use polygonal_mpl::polygon::cyclic_ratio;

fn main() {
    let mut seen: BTreeMap<String, RatFunc> = BTreeMap::new();
    for a in 1..=5 {
        for b in a + 1..=5 {
            for c in b + 1..=5 {
                for d in c + 1..=5 {
                    for ix in [[a, b, c, d], [a, c, b, d], [a, b, d, c]] {
                        let f = cyclic_ratio(&ix, 5).unwrap();
                        seen.insert(f.to_string(), f);
                    }
                }
            }
        }
    }
    let mut p = SearchProblem::new(5);
    for (i, f) in seen.values().enumerate() {
        let mut e = Expression::new(5);
        e.push(FunctionTerm::new(int(1), func(Kind::Li, &[2], vec![f.clone()])));
        p.push(format!("g{i:02}"), e);
    }
    let out = search(&p, &SearchLimits::default()).unwrap();
    println!("{} generators, {} symbol rows, rank {}", out.names.len(), out.rows, out.rank);
    for id in &out.identities {
        println!("[{:?}] {}", id.status, id.expr.to_text().replace('\n', "  "));
    }
}
