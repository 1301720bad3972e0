//! Weight-4 search on the octagon: cyclic orbits of IN_{3,1} and IN_4 over
//! quadrangle cells, relations modulo products.
//!
//! Not part of the test suite. Takes a minute or two:
//!
//!     cargo run --release --example weight4_octagon [max_unknowns]

use std::time::Instant;

use num_traits::Zero;

use polygonal_mpl::lab::{search, LabError, SearchLimits, SearchProblem};
use polygonal_mpl::mpl::Composition;
use polygonal_mpl::polygon::{count_by_comp, generate_ansatz, AnsatzOptions};

fn main() {
    let max_unknowns = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let comps = [Composition::new(vec![3, 1]).unwrap(), Composition::new(vec![4]).unwrap()];
    let t0 = Instant::now();
    let ts = generate_ansatz(8, &comps, &AnsatzOptions::default()).unwrap();
    println!("templates by composition: {:?}", count_by_comp(&ts));
    let p = SearchProblem::from_templates(&ts).unwrap();
    let limits = SearchLimits {
        max_unknowns,
        max_weight: 4,
    };
    match search(&p, &limits) {
        Ok(out) => {
            println!("{} symbol rows, rank {}, kernel dimension {}", out.rows, out.rank, out.vectors.len());
            let mut sizes: Vec<usize> = out.vectors.iter().map(|v| v.iter().filter(|c| !c.is_zero()).count()).collect();
            sizes.sort_unstable();
            println!("relation supports: {sizes:?}");
            if let Some((i, v)) = out.vectors.iter().enumerate().max_by_key(|(_, v)| v.iter().filter(|c| !c.is_zero()).count()) {
                println!("widest relation ({}):", out.identities[i].name);
                for (name, c) in out.names.iter().zip(v) {
                    if !c.is_zero() {
                        let k = name[1..].parse::<usize>().unwrap() - 1;
                        println!("  {c:>4} x {}", serde_json::to_string(&ts[k].to_json()).unwrap());
                    }
                }
            }
        }
        Err(e @ LabError::ScaleExceeded { .. }) => println!("{e}"),
        Err(e) => panic!("{e}"),
    }
    println!("{:.1}s", t0.elapsed().as_secs_f64());
}
