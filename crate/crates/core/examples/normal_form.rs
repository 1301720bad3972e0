//! Reduction of depth-two functions to the I_{n-1,1} normal form.

use polygonal_mpl::mpl::{check_recipe, depth_normalize, Composition};

fn main() {
    for parts in [vec![2, 2], vec![1, 3], vec![2, 1, 1], vec![1, 2, 2]] {
        let c = Composition::new(parts).unwrap();
        match depth_normalize(&c) {
            Ok(r) => {
                println!("{} = {} terms, exact: {}", r.target.to_text(), r.rhs.len(), check_recipe(&r).unwrap());
                for (k, n) in r.counts_by_composition() {
                    println!("    {k}: {n}");
                }
            }
            Err(e) => println!("{c}: {e}"),
        }
    }
}
