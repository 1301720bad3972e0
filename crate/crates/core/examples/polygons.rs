//! Quadrangulations, mixed dissections and the leading octagon orbit.

use polygonal_mpl::lab::catalog::q5_first_template;
use polygonal_mpl::polygon::{enumerate_even_dissections, enumerate_quadrangulations, instantiate, orbit_period};

fn main() {
    for n in [4, 6, 8, 10, 12] {
        println!("{n}-gon: {} quadrangulations", enumerate_quadrangulations(n).unwrap().len());
    }
    for d in enumerate_even_dissections(8, &[4, 6]).unwrap() {
        println!("8-gon [4,6]: {:?}", d.cells());
    }
    let t = q5_first_template();
    println!("template: {}", serde_json::to_string(&t.to_json()).unwrap());
    println!("orbit period {}", orbit_period(&t));
    println!("{}", instantiate(&t).unwrap().to_text());
}
