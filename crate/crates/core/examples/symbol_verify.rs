//! Symbol of the five-term relation and its check modulo products.

use polygonal_mpl::lab::catalog::five_term;
use polygonal_mpl::lab::{symbol_and_residue, verify, Verdict};

fn main() {
    let e = five_term();
    println!("{}", e.to_text());
    let (reg, sym, residue) = symbol_and_residue(&e).expect("convergent terms");
    println!("symbol: {} terms over {} letters", sym.len(), reg.live_letters().len());
    println!("residue mod products: {} terms", residue.len());

    let mut broken = e.clone();
    broken.terms.pop();
    match verify(&broken).unwrap() {
        Verdict::Verified => println!("four terms: verified?!"),
        Verdict::Refuted { residue } => println!("four terms: refuted, {} residue terms", residue.len()),
    }
}
