//! The general 2x2 PT-symmetric Hamiltonian: closed forms against the
//! numerical pipeline.

use ptsym::construction::PtSystem;
use ptsym::linalg::DEFAULT_TOL;
use ptsym::oracle::{eig2, h2, p2, vec2, TwoByTwoParams};
use ptsym::spectral::classify_phase;

fn main() -> ptsym::Result<()> {
    let pr = TwoByTwoParams { r: 0.5, s: 0.6, t: 1.0, phi: 0.8 };
    let sys = PtSystem::new(h2(&pr), p2(pr.phi))?;
    let data = classify_phase(&sys, DEFAULT_TOL)?;
    let (ep, em) = eig2(&pr);
    println!("closed form: e+ = {ep:.12}, e- = {em:.12}");
    for (pair, sign) in data.pairs.iter().zip(&data.pt_norm_signs) {
        println!("numeric:     {:.12}  PT norm sign {sign:+}  residual {:.1e}", pair.value, pair.residual);
    }
    let (plus, minus) = vec2(&pr)?;
    for (name, v) in [("|e+)", &plus), ("|e-)", &minus)] {
        println!("{name} = ({:.6}, {:.6})", v[0], v[1]);
    }

    for s in [0.9, 0.99, 1.0, 1.2] {
        let pr = TwoByTwoParams { s, ..pr };
        let phase = classify_phase(&PtSystem::new(h2(&pr), p2(pr.phi))?, DEFAULT_TOL)?.phase;
        println!("s = {s:<5} -> {}", phase.tag());
    }
    Ok(())
}
