//! Sweeps s across the boundary s = t and writes the spectrum as CSV.

use ptsym::cli::{sweep_grid, sweep_two_level, write_sweep_csv, SweepParam};
use ptsym::linalg::DEFAULT_TOL;
use ptsym::oracle::TwoByTwoParams;

fn main() -> ptsym::Result<()> {
    let base = TwoByTwoParams { r: 0.0, s: 0.0, t: 1.0, phi: 0.3 };
    let grid = sweep_grid(0.0, 2.0, 0.125)?;
    let rows = sweep_two_level(base, SweepParam::S, &grid, DEFAULT_TOL)?;
    write_sweep_csv(std::io::stdout().lock(), 2, &rows)?;
    Ok(())
}
