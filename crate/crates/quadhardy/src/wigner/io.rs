//! Serialization of sampled Wigner grids.
//!
//! Two dump formats are provided:
//!
//! * CSV — one row per lattice point. Self-pair grids write
//!   `x,xi,value`; cross grids write `x,xi,re,im`. Numbers are printed
//!   with 17 significant digits so round-tripping through text is exact.
//! * Binary — a fixed little-endian header (`dim_n: u64`, `samples: u64`,
//!   `extent: f64`, `hbar: f64`) followed by row-major `f64` values.
//!   Restricted to real (self-pair) grids on the base momentum lattice,
//!   so the header fully determines the geometry.

use std::io::Write;

use crate::error::{Error, Result};
use crate::wigner::WignerGrid;

/// Write a grid as CSV with a header line.
pub fn write_csv<W: Write>(grid: &WignerGrid, out: &mut W) -> Result<()> {
    let bins = grid.xi_bins();
    if grid.is_self_pair() {
        writeln!(out, "x,xi,value")?;
        for i in 0..grid.spec().samples() {
            let x = grid.spec().x_at(i);
            for j in 0..bins {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x, grid.xi_at(j), grid.value(i, j).re)?;
            }
        }
    } else {
        writeln!(out, "x,xi,re,im")?;
        for i in 0..grid.spec().samples() {
            let x = grid.spec().x_at(i);
            for j in 0..bins {
                let v = grid.value(i, j);
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    x,
                    grid.xi_at(j),
                    v.re,
                    v.im
                )?;
            }
        }
    }
    Ok(())
}

/// Write a real grid as a compact binary dump: header
/// `dim_n (u64 LE), samples (u64 LE), extent (f64 LE), hbar (f64 LE)`
/// followed by `samples * samples` row-major `f64` values.
///
/// Only self-pair grids on the base momentum lattice qualify — the
/// four-field header must reconstruct the lattice exactly.
pub fn write_binary<W: Write>(grid: &WignerGrid, out: &mut W) -> Result<()> {
    if !grid.is_self_pair() {
        return Err(Error::InvalidArgument(
            "binary dumps are defined for real (self-pair) grids".into(),
        ));
    }
    if grid.xi_refine() != 1 {
        return Err(Error::InvalidArgument(
            "binary dumps require the base momentum lattice (xi_refine = 1)".into(),
        ));
    }
    let spec = grid.spec();
    out.write_all(&(spec.dim_n() as u64).to_le_bytes())?;
    out.write_all(&(spec.samples() as u64).to_le_bytes())?;
    out.write_all(&spec.extent().to_le_bytes())?;
    out.write_all(&spec.hbar().to_le_bytes())?;
    for v in grid.values() {
        out.write_all(&v.re.to_le_bytes())?;
    }
    Ok(())
}
