//! Little-endian binary dump of a generated instance.
//!
//! Layout: the 8 bytes `PSDMDUMP`, a `u32` format version (1), a `u32` kind
//! tag, then kind-specific fields. Complex numbers are two `f64` (re, im),
//! matrices are column-major, sampled entries are `u32` pairs (row, col).
//!
//! * kind 0, eig: `u64 n, u64 r`, factor `G` (n x r).
//! * kind 1, completion: `u64 n, u64 nnz`, entries, `nnz` complex values.
//! * kind 2, phaselift: `u64 n, u64 masks`, masks (n each), `n * masks` f64 intensities.
//! * kind 3, interferometry: `u64 m, u64 n`, `F` (m x n), `d` (m),
//!   `u64 nnz`, entries, `nnz` complex values.

use super::{CompletionCost, EigCost, InterferometryCost, Pattern, PhaseLiftCost};
use crate::kernel::C64;
use std::io::{self, Write};

pub enum DumpKind<'a> {
    Eig(&'a EigCost),
    Completion(&'a CompletionCost),
    PhaseLift(&'a PhaseLiftCost),
    Interferometry(&'a InterferometryCost),
}

fn u64le(w: &mut impl Write, v: usize) -> io::Result<()> {
    w.write_all(&(v as u64).to_le_bytes())
}

fn complex(w: &mut impl Write, vals: impl IntoIterator<Item = C64>) -> io::Result<()> {
    for z in vals {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn pattern(w: &mut impl Write, p: &Pattern) -> io::Result<()> {
    u64le(w, p.len())?;
    for (i, j) in p.entries() {
        w.write_all(&(i as u32).to_le_bytes())?;
        w.write_all(&(j as u32).to_le_bytes())?;
    }
    Ok(())
}

pub fn write_dump(w: &mut impl Write, kind: DumpKind<'_>) -> io::Result<()> {
    w.write_all(b"PSDMDUMP")?;
    w.write_all(&1u32.to_le_bytes())?;
    match kind {
        DumpKind::Eig(cost) => {
            let g = cost.target_factor();
            w.write_all(&0u32.to_le_bytes())?;
            u64le(w, g.nrows())?;
            u64le(w, g.ncols())?;
            complex(w, g.iter().copied())
        }
        DumpKind::Completion(cost) => {
            w.write_all(&1u32.to_le_bytes())?;
            u64le(w, cost.pattern().dim())?;
            pattern(w, cost.pattern())?;
            complex(w, cost.values().iter().copied())
        }
        DumpKind::PhaseLift(cost) => {
            w.write_all(&2u32.to_le_bytes())?;
            let masks = cost.masks();
            u64le(w, masks[0].len())?;
            u64le(w, masks.len())?;
            for m in masks {
                complex(w, m.iter().copied())?;
            }
            for b in cost.intensities() {
                w.write_all(&b.to_le_bytes())?;
            }
            Ok(())
        }
        DumpKind::Interferometry(cost) => {
            w.write_all(&3u32.to_le_bytes())?;
            let f = cost.matrix();
            u64le(w, f.nrows())?;
            u64le(w, f.ncols())?;
            complex(w, f.iter().copied())?;
            complex(w, cost.data().iter().copied())?;
            pattern(w, cost.pattern())?;
            complex(w, cost.values().iter().copied())
        }
    }
}
