//! Writes a seeded completion instance in the binary dump format and reads
//! the header back.
//!
//! cargo run --example dump_instance -- [path]

use psdmanopt::cost::{write_dump, CompletionCost, DumpKind};
use psdmanopt::random::seeded;
use std::io::Write;

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "completion.dump".into());
    let cost = CompletionCost::planted(50, 3, 0.4, &mut seeded(8)).unwrap();
    let mut buf = Vec::new();
    write_dump(&mut buf, DumpKind::Completion(&cost))?;
    std::fs::File::create(&path)?.write_all(&buf)?;
    let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    let kind = u32::from_le_bytes(buf[12..16].try_into().unwrap());
    let n = u64::from_le_bytes(buf[16..24].try_into().unwrap());
    let nnz = u64::from_le_bytes(buf[24..32].try_into().unwrap());
    println!("{path}: {} bytes, version {version}, kind {kind}, n {n}, {nnz} samples", buf.len());
    Ok(())
}
