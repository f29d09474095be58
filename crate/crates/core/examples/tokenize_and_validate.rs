// Tokenize a hand-typed stream, show positional diagnostics, then
// round-trip a fixture through the canonical serializer.

use riffgauge::token::{parse, serialize, tokenize, validate};

const SLOPPY: &str = "tempo:120 start\nnew_measure time_signature:4:4\n  distorted0:note:s6:f3 nfx:bass:slide\n  drums:note:99 wait:3840\nend\n";

pub fn run_example() -> anyhow::Result<()> {
    let tokenized = tokenize(SLOPPY);
    println!("{} tokens accepted", tokenized.stream.len());
    for d in tokenized.diagnostics.iter().chain(validate(&tokenized.stream).iter()) {
        println!("  {d}");
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/songs/loose_whitespace.tokens.txt");
    let text = std::fs::read_to_string(path)?;
    let stream = parse(&text).map_err(|d| anyhow::anyhow!("{} diagnostics", d.len()))?;
    let canonical = serialize(&stream);
    let again = parse(&canonical).map_err(|d| anyhow::anyhow!("{} diagnostics", d.len()))?;
    anyhow::ensure!(again.tokens() == stream.tokens(), "round trip changed the tokens");
    anyhow::ensure!(serialize(&again) == canonical, "canonical form is not a fixed point");
    println!("round trip of {} tokens ok; canonical form:\n{canonical}", stream.len());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
