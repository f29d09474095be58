// All nine metrics for each hand-written fixture song.

use riffgauge::metrics::{compute_all, MetricId};
use riffgauge::score::build_score;
use riffgauge::token::parse;
use riffgauge::tuning::TuningSet;

pub fn run_example() -> anyhow::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/songs");
    let mut paths: Vec<_> = std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    paths.sort();

    print!("{:<28}", "song");
    for m in MetricId::ALL {
        print!("{:>8}", m.key());
    }
    println!();
    for path in paths {
        let stream = parse(&std::fs::read_to_string(&path)?).map_err(|d| anyhow::anyhow!("{d:?}"))?;
        let metrics = compute_all(&build_score(&stream, &TuningSet::default())?);
        print!("{:<28}", path.file_name().unwrap_or_default().to_string_lossy());
        for (_, value) in metrics.iter() {
            match value {
                Some(v) => print!("{v:>8.3}"),
                None => print!("{:>8}", "-"),
            }
        }
        println!();
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
