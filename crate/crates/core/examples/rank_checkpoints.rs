// Rank thirteen fine-tuning checkpoints from their per-metric KLD table.

use riffgauge::corpus::{rank_checkpoints, reports_from_csv};

pub fn run_example() -> anyhow::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/table1_kld.csv"))?;
    let reports = reports_from_csv(&text)?;
    let ranking = rank_checkpoints(&reports)?;
    for (metric, winner) in &ranking.per_metric_winner {
        println!("{:<5} {}", metric.key(), winner.as_deref().unwrap_or("-"));
    }
    let mut means: Vec<_> = ranking.overall_means.iter().collect();
    means.sort_by(|a, b| a.1.total_cmp(b.1));
    for (id, mean) in means.iter().take(3) {
        println!("{id:<9} mean {mean:.4}");
    }
    anyhow::ensure!(ranking.overall_winner.as_deref() == Some("epoch-15"));
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
