// The whole evaluation loop through the command line: generate two
// checkpoints from the canonical prompt, tabulate metrics, compare each
// against the reference corpus, rank, and plot.

use std::path::Path;

use riffgauge::cli::run;

fn cli(args: &[&str]) -> anyhow::Result<String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("riffgauge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    anyhow::ensure!(code == 0, "{args:?} exited {code}: {}", String::from_utf8_lossy(&err));
    Ok(String::from_utf8(out)?)
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

pub fn run_example() -> anyhow::Result<()> {
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus");
    let work = tempfile::tempdir()?;
    let dir = work.path();

    cli(&[
        "generate",
        "--corpus",
        corpus,
        "--save-model",
        p(&dir.join("model.json")),
        "--canonical",
        "--out",
        p(&dir.join("gen")),
        "-n",
        "1",
    ])?;
    for (checkpoint, temperature) in [("cool", "0.7"), ("warm", "1.2")] {
        let out = dir.join(checkpoint);
        cli(&[
            "generate",
            "--model",
            p(&dir.join("model.json")),
            "--canonical",
            "--checkpoint",
            checkpoint,
            "--temperature",
            temperature,
            "-n",
            "12",
            "--seed",
            "42",
            "--out",
            p(&out),
        ])?;
        cli(&["validate", p(&out)])?;
        cli(&["metrics", p(&out), "--out", p(&dir.join(format!("{checkpoint}.csv")))])?;
        cli(&["compare", corpus, p(&out), "--out", p(&dir.join(format!("{checkpoint}.json")))])?;
    }
    cli(&["metrics", corpus, "--out", p(&dir.join("reference.csv"))])?;
    print!(
        "{}",
        cli(&["rank", p(&dir.join("cool.json")), p(&dir.join("warm.json")), "--out", p(&dir.join("rank.json"))])?
    );
    cli(&[
        "plot",
        p(&dir.join("reference.csv")),
        p(&dir.join("cool.csv")),
        p(&dir.join("warm.csv")),
        "--metric",
        "pce",
        "--out",
        p(&dir.join("pce.svg")),
    ])?;
    println!("{}", std::fs::read_to_string(dir.join("rank.json"))?);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
