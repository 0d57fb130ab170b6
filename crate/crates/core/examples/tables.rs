//! Prints the directed PH, PH and SD tables of the bundled example corpus.
//!
//! `cargo run --release -p stl-distance --example tables`

use std::time::Instant;

use stl_distance::aos::{aos, AosConfig};
use stl_distance::ingest::load_corpus;
use stl_distance::ph::{directed_ph, PhConfig};
use stl_distance::sd::{sd_boxsets, Normalizer};
use stl_distance::{Rational, Scalar};

fn print(title: &str, names: &[&str], cell: impl Fn(usize, usize) -> Rational) {
    println!("{title}");
    println!("{:>6} {}", "", names.iter().map(|n| format!("{n:>6}")).collect::<String>());
    for (i, name) in names.iter().enumerate() {
        let row: String = (0..names.len()).map(|j| format!("{:>6}", cell(i, j).to_decimal_string())).collect();
        println!("{name:>6} {row}");
    }
    println!();
}

fn main() -> stl_distance::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpora/example2");
    let corpus = load_corpus::<Rational>(dir)?;
    let names: Vec<&str> = corpus.formulas.iter().map(|(n, _)| n.as_str()).collect();
    let formulas: Vec<_> = corpus.formulas.iter().map(|(_, f)| f).collect();
    let t = corpus.meta.horizon;

    let start = Instant::now();
    let mut directed = Vec::new();
    for a in &formulas {
        let mut row = Vec::new();
        for b in &formulas {
            row.push(directed_ph(a, b, &corpus.meta.domain, t, &PhConfig::default())?.value);
        }
        directed.push(row);
    }
    let ph_time = start.elapsed();

    let cfg = AosConfig::new(corpus.meta.x_max.clone(), Rational::from_integer(1), Rational::from_integer(t as i64));
    let boxes = formulas.iter().map(|f| aos(f, &cfg)).collect::<stl_distance::Result<Vec<_>>>()?;
    let mut sd = vec![vec![Rational::from_integer(0); names.len()]; names.len()];
    for i in 0..names.len() {
        for j in 0..names.len() {
            sd[i][j] = sd_boxsets(&boxes[i], &boxes[j], cfg.dims(), &cfg.horizon, Normalizer::Horizon)?.distance;
        }
    }

    print("directed PH (row to column)", &names, |i, j| directed[i][j].clone());
    print("PH", &names, |i, j| if directed[i][j] > directed[j][i] { directed[i][j].clone() } else { directed[j][i].clone() });
    print("SD", &names, |i, j| sd[i][j].clone());
    println!("directed PH in {:.1} s", ph_time.as_secs_f64());
    Ok(())
}
