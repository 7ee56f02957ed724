// Build-time cross-validation harness (not part of the test suite).
use std::io::BufRead;

fn main() {
    let path = std::env::args().nth(1).expect("usage: porter_xval <pairs.tsv>");
    let file = std::fs::File::open(&path).unwrap();
    let mut total = 0u64;
    let mut bad = 0u64;
    for line in std::io::BufReader::new(file).lines() {
        let line = line.unwrap();
        let (w, expect) = line.split_once('\t').unwrap();
        let got = sgg_core::text::stem(w);
        total += 1;
        if got != expect {
            bad += 1;
            if bad <= 20 {
                println!("MISMATCH {w}: oracle={expect} ours={got}");
            }
        }
    }
    println!("{bad}/{total} mismatches");
}
