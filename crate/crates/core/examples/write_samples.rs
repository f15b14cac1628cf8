//! Writes the sample shrubs as JSON files into the given directory.

use shrubflow::field::sample_shrubs;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data/shrubs".into());
    std::fs::create_dir_all(&dir).expect("create output directory");
    for (name, s) in sample_shrubs() {
        let path = format!("{dir}/{name}.json");
        std::fs::write(&path, s.graph().to_json() + "\n").expect("write shrub");
        println!("{path}");
    }
}
