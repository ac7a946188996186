//! Regenerates the JSON fixture corpus from the builders in `icsskit::fixtures`.
//!
//! Run from the crate directory: `cargo run --example gen_fixtures`.

use std::path::Path;

use icsskit::fixtures;
use icsskit::multipt::json::germ_to_value;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    for (name, g) in fixtures::named() {
        let mut text = serde_json::to_string_pretty(&germ_to_value(&g)).expect("fixture serializes");
        text.push('\n');
        std::fs::write(dir.join(format!("{name}.json")), text)?;
        println!("wrote {name}.json");
    }
    Ok(())
}
