//! Writes the sample maps as `<name>.graph.json` / `<name>.map.json` into
//! the directory given on the command line (default `fixtures`).

use gbs::samples;
use std::fs;
use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;
    for (name, p) in samples::FIXTURES {
        let f = samples::by_name(name, *p).expect("sample exists");
        let stem = format!("{name}_p{p}");
        let g = serde_json::to_string_pretty(&f.graph().to_spec()).unwrap();
        let m = serde_json::to_string_pretty(&f.to_spec()).unwrap();
        fs::write(dir.join(format!("{stem}.graph.json")), g + "\n")?;
        fs::write(dir.join(format!("{stem}.map.json")), m + "\n")?;
    }
    let bs = serde_json::to_string_pretty(&samples::bs(2, 3).to_spec()).unwrap();
    fs::write(dir.join("bs23.graph.json"), bs + "\n")?;
    Ok(())
}
