//! Reading a module from JSON, its a-type and slopes, and writing it back
//! in matrix form.

use dieudonne::dieudonne::ModuleFile;

const INPUT: &str = r#"{"p": 3, "f": 2, "r": 2, "m": 2, "N": 12, "a": [[2, 2, 1], [2, 4, 1], [3, 3, 2], [4, 4, 0]]}"#;

fn main() -> dieudonne::Result<()> {
    let file: ModuleFile = serde_json::from_str(INPUT).map_err(|e| dieudonne::Error::Parse(e.to_string()))?;
    let module = file.to_module()?;
    println!("rank {}, a-type {:?}", module.rank(), module.a_type());
    println!("local-local: {}", module.is_local_local());
    println!("slopes {}", module.slopes_oracle()?.to_slope_string(module.f() as u32));
    let back = serde_json::to_string_pretty(&ModuleFile::from_module(&module)).expect("serializable");
    println!("{}", back.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}
