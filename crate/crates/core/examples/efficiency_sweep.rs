//! Efficiency versus κ/κ_s for the four standard panels, written as CSV and
//! SVG into the directory given as the first argument (default: current).

use std::fs::File;
use std::path::PathBuf;

use qdgate::sweep::{run_sweep, Baseline, Output, SweepSpec};
use qdgate::table::Format;

fn main() -> qdgate::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    for (panel, c, detuning) in [("a", 0.25, 0.0), ("b", 1.0, 0.0), ("c", 0.25, 0.1), ("d", 1.0, 0.1)] {
        let spec = SweepSpec::new(Baseline { c, detuning, ..Baseline::default() })
            .with_outputs([Output::EtaH, Output::EtaV, Output::EtaS]);
        let table = run_sweep(&spec)?;
        for format in [Format::Csv, Format::Svg] {
            let path = dir.join(format!("panel_{panel}.{}", format.extension()));
            table.write(format, File::create(&path)?)?;
        }
        let at13 = table.column("eta_S").unwrap()[12].unwrap();
        println!("panel {panel}: C={c}, detuning={detuning}, eta_S(13) = {at13:.3}");
    }
    Ok(())
}
