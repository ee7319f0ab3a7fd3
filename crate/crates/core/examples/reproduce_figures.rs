//! Regenerates the data of every figure panel into a directory.
//!
//! ```bash
//! cargo run --example reproduce_figures [-- out_dir]
//! ```

use qom_sense::figures::{figure_data, write_figure, FigureId, OutputFormat};
use qom_sense::ExperimentParams;

fn main() -> qom_sense::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("qom_figures"));
    let params = ExperimentParams::reference();
    for id in FigureId::ALL {
        let out = figure_data(id, &params)?;
        for path in write_figure(&out, &dir, OutputFormat::Csv)? {
            println!("fig {id}: {}", path.display());
        }
        if let Some(summary) = &out.summary {
            println!("  summary: {summary}");
        }
    }
    Ok(())
}
