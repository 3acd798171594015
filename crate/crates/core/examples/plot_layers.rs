//! Evaluate the planted bundles under several settings and draw their
//! layer-wise accuracy curves as SVG.
//!
//! cargo run --example plot_layers -- [output.svg]

use lexprobe::cli::layer_series;
use lexprobe::plot;
use lexprobe::synthetic::{PlantedWic, PLANTED_ANISOTROPY};
use lexprobe::wic::{self, Centering, EvalOptions};

pub fn run_example() -> lexprobe::Result<String> {
    let (bundle, pairs) = PlantedWic {
        num_layers: 6,
        anisotropy: Some(PLANTED_ANISOTROPY),
        informative_from: 2,
        ..PlantedWic::default()
    }
    .build();
    let mut series = Vec::new();
    for centering in [Centering::Off, Centering::BundleMean] {
        let options = EvalOptions {
            centering,
            ..EvalOptions::default()
        };
        series.push(layer_series(&wic::evaluate_layers(
            &bundle, &pairs, &options,
        )?));
    }
    Ok(plot::render_svg(&series)?)
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    let svg = run_example()?;
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, svg).map_err(|source| lexprobe::Error::Io {
            path: path.into(),
            source,
        }),
        None => {
            print!("{svg}");
            Ok(())
        }
    }
}
