use std::path::PathBuf;
use std::str::FromStr;

use poev2::edgemap::io::{load_edge_map, Normalize};
use poev2::eval::{dataset_heatmap_scores, load_ground_truth, Dataset};
use poev2::growing::Mode;
use poev2::pipeline;

use crate::commands::{list_images, stem};
use crate::config::ParamFlags;
use crate::CliError;

#[derive(clap::Args)]
pub struct SweepArgs {
    /// Directory of edge maps.
    #[arg(long)]
    input: PathBuf,
    /// Directory of ground-truth segment files with matching stems.
    #[arg(long)]
    gt: PathBuf,
    /// Seed thresholds to sweep.
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    lambdas: Vec<f64>,
    /// Modes to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [String::from("poe"), String::from("poev2")])]
    modes: Vec<String>,
    #[command(flatten)]
    params: ParamFlags,
    /// Heatmap match tolerance as a fraction of the image diagonal.
    #[arg(long, default_value_t = 0.0075)]
    d_match: f64,
    /// Input normalization: auto, fixed-255, or none.
    #[arg(long, default_value = "auto")]
    normalize: String,
    /// Optional CSV output path.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let base = args.params.resolve()?;
    let normalize = Normalize::from_str(&args.normalize)?;
    let modes: Vec<Mode> = args
        .modes
        .iter()
        .map(|m| Mode::from_str(m).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    if args.lambdas.is_empty() || modes.is_empty() {
        return Err(CliError::Usage("empty lambda grid or mode list".into()));
    }

    let files = list_images(&args.input)?;
    if files.is_empty() {
        return Err(CliError::Io(format!(
            "empty dataset: no edge maps in {}",
            args.input.display()
        )));
    }
    let mut maps = Vec::new();
    let mut gts = Vec::new();
    for path in &files {
        let gt_path = ["txt", "json"]
            .iter()
            .map(|ext| args.gt.join(format!("{}.{ext}", stem(path))))
            .find(|p| p.exists())
            .ok_or_else(|| {
                CliError::Io(format!("missing ground truth for stem {:?}", stem(path)))
            })?;
        maps.push(load_edge_map(path, normalize)?);
        gts.push(load_ground_truth(&gt_path)?);
    }

    let mut header = format!("{:<14}", "lambda");
    for l in &args.lambdas {
        header.push_str(&format!(" {l:>7.2}"));
    }
    println!("{header}");
    let mut csv = String::from("mode,lambda,f_h\n");
    for mode in modes {
        let mut row = format!("{:<14}", format!("F^H ({mode:?})").to_lowercase());
        for &lambda in &args.lambdas {
            let params = poev2::growing::DetectionParams {
                lambda,
                mode,
                ..base.clone()
            };
            let mut ds = Dataset::default();
            for (map, gt) in maps.iter().zip(&gts) {
                let out = pipeline::detect(map, &params)?;
                ds.push(out.segments, gt.clone(), (map.width(), map.height()));
            }
            let f = dataset_heatmap_scores(&ds, args.d_match)?.f_h;
            row.push_str(&format!(" {f:>7.4}"));
            csv.push_str(&format!("{mode:?},{lambda},{f}\n").to_lowercase());
        }
        println!("{row}");
    }
    if let Some(path) = &args.output {
        std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
