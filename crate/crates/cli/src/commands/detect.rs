use std::path::{Path, PathBuf};
use std::str::FromStr;

use poev2::edgemap::io::{load_edge_map, load_gray, save_pgm, Normalize};
use poev2::edgemap::{fallback_edges, nms_thin};
use poev2::growing::{dump_regions_ldjson, DetectionParams};
use poev2::orientation::{estimate_orientation, WindowBank};
use poev2::pipeline;
use poev2::segments::{serialize, SegmentFormat};
use poev2::EdgeStrengthMap;
use rayon::prelude::*;

use crate::config::ParamFlags;
use crate::commands::{list_images, stem};
use crate::CliError;

#[derive(clap::Args)]
pub struct DetectArgs {
    /// Edge map file, or a directory of edge maps for batch mode.
    #[arg(long)]
    input: PathBuf,
    /// Output segment file (batch mode: output directory).
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    params: ParamFlags,
    /// Thin the map with non-maxima suppression before detection.
    #[arg(long)]
    nms: bool,
    /// Treat the input as a raw grayscale image and compute gradient edges.
    #[arg(long)]
    fallback_edges: bool,
    /// Input normalization: auto, fixed-255, or none.
    #[arg(long, default_value = "auto")]
    normalize: String,
    /// Output format: text, json, or svg.
    #[arg(long, default_value = "text")]
    format: String,
    /// Worker threads for batch mode (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Dump window masks, the angle map, and region traces here.
    #[arg(long)]
    debug_dir: Option<PathBuf>,
}

pub fn run(args: DetectArgs) -> Result<(), CliError> {
    let params = args.params.resolve()?;
    let format = SegmentFormat::from_str(&args.format)?;
    let normalize = Normalize::from_str(&args.normalize)?;

    if args.input.is_dir() {
        std::fs::create_dir_all(&args.output)?;
        let files = list_images(&args.input)?;
        if files.is_empty() {
            return Err(CliError::Io(format!(
                "no .pgm or .png files in {}",
                args.input.display()
            )));
        }
        let ext = match format {
            SegmentFormat::Text => "txt",
            SegmentFormat::Json => "json",
            SegmentFormat::Svg => "svg",
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let results: Vec<Result<(String, usize), CliError>> = pool.install(|| {
            files
                .par_iter()
                .map(|path| {
                    let out_path = args.output.join(format!("{}.{ext}", stem(path)));
                    let n = detect_one(path, &out_path, &args, &params, format, normalize)?;
                    Ok((stem(path), n))
                })
                .collect()
        });
        for r in results {
            let (name, n) = r?;
            println!("{name}: {n} segments");
        }
    } else {
        let n = detect_one(&args.input, &args.output, &args, &params, format, normalize)?;
        println!("{}: {n} segments", stem(&args.input));
    }
    Ok(())
}

fn detect_one(
    input: &Path,
    output: &Path,
    args: &DetectArgs,
    params: &DetectionParams,
    format: SegmentFormat,
    normalize: Normalize,
) -> Result<usize, CliError> {
    let mut map = if args.fallback_edges {
        let gray = load_gray(input)?;
        fallback_edges(gray.width, gray.height, &gray.luma())?
    } else {
        load_edge_map(input, normalize)?
    };
    if args.nms {
        let bank = WindowBank::new(params.half_width, params.directions)?;
        let orient = estimate_orientation(&map, &bank);
        map = nms_thin(&map, &orient)?;
    }
    let out = pipeline::detect(&map, params)?;
    let bytes = serialize(&out.segments, format, (map.width(), map.height()))?;
    std::fs::write(output, bytes).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;

    if let Some(dir) = &args.debug_dir {
        write_debug_dump(dir, &stem(input), &map, params, &out)?;
    }
    Ok(out.segments.len())
}

fn write_debug_dump(
    dir: &Path,
    name: &str,
    map: &EdgeStrengthMap,
    params: &DetectionParams,
    out: &pipeline::DetectionOutput,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let bank = WindowBank::new(params.half_width, params.directions)?;
    for i in 0..params.directions as usize {
        save_pgm(&bank.mask_image(i), dir.join(format!("window_{i:02}.pgm")))?;
    }
    let orient = estimate_orientation(map, &bank);
    save_pgm(&orient.index_image(), dir.join(format!("{name}_angles.pgm")))?;
    std::fs::write(
        dir.join(format!("{name}_regions.ldjson")),
        dump_regions_ldjson(&out.regions),
    )?;
    Ok(())
}
