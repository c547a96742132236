use std::path::PathBuf;

use poev2::edgemap::io::save_pgm;
use poev2::segments::{serialize, SegmentFormat};
use poev2::synth::{SceneSpec, SyntheticScene};

use crate::CliError;

#[derive(clap::Args)]
pub struct SynthArgs {
    /// Directory receiving `scene_NNN.pgm` + `scene_NNN.txt` pairs.
    #[arg(long)]
    output: PathBuf,
    /// Number of scenes.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    #[arg(long, default_value_t = 5)]
    min_segments: usize,
    #[arg(long, default_value_t = 15)]
    max_segments: usize,
    #[arg(long, default_value_t = 40.0)]
    min_length: f64,
    #[arg(long, default_value_t = 180.0)]
    max_length: f64,
    /// Salt probability per background pixel.
    #[arg(long, default_value_t = 0.02)]
    noise: f64,
    /// Base RNG seed; scene k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rasterize segments to binary instead of anti-aliased coverage.
    #[arg(long)]
    no_antialias: bool,
}

pub fn run(args: SynthArgs) -> Result<(), CliError> {
    if args.count == 0 {
        return Err(CliError::Usage("count must be positive".into()));
    }
    std::fs::create_dir_all(&args.output)?;
    for k in 0..args.count {
        let spec = SceneSpec {
            width: args.width,
            height: args.height,
            min_segments: args.min_segments,
            max_segments: args.max_segments,
            min_length: args.min_length,
            max_length: args.max_length,
            noise: args.noise,
            antialias: !args.no_antialias,
            seed: args.seed + k as u64,
            ..Default::default()
        };
        let scene = SyntheticScene::random(&spec)?;
        let (map, gt) = scene.generate();
        let stem = format!("scene_{k:03}");
        save_pgm(&map, args.output.join(format!("{stem}.pgm")))?;
        let text = serialize(&gt, SegmentFormat::Text, (args.width, args.height))?;
        std::fs::write(args.output.join(format!("{stem}.txt")), text)?;
    }
    println!("wrote {} scene pairs to {}", args.count, args.output.display());
    Ok(())
}
