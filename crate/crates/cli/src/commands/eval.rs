use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use poev2::eval::{
    dataset_heatmap_scores, default_thresholds, heatmap_scores, load_ground_truth, pr_sweep,
    rasterize, structural_ap, Dataset, EvalReport, ImageScores,
};
use poev2::segments::LineSegment;

use crate::CliError;

#[derive(clap::Args)]
pub struct EvalArgs {
    /// Prediction file or directory of segment files.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth file or directory (stems must match predictions).
    #[arg(long)]
    gt: PathBuf,
    /// Heatmap match tolerance as a fraction of the image diagonal.
    #[arg(long, default_value_t = 0.0075)]
    d_match: f64,
    /// Structural-AP squared-distance thresholds (128x128 frame).
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
    dt: Vec<f64>,
    /// Metric family: heatmap, sap, or both.
    #[arg(long, default_value = "both")]
    metric: String,
    /// Score cutoffs for the AP/AR sweep.
    #[arg(long, value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
    /// Image width when it cannot be inferred from the segments.
    #[arg(long)]
    width: Option<usize>,
    /// Image height when it cannot be inferred from the segments.
    #[arg(long)]
    height: Option<usize>,
    /// Where to write the JSON report.
    #[arg(long, default_value = "eval_report.json")]
    output: PathBuf,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    if !matches!(args.metric.as_str(), "heatmap" | "sap" | "both") {
        return Err(CliError::Usage(format!(
            "unknown metric {:?} (expected heatmap, sap, or both)",
            args.metric
        )));
    }
    let pairs = collect_pairs(&args.pred, &args.gt)?;
    if pairs.is_empty() {
        return Err(CliError::Io("empty dataset: no prediction files found".into()));
    }

    let mut dataset = Dataset::default();
    let mut stems = Vec::new();
    for (stem, pred_path, gt_path) in &pairs {
        let pred = load_ground_truth(pred_path)?;
        let gt = load_ground_truth(gt_path)?;
        let dims = match (args.width, args.height) {
            (Some(w), Some(h)) => (w, h),
            _ => infer_dims(&pred, &gt),
        };
        dataset.push(pred, gt, dims);
        stems.push(stem.clone());
    }

    let report = build_report(&dataset, &stems, &args)?;
    print_table(&report, &args.metric);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&args.output, json)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.output.display())))?;
    println!("report written to {}", args.output.display());
    Ok(())
}

fn build_report(
    dataset: &Dataset,
    stems: &[String],
    args: &EvalArgs,
) -> Result<EvalReport, CliError> {
    let want_heatmap = args.metric != "sap";
    let want_sap = args.metric != "heatmap";

    let mut per_image = Vec::new();
    let mut aggregate = (0.0, 0.0, 0.0);
    let mut sweep = (0.0, 0.0);
    if want_heatmap {
        for i in 0..dataset.len() {
            let (w, h) = dataset.dims[i];
            let pred = rasterize(&dataset.predictions[i], w, h);
            let gt = rasterize(&dataset.ground_truth[i], w, h);
            let s = heatmap_scores(&pred, &gt, args.d_match)?;
            per_image.push(ImageScores {
                stem: stems[i].clone(),
                precision: s.precision,
                recall: s.recall,
                f_h: s.f_h,
            });
        }
        let total = dataset_heatmap_scores(dataset, args.d_match)?;
        aggregate = (total.precision, total.recall, total.f_h);
        let thresholds = args.thresholds.clone().unwrap_or_else(default_thresholds);
        let r = pr_sweep(dataset, &thresholds, args.d_match)?;
        sweep = (r.ap_h, r.ar_h);
    }

    let mut sap = Vec::new();
    if want_sap {
        for &dt in &args.dt {
            sap.push((dt, structural_ap(dataset, dt).sap));
        }
    }

    Ok(EvalReport {
        precision: aggregate.0,
        recall: aggregate.1,
        f_h: aggregate.2,
        ap_h: sweep.0,
        ar_h: sweep.1,
        sap,
        per_image,
    })
}

fn print_table(report: &EvalReport, metric: &str) {
    if metric != "sap" {
        println!("{:<24} {:>9} {:>9} {:>9}", "image", "precision", "recall", "F^H");
        for img in &report.per_image {
            println!(
                "{:<24} {:>9.4} {:>9.4} {:>9.4}",
                img.stem, img.precision, img.recall, img.f_h
            );
        }
        println!(
            "{:<24} {:>9.4} {:>9.4} {:>9.4}",
            "aggregate", report.precision, report.recall, report.f_h
        );
        println!("AP^H {:.4}  AR^H {:.4}", report.ap_h, report.ar_h);
    }
    if !report.sap.is_empty() {
        let header: Vec<String> = report.sap.iter().map(|(dt, _)| format!("sAP^{dt}")).collect();
        let values: Vec<String> = report.sap.iter().map(|(_, v)| format!("{v:.4}")).collect();
        println!("{}", header.join("  "));
        println!("{}", values.join("  "));
    }
}

/// Pairs prediction and ground-truth files by stem; every mismatch is listed.
fn collect_pairs(
    pred: &Path,
    gt: &Path,
) -> Result<Vec<(String, PathBuf, PathBuf)>, CliError> {
    if pred.is_file() && gt.is_file() {
        return Ok(vec![(super::stem(pred), pred.to_path_buf(), gt.to_path_buf())]);
    }
    let preds = list_segment_files(pred)?;
    let gts = list_segment_files(gt)?;
    let missing_gt: Vec<&String> = preds.keys().filter(|s| !gts.contains_key(*s)).collect();
    let missing_pred: Vec<&String> = gts.keys().filter(|s| !preds.contains_key(*s)).collect();
    if !missing_gt.is_empty() || !missing_pred.is_empty() {
        let mut msg = String::from("prediction/ground-truth stems do not match;");
        if !missing_pred.is_empty() {
            msg.push_str(&format!(" missing predictions: {missing_pred:?}"));
        }
        if !missing_gt.is_empty() {
            msg.push_str(&format!(" missing ground truth: {missing_gt:?}"));
        }
        return Err(CliError::Io(msg));
    }
    Ok(preds
        .into_iter()
        .map(|(stem, p)| {
            let g = gts[&stem].clone();
            (stem, p, g)
        })
        .collect())
}

fn list_segment_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let mut files = BTreeMap::new();
    for entry in
        std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
    {
        let path = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("txt" | "json")) {
            files.insert(super::stem(&path), path);
        }
    }
    Ok(files)
}

/// Smallest canvas containing every endpoint, used when no explicit
/// dimensions are given.
fn infer_dims(pred: &[LineSegment], gt: &[LineSegment]) -> (usize, usize) {
    let mut w = 1.0f64;
    let mut h = 1.0f64;
    for s in pred.iter().chain(gt) {
        w = w.max(s.x1).max(s.x2);
        h = h.max(s.y1).max(s.y2);
    }
    (w.ceil() as usize + 1, h.ceil() as usize + 1)
}
