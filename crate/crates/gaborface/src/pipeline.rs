//! The study pipeline: encode → matrices → correlate → embed → align → plot.
//!
//! Every stage reads the files written by the previous one, so a stage can
//! be rerun on its own. Work inside a stage runs on the current rayon pool;
//! results are collected in input order, so output bytes do not depend on
//! the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gaborface_core::nmds::{embed, procrustes_align, scan_dimensions};
use gaborface_core::rank::{correlate_model_with_ratings, DEFAULT_SEED};
use gaborface_core::ratings::semantic_matrix;
use gaborface_core::similarity::{gabor_matrix, geometry_matrix};
use gaborface_core::{
    CodedImage, EmbedOptions, FilterBank, GridPlacement, ImageRaster, PairMatrix,
    ProcrustesOptions, RatingVector, SignificanceMethod,
};
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{self, BankDoc, ConfigurationDoc, CorrelationDoc, JetDoc, MatrixDoc};
use crate::fsutil;
use crate::pgm::read_pgm;
use crate::svg::render_scatter;

/// Minimum number of images for a group to be analysed.
pub const MIN_GROUP_SIZE: usize = 3;

const MODELS: [&str; 2] = ["gabor", "geometry"];
const EMBEDDED: [&str; 3] = ["gabor", "geometry", "semantic"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyOptions {
    /// Dimension of the reported embeddings.
    pub dims: usize,
    /// Largest dimension in the stress scan.
    pub max_dims: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Use a permutation test with this many permutations instead of the
    /// t approximation.
    pub permutations: Option<u32>,
    pub standard_size: [usize; 2],
    /// Expressers left out of the summary averages.
    pub exclude: Vec<String>,
    /// Drop fear-labelled images and the fear rating column.
    pub no_fear: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            dims: 2,
            max_dims: 4,
            tolerance: 1e-6,
            max_iterations: 500,
            seed: DEFAULT_SEED,
            permutations: None,
            standard_size: [256, 256],
            exclude: Vec::new(),
            no_fear: false,
        }
    }
}

/// A study description. Relative paths are resolved against the directory
/// of the config file by [`load_study_config`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub image_dir: PathBuf,
    pub grid_dir: PathBuf,
    pub ratings: PathBuf,
    #[serde(default)]
    pub bank: BankDoc,
    /// image id → expresser id.
    pub expressers: BTreeMap<String, String>,
    /// image id → expression abbreviation (NE, HA, SA, SU, AN, DI, FE).
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub options: StudyOptions,
}

pub fn load_study_config(path: &Path) -> Result<StudyConfig> {
    let mut c: StudyConfig = fsutil::read_json(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for p in [
        &mut c.image_dir,
        &mut c.grid_dir,
        &mut c.ratings,
        &mut c.output_dir,
    ] {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Stage {
    Encode,
    Matrices,
    Correlate,
    Embed,
    Align,
    Plot,
    /// All stages in order.
    Study,
}

impl Stage {
    pub const ORDER: [Stage; 6] = [
        Stage::Encode,
        Stage::Matrices,
        Stage::Correlate,
        Stage::Embed,
        Stage::Align,
        Stage::Plot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Encode => "encode",
            Stage::Matrices => "matrices",
            Stage::Correlate => "correlate",
            Stage::Embed => "embed",
            Stage::Align => "align",
            Stage::Plot => "plot",
            Stage::Study => "study",
        }
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Stage::ORDER
            .into_iter()
            .chain([Stage::Study])
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub expresser_id: String,
    pub status: GroupStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub groups: Vec<GroupReport>,
}

impl StageReport {
    pub fn failed(&self) -> impl Iterator<Item = &GroupReport> {
        self.groups
            .iter()
            .filter(|g| g.status == GroupStatus::Failed)
    }
}

/// One row of the per-expresser summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub expresser_id: String,
    pub status: GroupStatus,
    pub gabor: Option<CorrelationDoc>,
    pub geometry: Option<CorrelationDoc>,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub average_gabor: Option<f64>,
    pub average_geometry: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub stages: Vec<StageReport>,
    pub summary: Option<Summary>,
}

impl RunReport {
    pub fn any_failed(&self) -> bool {
        self.stages.iter().any(|s| s.failed().next().is_some())
    }
}

/// Runs `stage` (or every stage for [`Stage::Study`]) on a pool with
/// `threads` workers (rayon's default when `None`).
pub fn run(config: &StudyConfig, stage: Stage, threads: Option<usize>) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    pool.install(|| {
        let study = Study::new(config)?;
        let stages: Vec<Stage> = match stage {
            Stage::Study => Stage::ORDER.to_vec(),
            s => vec![s],
        };
        let mut report = RunReport::default();
        for s in stages {
            let r = match s {
                Stage::Encode => study.encode()?,
                Stage::Matrices => study.matrices()?,
                Stage::Correlate => {
                    let (r, summary) = study.correlate()?;
                    report.summary = Some(summary);
                    r
                }
                Stage::Embed => study.embed()?,
                Stage::Align => study.align()?,
                Stage::Plot => study.plot()?,
                Stage::Study => unreachable!("expanded above"),
            };
            fsutil::write_json(
                &study.out.join("reports").join(format!("{}.json", r.stage)),
                &r,
            )?;
            report.stages.push(r);
        }
        Ok(report)
    })
}

/// Resolved inputs shared by all stages.
struct Study<'a> {
    config: &'a StudyConfig,
    bank: FilterBank,
    out: PathBuf,
    /// Image ids in analysis, sorted.
    images: Vec<String>,
    /// expresser → its image ids, both sorted.
    groups: BTreeMap<String, Vec<String>>,
}

fn is_fear(label: &str) -> bool {
    matches!(label.to_ascii_lowercase().as_str(), "fe" | "fear")
}

impl<'a> Study<'a> {
    fn new(config: &'a StudyConfig) -> Result<Self> {
        let o = &config.options;
        if o.dims == 0 || o.max_dims == 0 {
            return Err(Error::Validation(
                "options.dims and options.max_dims must be at least 1".into(),
            ));
        }
        if o.standard_size[0] == 0 || o.standard_size[1] == 0 {
            return Err(Error::Validation(
                "options.standard_size must be at least 1x1".into(),
            ));
        }
        let bank = config.bank.to_bank()?;
        let dir = &config.image_dir;
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut images = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("pgm") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    images.push(stem.to_string());
                }
            }
        }
        images.sort();
        if o.no_fear {
            images.retain(|id| !config.labels.get(id).is_some_and(|l| is_fear(l)));
        }
        if images.is_empty() {
            return Err(Error::Validation(format!(
                "no .pgm images in {}",
                dir.display()
            )));
        }
        let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut unassigned = Vec::new();
        for id in &images {
            match config.expressers.get(id) {
                Some(e) => groups.entry(e.clone()).or_default().push(id.clone()),
                None => unassigned.push(id.clone()),
            }
        }
        if !unassigned.is_empty() {
            warn!(
                "{} image(s) have no expresser and are not analysed: {}",
                unassigned.len(),
                unassigned.join(", ")
            );
        }
        Ok(Self {
            config,
            bank,
            out: config.output_dir.clone(),
            images,
            groups,
        })
    }

    fn grid_path(&self, id: &str) -> PathBuf {
        self.config.grid_dir.join(format!("{id}.json"))
    }

    fn jet_path(&self, id: &str) -> PathBuf {
        self.out.join("jets").join(format!("{id}.json"))
    }

    fn group_dir(&self, kind: &str, expresser: &str) -> PathBuf {
        self.out.join(kind).join(expresser)
    }

    fn standard_size(&self) -> (usize, usize) {
        let [w, h] = self.config.options.standard_size;
        (w, h)
    }

    fn embed_options(&self) -> EmbedOptions {
        let o = &self.config.options;
        EmbedOptions {
            max_iterations: o.max_iterations,
            tolerance: o.tolerance,
            seed: o.seed,
        }
    }

    /// Loads a grid, checks it against the image size when given, and maps
    /// it to the standard size.
    fn standard_grid(&self, id: &str, image_size: Option<(usize, usize)>) -> Result<GridPlacement> {
        let path = self.grid_path(id);
        let grid = formats::load_grid(&path)?;
        if grid.image_id() != id {
            return Err(Error::format(
                &path,
                format!("image_id `{}` does not match file name", grid.image_id()),
            ));
        }
        if let Some(size) = image_size {
            if grid.source_size() != size {
                return Err(Error::Validation(format!(
                    "grid for `{id}` is for a {:?} image but the image is {:?}",
                    grid.source_size(),
                    size
                )));
            }
        }
        Ok(grid.rescale(self.standard_size())?)
    }

    fn encode(&self) -> Result<StageReport> {
        // Every image needs a grid before anything is written.
        let missing: Vec<&str> = self
            .images
            .iter()
            .filter(|id| !self.grid_path(id).is_file())
            .map(String::as_str)
            .collect();
        if !missing.is_empty() {
            return Err(Error::Validation(format!(
                "no grid placement for image(s): {}",
                missing.join(", ")
            )));
        }
        let coded: Vec<(CodedImage, GridPlacement)> = self
            .images
            .par_iter()
            .map(|id| {
                let img = read_pgm(&self.config.image_dir.join(format!("{id}.pgm")))?;
                let grid = self.standard_grid(id, Some((img.width(), img.height())))?;
                let img = resample(&img, self.standard_size());
                Ok((CodedImage::encode(&img, &grid, &self.bank)?, grid))
            })
            .collect::<Result<_>>()?;
        coded
            .par_iter()
            .map(|(c, g)| {
                fsutil::write_json(&self.jet_path(&c.image_id), &JetDoc::new(c, g, &self.bank))
            })
            .collect::<Result<()>>()?;
        Ok(StageReport {
            stage: Stage::Encode.name().into(),
            groups: Vec::new(),
        })
    }

    /// Applies `work` to every group with enough images, in parallel,
    /// recording skips and failures.
    fn per_group<F>(&self, stage: Stage, work: F) -> StageReport
    where
        F: Fn(&str, &[String]) -> Result<Vec<String>> + Sync,
    {
        let groups: Vec<(&String, &Vec<String>)> = self.groups.iter().collect();
        let reports = groups
            .par_iter()
            .map(|&(e, ids)| {
                if ids.len() < MIN_GROUP_SIZE {
                    return GroupReport {
                        expresser_id: e.clone(),
                        status: GroupStatus::Skipped,
                        message: Some(format!(
                            "{} image(s), need at least {MIN_GROUP_SIZE}",
                            ids.len()
                        )),
                        warnings: Vec::new(),
                    };
                }
                match work(e, ids) {
                    Ok(warnings) => GroupReport {
                        expresser_id: e.clone(),
                        status: GroupStatus::Ok,
                        message: None,
                        warnings,
                    },
                    Err(err) => GroupReport {
                        expresser_id: e.clone(),
                        status: GroupStatus::Failed,
                        message: Some(err.to_string()),
                        warnings: Vec::new(),
                    },
                }
            })
            .collect::<Vec<_>>();
        for r in &reports {
            let stage = stage.name();
            match r.status {
                GroupStatus::Ok => {}
                GroupStatus::Skipped => warn!(
                    "{stage}: skipping {}: {}",
                    r.expresser_id,
                    r.message.as_deref().unwrap_or("")
                ),
                GroupStatus::Failed => warn!(
                    "{stage}: {} failed: {}",
                    r.expresser_id,
                    r.message.as_deref().unwrap_or("")
                ),
            }
            for w in &r.warnings {
                warn!("{stage}: {}: {w}", r.expresser_id);
            }
        }
        StageReport {
            stage: stage.name().into(),
            groups: reports,
        }
    }

    fn ratings(&self) -> Result<BTreeMap<String, RatingVector>> {
        let mut out = BTreeMap::new();
        for r in formats::load_ratings(&self.config.ratings)? {
            let r = if self.config.options.no_fear {
                r.without("fear")?
            } else {
                r
            };
            out.insert(r.image_id().to_string(), r);
        }
        Ok(out)
    }

    fn matrices(&self) -> Result<StageReport> {
        let ratings = self.ratings()?;
        Ok(self.per_group(Stage::Matrices, |e, ids| {
            let missing: Vec<&str> = ids
                .iter()
                .filter(|id| !ratings.contains_key(*id))
                .map(String::as_str)
                .collect();
            if !missing.is_empty() {
                return Err(Error::Validation(format!(
                    "no ratings for {}",
                    missing.join(", ")
                )));
            }
            let coded = ids
                .iter()
                .map(|id| formats::load_jets(&self.jet_path(id)))
                .collect::<Result<Vec<_>>>()?;
            let mut warnings = Vec::new();
            for (i, a) in coded.iter().enumerate() {
                for b in &coded[i + 1..] {
                    let n = a.degenerate_pairs(b);
                    if n > 0 {
                        warnings.push(format!(
                            "{} node(s) of ({}, {}) have an all-zero jet and count as similarity 0",
                            n, a.image_id, b.image_id
                        ));
                    }
                }
            }
            let shapes = ids
                .iter()
                .map(|id| Ok((id.clone(), self.standard_grid(id, None)?.geometry_vector())))
                .collect::<Result<Vec<_>>>()?;
            let sem: Vec<RatingVector> = ids.iter().map(|id| ratings[id].clone()).collect();
            let dir = self.group_dir("matrices", e);
            for (name, m) in [
                ("gabor", gabor_matrix(&coded)?),
                ("geometry", geometry_matrix(&shapes)?),
                ("semantic", semantic_matrix(&sem)?),
            ] {
                fsutil::write_json(
                    &dir.join(format!("{name}.json")),
                    &MatrixDoc::from_matrix(&m),
                )?;
                fsutil::write_atomic(
                    &dir.join(format!("{name}.csv")),
                    formats::matrix_csv(&m).as_bytes(),
                )?;
            }
            Ok(warnings)
        }))
    }

    fn load_group_matrix(&self, e: &str, name: &str) -> Result<PairMatrix> {
        formats::load_matrix(&self.group_dir("matrices", e).join(format!("{name}.json")))
    }

    fn correlate(&self) -> Result<(StageReport, Summary)> {
        let o = &self.config.options;
        let method = match o.permutations {
            Some(permutations) => SignificanceMethod::Permutation {
                permutations,
                seed: o.seed,
            },
            None => SignificanceMethod::TApproximation,
        };
        let report = self.per_group(Stage::Correlate, |e, _| {
            let semantic = self.load_group_matrix(e, "semantic")?;
            for measure in MODELS {
                let model = self.load_group_matrix(e, measure)?;
                let r = correlate_model_with_ratings(&model, &semantic, method)?;
                fsutil::write_json(
                    &self
                        .group_dir("correlations", e)
                        .join(format!("{measure}.json")),
                    &CorrelationDoc::new(e, measure, &r),
                )?;
            }
            Ok(Vec::new())
        });
        let summary = self.summarize(&report)?;
        fsutil::write_atomic(
            &self.out.join("summary.csv"),
            summary_csv(&summary).as_bytes(),
        )?;
        fsutil::write_atomic(
            &self.out.join("summary.txt"),
            summary_table(&summary).as_bytes(),
        )?;
        Ok((report, summary))
    }

    /// Builds the summary from the correlation files just written.
    fn summarize(&self, report: &StageReport) -> Result<Summary> {
        let exclude: BTreeSet<&str> = self
            .config
            .options
            .exclude
            .iter()
            .map(String::as_str)
            .collect();
        let mut rows = Vec::new();
        for g in &report.groups {
            let mut row = SummaryRow {
                expresser_id: g.expresser_id.clone(),
                status: g.status.clone(),
                gabor: None,
                geometry: None,
                excluded: exclude.contains(g.expresser_id.as_str()),
            };
            if g.status == GroupStatus::Ok {
                let dir = self.group_dir("correlations", &g.expresser_id);
                row.gabor = Some(fsutil::read_json(&dir.join("gabor.json"))?);
                row.geometry = Some(fsutil::read_json(&dir.join("geometry.json"))?);
            }
            rows.push(row);
        }
        let average = |pick: fn(&SummaryRow) -> Option<&CorrelationDoc>| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| !r.excluded)
                .filter_map(|r| pick(r).map(|c| c.rho))
                .collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        let average_gabor = average(|r| r.gabor.as_ref());
        let average_geometry = average(|r| r.geometry.as_ref());
        Ok(Summary {
            rows,
            average_gabor,
            average_geometry,
        })
    }

    fn embed(&self) -> Result<StageReport> {
        let o = &self.config.options;
        let opts = self.embed_options();
        Ok(self.per_group(Stage::Embed, |e, ids| {
            let n = ids.len();
            let mut warnings = Vec::new();
            if o.dims > n - 1 {
                return Err(Error::Validation(format!(
                    "cannot embed {n} items in {} dimensions",
                    o.dims
                )));
            }
            let dir = self.group_dir("embeddings", e);
            for name in EMBEDDED {
                let m = self.load_group_matrix(e, name)?;
                let m = if name == "gabor" {
                    m.to_dissimilarity()
                } else {
                    m
                };
                let c = embed(&m, o.dims, &opts)?;
                if c.degenerate {
                    warnings.push(format!(
                        "{name}: all dissimilarities are equal; returned the start configuration"
                    ));
                }
                if c.random_columns > 0 {
                    warnings.push(format!(
                        "{name}: {} start column(s) were seeded randomly",
                        c.random_columns
                    ));
                }
                fsutil::write_json(
                    &dir.join(format!("{name}.json")),
                    &ConfigurationDoc::new(&c, &opts),
                )?;
                let scan = scan_dimensions(&m, o.max_dims.min(n - 1), &opts)?;
                fsutil::write_atomic(
                    &dir.join(format!("{name}_scan.csv")),
                    formats::scan_csv(&scan).as_bytes(),
                )?;
            }
            Ok(warnings)
        }))
    }

    fn align(&self) -> Result<StageReport> {
        Ok(self.per_group(Stage::Align, |e, _| {
            let load = |name: &str| {
                formats::load_configuration(
                    &self.group_dir("embeddings", e).join(format!("{name}.json")),
                )
            };
            let target = load("semantic")?;
            let opts = ProcrustesOptions::default();
            for name in MODELS {
                let source = load(name)?;
                let (aligned, residual) = procrustes_align(&source, &target, opts)?;
                let doc = AlignmentDoc {
                    expresser_id: e.to_string(),
                    source: name.to_string(),
                    target: "semantic".into(),
                    residual,
                    allow_reflection: opts.allow_reflection,
                    allow_scaling: opts.allow_scaling,
                    aligned: ConfigurationDoc::new(&aligned, &self.embed_options()),
                };
                fsutil::write_json(
                    &self
                        .group_dir("alignment", e)
                        .join(format!("{name}_to_semantic.json")),
                    &doc,
                )?;
            }
            Ok(Vec::new())
        }))
    }

    fn plot(&self) -> Result<StageReport> {
        Ok(self.per_group(Stage::Plot, |e, _| {
            if self.config.options.dims != 2 {
                return Ok(vec![format!(
                    "plots need 2 dimensions, configured {}",
                    self.config.options.dims
                )]);
            }
            let dir = self.group_dir("plots", e);
            let semantic = formats::load_configuration(
                &self.group_dir("embeddings", e).join("semantic.json"),
            )?;
            let svg = render_scatter(
                &semantic,
                &self.config.labels,
                &format!("{e}: semantic ratings"),
            )?;
            fsutil::write_atomic(&dir.join("semantic.svg"), svg.as_bytes())?;
            for name in MODELS {
                let path = self
                    .group_dir("alignment", e)
                    .join(format!("{name}_to_semantic.json"));
                let doc: AlignmentDoc = fsutil::read_json(&path)?;
                let c = doc
                    .aligned
                    .to_configuration()
                    .map_err(|err| Error::format(&path, err.to_string()))?;
                let svg = render_scatter(
                    &c,
                    &self.config.labels,
                    &format!("{e}: {name} (aligned to semantic)"),
                )?;
                fsutil::write_atomic(&dir.join(format!("{name}.svg")), svg.as_bytes())?;
            }
            Ok(Vec::new())
        }))
    }
}

/// A model configuration after Procrustes alignment onto the semantic one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentDoc {
    pub expresser_id: String,
    pub source: String,
    pub target: String,
    /// Root-mean-square distance between aligned and target points.
    pub residual: f64,
    pub allow_reflection: bool,
    pub allow_scaling: bool,
    pub aligned: ConfigurationDoc,
}

/// Bilinear resampling where pixel `(i, j)` sits at coordinate `(i, j)`, so
/// that it matches [`GridPlacement::rescale`].
pub fn resample(img: &ImageRaster, (w, h): (usize, usize)) -> ImageRaster {
    if (img.width(), img.height()) == (w, h) {
        return img.clone();
    }
    let sx = img.width() as f64 / w as f64;
    let sy = img.height() as f64 / h as f64;
    let (mw, mh) = (img.width() - 1, img.height() - 1);
    ImageRaster::from_fn(w, h, |x, y| {
        let fx = (x as f64 * sx).min(mw as f64);
        let fy = (y as f64 * sy).min(mh as f64);
        let (x0, y0) = (fx as usize, fy as usize);
        let (x1, y1) = ((x0 + 1).min(mw), (y0 + 1).min(mh));
        let (ax, ay) = (fx - x0 as f64, fy - y0 as f64);
        (1.0 - ay) * ((1.0 - ax) * img.get(x0, y0) + ax * img.get(x1, y0))
            + ay * ((1.0 - ax) * img.get(x0, y1) + ax * img.get(x1, y1))
    })
    .expect("interpolated values are finite")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn summary_csv(s: &Summary) -> String {
    let mut out = String::from(
        "expresser_id,status,gabor_rho,geometry_rho,gabor_p,geometry_p,n_pairs,excluded\n",
    );
    for r in &s.rows {
        let status = match r.status {
            GroupStatus::Ok => "ok",
            GroupStatus::Skipped => "skipped",
            GroupStatus::Failed => "failed",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.expresser_id,
            status,
            fmt_opt(r.gabor.as_ref().map(|c| c.rho)),
            fmt_opt(r.geometry.as_ref().map(|c| c.rho)),
            fmt_opt(r.gabor.as_ref().map(|c| c.p_two_sided)),
            fmt_opt(r.geometry.as_ref().map(|c| c.p_two_sided)),
            r.gabor
                .as_ref()
                .map(|c| c.n_pairs.to_string())
                .unwrap_or_default(),
            r.excluded
        )
        .unwrap();
    }
    writeln!(
        out,
        "average,,{},{},,,,",
        fmt_opt(s.average_gabor),
        fmt_opt(s.average_geometry)
    )
    .unwrap();
    out
}

pub fn summary_table(s: &Summary) -> String {
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
    let mut out = format!("{:<16} {:>8} {:>8}\n", "Expresser", "Gabor", "Geometry");
    out.push_str(&"-".repeat(34));
    out.push('\n');
    for r in &s.rows {
        let note = match (&r.status, r.excluded) {
            (GroupStatus::Skipped, _) => "  (skipped)",
            (GroupStatus::Failed, _) => "  (failed)",
            (GroupStatus::Ok, true) => "  (excluded from average)",
            _ => "",
        };
        writeln!(
            out,
            "{:<16} {:>8} {:>8}{note}",
            r.expresser_id,
            cell(r.gabor.as_ref().map(|c| c.rho)),
            cell(r.geometry.as_ref().map(|c| c.rho))
        )
        .unwrap();
    }
    out.push_str(&"-".repeat(34));
    out.push('\n');
    writeln!(
        out,
        "{:<16} {:>8} {:>8}",
        "Average",
        cell(s.average_gabor),
        cell(s.average_geometry)
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resample_matches_grid_convention() {
        let img = ImageRaster::from_fn(8, 4, |x, y| (3 * x + 5 * y) as f64).unwrap();
        let big = resample(&img, (16, 8));
        // pixel (6, 2) of the big image maps to source coordinate (3, 1)
        assert_eq!(big.get(6, 2), img.get(3, 1));
        assert_eq!(
            big.get(7, 3),
            (img.get(3, 1) + img.get(4, 1) + img.get(3, 2) + img.get(4, 2)) / 4.0
        );
        assert_eq!(resample(&img, (8, 4)), img);
    }

    #[test]
    fn stage_names_round_trip() {
        for s in Stage::ORDER.into_iter().chain([Stage::Study]) {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert!("bogus".parse::<Stage>().is_err());
    }
}
