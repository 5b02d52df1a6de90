//! On-disk documents: grids, jets, ratings, pair matrices, correlation
//! results, configurations and dimension scans.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use gaborface_core::grid::GridTemplate;
use gaborface_core::nmds::DimensionFit;
use gaborface_core::ratings::ADJECTIVES;
use gaborface_core::similarity::coding_fingerprint;
use gaborface_core::{
    CodedImage, Configuration, CorrelationResult, EmbedOptions, FilterBank, GridNode,
    GridPlacement, JetVector, MatrixKind, PairMatrix, RatingVector, SignificanceMethod,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;

/// Filter bank parameters as stored in jet files and study configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankDoc {
    pub wavenumbers: Vec<f64>,
    pub orientations: Vec<f64>,
    pub sigma: f64,
}

impl Default for BankDoc {
    fn default() -> Self {
        Self::from_bank(&FilterBank::standard())
    }
}

impl BankDoc {
    pub fn from_bank(bank: &FilterBank) -> Self {
        Self {
            wavenumbers: bank.wavenumbers().to_vec(),
            orientations: bank.orientations().to_vec(),
            sigma: bank.sigma(),
        }
    }

    pub fn to_bank(&self) -> Result<FilterBank> {
        Ok(FilterBank::new(
            &self.wavenumbers,
            &self.orientations,
            self.sigma,
        )?)
    }
}

// ---------------------------------------------------------------- grids

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    pub image_id: String,
    pub source_size: [usize; 2],
    pub nose_tip: String,
    pub nodes: Vec<NodeDoc>,
}

impl GridDoc {
    pub fn from_placement(p: &GridPlacement) -> Self {
        let (w, h) = p.source_size();
        Self {
            image_id: p.image_id().to_string(),
            source_size: [w, h],
            nose_tip: p.nose_tip().to_string(),
            nodes: p
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    name: n.name.clone(),
                    x: n.x,
                    y: n.y,
                })
                .collect(),
        }
    }

    pub fn to_placement(&self) -> gaborface_core::Result<GridPlacement> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| GridNode::new(n.name.clone(), n.x, n.y))
            .collect();
        GridPlacement::new(
            self.image_id.clone(),
            nodes,
            self.nose_tip.clone(),
            (self.source_size[0], self.source_size[1]),
        )
    }
}

pub fn parse_grid(text: &str) -> std::result::Result<GridPlacement, String> {
    let doc: GridDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    doc.to_placement().map_err(|e| e.to_string())
}

/// Reads and validates a grid document.
pub fn load_grid(path: &Path) -> Result<GridPlacement> {
    parse_grid(&fsutil::read_string(path)?).map_err(|m| Error::format(path, m))
}

pub fn save_grid(path: &Path, placement: &GridPlacement) -> Result<()> {
    fsutil::write_json(path, &GridDoc::from_placement(placement))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemplateDoc {
    pub version: String,
    pub nose_tip: String,
    pub names: Vec<String>,
}

/// The shipped 34-node template file.
pub const STANDARD_TEMPLATE_JSON: &str = include_str!("../templates/face34_v1.json");

pub fn parse_template(text: &str) -> std::result::Result<GridTemplate, String> {
    let doc: TemplateDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    GridTemplate::new(doc.version, doc.names, doc.nose_tip).map_err(|e| e.to_string())
}

pub fn load_template(path: &Path) -> Result<GridTemplate> {
    parse_template(&fsutil::read_string(path)?).map_err(|m| Error::format(path, m))
}

// ----------------------------------------------------------------- jets

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetPointDoc {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetDoc {
    pub image_id: String,
    pub bank: BankDoc,
    pub points: Vec<JetPointDoc>,
}

impl JetDoc {
    /// `grid` must be the placement the jets were computed on.
    pub fn new(coded: &CodedImage, grid: &GridPlacement, bank: &FilterBank) -> Self {
        Self {
            image_id: coded.image_id.clone(),
            bank: BankDoc::from_bank(bank),
            points: grid
                .nodes()
                .iter()
                .zip(&coded.jets)
                .map(|(n, j)| JetPointDoc {
                    name: n.name.clone(),
                    x: n.x,
                    y: n.y,
                    amplitudes: j.amplitudes().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_coded(&self) -> gaborface_core::Result<CodedImage> {
        let bank = FilterBank::new(
            &self.bank.wavenumbers,
            &self.bank.orientations,
            self.bank.sigma,
        )?;
        let jets = self
            .points
            .iter()
            .map(|p| {
                if p.amplitudes.len() != bank.len() {
                    return Err(gaborface_core::Error::DimensionMismatch {
                        expected: bank.len(),
                        found: p.amplitudes.len(),
                    });
                }
                JetVector::new(p.amplitudes.clone())
            })
            .collect::<gaborface_core::Result<Vec<_>>>()?;
        Ok(CodedImage {
            image_id: self.image_id.clone(),
            jets,
            fingerprint: coding_fingerprint(&bank, self.points.iter().map(|p| p.name.as_str())),
        })
    }
}

pub fn load_jets(path: &Path) -> Result<CodedImage> {
    let doc: JetDoc = fsutil::read_json(path)?;
    doc.to_coded()
        .map_err(|e| Error::format(path, e.to_string()))
}

// -------------------------------------------------------------- ratings

/// Parses a ratings table: header `image_id` followed by 5 or 6 adjective
/// columns. Errors carry the 1-based line and the column name.
pub fn parse_ratings(text: &str) -> std::result::Result<Vec<RatingVector>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| format!("line 1: {e}"))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("image_id") {
        return Err("line 1: first column must be `image_id`".into());
    }
    let adjectives = header[1..].to_vec();
    if !(5..=6).contains(&adjectives.len()) {
        return Err(format!(
            "line 1: expected 5 or 6 adjective columns, found {}",
            adjectives.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for a in &adjectives {
        if !ADJECTIVES.contains(&a.as_str()) {
            return Err(format!("line 1: unknown adjective column `{a}`"));
        }
        if !seen.insert(a) {
            return Err(format!("line 1: duplicate column `{a}`"));
        }
    }

    let mut ids = BTreeSet::new();
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| format!("line {line}: {e}"))?;
        if record.len() != header.len() {
            return Err(format!(
                "line {line}: expected {} cells, found {}",
                header.len(),
                record.len()
            ));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(format!("line {line}, column image_id: empty"));
        }
        if !ids.insert(id.clone()) {
            return Err(format!("line {line}, column image_id: duplicate `{id}`"));
        }
        let mut values = Vec::with_capacity(adjectives.len());
        for (cell, adj) in record.iter().skip(1).zip(&adjectives) {
            if cell.is_empty() {
                return Err(format!("line {line}, column {adj}: missing value"));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| format!("line {line}, column {adj}: `{cell}` is not a number"))?;
            if !(1.0..=5.0).contains(&v) {
                return Err(format!("line {line}, column {adj}: {v} is outside [1, 5]"));
            }
            values.push(v);
        }
        out.push(RatingVector::new(id, adjectives.clone(), values).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

pub fn load_ratings(path: &Path) -> Result<Vec<RatingVector>> {
    parse_ratings(&fsutil::read_string(path)?).map_err(|m| Error::format(path, m))
}

/// Writes rating vectors back to CSV. All vectors must share one adjective
/// list.
pub fn ratings_csv(items: &[RatingVector]) -> Result<String> {
    let adjectives = items.first().map(|r| r.adjectives()).unwrap_or(&[]);
    let mut s = String::from("image_id");
    for a in adjectives {
        write!(s, ",{a}").unwrap();
    }
    s.push('\n');
    for r in items {
        if r.adjectives() != adjectives {
            return Err(gaborface_core::Error::AdjectiveMismatch.into());
        }
        s.push_str(r.image_id());
        for v in r.values() {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

// ------------------------------------------------------------- matrices

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub kind: String,
    pub item_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &PairMatrix) -> Self {
        Self {
            kind: m.kind().as_str().to_string(),
            item_ids: m.item_ids().to_vec(),
            values: m.rows().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn to_matrix(&self) -> gaborface_core::Result<PairMatrix> {
        let kind = match self.kind.as_str() {
            "similarity" => MatrixKind::Similarity,
            "dissimilarity" => MatrixKind::Dissimilarity,
            other => {
                return Err(gaborface_core::Error::Matrix(format!(
                    "unknown kind `{other}`"
                )))
            }
        };
        let n = self.item_ids.len();
        if self.values.len() != n || self.values.iter().any(|r| r.len() != n) {
            return Err(gaborface_core::Error::Matrix(format!(
                "values must be {n}x{n}"
            )));
        }
        PairMatrix::new(self.item_ids.clone(), self.values.concat(), kind)
    }
}

pub fn load_matrix(path: &Path) -> Result<PairMatrix> {
    let doc: MatrixDoc = fsutil::read_json(path)?;
    doc.to_matrix()
        .map_err(|e| Error::format(path, e.to_string()))
}

/// CSV with the item ids as both header row and first column. Values use
/// the shortest representation that parses back to the same `f64`.
pub fn matrix_csv(m: &PairMatrix) -> String {
    let mut s = String::from(m.kind().as_str());
    for id in m.item_ids() {
        write!(s, ",{id}").unwrap();
    }
    s.push('\n');
    for (id, row) in m.item_ids().iter().zip(m.rows()) {
        s.push_str(id);
        for v in row {
            write!(s, ",{v:?}").unwrap();
        }
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------- correlation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDoc {
    pub expresser_id: String,
    pub measure: String,
    pub rho: f64,
    pub n_pairs: usize,
    pub p_two_sided: f64,
    pub method: String,
    /// Present for the permutation method only.
    pub seed: Option<u64>,
    pub exact_extreme: bool,
}

impl CorrelationDoc {
    pub fn new(expresser_id: &str, measure: &str, r: &CorrelationResult) -> Self {
        let seed = match r.method {
            SignificanceMethod::Permutation { seed, .. } => Some(seed),
            SignificanceMethod::TApproximation => None,
        };
        Self {
            expresser_id: expresser_id.to_string(),
            measure: measure.to_string(),
            rho: r.rho,
            n_pairs: r.n,
            p_two_sided: r.p_two_sided,
            method: r.method.name().to_string(),
            seed,
            exact_extreme: r.exact_extreme,
        }
    }
}

// -------------------------------------------------------- configuration

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptionsDoc {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl From<&EmbedOptions> for EmbedOptionsDoc {
    fn from(o: &EmbedOptions) -> Self {
        Self {
            max_iterations: o.max_iterations,
            tolerance: o.tolerance,
            seed: o.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationDoc {
    pub item_ids: Vec<String>,
    pub d: usize,
    pub coordinates: Vec<Vec<f64>>,
    pub stress: f64,
    pub rsq: f64,
    pub iterations: usize,
    pub options: EmbedOptionsDoc,
    #[serde(default)]
    pub degenerate: bool,
    #[serde(default)]
    pub random_columns: usize,
}

impl ConfigurationDoc {
    pub fn new(c: &Configuration, options: &EmbedOptions) -> Self {
        Self {
            item_ids: c.item_ids().to_vec(),
            d: c.dims(),
            coordinates: (0..c.len()).map(|i| c.point(i).to_vec()).collect(),
            stress: c.stress,
            rsq: c.rsq,
            iterations: c.iterations,
            options: options.into(),
            degenerate: c.degenerate,
            random_columns: c.random_columns,
        }
    }

    pub fn to_configuration(&self) -> gaborface_core::Result<Configuration> {
        if self.coordinates.iter().any(|p| p.len() != self.d) {
            return Err(gaborface_core::Error::DimensionMismatch {
                expected: self.d,
                found: self
                    .coordinates
                    .iter()
                    .map(Vec::len)
                    .find(|&l| l != self.d)
                    .unwrap_or(0),
            });
        }
        let mut c = Configuration::new(self.item_ids.clone(), self.d, self.coordinates.concat())?;
        c.stress = self.stress;
        c.rsq = self.rsq;
        c.iterations = self.iterations;
        c.degenerate = self.degenerate;
        c.random_columns = self.random_columns;
        Ok(c)
    }
}

pub fn load_configuration(path: &Path) -> Result<Configuration> {
    let doc: ConfigurationDoc = fsutil::read_json(path)?;
    doc.to_configuration()
        .map_err(|e| Error::format(path, e.to_string()))
}

/// `d,stress,rsq` rows of a dimension scan.
pub fn scan_csv(rows: &[DimensionFit]) -> String {
    let mut s = String::from("d,stress,rsq\n");
    for r in rows {
        writeln!(s, "{},{:?},{:?}", r.dims, r.stress, r.rsq).unwrap();
    }
    s
}
