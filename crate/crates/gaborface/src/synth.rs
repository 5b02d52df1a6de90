//! Synthetic studies: textured face-like blob images whose features deform
//! with one parameter `t ∈ [0, 1]`, grids that follow the features, and
//! rating vectors that are linear in `t`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gaborface_core::grid::GridTemplate;
use gaborface_core::ratings::ADJECTIVES;
use gaborface_core::{GridNode, GridPlacement, ImageRaster, RatingVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formats::{ratings_csv, save_grid};
use crate::fsutil;
use crate::pgm::write_pgm;
use crate::pipeline::{StudyConfig, StudyOptions};

const SIZE: usize = 256;

#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub expressers: usize,
    pub images_per_expresser: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            expressers: 1,
            images_per_expresser: 10,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticStudy {
    pub images: Vec<(String, ImageRaster)>,
    pub grids: Vec<GridPlacement>,
    pub ratings: Vec<RatingVector>,
    pub expressers: BTreeMap<String, String>,
    pub labels: BTreeMap<String, String>,
    /// Deformation parameter of each image.
    pub deformation: BTreeMap<String, f64>,
}

/// Oriented Gaussian blob.
#[derive(Clone, Copy)]
struct Blob {
    x: f64,
    y: f64,
    along: f64,
    across: f64,
    angle: f64,
    amplitude: f64,
}

impl Blob {
    fn at(&self, px: f64, py: f64) -> f64 {
        let (s, c) = self.angle.sin_cos();
        let (dx, dy) = (px - self.x, py - self.y);
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        self.amplitude
            * (-0.5 * (u * u / (self.along * self.along) + v * v / (self.across * self.across)))
                .exp()
    }
}

/// Per-expresser face proportions.
#[derive(Clone, Copy)]
struct Face {
    eye_dx: f64,
    eye_y: f64,
    mouth_y: f64,
    nose_y: f64,
}

struct Features {
    blobs: Vec<Blob>,
    nodes: Vec<(f64, f64)>,
}

fn features(face: Face, t: f64) -> Features {
    let cx = SIZE as f64 / 2.0;
    let brow_lift = 10.0 * t;
    let brow_tilt = 0.45 * t;
    let eye_open = 6.0 * (1.0 + 0.6 * t);
    let mouth_half = 22.0 + 16.0 * t;
    let mouth_open = 4.0 + 7.0 * t;
    let cheek_lift = 9.0 * t;
    let (ey, my, ny) = (face.eye_y, face.mouth_y + 4.0 * t, face.nose_y);
    let brow_y = ey - 24.0 - brow_lift;
    let mut blobs = vec![
        // face oval and hair line
        Blob {
            x: cx,
            y: 136.0,
            along: 92.0,
            across: 70.0,
            angle: std::f64::consts::FRAC_PI_2,
            amplitude: 70.0,
        },
        Blob {
            x: cx,
            y: ny,
            along: 16.0,
            across: 5.0,
            angle: std::f64::consts::FRAC_PI_2,
            amplitude: 22.0,
        },
        Blob {
            x: cx,
            y: ny + 10.0,
            along: 9.0,
            across: 5.0,
            angle: 0.0,
            amplitude: -35.0,
        },
        Blob {
            x: cx,
            y: my,
            along: mouth_half,
            across: mouth_open,
            angle: 0.0,
            amplitude: -75.0,
        },
        Blob {
            x: cx,
            y: my - mouth_open - 3.0,
            along: mouth_half * 0.8,
            across: 2.5,
            angle: 0.0,
            amplitude: 30.0,
        },
    ];
    for side in [-1.0, 1.0] {
        let ex = cx + side * face.eye_dx;
        blobs.push(Blob {
            x: ex,
            y: ey,
            along: 13.0,
            across: eye_open,
            angle: 0.0,
            amplitude: -80.0,
        });
        blobs.push(Blob {
            x: ex,
            y: ey,
            along: 3.5,
            across: 3.5,
            angle: 0.0,
            amplitude: -40.0,
        });
        blobs.push(Blob {
            x: ex,
            y: brow_y,
            along: 20.0,
            across: 3.5,
            angle: -side * brow_tilt,
            amplitude: -70.0,
        });
        blobs.push(Blob {
            x: cx + side * (face.eye_dx + 6.0),
            y: my - 26.0 - cheek_lift,
            along: 14.0,
            across: 10.0,
            angle: side * 0.5,
            amplitude: 28.0 + 30.0 * t,
        });
        blobs.push(Blob {
            x: cx + side * (mouth_half + 4.0),
            y: my - 12.0 - 0.5 * cheek_lift,
            along: 12.0,
            across: 2.5,
            angle: side * (1.1 - 0.6 * t),
            amplitude: -25.0 * t,
        });
    }

    // Template order: brows, glabella, eyes, nose, cheeks, nasolabial,
    // mouth ring, chin. Subject's right is image left.
    let mut nodes = Vec::with_capacity(34);
    let brow = |side: f64, f: f64| {
        let x = cx + side * (face.eye_dx + f * 18.0);
        (x, brow_y + side * f * 18.0 * brow_tilt.sin())
    };
    for (side, f) in [
        (-1.0, 1.0),
        (-1.0, 0.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (1.0, 0.0),
        (1.0, 1.0),
    ] {
        nodes.push(brow(side, f));
    }
    nodes.push((cx, brow_y + 6.0));
    for side in [-1.0, 1.0] {
        let ex = cx + side * face.eye_dx;
        let ring = [
            (side * 13.0, 0.0),
            (0.0, -eye_open),
            (-side * 13.0, 0.0),
            (0.0, eye_open),
        ];
        let order: [usize; 4] = if side < 0.0 {
            [0, 1, 2, 3]
        } else {
            [2, 1, 0, 3]
        };
        for k in order {
            nodes.push((ex + ring[k].0, ey + ring[k].1));
        }
    }
    nodes.push((cx, ey));
    nodes.push((cx - 10.0, ny + 6.0));
    nodes.push((cx, ny + 10.0));
    nodes.push((cx + 10.0, ny + 6.0));
    nodes.push((cx - face.eye_dx - 6.0, my - 26.0 - cheek_lift));
    nodes.push((cx + face.eye_dx + 6.0, my - 26.0 - cheek_lift));
    nodes.push((cx - mouth_half - 4.0, my - 12.0 - 0.5 * cheek_lift));
    nodes.push((cx + mouth_half + 4.0, my - 12.0 - 0.5 * cheek_lift));
    let upper = my - mouth_open - 2.0;
    let lower = my + mouth_open + 2.0;
    nodes.push((cx - mouth_half, my));
    nodes.push((cx - mouth_half / 2.0, upper));
    nodes.push((cx, upper));
    nodes.push((cx + mouth_half / 2.0, upper));
    nodes.push((cx + mouth_half, my));
    nodes.push((cx + mouth_half / 2.0, lower));
    nodes.push((cx, lower));
    nodes.push((cx - mouth_half / 2.0, lower));
    let chin = my + 34.0 + 3.0 * t;
    nodes.push((cx - 24.0, chin - 6.0));
    nodes.push((cx, chin));
    nodes.push((cx + 24.0, chin - 6.0));
    Features { blobs, nodes }
}

/// Smooth noise: bilinear interpolation of a coarse random lattice.
fn texture(rng: &mut ChaCha8Rng, cell: usize, amplitude: f64) -> Vec<f64> {
    let n = SIZE / cell + 2;
    let lattice: Vec<f64> = (0..n * n)
        .map(|_| rng.gen_range(-amplitude..amplitude))
        .collect();
    let mut out = vec![0.0; SIZE * SIZE];
    for y in 0..SIZE {
        for x in 0..SIZE {
            let (fx, fy) = (x as f64 / cell as f64, y as f64 / cell as f64);
            let (ix, iy) = (fx as usize, fy as usize);
            let (ax, ay) = (fx - ix as f64, fy - iy as f64);
            let l = |i: usize, j: usize| lattice[j * n + i];
            out[y * SIZE + x] = (1.0 - ay) * ((1.0 - ax) * l(ix, iy) + ax * l(ix + 1, iy))
                + ay * ((1.0 - ax) * l(ix, iy + 1) + ax * l(ix + 1, iy + 1));
        }
    }
    out
}

const LABELS: [&str; 6] = ["NE", "SA", "FE", "AN", "DI", "HA"];

/// Ratings as linear functions of `t`, so semantic distance is
/// proportional to `|t_a - t_b|`.
pub fn ratings_for(t: f64) -> [f64; 6] {
    [
        1.0 + 4.0 * t,
        5.0 - 3.0 * t,
        1.0 + 2.0 * t,
        2.0,
        3.0 - t,
        1.0 + 1.5 * t,
    ]
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticStudy {
    let template = GridTemplate::standard();
    let mut study = SyntheticStudy {
        images: Vec::new(),
        grids: Vec::new(),
        ratings: Vec::new(),
        expressers: BTreeMap::new(),
        labels: BTreeMap::new(),
        deformation: BTreeMap::new(),
    };
    let n = spec.images_per_expresser;
    for e in 0..spec.expressers {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(e as u64 * 0x9E37));
        let face = Face {
            eye_dx: rng.gen_range(34.0..42.0),
            eye_y: rng.gen_range(96.0..106.0),
            mouth_y: rng.gen_range(178.0..188.0),
            nose_y: rng.gen_range(138.0..146.0),
        };
        let coarse = texture(&mut rng, 8, 10.0);
        let fine: Vec<f64> = (0..SIZE * SIZE).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let expresser = format!("E{}", e + 1);
        for i in 0..n {
            let t = if n > 1 {
                i as f64 / (n - 1) as f64
            } else {
                0.0
            };
            let id = format!("{expresser}.{i:02}");
            let f = features(face, t);
            let img = ImageRaster::from_fn(SIZE, SIZE, |x, y| {
                let (px, py) = (x as f64, y as f64);
                let v = 70.0
                    + coarse[y * SIZE + x]
                    + fine[y * SIZE + x]
                    + f.blobs.iter().map(|b| b.at(px, py)).sum::<f64>();
                v.round().clamp(0.0, 255.0)
            })
            .expect("finite by construction");
            let nodes = template
                .names
                .iter()
                .zip(&f.nodes)
                .map(|(name, &(x, y))| GridNode::new(name.clone(), x, y))
                .collect();
            let grid =
                GridPlacement::new(id.clone(), nodes, template.nose_tip.clone(), (SIZE, SIZE))
                    .expect("nodes lie inside the image");
            let rating = RatingVector::new(
                id.clone(),
                ADJECTIVES.iter().map(|s| s.to_string()).collect(),
                ratings_for(t).to_vec(),
            )
            .expect("ratings lie on the scale");
            let label = LABELS[((t * LABELS.len() as f64) as usize).min(LABELS.len() - 1)];
            study.images.push((id.clone(), img));
            study.grids.push(grid);
            study.ratings.push(rating);
            study.expressers.insert(id.clone(), expresser.clone());
            study.labels.insert(id.clone(), label.to_string());
            study.deformation.insert(id, t);
        }
    }
    study
}

/// Writes images, grids, ratings and a `study.json` config under `dir`,
/// with outputs directed to `dir/out`. Returns the config path.
pub fn write_study(dir: &Path, study: &SyntheticStudy) -> Result<PathBuf> {
    for (id, img) in &study.images {
        write_pgm(&dir.join("images").join(format!("{id}.pgm")), img)?;
    }
    for g in &study.grids {
        save_grid(&dir.join("grids").join(format!("{}.json", g.image_id())), g)?;
    }
    fsutil::write_atomic(
        &dir.join("ratings.csv"),
        ratings_csv(&study.ratings)?.as_bytes(),
    )?;
    let config = StudyConfig {
        image_dir: PathBuf::from("images"),
        grid_dir: PathBuf::from("grids"),
        ratings: PathBuf::from("ratings.csv"),
        bank: Default::default(),
        expressers: study.expressers.clone(),
        labels: study.labels.clone(),
        output_dir: PathBuf::from("out"),
        options: StudyOptions::default(),
    };
    let path = dir.join("study.json");
    fsutil::write_json(&path, &config)?;
    Ok(path)
}
