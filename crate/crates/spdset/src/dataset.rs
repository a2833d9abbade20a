//! Dataset ingestion and frame preprocessing.
//!
//! A dataset on disk is a three-level tree: `root/class/set/frame files`.
//! Classes and sets are enumerated lexicographically so a manifest built
//! from the same tree is always identical, and class labels are simply the
//! rank of the class directory name. Frames decode to grayscale intensity
//! matrices in `[0, 1]` (color images via the 0.299/0.587/0.114 luminance
//! weights), then get bilinearly resized and optionally rotated before
//! entering the descriptor pipeline.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pipeline::ImageSet;

/// Image container formats the loader recognizes by file extension.
/// Portable any-map (P5/P6) is the native interchange format; the rest are
/// convenience adapters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    Pnm,
    Png,
    Jpeg,
    Bmp,
    Tiff,
}

impl FrameFormat {
    /// Maps a lowercase file extension to a format, `None` for files the
    /// loader should ignore.
    fn from_extension(ext: &str) -> Option<FrameFormat> {
        match ext {
            "pgm" | "ppm" | "pnm" | "pbm" | "pam" => Some(FrameFormat::Pnm),
            "png" => Some(FrameFormat::Png),
            "jpg" | "jpeg" => Some(FrameFormat::Jpeg),
            "bmp" => Some(FrameFormat::Bmp),
            "tif" | "tiff" => Some(FrameFormat::Tiff),
            _ => None,
        }
    }
}

impl fmt::Display for FrameFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FrameFormat::Pnm => "pnm",
            FrameFormat::Png => "png",
            FrameFormat::Jpeg => "jpeg",
            FrameFormat::Bmp => "bmp",
            FrameFormat::Tiff => "tiff",
        };
        f.write_str(name)
    }
}

/// One frame file inside an image-set directory.
#[derive(Debug, Clone)]
pub struct FrameEntry {
    pub path: PathBuf,
    pub format: FrameFormat,
}

/// One image-set directory: its name and the frames found inside.
#[derive(Debug, Clone)]
pub struct SetEntry {
    pub name: String,
    pub frames: Vec<FrameEntry>,
}

/// One class directory with its label (the lexicographic rank) and sets.
#[derive(Debug, Clone)]
pub struct ClassEntry {
    pub name: String,
    pub label: u32,
    pub sets: Vec<SetEntry>,
}

/// Deterministic enumeration of a dataset tree.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    root: PathBuf,
    classes: Vec<ClassEntry>,
}

impl DatasetManifest {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn n_sets(&self) -> usize {
        self.classes.iter().map(|c| c.sets.len()).sum()
    }

    /// Smallest number of sets any class has; bounds `train_per_class`.
    pub fn min_sets_per_class(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.sets.len())
            .min()
            .unwrap_or(0)
    }
}

/// Reads directory entry names of `dir`, sorted lexicographically.
fn sorted_entries(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = match entry.file_name().into_string() {
            Ok(n) => n,
            Err(_) => {
                log::warn!("skipping non-UTF-8 name under {}", dir.display());
                continue;
            }
        };
        out.push((name, entry.path()));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Scans `root/class/set/frames` into a manifest.
///
/// Classes and sets appear in lexicographic order and labels are assigned
/// by class rank. Non-image files are ignored; a set directory with fewer
/// than two candidate frames is dropped with a warning since it can never
/// produce a covariance. An empty tree is `EmptyDataset` and a class left
/// with fewer than two sets is `InsufficientSets`.
pub fn load_dataset(root: &Path) -> Result<DatasetManifest> {
    if !root.is_dir() {
        return Err(Error::EmptyDataset(root.to_path_buf()));
    }
    let mut classes = Vec::new();
    for (class_name, class_path) in sorted_entries(root)? {
        if !class_path.is_dir() {
            continue;
        }
        let mut sets = Vec::new();
        for (set_name, set_path) in sorted_entries(&class_path)? {
            if !set_path.is_dir() {
                continue;
            }
            let mut frames = Vec::new();
            for (frame_name, frame_path) in sorted_entries(&set_path)? {
                if !frame_path.is_file() {
                    continue;
                }
                let ext = Path::new(&frame_name)
                    .extension()
                    .and_then(|e| e.to_str())
                    .map(|e| e.to_ascii_lowercase())
                    .unwrap_or_default();
                if let Some(format) = FrameFormat::from_extension(&ext) {
                    frames.push(FrameEntry {
                        path: frame_path,
                        format,
                    });
                }
            }
            if frames.len() < 2 {
                log::warn!(
                    "skipping set {}/{}: {} image frame(s), need at least 2",
                    class_name,
                    set_name,
                    frames.len()
                );
                continue;
            }
            sets.push(SetEntry {
                name: set_name,
                frames,
            });
        }
        if sets.is_empty() {
            log::warn!("class directory {class_name} has no usable sets");
            continue;
        }
        classes.push((class_name, sets));
    }
    if classes.is_empty() {
        return Err(Error::EmptyDataset(root.to_path_buf()));
    }
    if let Some((name, sets)) = classes.iter().find(|(_, s)| s.len() < 2) {
        return Err(Error::InsufficientSets(format!(
            "class {name} has {} set(s), need at least 2",
            sets.len()
        )));
    }
    let classes = classes
        .into_iter()
        .enumerate()
        .map(|(label, (name, sets))| ClassEntry {
            name,
            label: label as u32,
            sets,
        })
        .collect();
    Ok(DatasetManifest {
        root: root.to_path_buf(),
        classes,
    })
}

/// Decodes one frame file into a grayscale intensity matrix in `[0, 1]`.
///
/// 8-bit grayscale images map directly as `value / 255`; anything else is
/// converted to RGB and reduced with the standard luminance weights
/// `0.299 R + 0.587 G + 0.114 B`.
pub fn decode_frame(path: &Path) -> Result<DMatrix<f64>> {
    let img = image::open(path).map_err(|e| Error::FrameDecode {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mat = match img {
        image::DynamicImage::ImageLuma8(gray) => {
            let (w, h) = gray.dimensions();
            DMatrix::from_fn(h as usize, w as usize, |r, c| {
                gray.get_pixel(c as u32, r as u32).0[0] as f64 / 255.0
            })
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = rgb.dimensions();
            DMatrix::from_fn(h as usize, w as usize, |r, c| {
                let p = rgb.get_pixel(c as u32, r as u32).0;
                (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0
            })
        }
    };
    if mat.is_empty() {
        return Err(Error::FrameDecode {
            path: path.to_path_buf(),
            reason: "image has zero pixels".into(),
        });
    }
    Ok(mat)
}

/// Quarter-turn rotations applied after resizing (an ablation knob; `R0`
/// leaves frames untouched).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rotation {
    #[default]
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    /// Rotation angle in degrees, clockwise.
    pub fn degrees(self) -> u32 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    /// Rotates a frame clockwise by this quarter turn.
    pub fn apply(self, frame: &DMatrix<f64>) -> DMatrix<f64> {
        let (h, w) = (frame.nrows(), frame.ncols());
        match self {
            Rotation::R0 => frame.clone(),
            Rotation::R90 => DMatrix::from_fn(w, h, |r, c| frame[(h - 1 - c, r)]),
            Rotation::R180 => DMatrix::from_fn(h, w, |r, c| frame[(h - 1 - r, w - 1 - c)]),
            Rotation::R270 => DMatrix::from_fn(w, h, |r, c| frame[(c, w - 1 - r)]),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degrees())
    }
}

impl FromStr for Rotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rotation> {
        match s.trim() {
            "0" => Ok(Rotation::R0),
            "90" => Ok(Rotation::R90),
            "180" => Ok(Rotation::R180),
            "270" => Ok(Rotation::R270),
            other => Err(Error::InvalidInput(format!(
                "rotation must be one of 0, 90, 180, 270, got {other:?}"
            ))),
        }
    }
}

/// Frame-level preprocessing: target size and optional rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessOptions {
    /// Target (height, width) of every frame after resizing.
    pub resize_to: (usize, usize),
    /// Quarter-turn applied after the resize.
    pub rotation: Rotation,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            resize_to: (24, 24),
            rotation: Rotation::R0,
        }
    }
}

/// Bilinear resampling to `dst_h × dst_w` with half-pixel centers:
/// destination pixel `(r, c)` samples source coordinate
/// `((r + 0.5)·h/dst_h − 0.5, (c + 0.5)·w/dst_w − 0.5)`, clamped to the
/// image. Resizing to the source size reproduces the input exactly, and
/// constant images stay constant.
pub fn bilinear_resize(src: &DMatrix<f64>, dst_h: usize, dst_w: usize) -> Result<DMatrix<f64>> {
    let (h, w) = (src.nrows(), src.ncols());
    if h == 0 || w == 0 || dst_h == 0 || dst_w == 0 {
        return Err(Error::InvalidInput(format!(
            "cannot resize {h}x{w} image to {dst_h}x{dst_w}"
        )));
    }
    if (h, w) == (dst_h, dst_w) {
        return Ok(src.clone());
    }
    let scale_r = h as f64 / dst_h as f64;
    let scale_c = w as f64 / dst_w as f64;
    let mut out = DMatrix::zeros(dst_h, dst_w);
    for r in 0..dst_h {
        let sr = ((r as f64 + 0.5) * scale_r - 0.5).clamp(0.0, (h - 1) as f64);
        let r0 = sr.floor() as usize;
        let r1 = (r0 + 1).min(h - 1);
        let fr = sr - r0 as f64;
        for c in 0..dst_w {
            let sc = ((c as f64 + 0.5) * scale_c - 0.5).clamp(0.0, (w - 1) as f64);
            let c0 = sc.floor() as usize;
            let c1 = (c0 + 1).min(w - 1);
            let fc = sc - c0 as f64;
            let top = src[(r0, c0)] * (1.0 - fc) + src[(r0, c1)] * fc;
            let bottom = src[(r1, c0)] * (1.0 - fc) + src[(r1, c1)] * fc;
            out[(r, c)] = top * (1.0 - fr) + bottom * fr;
        }
    }
    Ok(out)
}

/// Resizes, rotates, and packs decoded frames into an [`ImageSet`].
pub fn preprocess(
    frames: Vec<DMatrix<f64>>,
    label: u32,
    source_id: String,
    opts: &PreprocessOptions,
) -> Result<ImageSet> {
    let (dst_h, dst_w) = opts.resize_to;
    let mut processed = Vec::with_capacity(frames.len());
    for frame in &frames {
        let resized = bilinear_resize(frame, dst_h, dst_w)?;
        processed.push(opts.rotation.apply(&resized));
    }
    ImageSet::new(label, processed, source_id)
}

/// Decodes and preprocesses one image-set directory. Undecodable frames
/// are skipped with a warning; if fewer than two frames survive the set is
/// rejected with a decode error naming the directory.
pub fn load_image_set(
    entry: &SetEntry,
    label: u32,
    source_id: &str,
    opts: &PreprocessOptions,
) -> Result<ImageSet> {
    let mut frames = Vec::with_capacity(entry.frames.len());
    for frame in &entry.frames {
        match decode_frame(&frame.path) {
            Ok(mat) => frames.push(mat),
            Err(e) => log::warn!("dropping frame {}: {e}", frame.path.display()),
        }
    }
    if frames.len() < 2 {
        return Err(Error::FrameDecode {
            path: PathBuf::from(source_id),
            reason: format!(
                "only {} of {} frames decoded, need at least 2",
                frames.len(),
                entry.frames.len()
            ),
        });
    }
    preprocess(frames, label, source_id.to_string(), opts)
}

/// Loads every set named in the manifest. Sets that fail to load are
/// skipped with a warning; a class reduced below two usable sets fails the
/// whole load with `InsufficientSets`.
pub fn load_sets(manifest: &DatasetManifest, opts: &PreprocessOptions) -> Result<Vec<ImageSet>> {
    let mut out = Vec::with_capacity(manifest.n_sets());
    for class in manifest.classes() {
        let mut usable = 0usize;
        for set in &class.sets {
            let source_id = format!("{}/{}", class.name, set.name);
            match load_image_set(set, class.label, &source_id, opts) {
                Ok(image_set) => {
                    usable += 1;
                    out.push(image_set);
                }
                Err(e) => log::warn!("skipping set {source_id}: {e}"),
            }
        }
        if usable < 2 {
            return Err(Error::InsufficientSets(format!(
                "class {} has {usable} usable set(s) after decoding, need at least 2",
                class.name
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::io::Write;

    /// Writes a binary PGM (P5) file with the given pixel rows.
    fn write_pgm(path: &Path, rows: &[Vec<u8>]) {
        let h = rows.len();
        let w = rows[0].len();
        let mut f = fs::File::create(path).unwrap();
        write!(f, "P5\n{w} {h}\n255\n").unwrap();
        for row in rows {
            f.write_all(row).unwrap();
        }
    }

    /// Writes a binary PPM (P6) file with the given (r, g, b) pixel rows.
    fn write_ppm(path: &Path, rows: &[Vec<[u8; 3]>]) {
        let h = rows.len();
        let w = rows[0].len();
        let mut f = fs::File::create(path).unwrap();
        write!(f, "P6\n{w} {h}\n255\n").unwrap();
        for row in rows {
            for px in row {
                f.write_all(px).unwrap();
            }
        }
    }

    /// Builds `root/class_i/set_j/frame_k.pgm` with constant-value frames.
    fn build_tree(root: &Path, classes: usize, sets: usize, frames: usize) {
        for ci in 0..classes {
            for si in 0..sets {
                let dir = root.join(format!("class_{ci}")).join(format!("set_{si}"));
                fs::create_dir_all(&dir).unwrap();
                for fi in 0..frames {
                    let value = (10 * ci + si + fi) as u8;
                    write_pgm(
                        &dir.join(format!("frame_{fi}.pgm")),
                        &vec![vec![value; 8]; 8],
                    );
                }
            }
        }
    }

    #[test]
    fn manifest_enumerates_tree_lexicographically() {
        let tmp = tempfile::tempdir().unwrap();
        build_tree(tmp.path(), 3, 4, 5);
        let manifest = load_dataset(tmp.path()).unwrap();
        assert_eq!(manifest.n_classes(), 3);
        assert_eq!(manifest.n_sets(), 12);
        assert_eq!(manifest.min_sets_per_class(), 4);
        for (i, class) in manifest.classes().iter().enumerate() {
            assert_eq!(class.name, format!("class_{i}"));
            assert_eq!(class.label, i as u32);
            assert_eq!(class.sets.len(), 4);
            for (j, set) in class.sets.iter().enumerate() {
                assert_eq!(set.name, format!("set_{j}"));
                assert_eq!(set.frames.len(), 5);
                assert_eq!(set.frames[0].format, FrameFormat::Pnm);
            }
        }
    }

    #[test]
    fn manifest_rejects_empty_and_thin_classes() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_dataset(tmp.path()),
            Err(Error::EmptyDataset(_))
        ));
        // One class with a single set is not enough for a split protocol.
        build_tree(tmp.path(), 1, 1, 3);
        assert!(matches!(
            load_dataset(tmp.path()),
            Err(Error::InsufficientSets(_))
        ));
        assert!(matches!(
            load_dataset(&tmp.path().join("missing")),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn manifest_ignores_foreign_files_and_thin_sets() {
        let tmp = tempfile::tempdir().unwrap();
        build_tree(tmp.path(), 2, 2, 3);
        // Stray files at every level must not disturb enumeration.
        fs::write(tmp.path().join("README.txt"), "notes").unwrap();
        fs::write(tmp.path().join("class_0").join("index.csv"), "x").unwrap();
        fs::write(
            tmp.path().join("class_0").join("set_0").join("meta.json"),
            "{}",
        )
        .unwrap();
        // A set directory with one frame is dropped, the class survives.
        let thin = tmp.path().join("class_1").join("set_thin");
        fs::create_dir_all(&thin).unwrap();
        write_pgm(&thin.join("only.pgm"), &vec![vec![5u8; 4]; 4]);
        let manifest = load_dataset(tmp.path()).unwrap();
        assert_eq!(manifest.n_sets(), 4);
        assert_eq!(manifest.classes()[1].sets.len(), 2);
    }

    #[test]
    fn decode_gray_and_color_frames() {
        let tmp = tempfile::tempdir().unwrap();
        let gray_path = tmp.path().join("g.pgm");
        write_pgm(&gray_path, &[vec![0, 51, 255], vec![102, 153, 204]]);
        let gray = decode_frame(&gray_path).unwrap();
        assert_eq!(gray.shape(), (2, 3));
        assert_eq!(gray[(0, 0)], 0.0);
        assert_eq!(gray[(0, 2)], 1.0);
        assert!((gray[(1, 0)] - 102.0 / 255.0).abs() < 1e-15);

        let color_path = tmp.path().join("c.ppm");
        write_ppm(
            &color_path,
            &[vec![[255, 0, 0], [0, 255, 0], [0, 0, 255], [255, 255, 255]]],
        );
        let color = decode_frame(&color_path).unwrap();
        assert_eq!(color.shape(), (1, 4));
        assert!((color[(0, 0)] - 0.299).abs() < 1e-12);
        assert!((color[(0, 1)] - 0.587).abs() < 1e-12);
        assert!((color[(0, 2)] - 0.114).abs() < 1e-12);
        assert!((color[(0, 3)] - 1.0).abs() < 1e-12);

        let garbage = tmp.path().join("bad.png");
        fs::write(&garbage, b"this is not an image").unwrap();
        assert!(matches!(
            decode_frame(&garbage),
            Err(Error::FrameDecode { .. })
        ));
    }

    #[test]
    fn corrupt_frame_is_skipped_with_set_still_usable() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("class_a").join("set_a");
        fs::create_dir_all(&dir).unwrap();
        for i in 0..4 {
            write_pgm(
                &dir.join(format!("f{i}.pgm")),
                &vec![vec![(40 * i) as u8; 6]; 6],
            );
        }
        fs::write(dir.join("f4.pgm"), b"P5 garbage").unwrap();
        let entry = SetEntry {
            name: "set_a".into(),
            frames: (0..5)
                .map(|i| FrameEntry {
                    path: dir.join(format!("f{i}.pgm")),
                    format: FrameFormat::Pnm,
                })
                .collect(),
        };
        let opts = PreprocessOptions {
            resize_to: (6, 6),
            rotation: Rotation::R0,
        };
        let set = load_image_set(&entry, 0, "class_a/set_a", &opts).unwrap();
        assert_eq!(set.n_frames(), 4);

        // With only one decodable frame left the set is rejected.
        let entry_thin = SetEntry {
            name: "set_a".into(),
            frames: vec![
                FrameEntry {
                    path: dir.join("f0.pgm"),
                    format: FrameFormat::Pnm,
                },
                FrameEntry {
                    path: dir.join("f4.pgm"),
                    format: FrameFormat::Pnm,
                },
            ],
        };
        assert!(matches!(
            load_image_set(&entry_thin, 0, "class_a/set_a", &opts),
            Err(Error::FrameDecode { .. })
        ));
    }

    #[test]
    fn bilinear_identity_constant_and_known_values() {
        // Same-size resize is an exact identity.
        let src = DMatrix::from_fn(5, 7, |r, c| (3 * r + c) as f64 / 30.0);
        assert_eq!(bilinear_resize(&src, 5, 7).unwrap(), src);

        // Downscaling a constant image preserves the constant exactly.
        let constant = DMatrix::from_element(48, 48, 0.42);
        let small = bilinear_resize(&constant, 24, 24).unwrap();
        assert_eq!(small.shape(), (24, 24));
        assert!(small.iter().all(|&v| v == 0.42));

        // Hand-computed 1x2 -> 1x4 with half-pixel centers: the source
        // coordinates are -0.25, 0.25, 0.75, 1.25, clamped at the ends.
        let line = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let wide = bilinear_resize(&line, 1, 4).unwrap();
        let expect = [0.0, 0.25, 0.75, 1.0];
        for (got, want) in wide.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }

        assert!(bilinear_resize(&line, 0, 4).is_err());
    }

    #[test]
    fn rotations_compose_and_match_hand_values() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        // 90 degrees clockwise: first column becomes the top row reversed.
        let r90 = Rotation::R90.apply(&m);
        assert_eq!(r90, DMatrix::from_row_slice(3, 2, &[4.0, 1.0, 5.0, 2.0, 6.0, 3.0]));
        // Two quarter turns are a half turn; four are the identity.
        let r180 = Rotation::R180.apply(&m);
        assert_eq!(Rotation::R90.apply(&r90), r180);
        assert_eq!(Rotation::R180.apply(&r180), m);
        assert_eq!(Rotation::R270.apply(&r90), m);
        assert_eq!(
            Rotation::R90.apply(&Rotation::R270.apply(&m)),
            m
        );
        assert_eq!("90".parse::<Rotation>().unwrap(), Rotation::R90);
        assert!("45".parse::<Rotation>().is_err());
    }

    #[test]
    fn preprocess_resizes_then_rotates() {
        let frames = vec![
            DMatrix::from_element(48, 48, 0.25),
            DMatrix::from_fn(48, 48, |r, c| ((r + c) % 2) as f64),
        ];
        let opts = PreprocessOptions {
            resize_to: (24, 24),
            rotation: Rotation::R180,
        };
        let set = preprocess(frames, 3, "synthetic".into(), &opts).unwrap();
        assert_eq!(set.label(), 3);
        assert_eq!(set.frame_dims(), (24, 24));
        assert_eq!(set.n_frames(), 2);
        assert!(set.frames()[0].iter().all(|&v| v == 0.25));
    }

    #[test]
    fn load_sets_end_to_end() {
        let tmp = tempfile::tempdir().unwrap();
        build_tree(tmp.path(), 2, 3, 4);
        let manifest = load_dataset(tmp.path()).unwrap();
        let opts = PreprocessOptions {
            resize_to: (8, 8),
            rotation: Rotation::R0,
        };
        let sets = load_sets(&manifest, &opts).unwrap();
        assert_eq!(sets.len(), 6);
        assert_eq!(sets[0].source_id(), "class_0/set_0");
        assert_eq!(sets[0].label(), 0);
        assert_eq!(sets[5].label(), 1);
        // Constant value in frame 0 of class 0 / set 0 is 0/255 = 0, and
        // of class 1 / set 2 is (10 + 2 + 0)/255.
        assert_eq!(sets[0].frames()[0][(0, 0)], 0.0);
        assert!((sets[5].frames()[0][(0, 0)] - 12.0 / 255.0).abs() < 1e-15);
    }
}
