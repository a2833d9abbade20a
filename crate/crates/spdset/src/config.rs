//! Experiment configuration: a flat key-value text format.
//!
//! A config file is a list of `key = value` lines; blank lines and lines
//! starting with `#` are ignored. Every key has a default, so the empty
//! file is a valid configuration, and unknown or repeated keys are
//! rejected rather than silently dropped. [`ExperimentConfig::to_text`]
//! writes the complete configuration back in the same format, which is
//! how result files echo their provenance.
//!
//! ```text
//! # which descriptor/classifier to evaluate
//! descriptor = covds-s
//! classifier = ker-svm
//! train_per_class = 5
//! orders = 0,1,2,3
//! resize_to = 24x24
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::dataset::Rotation;
use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::pipeline::PipelineConfig;

/// Which image-set representation the experiment evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DescriptorKind {
    /// Plain covariance of vectorized frames.
    CovDs,
    /// Sum-kernel representation over mean-centralized sub-image sets.
    #[default]
    CovDsS,
}

impl fmt::Display for DescriptorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DescriptorKind::CovDs => "covds",
            DescriptorKind::CovDsS => "covds-s",
        })
    }
}

impl FromStr for DescriptorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "covds" => Ok(DescriptorKind::CovDs),
            "covds-s" => Ok(DescriptorKind::CovDsS),
            other => Err(Error::InvalidInput(format!(
                "descriptor must be covds or covds-s, got {other:?}"
            ))),
        }
    }
}

/// Which classifier scores the held-out sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassifierKind {
    NnAirm,
    NnStein,
    NnJeffrey,
    NnLem,
    #[default]
    KerSvm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::NnAirm,
        ClassifierKind::NnStein,
        ClassifierKind::NnJeffrey,
        ClassifierKind::NnLem,
        ClassifierKind::KerSvm,
    ];

    /// The dissimilarity behind a nearest-neighbour classifier, `None`
    /// for the SVM.
    pub fn metric(&self) -> Option<MetricKind> {
        match self {
            ClassifierKind::NnAirm => Some(MetricKind::Airm),
            ClassifierKind::NnStein => Some(MetricKind::Stein),
            ClassifierKind::NnJeffrey => Some(MetricKind::Jeffrey),
            ClassifierKind::NnLem => Some(MetricKind::Lem),
            ClassifierKind::KerSvm => None,
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::NnAirm => "nn-airm",
            ClassifierKind::NnStein => "nn-stein",
            ClassifierKind::NnJeffrey => "nn-jeffrey",
            ClassifierKind::NnLem => "nn-lem",
            ClassifierKind::KerSvm => "ker-svm",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nn-airm" => Ok(ClassifierKind::NnAirm),
            "nn-stein" => Ok(ClassifierKind::NnStein),
            "nn-jeffrey" => Ok(ClassifierKind::NnJeffrey),
            "nn-lem" => Ok(ClassifierKind::NnLem),
            "ker-svm" => Ok(ClassifierKind::KerSvm),
            other => Err(Error::InvalidInput(format!(
                "classifier must be one of nn-airm, nn-stein, nn-jeffrey, nn-lem, ker-svm; got {other:?}"
            ))),
        }
    }
}

/// Everything a randomized-split experiment needs besides the data root.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub pipeline: PipelineConfig,
    pub descriptor: DescriptorKind,
    pub classifier: ClassifierKind,
    /// Number of random train/test splits to average over.
    pub splits: usize,
    /// Training sets drawn per class in every split.
    pub train_per_class: usize,
    /// Master seed; split `s` derives its own RNG stream from `(seed, s)`.
    pub seed: u64,
    /// How many kernel orders survive weight binarization.
    pub k_orders: usize,
    /// Soft-margin box parameter of the kernel SVM.
    pub svm_c: f64,
    /// Quarter-turn applied to every frame after resizing.
    pub rotation: Rotation,
    /// Target frame size (height, width).
    pub resize_to: (usize, usize),
    /// Include wall-clock phase timings in the result file. Off by
    /// default so result files are byte-reproducible.
    pub emit_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pipeline: PipelineConfig::default(),
            descriptor: DescriptorKind::default(),
            classifier: ClassifierKind::default(),
            splits: 10,
            train_per_class: 5,
            seed: 0,
            k_orders: 2,
            svm_c: 1.0,
            rotation: Rotation::R0,
            resize_to: (24, 24),
            emit_timings: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| Error::InvalidInput(format!("key {key}: cannot parse {value:?}: {e}")))
}

fn parse_orders(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|tok| parse_num::<usize>("orders", tok))
        .collect()
}

fn parse_resize(value: &str) -> Result<(usize, usize)> {
    let mut it = value.trim().split('x');
    match (it.next(), it.next(), it.next()) {
        (Some(h), Some(w), None) => Ok((
            parse_num::<usize>("resize_to", h)?,
            parse_num::<usize>("resize_to", w)?,
        )),
        _ => Err(Error::InvalidInput(format!(
            "resize_to must look like 24x24, got {value:?}"
        ))),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::InvalidInput(format!(
            "key {key}: expected true or false, got {other:?}"
        ))),
    }
}

impl ExperimentConfig {
    /// Parses the flat key-value format; every omitted key keeps its
    /// default. Unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!(
                    "line {}: expected `key = value`, got {line:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::InvalidInput(format!(
                    "line {}: key {key} given twice",
                    lineno + 1
                )));
            }
            seen.push(key.to_string());
            match key {
                "descriptor" => cfg.descriptor = value.parse()?,
                "classifier" => cfg.classifier = value.parse()?,
                "splits" => cfg.splits = parse_num(key, value)?,
                "train_per_class" => cfg.train_per_class = parse_num(key, value)?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "k_orders" => cfg.k_orders = parse_num(key, value)?,
                "svm_c" => cfg.svm_c = parse_num(key, value)?,
                "rotation" => cfg.rotation = value.parse()?,
                "resize_to" => cfg.resize_to = parse_resize(value)?,
                "win" => cfg.pipeline.win = parse_num(key, value)?,
                "stride" => cfg.pipeline.stride = parse_num(key, value)?,
                "beta" => cfg.pipeline.beta = parse_num(key, value)?,
                "lambda_frac" => cfg.pipeline.lambda_frac = parse_num(key, value)?,
                "orders" => cfg.pipeline.orders = parse_orders(value)?,
                "eig_floor" => cfg.pipeline.eig_floor = parse_num(key, value)?,
                "emit_timings" => cfg.emit_timings = parse_bool(key, value)?,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
            .map_err(|e| e.with_context(format!("config {}", path.display())))
    }

    /// Serializes every key in a fixed order; `parse` round-trips it.
    pub fn to_text(&self) -> String {
        let orders = self
            .pipeline
            .orders
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "descriptor = {}\nclassifier = {}\nsplits = {}\ntrain_per_class = {}\nseed = {}\n\
             k_orders = {}\nsvm_c = {}\nrotation = {}\nresize_to = {}x{}\nwin = {}\nstride = {}\n\
             beta = {}\nlambda_frac = {}\norders = {}\neig_floor = {}\nemit_timings = {}\n",
            self.descriptor,
            self.classifier,
            self.splits,
            self.train_per_class,
            self.seed,
            self.k_orders,
            self.svm_c,
            self.rotation,
            self.resize_to.0,
            self.resize_to.1,
            self.pipeline.win,
            self.pipeline.stride,
            self.pipeline.beta,
            self.pipeline.lambda_frac,
            orders,
            self.pipeline.eig_floor,
            self.emit_timings,
        )
    }

    /// Checks everything that does not need the dataset; the
    /// `train_per_class < sets per class` bound is checked at run time.
    pub fn validate(&self) -> Result<()> {
        self.pipeline.validate()?;
        if self.splits == 0 {
            return Err(Error::InvalidInput("splits must be at least 1".into()));
        }
        if self.train_per_class == 0 {
            return Err(Error::InvalidInput(
                "train_per_class must be at least 1".into(),
            ));
        }
        if self.k_orders == 0 || self.k_orders > self.pipeline.orders.len() {
            return Err(Error::InvalidInput(format!(
                "k_orders must be in 1..={}, got {}",
                self.pipeline.orders.len(),
                self.k_orders
            )));
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "svm_c must be positive and finite, got {}",
                self.svm_c
            )));
        }
        if self.resize_to.0 < self.pipeline.win || self.resize_to.1 < self.pipeline.win {
            return Err(Error::InvalidInput(format!(
                "resize_to {}x{} is smaller than the window size {}",
                self.resize_to.0, self.resize_to.1, self.pipeline.win
            )));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentConfig::parse(s)
    }
}
