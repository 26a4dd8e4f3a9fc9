//! Experiment configuration: TOML file with sections, every key also
//! available as a command-line flag that overrides the file value. The
//! fully resolved configuration is embedded in every emitted table and
//! round-trips losslessly.

use serde::{Deserialize, Serialize};

use rwpnet::geometry::{ConvexDomain, Point2};
use rwpnet::numerics::QuadratureSpec;
use rwpnet::rwpm::{LegStatistics, MobilityParams, PdfKind, StationaryDistribution};
use rwpnet::ChannelParamsf;

use crate::error::{CliError, CliResult};

/// Partial, on-disk configuration (all keys optional).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub mobility: MobilitySection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub shape: Option<String>,
    pub half_width: Option<f64>,
    pub half_height: Option<f64>,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySection {
    pub pdf: Option<String>,
    pub wp: Option<f64>,
    pub v_min: Option<f64>,
    pub speed_ratio: Option<f64>,
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub power: Option<f64>,
    pub noise: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub out_dir: Option<String>,
    pub format: Option<String>,
    pub plot: Option<bool>,
    pub trials: Option<usize>,
    pub distances: Option<Vec<f64>>,
    pub node_counts: Option<Vec<usize>>,
    pub wp_sweep: Option<Vec<f64>>,
    pub receivers: Option<Vec<String>>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Output data format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::Config(format!(
                "run.format: expected \"csv\" or \"json\", got \"{other}\""
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    pub fn extension(self) -> &'static str {
        self.name()
    }
}

/// A receiver position, named or explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReceiverSpec {
    Centre,
    EdgeMidX,
    EdgeMidY,
    Corner,
    Point(f64, f64),
}

impl ReceiverSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s.trim() {
            "centre" | "center" => Ok(ReceiverSpec::Centre),
            "edge" | "edge_x" => Ok(ReceiverSpec::EdgeMidX),
            "edge_y" => Ok(ReceiverSpec::EdgeMidY),
            "corner" => Ok(ReceiverSpec::Corner),
            other => {
                let parts: Vec<&str> = other.split(',').collect();
                if parts.len() == 2 {
                    let x = parts[0].trim().parse::<f64>();
                    let y = parts[1].trim().parse::<f64>();
                    if let (Ok(x), Ok(y)) = (x, y) {
                        return Ok(ReceiverSpec::Point(x, y));
                    }
                }
                Err(CliError::Config(format!(
                    "run.receivers: \"{other}\" is neither a named position \
                     (centre, edge, edge_y, corner) nor an \"x,y\" pair"
                )))
            }
        }
    }

    pub fn resolve(&self, domain: &ConvexDomain<f64>) -> CliResult<(String, Point2<f64>)> {
        let point = match (self, domain) {
            (ReceiverSpec::Centre, _) => Point2::origin(),
            (ReceiverSpec::EdgeMidX, ConvexDomain::Rectangle { half_width, .. }) => {
                Point2::new(*half_width, 0.0)
            }
            (ReceiverSpec::EdgeMidY, ConvexDomain::Rectangle { half_height, .. }) => {
                Point2::new(0.0, *half_height)
            }
            (ReceiverSpec::EdgeMidX | ReceiverSpec::EdgeMidY, ConvexDomain::Disk { radius }) => {
                Point2::new(*radius, 0.0)
            }
            (
                ReceiverSpec::Corner,
                ConvexDomain::Rectangle {
                    half_width,
                    half_height,
                },
            ) => Point2::new(*half_width, *half_height),
            (ReceiverSpec::Corner, ConvexDomain::Disk { .. }) => {
                return Err(CliError::Config(
                    "run.receivers: a disk has no corner".into(),
                ))
            }
            (ReceiverSpec::Point(x, y), _) => Point2::new(*x, *y),
        };
        if !domain.contains_with_tolerance(&point) {
            return Err(CliError::Config(format!(
                "run.receivers: position ({}, {}) lies outside the domain",
                point.x, point.y
            )));
        }
        Ok((self.label(), point))
    }

    pub fn label(&self) -> String {
        match self {
            ReceiverSpec::Centre => "centre".into(),
            ReceiverSpec::EdgeMidX => "edge".into(),
            ReceiverSpec::EdgeMidY => "edge_y".into(),
            ReceiverSpec::Corner => "corner".into(),
            ReceiverSpec::Point(x, y) => format!("{x},{y}"),
        }
    }

    fn spec_string(&self) -> String {
        match self {
            ReceiverSpec::Point(x, y) => format!("{x},{y}"),
            other => other.label(),
        }
    }
}

/// Fully resolved experiment: every field populated, validated, and
/// serializable into table metadata.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub domain: ConvexDomain<f64>,
    pub pdf_kind: PdfKind,
    /// pause probability; either given directly or derived from the
    /// mobility timing parameters
    pub wp: f64,
    pub mobility: Option<MobilityParams<f64>>,
    pub channel: ChannelParamsf,
    pub nodes: usize,
    pub seed: u64,
    pub grid: usize,
    pub out_dir: String,
    pub format: OutputFormat,
    pub plot: bool,
    pub trials: usize,
    pub distances: Vec<f64>,
    pub node_counts: Vec<usize>,
    pub wp_sweep: Vec<f64>,
    pub receivers: Vec<ReceiverSpec>,
}

impl Experiment {
    /// Resolves a partial config; defaults fill anything left unset.
    pub fn resolve(file: &ConfigFile) -> CliResult<Self> {
        let shape = file.domain.shape.as_deref().unwrap_or("rectangle");
        let domain = match shape {
            "rectangle" => {
                let a = file.domain.half_width.unwrap_or(1.0);
                let b = file.domain.half_height.unwrap_or(1.0);
                ConvexDomain::rectangle(a, b)
                    .map_err(|e| CliError::Config(format!("domain: {e}")))?
            }
            "disk" => {
                let r = file.domain.radius.unwrap_or(1.0);
                ConvexDomain::disk(r).map_err(|e| CliError::Config(format!("domain: {e}")))?
            }
            other => {
                return Err(CliError::Config(format!(
                    "domain.shape: expected \"rectangle\" or \"disk\", got \"{other}\""
                )))
            }
        };

        let pdf_kind = match file.mobility.pdf.as_deref().unwrap_or("exact") {
            "exact" => PdfKind::Exact,
            "approximate" | "approx" => PdfKind::Approximate,
            other => {
                return Err(CliError::Config(format!(
                    "mobility.pdf: expected \"exact\" or \"approximate\", got \"{other}\""
                )))
            }
        };

        let mobility = match (
            file.mobility.v_min,
            file.mobility.speed_ratio,
            file.mobility.t_max,
        ) {
            (None, None, None) => None,
            (v, k, t) => Some(
                MobilityParams::new(v.unwrap_or(1.0), k.unwrap_or(1.0), t.unwrap_or(0.0))
                    .map_err(|e| CliError::Config(format!("mobility: {e}")))?,
            ),
        };

        let wp = match (file.mobility.wp, &mobility) {
            (Some(wp), _) => {
                if !(0.0..=1.0).contains(&wp) {
                    return Err(CliError::Config(
                        "mobility.wp: must lie in [0, 1]".into(),
                    ));
                }
                wp
            }
            (None, Some(mob)) => {
                let spec = QuadratureSpec::default_1d();
                let stats = rwpnet::rwpm::leg_statistics(&domain, mob, &spec)?;
                stats.pause_probability
            }
            (None, None) => 0.0,
        };

        let channel = ChannelParamsf::new(
            file.channel.power.unwrap_or(1.0),
            file.channel.noise.unwrap_or(1.0),
            file.channel.eta.unwrap_or(2.0),
            file.channel.epsilon.unwrap_or(0.0),
            file.channel.gamma.unwrap_or(1.0),
            file.channel.threshold.unwrap_or(1.0),
        )
        .map_err(|e| CliError::Config(format!("channel: {e}")))?;

        let nodes = file.network.nodes.unwrap_or(40);
        if nodes < 2 {
            return Err(CliError::Config("network.nodes: need at least 2".into()));
        }

        let grid = file.run.grid.unwrap_or(101);
        if grid < 2 {
            return Err(CliError::Config("run.grid: need at least 2".into()));
        }
        let trials = file.run.trials.unwrap_or(10_000);
        if trials == 0 {
            return Err(CliError::Config("run.trials: need at least 1".into()));
        }
        let format = OutputFormat::parse(file.run.format.as_deref().unwrap_or("csv"))?;
        let receivers = file
            .run
            .receivers
            .clone()
            .unwrap_or_else(|| vec!["centre".to_string()])
            .iter()
            .map(|s| ReceiverSpec::parse(s))
            .collect::<CliResult<Vec<_>>>()?;
        let distances = file
            .run
            .distances
            .clone()
            .unwrap_or_else(|| vec![0.25, 0.5, 0.75, 1.0]);
        if distances.iter().any(|d| !(*d > 0.0)) {
            return Err(CliError::Config(
                "run.distances: every distance must be > 0".into(),
            ));
        }
        let node_counts = file.run.node_counts.clone().unwrap_or_default();
        let wp_sweep = file.run.wp_sweep.clone().unwrap_or_default();
        if wp_sweep.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(CliError::Config(
                "run.wp_sweep: every weight must lie in [0, 1]".into(),
            ));
        }

        Ok(Experiment {
            domain,
            pdf_kind,
            wp,
            mobility,
            channel,
            nodes,
            seed: file.run.seed.unwrap_or(0),
            grid,
            out_dir: file.run.out_dir.clone().unwrap_or_else(|| "out".into()),
            format,
            plot: file.run.plot.unwrap_or(false),
            trials,
            distances,
            node_counts,
            wp_sweep,
            receivers,
        })
    }

    /// Pause probabilities to sweep; defaults to the single resolved value.
    pub fn wp_values(&self) -> Vec<f64> {
        if self.wp_sweep.is_empty() {
            vec![self.wp]
        } else {
            self.wp_sweep.clone()
        }
    }

    /// Builds the stationary distribution at the experiment's pause weight.
    pub fn distribution(&self) -> CliResult<StationaryDistribution<f64>> {
        let spec = QuadratureSpec::default_1d();
        Ok(StationaryDistribution::new(
            self.domain,
            self.wp,
            self.pdf_kind,
            &spec,
        )?)
    }

    /// Leg statistics when mobility timing parameters are configured.
    pub fn leg_statistics(&self, mean_leg: f64) -> Option<LegStatistics<f64>> {
        self.mobility
            .as_ref()
            .map(|mob| LegStatistics::from_mean_leg(mean_leg, mob))
    }

    /// Flat, ordered key-value view embedded in table metadata; parsing the
    /// pairs back reproduces the experiment exactly.
    pub fn metadata_pairs(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| pairs.push((format!("config.{k}"), v));
        match self.domain {
            ConvexDomain::Rectangle {
                half_width,
                half_height,
            } => {
                push("domain.shape", "rectangle".into());
                push("domain.half_width", fmt_float(half_width));
                push("domain.half_height", fmt_float(half_height));
            }
            ConvexDomain::Disk { radius } => {
                push("domain.shape", "disk".into());
                push("domain.radius", fmt_float(radius));
            }
        }
        push(
            "mobility.pdf",
            match self.pdf_kind {
                PdfKind::Exact => "exact".into(),
                PdfKind::Approximate => "approximate".into(),
            },
        );
        push("mobility.wp", fmt_float(self.wp));
        if let Some(mob) = &self.mobility {
            push("mobility.v_min", fmt_float(mob.v_min));
            push("mobility.speed_ratio", fmt_float(mob.speed_ratio));
            push("mobility.t_max", fmt_float(mob.t_max));
        }
        push("channel.power", fmt_float(self.channel.power));
        push("channel.noise", fmt_float(self.channel.noise));
        push("channel.eta", fmt_float(self.channel.eta));
        push("channel.epsilon", fmt_float(self.channel.epsilon));
        push("channel.gamma", fmt_float(self.channel.gamma));
        push("channel.threshold", fmt_float(self.channel.threshold));
        push("network.nodes", self.nodes.to_string());
        push("run.seed", self.seed.to_string());
        push("run.grid", self.grid.to_string());
        push("run.out_dir", self.out_dir.clone());
        push("run.format", self.format.name().into());
        push("run.plot", self.plot.to_string());
        push("run.trials", self.trials.to_string());
        push(
            "run.distances",
            self.distances
                .iter()
                .map(|d| fmt_float(*d))
                .collect::<Vec<_>>()
                .join(";"),
        );
        push(
            "run.node_counts",
            self.node_counts
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        );
        push(
            "run.wp_sweep",
            self.wp_sweep
                .iter()
                .map(|w| fmt_float(*w))
                .collect::<Vec<_>>()
                .join(";"),
        );
        push(
            "run.receivers",
            self.receivers
                .iter()
                .map(|r| r.spec_string())
                .collect::<Vec<_>>()
                .join(";"),
        );
        pairs
    }

    /// Reconstructs an experiment from embedded metadata pairs.
    pub fn from_metadata_pairs(pairs: &[(String, String)]) -> CliResult<Experiment> {
        let get = |key: &str| -> Option<&str> {
            pairs
                .iter()
                .find(|(k, _)| k == &format!("config.{key}"))
                .map(|(_, v)| v.as_str())
        };
        let parse_f64 = |key: &str| -> CliResult<Option<f64>> {
            get(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|e| CliError::Config(format!("{key}: {e}")))
                })
                .transpose()
        };
        let parse_list = |key: &str| -> Option<Vec<String>> {
            get(key).map(|v| {
                if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(';').map(|s| s.to_string()).collect()
                }
            })
        };

        let mut file = ConfigFile::default();
        file.domain.shape = get("domain.shape").map(|s| s.to_string());
        file.domain.half_width = parse_f64("domain.half_width")?;
        file.domain.half_height = parse_f64("domain.half_height")?;
        file.domain.radius = parse_f64("domain.radius")?;
        file.mobility.pdf = get("mobility.pdf").map(|s| s.to_string());
        file.mobility.wp = parse_f64("mobility.wp")?;
        file.mobility.v_min = parse_f64("mobility.v_min")?;
        file.mobility.speed_ratio = parse_f64("mobility.speed_ratio")?;
        file.mobility.t_max = parse_f64("mobility.t_max")?;
        file.channel.power = parse_f64("channel.power")?;
        file.channel.noise = parse_f64("channel.noise")?;
        file.channel.eta = parse_f64("channel.eta")?;
        file.channel.epsilon = parse_f64("channel.epsilon")?;
        file.channel.gamma = parse_f64("channel.gamma")?;
        file.channel.threshold = parse_f64("channel.threshold")?;
        file.network.nodes = get("network.nodes")
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("network.nodes: {e}"))))
            .transpose()?;
        file.run.seed = get("run.seed")
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("run.seed: {e}"))))
            .transpose()?;
        file.run.grid = get("run.grid")
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("run.grid: {e}"))))
            .transpose()?;
        file.run.out_dir = get("run.out_dir").map(|s| s.to_string());
        file.run.format = get("run.format").map(|s| s.to_string());
        file.run.plot = get("run.plot")
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("run.plot: {e}"))))
            .transpose()?;
        file.run.trials = get("run.trials")
            .map(|v| v.parse().map_err(|e| CliError::Config(format!("run.trials: {e}"))))
            .transpose()?;
        file.run.distances = parse_list("run.distances")
            .map(|v| {
                v.iter()
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|e| CliError::Config(format!("run.distances: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()
            })
            .transpose()?;
        file.run.node_counts = parse_list("run.node_counts")
            .map(|v| {
                v.iter()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|e| CliError::Config(format!("run.node_counts: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()
            })
            .transpose()?;
        file.run.wp_sweep = parse_list("run.wp_sweep")
            .map(|v| {
                v.iter()
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|e| CliError::Config(format!("run.wp_sweep: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()
            })
            .transpose()?;
        file.run.receivers = parse_list("run.receivers");
        Experiment::resolve(&file)
    }
}

/// 17 significant digits: round-trips every f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}
