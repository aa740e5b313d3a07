//! Line-oriented configuration documents.
//!
//! The format is `key = value` lines under `[section]` headers, with `#`
//! comments, chosen so any script can parse and generate it. Every physical
//! quantity carries a unit suffix (`bps`, `kbps`, `s`, `ms`, `bits`); bare
//! numbers are only legal for counts, ids, and seeds. Values normalize to SI
//! on parse.
//!
//! ```text
//! [stream]
//! S = 2000 bits
//! T = 200 ms
//!
//! [peers]
//! u = 15 kbps, 17 kbps, 18 kbps, 19 kbps, 20 kbps
//! d = 20 kbps                 # one value broadcasts to every peer
//!
//! [admission]
//! BW = 17 kbps
//!
//! [churn]
//! packages = 3
//! join = 2 6 50 kbps 70 kbps  # package, id, upload, download
//! leave = 3 4                 # package, id
//! update = 3 2 30 kbps 40 kbps
//!
//! [sweep]
//! seed = 42
//! ratios = 10 kbps, 12 kbps, 14 kbps, 16 kbps
//! cluster = 60 10 kbps 70 kbps 70 kbps 960 kbps   # n, u range, d range
//! fixed = 60 51.7 kbps                            # n, mean upload
//! ```
//!
//! Peers in `[peers]` get ids 1..n in listing order. Churn lines aggregate
//! per package and apply leaves, then capacity updates, then joins.

use crate::dynamic::{CapacityUpdate, ChurnEvent};
use crate::model::{Peer, StreamParams};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedConfig {
    pub stream: Option<StreamParams>,
    /// Peers from `[peers]`, ids assigned 1..n in order; empty when the
    /// section is absent.
    pub peers: Vec<Peer>,
    /// Reserved budget from `[admission]`.
    pub reserved_bw_bps: Option<f64>,
    pub churn: Option<ChurnConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChurnConfig {
    /// How many packages to plan.
    pub packages: u32,
    pub events: Vec<ChurnEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    pub ratios_bps: Vec<f64>,
    /// Random rows: (n, upload lo, upload hi, download lo, download hi).
    pub random: Vec<RandomRow>,
    /// Fixed-mean rows: (n, mean upload).
    pub fixed: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomRow {
    pub n: usize,
    pub upload_range_bps: (f64, f64),
    pub download_range_bps: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Bandwidth,
    Time,
    Bits,
}

impl Dimension {
    fn describe(self) -> &'static str {
        match self {
            Dimension::Bandwidth => "a bandwidth (bps or kbps)",
            Dimension::Time => "a time (s or ms)",
            Dimension::Bits => "a size in bits",
        }
    }
}

fn unit_factor(unit: &str) -> Option<(Dimension, f64)> {
    match unit {
        "bps" => Some((Dimension::Bandwidth, 1.0)),
        "kbps" => Some((Dimension::Bandwidth, 1000.0)),
        "s" => Some((Dimension::Time, 1.0)),
        "ms" => Some((Dimension::Time, 1e-3)),
        "bits" => Some((Dimension::Bits, 1.0)),
        _ => None,
    }
}

/// Parse a configuration document.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let mut config = ParsedConfig::default();
    let mut section: Option<String> = None;

    let mut stream_s: Option<f64> = None;
    let mut stream_t: Option<f64> = None;
    let mut peers_section = false;
    let mut uploads: Option<Vec<f64>> = None;
    let mut downloads: Option<Vec<f64>> = None;
    let mut sweep_seed: Option<u64> = None;
    let mut sweep_ratios: Option<Vec<f64>> = None;
    let mut sweep_random: Vec<RandomRow> = Vec::new();
    let mut sweep_fixed: Vec<(usize, f64)> = Vec::new();
    let mut churn_packages: Option<u32> = None;
    let mut churn_lines: Vec<(u32, ChurnLine)> = Vec::new();
    let mut churn_section = false;
    let mut sweep_section = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }

        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::parse(line_no, "unterminated section header"))?
                .trim();
            match name {
                "stream" | "peers" | "admission" | "churn" | "sweep" => {
                    if name == "peers" {
                        peers_section = true;
                    }
                    if name == "churn" {
                        churn_section = true;
                    }
                    if name == "sweep" {
                        sweep_section = true;
                    }
                    section = Some(name.to_string());
                }
                other => {
                    return Err(ConfigError::parse(
                        line_no,
                        format!("unknown section [{other}]"),
                    ))
                }
            }
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::parse(line_no, "expected `key = value` or `[section]`"))?;
        let key = key.trim();
        let value = value.trim();
        let section = section.as_deref().ok_or_else(|| {
            ConfigError::parse(line_no, format!("key `{key}` appears before any [section]"))
        })?;

        match (section, key) {
            ("stream", "S") => set_once(
                &mut stream_s,
                one_quantity(value, Dimension::Bits, line_no)?,
                "S",
                line_no,
            )?,
            ("stream", "T") => set_once(
                &mut stream_t,
                one_quantity(value, Dimension::Time, line_no)?,
                "T",
                line_no,
            )?,
            ("peers", "u") => set_once(
                &mut uploads,
                quantity_list(value, Dimension::Bandwidth, line_no)?,
                "u",
                line_no,
            )?,
            ("peers", "d") => set_once(
                &mut downloads,
                quantity_list(value, Dimension::Bandwidth, line_no)?,
                "d",
                line_no,
            )?,
            ("admission", "BW") => set_once(
                &mut config.reserved_bw_bps,
                one_quantity(value, Dimension::Bandwidth, line_no)?,
                "BW",
                line_no,
            )?,
            ("churn", "packages") => {
                let mut cur = Cursor::new(value, line_no)?;
                let v = cur.integer("packages")? as u32;
                cur.finish()?;
                set_once(&mut churn_packages, v, "packages", line_no)?;
            }
            ("churn", "join") => {
                let mut cur = Cursor::new(value, line_no)?;
                let package = cur.integer("package")? as u32;
                let id = cur.integer("peer id")? as u32;
                let upload = cur.quantity(Dimension::Bandwidth)?;
                let download = cur.quantity(Dimension::Bandwidth)?;
                cur.finish()?;
                let peer = Peer::new(id, download, upload)
                    .map_err(|e| ConfigError::parse(line_no, e.to_string()))?;
                churn_lines.push((package, ChurnLine::Join(peer)));
            }
            ("churn", "leave") => {
                let mut cur = Cursor::new(value, line_no)?;
                let package = cur.integer("package")? as u32;
                let id = cur.integer("peer id")? as u32;
                cur.finish()?;
                churn_lines.push((package, ChurnLine::Leave(id)));
            }
            ("churn", "update") => {
                let mut cur = Cursor::new(value, line_no)?;
                let package = cur.integer("package")? as u32;
                let id = cur.integer("peer id")? as u32;
                let upload = cur.quantity(Dimension::Bandwidth)?;
                let download = cur.quantity(Dimension::Bandwidth)?;
                cur.finish()?;
                churn_lines.push((
                    package,
                    ChurnLine::Update(CapacityUpdate {
                        peer_id: id,
                        download_bps: download,
                        upload_bps: upload,
                    }),
                ));
            }
            ("sweep", "seed") => {
                let mut cur = Cursor::new(value, line_no)?;
                let v = cur.integer("seed")?;
                cur.finish()?;
                set_once(&mut sweep_seed, v, "seed", line_no)?;
            }
            ("sweep", "ratios") => set_once(
                &mut sweep_ratios,
                quantity_list(value, Dimension::Bandwidth, line_no)?,
                "ratios",
                line_no,
            )?,
            ("sweep", "cluster") => {
                let mut cur = Cursor::new(value, line_no)?;
                let n = cur.integer("n")? as usize;
                let ulo = cur.quantity(Dimension::Bandwidth)?;
                let uhi = cur.quantity(Dimension::Bandwidth)?;
                let dlo = cur.quantity(Dimension::Bandwidth)?;
                let dhi = cur.quantity(Dimension::Bandwidth)?;
                cur.finish()?;
                sweep_random.push(RandomRow {
                    n,
                    upload_range_bps: (ulo, uhi),
                    download_range_bps: (dlo, dhi),
                });
            }
            ("sweep", "fixed") => {
                let mut cur = Cursor::new(value, line_no)?;
                let n = cur.integer("n")? as usize;
                let u_avg = cur.quantity(Dimension::Bandwidth)?;
                cur.finish()?;
                sweep_fixed.push((n, u_avg));
            }
            (section, key) => {
                return Err(ConfigError::parse(
                    line_no,
                    format!("unknown key `{key}` in section [{section}]"),
                ))
            }
        }
    }

    match (stream_s, stream_t) {
        (Some(s), Some(t)) => {
            config.stream =
                Some(StreamParams::new(s, t).map_err(|e| ConfigError::parse(0, e.to_string()))?);
        }
        (None, None) => {}
        _ => return Err(ConfigError::parse(0, "[stream] needs both S and T")),
    }

    if peers_section {
        let uploads =
            uploads.ok_or_else(|| ConfigError::parse(0, "[peers] section has no `u` list"))?;
        if uploads.is_empty() {
            return Err(ConfigError::parse(0, "empty peers list"));
        }
        let downloads =
            downloads.ok_or_else(|| ConfigError::parse(0, "[peers] section has no `d` list"))?;
        let downloads = if downloads.len() == 1 {
            vec![downloads[0]; uploads.len()]
        } else if downloads.len() == uploads.len() {
            downloads
        } else {
            return Err(ConfigError::parse(
                0,
                format!(
                    "{} uploads but {} downloads; `d` takes one value or one per peer",
                    uploads.len(),
                    downloads.len()
                ),
            ));
        };
        config.peers = uploads
            .iter()
            .zip(&downloads)
            .enumerate()
            .map(|(i, (&u, &d))| Peer::new(i as u32 + 1, d, u))
            .collect::<Result<_, _>>()
            .map_err(|e| ConfigError::parse(0, e.to_string()))?;
    }

    if churn_section {
        let packages =
            churn_packages.ok_or_else(|| ConfigError::parse(0, "[churn] needs `packages`"))?;
        let mut grouped: BTreeMap<u32, ChurnEvent> = BTreeMap::new();
        for (package, line) in churn_lines {
            let event = grouped.entry(package).or_insert_with(|| ChurnEvent {
                at_package: package,
                joins: vec![],
                leaves: vec![],
                capacity_updates: vec![],
            });
            match line {
                ChurnLine::Join(p) => event.joins.push(p),
                ChurnLine::Leave(id) => event.leaves.push(id),
                ChurnLine::Update(u) => event.capacity_updates.push(u),
            }
        }
        config.churn = Some(ChurnConfig {
            packages,
            events: grouped.into_values().collect(),
        });
    }

    if sweep_section {
        let ratios_bps =
            sweep_ratios.ok_or_else(|| ConfigError::parse(0, "[sweep] needs `ratios`"))?;
        if sweep_random.is_empty() && sweep_fixed.is_empty() {
            return Err(ConfigError::parse(
                0,
                "[sweep] needs at least one `cluster` or `fixed` row",
            ));
        }
        config.sweep = Some(SweepConfig {
            seed: sweep_seed.unwrap_or(0),
            ratios_bps,
            random: sweep_random,
            fixed: sweep_fixed,
        });
    }

    Ok(config)
}

/// Regenerate a document that parses back to the same configuration, in SI
/// units at full precision.
pub fn emit_config(config: &ParsedConfig) -> String {
    let mut out = String::new();
    if let Some(stream) = &config.stream {
        out.push_str("[stream]\n");
        out.push_str(&format!("S = {} bits\n", stream.package_bits));
        out.push_str(&format!("T = {} s\n", stream.delay_bound_s));
        out.push('\n');
    }
    if !config.peers.is_empty() {
        out.push_str("[peers]\n");
        let u: Vec<String> = config
            .peers
            .iter()
            .map(|p| format!("{} bps", p.upload_bps))
            .collect();
        let d: Vec<String> = config
            .peers
            .iter()
            .map(|p| format!("{} bps", p.download_bps))
            .collect();
        out.push_str(&format!("u = {}\n", u.join(", ")));
        out.push_str(&format!("d = {}\n", d.join(", ")));
        out.push('\n');
    }
    if let Some(bw) = config.reserved_bw_bps {
        out.push_str("[admission]\n");
        out.push_str(&format!("BW = {} bps\n\n", bw));
    }
    if let Some(churn) = &config.churn {
        out.push_str("[churn]\n");
        out.push_str(&format!("packages = {}\n", churn.packages));
        for event in &churn.events {
            for id in &event.leaves {
                out.push_str(&format!("leave = {} {}\n", event.at_package, id));
            }
            for u in &event.capacity_updates {
                out.push_str(&format!(
                    "update = {} {} {} bps {} bps\n",
                    event.at_package, u.peer_id, u.upload_bps, u.download_bps
                ));
            }
            for p in &event.joins {
                out.push_str(&format!(
                    "join = {} {} {} bps {} bps\n",
                    event.at_package, p.id, p.upload_bps, p.download_bps
                ));
            }
        }
        out.push('\n');
    }
    if let Some(sweep) = &config.sweep {
        out.push_str("[sweep]\n");
        out.push_str(&format!("seed = {}\n", sweep.seed));
        let ratios: Vec<String> = sweep
            .ratios_bps
            .iter()
            .map(|r| format!("{} bps", r))
            .collect();
        out.push_str(&format!("ratios = {}\n", ratios.join(", ")));
        for row in &sweep.random {
            out.push_str(&format!(
                "cluster = {} {} bps {} bps {} bps {} bps\n",
                row.n,
                row.upload_range_bps.0,
                row.upload_range_bps.1,
                row.download_range_bps.0,
                row.download_range_bps.1
            ));
        }
        for (n, u_avg) in &sweep.fixed {
            out.push_str(&format!("fixed = {} {} bps\n", n, u_avg));
        }
    }
    out
}

enum ChurnLine {
    Join(Peer),
    Leave(u32),
    Update(CapacityUpdate),
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), ConfigError> {
    if slot.is_some() {
        return Err(ConfigError::parse(line, format!("duplicate key `{key}`")));
    }
    *slot = Some(value);
    Ok(())
}

fn one_quantity(value: &str, dim: Dimension, line: usize) -> Result<f64, ConfigError> {
    let mut cur = Cursor::new(value, line)?;
    let v = cur.quantity(dim)?;
    cur.finish()?;
    Ok(v)
}

fn quantity_list(value: &str, dim: Dimension, line: usize) -> Result<Vec<f64>, ConfigError> {
    let mut cur = Cursor::new(value, line)?;
    let mut out = Vec::new();
    while !cur.done() {
        out.push(cur.quantity(dim)?);
    }
    Ok(out)
}

/// Token walker over one value: whitespace- and comma-separated numbers and
/// unit suffixes, with attached suffixes (`15kbps`) split apart.
struct Cursor {
    tokens: Vec<String>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(value: &str, line: usize) -> Result<Self, ConfigError> {
        let mut tokens = Vec::new();
        for piece in value.split(|c: char| c.is_whitespace() || c == ',') {
            if piece.is_empty() {
                continue;
            }
            let split_at = piece
                .find(|c: char| c.is_ascii_alphabetic())
                .filter(|&at| at > 0);
            match split_at {
                Some(at) => {
                    tokens.push(piece[..at].to_string());
                    tokens.push(piece[at..].to_string());
                }
                None => tokens.push(piece.to_string()),
            }
        }
        Ok(Self {
            tokens,
            pos: 0,
            line,
        })
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn next_token(&mut self, what: &str) -> Result<String, ConfigError> {
        if self.done() {
            return Err(ConfigError::parse(
                self.line,
                format!("missing {what} at end of value"),
            ));
        }
        let tok = self.tokens[self.pos].clone();
        self.pos += 1;
        Ok(tok)
    }

    fn integer(&mut self, what: &str) -> Result<u64, ConfigError> {
        let tok = self.next_token(what)?;
        tok.parse::<u64>().map_err(|_| {
            ConfigError::parse(self.line, format!("expected integer {what}, got `{tok}`"))
        })
    }

    fn quantity(&mut self, dim: Dimension) -> Result<f64, ConfigError> {
        let number_tok = self.next_token("value")?;
        let number: f64 = number_tok.parse().map_err(|_| {
            ConfigError::parse(self.line, format!("expected a number, got `{number_tok}`"))
        })?;
        if self.done() {
            return Err(ConfigError::unit(
                self.line,
                format!("`{number_tok}` has no unit; expected {}", dim.describe()),
            ));
        }
        let unit_tok = self.next_token("unit")?;
        match unit_factor(&unit_tok) {
            Some((d, factor)) if d == dim => Ok(number * factor),
            Some((d, _)) => Err(ConfigError::unit(
                self.line,
                format!(
                    "`{unit_tok}` is {}, expected {}",
                    d.describe(),
                    dim.describe()
                ),
            )),
            None => Err(ConfigError::unit(
                self.line,
                format!("unknown unit `{unit_tok}`; expected {}", dim.describe()),
            )),
        }
    }

    fn finish(&mut self) -> Result<(), ConfigError> {
        if !self.done() {
            return Err(ConfigError::parse(
                self.line,
                format!("unexpected trailing `{}`", self.tokens[self.pos]),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed document structure or value.
    Parse { line: usize, message: String },
    /// Missing, unknown, or wrong-dimension unit suffix.
    Unit { line: usize, message: String },
}

impl ConfigError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        ConfigError::Parse {
            line,
            message: message.into(),
        }
    }

    fn unit(line: usize, message: impl Into<String>) -> Self {
        ConfigError::Unit {
            line,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "PARSE_ERROR",
            ConfigError::Unit { .. } => "UNIT_ERROR",
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line: 0, message } => write!(f, "parse error: {}", message),
            ConfigError::Parse { line, message } => {
                write!(f, "parse error at line {}: {}", line, message)
            }
            ConfigError::Unit { line, message } => {
                write!(f, "unit error at line {}: {}", line, message)
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = "\
# five-peer cluster
[stream]
S = 2000 bits
T = 200 ms

[peers]
u = 15 kbps, 17 kbps, 18 kbps, 19 kbps, 20 kbps
d = 20 kbps
";

    #[test]
    fn parses_the_worked_cluster() {
        let config = parse_config(WORKED).unwrap();
        let stream = config.stream.unwrap();
        assert_eq!(stream.package_bits, 2000.0);
        assert_eq!(stream.delay_bound_s, 0.2);
        assert_eq!(config.peers.len(), 5);
        assert_eq!(config.peers[0].upload_bps, 15_000.0);
        assert_eq!(config.peers[0].download_bps, 20_000.0);
        assert_eq!(config.peers[4].id, 5);
    }

    #[test]
    fn attached_units_parse_too() {
        let config = parse_config("[stream]\nS = 2000bits\nT = 0.2s\n").unwrap();
        let stream = config.stream.unwrap();
        assert_eq!(stream.package_bits, 2000.0);
        assert_eq!(stream.delay_bound_s, 0.2);
    }

    #[test]
    fn missing_unit_is_a_unit_error() {
        let err = parse_config("[peers]\nu = 15\nd = 20 kbps\n").unwrap_err();
        assert_eq!(err.kind(), "UNIT_ERROR");
        match err {
            ConfigError::Unit { line, .. } => assert_eq!(line, 2),
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_unit_is_a_unit_error() {
        let err = parse_config("[stream]\nS = 2 mbits\nT = 1 s\n").unwrap_err();
        assert_eq!(err.kind(), "UNIT_ERROR");
    }

    #[test]
    fn wrong_dimension_is_a_unit_error() {
        let err = parse_config("[stream]\nS = 2000 ms\nT = 1 s\n").unwrap_err();
        assert_eq!(err.kind(), "UNIT_ERROR");
    }

    #[test]
    fn empty_peers_list_is_a_parse_error() {
        let err = parse_config("[peers]\nu =\nd = 20 kbps\n").unwrap_err();
        assert_eq!(err.kind(), "PARSE_ERROR");
    }

    #[test]
    fn structural_errors_carry_line_numbers() {
        let err = parse_config("[stream\nS = 1 bits\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));

        let err = parse_config("S = 1 bits\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));

        let err = parse_config("[stream]\nbogus = 1 bits\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));

        let err = parse_config("[nope]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
    }

    #[test]
    fn download_list_length_must_match() {
        let err =
            parse_config("[peers]\nu = 1 kbps, 2 kbps, 3 kbps\nd = 4 kbps, 5 kbps\n").unwrap_err();
        assert_eq!(err.kind(), "PARSE_ERROR");
    }

    #[test]
    fn churn_lines_aggregate_per_package() {
        let text = "\
[stream]
S = 2000 bits
T = 200 ms

[peers]
u = 10 kbps, 20 kbps
d = 30 kbps

[churn]
packages = 3
join = 2 3 25 kbps 30 kbps
leave = 2 1
join = 3 4 28 kbps 30 kbps
update = 3 2 21 kbps 30 kbps
";
        let config = parse_config(text).unwrap();
        let churn = config.churn.unwrap();
        assert_eq!(churn.packages, 3);
        assert_eq!(churn.events.len(), 2);
        assert_eq!(churn.events[0].at_package, 2);
        assert_eq!(churn.events[0].joins.len(), 1);
        assert_eq!(churn.events[0].leaves, vec![1]);
        assert_eq!(churn.events[1].at_package, 3);
        assert_eq!(churn.events[1].capacity_updates.len(), 1);
        assert_eq!(churn.events[1].capacity_updates[0].upload_bps, 21_000.0);
    }

    #[test]
    fn sweep_section_parses() {
        let text = "\
[stream]
S = 2000 bits
T = 200 ms

[sweep]
seed = 42
ratios = 10 kbps, 16 kbps
cluster = 5 10 kbps 20 kbps 20 kbps 80 kbps
fixed = 60 51.7 kbps
";
        let config = parse_config(text).unwrap();
        let sweep = config.sweep.unwrap();
        assert_eq!(sweep.seed, 42);
        assert_eq!(sweep.ratios_bps, vec![10e3, 16e3]);
        assert_eq!(sweep.random.len(), 1);
        assert_eq!(sweep.random[0].n, 5);
        assert_eq!(sweep.random[0].download_range_bps, (20e3, 80e3));
        assert_eq!(sweep.fixed, vec![(60, 51.7e3)]);
    }

    #[test]
    fn round_trip_reproduces_the_config() {
        let text = "\
[stream]
S = 2000 bits
T = 200 ms

[peers]
u = 15 kbps, 17 kbps
d = 20 kbps, 25 kbps

[admission]
BW = 17 kbps

[churn]
packages = 2
join = 2 3 25 kbps 30 kbps

[sweep]
seed = 7
ratios = 10 kbps
fixed = 60 51.7 kbps
";
        let first = parse_config(text).unwrap();
        let emitted = emit_config(&first);
        let second = parse_config(&emitted).unwrap();
        assert_eq!(first, second);
        // Emission is normal-form: stable under another round.
        assert_eq!(emitted, emit_config(&second));
    }

    #[test]
    fn duplicate_scalar_keys_rejected() {
        let err = parse_config("[stream]\nS = 1 bits\nS = 2 bits\nT = 1 s\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }));
    }
}
