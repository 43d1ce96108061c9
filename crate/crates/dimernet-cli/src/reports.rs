//! Report schema: every output embeds the schema version and the exact run
//! configuration so identical configs reproduce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dimernet::bounds::{BoundReport, Fig1Row};
use dimernet::entanglement::GmeReport;
use dimernet::rdm::{SingleNodeForm, TwoNodeForm};
use dimernet::QutritState;
use serde::Serialize;

/// Version of the JSON/CSV report schema emitted by every subcommand.
pub const SCHEMA_VERSION: &str = "1";

pub fn report_schema_version() -> &'static str {
    SCHEMA_VERSION
}

/// Echo of the run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub lattice: String,
    pub lattice_label: String,
    pub defects: String,
    pub defect_mode: String,
    pub seed: u64,
    pub tol: f64,
    pub max_nodes: usize,
    pub sign_convention: &'static str,
}

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: &'static str,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub payload: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: ConfigEcho, payload: T) -> Self {
        Report {
            schema_version: report_schema_version(),
            config,
            payload,
        }
    }
}

#[derive(Serialize)]
pub struct CoveringsPayload {
    pub total_count: u64,
    pub placements: Vec<PlacementCount>,
}

#[derive(Serialize)]
pub struct PlacementCount {
    pub defects: Vec<usize>,
    pub count: u64,
}

#[derive(Serialize)]
pub struct CoveringLine<'a> {
    pub defects: &'a [usize],
    pub pairs: &'a [(usize, usize)],
}

#[derive(Serialize)]
pub struct BuildStatePayload {
    pub nodes: usize,
    pub dimension: usize,
    pub nonzero_amplitudes: usize,
    pub norm: f64,
    pub state_file: Option<PathBuf>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum FitPayload {
    Single(SingleNodeForm),
    Two {
        #[serde(flatten)]
        form: TwoNodeForm,
        exchange_coherence: [f64; 2],
    },
    None {},
}

#[derive(Serialize)]
pub struct RdmPayload {
    pub subset: Vec<usize>,
    pub dimension: usize,
    /// Row-major [re, im] pairs.
    pub matrix: Vec<[f64; 2]>,
    pub fit: FitPayload,
}

#[derive(Serialize)]
pub struct EntanglementPayload {
    pub subset: Vec<usize>,
    pub form: TwoNodeForm,
    pub is_npt: bool,
    pub min_pt_eigenvalue: f64,
    pub log_negativity: f64,
    pub entropy_pair: f64,
    pub entropy_first: f64,
    pub entropy_second: f64,
}

#[derive(Serialize)]
pub struct GmePayload {
    #[serde(flatten)]
    pub report: GmeReport,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purities: Option<Vec<PartitionPurity>>,
}

#[derive(Serialize)]
pub struct PartitionPurity {
    pub side: Vec<usize>,
    pub purity: f64,
}

#[derive(Serialize)]
pub struct BoundsPayload {
    #[serde(flatten)]
    pub report: BoundReport,
}

#[derive(Serialize)]
pub struct VerifyPayload {
    pub checks: Vec<VerifyCheck>,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Writes pretty JSON with a trailing newline to the path, or stdout when
/// absent.
pub fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serialization");
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            writeln!(f, "{text}")
        }
        None => {
            let stdout = std::io::stdout();
            writeln!(stdout.lock(), "{text}")
        }
    }
}

pub fn write_fig1_csv(out: Option<&Path>, rows: &[Fig1Row]) -> std::io::Result<()> {
    let mut text = format!(
        "# schema_version={SCHEMA_VERSION} sign_convention={} defect_mode=synthetic\n",
        dimernet::SIGN_CONVENTION
    );
    text.push_str("one_minus_p3,m,q_max,clamped,ln_max\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.one_minus_p3, r.m, r.q_max, r.clamped, r.ln_max
        ));
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            write!(stdout.lock(), "{text}")
        }
    }
}

/// Binary state dump: one JSON header line, then the amplitudes as
/// little-endian f64 (re, im) pairs in basis order.
pub fn write_state_binary(
    path: &Path,
    state: &QutritState,
    config: &ConfigEcho,
) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Header<'a> {
        schema_version: &'static str,
        n: usize,
        node_order: Vec<usize>,
        sign_convention: &'a str,
        defect_mode: &'a str,
        defect_count: usize,
        lattice: &'a str,
        seed: u64,
    }
    let header = Header {
        schema_version: SCHEMA_VERSION,
        n: state.node_count(),
        node_order: state.node_order(),
        sign_convention: state.meta().sign_convention,
        defect_mode: &state.meta().defect_mode,
        defect_count: state.meta().defect_count,
        lattice: &config.lattice_label,
        seed: config.seed,
    };
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "{}", serde_json::to_string(&header).expect("header"))?;
    for amp in state.amplitudes() {
        f.write_all(&amp.re.to_le_bytes())?;
        f.write_all(&amp.im.to_le_bytes())?;
    }
    Ok(())
}
