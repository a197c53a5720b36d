//! JSON files for states, positive operators, channels and block specs.
//!
//! Every file carries `"version": 1` and a `"kind"` tag. Matrices are stored as
//! row-major `re` and optional `im` arrays.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{from_rows, CMat};
use crate::objects::{validate_density, Channel, DensityOperator, PositiveOperator};
use crate::structured::{MarkovBlock, MarkovBlockSpec, SufficiencyBlock, SufficiencyBlockSpec};

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance for states read from disk.
pub const INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        let im = rows(|z| z.im);
        let real = im.iter().flatten().all(|&x| x == 0.0);
        Self {
            re: rows(|z| z.re),
            im: (!real).then_some(im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        from_rows(&self.re, self.im.as_deref())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    State {
        version: u32,
        #[serde(default)]
        dims: Vec<usize>,
        #[serde(flatten)]
        matrix: MatrixJson,
    },
    Positive {
        version: u32,
        #[serde(default)]
        dims: Vec<usize>,
        #[serde(flatten)]
        matrix: MatrixJson,
    },
    Channel {
        version: u32,
        #[serde(flatten)]
        channel: ChannelJson,
    },
    MarkovSpec {
        version: u32,
        blocks: Vec<MarkovBlockJson>,
    },
    SufficiencySpec {
        version: u32,
        blocks: Vec<SufficiencyBlockJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovBlockJson {
    pub weight: f64,
    pub d_a: usize,
    pub d_cl: usize,
    pub d_cr: usize,
    pub d_b: usize,
    pub rho_acl: MatrixJson,
    pub rho_crb: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SufficiencyBlockJson {
    pub p: f64,
    pub q: f64,
    pub rho_l: MatrixJson,
    pub sigma_l: MatrixJson,
    pub tau_r: MatrixJson,
    pub u: MatrixJson,
    pub n_r: ChannelJson,
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::State { .. } => "state",
            Document::Positive { .. } => "positive",
            Document::Channel { .. } => "channel",
            Document::MarkovSpec { .. } => "markov-spec",
            Document::SufficiencySpec { .. } => "sufficiency-spec",
        }
    }

    fn version(&self) -> u32 {
        match self {
            Document::State { version, .. }
            | Document::Positive { version, .. }
            | Document::Channel { version, .. }
            | Document::MarkovSpec { version, .. }
            | Document::SufficiencySpec { version, .. } => *version,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if doc.version() != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", doc.version())));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    fn wrong_kind(&self, want: &str) -> Error {
        Error::Format(format!("expected a {want} file, found kind \"{}\"", self.kind()))
    }

    pub fn into_state(self) -> Result<DensityOperator> {
        match self {
            Document::State { dims, matrix, .. } => validate_density(&matrix.to_matrix()?, &dims, INPUT_TOL),
            other => Err(other.wrong_kind("state")),
        }
    }

    /// Accepts both `state` and `positive` files.
    pub fn into_positive(self) -> Result<PositiveOperator> {
        match self {
            Document::State { .. } => Ok(self.into_state()?.as_positive()),
            Document::Positive { dims, matrix, .. } => PositiveOperator::new(matrix.to_matrix()?, dims),
            other => Err(other.wrong_kind("state or positive")),
        }
    }

    pub fn into_channel(self) -> Result<Channel> {
        match self {
            Document::Channel { channel, .. } => channel.to_channel(),
            other => Err(other.wrong_kind("channel")),
        }
    }

    pub fn into_markov_spec(self) -> Result<MarkovBlockSpec> {
        match self {
            Document::MarkovSpec { blocks, .. } => MarkovBlockSpec::new(
                blocks
                    .into_iter()
                    .map(|b| {
                        Ok(MarkovBlock {
                            weight: b.weight,
                            rho_acl: validate_density(&b.rho_acl.to_matrix()?, &[b.d_a, b.d_cl], INPUT_TOL)?,
                            rho_crb: validate_density(&b.rho_crb.to_matrix()?, &[b.d_cr, b.d_b], INPUT_TOL)?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            other => Err(other.wrong_kind("markov-spec")),
        }
    }

    pub fn into_sufficiency_spec(self) -> Result<SufficiencyBlockSpec> {
        match self {
            Document::SufficiencySpec { blocks, .. } => SufficiencyBlockSpec::new(
                blocks
                    .into_iter()
                    .map(|b| {
                        Ok(SufficiencyBlock {
                            p: b.p,
                            q: b.q,
                            rho_l: validate_density(&b.rho_l.to_matrix()?, &[], INPUT_TOL)?,
                            sigma_l: PositiveOperator::new(b.sigma_l.to_matrix()?, vec![])?,
                            tau_r: validate_density(&b.tau_r.to_matrix()?, &[], INPUT_TOL)?,
                            u: b.u.to_matrix()?,
                            n_r: b.n_r.to_channel()?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
            other => Err(other.wrong_kind("sufficiency-spec")),
        }
    }

    pub fn from_state(rho: &DensityOperator) -> Self {
        Document::State {
            version: FORMAT_VERSION,
            dims: rho.dims().to_vec(),
            matrix: MatrixJson::from_matrix(rho.matrix()),
        }
    }

    pub fn from_positive(sigma: &PositiveOperator) -> Self {
        Document::Positive {
            version: FORMAT_VERSION,
            dims: sigma.dims().to_vec(),
            matrix: MatrixJson::from_matrix(sigma.matrix()),
        }
    }

    pub fn from_channel(ch: &Channel) -> Self {
        Document::Channel {
            version: FORMAT_VERSION,
            channel: ChannelJson::from_channel(ch),
        }
    }

    pub fn from_markov_spec(spec: &MarkovBlockSpec) -> Self {
        Document::MarkovSpec {
            version: FORMAT_VERSION,
            blocks: spec
                .blocks()
                .iter()
                .map(|b| MarkovBlockJson {
                    weight: b.weight,
                    d_a: spec.d_a(),
                    d_cl: b.d_cl(),
                    d_cr: b.d_cr(),
                    d_b: spec.d_b(),
                    rho_acl: MatrixJson::from_matrix(b.rho_acl.matrix()),
                    rho_crb: MatrixJson::from_matrix(b.rho_crb.matrix()),
                })
                .collect(),
        }
    }

    pub fn from_sufficiency_spec(spec: &SufficiencyBlockSpec) -> Self {
        Document::SufficiencySpec {
            version: FORMAT_VERSION,
            blocks: spec
                .blocks()
                .iter()
                .map(|b| SufficiencyBlockJson {
                    p: b.p,
                    q: b.q,
                    rho_l: MatrixJson::from_matrix(b.rho_l.matrix()),
                    sigma_l: MatrixJson::from_matrix(b.sigma_l.matrix()),
                    tau_r: MatrixJson::from_matrix(b.tau_r.matrix()),
                    u: MatrixJson::from_matrix(&b.u),
                    n_r: ChannelJson::from_channel(&b.n_r),
                })
                .collect(),
        }
    }
}

impl ChannelJson {
    pub fn from_channel(ch: &Channel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        let kraus = self
            .kraus
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        let ch = Channel::new(kraus)?;
        if ch.dim_in() != self.dim_in || ch.dim_out() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "declared {}→{}, Kraus operators are {}→{}",
                self.dim_in,
                self.dim_out,
                ch.dim_in(),
                ch.dim_out()
            )));
        }
        Ok(ch)
    }
}

pub fn read_state(path: &Path) -> Result<DensityOperator> {
    Document::read(path)?.into_state()
}

pub fn read_positive(path: &Path) -> Result<PositiveOperator> {
    Document::read(path)?.into_positive()
}

pub fn read_channel(path: &Path) -> Result<Channel> {
    Document::read(path)?.into_channel()
}
