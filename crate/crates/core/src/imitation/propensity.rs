use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{check_dim, Error, Result};
use crate::exec::Exec;
use crate::policy::Policy;
use crate::rng::RngSeed;
use crate::types::{ActionDistribution, ContextVector};

/// Monte-Carlo action histograms of a policy over a batch of contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityTable {
    contexts: Vec<ContextVector>,
    propensities: Vec<ActionDistribution>,
    /// Draws per row; `None` for tables read back from CSV.
    n_samples: Option<usize>,
}

impl PropensityTable {
    pub fn new(
        contexts: Vec<ContextVector>,
        propensities: Vec<ActionDistribution>,
        n_samples: Option<usize>,
    ) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::Invalid("propensity table needs at least one row".into()));
        }
        check_dim(contexts.len(), propensities.len())?;
        let d = contexts[0].dim();
        let k = propensities[0].n_actions();
        for (c, p) in contexts.iter().zip(&propensities) {
            check_dim(d, c.dim())?;
            check_dim(k, p.n_actions())?;
        }
        Ok(PropensityTable {
            contexts,
            propensities,
            n_samples,
        })
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn context_dim(&self) -> usize {
        self.contexts[0].dim()
    }

    pub fn n_actions(&self) -> usize {
        self.propensities[0].n_actions()
    }

    pub fn n_samples(&self) -> Option<usize> {
        self.n_samples
    }

    pub fn contexts(&self) -> &[ContextVector] {
        &self.contexts
    }

    pub fn propensities(&self) -> &[ActionDistribution] {
        &self.propensities
    }

    pub(crate) fn context_matrix(&self, rows: &[usize]) -> Array2<f64> {
        let d = self.context_dim();
        let mut m = Array2::zeros((rows.len(), d));
        for (r, &i) in rows.iter().enumerate() {
            m.row_mut(r).assign(&ndarray::ArrayView1::from(self.contexts[i].as_slice()));
        }
        m
    }

    /// Header `ctx_0..ctx_{d-1},p_0..p_{k-1}`, one row per context.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<String> = (0..self.context_dim())
            .map(|i| format!("ctx_{i}"))
            .chain((0..self.n_actions()).map(|a| format!("p_{a}")))
            .collect();
        w.write_record(&header)?;
        for (c, p) in self.contexts.iter().zip(&self.propensities) {
            let row: Vec<String> = c.iter().chain(p.probs()).map(|v| format!("{v:?}")).collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let d = header.iter().take_while(|h| h.starts_with("ctx_")).count();
        let k = header.len() - d;
        if k == 0 || !header.iter().skip(d).all(|h| h.starts_with("p_")) {
            return Err(Error::Ingest {
                row: 0,
                col: "header".into(),
                msg: "expected ctx_* columns followed by p_* columns".into(),
            });
        }
        let mut contexts = Vec::new();
        let mut propensities = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut vals = Vec::with_capacity(rec.len());
            for (col, cell) in rec.iter().enumerate() {
                vals.push(cell.trim().parse::<f64>().map_err(|e| Error::Ingest {
                    row: row + 1,
                    col: header[col].to_string(),
                    msg: e.to_string(),
                })?);
            }
            let probs = vals.split_off(d);
            contexts.push(ContextVector::new(vals)?);
            propensities.push(ActionDistribution::new(probs).map_err(|e| Error::Ingest {
                row: row + 1,
                col: "p_*".into(),
                msg: e.to_string(),
            })?);
        }
        Self::new(contexts, propensities, None)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Draws `n_a` actions from `policy` at every context and records the
/// empirical frequencies. Row `i` uses its own stream derived from
/// `(seed, i)`, so the table does not depend on the execution mode.
pub fn simulate_propensities(
    policy: &dyn Policy,
    contexts: &[ContextVector],
    n_a: usize,
    seed: RngSeed,
    exec: Exec,
) -> Result<PropensityTable> {
    if n_a == 0 {
        return Err(Error::Invalid("n_a must be at least 1".into()));
    }
    for c in contexts {
        check_dim(policy.context_dim(), c.dim())?;
    }
    let rows = exec.map_indexed(contexts.len(), |i| {
        let mut rng = seed.derive_index(i as u64).rng();
        let counts = policy.sample_counts(&contexts[i], n_a, &mut rng)?;
        ActionDistribution::from_counts(&counts)
    });
    let propensities = rows.into_iter().collect::<Result<Vec<_>>>()?;
    PropensityTable::new(contexts.to_vec(), propensities, Some(n_a))
}
