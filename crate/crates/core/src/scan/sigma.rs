use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::system::{Cell, System};
use crate::radial::unwrap_phases;
use crate::resonance::{derivative, RESOLVED_PHASE_STEP};
use crate::units::{hartree_to_microkelvin, AU_TIME_IN_SECONDS, BOHR_IN_ANGSTROM};
use crate::{Error, Result};

/// Last line of a finished scan file.
pub const COMPLETE_MARKER: &str = "# complete";

/// Unit system of emitted tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    /// Hartree, bohr^2 and atomic time units.
    Au,
    /// Microkelvin, Angstrom^2 and picoseconds.
    #[default]
    Lab,
}

/// Cells of a cross-section scan: every lambda, every `J`, on a log energy
/// grid (Hartree) that refinement may extend.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub lambdas: Vec<f64>,
    pub total_j: Vec<u32>,
    pub energies: Vec<f64>,
    pub refine_passes: u32,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if self.energies.is_empty() || self.energies.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidInput(
                "scan energies must be positive and finite".into(),
            ));
        }
        if self.energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "scan energies must be strictly increasing".into(),
            ));
        }
        if self.lambdas.is_empty()
            || self.lambdas.iter().any(|l| !l.is_finite())
            || self.total_j.is_empty()
        {
            return Err(Error::InvalidInput(
                "scan needs finite lambdas and at least one J".into(),
            ));
        }
        Ok(())
    }
}

/// One output row. `delta` is continued along energy within its
/// `(lambda, J)` block; failed cells carry NaN and a message.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub total_j: u32,
    pub energy: f64,
    pub sigma: f64,
    pub delta: f64,
    pub q: f64,
    pub error: Option<String>,
}

impl ScanRow {
    pub fn sin2(&self) -> f64 {
        self.delta.sin().powi(2)
    }
}

type Outcome = std::result::Result<Cell, String>;
type Key = (u64, u32, u64);

fn key(lambda: f64, total_j: u32, energy: f64) -> Key {
    (lambda.to_bits(), total_j, energy.to_bits())
}

/// Append-only record of finished cells, tagged with the config hash.
struct Journal {
    path: PathBuf,
}

impl Journal {
    fn open(path: PathBuf, hash: &str) -> Result<(Self, HashMap<Key, Outcome>)> {
        let header = format!("# config_sha256 {hash}");
        let mut cells = HashMap::new();
        let reusable = fs::read_to_string(&path)
            .ok()
            .filter(|t| t.lines().next() == Some(header.as_str()));
        match reusable {
            Some(text) => {
                // a torn last line from an interrupted run is dropped
                for line in text.lines().skip(1) {
                    if let Some((k, v)) = parse_cell(line) {
                        cells.insert(k, v);
                    }
                }
            }
            None => fs::write(&path, format!("{header}\n"))?,
        }
        Ok((Self { path }, cells))
    }

    fn append(&self, done: &[(Key, Outcome)]) -> Result<()> {
        let mut text = String::new();
        for ((l, j, e), out) in done {
            let (l, e) = (f64::from_bits(*l), f64::from_bits(*e));
            match out {
                Ok(c) => writeln!(
                    text,
                    "{l:e},{j},{e:e},ok,{:e},{:e},{:e}",
                    c.sigma, c.delta, c.k
                ),
                Err(m) => writeln!(
                    text,
                    "{l:e},{j},{e:e},error,{}",
                    m.replace(['\n', ','], " ")
                ),
            }
            .expect("write to string");
        }
        let mut f = OpenOptions::new().append(true).open(&self.path)?;
        f.write_all(text.as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

fn parse_cell(line: &str) -> Option<(Key, Outcome)> {
    let f: Vec<&str> = line.split(',').collect();
    let l: f64 = f.first()?.parse().ok()?;
    let j: u32 = f.get(1)?.parse().ok()?;
    let e: f64 = f.get(2)?.parse().ok()?;
    let out = match (f.get(3).copied()?, f.len()) {
        ("ok", 7) => Ok(Cell {
            sigma: f[4].parse().ok()?,
            delta: f[5].parse().ok()?,
            k: f[6].parse().ok()?,
        }),
        ("error", 5) => Err(f[4].to_string()),
        _ => return None,
    };
    Some((key(l, j, e), out))
}

/// New energies for one block: geometric midpoints of intervals where the
/// phase moves by more than `RESOLVED_PHASE_STEP`, and on both sides of
/// interior maxima of `|d delta/dE|`.
fn refinement(energies: &[f64], deltas: &[f64]) -> Vec<f64> {
    let n = energies.len();
    if n < 3 {
        return Vec::new();
    }
    let slope: Vec<f64> = derivative(energies, deltas)
        .into_iter()
        .map(f64::abs)
        .collect();
    let mut intervals = Vec::new();
    for i in 0..n - 1 {
        if (deltas[i + 1] - deltas[i]).abs() > RESOLVED_PHASE_STEP {
            intervals.push(i);
        }
    }
    // prominent maxima of the slope only, so smooth backgrounds stay untouched
    for i in 1..n - 1 {
        if slope[i] > 1.1 * slope[i - 1] && slope[i] > 1.1 * slope[i + 1] {
            intervals.push(i - 1);
            intervals.push(i);
        }
    }
    intervals.sort_unstable();
    intervals.dedup();
    intervals
        .into_iter()
        .map(|i| (energies[i] * energies[i + 1]).sqrt())
        .filter(|&e| energies.binary_search_by(|x| x.total_cmp(&e)).is_err())
        .collect()
}

/// Phase continued along the block's successful cells, and its time delay.
fn block_series(energies: &[f64], outcomes: &[&Outcome]) -> (Vec<f64>, Vec<f64>) {
    let ok: Vec<usize> = (0..energies.len())
        .filter(|&i| outcomes[i].is_ok())
        .collect();
    let e: Vec<f64> = ok.iter().map(|&i| energies[i]).collect();
    let raw: Vec<f64> = ok
        .iter()
        .map(|&i| outcomes[i].as_ref().unwrap().delta)
        .collect();
    let d = unwrap_phases(&raw);
    let q = if e.len() >= 3 {
        derivative(&e, &d).into_iter().map(|x| 2.0 * x).collect()
    } else {
        vec![f64::NAN; e.len()]
    };
    let mut deltas = vec![f64::NAN; energies.len()];
    let mut delays = vec![f64::NAN; energies.len()];
    for (n, &i) in ok.iter().enumerate() {
        deltas[i] = d[n];
        delays[i] = q[n];
    }
    (deltas, delays)
}

/// Result of [`run_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    pub computed: usize,
    pub reused: usize,
}

/// Evaluate every cell of `spec` on a pool of `threads` workers. Finished
/// cells are appended to `journal` (when given) and reused on the next call
/// with the same config hash. The result does not depend on `threads`.
pub fn run_scan(
    system: &System,
    spec: &ScanSpec,
    threads: usize,
    journal: Option<(&Path, &str)>,
) -> Result<ScanOutcome> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let (journal, mut done) = match journal {
        Some((p, hash)) => {
            let (j, cells) = Journal::open(p.to_path_buf(), hash)?;
            (Some(j), cells)
        }
        None => (None, HashMap::new()),
    };
    let blocks: Vec<(f64, u32)> = spec
        .lambdas
        .iter()
        .flat_map(|&l| spec.total_j.iter().map(move |&j| (l, j)))
        .collect();
    let mut grids: Vec<Vec<f64>> = vec![spec.energies.clone(); blocks.len()];
    let mut computed = 0;
    for pass in 0..=spec.refine_passes {
        let todo: Vec<(f64, u32, f64)> = blocks
            .iter()
            .zip(&grids)
            .flat_map(|(&(l, j), g)| g.iter().map(move |&e| (l, j, e)))
            .filter(|&(l, j, e)| !done.contains_key(&key(l, j, e)))
            .collect();
        let fresh: Vec<(Key, Outcome)> = pool.install(|| {
            todo.par_iter()
                .map(|&(l, j, e)| {
                    (
                        key(l, j, e),
                        system.cell(l, j, e).map_err(|err| err.to_string()),
                    )
                })
                .collect()
        });
        if let Some(j) = &journal {
            j.append(&fresh)?;
        }
        computed += fresh.len();
        done.extend(fresh);
        if pass == spec.refine_passes {
            break;
        }
        let mut grown = false;
        for (&(l, j), g) in blocks.iter().zip(grids.iter_mut()) {
            let outcomes: Vec<&Outcome> = g.iter().map(|&e| &done[&key(l, j, e)]).collect();
            let (deltas, _) = block_series(g, &outcomes);
            let (e_ok, d_ok): (Vec<f64>, Vec<f64>) = g
                .iter()
                .zip(&deltas)
                .filter(|(_, d)| d.is_finite())
                .map(|(&e, &d)| (e, d))
                .unzip();
            let extra = refinement(&e_ok, &d_ok);
            if !extra.is_empty() {
                grown = true;
                g.extend(extra);
                g.sort_by(f64::total_cmp);
                g.dedup();
            }
        }
        if !grown {
            break;
        }
    }
    let mut rows = Vec::new();
    for (&(l, j), g) in blocks.iter().zip(&grids) {
        let outcomes: Vec<&Outcome> = g.iter().map(|&e| &done[&key(l, j, e)]).collect();
        let (deltas, delays) = block_series(g, &outcomes);
        for (i, &e) in g.iter().enumerate() {
            let (sigma, error) = match outcomes[i] {
                Ok(c) => (c.sigma, None),
                Err(m) => (f64::NAN, Some(m.clone())),
            };
            rows.push(ScanRow {
                lambda: l,
                total_j: j,
                energy: e,
                sigma,
                delta: deltas[i],
                q: delays[i],
                error,
            });
        }
    }
    let reused = rows.len() - computed;
    Ok(ScanOutcome {
        rows,
        computed,
        reused,
    })
}

/// CSV text with the `#` preamble, header, rows and completion marker.
pub fn format_scan(rows: &[ScanRow], units: Units, hash: &str) -> String {
    let (eu, su, qu, header) = match units {
        Units::Au => (
            "hartree",
            "bohr^2",
            "au",
            "energy_hartree,lambda,J,sigma_bohr2,delta_rad,sin2delta,Q_au,status",
        ),
        Units::Lab => (
            "uK",
            "angstrom^2",
            "ps",
            "energy_uK,lambda,J,sigma_A2,delta_rad,sin2delta,Q_ps,status",
        ),
    };
    let (e_scale, s_scale, q_scale) = match units {
        Units::Au => (1.0, 1.0, 1.0),
        Units::Lab => (
            hartree_to_microkelvin(1.0),
            BOHR_IN_ANGSTROM * BOHR_IN_ANGSTROM,
            AU_TIME_IN_SECONDS * 1e12,
        ),
    };
    let mut out = String::new();
    let _ = writeln!(out, "# ucscat scan-sigma");
    let _ = writeln!(out, "# version {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# config_sha256 {hash}");
    let _ = writeln!(out, "# units energy={eu} sigma={su} delta=rad Q={qu}");
    let _ = writeln!(out, "{header}");
    for r in rows {
        let status = r
            .error
            .as_deref()
            .map_or("ok".to_string(), |m| m.replace(['\n', ','], " "));
        let _ = writeln!(
            out,
            "{:.10e},{:.10e},{},{:.10e},{:.10e},{:.10e},{:.10e},{}",
            r.energy * e_scale,
            r.lambda,
            r.total_j,
            r.sigma * s_scale,
            r.delta,
            r.sin2(),
            r.q * q_scale,
            status
        );
    }
    out.push_str(COMPLETE_MARKER);
    out.push('\n');
    out
}

/// True when `path` holds a finished scan for `hash`.
pub fn is_complete(path: &Path, hash: &str) -> bool {
    fs::read_to_string(path).is_ok_and(|t| {
        t.lines().any(|l| l == format!("# config_sha256 {hash}"))
            && t.lines().last() == Some(COMPLETE_MARKER)
    })
}

/// Run the scan into `path` (CSV). A finished file for the same hash is left
/// alone; otherwise cells journalled next to it are reused, the CSV is
/// written and the journal removed.
pub fn scan_sigma(
    system: &System,
    spec: &ScanSpec,
    threads: usize,
    units: Units,
    hash: &str,
    path: &Path,
) -> Result<Option<ScanOutcome>> {
    if is_complete(path, hash) {
        return Ok(None);
    }
    let journal = path.with_extension("cells");
    let outcome = run_scan(system, spec, threads, Some((&journal, hash)))?;
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, format_scan(&outcome.rows, units, hash))?;
    fs::rename(&tmp, path)?;
    fs::remove_file(&journal)?;
    Ok(Some(outcome))
}
