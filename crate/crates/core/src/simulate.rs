//! Poisson point processes on the circle, additive circular contamination,
//! auxiliary error samples and reproducible random substreams.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{wrap_unit, FunctionSpec, Role};

/// Finite point configuration on `[0, 1)`, kept sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<f64>,
}

impl PointPattern {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!("point {p} is outside [0, 1)")));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Random stream tags; one independent generator per (grid point, replication, tag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Hidden = 0,
    Contamination = 1,
    Errors = 2,
    Auxiliary = 3,
}

/// Generator for one task, derived from the root seed without shared state.
pub fn substream(root_seed: u64, grid_index: usize, replication: usize, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(((grid_index as u64) << 40) | ((replication as u64) << 8) | tag as u64);
    rng
}

fn require_role(spec: &FunctionSpec, role: Role) -> Result<()> {
    if spec.role() == role {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "expected a {role:?} spec, got {:?}",
            spec.role()
        )))
    }
}

/// Places `count` i.i.d. points with density `λ / τ`.
pub fn sample_ppp_with_count<R: Rng + ?Sized>(
    spec: &FunctionSpec,
    count: usize,
    rng: &mut R,
) -> Result<PointPattern> {
    require_role(spec, Role::Intensity)?;
    let mut points: Vec<f64> = (0..count).map(|_| spec.sample_location(rng)).collect();
    points.sort_by(f64::total_cmp);
    Ok(PointPattern { points })
}

/// One realisation of a Poisson process with intensity `spec`.
pub fn sample_ppp<R: Rng + ?Sized>(spec: &FunctionSpec, rng: &mut R) -> Result<PointPattern> {
    require_role(spec, Role::Intensity)?;
    let poisson = Poisson::new(spec.tau())
        .map_err(|e| Error::InvalidParameter(format!("Poisson mean {}: {e}", spec.tau())))?;
    let count = poisson.sample(rng) as usize;
    sample_ppp_with_count(spec, count, rng)
}

/// Moves every point by the matching shift, modulo 1.
pub fn shift(pattern: &PointPattern, shifts: &[f64]) -> Result<PointPattern> {
    if shifts.len() != pattern.len() {
        return Err(Error::InvalidParameter(format!(
            "{} shifts for {} points",
            shifts.len(),
            pattern.len()
        )));
    }
    let mut points: Vec<f64> = pattern
        .points
        .iter()
        .zip(shifts)
        .map(|(x, e)| wrap_unit(x + e))
        .collect();
    points.sort_by(f64::total_cmp);
    Ok(PointPattern { points })
}

/// Adds an independent draw from `f` to every point, modulo 1.
pub fn contaminate<R: Rng + ?Sized>(
    pattern: &PointPattern,
    f: &FunctionSpec,
    rng: &mut R,
) -> Result<PointPattern> {
    let shifts = sample_errors(f, pattern.len(), rng)?;
    shift(pattern, &shifts)
}

/// `m` i.i.d. draws from the error density (`m = 0` allowed here; datasets need `m >= 1`).
pub fn sample_errors<R: Rng + ?Sized>(f: &FunctionSpec, m: usize, rng: &mut R) -> Result<Vec<f64>> {
    require_role(f, Role::ErrorDensity)?;
    Ok((0..m).map(|_| f.sample_location(rng)).collect())
}

/// Superposition of several patterns.
pub fn merge(patterns: &[PointPattern]) -> PointPattern {
    let mut points: Vec<f64> = patterns.iter().flat_map(|p| p.points.iter().copied()).collect();
    points.sort_by(f64::total_cmp);
    PointPattern { points }
}

/// Assigns every point independently and uniformly to one of `n` patterns.
pub fn split<R: Rng + ?Sized>(pattern: &PointPattern, n: usize, rng: &mut R) -> Result<Vec<PointPattern>> {
    if n == 0 {
        return Err(Error::InvalidParameter("cannot split into zero patterns".into()));
    }
    let mut buckets = vec![Vec::new(); n];
    for &p in &pattern.points {
        buckets[rng.random_range(0..n)].push(p);
    }
    Ok(buckets.into_iter().map(|points| PointPattern { points }).collect())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub intensity: String,
    pub error: String,
}

/// `n` observed processes and `m` direct draws from the error density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub processes: Vec<PointPattern>,
    pub errors: Vec<f64>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(processes: Vec<PointPattern>, errors: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if processes.is_empty() {
            return Err(Error::InvalidParameter("a dataset needs n >= 1 processes".into()));
        }
        if errors.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(y) = errors.iter().find(|y| !(0.0..1.0).contains(*y)) {
            return Err(Error::InvalidParameter(format!("error draw {y} is outside [0, 1)")));
        }
        Ok(Self {
            processes,
            errors,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.processes.len()
    }

    pub fn m(&self) -> usize {
        self.errors.len()
    }

    /// Simulates hidden processes, contaminates them and draws the error
    /// sample, each from its own substream.
    pub fn simulate(
        intensity: &FunctionSpec,
        error: &FunctionSpec,
        n: usize,
        m: usize,
        seed: u64,
        grid_index: usize,
        replication: usize,
    ) -> Result<Self> {
        let mut hidden_rng = substream(seed, grid_index, replication, StreamTag::Hidden);
        let mut noise_rng = substream(seed, grid_index, replication, StreamTag::Contamination);
        let mut error_rng = substream(seed, grid_index, replication, StreamTag::Errors);
        let processes = (0..n)
            .map(|_| {
                let hidden = sample_ppp(intensity, &mut hidden_rng)?;
                contaminate(&hidden, error, &mut noise_rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let errors = sample_errors(error, m, &mut error_rng)?;
        Self::new(
            processes,
            errors,
            Provenance {
                seed,
                intensity: intensity.name().into(),
                error: error.name().into(),
            },
        )
    }

    /// CSV with header `kind,index,value`.
    ///
    /// `process` rows declare each process and its point count (so empty
    /// processes survive a round trip), `point` rows carry a location and the
    /// index of its process, `error` rows the auxiliary sample.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["kind", "index", "value"])?;
        for (i, p) in self.processes.iter().enumerate() {
            w.write_record(["process".to_string(), i.to_string(), p.len().to_string()])?;
        }
        for (i, p) in self.processes.iter().enumerate() {
            for x in &p.points {
                w.write_record(["point".to_string(), i.to_string(), x.to_string()])?;
            }
        }
        for (i, y) in self.errors.iter().enumerate() {
            w.write_record(["error".to_string(), i.to_string(), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["kind", "index", "value"] {
            return Err(Error::Parse(format!(
                "expected header kind,index,value, got {headers:?}"
            )));
        }
        let mut declared: Vec<usize> = Vec::new();
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut errors = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("row {rec:?} does not have 3 fields")));
            }
            let index: usize = rec[1]
                .parse()
                .map_err(|e| Error::Parse(format!("index {:?}: {e}", &rec[1])))?;
            let value: f64 = rec[2]
                .parse()
                .map_err(|e| Error::Parse(format!("value {:?}: {e}", &rec[2])))?;
            match &rec[0] {
                "process" => {
                    if index >= declared.len() {
                        declared.resize(index + 1, 0);
                        points.resize(index + 1, Vec::new());
                    }
                    declared[index] = value as usize;
                }
                "point" => {
                    if index >= points.len() {
                        declared.resize(index + 1, 0);
                        points.resize(index + 1, Vec::new());
                    }
                    points[index].push(value);
                }
                "error" => errors.push(value),
                other => return Err(Error::Parse(format!("unknown row kind {other:?}"))),
            }
        }
        for (i, (d, p)) in declared.iter().zip(&points).enumerate() {
            if *d != 0 && *d != p.len() {
                return Err(Error::Parse(format!(
                    "process {i} declares {d} points but has {}",
                    p.len()
                )));
            }
        }
        let processes = points
            .into_iter()
            .map(PointPattern::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(processes, errors, Provenance::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_family, FamilySpec};
    use rand::RngCore;

    /// Replays a fixed list of words.
    struct Replay {
        words: Vec<u64>,
        at: usize,
    }

    impl RngCore for Replay {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }
        fn next_u64(&mut self) -> u64 {
            let w = self.words[self.at % self.words.len()];
            self.at += 1;
            w
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            for chunk in dst.chunks_mut(8) {
                let w = self.next_u64().to_le_bytes();
                chunk.copy_from_slice(&w[..chunk.len()]);
            }
        }
    }

    fn uniform(role: Role, tau: Option<f64>) -> FunctionSpec {
        make_family(role, &FamilySpec::Uniform { tau }).unwrap()
    }

    #[test]
    fn zero_count_gives_empty_pattern() {
        let spec = uniform(Role::Intensity, Some(3.0));
        let mut rng = Replay { words: vec![1], at: 0 };
        assert!(sample_ppp_with_count(&spec, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn wrap_around_shift() {
        let p = PointPattern::new(vec![0.9]).unwrap();
        let out = shift(&p, &[0.2]).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.points()[0] - 0.1).abs() < 1e-15);
        assert!(shift(&p, &[]).is_err());
    }

    #[test]
    fn uniform_errors_replay_the_stream() {
        let f = uniform(Role::ErrorDensity, None);
        let words = vec![0, u64::MAX, 1 << 63, 12345 << 20];
        let mut a = Replay { words: words.clone(), at: 0 };
        let mut b = Replay { words, at: 0 };
        let draws = sample_errors(&f, 4, &mut a).unwrap();
        let direct: Vec<f64> = (0..4).map(|_| b.random::<f64>()).collect();
        assert_eq!(draws, direct);
        assert_eq!(draws[2], 0.5);
    }

    #[test]
    fn role_is_checked() {
        let f = uniform(Role::ErrorDensity, None);
        let mut rng = substream(1, 0, 0, StreamTag::Hidden);
        assert!(sample_ppp(&f, &mut rng).is_err());
        let lam = uniform(Role::Intensity, Some(2.0));
        assert!(sample_errors(&lam, 3, &mut rng).is_err());
    }

    #[test]
    fn merge_and_split() {
        let a = PointPattern::new(vec![0.1]).unwrap();
        let b = PointPattern::new(vec![0.5]).unwrap();
        assert_eq!(merge(&[b, a]).points(), &[0.1, 0.5]);
        let p = PointPattern::new(vec![0.3, 0.1, 0.7, 0.7, 0.0]).unwrap();
        let mut rng = substream(9, 0, 0, StreamTag::Auxiliary);
        let parts = split(&p, 3, &mut rng).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(merge(&parts), p);
        assert!(split(&p, 0, &mut rng).is_err());
    }

    #[test]
    fn pattern_validation() {
        assert!(PointPattern::new(vec![1.0]).is_err());
        assert!(PointPattern::new(vec![-0.1]).is_err());
        assert_eq!(PointPattern::new(vec![0.5, 0.2]).unwrap().points(), &[0.2, 0.5]);
    }

    #[test]
    fn substreams_are_distinct_and_reproducible() {
        let mut a = substream(42, 0, 0, StreamTag::Hidden);
        let mut b = substream(42, 0, 0, StreamTag::Hidden);
        let mut c = substream(42, 0, 1, StreamTag::Hidden);
        let mut d = substream(42, 1, 0, StreamTag::Hidden);
        let x: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let y: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let z: Vec<u64> = (0..4).map(|_| c.next_u64()).collect();
        let w: Vec<u64> = (0..4).map(|_| d.next_u64()).collect();
        assert_eq!(x, y);
        assert_ne!(x, z);
        assert_ne!(x, w);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let lam = uniform(Role::Intensity, Some(2.0));
        let f = make_family(
            Role::ErrorDensity,
            &FamilySpec::PoissonKernel { rate: Some(0.7), decay: None, tau: None },
        )
        .unwrap();
        let ds = Dataset::simulate(&lam, &f, 6, 5, 3, 0, 0).unwrap();
        let again = Dataset::simulate(&lam, &f, 6, 5, 3, 0, 0).unwrap();
        assert_eq!(ds, again);
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.processes, ds.processes);
        assert_eq!(back.errors, ds.errors);

        let text = "kind,index,value\nprocess,0,0\nprocess,1,1\npoint,1,0.25\nerror,0,0.5\n";
        let ds = Dataset::read_csv(text.as_bytes()).unwrap();
        assert_eq!(ds.n(), 2);
        assert!(ds.processes[0].is_empty());
        assert!(Dataset::read_csv("kind,index,value\nprocess,0,0\n".as_bytes()).is_err());
        assert!(Dataset::read_csv("kind,index,value\nbogus,0,0\nerror,0,0.1\n".as_bytes()).is_err());
    }
}
