//! Seedable Monte Carlo simulations. Trial i draws its stream from
//! (master seed, i), so results are independent of scheduling and fully
//! determined by the configuration and seed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use flatcode_core::analysis::{
    average_delay, e_total, moments_independent, ratio_to_f64, ExactProb,
};
use flatcode_core::channel::corrupt_packets;
use flatcode_core::codes::{CodeError, RancCodec, RlncCodec};
use flatcode_core::gf::{Fe, Field};
use flatcode_core::linalg::{Echelon, Matrix};
use flatcode_core::matroid::{Matroid, Packet, Protocol};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Configuration shared by every simulation; results are a pure function of
/// this struct.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub kind: Protocol,
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    /// Curve length for per-reception statistics.
    pub r_max: usize,
    /// Injected error packets per trial (codec simulations).
    pub injections: usize,
    /// Dropped packets per trial (codec simulations).
    pub loss: usize,
    /// Designed rank distance of the payload code (codec simulations).
    pub dist: usize,
}

impl SimConfig {
    pub fn new(kind: Protocol, q: u64, n: usize, k: usize, trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            kind,
            q,
            n,
            k,
            trials,
            seed,
            r_max: 0,
            injections: 0,
            loss: 0,
            dist: 1,
        }
    }

    fn trial_rng(&self, trial: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(trial.wrapping_add(1));
        rng
    }

    fn matroid(&self) -> Matroid {
        Matroid::new(self.kind, Field::of_order(self.q).expect("supported q"), self.n)
    }
}

/// Exact reference value attached to a simulated estimate.
#[derive(Debug, Clone)]
pub enum ExactValue {
    Rational(ExactProb),
    Float(f64),
}

impl ExactValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            ExactValue::Rational(r) => ratio_to_f64(r),
            ExactValue::Float(f) => *f,
        }
    }
}

/// One aggregated statistic (for curves, one per reception count r).
#[derive(Debug, Clone)]
pub struct SimRow {
    pub r: Option<usize>,
    pub mean: f64,
    pub var: f64,
    pub stderr: f64,
    pub exact: Option<ExactValue>,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub rows: Vec<SimRow>,
    pub trials: u64,
    pub seed: u64,
    pub wall: Duration,
}

impl SimRow {
    fn from_sums(r: Option<usize>, s1: f64, s2: f64, t: u64, exact: Option<ExactValue>) -> SimRow {
        let tf = t as f64;
        let mean = s1 / tf;
        let var = if t > 1 {
            ((s2 - s1 * s1 / tf) / (tf - 1.0)).max(0.0)
        } else {
            0.0
        };
        SimRow {
            r,
            mean,
            var,
            stderr: (var / tf).sqrt(),
            exact,
        }
    }

    /// Distance from the exact value in standard errors. A degenerate
    /// (zero-variance) sample counts as agreement only when the means agree
    /// to numerical precision.
    pub fn sigma_off(&self) -> Option<f64> {
        let exact = self.exact.as_ref()?.as_f64();
        let dev = (self.mean - exact).abs();
        if self.stderr == 0.0 {
            return Some(if dev < 1e-9 { 0.0 } else { f64::INFINITY });
        }
        Some(dev / self.stderr)
    }
}

/// Incremental rank bookkeeping for a stream of received elements.
enum RankTracker {
    Set(BTreeSet<Packet>),
    Linear(Echelon<Field>),
    Affine(Echelon<Field>),
}

impl RankTracker {
    fn new(m: &Matroid) -> RankTracker {
        match m.kind() {
            Protocol::Saf => RankTracker::Set(BTreeSet::new()),
            Protocol::Rlnc => RankTracker::Linear(Echelon::new(m.field().clone(), m.n())),
            Protocol::Ranc => RankTracker::Affine(Echelon::new(m.field().clone(), m.n() + 1)),
        }
    }

    fn absorb(&mut self, p: &Packet) -> bool {
        match self {
            RankTracker::Set(s) => s.insert(p.clone()),
            RankTracker::Linear(e) => e.absorb(p.0.clone()),
            RankTracker::Affine(e) => {
                let mut row = Vec::with_capacity(p.0.len() + 1);
                row.push(Fe::ONE);
                row.extend_from_slice(&p.0);
                e.absorb(row)
            }
        }
    }

    fn rank(&self) -> usize {
        match self {
            RankTracker::Set(s) => s.len(),
            RankTracker::Linear(e) | RankTracker::Affine(e) => e.rank(),
        }
    }

    fn contains(&self, p: &Packet) -> bool {
        match self {
            RankTracker::Set(s) => s.contains(p),
            RankTracker::Linear(e) => e.contains(&p.0),
            RankTracker::Affine(e) => {
                let mut row = Vec::with_capacity(p.0.len() + 1);
                row.push(Fe::ONE);
                row.extend_from_slice(&p.0);
                e.contains(&row)
            }
        }
    }
}

/// A fresh random message matrix of the protocol's shape.
fn random_message<R: RngCore>(m: &Matroid, k: usize, rng: &mut R) -> Matrix {
    let field = m.field().clone();
    match m.kind() {
        Protocol::Saf => loop {
            let mat = Matrix::random(field.clone(), k, m.n(), rng);
            let rows: BTreeSet<Vec<u16>> = (0..k)
                .map(|i| mat.row(i).iter().map(|e| e.0).collect())
                .collect();
            if rows.len() == k {
                return mat;
            }
        },
        Protocol::Rlnc | Protocol::Ranc => {
            Matrix::random(field, k, m.payload_width(k), rng)
        }
    }
}

/// Expected-delay simulation: draws uniform flat elements until k
/// independent ones arrive.
pub fn sim_delay(config: &SimConfig) -> SimResult {
    let start = Instant::now();
    let m = config.matroid();
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for trial in 0..config.trials {
        let mut rng = config.trial_rng(trial);
        let msg = random_message(&m, config.k, &mut rng);
        let enc = m.encode_message(&msg).expect("valid message");
        let flat = m.closure(&enc.packets).expect("valid packets");
        let mut tracker = RankTracker::new(&m);
        let mut draws = 0u64;
        while tracker.rank() < config.k {
            let e = m.sample_element(&flat, &mut rng).expect("nonempty flat");
            tracker.absorb(&e);
            draws += 1;
        }
        s1 += draws as f64;
        s2 += (draws * draws) as f64;
    }
    let exact = ExactValue::Rational(average_delay(config.kind, config.q, config.k));
    SimResult {
        rows: vec![SimRow::from_sums(None, s1, s2, config.trials, Some(exact))],
        trials: config.trials,
        seed: config.seed,
        wall: start.elapsed(),
    }
}

/// Curve of the expected number of independent elements after r receptions,
/// r = 1..r_max.
pub fn sim_independent_curve(config: &SimConfig) -> SimResult {
    let start = Instant::now();
    let m = config.matroid();
    let r_max = config.r_max.max(1);
    let mut s1 = vec![0.0f64; r_max];
    let mut s2 = vec![0.0f64; r_max];
    for trial in 0..config.trials {
        let mut rng = config.trial_rng(trial);
        let msg = random_message(&m, config.k, &mut rng);
        let enc = m.encode_message(&msg).expect("valid message");
        let flat = m.closure(&enc.packets).expect("valid packets");
        let mut tracker = RankTracker::new(&m);
        for r in 0..r_max {
            let e = m.sample_element(&flat, &mut rng).expect("nonempty flat");
            tracker.absorb(&e);
            let rank = tracker.rank() as f64;
            s1[r] += rank;
            s2[r] += rank * rank;
        }
    }
    let rows = (0..r_max)
        .map(|r| {
            let (e, _) = moments_independent(config.kind, config.q, config.k, r + 1);
            SimRow::from_sums(
                Some(r + 1),
                s1[r],
                s2[r],
                config.trials,
                Some(ExactValue::Rational(e)),
            )
        })
        .collect();
    SimResult {
        rows,
        trials: config.trials,
        seed: config.seed,
        wall: start.elapsed(),
    }
}

/// Curve of the expected number of decodable canonical-basis elements after
/// r receptions.
pub fn sim_decodable_curve(config: &SimConfig) -> SimResult {
    let start = Instant::now();
    let m = config.matroid();
    let r_max = config.r_max.max(1);
    let k = config.k;
    let mut s1 = vec![0.0f64; r_max];
    let mut s2 = vec![0.0f64; r_max];
    for trial in 0..config.trials {
        let mut rng = config.trial_rng(trial);
        let msg = random_message(&m, k, &mut rng);
        let enc = m.encode_message(&msg).expect("valid message");
        let flat = m.closure(&enc.packets).expect("valid packets");
        let mut tracker = RankTracker::new(&m);
        let mut decodable = vec![false; k];
        let mut count = 0usize;
        for r in 0..r_max {
            let e = m.sample_element(&flat, &mut rng).expect("nonempty flat");
            // The closure only changes when the rank grows, so decodability
            // needs rechecking only then.
            if tracker.absorb(&e) {
                if tracker.rank() == k {
                    count = k;
                    decodable.iter_mut().for_each(|d| *d = true);
                } else {
                    for (i, done) in decodable.iter_mut().enumerate() {
                        if !*done && tracker.contains(&enc.packets[i]) {
                            *done = true;
                            count += 1;
                        }
                    }
                }
            }
            s1[r] += count as f64;
            s2[r] += (count * count) as f64;
        }
    }
    let rows = (0..r_max)
        .map(|r| {
            let e = e_total(config.kind, config.q, k, r + 1);
            SimRow::from_sums(
                Some(r + 1),
                s1[r],
                s2[r],
                config.trials,
                Some(ExactValue::Rational(e)),
            )
        })
        .collect();
    SimResult {
        rows,
        trials: config.trials,
        seed: config.seed,
        wall: start.elapsed(),
    }
}

/// Outcome counts of codec trials under injection corruption.
#[derive(Debug, Clone)]
pub struct CodecSimResult {
    pub trials: u64,
    pub successes: u64,
    pub rank_deficient: u64,
    pub decode_failures: u64,
    pub wrong_message: u64,
    pub seed: u64,
    pub wall: Duration,
    /// Seeds (trial indices) of unsuccessful trials, for reproduction.
    pub failed_trials: Vec<u64>,
}

impl CodecSimResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// End-to-end codec trials: encode a random message, collect k innovative
/// combinations, corrupt, decode, compare.
pub fn sim_codec(config: &SimConfig) -> Result<CodecSimResult, CodeError> {
    let start = Instant::now();
    let field = Field::of_order(config.q).expect("supported q");
    enum Codec {
        Affine(RancCodec),
        Linear(RlncCodec),
    }
    let codec = match config.kind {
        Protocol::Ranc => Codec::Affine(RancCodec::new(field, config.n, config.k, config.dist)?),
        Protocol::Rlnc => Codec::Linear(RlncCodec::new(field, config.n, config.k, config.dist)?),
        Protocol::Saf => return Err(CodeError::InvalidCode),
    };
    let (matroid, radius) = match &codec {
        Codec::Affine(c) => (c.matroid().clone(), c.code().radius()),
        Codec::Linear(c) => (c.matroid().clone(), c.code().radius()),
    };
    let _ = radius;
    let mut out = CodecSimResult {
        trials: config.trials,
        successes: 0,
        rank_deficient: 0,
        decode_failures: 0,
        wrong_message: 0,
        seed: config.seed,
        wall: Duration::ZERO,
        failed_trials: Vec::new(),
    };
    for trial in 0..config.trials {
        let mut rng = config.trial_rng(trial);
        let (sent, expect) = match &codec {
            Codec::Affine(c) => {
                let msg = c.random_message(&mut rng);
                (c.encode(&msg)?, msg)
            }
            Codec::Linear(c) => {
                let msg = c.random_message(&mut rng);
                (c.encode(&msg)?, msg)
            }
        };
        let flat = matroid.closure(&sent).expect("valid packets");
        // Collect k innovative combinations.
        let mut tracker = RankTracker::new(&matroid);
        let mut received = Vec::with_capacity(config.k + config.injections);
        while tracker.rank() < config.k {
            let e = matroid.sample_element(&flat, &mut rng).expect("nonempty");
            if tracker.absorb(&e) {
                received.push(e);
            }
        }
        let received =
            corrupt_packets(&matroid, &received, config.injections, config.loss, &mut rng);
        let got = match &codec {
            Codec::Affine(c) => c.decode(&received),
            Codec::Linear(c) => c.decode(&received),
        };
        match got {
            Ok(msg) if msg == expect => out.successes += 1,
            Ok(_) => {
                out.wrong_message += 1;
                out.failed_trials.push(trial);
            }
            Err(CodeError::RankDeficient) => {
                out.rank_deficient += 1;
                out.failed_trials.push(trial);
            }
            Err(_) => {
                out.decode_failures += 1;
                out.failed_trials.push(trial);
            }
        }
    }
    out.wall = start.elapsed();
    Ok(out)
}

/// Success statistics for the two-source butterfly topology with a uniform
/// random combining coefficient at the bottleneck.
pub fn sim_butterfly(kind: Protocol, q: u64, trials: u64, seed: u64) -> SimResult {
    let start = Instant::now();
    let field = Field::of_order(q).expect("supported q");
    let n = match kind {
        Protocol::Rlnc => 3,
        Protocol::Ranc => 2,
        Protocol::Saf => panic!("butterfly simulation applies to coded protocols"),
    };
    let m = Matroid::new(kind, field.clone(), n);
    let config = SimConfig::new(kind, q, n, 2, trials, seed);
    let mut s1 = 0.0f64;
    for trial in 0..trials {
        let mut rng = config.trial_rng(trial);
        let msg = Matrix::random(field.clone(), 2, m.payload_width(2), &mut rng);
        let enc = m.encode_message(&msg).expect("valid message");
        let x = &enc.packets[0];
        let y = &enc.packets[1];
        // Bottleneck combination.
        let coeff = field.sample(&mut rng);
        let w: Packet = match kind {
            Protocol::Rlnc => {
                // x + a·y
                Packet(
                    x.0.iter()
                        .zip(&y.0)
                        .map(|(&u, &v)| field.add(u, field.mul(coeff, v)))
                        .collect(),
                )
            }
            Protocol::Ranc => {
                // b·x + (1−b)·y
                let other = field.sub(Fe::ONE, coeff);
                Packet(
                    x.0.iter()
                        .zip(&y.0)
                        .map(|(&u, &v)| field.add(field.mul(coeff, u), field.mul(other, v)))
                        .collect(),
                )
            }
            Protocol::Saf => unreachable!(),
        };
        // Each destination holds its direct packet plus the combination.
        let d1 = m.decode_message(&[x.clone(), w.clone()]);
        let d2 = m.decode_message(&[y.clone(), w.clone()]);
        let success = d1.as_ref() == Ok(&msg) && d2.as_ref() == Ok(&msg);
        s1 += success as u64 as f64;
    }
    let exact = match kind {
        Protocol::Rlnc => (q - 1) as f64 / q as f64,
        Protocol::Ranc => q.saturating_sub(2) as f64 / q as f64,
        Protocol::Saf => unreachable!(),
    };
    // Bernoulli: the second moment equals the first.
    let rows = vec![SimRow::from_sums(
        None,
        s1,
        s1,
        trials,
        Some(ExactValue::Float(exact)),
    )];
    SimResult {
        rows,
        trials,
        seed,
        wall: start.elapsed(),
    }
}
