//! Posterior over predecessor gaps.
//!
//! For a sorted list of `n` elements there are `n + 1` gaps; gap `i` means the
//! target's predecessor is element `i` (1-based), gap 0 that it lies below
//! everything. Every query splits the gaps into a prefix and a suffix, so
//! after `q` updates the posterior is constant on at most `q + 1` runs of
//! consecutive gaps. Storing those runs makes each update `O(q)` however large
//! `n` is. Masses are kept as natural-log values and renormalized after every
//! update, so nothing underflows to zero.

// Splits whose imbalance differs by less than this count as tied.
const TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
struct Run {
    start: usize,
    len: usize,
    // log of the mass of each single gap in the run
    log_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapPosterior {
    runs: Vec<Run>,
    gaps: usize,
    log_agree: f64,
    log_disagree: f64,
}

impl GapPosterior {
    /// Uniform prior over the `elements + 1` gaps.
    pub fn uniform(elements: usize, p: f64) -> Self {
        let gaps = elements + 1;
        Self {
            runs: vec![Run {
                start: 0,
                len: gaps,
                log_mass: -(gaps as f64).ln(),
            }],
            gaps,
            log_agree: (1.0 - p).ln(),
            log_disagree: p.ln(),
        }
    }

    pub fn gaps(&self) -> usize {
        self.gaps
    }

    pub fn elements(&self) -> usize {
        self.gaps - 1
    }

    fn run_of(&self, gap: usize) -> usize {
        assert!(gap < self.gaps, "gap {gap} out of range");
        self.runs.partition_point(|r| r.start <= gap) - 1
    }

    pub fn log_mass(&self, gap: usize) -> f64 {
        self.runs[self.run_of(gap)].log_mass
    }

    pub fn mass(&self, gap: usize) -> f64 {
        self.log_mass(gap).exp()
    }

    pub fn total_mass(&self) -> f64 {
        self.runs.iter().map(|r| r.len as f64 * r.log_mass.exp()).sum()
    }

    pub fn min_log_mass(&self) -> f64 {
        self.runs.iter().map(|r| r.log_mass).fold(f64::INFINITY, f64::min)
    }

    /// Lowest-index gap of maximal mass, with that mass.
    pub fn most_likely(&self) -> (usize, f64) {
        let mut best = &self.runs[0];
        for r in &self.runs[1..] {
            if r.log_mass > best.log_mass {
                best = r;
            }
        }
        (best.start, best.log_mass.exp())
    }

    /// Total mass of gaps `0..split`, i.e. the probability that the target
    /// lies below element `split`.
    pub fn mass_below(&self, split: usize) -> f64 {
        let mut acc = 0.0;
        for r in &self.runs {
            if r.start >= split {
                break;
            }
            let covered = (split - r.start).min(r.len);
            acc += covered as f64 * r.log_mass.exp();
        }
        acc
    }

    /// Element index in `1..=elements` whose comparison splits the mass most
    /// evenly; ties go to the lower index.
    pub fn median_split(&self) -> usize {
        let n = self.elements();
        assert!(n > 0, "no element to split on");
        // smallest j with mass_below(j) >= 1/2
        let mut first = self.gaps;
        let mut acc = 0.0;
        for r in &self.runs {
            let w = r.log_mass.exp();
            let run_mass = w * r.len as f64;
            if w > 0.0 && acc + run_mass >= 0.5 {
                let need = ((0.5 - acc) / w).ceil().max(1.0) as usize;
                first = r.start + need.min(r.len);
                break;
            }
            acc += run_mass;
        }
        let hi = first.clamp(1, n);
        if hi > 1 {
            let lo = hi - 1;
            let (below_lo, below_hi) = (self.mass_below(lo), self.mass_below(hi));
            if (below_lo - 0.5).abs() <= (below_hi - 0.5).abs() + TIE_SLACK {
                return lo;
            }
        }
        hi
    }

    fn cut(&mut self, at: usize) -> usize {
        if at >= self.gaps {
            return self.runs.len();
        }
        let i = self.run_of(at);
        let run = &self.runs[i];
        if run.start == at {
            return i;
        }
        let tail = Run {
            start: at,
            len: run.start + run.len - at,
            log_mass: run.log_mass,
        };
        self.runs[i].len = at - self.runs[i].start;
        self.runs.insert(i + 1, tail);
        i + 1
    }

    /// Likelihood update after comparing the target with element `split`:
    /// gaps consistent with the answer are scaled by `1 - p`, the others by
    /// `p`, then everything is renormalized.
    pub fn update(&mut self, split: usize, target_below: bool) {
        assert!(split >= 1 && split < self.gaps, "split {split} out of range");
        let boundary = self.cut(split);
        let (agree, disagree) = (self.log_agree, self.log_disagree);
        for (i, r) in self.runs.iter_mut().enumerate() {
            let below = i < boundary;
            r.log_mass += if below == target_below { agree } else { disagree };
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        let top = self.runs.iter().map(|r| r.log_mass).fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = self.runs.iter().map(|r| r.len as f64 * (r.log_mass - top).exp()).sum();
        let log_total = top + sum.ln();
        for r in &mut self.runs {
            r.log_mass -= log_total;
        }
    }

    /// Per-gap masses, materialized. Linear in the number of gaps.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.gaps);
        for r in &self.runs {
            out.extend(std::iter::repeat_n(r.log_mass.exp(), r.len));
        }
        out
    }

    pub fn runs(&self) -> usize {
        self.runs.len()
    }
}
