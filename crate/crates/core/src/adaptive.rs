//! Sliding-window adaptive HG-CMA.
//!
//! Each incoming sample is mapped through the current separator and pushed
//! into a window of the last `K` outputs. Once the window is full, every step
//! applies a few linear-Shear + Givens pair updates (a full sweep, one
//! auto-selected pair, or the max-deviation pair plus one auto-selected pair)
//! and then rescales every row to its CM-optimal norm. All transforms act on
//! the window and on `W` together, so the window always equals `W` applied
//! to the raw samples it holds.

use std::fmt;
use std::str::FromStr;

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::rotations::{apply_two_row, givens_params, norm_param, scale_rows, shear_linear};
use crate::signal::row_cm_cost;

/// Which pairs are updated per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RotationStrategy {
    /// All `M (M - 1) / 2` pairs in lexicographic order.
    FullSweep,
    /// One pair, cycling through all pairs in lexicographic order.
    SingleAuto,
    /// The pair of rows with the largest CM deviation, then one cycling pair.
    #[default]
    TwoMaxDeviation,
}

impl RotationStrategy {
    pub const ALL: [RotationStrategy; 3] = [
        RotationStrategy::FullSweep,
        RotationStrategy::SingleAuto,
        RotationStrategy::TwoMaxDeviation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RotationStrategy::FullSweep => "sweep",
            RotationStrategy::SingleAuto => "single",
            RotationStrategy::TwoMaxDeviation => "two",
        }
    }
}

impl fmt::Display for RotationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RotationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" | "full" => Ok(RotationStrategy::FullSweep),
            "single" => Ok(RotationStrategy::SingleAuto),
            "two" => Ok(RotationStrategy::TwoMaxDeviation),
            other => Err(Error::InvalidInput(format!("unknown rotation strategy '{other}'"))),
        }
    }
}

/// Output of one adaptive step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    /// Separated current sample.
    pub output: Vec<C64>,
    /// Pairs updated in this step, in application order (empty during warm-up).
    pub pairs: Vec<(usize, usize)>,
    /// CM cost of the window after the step (0 during warm-up).
    pub window_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveState {
    m: usize,
    k: usize,
    w: ComplexBlock,
    /// Ring buffer of transformed samples; column `head` is the oldest once full.
    window: ComplexBlock,
    head: usize,
    filled: usize,
    t: usize,
    cursor: usize,
    pairs: Vec<(usize, usize)>,
    strategy: RotationStrategy,
    rotations: usize,
}

/// New tracker with window length `k`, starting from `w0` or the identity.
pub fn adaptive_init(
    m: usize,
    k: usize,
    strategy: RotationStrategy,
    w0: Option<ComplexBlock>,
) -> Result<AdaptiveState> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("adaptive separation needs m >= 2, got {m}")));
    }
    if k < 2 {
        return Err(Error::InvalidInput(format!("window length must be >= 2, got {k}")));
    }
    let w = match w0 {
        Some(w) if w.shape() != (m, m) => {
            return Err(Error::DimensionMismatch(format!("W0 is {:?}, expected {m}x{m}", w.shape())))
        }
        Some(w) if !w.is_finite() => return Err(Error::InvalidInput("non-finite W0".into())),
        Some(w) => w,
        None => ComplexBlock::identity(m),
    };
    let pairs = (0..m).flat_map(|p| (p + 1..m).map(move |q| (p, q))).collect();
    Ok(AdaptiveState {
        m,
        k,
        w,
        window: ComplexBlock::zeros(m, k),
        head: 0,
        filled: 0,
        t: 0,
        cursor: 0,
        pairs,
        strategy,
        rotations: 0,
    })
}

/// One step of [`AdaptiveState::step`], returning only the separated sample.
pub fn adaptive_step(state: &mut AdaptiveState, y: &[C64]) -> Result<Vec<C64>> {
    state.step(y).map(|s| s.output)
}

/// Pair `(p, q)`, `p < q`, maximizing the summed CM deviation of its two rows.
/// Ties go to the lexicographically smallest pair.
pub fn select_max_deviation(window: &ComplexBlock) -> Result<(usize, usize)> {
    let m = window.rows();
    if m < 2 {
        return Err(Error::InvalidInput("need at least two rows".into()));
    }
    let dev: Vec<f64> = (0..m).map(|i| row_cm_cost(window.row(i))).collect();
    let mut order: Vec<usize> = (0..m).collect();
    // stable: equal deviations keep ascending index order
    order.sort_by(|a, b| dev[*b].total_cmp(&dev[*a]));
    let (a, b) = (order[0], order[1]);
    Ok((a.min(b), a.max(b)))
}

impl AdaptiveState {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn window_len(&self) -> usize {
        self.k
    }

    pub fn strategy(&self) -> RotationStrategy {
        self.strategy
    }

    /// Current separator.
    pub fn w(&self) -> &ComplexBlock {
        &self.w
    }

    /// Samples consumed so far.
    pub fn time(&self) -> usize {
        self.t
    }

    /// Total pair updates applied.
    pub fn rotations(&self) -> usize {
        self.rotations
    }

    pub fn is_warm(&self) -> bool {
        self.filled == self.k
    }

    /// The next pair the auto-increment cursor will visit.
    pub fn cursor_pair(&self) -> (usize, usize) {
        self.pairs[self.cursor]
    }

    /// Window columns oldest to newest (only the filled part during warm-up).
    pub fn window(&self) -> ComplexBlock {
        let start = if self.filled == self.k { self.head } else { 0 };
        ComplexBlock::from_fn(self.m, self.filled, |i, j| self.window[(i, (start + j) % self.k)])
    }

    fn next_cursor_pair(&mut self) -> (usize, usize) {
        let pair = self.pairs[self.cursor];
        self.cursor = (self.cursor + 1) % self.pairs.len();
        pair
    }

    fn select_pairs(&mut self) -> Result<Vec<(usize, usize)>> {
        Ok(match self.strategy {
            RotationStrategy::FullSweep => self.pairs.clone(),
            RotationStrategy::SingleAuto => vec![self.next_cursor_pair()],
            RotationStrategy::TwoMaxDeviation => {
                let first = select_max_deviation(&self.window)?;
                if self.pairs[self.cursor] == first {
                    self.cursor = (self.cursor + 1) % self.pairs.len();
                }
                let second = self.next_cursor_pair();
                if second == first {
                    vec![first]
                } else {
                    vec![first, second]
                }
            }
        })
    }

    fn update_pair(&mut self, p: usize, q: usize) -> Result<()> {
        let h = shear_linear(&self.window, p, q)?;
        apply_two_row(&h.params, &mut self.window)?;
        apply_two_row(&h.params, &mut self.w)?;
        let g = givens_params(&self.window, p, q)?;
        apply_two_row(&g, &mut self.window)?;
        apply_two_row(&g, &mut self.w)?;
        self.rotations += 1;
        Ok(())
    }

    /// Consumes one received sample `y(t)` (length `M`). Non-finite samples
    /// are rejected without touching the state.
    pub fn step(&mut self, y: &[C64]) -> Result<StepOutput> {
        if y.len() != self.m {
            return Err(Error::DimensionMismatch(format!("sample has {} entries, expected {}", y.len(), self.m)));
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        let x = self.w.mul_vec(y)?;
        let newest = self.head;
        self.window.set_column(newest, &x);
        self.head = (self.head + 1) % self.k;
        let warm_up = self.filled < self.k;
        self.filled = (self.filled + 1).min(self.k);
        self.t += 1;
        // the K-th sample completes the window but is still a warm-up step
        if warm_up {
            return Ok(StepOutput {
                output: x,
                pairs: Vec::new(),
                window_cost: 0.0,
            });
        }
        let pairs = self.select_pairs()?;
        for &(p, q) in &pairs {
            self.update_pair(p, q)?;
        }
        let scales: Vec<f64> = (0..self.m).map(|i| norm_param(self.window.row(i))).collect();
        scale_rows(&mut self.window, &scales)?;
        scale_rows(&mut self.w, &scales)?;
        let window_cost = (0..self.m).map(|i| row_cm_cost(self.window.row(i))).sum();
        Ok(StepOutput {
            output: self.window.column(newest),
            pairs,
            window_cost,
        })
    }
}
