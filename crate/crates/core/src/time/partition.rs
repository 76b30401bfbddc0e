use crate::error::{Error, Result};

/// `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    nodes: Vec<f64>,
}

/// One time interval `I_n = (t_{n-1}, t_n)`; `index` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    pub index: usize,
    pub start: f64,
    pub end: f64,
}

impl Slab {
    pub fn new(index: usize, start: f64, end: f64) -> Self {
        Self { index, start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = 1e-12 * self.len().max(self.end.abs());
        t >= self.start - tol && t <= self.end + tol
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideSlab {
                t,
                start: self.start,
                end: self.end,
            })
        }
    }

    /// Reference coordinate in `[-1, 1]`.
    pub fn reference(&self, t: f64) -> f64 {
        super::legendre::to_reference(t, self.start, self.end)
    }

    /// `count` equispaced times including both endpoints.
    pub fn sample_times(&self, count: usize) -> Vec<f64> {
        if count <= 1 {
            return vec![self.start];
        }
        (0..count)
            .map(|k| {
                if k + 1 == count {
                    self.end
                } else {
                    self.start + self.len() * k as f64 / (count - 1) as f64
                }
            })
            .collect()
    }
}

impl TimePartition {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(
                "a time partition needs at least two nodes".into(),
            ));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "partition must start at t_0 = 0, got {}",
                nodes[0]
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "partition nodes must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { nodes })
    }

    /// `n` slabs of length `final_time / n`.
    pub fn uniform(final_time: f64, n: usize) -> Result<Self> {
        if n == 0 || !(final_time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "uniform partition needs T > 0 and N ≥ 1 (T = {final_time}, N = {n})"
            )));
        }
        let mut nodes: Vec<f64> = (0..=n).map(|k| final_time * k as f64 / n as f64).collect();
        nodes[n] = final_time;
        Self::new(nodes)
    }

    /// Uniform partition of `(0, T)` with slab length `tau`, which must divide `T`.
    pub fn with_step(final_time: f64, tau: f64) -> Result<Self> {
        let n = (final_time / tau).round();
        if n < 1.0 || ((n * tau - final_time).abs() > 1e-9 * final_time) {
            return Err(Error::InvalidArgument(format!(
                "time step {tau} does not divide final time {final_time}"
            )));
        }
        Self::uniform(final_time, n as usize)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_slabs(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn slab(&self, index: usize) -> Slab {
        Slab::new(index, self.nodes[index], self.nodes[index + 1])
    }

    pub fn slabs(&self) -> impl Iterator<Item = Slab> + '_ {
        (0..self.num_slabs()).map(move |n| self.slab(n))
    }

    /// `τ = max_n τ_n`.
    pub fn max_step(&self) -> f64 {
        self.slabs().map(|s| s.len()).fold(0.0, f64::max)
    }

    /// Slab containing `t`; interior nodes belong to the earlier slab.
    pub fn find_slab(&self, t: f64) -> Result<Slab> {
        let first = self.slab(0);
        let last = self.slab(self.num_slabs() - 1);
        if !(first.contains(t) || last.contains(t)) && (t < first.start || t > last.end) {
            return Err(Error::OutsideSlab {
                t,
                start: first.start,
                end: last.end,
            });
        }
        let idx = self.nodes[1..].partition_point(|&node| node < t);
        Ok(self.slab(idx.min(self.num_slabs() - 1)))
    }
}
