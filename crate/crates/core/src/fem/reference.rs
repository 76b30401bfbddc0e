//! Degree-`p` Lagrange element on the reference triangle `(0,0), (1,0), (0,1)`.
//!
//! Nodes form the principal lattice `λ = (i0, i1, i2) / p`. The nodal basis
//! is written in Silvester's product form
//!
//! ```text
//! φ_(i0,i1,i2) = R_i0(λ0) R_i1(λ1) R_i2(λ2),   R_m(λ) = Π_{l<m} (pλ - l) / (l + 1),
//! ```
//!
//! which needs no Vandermonde inversion and stays exact on the lattice.

/// Reference coordinates `ξ = (λ1, λ2)`, `λ0 = 1 - ξ1 - ξ2`.
pub type RefPoint = [f64; 2];

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    p: usize,
    /// Lattice multi-indices, one per local node.
    nodes: Vec<[usize; 3]>,
    /// Monomial coefficients of `R_m`, `m = 0..=p`.
    factors: Vec<Vec<f64>>,
}

/// Basis values and reference-coordinate derivatives at one point.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    /// Reference Hessians `[d11, d12, d22]`.
    pub hessians: Vec<[f64; 3]>,
}

impl ReferenceElement {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        // Vertices first, then edges (edge k opposite vertex k), then interior.
        let mut nodes = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        for k in 0..3 {
            let a = (k + 1) % 3;
            let b = (k + 2) % 3;
            for m in 1..p {
                let mut idx = [0; 3];
                idx[a] = p - m;
                idx[b] = m;
                nodes.push(idx);
            }
        }
        for i1 in 1..p {
            for i2 in 1..p {
                if i1 + i2 < p {
                    nodes.push([p - i1 - i2, i1, i2]);
                }
            }
        }
        let pf = p as f64;
        let mut factors = vec![vec![1.0]];
        for m in 1..=p {
            let prev = &factors[m - 1];
            let l = (m - 1) as f64;
            // multiply by (p λ - l) / (l + 1)
            let mut next = vec![0.0; m + 1];
            for (k, c) in prev.iter().enumerate() {
                next[k + 1] += c * pf / (l + 1.0);
                next[k] -= c * l / (l + 1.0);
            }
            factors.push(next);
        }
        Self { p, nodes, factors }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[usize; 3]] {
        &self.nodes
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node_barycentric(&self, i: usize) -> [f64; 3] {
        let n = self.nodes[i];
        let p = self.p as f64;
        [n[0] as f64 / p, n[1] as f64 / p, n[2] as f64 / p]
    }

    pub fn node_reference(&self, i: usize) -> RefPoint {
        let l = self.node_barycentric(i);
        [l[1], l[2]]
    }

    fn factor(&self, m: usize, lam: f64) -> [f64; 3] {
        let c = &self.factors[m];
        let mut v = 0.0;
        let mut d = 0.0;
        let mut dd = 0.0;
        for k in (0..c.len()).rev() {
            dd = dd * lam + 2.0 * d;
            d = d * lam + v;
            v = v * lam + c[k];
        }
        [v, d, dd]
    }

    /// Values of all basis functions at a barycentric point.
    pub fn values_at(&self, lam: [f64; 3]) -> Vec<f64> {
        self.tabulate(lam).values
    }

    /// Values, gradients and Hessians with respect to `ξ` at a barycentric point.
    pub fn tabulate(&self, lam: [f64; 3]) -> BasisTable {
        let p = self.p;
        let mut f = vec![[[0.0; 3]; 3]; p + 1];
        for (m, fm) in f.iter_mut().enumerate() {
            for a in 0..3 {
                fm[a] = self.factor(m, lam[a]);
            }
        }
        // dλ/dξ rows: λ0 -> (-1,-1), λ1 -> (1,0), λ2 -> (0,1)
        const G: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        let n = self.nodes.len();
        let mut values = Vec::with_capacity(n);
        let mut grads = Vec::with_capacity(n);
        let mut hessians = Vec::with_capacity(n);
        for idx in &self.nodes {
            let r = [f[idx[0]][0], f[idx[1]][1], f[idx[2]][2]];
            let val = r[0][0] * r[1][0] * r[2][0];
            let mut dl = [0.0; 3];
            let mut hl = [[0.0; 3]; 3];
            for a in 0..3 {
                let others: f64 = (0..3).filter(|&b| b != a).map(|b| r[b][0]).product();
                dl[a] = r[a][1] * others;
                hl[a][a] = r[a][2] * others;
                for b in 0..3 {
                    if b != a {
                        let c = 3 - a - b;
                        hl[a][b] = r[a][1] * r[b][1] * r[c][0];
                    }
                }
            }
            let mut g = [0.0; 2];
            for a in 0..3 {
                g[0] += dl[a] * G[a][0];
                g[1] += dl[a] * G[a][1];
            }
            let mut h = [0.0; 3];
            for a in 0..3 {
                for b in 0..3 {
                    h[0] += G[a][0] * hl[a][b] * G[b][0];
                    h[1] += G[a][0] * hl[a][b] * G[b][1];
                    h[2] += G[a][1] * hl[a][b] * G[b][1];
                }
            }
            values.push(val);
            grads.push(g);
            hessians.push(h);
        }
        BasisTable {
            values,
            grads,
            hessians,
        }
    }
}
