//! F (quantum 6j) and R symbols of SU(2)_k, and their consistency checks.
//!
//! Conventions:
//!
//! * `[F^{abc}_d]_{ef}` is the coefficient in
//!   `|((ab)_e c)_d⟩ = Σ_f [F^{abc}_d]_{ef} |(a(bc)_f)_d⟩`, computed from the
//!   Racah sum over q-factorials with q = exp(iπ/(k+2)):
//!   `[F^{abc}_d]_{ef} = (-1)^{a+b+c+d} √([2e+1][2f+1]) {a b e; c d f}_q`.
//! * `R^{ab}_c = (-1)^{a+b-c} exp(iπ [c(c+1) - a(a+1) - b(b+1)] / (k+2))`.
//!
//! Both are evaluated once per model and stored in flat tables.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::model::Charge;

/// One F block: rows are the `e` channels, columns the `f` channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FBlock {
    pub rows: Vec<Charge>,
    pub cols: Vec<Charge>,
    pub matrix: CMatrix,
}

impl FBlock {
    pub fn row_index(&self, e: Charge) -> Option<usize> {
        self.rows.iter().position(|&x| x == e)
    }

    pub fn col_index(&self, f: Charge) -> Option<usize> {
        self.cols.iter().position(|&x| x == f)
    }

    pub fn entry(&self, e: Charge, f: Charge) -> C64 {
        match (self.row_index(e), self.col_index(f)) {
            (Some(r), Some(c)) => self.matrix[(r, c)],
            _ => ZERO,
        }
    }
}

/// Memoized F and R symbols for one level.
///
/// Built once, read-only afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCache {
    level: u32,
    f_blocks: Vec<Option<FBlock>>,
    r_values: Vec<Option<C64>>,
}

/// Admissibility test that does not need an `AnyonModel`.
#[inline]
fn adm(k: u32, a: u32, b: u32, c: u32) -> bool {
    a <= k
        && b <= k
        && c <= k
        && (a + b + c).is_multiple_of(2)
        && c >= a.abs_diff(b)
        && c <= a + b
        && a + b + c <= 2 * k
}

fn channels(k: u32, a: u32, b: u32) -> impl Iterator<Item = u32> {
    let lo = a.abs_diff(b);
    let hi = (a + b).min((2 * k).saturating_sub(a + b));
    (lo..=hi).step_by(2)
}

struct QFactorials {
    level: u32,
    table: Vec<f64>,
}

impl QFactorials {
    fn new(level: u32) -> Self {
        let t = PI / f64::from(level + 2);
        let s = libm::sin(t);
        let n_max = 2 * level as usize + 4;
        let mut table = vec![1.0; n_max + 1];
        for n in 1..=n_max {
            let qn = libm::sin(n as f64 * t) / s;
            table[n] = table[n - 1] * qn;
        }
        // [k+2] vanishes; kill rounding noise in everything downstream.
        for v in table.iter_mut().skip(level as usize + 2) {
            *v = 0.0;
        }
        Self { level, table }
    }

    fn fact(&self, n: i64) -> f64 {
        debug_assert!(n >= 0);
        self.table[n as usize]
    }

    fn qint(&self, n: i64) -> f64 {
        let t = PI / f64::from(self.level + 2);
        libm::sin(n as f64 * t) / libm::sin(t)
    }

    /// Triangle coefficient Δ(a,b,c), arguments as twice-spins.
    fn delta(&self, a: u32, b: u32, c: u32) -> f64 {
        let (a, b, c) = (i64::from(a), i64::from(b), i64::from(c));
        let num = self.fact((a + b - c) / 2) * self.fact((a - b + c) / 2) * self.fact((-a + b + c) / 2);
        let den = self.fact((a + b + c) / 2 + 1);
        libm::sqrt(num / den)
    }

    /// Quantum 6j symbol {a b e; c d f}_q, all labels twice-spins.
    fn six_j(&self, a: u32, b: u32, e: u32, c: u32, d: u32, f: u32) -> f64 {
        let tri = [
            i64::from(a + b + e) / 2,
            i64::from(c + d + e) / 2,
            i64::from(a + d + f) / 2,
            i64::from(b + c + f) / 2,
        ];
        let quad = [
            i64::from(a + b + c + d) / 2,
            i64::from(a + c + e + f) / 2,
            i64::from(b + d + e + f) / 2,
        ];
        let z_lo = *tri.iter().max().unwrap();
        let z_hi = *quad.iter().min().unwrap();
        let mut sum = 0.0;
        for z in z_lo..=z_hi {
            let num = self.fact(z + 1);
            if num == 0.0 {
                continue;
            }
            let den: f64 = tri.iter().map(|&t| self.fact(z - t)).product::<f64>()
                * quad.iter().map(|&q| self.fact(q - z)).product::<f64>();
            debug_assert!(den != 0.0);
            let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * num / den;
        }
        self.delta(a, b, e) * self.delta(c, d, e) * self.delta(a, d, f) * self.delta(b, c, f) * sum
    }
}

impl SymbolCache {
    pub fn build(level: u32) -> Self {
        let k = level;
        let n = k as usize + 1;
        let qf = QFactorials::new(k);
        let mut f_blocks = vec![None; n * n * n * n];
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    for d in 0..=k {
                        let rows: Vec<u32> = channels(k, a, b).filter(|&e| adm(k, e, c, d)).collect();
                        let cols: Vec<u32> = channels(k, b, c).filter(|&f| adm(k, a, f, d)).collect();
                        if rows.is_empty() || cols.is_empty() {
                            continue;
                        }
                        let sign = if ((a + b + c + d) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                        let matrix = CMatrix::from_fn(rows.len(), cols.len(), |r, col| {
                            let (e, f) = (rows[r], cols[col]);
                            let norm = libm::sqrt(qf.qint(i64::from(e) + 1) * qf.qint(i64::from(f) + 1));
                            C64::new(sign * norm * qf.six_j(a, b, e, c, d, f), 0.0)
                        });
                        f_blocks[Self::f_key(k, a, b, c, d)] = Some(FBlock {
                            rows: rows.into_iter().map(Charge::from_twice_spin).collect(),
                            cols: cols.into_iter().map(Charge::from_twice_spin).collect(),
                            matrix,
                        });
                    }
                }
            }
        }

        let mut r_values = vec![None; n * n * n];
        for a in 0..=k {
            for b in 0..=k {
                for c in channels(k, a, b) {
                    r_values[Self::r_key(k, a, b, c)] = Some(r_formula(k, a, b, c));
                }
            }
        }
        Self {
            level,
            f_blocks,
            r_values,
        }
    }

    #[inline]
    fn f_key(k: u32, a: u32, b: u32, c: u32, d: u32) -> usize {
        let n = k as usize + 1;
        ((a as usize * n + b as usize) * n + c as usize) * n + d as usize
    }

    #[inline]
    fn r_key(k: u32, a: u32, b: u32, c: u32) -> usize {
        let n = k as usize + 1;
        (a as usize * n + b as usize) * n + c as usize
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    fn in_range(&self, labels: &[Charge]) -> bool {
        labels.iter().all(|c| c.twice_spin() <= self.level)
    }

    /// The F block `F^{abc}_d`, or `None` when no admissible (e, f) exists.
    pub fn f_block(&self, a: Charge, b: Charge, c: Charge, d: Charge) -> Option<&FBlock> {
        if !self.in_range(&[a, b, c, d]) {
            return None;
        }
        let key = Self::f_key(
            self.level,
            a.twice_spin(),
            b.twice_spin(),
            c.twice_spin(),
            d.twice_spin(),
        );
        self.f_blocks[key].as_ref()
    }

    /// `[F^{abc}_d]_{ef}`, zero when any vertex is inadmissible.
    #[inline]
    pub fn f(&self, a: Charge, b: Charge, c: Charge, d: Charge, e: Charge, f: Charge) -> C64 {
        self.f_block(a, b, c, d).map_or(ZERO, |blk| blk.entry(e, f))
    }

    /// `R^{ab}_c`, or `None` if `c ∉ a ⊗ b`.
    #[inline]
    pub fn r(&self, a: Charge, b: Charge, c: Charge) -> Option<C64> {
        if !self.in_range(&[a, b, c]) {
            return None;
        }
        self.r_values[Self::r_key(self.level, a.twice_spin(), b.twice_spin(), c.twice_spin())]
    }

    pub fn f_blocks(&self) -> impl Iterator<Item = ([Charge; 4], &FBlock)> {
        let k = self.level;
        let n = k + 1;
        self.f_blocks.iter().enumerate().filter_map(move |(idx, blk)| {
            let blk = blk.as_ref()?;
            let idx = idx as u32;
            let d = idx % n;
            let c = (idx / n) % n;
            let b = (idx / (n * n)) % n;
            let a = idx / (n * n * n);
            Some(([a, b, c, d].map(Charge::from_twice_spin), blk))
        })
    }

    pub fn r_values(&self) -> impl Iterator<Item = ([Charge; 3], C64)> + '_ {
        let n = self.level + 1;
        self.r_values.iter().enumerate().filter_map(move |(idx, r)| {
            let r = (*r)?;
            let idx = idx as u32;
            let c = idx % n;
            let b = (idx / n) % n;
            let a = idx / (n * n);
            Some(([a, b, c].map(Charge::from_twice_spin), r))
        })
    }

    /// Reassembles a cache from exported tables, checking that the label
    /// structure matches SU(2)_k and that every block is unitary (1e-10) and
    /// every R value is a phase (1e-12).
    pub fn from_tables(
        level: u32,
        f_blocks: impl IntoIterator<Item = ([Charge; 4], FBlock)>,
        r_values: impl IntoIterator<Item = ([Charge; 3], C64)>,
    ) -> Result<Self> {
        let reference = Self::build_structure(level);
        let mut cache = Self {
            level,
            f_blocks: vec![None; reference.f_blocks.len()],
            r_values: vec![None; reference.r_values.len()],
        };
        let bad = |msg: &str| Error::Target(alloc::format!("symbol table rejected: {msg}"));
        for (labels, blk) in f_blocks {
            if !cache.in_range(&labels) {
                return Err(bad("F label out of range"));
            }
            let [a, b, c, d] = labels.map(Charge::twice_spin);
            let key = Self::f_key(level, a, b, c, d);
            match &reference.f_blocks[key] {
                Some(shape) if shape.rows == blk.rows && shape.cols == blk.cols => {}
                _ => return Err(bad("F block has the wrong channel structure")),
            }
            if !blk.matrix.is_unitary(1e-10) {
                return Err(bad("F block is not unitary"));
            }
            cache.f_blocks[key] = Some(blk);
        }
        for (labels, r) in r_values {
            if !cache.in_range(&labels) {
                return Err(bad("R label out of range"));
            }
            let [a, b, c] = labels.map(Charge::twice_spin);
            if !adm(level, a, b, c) {
                return Err(bad("R label is not admissible"));
            }
            if (r.norm() - 1.0).abs() > 1e-12 {
                return Err(bad("R value is not a phase"));
            }
            cache.r_values[Self::r_key(level, a, b, c)] = Some(r);
        }
        if cache
            .f_blocks
            .iter()
            .zip(&reference.f_blocks)
            .any(|(x, y)| x.is_some() != y.is_some())
            || cache
                .r_values
                .iter()
                .zip(&reference.r_values)
                .any(|(x, y)| x.is_some() != y.is_some())
        {
            return Err(bad("tables are incomplete"));
        }
        Ok(cache)
    }

    /// Channel structure only; matrices are left empty.
    fn build_structure(level: u32) -> Self {
        let k = level;
        let n = k as usize + 1;
        let mut f_blocks = vec![None; n * n * n * n];
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    for d in 0..=k {
                        let rows: Vec<Charge> = channels(k, a, b)
                            .filter(|&e| adm(k, e, c, d))
                            .map(Charge::from_twice_spin)
                            .collect();
                        let cols: Vec<Charge> = channels(k, b, c)
                            .filter(|&f| adm(k, a, f, d))
                            .map(Charge::from_twice_spin)
                            .collect();
                        if !rows.is_empty() && !cols.is_empty() {
                            f_blocks[Self::f_key(k, a, b, c, d)] = Some(FBlock {
                                rows,
                                cols,
                                matrix: CMatrix::zeros(0, 0),
                            });
                        }
                    }
                }
            }
        }
        let mut r_values = vec![None; n * n * n];
        for a in 0..=k {
            for b in 0..=k {
                for c in channels(k, a, b) {
                    r_values[Self::r_key(k, a, b, c)] = Some(ZERO);
                }
            }
        }
        Self {
            level,
            f_blocks,
            r_values,
        }
    }

    /// Adds `delta` to one F entry. Only meant for negative controls: the
    /// result no longer satisfies the pentagon equation.
    pub fn perturb_f(&mut self, labels: [Charge; 4], row: usize, col: usize, delta: C64) -> Result<()> {
        let [a, b, c, d] = labels;
        let key = Self::f_key(
            self.level,
            a.twice_spin(),
            b.twice_spin(),
            c.twice_spin(),
            d.twice_spin(),
        );
        let blk = self
            .f_blocks
            .get_mut(key)
            .and_then(Option::as_mut)
            .ok_or(Error::EmptyFBlock { a, b, c, d })?;
        if row >= blk.matrix.rows() || col >= blk.matrix.cols() {
            return Err(Error::DimensionMismatch {
                expected: blk.matrix.rows(),
                found: row.max(col),
            });
        }
        blk.matrix[(row, col)] += delta;
        Ok(())
    }

    /// Largest deviation of any stored F block from unitarity.
    pub fn max_f_unitarity_residual(&self) -> f64 {
        self.f_blocks
            .iter()
            .flatten()
            .map(|b| b.matrix.unitarity_residual())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any stored |R| from one.
    pub fn max_r_modulus_residual(&self) -> f64 {
        self.r_values
            .iter()
            .flatten()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Maximum residual of the pentagon equation
    /// `[F^{fcd}_e]_{gl} [F^{abl}_e]_{fk} = Σ_h [F^{abc}_g]_{fh} [F^{ahd}_e]_{gk} [F^{bcd}_k]_{hl}`
    /// over all label tuples.
    pub fn pentagon_residual(&self) -> f64 {
        let k = self.level;
        let ch = |x: u32| Charge::from_twice_spin(x);
        let mut worst: f64 = 0.0;
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    for d in 0..=k {
                        for e in 0..=k {
                            for f in channels(k, a, b) {
                                for g in channels(k, f, c).filter(|&g| adm(k, g, d, e)) {
                                    for l in channels(k, c, d).filter(|&l| adm(k, f, l, e)) {
                                        for kk in channels(k, b, l).filter(|&x| adm(k, a, x, e)) {
                                            let lhs = self.f(ch(f), ch(c), ch(d), ch(e), ch(g), ch(l))
                                                * self.f(ch(a), ch(b), ch(l), ch(e), ch(f), ch(kk));
                                            let rhs: C64 = channels(k, b, c)
                                                .map(|h| {
                                                    self.f(ch(a), ch(b), ch(c), ch(g), ch(f), ch(h))
                                                        * self.f(ch(a), ch(h), ch(d), ch(e), ch(g), ch(kk))
                                                        * self.f(ch(b), ch(c), ch(d), ch(kk), ch(h), ch(l))
                                                })
                                                .sum();
                                            worst = worst.max((lhs - rhs).norm());
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Maximum residual of both hexagon equations,
    /// `R^{ca}_e [F^{acb}_d]_{eg} R^{cb}_g = Σ_f [F^{cab}_d]_{ef} R^{cf}_d [F^{abc}_d]_{fg}`
    /// and the same with every R replaced by its inverse.
    pub fn hexagon_residual(&self) -> f64 {
        let k = self.level;
        let ch = |x: u32| Charge::from_twice_spin(x);
        let r = |a: u32, b: u32, c: u32| self.r(ch(a), ch(b), ch(c)).unwrap_or(ZERO);
        let mut worst: f64 = 0.0;
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    for d in 0..=k {
                        for e in channels(k, c, a).filter(|&e| adm(k, e, b, d)) {
                            for g in channels(k, c, b).filter(|&g| adm(k, a, g, d)) {
                                let fl = self.f(ch(a), ch(c), ch(b), ch(d), ch(e), ch(g));
                                let mut rhs = ZERO;
                                let mut rhs_inv = ZERO;
                                for f in channels(k, a, b).filter(|&f| adm(k, c, f, d)) {
                                    let t1 = self.f(ch(c), ch(a), ch(b), ch(d), ch(e), ch(f));
                                    let t2 = self.f(ch(a), ch(b), ch(c), ch(d), ch(f), ch(g));
                                    rhs += t1 * r(c, f, d) * t2;
                                    rhs_inv += t1 * r(c, f, d).conj() * t2;
                                }
                                let lhs = r(c, a, e) * fl * r(c, b, g);
                                let lhs_inv = r(c, a, e).conj() * fl * r(c, b, g).conj();
                                worst = worst.max((lhs - rhs).norm()).max((lhs_inv - rhs_inv).norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

fn r_formula(k: u32, a: u32, b: u32, c: u32) -> C64 {
    let (a, b, c) = (i64::from(a), i64::from(b), i64::from(c));
    let sign = if ((a + b - c) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let casimir = c * (c + 2) - a * (a + 2) - b * (b + 2);
    let angle = PI * casimir as f64 / (4.0 * f64::from(k + 2));
    C64::from_polar(sign, angle)
}

/// Multiplicative order of `R^{ab}_c` as a root of unity.
///
/// `R^{ab}_c = exp(iπ N / D)` with integers `N`, `D = 4(k+2)`, so the order is
/// `2D / gcd(N mod 2D, 2D)`.
pub fn r_symbol_order(level: u32, a: Charge, b: Charge, c: Charge) -> Option<u64> {
    let (k, a, b, c) = (level, a.twice_spin(), b.twice_spin(), c.twice_spin());
    if !adm(k, a, b, c) {
        return None;
    }
    let (ai, bi, ci) = (i64::from(a), i64::from(b), i64::from(c));
    let d = 4 * i64::from(k + 2);
    let s = (ai + bi - ci) / 2;
    let n = ci * (ci + 2) - ai * (ai + 2) - bi * (bi + 2) + d * s;
    let two_d = 2 * d;
    let r = n.rem_euclid(two_d);
    Some((two_d / gcd(r, two_d)) as u64)
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}
