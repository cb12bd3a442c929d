//! SU(2)_k label sets, fusion rules and quantum dimensions.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::symbols::SymbolCache;

/// Topological charge, stored as twice its spin so that labels stay integral.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Charge(u32);

impl Charge {
    pub const VACUUM: Charge = Charge(0);
    pub const HALF: Charge = Charge(1);
    pub const ONE: Charge = Charge(2);

    #[inline]
    pub const fn from_twice_spin(twice_spin: u32) -> Self {
        Charge(twice_spin)
    }

    #[inline]
    pub const fn twice_spin(self) -> u32 {
        self.0
    }

    pub fn spin(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    #[inline]
    pub const fn is_vacuum(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Charge({self})")
    }
}

/// The SU(2)_k anyon model at a fixed level, together with its F/R tables.
///
/// Cloning is cheap: the symbol tables are shared.
#[derive(Clone)]
pub struct AnyonModel {
    level: u32,
    symbols: Arc<SymbolCache>,
}

impl fmt::Debug for AnyonModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnyonModel").field("level", &self.level).finish()
    }
}

impl AnyonModel {
    /// Builds the model and its full F/R symbol tables.
    pub fn new(level: u32) -> Result<Self> {
        check_level(level)?;
        let symbols = SymbolCache::build(level);
        Ok(Self {
            level,
            symbols: Arc::new(symbols),
        })
    }

    /// Wraps externally supplied symbol tables (e.g. loaded from disk).
    pub fn with_symbols(symbols: SymbolCache) -> Result<Self> {
        let level = symbols.level();
        check_level(level)?;
        Ok(Self {
            level,
            symbols: Arc::new(symbols),
        })
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    /// π/(k+2).
    pub fn deformation_angle(&self) -> f64 {
        PI / f64::from(self.level + 2)
    }

    pub fn symbols(&self) -> &SymbolCache {
        &self.symbols
    }

    pub fn charge_count(&self) -> usize {
        self.level as usize + 1
    }

    pub fn charges(&self) -> impl Iterator<Item = Charge> + Clone {
        (0..=self.level).map(Charge)
    }

    pub fn charge(&self, twice_spin: u32) -> Result<Charge> {
        let c = Charge(twice_spin);
        self.check(c)?;
        Ok(c)
    }

    pub fn check(&self, c: Charge) -> Result<()> {
        if c.0 > self.level {
            Err(Error::ChargeOutOfRange {
                charge: c,
                level: self.level,
            })
        } else {
            Ok(())
        }
    }

    /// Whether `c` appears in `a ⊗ b`. Out-of-range labels are never admissible.
    #[inline]
    pub fn admissible(&self, a: Charge, b: Charge, c: Charge) -> bool {
        let (a, b, c, k) = (a.0, b.0, c.0, self.level);
        a <= k && b <= k && c <= k && (a + b + c) % 2 == 0 && c >= a.abs_diff(b) && c <= a + b && a + b + c <= 2 * k
    }

    /// Fusion channels of `a ⊗ b` in ascending order.
    pub fn fuse(&self, a: Charge, b: Charge) -> Result<Vec<Charge>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.channels(a, b).collect())
    }

    /// Unchecked channel iterator for labels already known to be valid.
    pub(crate) fn channels(&self, a: Charge, b: Charge) -> impl Iterator<Item = Charge> {
        let lo = a.0.abs_diff(b.0);
        let hi = (a.0 + b.0).min((2 * self.level).saturating_sub(a.0 + b.0));
        (lo..=hi).step_by(2).map(Charge)
    }

    /// q-integer [n] = sin(nπ/(k+2)) / sin(π/(k+2)).
    pub fn q_integer(&self, n: i64) -> f64 {
        let t = self.deformation_angle();
        libm::sin(n as f64 * t) / libm::sin(t)
    }

    /// Quantum dimension d_a = [2a + 1].
    pub fn qdim(&self, a: Charge) -> Result<f64> {
        self.check(a)?;
        Ok(self.q_integer(i64::from(a.0) + 1))
    }

    /// Total quantum dimension squared, Σ d_a².
    pub fn global_dimension_sq(&self) -> f64 {
        self.charges()
            .map(|c| {
                let d = self.q_integer(i64::from(c.0) + 1);
                d * d
            })
            .sum()
    }
}

fn check_level(level: u32) -> Result<()> {
    // Above ~40 the q-factorials lose too much precision to be useful.
    if (2..=40).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}
