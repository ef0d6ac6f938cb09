//! Continuity and separation moduli tabulated over distance spectra.

use serde::{Deserialize, Serialize};

use crate::maps::TotalMap;
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub delta: Scalar,
    pub epsilon: Scalar,
}

/// Rows sorted by `delta` ascending, with `epsilon` nondecreasing.
///
/// A continuity table row `(δ, ε)` says the map sends δ-close points to
/// ε-close points, with ε as small as possible. A separation table row
/// `(δ, ε)` says δ-close image points have point-inverses whose union has
/// diameter at most ε, again with ε minimal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub rows: Vec<ModulusRow>,
}

impl ModulusTable {
    /// Tabulates `δ ↦ max{value(p) : key(p) ≤ δ}` over the given spectrum.
    fn tabulate(spectrum: Vec<Scalar>, mut entries: Vec<(Scalar, Scalar)>) -> ModulusTable {
        entries.sort();
        let mut rows = Vec::with_capacity(spectrum.len());
        let mut running = Scalar::zero();
        let mut k = 0;
        for delta in spectrum {
            while k < entries.len() && entries[k].0 <= delta {
                if entries[k].1 > running {
                    running = entries[k].1.clone();
                }
                k += 1;
            }
            rows.push(ModulusRow {
                delta,
                epsilon: running.clone(),
            });
        }
        ModulusTable { rows }
    }

    /// Smallest ε valid for `delta` (interpolating down to the nearest row).
    pub fn epsilon_at(&self, delta: &Scalar) -> Scalar {
        self.rows
            .iter()
            .take_while(|r| r.delta <= *delta)
            .last()
            .map(|r| r.epsilon.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Whether the map is `(δ, ε)`-continuous (or separating, for separation tables).
    pub fn holds(&self, delta: &Scalar, epsilon: &Scalar) -> bool {
        self.epsilon_at(delta) <= *epsilon
    }

    /// Largest tabulated positive δ whose ε is at most `epsilon`.
    pub fn largest_delta_for(&self, epsilon: &Scalar) -> Option<Scalar> {
        self.rows
            .iter()
            .filter(|r| r.delta.is_positive() && r.epsilon <= *epsilon)
            .map(|r| r.delta.clone())
            .last()
    }

    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].delta < w[1].delta && w[0].epsilon <= w[1].epsilon)
    }
}

fn spectrum_with_zero(m: &FiniteMetricSpace) -> Vec<Scalar> {
    let mut s = m.spectrum();
    if s.first().map_or(true, |d| !d.is_zero()) {
        s.insert(0, Scalar::zero());
    }
    s
}

/// Continuity modulus of `f: source → target`, over the source spectrum (with 0).
pub fn continuity_modulus(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    f: &TotalMap,
) -> ModulusTable {
    let entries = source
        .pairs()
        .map(|(i, j)| (source.d(i, j).clone(), target.d(f.apply(i), f.apply(j)).clone()))
        .collect();
    ModulusTable::tabulate(spectrum_with_zero(source), entries)
}

/// Separation modulus of `f: source → target`, over the spectrum (with 0) of
/// the image subspace.
pub fn separation_modulus(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    f: &TotalMap,
) -> ModulusTable {
    let image: Vec<usize> = f.image().into_iter().collect();
    let spectrum = spectrum_with_zero(&target.restrict(&image));
    let entries = source
        .pairs()
        .map(|(i, j)| (target.d(f.apply(i), f.apply(j)).clone(), source.d(i, j).clone()))
        .collect();
    ModulusTable::tabulate(spectrum, entries)
}
