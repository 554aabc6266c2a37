//! The polytropic particle-density law `Φ(E, F) = Ψ(E) Fᵏ`.

use alloc::vec::Vec;

use crate::interp::{hermite, locate, monotone_slopes};
use crate::{Error, Result};

/// Energy profile Ψ. Every variant vanishes for `E ≥ E₀`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiVariant {
    /// `Ψ(E) = c·E·(E₀² − E²)₊^μ`
    EnergyWeighted,
    /// `Ψ(E) = c·(E₀ − E)₊^μ`
    PlainPowerLaw,
    /// Ψ sampled on an energy grid ending at `E₀`, interpolated by monotone cubics.
    Tabulated(PsiTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable {
    energies: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PsiTable {
    pub fn new(energies: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 || energies.len() != values.len() {
            return Err(Error::InvalidAnsatz("table needs at least two (energy, value) pairs of equal length"));
        }
        if !(energies[0] >= 0.0) || energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidAnsatz("table energies must be non-negative and strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidAnsatz("table values must be finite and non-negative"));
        }
        let slopes = monotone_slopes(&energies, &values);
        Ok(Self { energies, values, slopes })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cutoff(&self) -> f64 {
        self.energies[self.energies.len() - 1]
    }

    fn eval(&self, e: f64) -> f64 {
        if e >= self.cutoff() {
            return 0.0;
        }
        if e <= self.energies[0] {
            return self.values[0];
        }
        let i = locate(&self.energies, e);
        let (v, _) = hermite(
            self.energies[i],
            self.energies[i + 1],
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            e,
        );
        v.max(0.0)
    }

    /// `eval` given the gap `E₀ − e` computed without cancellation. The last segment is
    /// evaluated in the distance from its right end.
    fn eval_near_cutoff(&self, e: f64, gap: f64) -> f64 {
        let n = self.energies.len();
        if !(gap > 0.0) {
            return 0.0;
        }
        if e < self.energies[n - 2] {
            return self.eval(e);
        }
        let h = self.cutoff() - self.energies[n - 2];
        let s = gap / h;
        let r = 1.0 - s;
        // Hermite basis with t = 1 − s
        let v = s * s * (3.0 - 2.0 * s) * self.values[n - 2]
            + r * r * (1.0 + 2.0 * s) * self.values[n - 1]
            + h * s * s * r * self.slopes[n - 2]
            - h * s * r * r * self.slopes[n - 1];
        v.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytropicAnsatz {
    /// Angular-momentum exponent, `k > −1/2`.
    pub k: f64,
    /// Energy exponent at the cutoff, `μ > −1`. For tabulated Ψ it is only
    /// used by the finite-radius window and limits.
    pub mu: f64,
    /// Cutoff energy E₀.
    pub e0: f64,
    /// Multiplicative constant (c or c_*).
    pub amplitude: f64,
    pub variant: PsiVariant,
}

impl PolytropicAnsatz {
    pub fn new(k: f64, mu: f64, e0: f64, amplitude: f64, variant: PsiVariant) -> Result<Self> {
        if !(k > -0.5) {
            return Err(Error::InvalidAnsatz("k must exceed -1/2"));
        }
        if !(mu > -1.0) {
            return Err(Error::InvalidAnsatz("mu must exceed -1"));
        }
        if !(e0 > 0.0) || !e0.is_finite() {
            return Err(Error::InvalidAnsatz("E0 must be positive"));
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidAnsatz("amplitude must be non-negative"));
        }
        if let PsiVariant::Tabulated(table) = &variant {
            if table.cutoff() != e0 {
                return Err(Error::InvalidAnsatz("tabulated Psi must end at E0"));
            }
        }
        Ok(Self { k, mu, e0, amplitude, variant })
    }

    pub fn energy_weighted(k: f64, mu: f64, e0: f64, amplitude: f64) -> Result<Self> {
        Self::new(k, mu, e0, amplitude, PsiVariant::EnergyWeighted)
    }

    pub fn plain_power_law(k: f64, mu: f64, e0: f64, amplitude: f64) -> Result<Self> {
        Self::new(k, mu, e0, amplitude, PsiVariant::PlainPowerLaw)
    }

    /// Tabulated Ψ; `E₀` is the last grid energy.
    pub fn tabulated(k: f64, mu: f64, table: PsiTable, amplitude: f64) -> Result<Self> {
        let e0 = table.cutoff();
        Self::new(k, mu, e0, amplitude, PsiVariant::Tabulated(table))
    }

    pub fn psi(&self, e: f64) -> f64 {
        if !(e < self.e0) || self.amplitude == 0.0 {
            return 0.0;
        }
        match &self.variant {
            PsiVariant::EnergyWeighted => self.amplitude * e * libm::pow(self.e0 * self.e0 - e * e, self.mu),
            PsiVariant::PlainPowerLaw => self.amplitude * libm::pow(self.e0 - e, self.mu),
            PsiVariant::Tabulated(t) => self.amplitude * t.eval(e),
        }
    }

    /// `Φ(E, F) = Ψ(E) Fᵏ`.
    pub fn density(&self, e: f64, f: f64) -> f64 {
        let psi = self.psi(e);
        if psi == 0.0 {
            return 0.0;
        }
        psi * libm::pow(f, self.k)
    }

    /// Exponent `b` of the `(E₀² − E²)ᵇ` factor pulled out of Ψ(E)/E.
    pub(crate) fn edge_exponent(&self) -> f64 {
        match self.variant {
            PsiVariant::Tabulated(_) => 0.0,
            _ => self.mu,
        }
    }

    /// `Ψ(E) / (E (E₀² − E²)ᵇ)` for `E < E₀`; bounded and smooth for the analytic variants.
    /// `gap2 = E₀² − E²` is supplied by the caller to avoid cancellation near the cutoff.
    pub(crate) fn reduced_psi(&self, e: f64, gap2: f64) -> f64 {
        match &self.variant {
            PsiVariant::EnergyWeighted => self.amplitude,
            PsiVariant::PlainPowerLaw => self.amplitude / (libm::pow(self.e0 + e, self.mu) * e),
            PsiVariant::Tabulated(t) => self.amplitude * t.eval_near_cutoff(e, gap2 / (self.e0 + e)) / e,
        }
    }

    /// Energies where Ψ is only C¹ (interior table nodes); empty for the analytic variants.
    pub(crate) fn knots(&self) -> &[f64] {
        match &self.variant {
            PsiVariant::Tabulated(t) => &t.energies[..t.energies.len() - 1],
            _ => &[],
        }
    }

    pub fn is_vacuum_source(&self) -> bool {
        self.amplitude == 0.0
    }

    /// The ansatz seen by the shifted field `φ − a`: `Φ̃(Ẽ, F̃) = e^{(4+2k)a} Ψ(eᵃẼ) F̃ᵏ`
    /// with cutoff `E₀e^{−a}`.
    pub fn shifted(&self, a: f64) -> Self {
        let s = libm::exp(a);
        let base = libm::exp((4.0 + 2.0 * self.k) * a);
        let (amplitude, variant) = match &self.variant {
            PsiVariant::EnergyWeighted => {
                (self.amplitude * base * s * libm::pow(s, 2.0 * self.mu), PsiVariant::EnergyWeighted)
            }
            PsiVariant::PlainPowerLaw => (self.amplitude * base * libm::pow(s, self.mu), PsiVariant::PlainPowerLaw),
            PsiVariant::Tabulated(t) => {
                let energies: Vec<f64> = t.energies.iter().map(|e| e / s).collect();
                let table = PsiTable::new(energies, t.values.clone()).expect("scaled table stays valid");
                (self.amplitude * base, PsiVariant::Tabulated(table))
            }
        };
        Self { k: self.k, mu: self.mu, e0: self.e0 / s, amplitude, variant }
    }
}
