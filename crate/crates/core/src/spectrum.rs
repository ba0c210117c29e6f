//! ⅓-octave spectra stored as mean-square pressure per band.

use serde::{Deserialize, Serialize};

/// Airborne reference pressure, Pa.
pub const P_REF: f64 = 20e-6;

/// Level stored for bands without meaningful energy, dB.
pub const SPL_FLOOR_DB: f64 = -100.0;

/// Exact base-2 ⅓-octave centres 1000·2^(n/3) from the 20 Hz to the 20 kHz band.
pub fn third_octave_centers() -> Vec<f64> {
    (-17..=13).map(|n| 1000.0 * 2f64.powf(n as f64 / 3.0)).collect()
}

/// Mean-square pressure from a level.
pub fn db_to_msp(spl: f64, p_ref: f64) -> f64 {
    p_ref * p_ref * 10f64.powf(spl / 10.0)
}

/// Level from a mean-square pressure, floored at [`SPL_FLOOR_DB`].
pub fn msp_to_db(msp: f64, p_ref: f64) -> f64 {
    if msp > 0.0 {
        (10.0 * (msp / (p_ref * p_ref)).log10()).max(SPL_FLOOR_DB)
    } else {
        SPL_FLOOR_DB
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdOctaveSpectrum {
    pub band_centers: Vec<f64>,
    /// Pa² per band
    pub msp: Vec<f64>,
    pub p_ref: f64,
}

impl ThirdOctaveSpectrum {
    /// All bands at the floor level.
    pub fn silent(band_centers: Vec<f64>) -> Self {
        let floor = db_to_msp(SPL_FLOOR_DB, P_REF);
        ThirdOctaveSpectrum {
            msp: vec![floor; band_centers.len()],
            band_centers,
            p_ref: P_REF,
        }
    }

    pub fn from_msp(band_centers: Vec<f64>, msp: Vec<f64>) -> Self {
        assert_eq!(band_centers.len(), msp.len(), "band count mismatch");
        ThirdOctaveSpectrum {
            band_centers,
            msp,
            p_ref: P_REF,
        }
    }

    pub fn from_spl(band_centers: Vec<f64>, spl: &[f64]) -> Self {
        let msp = spl.iter().map(|&l| db_to_msp(l, P_REF)).collect();
        Self::from_msp(band_centers, msp)
    }

    pub fn len(&self) -> usize {
        self.msp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.msp.is_empty()
    }

    /// Per-band levels, dB re `p_ref`.
    pub fn spl(&self) -> Vec<f64> {
        self.msp.iter().map(|&m| msp_to_db(m, self.p_ref)).collect()
    }

    /// Band-integrated mean-square pressure, Pa².
    pub fn total_msp(&self) -> f64 {
        self.msp.iter().sum()
    }

    /// Overall level, dB.
    pub fn ospl(&self) -> f64 {
        msp_to_db(self.total_msp(), self.p_ref)
    }

    /// Energetic (incoherent) sum, band by band.
    pub fn add_assign(&mut self, other: &ThirdOctaveSpectrum) {
        assert_eq!(self.len(), other.len(), "band count mismatch");
        for (m, o) in self.msp.iter_mut().zip(&other.msp) {
            *m += o;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ThirdOctaveSpectrum {
            band_centers: self.band_centers.clone(),
            msp: self.msp.iter().map(|m| m * factor).collect(),
            p_ref: self.p_ref,
        }
    }

    /// Index of the band carrying the most energy.
    pub fn peak_band(&self) -> usize {
        self.msp
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &m)| if m > best.1 { (i, m) } else { best })
            .0
    }
}
