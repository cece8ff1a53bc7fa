use crate::error::{require_positive, Error, Result};

/// Physical constants, slice width and regularization of the sliced integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    m0: f64,
    c: f64,
    hbar: f64,
    epsilon: f64,
    eta: f64,
}

impl KernelParams {
    pub fn new(m0: f64, c: f64, hbar: f64, epsilon: f64, eta: f64) -> Result<Self> {
        require_positive("m0", m0)?;
        require_positive("c", c)?;
        require_positive("hbar", hbar)?;
        require_positive("epsilon", epsilon)?;
        if !(eta.is_finite() && (0.0..1.0).contains(&eta)) {
            return Err(Error::param("eta", format!("must lie in [0, 1), got {eta}")));
        }
        Ok(Self {
            m0,
            c,
            hbar,
            epsilon,
            eta,
        })
    }

    /// Natural units `m₀ = c = ħ = 1`.
    pub fn natural(epsilon: f64, eta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, epsilon, eta)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `α = m₀/(2εħ)`
    pub fn alpha(&self) -> f64 {
        self.m0 / (2.0 * self.epsilon * self.hbar)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.m0, self.c, self.hbar, epsilon, self.eta)
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.m0, self.c, self.hbar, self.epsilon, eta)
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.m0, c, self.hbar, self.epsilon, self.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_tracks_epsilon() {
        let p = KernelParams::natural(0.5, 0.0).unwrap();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.with_epsilon(0.25).unwrap().alpha(), 2.0);
    }

    #[test]
    fn validation_names_the_field() {
        for (args, key) in [
            ((-1.0, 1.0, 1.0, 0.1, 0.0), "m0"),
            ((1.0, 0.0, 1.0, 0.1, 0.0), "c"),
            ((1.0, 1.0, f64::NAN, 0.1, 0.0), "hbar"),
            ((1.0, 1.0, 1.0, -0.1, 0.0), "epsilon"),
            ((1.0, 1.0, 1.0, 0.1, 1.0), "eta"),
            ((1.0, 1.0, 1.0, 0.1, -1e-3), "eta"),
        ] {
            match KernelParams::new(args.0, args.1, args.2, args.3, args.4) {
                Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, key),
                other => panic!("expected error for {key}, got {other:?}"),
            }
        }
    }
}
