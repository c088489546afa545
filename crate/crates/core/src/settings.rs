/// Numerical knobs shared by the analyses. Defaults match the CLI defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Modulus below which a sampled value counts as a zero.
    pub tol_zero: f64,
    /// Infimum estimate above which a distribution is certified QID.
    pub tol_qid: f64,
    /// Decay tolerance for GRS and tail-growth regressions.
    pub tol_grs: f64,
    /// Scan window for incommensurable atoms; `None` uses `max(1e4, 100 * 2pi / gap)`.
    pub window: Option<f64>,
    /// Tail horizon for moment and weighted-norm finiteness decisions.
    pub horizon: f64,
    /// Bohr averaging horizon; `None` uses `1e4 / gap`.
    pub bohr_horizon: Option<f64>,
    /// Lattice step overriding the distribution's own hint.
    pub lattice: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol_zero: 1e-9,
            tol_qid: 1e-4,
            tol_grs: 1e-3,
            window: None,
            horizon: 1e3,
            bohr_horizon: None,
            lattice: None,
        }
    }
}

impl Settings {
    pub fn with_lattice(mut self, step: f64) -> Self {
        self.lattice = Some(step);
        self
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = Some(window);
        self
    }
}
