//! Bundled reference data: CSS code files, malignant-pair matrices with their
//! location censuses, and the regression constants used by the analytic
//! engines. Matrices are stored lower-triangular (row-major, `i ≥ j`) and
//! expanded to symmetric on access.

/// Plain-text [[7,1,3]] code file.
pub const STEANE_CSS: &str = include_str!("../fixtures/steane.css");
/// Plain-text [[9,1,3]] code file.
pub const SHOR9_CSS: &str = include_str!("../fixtures/shor9.css");

/// A 7×7 symmetric malignant-pair matrix plus its location census.
#[derive(Clone, Debug, PartialEq)]
pub struct RefMatrix {
    pub name: &'static str,
    /// Symmetric matrix, indexed by location kind 0..7.
    pub alpha: [[f64; 7]; 7],
    /// Location counts per kind.
    pub census: [usize; 7],
}

impl RefMatrix {
    const fn from_lower(name: &'static str, lower: [[f64; 7]; 7], census: [usize; 7]) -> Self {
        let mut alpha = [[0.0; 7]; 7];
        let mut i = 0;
        while i < 7 {
            let mut j = 0;
            while j < 7 {
                let v = if i >= j { lower[i][j] } else { lower[j][i] };
                alpha[i][j] = v;
                j += 1;
            }
            i += 1;
        }
        RefMatrix { name, alpha, census }
    }

    /// Total number of locations.
    pub fn total(&self) -> usize {
        self.census.iter().sum()
    }
}

/// CNOT rectangle (the largest gadget): 279 locations.
pub const ALPHA_CNOT: RefMatrix = RefMatrix::from_lower(
    "cnot-exrec",
    [
        [43.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 43.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 176.0, 168.0, 0.0, 0.0, 0.0, 0.0],
        [176.0, 0.0, 0.0, 168.0, 0.0, 0.0, 0.0],
        [299.2, 298.7, 570.0, 572.8, 793.4, 0.0, 0.0],
        [49.2, 50.0, 100.0, 100.5, 251.0, 12.8, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [32, 32, 32, 32, 144, 7, 0],
);

/// `|+>`-type logical preparation rectangle (prep + trailing EC): 88 locations.
pub const ALPHA_PREP: RefMatrix = RefMatrix::from_lower(
    "prep-exrec",
    [
        [10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 11.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 25.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [14.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [70.0, 69.9, 81.2, 74.4, 172.2, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [11, 13, 9, 8, 47, 0, 0],
);

/// Z-basis logical measurement rectangle: 75 locations.
pub const ALPHA_MEAS: RefMatrix = RefMatrix::from_lower(
    "meas-exrec",
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [18.0, 0.0, 0.0, 63.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 42.8, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [8, 8, 8, 15, 36, 0, 0],
);

/// Error-correction gadget alone: 68 locations.
pub const ALPHA_EC: RefMatrix = RefMatrix::from_lower(
    "ec-gadget",
    [
        [5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 7.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [7.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [44.0, 42.0, 59.5, 59.0, 130.2, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [8, 8, 8, 8, 36, 0, 0],
);

/// Identity (wait) rectangle: 143 locations.
pub const ALPHA_WAIT: RefMatrix = RefMatrix::from_lower(
    "wait-exrec",
    [
        [14.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 14.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 49.0, 42.0, 0.0, 0.0, 0.0, 0.0],
        [49.0, 0.0, 0.0, 42.0, 0.0, 0.0, 0.0],
        [100.7, 100.7, 181.4, 181.4, 278.6, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [28.0, 28.0, 56.0, 56.0, 148.8, 0.0, 16.4],
    ],
    [16, 16, 16, 16, 72, 0, 7],
);

/// Directly-encoded logical ebit circuit: 319 locations.
pub const ALPHA_EBIT: RefMatrix = RefMatrix::from_lower(
    "ebit-direct",
    [
        [53.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 53.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 189.96, 167.95, 0.0, 0.0, 0.0, 0.0],
        [189.95, 0.0, 0.0, 167.94, 0.0, 0.0, 0.0],
        [360.36, 359.9, 640.91, 646.04, 916.07, 0.0, 0.0],
        [43.73, 44.93, 89.56, 90.08, 231.49, 12.7, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [40, 40, 33, 33, 166, 7, 0],
);

/// Interface (physical-to-logical teleportation + EC): 111 locations.
pub const ALPHA_INTERFACE: RefMatrix = RefMatrix::from_lower(
    "interface",
    [
        [10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [5.0, 18.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [5.0, 39.0, 7.0, 0.0, 0.0, 0.0, 0.0],
        [20.0, 15.0, 15.0, 7.0, 0.0, 0.0, 0.0],
        [92.6, 127.0, 140.3, 137.9, 281.5, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [19.8, 30.9, 35.0, 35.1, 121.6, 0.0, 16.4],
    ],
    [14, 12, 9, 11, 58, 0, 7],
);

/// Logical 4→1 purification stage.
pub const ALPHA_EPP: RefMatrix = RefMatrix::from_lower(
    "epp",
    [
        [102.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 34.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 110.0, 84.0, 0.0, 0.0, 0.0, 0.0],
        [426.0, 0.0, 0.0, 420.0, 0.0, 0.0, 0.0],
        [832.0, 303.0, 500.0, 1626.0, 1634.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    // Census of the whole level-1 purification block, by kind.
    [0, 0, 0, 0, 0, 0, 0],
);

/// Full cat-state parity measurement of a two-block X-type logical: 375+…
pub const ALPHA_CAT: RefMatrix = RefMatrix::from_lower(
    "cat-measurement",
    [
        [249.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 114.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 546.0, 756.0, 0.0, 0.0, 0.0, 0.0],
        [315.0, 0.0, 0.0, 252.0, 0.0, 0.0, 0.0],
        [992.0, 1094.0, 2720.0, 1492.0, 3532.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ],
    [106, 67, 85, 67, 375, 0, 0],
);

/// All bundled matrices.
pub fn all_matrices() -> Vec<&'static RefMatrix> {
    vec![
        &ALPHA_CNOT,
        &ALPHA_PREP,
        &ALPHA_MEAS,
        &ALPHA_EC,
        &ALPHA_WAIT,
        &ALPHA_EBIT,
        &ALPHA_INTERFACE,
        &ALPHA_EPP,
        &ALPHA_CAT,
    ]
}

/// Single-round cat-state gadget census.
pub const CAT_SINGLE_ROUND_CENSUS: [usize; 7] = [14, 1, 7, 1, 15, 0, 0];
/// Single-fault rejection vector for the cat-state gadget.
pub const CAT_REJECTION_VECTOR: [f64; 7] = [14.0, 0.0, 0.0, 1.0, 8.0, 0.0, 0.0];

/// Default per-kind error-rate multipliers σ (kind 6 is configurable).
pub const SIGMA_DEFAULT: [f64; 7] = [
    4.0 / 15.0,
    4.0 / 15.0,
    4.0 / 15.0,
    4.0 / 15.0,
    1.0,
    1.0,
    4.0 / 5.0,
];

/// Conditional distribution of two-block logical error classes after a faulty
/// CNOT rectangle (order: YY, XX, ZZ, XI, IX, ZI, IZ, YI, XZ, ZX, IY, YX, XY,
/// ZY, YZ).
pub const CNOT_ERROR_CLASS_LABELS: [&str; 15] = [
    "YY", "XX", "ZZ", "XI", "IX", "ZI", "IZ", "YI", "XZ", "ZX", "IY", "YX", "XY", "ZY", "YZ",
];
pub const CNOT_ERROR_CLASS_DIST: [f64; 15] = [
    7.21e-5, 9.01e-3, 1.53e-2, 0.161, 0.298, 0.302, 0.160, 2.03e-2, 5.65e-4, 8.52e-3, 1.97e-2,
    1.83e-3, 1.20e-4, 1.65e-3, 1.44e-4,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn censuses_total_correctly() {
        assert_eq!(ALPHA_CNOT.total(), 279);
        assert_eq!(ALPHA_PREP.total(), 88);
        assert_eq!(ALPHA_MEAS.total(), 75);
        assert_eq!(ALPHA_EC.total(), 68);
        assert_eq!(ALPHA_WAIT.total(), 143);
        assert_eq!(ALPHA_EBIT.total(), 319);
        assert_eq!(ALPHA_INTERFACE.total(), 111);
        let cat: usize = CAT_SINGLE_ROUND_CENSUS.iter().sum();
        assert_eq!(cat, 38);
    }

    #[test]
    fn matrices_are_symmetric() {
        for m in all_matrices() {
            for i in 0..7 {
                for j in 0..7 {
                    assert_eq!(m.alpha[i][j], m.alpha[j][i], "{} ({i},{j})", m.name);
                }
            }
        }
    }

    #[test]
    fn error_class_distribution_normalises() {
        let s: f64 = CNOT_ERROR_CLASS_DIST.iter().sum();
        assert!((s - 1.0).abs() < 2e-2, "sum = {s}");
    }
}
