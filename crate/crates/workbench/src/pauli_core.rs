//! Exact symplectic Pauli algebra and stabilizer tableau simulation.
//!
//! Operators are Hermitian Pauli strings with a tracked ±1 sign; `Y` is stored
//! as `x=1, z=1` with the sign absorbing the `i` factor (the stored operator
//! for bits `(x, z)` on one qubit is `i^{x·z} X^x Z^z`, which is Hermitian).
//! All circuits handled here are real-Clifford plus measurement, so a ±i phase
//! never survives to an observable.

use std::fmt;
use thiserror::Error;

/// Errors produced by this module.
#[derive(Debug, Error)]
pub enum PauliError {
    #[error("qubit-count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("forced outcome {forced} contradicts deterministic outcome {actual}")]
    ForcedOutcomeContradiction { forced: u8, actual: u8 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid CSS code: {0}")]
    InvalidCode(String),
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A Hermitian Pauli operator on `n` qubits with a ±1 sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// `true` means overall sign −1.
    neg: bool,
}

impl PauliString {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, x: vec![0; w], z: vec![0; w], neg: false }
    }

    /// Single-qubit X/Y/Z embedded at `qubit`.
    pub fn single(n: usize, qubit: usize, axis: Axis) -> Self {
        let mut p = Self::identity(n);
        match axis {
            Axis::X => p.set_x(qubit, true),
            Axis::Z => p.set_z(qubit, true),
            Axis::Y => {
                p.set_x(qubit, true);
                p.set_z(qubit, true);
            }
        }
        p
    }

    /// Parse a string over `I X Y Z`, optionally prefixed by `+` or `-`.
    pub fn parse(s: &str) -> Result<Self, PauliError> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let mut p = Self::identity(body.chars().count());
        for (i, c) in body.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.set_x(i, true),
                'Z' => p.set_z(i, true),
                'Y' => {
                    p.set_x(i, true);
                    p.set_z(i, true);
                }
                other => {
                    return Err(PauliError::Parse {
                        line: 0,
                        msg: format!("unexpected character {other:?} in Pauli string"),
                    })
                }
            }
        }
        p.neg = neg;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn set_x(&mut self, q: usize, v: bool) {
        if v {
            self.x[q / WORD] |= 1 << (q % WORD);
        } else {
            self.x[q / WORD] &= !(1 << (q % WORD));
        }
    }

    pub fn set_z(&mut self, q: usize, v: bool) {
        if v {
            self.z[q / WORD] |= 1 << (q % WORD);
        } else {
            self.z[q / WORD] &= !(1 << (q % WORD));
        }
    }

    /// Overall sign: `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn set_sign(&mut self, sign: i8) {
        self.neg = sign < 0;
    }

    pub fn flip_sign(&mut self) {
        self.neg = !self.neg;
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_sign(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Symplectic form: `false` = commute, `true` = anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]).count_ones() ^ (self.z[i] & other.x[i]).count_ones();
        }
        acc & 1 == 1
    }

    /// Phase exponent contribution of multiplying the stored operators,
    /// following the standard tableau "rowsum" bookkeeping: the returned value
    /// `g ∈ {0,1,2,3}` is the exponent of `i` such that
    /// `self · other = i^g · stored(result bits)`, ignoring the ±1 signs.
    fn phase_exponent(&self, other: &PauliString) -> u32 {
        let mut g: i64 = 0;
        for q in 0..self.n {
            let (x1, z1) = (self.x_bit(q) as i64, self.z_bit(q) as i64);
            let (x2, z2) = (other.x_bit(q) as i64, other.z_bit(q) as i64);
            g += match (x1, z1) {
                (0, 0) => 0,
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                (0, 1) => x2 * (1 - 2 * z2),
                _ => unreachable!(),
            };
        }
        g.rem_euclid(4) as u32
    }

    /// In-place product `self ← self · other`.
    ///
    /// For commuting operands the result is Hermitian with an exact ±1 sign.
    /// For anticommuting operands the product is `±i` times a Hermitian
    /// string; the convention maps phase `+i → +1`, `−i → −1` on the stored
    /// Hermitian part.
    pub fn mul_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let g = self.phase_exponent(other);
        // i^g with g ∈ {0,1,2,3}: sign flips for g ∈ {2,3}.
        if g == 2 || g == 3 {
            self.neg = !self.neg;
        }
        if other.neg {
            self.neg = !self.neg;
        }
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Symplectic bit row (x bits then z bits), used for GF(2) elimination.
    fn symplectic_bit(&self, col: usize) -> bool {
        if col < self.n {
            self.x_bit(col)
        } else {
            self.z_bit(col - self.n)
        }
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.neg { '-' } else { '+' })?;
        for q in 0..self.n {
            let c = match (self.x_bit(q), self.z_bit(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Product of two Pauli strings (value-returning convenience wrapper).
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString, PauliError> {
    if p.n != q.n {
        return Err(PauliError::LengthMismatch(p.n, q.n));
    }
    let mut r = p.clone();
    r.mul_assign(q);
    Ok(r)
}

/// Stabilizer tableau with destabilizer bookkeeping.
///
/// Row `i` of `destab` anticommutes with row `i` of `stab` and commutes with
/// every other stabilizer row; the 2n rows are GF(2)-independent.
#[derive(Clone, Debug)]
pub struct StabilizerTableau {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

impl StabilizerTableau {
    /// The all-`|0⟩` state: stabilizers `Z_i`, destabilizers `X_i`.
    pub fn zero_state(n: usize) -> Self {
        let destab = (0..n).map(|q| PauliString::single(n, q, Axis::X)).collect();
        let stab = (0..n).map(|q| PauliString::single(n, q, Axis::Z)).collect();
        StabilizerTableau { n, destab, stab }
    }

    /// `n_pairs` Bell pairs: qubit `i` entangled with qubit `n_pairs + i`.
    /// Stabilizers `X_i X_{n+i}` and `Z_i Z_{n+i}`.
    pub fn bell_pairs(n_pairs: usize) -> Self {
        let n = 2 * n_pairs;
        let mut destab = Vec::with_capacity(n);
        let mut stab = Vec::with_capacity(n);
        for i in 0..n_pairs {
            let mut xx = PauliString::identity(n);
            xx.set_x(i, true);
            xx.set_x(n_pairs + i, true);
            stab.push(xx);
            destab.push(PauliString::single(n, i, Axis::Z));
        }
        for i in 0..n_pairs {
            let mut zz = PauliString::identity(n);
            zz.set_z(i, true);
            zz.set_z(n_pairs + i, true);
            stab.push(zz);
            destab.push(PauliString::single(n, i, Axis::X));
        }
        StabilizerTableau { n, destab, stab }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    /// Apply a CNOT with the given control and target.
    pub fn cnot(&mut self, control: usize, target: usize) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            let xc = row.x_bit(control);
            let zt = row.z_bit(target);
            // Sign flip when the row contains Y_c Y_t-type content:
            // CNOT maps X_c Z_t → −Y_c Y_t etc.; the flip condition is
            // x_c ∧ z_t ∧ (x_t ⊕ z_c ⊕ 1) per the standard update.
            if xc && zt && (row.x_bit(target) ^ row.z_bit(control) ^ true) {
                row.flip_sign();
            }
            if xc {
                row.set_x(target, row.x_bit(target) ^ true);
            }
            if zt {
                row.set_z(control, row.z_bit(control) ^ true);
            }
        }
    }

    /// Apply a Hadamard on `qubit`.
    pub fn hadamard(&mut self, qubit: usize) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            let x = row.x_bit(qubit);
            let z = row.z_bit(qubit);
            if x && z {
                row.flip_sign();
            }
            row.set_x(qubit, z);
            row.set_z(qubit, x);
        }
    }

    /// Conjugate the state by a Pauli unitary: stabilizer rows anticommuting
    /// with `p` flip sign. (Used for explicit Pauli corrections.)
    pub fn apply_pauli(&mut self, p: &PauliString) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            if row.anticommutes(p) {
                row.flip_sign();
            }
        }
    }

    /// Measure Hermitian Pauli `p`.
    ///
    /// Deterministic case: the outcome is fixed by the group and the tableau
    /// is unchanged; a contradicting `forced_outcome` is an error.
    /// Random case: outcome is `forced_outcome` when supplied, otherwise
    /// drawn from the supplied bit source.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced_outcome: Option<u8>,
        mut random_bit: impl FnMut() -> u8,
    ) -> Result<u8, PauliError> {
        if p.n != self.n {
            return Err(PauliError::LengthMismatch(p.n, self.n));
        }
        let anti: Vec<usize> = (0..self.n).filter(|&i| self.stab[i].anticommutes(p)).collect();
        if let Some(&k) = anti.first() {
            // Random outcome: update generators.
            let outcome = forced_outcome.unwrap_or_else(|| random_bit() & 1);
            let pivot = self.stab[k].clone();
            for &i in anti.iter().skip(1) {
                self.stab[i].mul_assign(&pivot);
            }
            for i in 0..self.n {
                if i != k && self.destab[i].anticommutes(p) {
                    self.destab[i].mul_assign(&pivot);
                }
            }
            self.destab[k] = pivot;
            let mut new_stab = p.clone();
            if outcome == 1 {
                new_stab.flip_sign();
            }
            self.stab[k] = new_stab;
            Ok(outcome)
        } else {
            // Deterministic: express ±p as a product of stabilizers.
            let outcome = self
                .deterministic_outcome(p)
                .expect("commuting measurement must be in the stabilizer group");
            if let Some(f) = forced_outcome {
                if f != outcome {
                    return Err(PauliError::ForcedOutcomeContradiction { forced: f, actual: outcome });
                }
            }
            Ok(outcome)
        }
    }

    /// For `p` commuting with every stabilizer, return 0 if `+p` is in the
    /// stabilizer group, 1 if `−p` is, `None` if neither (not a valid query).
    pub fn deterministic_outcome(&self, p: &PauliString) -> Option<u8> {
        // Gaussian elimination over the symplectic rows of the stabilizers,
        // multiplying PauliStrings so signs are tracked exactly.
        let mut rows: Vec<PauliString> = self.stab.clone();
        let mut acc = p.clone();
        let mut used = vec![false; rows.len()];
        for col in 0..2 * self.n {
            let pivot = (0..rows.len()).find(|&r| !used[r] && rows[r].symplectic_bit(col));
            let Some(pivot) = pivot else { continue };
            used[pivot] = true;
            let prow = rows[pivot].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot && !used[r] && row.symplectic_bit(col) {
                    row.mul_assign(&prow);
                }
            }
            if acc.symplectic_bit(col) {
                acc.mul_assign(&prow);
            }
        }
        if acc.is_identity_up_to_sign() {
            // acc = p·R reduced to ±I: sign +1 means +p is in the group.
            Some(if acc.sign() == 1 { 0 } else { 1 })
        } else {
            None
        }
    }

    /// Stabilizer generators in a canonical form (reduced echelon over the
    /// symplectic matrix with exact sign tracking), for reproducible goldens.
    pub fn canonical_stabilizers(&self) -> Vec<PauliString> {
        canonicalize(self.stab.clone())
    }
}

/// Reduced-echelon canonical form of a generator list over GF(2), with signs
/// carried by genuine Pauli multiplication (order-independent because the
/// eliminated products always commute within a stabilizer group).
pub fn canonicalize(mut rows: Vec<PauliString>) -> Vec<PauliString> {
    let n = match rows.first() {
        Some(r) => r.n,
        None => return rows,
    };
    let mut rank = 0usize;
    for col in 0..2 * n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].symplectic_bit(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.symplectic_bit(col) {
                row.mul_assign(&prow);
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Equality of the groups generated by two lists, optionally up to signs.
pub fn group_equivalent(
    gens_a: &[PauliString],
    gens_b: &[PauliString],
    up_to_sign: bool,
) -> bool {
    let a = canonicalize(gens_a.to_vec());
    let b = canonicalize(gens_b.to_vec());
    if a.len() != b.len() {
        return false;
    }
    a.iter().zip(&b).all(|(p, q)| {
        p.x == q.x && p.z == q.z && (up_to_sign || p.neg == q.neg)
    })
}

/// A CSS code with one logical qubit per block.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub n: usize,
    pub k: usize,
    pub x_stabilizers: Vec<PauliString>,
    pub z_stabilizers: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
}

impl CssCode {
    /// Parse the plain-text code format: sections `X:`, `Z:`, `LX:`, `LZ:`,
    /// one operator per line as a string over `IXYZ`.
    pub fn parse(text: &str) -> Result<Self, PauliError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            X,
            Z,
            Lx,
            Lz,
        }
        let mut section = Section::None;
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        let mut lxs = Vec::new();
        let mut lzs = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "X:" => section = Section::X,
                "Z:" => section = Section::Z,
                "LX:" => section = Section::Lx,
                "LZ:" => section = Section::Lz,
                body => {
                    let p = PauliString::parse(body).map_err(|e| PauliError::Parse {
                        line: idx + 1,
                        msg: e.to_string(),
                    })?;
                    match n {
                        Some(n0) if n0 != p.n() => {
                            return Err(PauliError::Parse {
                                line: idx + 1,
                                msg: format!("line length {} differs from earlier {}", p.n(), n0),
                            })
                        }
                        None => n = Some(p.n()),
                        _ => {}
                    }
                    match section {
                        Section::X => xs.push(p),
                        Section::Z => zs.push(p),
                        Section::Lx => lxs.push(p),
                        Section::Lz => lzs.push(p),
                        Section::None => {
                            return Err(PauliError::Parse {
                                line: idx + 1,
                                msg: "operator before any section header".into(),
                            })
                        }
                    }
                }
            }
        }
        let n = n.ok_or(PauliError::Parse { line: 0, msg: "empty code file".into() })?;
        let code = CssCode {
            n,
            k: lxs.len(),
            x_stabilizers: xs,
            z_stabilizers: zs,
            logical_x: lxs,
            logical_z: lzs,
        };
        code.check()?;
        Ok(code)
    }

    /// Validate the structural invariants.
    pub fn check(&self) -> Result<(), PauliError> {
        let all: Vec<&PauliString> =
            self.x_stabilizers.iter().chain(&self.z_stabilizers).collect();
        for (i, p) in all.iter().enumerate() {
            for q in all.iter().skip(i + 1) {
                if p.anticommutes(q) {
                    return Err(PauliError::InvalidCode(format!(
                        "stabilizers {p} and {q} anticommute"
                    )));
                }
            }
        }
        for l in self.logical_x.iter().chain(&self.logical_z) {
            for s in &all {
                if l.anticommutes(s) {
                    return Err(PauliError::InvalidCode(format!(
                        "logical {l} anticommutes with stabilizer {s}"
                    )));
                }
            }
        }
        if self.logical_x.len() != self.logical_z.len() {
            return Err(PauliError::InvalidCode("logical X/Z count mismatch".into()));
        }
        for (i, lx) in self.logical_x.iter().enumerate() {
            for (j, lz) in self.logical_z.iter().enumerate() {
                let anti = lx.anticommutes(lz);
                if (i == j) != anti {
                    return Err(PauliError::InvalidCode(format!(
                        "logical pair ({i},{j}) has wrong commutation"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Embed an operator defined on the code block into `total` qubits with
    /// the block starting at `offset`.
    pub fn embed(&self, p: &PauliString, total: usize, offset: usize) -> PauliString {
        let mut out = PauliString::identity(total);
        for q in 0..self.n {
            out.set_x(offset + q, p.x_bit(q));
            out.set_z(offset + q, p.z_bit(q));
        }
        if p.sign() < 0 {
            out.flip_sign();
        }
        out
    }
}

/// How measurement outcomes are driven during Bell-preparation validation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BellValidationMode {
    /// Force every nondeterministic outcome to +1.
    ForcedPlus,
    /// Draw random outcomes and apply the tracked destabilizer as an explicit
    /// Pauli correction whenever an outcome is −1.
    RandomWithCorrections(u64),
}

/// Validate that measuring Alice's X-type then Bob's Z-type stabilizers on
/// `n` fresh Bell pairs prepares a logical Bell pair of the code: the final
/// stabilizer group must equal ⟨S_A, S_B, X̄X̄, Z̄Z̄⟩ including signs.
pub fn validate_css_bell(code: &CssCode, mode: BellValidationMode) -> Result<bool, PauliError> {
    code.check()?;
    if code.k != 1 {
        return Err(PauliError::InvalidCode(format!(
            "Bell validation handles exactly one logical qubit, got k={}",
            code.k
        )));
    }
    let n = code.n;
    let total = 2 * n;
    let mut t = StabilizerTableau::bell_pairs(n);

    let mut rng_state: u64 = match mode {
        BellValidationMode::RandomWithCorrections(seed) => seed | 1,
        BellValidationMode::ForcedPlus => 0,
    };
    let mut next_bit = move || {
        // xorshift64*; adequate for outcome coin flips in validation.
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        (rng_state.wrapping_mul(0x2545F4914F6CDD1D) >> 63) as u8
    };

    let mut to_measure: Vec<PauliString> = Vec::new();
    for s in &code.x_stabilizers {
        to_measure.push(code.embed(s, total, 0));
    }
    for s in &code.z_stabilizers {
        to_measure.push(code.embed(s, total, n));
    }

    for p in &to_measure {
        match mode {
            BellValidationMode::ForcedPlus => {
                t.measure_pauli(p, Some(0), &mut next_bit)?;
            }
            BellValidationMode::RandomWithCorrections(_) => {
                let anti_idx: Vec<usize> =
                    (0..t.n()).filter(|&i| t.stab[i].anticommutes(p)).collect();
                let outcome = t.measure_pauli(p, None, &mut next_bit)?;
                if outcome == 1 && !anti_idx.is_empty() {
                    // The destabilizer tracked for the replaced row flips
                    // exactly the new stabilizer's sign: a textbook correction.
                    let k = anti_idx[0];
                    let correction = t.destab[k].clone();
                    t.apply_pauli(&correction);
                }
            }
        }
    }

    let mut target: Vec<PauliString> = Vec::new();
    for s in &code.x_stabilizers {
        target.push(code.embed(s, total, 0));
        target.push(code.embed(s, total, n));
    }
    for s in &code.z_stabilizers {
        target.push(code.embed(s, total, 0));
        target.push(code.embed(s, total, n));
    }
    let lx = &code.logical_x[0];
    let lz = &code.logical_z[0];
    let mut xbar_xbar = code.embed(lx, total, 0);
    xbar_xbar.mul_assign(&code.embed(lx, total, n));
    let mut zbar_zbar = code.embed(lz, total, 0);
    zbar_zbar.mul_assign(&code.embed(lz, total, n));
    target.push(xbar_xbar);
    target.push(zbar_zbar);

    Ok(group_equivalent(t.stabilizers(), &target, false))
}
