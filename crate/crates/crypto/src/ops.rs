use std::fmt;

/// Per-call instrumentation. Functions that do group work take an
/// `&mut OpCounter`; callers that do not care pass a fresh one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    /// Miller loops evaluated.
    pub pairings: usize,
    /// Pairing-product checks, each ending in one final exponentiation.
    pub pairing_checks: usize,
    /// G1 scalar multiplications, counting each MSM term.
    pub g1_muls: usize,
    pub g1_adds: usize,
    pub hashes: usize,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn absorb(&mut self, other: &OpCounter) {
        self.pairings += other.pairings;
        self.pairing_checks += other.pairing_checks;
        self.g1_muls += other.g1_muls;
        self.g1_adds += other.g1_adds;
        self.hashes += other.hashes;
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairings = {}", self.pairings)?;
        writeln!(f, "pairing_checks = {}", self.pairing_checks)?;
        writeln!(f, "g1_muls = {}", self.g1_muls)?;
        writeln!(f, "g1_adds = {}", self.g1_adds)?;
        write!(f, "hashes = {}", self.hashes)
    }
}
