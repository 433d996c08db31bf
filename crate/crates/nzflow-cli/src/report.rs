//! Structured verification report emitted by `nzflow verify`.

use num_bigint::BigUint;
use nzflow::Multigraph;

/// Outcome of one verification run. `pass` requires the emitted count to
/// meet the guaranteed bound, every flow to validate, and the census (when
/// it ran) to dominate the emission.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub digest: String,
    pub variant: String,
    pub n: usize,
    pub m: usize,
    pub guaranteed_bound: BigUint,
    pub emitted_distinct: usize,
    pub census: Option<BigUint>,
    pub all_flows_valid: bool,
    pub wall_ms: u128,
}

impl RunReport {
    pub fn bound_met(&self) -> bool {
        BigUint::from(self.emitted_distinct as u64) >= self.guaranteed_bound
    }

    pub fn within_census(&self) -> bool {
        match &self.census {
            None => true,
            Some(c) => BigUint::from(self.emitted_distinct as u64) <= *c,
        }
    }

    pub fn pass(&self) -> bool {
        self.bound_met() && self.all_flows_valid && self.within_census()
    }

    pub fn render(&self) -> String {
        let census = match &self.census {
            Some(c) => c.to_string(),
            None => "skipped: over cap".to_string(),
        };
        format!(
            "input_digest: {}\nvariant: {}\nn: {}\nm: {}\nguaranteed_bound: {}\n\
             emitted_distinct: {}\ncensus_count: {}\nall_flows_valid: {}\n\
             bound_met: {}\nemitted_within_census: {}\nresult: {}\nwall_time_ms: {}\n",
            self.digest,
            self.variant,
            self.n,
            self.m,
            self.guaranteed_bound,
            self.emitted_distinct,
            census,
            self.all_flows_valid,
            self.bound_met(),
            self.within_census(),
            if self.pass() { "PASS" } else { "FAIL" },
            self.wall_ms,
        )
    }
}

/// FNV-1a digest of the canonical graph text, hex-encoded.
pub fn graph_digest(g: &Multigraph) -> String {
    let text = nzflow::format::serialize_graph(g);
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}
