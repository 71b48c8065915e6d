use num_rational::Ratio;

/// Occurrence counts `counts[dx][dy] = |{x : S(x) ^ S(x ^ dx) = dy}|` for a
/// 4-bit S-box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceDistributionTable {
    pub sbox_id: String,
    pub counts: [[u32; 16]; 16],
}

pub fn build_ddt(sbox_id: &str, sbox: &[u8; 16]) -> DifferenceDistributionTable {
    let mut seen = 0u16;
    for &v in sbox {
        seen |= 1 << (v & 0xF);
    }
    if seen != 0xFFFF {
        log::warn!("S-box {sbox_id} is not a bijection");
    }
    let mut counts = [[0u32; 16]; 16];
    for (dx, row) in counts.iter_mut().enumerate() {
        for x in 0..16 {
            let dy = (sbox[x] ^ sbox[x ^ dx]) & 0xF;
            row[dy as usize] += 1;
        }
    }
    DifferenceDistributionTable { sbox_id: sbox_id.to_string(), counts }
}

impl DifferenceDistributionTable {
    pub fn count(&self, dx: u8, dy: u8) -> u32 {
        self.counts[dx as usize][dy as usize]
    }

    pub fn probability(&self, dx: u8, dy: u8) -> Ratio<u64> {
        Ratio::new(self.count(dx, dy) as u64, 16)
    }

    pub fn max_nontrivial(&self) -> u32 {
        self.counts[1..].iter().flat_map(|r| r.iter()).copied().max().unwrap_or(0)
    }

    /// Row and column sums of 16, even entries, and the fixed zero row.
    pub fn satisfies_structural_laws(&self) -> bool {
        let rows = self.counts.iter().all(|r| r.iter().sum::<u32>() == 16);
        let cols = (0..16).all(|c| self.counts.iter().map(|r| r[c]).sum::<u32>() == 16);
        let even = self.counts.iter().flatten().all(|v| v % 2 == 0);
        let zero_row = self.counts[0][0] == 16
            && self.counts[0][1..].iter().all(|&v| v == 0)
            && self.counts[1..].iter().all(|r| r[0] == 0);
        rows && cols && even && zero_row
    }
}
