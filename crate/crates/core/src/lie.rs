//! Orders of invariants, dimension formulas, integral counts, and centers
//! for the simple Lie group types.
//!
//! Every dimension in the toolkit reduces to the orders of invariants
//! d₁..d_l of the algebra. The tables below are validated at construction
//! against an independent oracle: Σ(2d_j − 1) must reproduce the classical
//! dimension formula of the series, so a corrupted table cannot construct.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// The nine simple series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    A,
    B,
    C,
    D,
    G2,
    F4,
    E6,
    E7,
    E8,
}

impl Series {
    pub fn label(&self) -> &'static str {
        match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
            Series::D => "D",
            Series::G2 => "G2",
            Series::F4 => "F4",
            Series::E6 => "E6",
            Series::E7 => "E7",
            Series::E8 => "E8",
        }
    }
}

/// A simple group type: series plus rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupType {
    series: Series,
    rank: u32,
}

/// Errors for group-type construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieError {
    /// Rank outside the allowed range for the series.
    BadRank { series: Series, rank: u32 },
    /// An internal consistency equation between dimension formulas failed.
    TableInconsistent { series: Series, rank: u32 },
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::BadRank { series, rank } => {
                write!(f, "invalid rank {rank} for series {}", series.label())
            }
            LieError::TableInconsistent { series, rank } => write!(
                f,
                "dimension table inconsistency for {}{rank}",
                series.label()
            ),
        }
    }
}

impl core::error::Error for LieError {}

impl GroupType {
    /// Rank constraints: A: l ≥ 1; B, C: l ≥ 2; D: l ≥ 3; exceptional ranks
    /// fixed.
    pub fn new(series: Series, rank: u32) -> Result<Self, LieError> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 3,
            Series::G2 => rank == 2,
            Series::F4 => rank == 4,
            Series::E6 => rank == 6,
            Series::E7 => rank == 7,
            Series::E8 => rank == 8,
        };
        if ok {
            Ok(GroupType { series, rank })
        } else {
            Err(LieError::BadRank { series, rank })
        }
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.series.label(), self.rank)
    }

    /// Parse labels like "A1", "D4", "E8", "G2".
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (series, rest) = match s.as_bytes().first()? {
            b'A' | b'a' => (Series::A, &s[1..]),
            b'B' | b'b' => (Series::B, &s[1..]),
            b'C' | b'c' => (Series::C, &s[1..]),
            b'D' | b'd' => (Series::D, &s[1..]),
            b'G' | b'g' => (Series::G2, &s[1..]),
            b'F' | b'f' => (Series::F4, &s[1..]),
            b'E' | b'e' => {
                let rank: u32 = s[1..].parse().ok()?;
                let series = match rank {
                    6 => Series::E6,
                    7 => Series::E7,
                    8 => Series::E8,
                    _ => return None,
                };
                return GroupType::new(series, rank).ok();
            }
            _ => return None,
        };
        let rank: u32 = rest.parse().ok()?;
        GroupType::new(series, rank).ok()
    }

    /// Orders of invariants d₁..d_l, ascending. The D-series order l sits in
    /// its sorted position among the even entries 2, 4, …, 2l−2.
    pub fn orders(&self) -> Vec<u64> {
        let l = self.rank as u64;
        let mut d: Vec<u64> = match self.series {
            Series::A => (2..=l + 1).collect(),
            Series::B | Series::C => (1..=l).map(|j| 2 * j).collect(),
            Series::D => {
                let mut v: Vec<u64> = (1..=l - 1).map(|j| 2 * j).collect();
                v.push(l);
                v
            }
            Series::G2 => [2, 6].into(),
            Series::F4 => [2, 6, 8, 12].into(),
            Series::E6 => [2, 5, 6, 8, 9, 12].into(),
            Series::E7 => [2, 6, 8, 10, 12, 14, 18].into(),
            Series::E8 => [2, 8, 12, 14, 18, 20, 24, 30].into(),
        };
        d.sort_unstable();
        d
    }

    /// Independent oracle: classical dimension of the group, not via orders.
    fn classical_dim(&self) -> u64 {
        let l = self.rank as u64;
        match self.series {
            Series::A => (l + 1) * (l + 1) - 1,
            Series::B => l * (2 * l + 1),
            Series::C => l * (2 * l + 1),
            Series::D => l * (2 * l - 1),
            Series::G2 => 14,
            Series::F4 => 52,
            Series::E6 => 78,
            Series::E7 => 133,
            Series::E8 => 248,
        }
    }
}

/// Per-type dimension ledger. All entries are functions of the orders of
/// invariants; construction cross-checks them and fails on any mismatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimReport {
    pub group: GroupType,
    pub orders: Vec<u64>,
    /// dim_ℂ G^ℂ = Σ(2d_j − 1)
    pub dim_g: u64,
    /// dim_ℝ of the maximal compact form, equal to dim_g
    pub dim_c: u64,
    /// dim_ℝ U = Σ(d_j − 1)
    pub dim_u: u64,
    /// dim_ℂ U^ℂ = Σ(d_j − 1)
    pub dim_uc: u64,
    /// dim_ℝ X_I = Σ(2d_j − 1)
    pub dim_x_i: u64,
    /// dim_ℝ X_II = dim_ℝ X_I
    pub dim_x_ii: u64,
    /// dim_ℝ X_III = Σ d_j
    pub dim_x_iii: u64,
    /// dim_ℝ X_IV = Σ d_j
    pub dim_x_iv: u64,
    /// dim_ℂ X_V = Σ d_j
    pub dim_x_v: u64,
    /// dim_ℂ Fl = Σ(d_j − 1)
    pub dim_fl: u64,
    /// Generic coadjoint orbit dimension dim G − l
    pub orbit_dim: u64,
}

/// Builds the dimension ledger for a group type.
pub fn dim_report(gt: GroupType) -> Result<DimReport, LieError> {
    let orders = gt.orders();
    let l = gt.rank() as u64;
    let sum_d: u64 = orders.iter().sum();
    let sum_2d1: u64 = orders.iter().map(|d| 2 * d - 1).sum();
    let sum_d1: u64 = orders.iter().map(|d| d - 1).sum();

    let report = DimReport {
        group: gt,
        dim_g: sum_2d1,
        dim_c: sum_2d1,
        dim_u: sum_d1,
        dim_uc: sum_d1,
        dim_x_i: sum_2d1,
        dim_x_ii: sum_2d1,
        dim_x_iii: sum_d,
        dim_x_iv: sum_d,
        dim_x_v: sum_d,
        dim_fl: sum_d1,
        orbit_dim: sum_2d1 - l,
        orders,
    };

    let bad = LieError::TableInconsistent {
        series: gt.series(),
        rank: gt.rank(),
    };
    // Anti-hallucination gate: the orders table must reproduce the classical
    // dimension of the series, and the internal identities must close.
    if report.dim_g != gt.classical_dim() {
        return Err(bad);
    }
    if report.dim_x_v != report.dim_fl + l {
        return Err(bad);
    }
    if 2 * report.dim_x_iii != report.dim_x_i + l {
        return Err(bad);
    }
    if report.dim_g != 2 * sum_d - l {
        return Err(bad);
    }
    if report.orbit_dim != 2 * (sum_d - l) {
        return Err(bad);
    }
    Ok(report)
}

/// Integral counts and moduli dimensions on a genus-g surface with n marked
/// points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub group: GroupType,
    pub genus: u64,
    pub marked: u64,
    /// dim Bun_par = (g−1)·dim G + n·Σ(d_j − 1)
    pub dim_bun_par: i64,
    /// dim Bun_0 = (g−1+n)·dim G
    pub dim_bun_0: i64,
    /// dim_ℝ Bun_{I,II} = 2(g−1)·dim G + n·Σ(2d_j − 1)
    pub dim_bun_i_ii: i64,
    /// dim_ℂ Bun_V = (g−1)·dim G + n·Σ d_j
    pub dim_bun_v: i64,
    /// dim_ℂ M_V = 2(g−1)·dim G + 2n·Σ d_j = 2·dim Bun_V
    pub dim_m_v: i64,
    /// dim_ℝ M_{I,II} = 4(g−1)·dim G + 2n·Σ(2d_j − 1) = 2·dim Bun_{I,II}
    pub dim_m_i_ii: i64,
    /// n_j = (2d_j − 1)(g − 1) + n·d_j
    pub n_j: Vec<i64>,
    /// N_G = Σ n_j
    pub n_g: i64,
    /// N_G^ℝ = 2(g−1)·dim G + n·Σ d_j
    pub n_g_r: i64,
    /// Deficiency δ_G = n·Σ(d_j − 1)
    pub deficiency: i64,
}

/// Integral-count ledger; pure integer arithmetic, valid for any g, n ≥ 0.
pub fn count_report(gt: GroupType, genus: u64, marked: u64) -> Result<CountReport, LieError> {
    let dims = dim_report(gt)?;
    let g1 = genus as i64 - 1;
    let n = marked as i64;
    let dim_g = dims.dim_g as i64;
    let sum_d: i64 = dims.orders.iter().map(|&d| d as i64).sum();
    let sum_d1: i64 = dims.orders.iter().map(|&d| d as i64 - 1).sum();
    let sum_2d1: i64 = dims.orders.iter().map(|&d| 2 * d as i64 - 1).sum();

    let n_j: Vec<i64> = dims
        .orders
        .iter()
        .map(|&d| (2 * d as i64 - 1) * g1 + n * d as i64)
        .collect();
    let n_g: i64 = n_j.iter().sum();

    let report = CountReport {
        group: gt,
        genus,
        marked,
        dim_bun_par: g1 * dim_g + n * sum_d1,
        dim_bun_0: (g1 + n) * dim_g,
        dim_bun_i_ii: 2 * g1 * dim_g + n * sum_2d1,
        dim_bun_v: g1 * dim_g + n * sum_d,
        dim_m_v: 2 * g1 * dim_g + 2 * n * sum_d,
        dim_m_i_ii: 4 * g1 * dim_g + 2 * n * sum_2d1,
        n_j,
        n_g,
        n_g_r: 2 * g1 * dim_g + n * sum_d,
        deficiency: n * sum_d1,
    };

    let bad = LieError::TableInconsistent {
        series: gt.series(),
        rank: gt.rank(),
    };
    if report.n_g != g1 * dim_g + n * sum_d {
        return Err(bad);
    }
    if report.dim_m_v != 2 * report.dim_bun_v {
        return Err(bad);
    }
    if report.dim_m_i_ii - 2 * report.n_g_r != 2 * report.deficiency {
        return Err(bad);
    }
    Ok(report)
}

/// Center of the universal covering group as a product of cyclic groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Center {
    Trivial,
    /// μ_N
    Cyclic(u64),
    /// μ₂ ⊕ μ₂
    KleinFour,
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Center::Trivial => write!(f, "trivial"),
            Center::Cyclic(n) => write!(f, "mu{n}"),
            Center::KleinFour => write!(f, "mu2+mu2"),
        }
    }
}

/// Center plus the subset of classes ζ with ζ² = 1, which are exactly the
/// characteristic classes admitting the real fixed-point reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterReport {
    pub group: GroupType,
    pub center: Center,
    /// Labels of admissible classes: "k" for μ_N elements, "(a,b)" for μ₂⊕μ₂.
    pub admissible: Vec<String>,
}

/// Center table: SL(l+1) → μ_{l+1}; Spin(2l+1), Sp(l) → μ₂;
/// Spin(4k) → μ₂⊕μ₂, Spin(4k+2) → μ₄; E6 → μ₃; E7 → μ₂;
/// G2, F4, E8 → trivial.
pub fn center_admissible(gt: GroupType) -> CenterReport {
    let center = match gt.series() {
        Series::A => Center::Cyclic(gt.rank() as u64 + 1),
        Series::B | Series::C | Series::E7 => Center::Cyclic(2),
        Series::D => {
            // Spin_{2l}: rank even ↔ 4 | 2l with Klein four; rank odd ↔ μ₄.
            if gt.rank() % 2 == 0 {
                Center::KleinFour
            } else {
                Center::Cyclic(4)
            }
        }
        Series::E6 => Center::Cyclic(3),
        Series::G2 | Series::F4 | Series::E8 => Center::Trivial,
    };
    let admissible: Vec<String> = match &center {
        Center::Trivial => [String::from("0")].into(),
        Center::Cyclic(n) => {
            let mut v = Vec::new();
            for k in 0..*n {
                if (2 * k) % n == 0 {
                    v.push(format!("{k}"));
                }
            }
            v
        }
        Center::KleinFour => ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]
            .iter()
            .map(|s| String::from(*s))
            .collect(),
    };
    CenterReport {
        group: gt,
        center,
        admissible,
    }
}

/// Every series/rank pair with rank ≤ `max_rank` (exceptional types once).
pub fn all_types_up_to(max_rank: u32) -> Vec<GroupType> {
    let mut v = Vec::new();
    for l in 1..=max_rank {
        v.push(GroupType::new(Series::A, l).unwrap());
    }
    for l in 2..=max_rank {
        v.push(GroupType::new(Series::B, l).unwrap());
        v.push(GroupType::new(Series::C, l).unwrap());
    }
    for l in 3..=max_rank {
        v.push(GroupType::new(Series::D, l).unwrap());
    }
    for gt in [
        GroupType::new(Series::G2, 2),
        GroupType::new(Series::F4, 4),
        GroupType::new(Series::E6, 6),
        GroupType::new(Series::E7, 7),
        GroupType::new(Series::E8, 8),
    ] {
        v.push(gt.unwrap());
    }
    v
}
