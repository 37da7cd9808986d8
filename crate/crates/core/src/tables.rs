//! Published classification data, indexed by the standard numbering 1..112 of the conjugacy classes of W(E8).
//!
//! These constants are used as anchors and as the reference for comparisons. Nothing here is
//! computed.

/// Bertini twist partner of each type; entry `t - 1` is the partner of type `t`.
pub const BERTINI_TWIST: [u32; 112] = [
    97, 105, 3, 73, 5, 84, 82, 91, 37, 68, 35, 60, 42, 33, 94, 100, 17, 78, 102, 111, //
    21, 109, 23, 36, 25, 59, 58, 56, 34, 30, 31, 32, 14, 29, 11, 24, 9, 93, 39, 99, //
    89, 13, 85, 92, 72, 65, 47, 96, 106, 103, 64, 90, 63, 86, 61, 28, 57, 27, 26, 12, //
    55, 107, 53, 51, 46, 66, 75, 10, 95, 70, 87, 45, 4, 81, 67, 101, 77, 18, 79, 88, //
    74, 7, 83, 6, 43, 54, 71, 80, 41, 52, 8, 44, 38, 15, 69, 48, 1, 98, 40, 16, //
    76, 19, 50, 104, 2, 49, 62, 108, 22, 110, 20, 112,
];

pub fn twist_of(t: u32) -> u32 {
    BERTINI_TWIST[t as usize - 1]
}

/// Twist pairs of the minimal conic-bundle types with the published index of the twist. The entry
/// for 105 disagrees with its blow-up profile, which forces index 8.
pub const CONIC_TWIST_INDEX: [(u32, u32, usize); 5] = [(1, 97, 8), (2, 105, 4), (3, 3, 0), (4, 73, 3), (5, 5, 0)];

/// A row of the degree-2 table: type of the degree-2 surface, type of the
/// degree-1 blow-up in a rational point, trace (so `#Y = q² + trace·q + 1`), and the bound
/// `L_t(q) = q_coeff·q + constant` on rational points on lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dp2Row {
    pub dp2: u32,
    pub blowup: u32,
    pub trace: i64,
    pub lines_q: i64,
    pub lines_const: i64,
}

const fn row(dp2: u32, blowup: u32, trace: i64, lines_q: i64, lines_const: i64) -> Dp2Row {
    Dp2Row { dp2, blowup, trace, lines_q, lines_const }
}

pub const DP2_ROWS: [Dp2Row; 60] = [
    row(1, 91, 8, 56, 56),
    row(2, 92, 6, 32, 32),
    row(3, 93, 4, 16, 20),
    row(4, 94, 5, 20, 20),
    row(5, 95, 2, 0, 8),
    row(6, 95, 2, 8, 20),
    row(7, 96, 3, 8, 8),
    row(8, 97, 4, 12, 14),
    row(9, 98, 0, 0, 20),
    row(10, 66, 0, 8, 32),
    row(11, 99, 1, 4, 8),
    row(12, 100, 2, 2, 8),
    row(13, 101, 2, 0, 6),
    row(14, 101, 2, 4, 6),
    row(15, 102, 3, 6, 6),
    row(16, 67, 3, 8, 14),
    row(17, 68, 4, 8, 8),
    row(18, 69, -2, 0, 32),
    row(19, 87, -1, 0, 8),
    row(20, 103, 0, 2, 8),
    row(21, 104, 0, 0, 10),
    row(22, 70, 0, 4, 10),
    row(23, 105, 1, 0, 2),
    row(24, 106, 1, 2, 2),
    row(25, 107, 2, 0, 2),
    row(26, 107, 2, 2, 4),
    row(27, 71, 1, 0, 8),
    row(28, 72, 2, 0, 4),
    row(29, 73, 2, 4, 6),
    row(30, 74, 3, 4, 4),
    row(31, 38, -4, 0, 44),
    row(32, 56, -1, 2, 20),
    row(33, 76, -2, 0, 14),
    row(34, 88, -1, 0, 6),
    row(35, 39, 0, 0, 12),
    row(36, 109, 0, 0, 0),
    row(37, 110, 0, 0, 2),
    row(38, 57, 0, 2, 4),
    row(39, 111, 1, 0, 0),
    row(40, 40, -1, 0, 14),
    row(41, 79, 0, 0, 4),
    row(42, 80, 1, 0, 2),
    row(43, 41, 1, 0, 4),
    row(44, 42, 2, 0, 0),
    row(45, 43, 2, 0, 2),
    row(46, 58, 1, 2, 4),
    row(47, 59, 2, 2, 2),
    row(48, 60, 3, 2, 4),
    row(49, 44, -6, 0, 56),
    row(50, 45, -2, 0, 20),
    row(51, 46, -1, 0, 2),
    row(52, 47, 0, 0, 2),
    row(53, 48, -3, 0, 20),
    row(54, 49, -1, 0, 6),
    row(55, 50, 0, 0, 2),
    row(56, 51, 0, 0, 2),
    row(57, 52, 1, 0, 0),
    row(58, 53, 1, 0, 2),
    row(59, 54, 2, 0, 0),
    row(60, 55, 3, 0, 2),
];

pub fn dp2_row(dp2: u32) -> &'static Dp2Row {
    &DP2_ROWS[dp2 as usize - 1]
}

/// A row of the existence table for degree-1 types with a rational line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExistenceRow {
    pub dp1: u32,
    /// Values of `q` for which the type does not exist.
    pub absent: &'static [u64],
    /// Values below `from` for which the type exists.
    pub sporadic: &'static [u64],
    /// The type exists for every prime power `q ≥ from`.
    pub from: u64,
}

const fn ex(dp1: u32, absent: &'static [u64], sporadic: &'static [u64], from: u64) -> ExistenceRow {
    ExistenceRow { dp1, absent, sporadic, from }
}

const UP_TO_4: &[u64] = &[2, 3, 4];
const UP_TO_5: &[u64] = &[2, 3, 4, 5];
const UP_TO_8: &[u64] = &[2, 3, 4, 5, 7, 8];

pub const EXISTENCE_ROWS: [ExistenceRow; 57] = [
    ex(38, UP_TO_4, &[], 11),
    ex(39, &[2], &[], 7),
    ex(40, &[2], &[], 7),
    ex(41, &[], &[], 4),
    ex(42, &[], &[], 2),
    ex(43, &[], &[2], 4),
    ex(44, UP_TO_8, &[], 17),
    ex(45, &[2], &[], 9),
    ex(46, &[], &[], 7),
    ex(47, &[], &[], 5),
    ex(48, &[2], &[], 9),
    ex(49, &[], &[], 7),
    ex(50, &[2], &[], 5),
    ex(51, &[], &[], 5),
    ex(52, &[], &[], 4),
    ex(53, &[], &[], 4),
    ex(54, &[], &[], 2),
    ex(55, &[2], &[], 3),
    ex(56, &[2], &[], 9),
    ex(57, &[2], &[], 7),
    ex(58, &[], &[], 7),
    ex(59, &[], &[], 5),
    ex(60, &[], &[], 4),
    ex(66, UP_TO_5, &[], 17),
    ex(67, &[], &[], 11),
    ex(68, &[2], &[], 9),
    ex(69, UP_TO_4, &[], 9),
    ex(70, &[2], &[], 9),
    ex(71, &[], &[], 5),
    ex(72, &[2], &[], 4),
    ex(73, &[], &[], 7),
    ex(74, &[], &[], 7),
    ex(76, &[2], &[], 9),
    ex(79, &[], &[], 5),
    ex(80, &[], &[], 4),
    ex(87, &[], &[], 7),
    ex(88, &[], &[], 7),
    ex(91, UP_TO_8, &[53, 59, 61], 67),
    ex(92, UP_TO_4, &[31], 37),
    ex(93, UP_TO_4, &[], 17),
    ex(94, &[2], &[], 19),
    ex(95, &[2], &[], 5),
    ex(96, &[2], &[], 9),
    ex(97, &[2], &[13], 17),
    ex(98, &[2], &[], 7),
    ex(99, &[], &[], 9),
    ex(100, &[2], &[], 7),
    ex(101, &[2], &[], 4),
    ex(102, &[], &[], 9),
    ex(103, &[], &[], 7),
    ex(104, &[2], &[], 7),
    ex(105, &[], &[], 4),
    ex(106, &[], &[], 7),
    ex(107, &[], &[], 4),
    ex(109, &[], &[], 4),
    ex(110, &[], &[], 5),
    ex(111, &[], &[], 4),
];

impl ExistenceRow {
    /// Whether the row asserts existence over `F_q`.
    pub fn exists(&self, q: u64) -> bool {
        q >= self.from || self.sporadic.contains(&q)
    }
}

pub fn existence_row(dp1: u32) -> Option<&'static ExistenceRow> {
    EXISTENCE_ROWS.iter().find(|r| r.dp1 == dp1)
}

/// Index-8 types: trace and degrees of the blown-up closed points of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlowupRow {
    pub dp1: u32,
    pub trace: i64,
    pub profile: &'static [usize],
}

const fn bl(dp1: u32, trace: i64, profile: &'static [usize]) -> BlowupRow {
    BlowupRow { dp1, trace, profile }
}

pub const BLOWUP_ROWS: [BlowupRow; 22] = [
    bl(91, 9, &[1, 1, 1, 1, 1, 1, 1, 1]),
    bl(92, 7, &[1, 1, 1, 1, 1, 1, 2]),
    bl(94, 6, &[1, 1, 1, 1, 1, 3]),
    bl(93, 5, &[1, 1, 1, 1, 2, 2]),
    bl(97, 5, &[1, 1, 1, 1, 4]),
    bl(96, 4, &[1, 1, 1, 2, 3]),
    bl(102, 4, &[1, 1, 1, 5]),
    bl(95, 3, &[1, 1, 2, 2, 2]),
    bl(100, 3, &[1, 1, 3, 3]),
    bl(101, 3, &[1, 1, 2, 4]),
    bl(107, 3, &[1, 1, 6]),
    bl(99, 2, &[1, 2, 2, 3]),
    bl(105, 2, &[1, 3, 4]),
    bl(106, 2, &[1, 2, 5]),
    bl(111, 2, &[1, 7]),
    bl(98, 1, &[2, 2, 2, 2]),
    bl(103, 1, &[2, 3, 3]),
    bl(104, 1, &[2, 2, 4]),
    bl(108, 1, &[4, 4]),
    bl(109, 1, &[3, 5]),
    bl(110, 1, &[2, 6]),
    bl(112, 1, &[8]),
];

pub fn blowup_row(dp1: u32) -> Option<&'static BlowupRow> {
    BLOWUP_ROWS.iter().find(|r| r.dp1 == dp1)
}

/// Existence of index-8 types with a rational line: every prime power `q ≥ from`, plus the
/// listed smaller values.
pub const INDEX8_EXISTENCE: [(u32, &[u64], u64); 20] = [
    (91, &[16], 19),
    (92, &[], 11),
    (93, &[], 7),
    (94, &[], 7),
    (95, &[], 7),
    (96, &[], 4),
    (97, &[], 5),
    (98, &[], 4),
    (99, &[], 4),
    (100, &[], 3),
    (101, &[], 3),
    (102, &[], 3),
    (103, &[], 3),
    (104, &[], 3),
    (105, &[], 3),
    (106, &[], 2),
    (107, &[], 3),
    (109, &[], 2),
    (110, &[], 2),
    (111, &[], 2),
];

/// Renders `a q + b` the way the tables write it.
pub fn linear(a: i64, b: i64) -> String {
    match (a, b) {
        (0, b) => b.to_string(),
        (a, 0) => format!("{}q", coeff(a)),
        (a, b) if b < 0 => format!("{}q - {}", coeff(a), -b),
        (a, b) => format!("{}q + {}", coeff(a), b),
    }
}

fn coeff(a: i64) -> String {
    match a {
        1 => String::new(),
        -1 => "-".into(),
        a => a.to_string(),
    }
}

/// Renders `q² + a q + 1`.
pub fn point_count_formula(trace: i64) -> String {
    match trace {
        0 => "q^2 + 1".into(),
        1 => "q^2 + q + 1".into(),
        -1 => "q^2 - q + 1".into(),
        a if a < 0 => format!("q^2 - {}q + 1", -a),
        a => format!("q^2 + {a}q + 1"),
    }
}

/// Renders a profile such as `1^4·4`.
pub fn profile_string(profile: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < profile.len() {
        let d = profile[i];
        let n = profile[i..].iter().take_while(|&&x| x == d).count();
        parts.push(if n == 1 { d.to_string() } else { format!("{d}^{n}") });
        i += n;
    }
    parts.join("·")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_table_is_an_involution() {
        for t in 1..=112u32 {
            assert_eq!(twist_of(twist_of(t)), t, "type {t}");
        }
        for (a, b, _) in CONIC_TWIST_INDEX {
            assert_eq!(twist_of(a), b);
        }
    }

    #[test]
    fn blowup_rows() {
        for r in BLOWUP_ROWS {
            assert_eq!(r.profile.iter().sum::<usize>(), 8);
            assert_eq!(r.trace, 1 + r.profile.iter().filter(|&&d| d == 1).count() as i64);
        }
        let mut parts: Vec<_> = BLOWUP_ROWS.iter().map(|r| r.profile).collect();
        parts.sort();
        parts.dedup();
        assert_eq!(parts.len(), 22);
    }

    #[test]
    fn dp2_rows_cover_blowups() {
        let mut targets: Vec<u32> = DP2_ROWS.iter().map(|r| r.blowup).collect();
        targets.sort();
        targets.dedup();
        assert_eq!(targets.len(), 57);
        let with_rows: Vec<u32> = EXISTENCE_ROWS.iter().map(|r| r.dp1).collect();
        assert_eq!(targets, with_rows);
    }

    #[test]
    fn rendering() {
        assert_eq!(linear(56, 56), "56q + 56");
        assert_eq!(linear(0, 8), "8");
        assert_eq!(point_count_formula(8), "q^2 + 8q + 1");
        assert_eq!(point_count_formula(-6), "q^2 - 6q + 1");
        assert_eq!(profile_string(&[1, 1, 1, 1, 4]), "1^4·4");
        assert_eq!(profile_string(&[1, 1, 1, 1, 1, 1, 1, 1]), "1^8");
    }
}
