//! Test-only oracle: small machine-integer fractions and the three reference
//! tables transcribed row by row, with probabilities computed by direct
//! summation over table cells. Shares no code with the library.

#![allow(dead_code)]

use oddsaudit_core::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0);
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Frac {
            num: s * num / g,
            den: s * den / g,
        }
    }
    pub fn zero() -> Frac {
        Frac::new(0, 1)
    }
    pub fn one() -> Frac {
        Frac::new(1, 1)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }
    pub fn div(self, o: Frac) -> Frac {
        assert!(o.num != 0, "oracle division by zero");
        Frac::new(self.num * o.den, self.den * o.num)
    }
    pub fn to_rat(self) -> Rat {
        oddsaudit_core::rat::rat(self.num as i64, self.den as i64)
    }
}

/// Row labels in printed order: (E_1, E_2).
pub const ROWS: [(bool, bool); 4] = [(true, true), (true, false), (false, true), (false, false)];

/// Cells `table[row][hypothesis]` as (num, den).
pub type Table = Vec<Vec<(i128, i128)>>;

pub fn glymour_table() -> Table {
    vec![
        vec![(1, 6), (0, 1), (0, 1)],
        vec![(0, 1), (1, 6), (1, 6)],
        vec![(1, 6), (0, 1), (0, 1)],
        vec![(0, 1), (1, 6), (1, 6)],
    ]
}

pub fn modified_table() -> Table {
    vec![
        vec![(1, 12), (1, 18), (1, 36)],
        vec![(1, 12), (1, 9), (5, 36)],
        vec![(1, 12), (1, 18), (1, 36)],
        vec![(1, 12), (1, 9), (5, 36)],
    ]
}

pub fn four_table() -> Table {
    vec![
        vec![(1, 24), (1, 12), (1, 24), (1, 12)],
        vec![(1, 24), (1, 12), (1, 12), (1, 24)],
        vec![(1, 12), (1, 24), (1, 24), (1, 12)],
        vec![(1, 12), (1, 24), (1, 12), (1, 24)],
    ]
}

/// Literal filter: `None` leaves a proposition unconstrained.
pub type Filter = (Option<bool>, Option<bool>);

fn matches(row: (bool, bool), f: Filter) -> bool {
    f.0.is_none_or(|s| s == row.0) && f.1.is_none_or(|s| s == row.1)
}

/// Sum of cells matching `f` in the given hypothesis columns (1-based).
pub fn mass(table: &Table, cols: &[usize], f: Filter) -> Frac {
    let mut total = Frac::zero();
    for (r, row) in table.iter().enumerate() {
        if !matches(ROWS[r], f) {
            continue;
        }
        for &i in cols {
            let (a, b) = row[i - 1];
            total = total.add(Frac::new(a, b));
        }
    }
    total
}

pub fn n_of(table: &Table) -> usize {
    table[0].len()
}

pub fn all_cols(table: &Table) -> Vec<usize> {
    (1..=n_of(table)).collect()
}

pub fn others(table: &Table, i: usize) -> Vec<usize> {
    (1..=n_of(table)).filter(|&k| k != i).collect()
}

pub const ANY: Filter = (None, None);

pub fn prior(table: &Table, i: usize) -> Frac {
    mass(table, &[i], ANY)
}

pub fn prob(table: &Table, f: Filter) -> Frac {
    mass(table, &all_cols(table), f)
}

pub fn cond_h(table: &Table, f: Filter, i: usize) -> Frac {
    mass(table, &[i], f).div(prior(table, i))
}

pub fn cond_not_h(table: &Table, f: Filter, i: usize) -> Frac {
    let o = others(table, i);
    mass(table, &o, f).div(mass(table, &o, ANY))
}

pub fn posterior(table: &Table, f: Filter, i: usize) -> Frac {
    mass(table, &[i], f).div(prob(table, f))
}

pub fn e1(sign: bool) -> Filter {
    (Some(sign), None)
}

pub fn e2(sign: bool) -> Filter {
    (None, Some(sign))
}

/// Relevance by summation: indices j with `P(E_j | H_i) != P(E_j)`.
pub fn relevant(table: &Table, i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if cond_h(table, e1(true), i) != prob(table, e1(true)) {
        out.push(1);
    }
    if cond_h(table, e2(true), i) != prob(table, e2(true)) {
        out.push(2);
    }
    out
}

/// Independence of E_1, E_2 given H_i (or not-H_i) by summation.
pub fn independent(table: &Table, i: usize, given_h: bool) -> bool {
    let c = |f| {
        if given_h {
            cond_h(table, f, i)
        } else {
            cond_not_h(table, f, i)
        }
    };
    c((Some(true), Some(true))) == c(e1(true)).mul(c(e2(true)))
}
