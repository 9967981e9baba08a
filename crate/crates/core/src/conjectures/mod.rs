//! Named, reproducible reports for the seven prime-discrepancy conjectures.
//!
//! Every check computes typed evidence tables first and derives its verdict from
//! those tables alone, so [`ConjectureReport::recompute_verdict`] can re-derive the
//! verdict from a report read back from disk. Verdicts describe the tested scale
//! only; none of them is a proof.

pub mod baseline;

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::discrepancy::{
    discrepancy_at, level_crossing_census, normalized, normalized_pm1, order_table, parity_equality_check, shift_scan,
    trajectory, Labeling, LevelHits, OrderRow, ParityEquality, ShiftPolicy,
};
use crate::error::{Error, Result};
use crate::morphism::{LetterStream, Morphism};
use crate::primes::PrimeSet;
use crate::TOOL_VERSION;

pub use baseline::{baseline_ensemble, baseline_summary, baseline_walk, BaselineWalk, Ensemble, WalkSummary};

/// Thresholds turning evidence into verdicts. These are tool policy and are
/// written into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    /// Number of trailing even orders over which D must grow (C1).
    pub monotone_window: usize,
    /// Allowed |count_A / count_B − 1| at the largest order (C1).
    pub ratio_band: f64,
    /// Allowed distance of the j-th root from e (C3).
    pub e_band: f64,
    /// Fraction of shifts per class that must show the conjectured sign (C4).
    pub sign_agreement: f64,
    /// Allowed |D| in dispersion units for coin-like progressions (C7).
    pub coin_band: f64,
    /// A level whose last hit is below this fraction of n is flagged stale (C2).
    pub staleness_fraction: f64,
    /// Rows with fewer prime steps make a check inconclusive (C4, C6, C7).
    pub min_steps: u64,
    /// Lower bound of the shift policy max(2^(k/2), floor) (C4).
    pub shift_bound_floor: i64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            monotone_window: 5,
            ratio_band: 0.05,
            e_band: 0.25,
            sign_agreement: 0.9,
            coin_band: 3.0,
            staleness_fraction: crate::discrepancy::STALENESS_FRACTION,
            min_steps: 32,
            shift_bound_floor: crate::discrepancy::SHIFT_BOUND_FLOOR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// Parameters of one check; the tag doubles as the report id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum ConjectureParams {
    C1 {
        k_max: u32,
    },
    C2 {
        n: u64,
    },
    C3 {
        k0: u32,
        j_max: u32,
    },
    C4 {
        k: u32,
        shift_min: i64,
        shift_max: i64,
    },
    C5 {
        k_min: u32,
        k_max: u32,
        z_min: i64,
        z_max: i64,
    },
    C6 {
        k: u32,
    },
    C7 {
        k: u32,
    },
}

/// Offsets scanned by the progression checks: `start + s·stride` and `start + s` for `s` in 0..=11.
const OFFSETS: i64 = 12;

const C6_FORMS: [(i64, u64); 2] = [(1, 4), (3, 4)];
const C7_FORMS: [(i64, u64); 2] = [(1, 6), (5, 6)];

/// Expected sign of D per shift class mod 6.
pub const C4_DIRECTIONS: [i64; 6] = [-1, 1, 1, -1, -1, 1];

impl ConjectureParams {
    pub fn id(&self) -> &'static str {
        match self {
            ConjectureParams::C1 { .. } => "C1",
            ConjectureParams::C2 { .. } => "C2",
            ConjectureParams::C3 { .. } => "C3",
            ConjectureParams::C4 { .. } => "C4",
            ConjectureParams::C5 { .. } => "C5",
            ConjectureParams::C6 { .. } => "C6",
            ConjectureParams::C7 { .. } => "C7",
        }
    }

    /// Largest label the check will test for primality (at least 2).
    pub fn required_sieve_limit(&self) -> Result<u64> {
        let pow = |order: u32| -> Result<u64> {
            1u64.checked_shl(order).filter(|_| order < 40).ok_or(Error::Budget {
                what: "prefix order",
                requested: order as u64,
                limit: 39,
            })
        };
        let span = |start: i64, stride: u64, n: u64| -> i64 { start + ((n - 1) * stride) as i64 };
        let needed = match *self {
            ConjectureParams::C1 { k_max } => pow(k_max)? as i64,
            ConjectureParams::C2 { n } => n as i64,
            ConjectureParams::C3 { k0, j_max } => pow(2 * k0 + 2 * j_max)? as i64,
            ConjectureParams::C4 { k, shift_max, .. } => span(shift_max, 1, pow(k)?),
            ConjectureParams::C5 { k_max, z_max, .. } => span(6 * z_max + 5, 1, pow(2 * k_max)?),
            ConjectureParams::C6 { k } => forms_limit(&C6_FORMS, pow(k)?),
            ConjectureParams::C7 { k } => forms_limit(&C7_FORMS, pow(k)?),
        };
        Ok(needed.max(2) as u64)
    }
}

fn forms_limit(forms: &[(i64, u64)], n: u64) -> i64 {
    forms
        .iter()
        .map(|&(start, stride)| start + (OFFSETS - 1) * stride as i64 + ((n - 1) * stride) as i64)
        .max()
        .unwrap_or(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceTable {
    pub name: String,
    pub rows: Vec<Value>,
}

impl EvidenceTable {
    fn of<T: Serialize>(name: &str, rows: &[T]) -> Self {
        EvidenceTable {
            name: name.to_string(),
            rows: rows
                .iter()
                .map(|r| serde_json::to_value(r).expect("evidence rows serialize"))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub id: String,
    pub params: ConjectureParams,
    pub policy: Policy,
    pub sieve_limit: u64,
    pub evidence: Vec<EvidenceTable>,
    pub verdict: Verdict,
    pub criterion: String,
    pub tool_version: String,
}

impl ConjectureReport {
    pub fn table(&self, name: &str) -> Option<&EvidenceTable> {
        self.evidence.iter().find(|t| t.name == name)
    }

    /// Typed rows of one evidence table.
    pub fn rows<T: DeserializeOwned>(&self, name: &str) -> Result<Vec<T>> {
        let table = self
            .table(name)
            .ok_or_else(|| Error::Parse(format!("report {} has no evidence table {name:?}", self.id)))?;
        table
            .rows
            .iter()
            .map(|v| serde_json::from_value(v.clone()).map_err(Error::from))
            .collect()
    }

    /// Re-derives the verdict from the stored evidence and policy.
    pub fn recompute_verdict(&self) -> Result<(Verdict, String)> {
        evaluate(self)
    }

    /// Fails with [`Error::Inconsistency`] if the stored verdict does not follow from the evidence.
    pub fn validate(&self) -> Result<()> {
        if self.id != self.params.id() {
            return Err(Error::Inconsistency(format!(
                "report id {} does not match params {}",
                self.id,
                self.params.id()
            )));
        }
        let (verdict, criterion) = self.recompute_verdict()?;
        if verdict != self.verdict || criterion != self.criterion {
            return Err(Error::Inconsistency(format!(
                "{}: stored verdict {:?} ({}) but evidence gives {:?} ({})",
                self.id, self.verdict, self.criterion, verdict, criterion
            )));
        }
        Ok(())
    }
}

fn build_report(
    params: ConjectureParams,
    policy: &Policy,
    primes: &PrimeSet,
    evidence: Vec<EvidenceTable>,
) -> Result<ConjectureReport> {
    let mut report = ConjectureReport {
        id: params.id().to_string(),
        params,
        policy: policy.clone(),
        sieve_limit: primes.limit(),
        evidence,
        verdict: Verdict::Inconclusive,
        criterion: String::new(),
        tool_version: TOOL_VERSION.to_string(),
    };
    let (verdict, criterion) = evaluate(&report)?;
    report.verdict = verdict;
    report.criterion = criterion;
    Ok(report)
}

/// Runs the check named by `params`.
pub fn run(params: &ConjectureParams, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    let needed = params.required_sieve_limit()?;
    if needed > primes.limit() {
        return Err(Error::SieveTooSmall {
            needed: needed as i64,
            limit: primes.limit(),
        });
    }
    match *params {
        ConjectureParams::C1 { k_max } => check_c1(k_max, primes, policy),
        ConjectureParams::C2 { n } => check_c2(n, primes, policy),
        ConjectureParams::C3 { k0, j_max } => check_c3(k0, j_max, primes, policy),
        ConjectureParams::C4 {
            k,
            shift_min,
            shift_max,
        } => check_c4(k, shift_min..=shift_max, primes, policy),
        ConjectureParams::C5 {
            k_min,
            k_max,
            z_min,
            z_max,
        } => check_c5(k_min..=k_max, z_min..=z_max, primes, policy),
        ConjectureParams::C6 { k } => check_c6(k, primes, policy),
        ConjectureParams::C7 { k } => check_c7(k, primes, policy),
    }
}

fn phi_stream(length: u64) -> LetterStream {
    LetterStream::new(Arc::new(Morphism::phi()), length)
}

fn order_len(order: u32) -> Result<u64> {
    1u64.checked_shl(order)
        .filter(|_| order < 63)
        .ok_or_else(|| Error::InvalidArgument(format!("order {order} is too large")))
}

fn evaluate(report: &ConjectureReport) -> Result<(Verdict, String)> {
    let policy = &report.policy;
    match &report.params {
        ConjectureParams::C1 { .. } => Ok(verdict_c1(&report.rows("orders")?, policy)),
        ConjectureParams::C2 { .. } => Ok(verdict_c2(&report.rows("summary")?, &report.rows("levels")?)),
        ConjectureParams::C3 { .. } => Ok(verdict_c3(&report.rows("roots")?, policy)),
        ConjectureParams::C4 { .. } => Ok(verdict_c4(&report.rows("rows")?, &report.rows("classes")?, policy)),
        ConjectureParams::C5 { .. } => Ok(verdict_c5(&report.rows("pairs")?)),
        ConjectureParams::C6 { k } => Ok(verdict_c6(
            *k,
            &report.rows("growth")?,
            &report.rows("class_signs")?,
            policy,
        )),
        ConjectureParams::C7 { k } => Ok(verdict_c7(*k, &report.rows("growth")?, &report.rows("forms")?, policy)),
    }
}

// ---------------------------------------------------------------- C1

/// D at 2^k for k = 0..=k_max with shift 1.
pub fn check_c1(k_max: u32, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    let stream = phi_stream(order_len(k_max)?);
    let rows = order_table(&stream, &Labeling::shift(1), primes, 0..=k_max)?;
    build_report(
        ConjectureParams::C1 { k_max },
        policy,
        primes,
        vec![EvidenceTable::of("orders", &rows)],
    )
}

fn verdict_c1(rows: &[OrderRow], policy: &Policy) -> (Verdict, String) {
    let window = policy.monotone_window;
    let criterion = format!(
        "consistent at tested scale iff D(2^k) > 0 and strictly increasing over the last {window} even orders and |count_A/count_B - 1| <= {} at the largest order",
        policy.ratio_band
    );
    let even: Vec<&OrderRow> = rows.iter().filter(|r| r.k >= 2 && r.k % 2 == 0).collect();
    if even.len() < window || window == 0 {
        return (Verdict::Inconclusive, criterion);
    }
    let tail = &even[even.len() - window..];
    let growing = tail.iter().all(|r| r.d > 0) && tail.windows(2).all(|w| w[1].d > w[0].d);
    let ratio_ok = rows
        .last()
        .and_then(|r| r.ratio)
        .is_some_and(|q| (q - 1.0).abs() <= policy.ratio_band);
    let verdict = if growing && ratio_ok {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    (verdict, criterion)
}

// ---------------------------------------------------------------- C2

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C2Summary {
    pub n: u64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "min_D")]
    pub min_d: i64,
    pub argmin_rank: u64,
    #[serde(rename = "max_D")]
    pub max_d: i64,
    pub argmax_rank: u64,
    pub minus3_first_rank: Option<u64>,
    pub minus3_last_rank: Option<u64>,
    pub minus3_visits: u64,
    /// min D = −3, first reached at rank 5, never re-entered after rank 6. None when n < 5.
    pub hard_check: Option<bool>,
}

/// Level census over ranks 1..=n with shift 1, plus the hard check on the minimum −3.
pub fn check_c2(n: u64, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("C2 needs n ≥ 1".into()));
    }
    let stream = phi_stream(n);
    let labeling = Labeling::shift(1);
    let traj = trajectory(&stream, &labeling, primes, n, u64::MAX)?;
    let s = &traj.summary;
    let (min_d, max_d) = (s.min_d.expect("binary"), s.max_d.expect("binary"));
    let mut census = level_crossing_census(&stream, &labeling, primes, n, min_d.min(-3)..=max_d)?;
    // re-flag with the policy's horizon
    let horizon = (n as f64 * policy.staleness_fraction) as u64;
    for l in &mut census.levels {
        l.apparently_final = l.last_rank.is_some_and(|r| r < horizon);
    }
    if census.total_hits() != n {
        return Err(Error::Inconsistency(format!(
            "census covers {} ranks, expected {n}",
            census.total_hits()
        )));
    }
    let minus3 = census.level(-3).cloned().expect("band includes -3");
    let summary = C2Summary {
        n,
        d: s.d.expect("binary"),
        min_d,
        argmin_rank: s.argmin_rank.expect("binary"),
        max_d,
        argmax_rank: s.argmax_rank.expect("binary"),
        minus3_first_rank: minus3.first_rank,
        minus3_last_rank: minus3.last_rank,
        minus3_visits: minus3.visits,
        hard_check: (n >= 5).then(|| {
            min_d == -3 && s.argmin_rank == Some(5) && minus3.visits == 1 && minus3.last_rank.is_some_and(|r| r <= 6)
        }),
    };
    let levels: Vec<LevelHits> = census.levels.into_iter().filter(|l| l.level >= min_d).collect();
    build_report(
        ConjectureParams::C2 { n },
        policy,
        primes,
        vec![
            EvidenceTable::of("summary", &[summary]),
            EvidenceTable::of("levels", &levels),
        ],
    )
}

fn verdict_c2(summary: &[C2Summary], levels: &[LevelHits]) -> (Verdict, String) {
    let criterion = "inconsistent if the minimum -3 is not first reached at rank 5 or is re-entered after rank 6; \
                     consistent at tested scale iff that holds and every negative level is flagged apparently final"
        .to_string();
    let Some(s) = summary.first() else {
        return (Verdict::Inconclusive, criterion);
    };
    let verdict = match s.hard_check {
        None => Verdict::Inconclusive,
        Some(false) => Verdict::Inconsistent,
        Some(true) => {
            if levels
                .iter()
                .filter(|l| l.level < 0 && l.hits > 0)
                .all(|l| l.apparently_final)
            {
                Verdict::Consistent
            } else {
                Verdict::Inconclusive
            }
        }
    };
    (verdict, criterion)
}

// ---------------------------------------------------------------- C3

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C3Ratio {
    pub from_order: u32,
    pub to_order: u32,
    pub d_from: i64,
    pub d_to: i64,
    pub ratio: Option<f64>,
    /// 2 < ratio < 3
    pub in_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C3Root {
    pub j: u32,
    pub order: u32,
    #[serde(rename = "D")]
    pub d: i64,
    /// (D(2^(2k0+2j)) / D(2^(2k0)))^(1/j)
    pub root: Option<f64>,
    pub distance_to_e: Option<f64>,
}

/// Two-step growth ratios and j-th roots of D over even orders 2k0 ..= 2k0 + 2j_max.
pub fn check_c3(k0: u32, j_max: u32, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    if k0 < 3 {
        return Err(Error::InvalidArgument("C3 needs k0 ≥ 3".into()));
    }
    let base = 2 * k0;
    let top = base + 2 * j_max;
    let stream = phi_stream(order_len(top)?);
    let orders: Vec<OrderRow> = order_table(&stream, &Labeling::shift(1), primes, base..=top)?
        .into_iter()
        .filter(|r| r.k % 2 == 0)
        .collect();
    let ratios: Vec<C3Ratio> = orders
        .windows(2)
        .map(|w| {
            let ratio = (w[0].d > 0).then(|| w[1].d as f64 / w[0].d as f64);
            C3Ratio {
                from_order: w[0].k,
                to_order: w[1].k,
                d_from: w[0].d,
                d_to: w[1].d,
                ratio,
                in_band: ratio.is_some_and(|q| q > 2.0 && q < 3.0),
            }
        })
        .collect();
    let d0 = orders[0].d;
    let roots: Vec<C3Root> = orders
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, r)| {
            let root = (d0 > 0 && r.d > 0).then(|| (r.d as f64 / d0 as f64).powf(1.0 / j as f64));
            C3Root {
                j: j as u32,
                order: r.k,
                d: r.d,
                root,
                distance_to_e: root.map(|x| x - std::f64::consts::E),
            }
        })
        .collect();
    build_report(
        ConjectureParams::C3 { k0, j_max },
        policy,
        primes,
        vec![
            EvidenceTable::of("orders", &orders),
            EvidenceTable::of("ratios", &ratios),
            EvidenceTable::of("roots", &roots),
        ],
    )
}

fn verdict_c3(roots: &[C3Root], policy: &Policy) -> (Verdict, String) {
    let criterion = format!(
        "consistent at tested scale iff the last j-th root lies within {} of e",
        policy.e_band
    );
    let verdict = match roots.last().and_then(|r| r.distance_to_e) {
        None => Verdict::Inconclusive,
        Some(dist) if dist.abs() <= policy.e_band => Verdict::Consistent,
        Some(_) => Verdict::Inconsistent,
    };
    (verdict, criterion)
}

// ---------------------------------------------------------------- C4

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C4Row {
    pub shift: i64,
    pub class: i64,
    #[serde(rename = "count_A")]
    pub count_a: u64,
    #[serde(rename = "count_B")]
    pub count_b: u64,
    pub steps: u64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "normalized_D")]
    pub normalized_d: Option<f64>,
    pub ratio: Option<f64>,
    pub expected_sign: i64,
    pub sign_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C4Class {
    pub class: i64,
    pub expected_sign: i64,
    pub shifts: u64,
    pub agreeing: u64,
    pub agreement: f64,
    #[serde(rename = "mean_abs_D")]
    pub mean_abs_d: f64,
    pub mean_abs_ratio_minus_1: Option<f64>,
    pub shift_bound: i64,
}

/// Shift scan at order k grouped by shift mod 6.
pub fn check_c4(
    k: u32,
    shifts: std::ops::RangeInclusive<i64>,
    primes: &PrimeSet,
    policy: &Policy,
) -> Result<ConjectureReport> {
    let n = order_len(k)?;
    let stream = phi_stream(n);
    let order = k;
    let shift_policy = ShiftPolicy {
        shift_bound: (1i64 << (order / 2)).max(policy.shift_bound_floor),
    };
    let scan = shift_scan(&stream, primes, n, shifts.clone(), 1, shift_policy)?;
    let rows: Vec<C4Row> = scan
        .rows
        .iter()
        .map(|r| {
            let expected = C4_DIRECTIONS[r.class as usize];
            C4Row {
                shift: r.shift,
                class: r.class,
                count_a: r.counts[0],
                count_b: r.counts[1],
                steps: r.steps,
                d: r.d,
                normalized_d: r.normalized_d,
                ratio: r.ratio,
                expected_sign: expected,
                sign_matches: r.d.signum() == expected,
            }
        })
        .collect();
    let classes: Vec<C4Class> = (0..6)
        .filter_map(|c| {
            let members: Vec<&C4Row> = rows.iter().filter(|r| r.class == c).collect();
            if members.is_empty() {
                return None;
            }
            let agreeing = members.iter().filter(|r| r.sign_matches).count() as u64;
            let ratios: Vec<f64> = members
                .iter()
                .filter_map(|r| r.ratio)
                .map(|q| (q - 1.0).abs())
                .collect();
            Some(C4Class {
                class: c,
                expected_sign: C4_DIRECTIONS[c as usize],
                shifts: members.len() as u64,
                agreeing,
                agreement: agreeing as f64 / members.len() as f64,
                mean_abs_d: members.iter().map(|r| r.d.abs() as f64).sum::<f64>() / members.len() as f64,
                mean_abs_ratio_minus_1: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                shift_bound: shift_policy.shift_bound,
            })
        })
        .collect();
    build_report(
        ConjectureParams::C4 {
            k,
            shift_min: *shifts.start(),
            shift_max: *shifts.end(),
        },
        policy,
        primes,
        vec![EvidenceTable::of("rows", &rows), EvidenceTable::of("classes", &classes)],
    )
}

fn verdict_c4(rows: &[C4Row], classes: &[C4Class], policy: &Policy) -> (Verdict, String) {
    let criterion = format!(
        "consistent at tested scale iff in every scanned class mod 6 at least {} of shifts show the sign (-,+,+,-,-,+); inconclusive if any shift has fewer than {} primes",
        policy.sign_agreement, policy.min_steps
    );
    if rows.is_empty() || classes.is_empty() || rows.iter().any(|r| r.steps < policy.min_steps) {
        return (Verdict::Inconclusive, criterion);
    }
    let verdict = if classes.iter().all(|c| c.agreement >= policy.sign_agreement) {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    (verdict, criterion)
}

// ---------------------------------------------------------------- C5

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C5Pair {
    #[serde(flatten)]
    pub check: ParityEquality,
    pub in_verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C5Magnitude {
    pub order: u32,
    pub shifts: u64,
    #[serde(rename = "mean_abs_D_classes_0_3")]
    pub mean_abs_d_03: f64,
    #[serde(rename = "mean_abs_D_classes_1_2")]
    pub mean_abs_d_12: f64,
    #[serde(rename = "mean_abs_D_classes_4_5")]
    pub mean_abs_d_45: f64,
    /// Classes 4 and 5 diverge more slowly than classes 1 and 2.
    pub slower_4_5: bool,
}

/// Four-way parity equality for every (k, z), plus the |D| magnitude comparison at order 2·k_max.
pub fn check_c5(
    ks: std::ops::RangeInclusive<u32>,
    zs: std::ops::RangeInclusive<i64>,
    primes: &PrimeSet,
    policy: &Policy,
) -> Result<ConjectureReport> {
    let (k_min, k_max) = (*ks.start(), *ks.end());
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument("C5 needs 1 ≤ k_min ≤ k_max".into()));
    }
    if zs.is_empty() {
        return Err(Error::InvalidArgument("C5 needs a non-empty z range".into()));
    }
    let order = 2 * k_max;
    let n = order_len(order)?;
    let stream = phi_stream(n);
    let mut pairs = Vec::new();
    for k in ks {
        for z in zs.clone() {
            pairs.push(C5Pair {
                check: parity_equality_check(&stream, primes, k, z)?,
                in_verdict: k >= 2,
            });
        }
    }
    let mut by_class = [(0f64, 0u64); 6];
    for z in zs.clone() {
        for c in 0..6 {
            let d = discrepancy_at(&stream, &Labeling::shift(6 * z + c), primes, n)?
                .d()
                .expect("binary");
            by_class[c as usize].0 += d.abs() as f64;
            by_class[c as usize].1 += 1;
        }
    }
    let mean = |cs: &[usize]| -> f64 {
        let (sum, cnt) = cs
            .iter()
            .fold((0.0, 0), |acc, &c| (acc.0 + by_class[c].0, acc.1 + by_class[c].1));
        sum / cnt as f64
    };
    let magnitude = C5Magnitude {
        order,
        shifts: 6 * zs.clone().count() as u64,
        mean_abs_d_03: mean(&[0, 3]),
        mean_abs_d_12: mean(&[1, 2]),
        mean_abs_d_45: mean(&[4, 5]),
        slower_4_5: mean(&[4, 5]) < mean(&[1, 2]),
    };
    build_report(
        ConjectureParams::C5 {
            k_min,
            k_max,
            z_min: *zs.start(),
            z_max: *zs.end(),
        },
        policy,
        primes,
        vec![
            EvidenceTable::of("pairs", &pairs),
            EvidenceTable::of("magnitude", &[magnitude]),
        ],
    )
}

fn verdict_c5(pairs: &[C5Pair]) -> (Verdict, String) {
    let criterion =
        "consistent at tested scale iff D_{6z+4} at orders 2k-1 and 2k and -D_{6z+5} at orders 2k-1 and 2k \
                     are all equal for every tested (k, z) with k >= 2"
            .to_string();
    let tested: Vec<&C5Pair> = pairs.iter().filter(|p| p.in_verdict).collect();
    let verdict = if tested.is_empty() {
        Verdict::Inconclusive
    } else if tested.iter().all(|p| p.check.all_equal) {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    (verdict, criterion)
}

// ---------------------------------------------------------------- C6 / C7

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub start: i64,
    pub stride: u64,
    pub order: u32,
    pub n: u64,
    #[serde(rename = "count_A")]
    pub count_a: u64,
    #[serde(rename = "count_B")]
    pub count_b: u64,
    pub steps: u64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "normalized_D")]
    pub normalized_d: Option<f64>,
    #[serde(rename = "normalized_D_pm1")]
    pub normalized_d_pm1: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffsetReading {
    /// start + s·stride: the word read from a later rank
    Stride,
    /// start + s: a different progression residue
    Unit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetRow {
    pub form_start: i64,
    pub stride: u64,
    pub reading: OffsetReading,
    pub offset: i64,
    pub start: i64,
    pub class: i64,
    pub steps: u64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "normalized_D")]
    pub normalized_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSummary {
    pub form_start: i64,
    pub stride: u64,
    pub reading: OffsetReading,
    /// sign(D) at offset s equals sign(D) at offset s + 6, nonzero, for s in 0..6
    pub periodic6: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSign {
    pub class: i64,
    pub sign_first_form: i64,
    pub sign_second_form: i64,
    pub agree: bool,
}

struct ProgressionEvidence {
    growth: Vec<GrowthRow>,
    offsets: Vec<OffsetRow>,
    forms: Vec<FormSummary>,
}

fn progression_evidence(forms: &[(i64, u64); 2], k: u32, primes: &PrimeSet) -> Result<ProgressionEvidence> {
    let n = order_len(k)?;
    let stream = phi_stream(n);
    let mut growth = Vec::new();
    for &(start, stride) in forms {
        let labeling = Labeling::new(start, stride)?;
        for p in order_table(&stream, &labeling, primes, 0..=k)? {
            let steps = p.count_a + p.count_b;
            growth.push(GrowthRow {
                start,
                stride,
                order: p.k,
                n: p.n,
                count_a: p.count_a,
                count_b: p.count_b,
                steps,
                d: p.d,
                normalized_d: normalized(p.d, steps),
                normalized_d_pm1: normalized_pm1(p.d, steps),
            });
        }
    }
    let mut offsets = Vec::new();
    let mut summaries = Vec::new();
    for &(form_start, stride) in forms {
        for reading in [OffsetReading::Stride, OffsetReading::Unit] {
            let unit = match reading {
                OffsetReading::Stride => stride as i64,
                OffsetReading::Unit => 1,
            };
            let mut signs = Vec::new();
            for s in 0..OFFSETS {
                let start = form_start + s * unit;
                let tally = discrepancy_at(&stream, &Labeling::new(start, stride)?, primes, n)?;
                let d = tally.d().expect("binary");
                signs.push(d.signum());
                offsets.push(OffsetRow {
                    form_start,
                    stride,
                    reading,
                    offset: s,
                    start,
                    class: start.rem_euclid(6),
                    steps: tally.steps(),
                    d,
                    normalized_d: normalized(d, tally.steps()),
                });
            }
            summaries.push(FormSummary {
                form_start,
                stride,
                reading,
                periodic6: (0..6).all(|s| signs[s] != 0 && signs[s] == signs[s + 6]),
            });
        }
    }
    Ok(ProgressionEvidence {
        growth,
        offsets,
        forms: summaries,
    })
}

/// Majority sign per start class mod 6 under the stride reading, compared across the two forms.
fn class_signs(forms: &[(i64, u64); 2], offsets: &[OffsetRow], min_steps: u64) -> Vec<ClassSign> {
    let majority = |form_start: i64, class: i64| -> Option<i64> {
        let rows: Vec<&OffsetRow> = offsets
            .iter()
            .filter(|r| {
                r.form_start == form_start
                    && r.reading == OffsetReading::Stride
                    && r.class == class
                    && r.steps >= min_steps
            })
            .collect();
        (!rows.is_empty()).then(|| rows.iter().map(|r| r.d.signum()).sum::<i64>().signum())
    };
    (0..6)
        .filter_map(|c| {
            let a = majority(forms[0].0, c)?;
            let b = majority(forms[1].0, c)?;
            Some(ClassSign {
                class: c,
                sign_first_form: a,
                sign_second_form: b,
                agree: a == b && a != 0,
            })
        })
        .collect()
}

/// Progressions 4n+1 and 4n+3: growth of |D| with the order and mod-6 sign classes under offsets.
pub fn check_c6(k: u32, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    let ev = progression_evidence(&C6_FORMS, k, primes)?;
    let signs = class_signs(&C6_FORMS, &ev.offsets, policy.min_steps);
    build_report(
        ConjectureParams::C6 { k },
        policy,
        primes,
        vec![
            EvidenceTable::of("growth", &ev.growth),
            EvidenceTable::of("offsets", &ev.offsets),
            EvidenceTable::of("forms", &ev.forms),
            EvidenceTable::of("class_signs", &signs),
        ],
    )
}

fn final_growth(growth: &[GrowthRow], k: u32) -> Vec<&GrowthRow> {
    growth.iter().filter(|g| g.order == k).collect()
}

fn verdict_c6(k: u32, growth: &[GrowthRow], signs: &[ClassSign], policy: &Policy) -> (Verdict, String) {
    let criterion = format!(
        "consistent at tested scale iff for both forms |D(2^k)| > |D(2^(k-2))| and the majority sign of D per start class mod 6 \
         (offsets start + s*stride) agrees across forms; inconclusive below {} primes or k < 2",
        policy.min_steps
    );
    let last = final_growth(growth, k);
    if k < 2 || last.len() != 2 || last.iter().any(|g| g.steps < policy.min_steps) {
        return (Verdict::Inconclusive, criterion);
    }
    let grows = last.iter().all(|g| {
        growth
            .iter()
            .find(|h| h.start == g.start && h.stride == g.stride && h.order == k - 2)
            .is_some_and(|h| g.d.abs() > h.d.abs())
    });
    let verdict = if grows && !signs.is_empty() && signs.iter().all(|s| s.agree) {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    (verdict, criterion)
}

/// Progressions 6n+1 and 6n+5: |D| in dispersion units and absence of a period-6 sign pattern.
pub fn check_c7(k: u32, primes: &PrimeSet, policy: &Policy) -> Result<ConjectureReport> {
    let ev = progression_evidence(&C7_FORMS, k, primes)?;
    build_report(
        ConjectureParams::C7 { k },
        policy,
        primes,
        vec![
            EvidenceTable::of("growth", &ev.growth),
            EvidenceTable::of("offsets", &ev.offsets),
            EvidenceTable::of("forms", &ev.forms),
        ],
    )
}

fn verdict_c7(k: u32, growth: &[GrowthRow], forms: &[FormSummary], policy: &Policy) -> (Verdict, String) {
    let criterion = format!(
        "consistent at tested scale iff |D| <= {} dispersion units (sqrt(steps)/2) for both forms at order k and no form \
         shows a period-6 sign pattern under offsets start + s*stride; inconclusive below {} primes",
        policy.coin_band, policy.min_steps
    );
    let last = final_growth(growth, k);
    if last.len() != 2 || last.iter().any(|g| g.steps < policy.min_steps) {
        return (Verdict::Inconclusive, criterion);
    }
    let small = last
        .iter()
        .all(|g| g.normalized_d.is_some_and(|x| x.abs() <= policy.coin_band));
    let aperiodic = forms
        .iter()
        .filter(|f| f.reading == OffsetReading::Stride)
        .all(|f| !f.periodic6);
    let verdict = if small && aperiodic {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    (verdict, criterion)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn primes(limit: u64) -> PrimeSet {
        PrimeSet::new(limit).unwrap()
    }

    #[test]
    fn c1_small_orders() {
        let ps = primes(1 << 10);
        let policy = Policy::default();
        let r = check_c1(0, &ps, &policy).unwrap();
        let rows: Vec<OrderRow> = r.rows("orders").unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].k, rows[0].d, rows[0].ratio), (0, 0, None));
        assert_eq!(r.verdict, Verdict::Inconclusive);

        let r = check_c1(4, &ps, &policy).unwrap();
        let rows: Vec<OrderRow> = r.rows("orders").unwrap();
        assert_eq!(rows[4].d, 0);
        r.validate().unwrap();
    }

    #[test]
    fn c2_small_n() {
        let ps = primes(100);
        let policy = Policy::default();
        let r = check_c2(4, &ps, &policy).unwrap();
        let s: Vec<C2Summary> = r.rows("summary").unwrap();
        assert_eq!(s[0].min_d, -2);
        assert_eq!(s[0].hard_check, None);
        assert_eq!(r.verdict, Verdict::Inconclusive);

        let r = check_c2(5, &ps, &policy).unwrap();
        let s: Vec<C2Summary> = r.rows("summary").unwrap();
        assert_eq!((s[0].min_d, s[0].argmin_rank), (-3, 5));
        assert_eq!(s[0].hard_check, Some(true));
    }

    #[test]
    fn c3_degenerate() {
        let ps = primes(1 << 6);
        let r = check_c3(3, 0, &ps, &Policy::default()).unwrap();
        assert!(r.table("ratios").unwrap().rows.is_empty());
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(check_c3(2, 1, &ps, &Policy::default()).is_err());
    }

    #[test]
    fn c4_tiny_order_is_inconclusive() {
        let ps = primes(100);
        let r = check_c4(2, 0..=5, &ps, &Policy::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.table("classes").unwrap().rows.len(), 6);
    }

    #[test]
    fn c5_k1_excluded() {
        let ps = primes(100);
        let r = check_c5(1..=1, 0..=0, &ps, &Policy::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let pairs: Vec<C5Pair> = r.rows("pairs").unwrap();
        assert!(!pairs[0].in_verdict);
    }

    #[test]
    fn c6_c7_order_zero() {
        let params = ConjectureParams::C6 { k: 0 };
        let ps = PrimeSet::new(params.required_sieve_limit().unwrap()).unwrap();
        let r = run(&params, &ps, &Policy::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let params = ConjectureParams::C7 { k: 3 };
        let ps = PrimeSet::new(params.required_sieve_limit().unwrap()).unwrap();
        let r = run(&params, &ps, &Policy::default()).unwrap();
        let growth: Vec<GrowthRow> = r.rows("growth").unwrap();
        let g = growth.iter().find(|g| g.start == 5 && g.order == 3).unwrap();
        assert_eq!((g.steps, g.d), (7, -1));
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn run_refuses_small_sieve() {
        let ps = primes(100);
        let err = run(&ConjectureParams::C1 { k_max: 10 }, &ps, &Policy::default()).unwrap_err();
        assert!(matches!(err, Error::SieveTooSmall { needed: 1024, .. }));
    }

    #[test]
    fn tampered_report_fails_validation() {
        let ps = primes(1 << 12);
        let mut r = check_c1(12, &ps, &Policy::default()).unwrap();
        r.validate().unwrap();
        r.verdict = match r.verdict {
            Verdict::Consistent => Verdict::Inconsistent,
            _ => Verdict::Consistent,
        };
        assert!(matches!(r.validate(), Err(Error::Inconsistency(_))));
    }

    #[test]
    fn params_round_trip() {
        let p = ConjectureParams::C4 {
            k: 20,
            shift_min: 0,
            shift_max: 5,
        };
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"id":"C4","k":20,"shift_min":0,"shift_max":5}"#);
        assert_eq!(serde_json::from_str::<ConjectureParams>(&text).unwrap(), p);
    }
}
