//! Sweep tables behind the rate/outage-versus-jamming curves and the
//! scheme comparison over eavesdropping/jamming channel strength.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::closed_form::{avg_rate, p1_outage, psi_inv, solve_optimal};
use crate::error::{Error, Result};
use crate::params::{db_to_linear, linear_to_db, PowerDb, PowerLinear, SystemParams};
use crate::scalar::Scalar;

/// A typed row that knows its CSV layout.
pub trait TableRow<T: Scalar>: Sized {
    const HEADER: &'static [&'static str];

    /// Linear value of the swept variable; rows are ordered by it.
    fn swept(&self) -> T;

    /// Cells in header order. `None` is written as an empty cell.
    fn cells(&self) -> Vec<Option<T>>;

    fn from_cells(cells: &[Option<T>]) -> Result<Self>;
}

/// Row of the jamming-power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QRow<T> {
    /// `None` for the zero-power row.
    pub q_db: Option<T>,
    pub q_linear: T,
    pub r: T,
    pub non_outage: T,
    pub avg_rate: T,
}

/// Row of the channel-gain sweep; one column per scheme, `None` when the
/// scheme was not requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow<T> {
    pub gain_db: T,
    pub gain_linear: T,
    pub optimal: Option<T>,
    pub passive: Option<T>,
    pub constant: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Closed-form optimal jamming.
    Optimal,
    /// Listen only, `Q = 0`.
    Passive,
    /// Always jam at `Q_max`.
    ConstantPower,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Optimal, Scheme::Passive, Scheme::ConstantPower];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<R> {
    pub swept_name: String,
    pub rows: Vec<R>,
}

fn required<T: Copy>(cell: Option<T>, name: &str) -> Result<T> {
    cell.ok_or_else(|| Error::Table(format!("column {name} may not be empty")))
}

impl<T: Scalar> TableRow<T> for QRow<T> {
    const HEADER: &'static [&'static str] = &["q_db", "q_linear", "r_bpshz", "non_outage", "avg_rate"];

    fn swept(&self) -> T {
        self.q_linear
    }

    fn cells(&self) -> Vec<Option<T>> {
        vec![
            self.q_db,
            Some(self.q_linear),
            Some(self.r),
            Some(self.non_outage),
            Some(self.avg_rate),
        ]
    }

    fn from_cells(c: &[Option<T>]) -> Result<Self> {
        Ok(Self {
            q_db: c[0],
            q_linear: required(c[1], "q_linear")?,
            r: required(c[2], "r_bpshz")?,
            non_outage: required(c[3], "non_outage")?,
            avg_rate: required(c[4], "avg_rate")?,
        })
    }
}

impl<T: Scalar> TableRow<T> for GainRow<T> {
    const HEADER: &'static [&'static str] = &[
        "gain_db",
        "gain_linear",
        "avg_rate_optimal",
        "avg_rate_passive",
        "avg_rate_constant",
    ];

    fn swept(&self) -> T {
        self.gain_linear
    }

    fn cells(&self) -> Vec<Option<T>> {
        vec![
            Some(self.gain_db),
            Some(self.gain_linear),
            self.optimal,
            self.passive,
            self.constant,
        ]
    }

    fn from_cells(c: &[Option<T>]) -> Result<Self> {
        Ok(Self {
            gain_db: required(c[0], "gain_db")?,
            gain_linear: required(c[1], "gain_linear")?,
            optimal: c[2],
            passive: c[3],
            constant: c[4],
        })
    }
}

fn check_grid<T: Scalar>(grid: &[T], what: &str, allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{what} grid is empty")));
    }
    for (i, &v) in grid.iter().enumerate() {
        let ok = v.is_finite() && if allow_zero { v >= T::zero() } else { v > T::zero() };
        if !ok {
            return Err(Error::InvalidGrid(format!("{what}[{i}] = {v} out of range")));
        }
        if i > 0 && !(grid[i - 1] < v) {
            return Err(Error::InvalidGrid(format!("{what} grid not strictly increasing at index {i}")));
        }
    }
    Ok(())
}

/// Rate, eavesdropping non-outage and average eavesdropping rate along a
/// jamming-power grid. `q_grid` must be strictly increasing and nonnegative.
pub fn sweep_q<T: Scalar>(params: &SystemParams<T>, q_grid: &[T]) -> Result<SweepTable<QRow<T>>> {
    check_grid(q_grid, "q", true)?;
    let rows = q_grid
        .par_iter()
        .map(|&q| {
            let r = psi_inv(params, q)?;
            Ok(QRow {
                q_db: linear_to_db(PowerLinear::new(q)?).ok().map(PowerDb::get),
                q_linear: q,
                r,
                non_outage: T::one() - p1_outage(params, r).get(),
                avg_rate: avg_rate(params, r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { swept_name: "q".into(), rows })
}

/// Average eavesdropping rate of each scheme as the mean power gain of the
/// eavesdropping and jamming links varies jointly (`lambda1 = lambda2 = 1/g`).
pub fn sweep_gain<T: Scalar>(
    template: &SystemParams<T>,
    gain_grid: &[T],
    schemes: &[Scheme],
) -> Result<SweepTable<GainRow<T>>> {
    check_grid(gain_grid, "gain", false)?;
    let want = |s: Scheme| schemes.contains(&s);
    let rows = gain_grid
        .par_iter()
        .map(|&g| {
            let mut b = template.to_builder();
            b.lambda1 = g.recip();
            b.lambda2 = g.recip();
            let params = b.build()?;
            let optimal = want(Scheme::Optimal).then(|| solve_optimal(&params).avg_rate_opt.get());
            let passive = if want(Scheme::Passive) {
                Some(avg_rate(&params, psi_inv(&params, T::zero())?))
            } else {
                None
            };
            let constant = if want(Scheme::ConstantPower) {
                Some(avg_rate(&params, psi_inv(&params, params.q_max())?))
            } else {
                None
            };
            Ok(GainRow {
                gain_db: linear_to_db(PowerLinear::new(g)?)?.get(),
                gain_linear: g,
                optimal,
                passive,
                constant,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { swept_name: "gain".into(), rows })
}

/// `n` points evenly spaced in dB over `[lo_db, hi_db]`, returned linear.
pub fn db_grid<T: Scalar>(lo_db: T, hi_db: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![db_to_linear(PowerDb(lo_db)).get()];
    }
    let last = T::lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            let t = T::lit(i as f64) / last;
            db_to_linear(PowerDb(lo_db + (hi_db - lo_db) * t)).get()
        })
        .collect()
}

/// Zero plus 200 points log-spaced over [-20 dB, 30 dB].
pub fn default_q_grid<T: Scalar>() -> Vec<T> {
    let mut g = vec![T::zero()];
    g.extend(db_grid(T::lit(-20.0), T::lit(30.0), 200));
    g
}

/// 101 points over [-20 dB, 0 dB].
pub fn default_gain_grid<T: Scalar>() -> Vec<T> {
    db_grid(T::lit(-20.0), T::zero(), 101)
}

/// Scientific notation with 17 significant digits, so every `f64` parses
/// back to the same bits.
pub fn format_cell<T: Scalar>(v: Option<T>) -> String {
    match v {
        Some(v) => format!("{:.16e}", v.as_f64()),
        None => String::new(),
    }
}

impl<T: Scalar> SweepTable<QRow<T>> {
    pub fn to_csv(&self) -> String {
        write_csv(&self.rows)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        read_csv(text, "q")
    }
}

impl<T: Scalar> SweepTable<GainRow<T>> {
    pub fn to_csv(&self) -> String {
        write_csv(&self.rows)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        read_csv(text, "gain")
    }
}

fn write_csv<T: Scalar, R: TableRow<T>>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.cells().into_iter().map(format_cell).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn read_csv<T: Scalar, R: TableRow<T>>(text: &str, swept_name: &str) -> Result<SweepTable<R>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Table("empty input".into()))?;
    if header.split(',').ne(R::HEADER.iter().copied()) {
        return Err(Error::Table(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let cells = line
            .split(',')
            .map(|c| match c.trim() {
                "" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(|v| Some(T::lit(v)))
                    .map_err(|e| Error::Table(format!("line {}: {s:?}: {e}", lineno + 2))),
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != R::HEADER.len() {
            return Err(Error::Table(format!(
                "line {}: expected {} cells, got {}",
                lineno + 2,
                R::HEADER.len(),
                cells.len()
            )));
        }
        rows.push(R::from_cells(&cells)?);
    }
    Ok(SweepTable { swept_name: swept_name.into(), rows })
}
