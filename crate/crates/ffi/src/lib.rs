//! C interface to `urntubes`.
//!
//! Every computation returns a [`UtStatus`] and, on success, writes an
//! owned [`UtTable`] handle through its out-pointer. Rows of a table are
//! `(label, probability)` pairs with the probability as exact numerator and
//! denominator strings. On failure `ut_last_error` describes what went wrong
//! on the calling thread.
//!
//! Strings returned by the library are owned by the caller and must be
//! released with [`ut_string_free`]; tables with [`ut_table_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use urntubes::emit::{self, Format};
use urntubes::{
    draw_pmf, first_full, flrn, negative, parse_distribution, parse_multiset, points_share, Cutoff, DrawMode, Error,
    Rational, TubeConfig, Urn,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed mode, multiset, distribution or number.
    Parse = 3,
    /// Arguments outside the operation's domain.
    Domain = 4,
    /// Conditioning on an event of probability zero.
    Conditioning = 5,
    /// A size or iteration limit was exceeded.
    Resource = 6,
    /// The library panicked. This is a bug.
    Panic = 7,
}

impl From<&Error> for UtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => UtStatus::Parse,
            Error::Domain(_) => UtStatus::Domain,
            Error::Conditioning(_) => UtStatus::Conditioning,
            Error::Resource(_) => UtStatus::Resource,
        }
    }
}

/// An exact finite table of labelled probabilities.
pub struct UtTable {
    rows: Vec<(CString, Rational)>,
    residual: Rational,
    json: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(UtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(UtStatus::from(&e), e.to_string())
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(UtStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(UtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn label(s: String) -> CString {
    CString::new(s).expect("labels contain no nul")
}

/// Runs `f`, stores its table in `out` and records any error.
unsafe fn produce(out: *mut *mut UtTable, f: impl FnOnce() -> Result<UtTable, Failure>) -> UtStatus {
    if out.is_null() {
        set_error("out is null".into());
        return UtStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(UtStatus::Panic, format!("panic: {msg}")))
    });
    match result {
        Ok(table) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            *out = Box::into_raw(Box::new(table));
            UtStatus::Ok
        }
        Err(Failure(status, message)) => {
            set_error(message);
            status
        }
    }
}

fn mode_of(s: &str) -> Result<DrawMode, Failure> {
    Ok(s.parse::<DrawMode>()?)
}

fn urn_of(mode: DrawMode, s: &str) -> Result<Urn, Failure> {
    Ok(match mode {
        DrawMode::Multinomial => Urn::Distribution(parse_distribution(s)?),
        _ => Urn::Balls(parse_multiset(s)?),
    })
}

fn rational_of(s: &str) -> Result<Rational, Failure> {
    Ok(s.parse::<Rational>()?)
}

/// Distribution of the multiset of colours in a draw of `k` balls.
///
/// `mode` is `multinomial`, `hypergeometric` or `polya`. For `multinomial`
/// the urn is a distribution such as `"1/3 R + 2/3 B"`, otherwise a
/// multiset of balls such as `"3R+6B"`. Row labels are multisets.
///
/// # Safety
/// String arguments must be null or point to nul-terminated strings; `out`
/// must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ut_draw(mode: *const c_char, urn: *const c_char, k: u64, out: *mut *mut UtTable) -> UtStatus {
    produce(out, || {
        let mode = mode_of(text(mode, "mode")?)?;
        let urn = urn_of(mode, text(urn, "urn")?)?;
        let d = draw_pmf(mode, &urn, k)?;
        Ok(UtTable {
            rows: d.iter().map(|(m, p)| (label(m.to_string()), p.clone())).collect(),
            residual: Rational::zero(),
            json: emit::dist(&d, Format::Json),
        })
    })
}

/// Probability that each colour's tube is the first to be filled.
///
/// # Safety
/// As for [`ut_draw`].
#[no_mangle]
pub unsafe extern "C" fn ut_first_full(
    mode: *const c_char,
    urn: *const c_char,
    tubes: *const c_char,
    out: *mut *mut UtTable,
) -> UtStatus {
    produce(out, || {
        let mode = mode_of(text(mode, "mode")?)?;
        let urn = urn_of(mode, text(urn, "urn")?)?;
        let tubes = TubeConfig::new(parse_multiset(text(tubes, "tubes")?)?)?;
        let d = first_full(mode, &urn, &tubes)?;
        Ok(UtTable {
            rows: d.iter().map(|(c, p)| (label(c.to_string()), p.clone())).collect(),
            residual: Rational::zero(),
            json: emit::dist(&d, Format::Json),
        })
    })
}

unsafe fn negative_with(
    mode: *const c_char,
    urn: *const c_char,
    tubes: *const c_char,
    cutoff: impl FnOnce() -> Result<Cutoff, Failure>,
    out: *mut *mut UtTable,
) -> UtStatus {
    produce(out, || {
        let mode = mode_of(text(mode, "mode")?)?;
        let urn = urn_of(mode, text(urn, "urn")?)?;
        let tubes = parse_multiset(text(tubes, "tubes")?)?;
        let d = negative(mode, &urn, &tubes, &cutoff()?)?;
        Ok(UtTable {
            rows: d.entries().iter().map(|(k, p)| (label(k.to_string()), p.clone())).collect(),
            residual: d.residual().clone(),
            json: emit::natdist(&d, Format::Json),
        })
    })
}

/// Distribution of the number of draws until every tube is full, listed up
/// to `k_max` draws. Row labels are draw counts; the mass beyond `k_max` is
/// the table's residual. Hypergeometric urns always list the whole support.
///
/// # Safety
/// As for [`ut_draw`].
#[no_mangle]
pub unsafe extern "C" fn ut_negative(
    mode: *const c_char,
    urn: *const c_char,
    tubes: *const c_char,
    k_max: u64,
    out: *mut *mut UtTable,
) -> UtStatus {
    negative_with(mode, urn, tubes, || Ok(Cutoff::KMax(k_max)), out)
}

/// As [`ut_negative`], listing draw counts until the tail mass is provably
/// below `tail_eps` (a rational such as `"1/1000"`).
///
/// # Safety
/// As for [`ut_draw`].
#[no_mangle]
pub unsafe extern "C" fn ut_negative_tail(
    mode: *const c_char,
    urn: *const c_char,
    tubes: *const c_char,
    tail_eps: *const c_char,
    out: *mut *mut UtTable,
) -> UtStatus {
    negative_with(
        mode,
        urn,
        tubes,
        || Ok(Cutoff::TailEps(rational_of(text(tail_eps, "tail_eps")?)?)),
        out,
    )
}

/// Fair split of `stake` when a race to `target` wins stops at
/// `wins_a : wins_b` and `A` wins each round with probability `prob`.
/// Rows `A` and `B` hold each player's share of the stake.
///
/// # Safety
/// As for [`ut_draw`].
#[no_mangle]
pub unsafe extern "C" fn ut_points(
    target: u64,
    wins_a: u64,
    wins_b: u64,
    prob: *const c_char,
    stake: *const c_char,
    out: *mut *mut UtTable,
) -> UtStatus {
    produce(out, || {
        let prob = rational_of(text(prob, "prob")?)?;
        let stake = rational_of(text(stake, "stake")?)?;
        let p = points_share(target, wins_a, wins_b, &prob, &stake)?;
        Ok(UtTable {
            rows: p.rho.iter().map(|(c, r)| (label(c.to_string()), r * &stake)).collect(),
            residual: Rational::zero(),
            json: emit::points(&p, Format::Json),
        })
    })
}

/// Normalised frequencies of a multiset of balls, as a one-step table.
///
/// # Safety
/// As for [`ut_draw`].
#[no_mangle]
pub unsafe extern "C" fn ut_frequencies(balls: *const c_char, out: *mut *mut UtTable) -> UtStatus {
    produce(out, || {
        let d = flrn(&parse_multiset(text(balls, "balls")?)?)?;
        Ok(UtTable {
            rows: d.iter().map(|(c, p)| (label(c.to_string()), p.clone())).collect(),
            residual: Rational::zero(),
            json: emit::dist(&d, Format::Json),
        })
    })
}

/// Number of rows, or 0 for a null table.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_len(table: *const UtTable) -> usize {
    table.as_ref().map_or(0, |t| t.rows.len())
}

unsafe fn row<'a>(table: *const UtTable, i: usize) -> Option<&'a (CString, Rational)> {
    table.as_ref()?.rows.get(i)
}

fn owned(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Label of row `i`, or null when out of range.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_label(table: *const UtTable, i: usize) -> *mut c_char {
    row(table, i).map_or(ptr::null_mut(), |(l, _)| l.clone().into_raw())
}

/// Numerator of row `i` in decimal, or null when out of range.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_numerator(table: *const UtTable, i: usize) -> *mut c_char {
    row(table, i).map_or(ptr::null_mut(), |(_, p)| owned(p.numer().to_string()))
}

/// Denominator of row `i` in decimal, or null when out of range.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_denominator(table: *const UtTable, i: usize) -> *mut c_char {
    row(table, i).map_or(ptr::null_mut(), |(_, p)| owned(p.denom().to_string()))
}

/// Row `i` as a double, or NaN when out of range.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_approx(table: *const UtTable, i: usize) -> f64 {
    row(table, i).map_or(f64::NAN, |(_, p)| p.approx())
}

/// Mass not listed in the rows as `"num/den"` (`"0/1"` for complete tables).
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_residual(table: *const UtTable) -> *mut c_char {
    table.as_ref().map_or(ptr::null_mut(), |t| owned(t.residual.to_string()))
}

/// The table as JSON, in the same layout as the command line's `--format json`.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ut_table_to_json(table: *const UtTable) -> *mut c_char {
    table.as_ref().map_or(ptr::null_mut(), |t| owned(t.json.clone()))
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ut_table_free(table: *mut UtTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn ut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
