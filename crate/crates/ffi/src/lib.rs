//! C ABI over `bibnet-core`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`BibnetStatus`]; on failure the message is available from
//! [`bibnet_last_error`] on the same thread until the next failing call.
//! Strings returned to the caller are NUL-terminated and must be released
//! with [`bibnet_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use bibnet::aggregation::aggregate_incidence;
use bibnet::counting::{build_incidence, incidence_mass};
use bibnet::export::{export_edgelist, export_graphml, export_pajek};
use bibnet::ingest::{parse_aggregation_map, parse_records_csv, parse_records_jsonl};
use bibnet::model::{
    AggregationMap, CountingScheme, IncidenceMatrix, Level, NetworkMatrix, PaperRecord,
};
use bibnet::projection::{audit_conservation, mass_decomposition, network_mass, project};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibnetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Counting = 4,
    Aggregation = 5,
    Projection = 6,
    OutOfRange = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibnetCounting {
    Full = 0,
    FractionalEqual = 1,
    FractionalCustom = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibnetLevel {
    Author = 0,
    Institute = 1,
    Country = 2,
    Journal = 3,
    Custom = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BibnetFormat {
    Edgelist = 0,
    Pajek = 1,
    Graphml = 2,
}

/// Plain-data view of a conservation report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BibnetAudit {
    pub incidence_mass: f64,
    pub network_mass: f64,
    pub self_mass: f64,
    pub collaboration_mass: f64,
    pub expected: usize,
    pub column_violations: usize,
    pub conserved: bool,
}

/// Parsed paper records.
pub struct BibnetRecords(Vec<PaperRecord>);
/// An incidence matrix `A`.
pub struct BibnetIncidence(IncidenceMatrix);
/// A network matrix `B = A·Aᵀ`.
pub struct BibnetNetwork(NetworkMatrix);
/// An aggregation map.
pub struct BibnetMap(AggregationMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let msg = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

/// Runs `f`, converting `Err` and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (BibnetStatus, String)>) -> BibnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BibnetStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BibnetStatus::Panic
        }
    }
}

fn fail<E: ToString>(status: BibnetStatus) -> impl FnOnce(E) -> (BibnetStatus, String) {
    move |e| (status, e.to_string())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (BibnetStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (BibnetStatus::NullPointer, format!("{name} is null")))
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], (BibnetStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err((BibnetStatus::NullPointer, "data is null".into()));
    }
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (BibnetStatus, String)> {
    if out.is_null() {
        return Err((BibnetStatus::NullPointer, "out is null".into()));
    }
    out.write(value);
    Ok(())
}

fn level(l: BibnetLevel) -> Level {
    match l {
        BibnetLevel::Author => Level::Author,
        BibnetLevel::Institute => Level::Institute,
        BibnetLevel::Country => Level::Country,
        BibnetLevel::Journal => Level::Journal,
        BibnetLevel::Custom => Level::Custom,
    }
}

fn scheme(c: BibnetCounting) -> CountingScheme {
    match c {
        BibnetCounting::Full => CountingScheme::Full,
        BibnetCounting::FractionalEqual => CountingScheme::FractionalEqual,
        BibnetCounting::FractionalCustom => CountingScheme::FractionalCustom,
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, (BibnetStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(fail(BibnetStatus::InvalidArgument))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bibnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses records from CSV bytes (`paper_id,entity_id[,weight]`).
#[no_mangle]
pub unsafe extern "C" fn bibnet_records_parse_csv(
    data: *const u8,
    len: usize,
    out: *mut *mut BibnetRecords,
) -> BibnetStatus {
    guard(|| {
        let records = parse_records_csv(bytes(data, len)?).map_err(fail(BibnetStatus::Parse))?;
        write_out(out, Box::into_raw(Box::new(BibnetRecords(records))))
    })
}

/// Parses records from JSON Lines bytes.
#[no_mangle]
pub unsafe extern "C" fn bibnet_records_parse_jsonl(
    data: *const u8,
    len: usize,
    out: *mut *mut BibnetRecords,
) -> BibnetStatus {
    guard(|| {
        let records = parse_records_jsonl(bytes(data, len)?).map_err(fail(BibnetStatus::Parse))?;
        write_out(out, Box::into_raw(Box::new(BibnetRecords(records))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_records_len(records: *const BibnetRecords) -> usize {
    records.as_ref().map_or(0, |r| r.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_records_free(records: *mut BibnetRecords) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_build(
    records: *const BibnetRecords,
    counting: BibnetCounting,
    out: *mut *mut BibnetIncidence,
) -> BibnetStatus {
    guard(|| {
        let records = deref(records, "records")?;
        let a =
            build_incidence(&records.0, scheme(counting)).map_err(fail(BibnetStatus::Counting))?;
        write_out(out, Box::into_raw(Box::new(BibnetIncidence(a))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_free(a: *mut BibnetIncidence) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_shape(
    a: *const BibnetIncidence,
    entities: *mut usize,
    papers: *mut usize,
) -> BibnetStatus {
    guard(|| {
        let a = deref(a, "incidence")?;
        write_out(entities, a.0.entity_count())?;
        write_out(papers, a.0.paper_count())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_get(
    a: *const BibnetIncidence,
    row: usize,
    col: usize,
    out: *mut f64,
) -> BibnetStatus {
    guard(|| {
        let a = deref(a, "incidence")?;
        if row >= a.0.entity_count() || col >= a.0.paper_count() {
            return Err((
                BibnetStatus::OutOfRange,
                format!("({row}, {col}) out of range"),
            ));
        }
        write_out(out, a.0.get(row, col))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_mass(
    a: *const BibnetIncidence,
    out: *mut f64,
) -> BibnetStatus {
    guard(|| write_out(out, incidence_mass(&deref(a, "incidence")?.0)))
}

/// Identifier of row `row`, as a newly allocated string.
#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_row_id(
    a: *const BibnetIncidence,
    row: usize,
    out: *mut *mut c_char,
) -> BibnetStatus {
    guard(|| {
        let a = deref(a, "incidence")?;
        let entity =
            a.0.rows()
                .get(row)
                .ok_or_else(|| (BibnetStatus::OutOfRange, format!("row {row} out of range")))?;
        write_out(out, into_c_string(entity.id().to_string())?)
    })
}

/// Parses an `entity_id,group_id` map.
#[no_mangle]
pub unsafe extern "C" fn bibnet_map_parse(
    data: *const u8,
    len: usize,
    from: BibnetLevel,
    to: BibnetLevel,
    out: *mut *mut BibnetMap,
) -> BibnetStatus {
    guard(|| {
        let map = parse_aggregation_map(bytes(data, len)?, level(from), level(to))
            .map_err(fail(BibnetStatus::Parse))?;
        write_out(out, Box::into_raw(Box::new(BibnetMap(map))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_map_free(map: *mut BibnetMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_incidence_aggregate(
    a: *const BibnetIncidence,
    map: *const BibnetMap,
    out: *mut *mut BibnetIncidence,
) -> BibnetStatus {
    guard(|| {
        let a = deref(a, "incidence")?;
        let map = deref(map, "map")?;
        let g = aggregate_incidence(&a.0, &map.0).map_err(fail(BibnetStatus::Aggregation))?;
        write_out(out, Box::into_raw(Box::new(BibnetIncidence(g))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_project(
    a: *const BibnetIncidence,
    out: *mut *mut BibnetNetwork,
) -> BibnetStatus {
    guard(|| {
        let b = project(&deref(a, "incidence")?.0);
        write_out(out, Box::into_raw(Box::new(BibnetNetwork(b))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_free(b: *mut BibnetNetwork) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_size(b: *const BibnetNetwork) -> usize {
    b.as_ref().map_or(0, |b| b.0.size())
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_get(
    b: *const BibnetNetwork,
    i: usize,
    j: usize,
    out: *mut f64,
) -> BibnetStatus {
    guard(|| {
        let b = deref(b, "network")?;
        if i >= b.0.size() || j >= b.0.size() {
            return Err((BibnetStatus::OutOfRange, format!("({i}, {j}) out of range")));
        }
        write_out(out, b.0.get(i, j))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_mass(
    b: *const BibnetNetwork,
    out: *mut f64,
) -> BibnetStatus {
    guard(|| write_out(out, network_mass(&deref(b, "network")?.0)))
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_network_decompose(
    b: *const BibnetNetwork,
    self_mass: *mut f64,
    collaboration_mass: *mut f64,
) -> BibnetStatus {
    guard(|| {
        let (d, u) =
            mass_decomposition(&deref(b, "network")?.0).map_err(fail(BibnetStatus::Projection))?;
        write_out(self_mass, d)?;
        write_out(collaboration_mass, u)
    })
}

/// Serializes `b`; the result must be freed with [`bibnet_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bibnet_network_export(
    b: *const BibnetNetwork,
    format: BibnetFormat,
    include_self_loops: bool,
    out: *mut *mut c_char,
) -> BibnetStatus {
    guard(|| {
        let b = &deref(b, "network")?.0;
        let text = match format {
            BibnetFormat::Edgelist => export_edgelist(b, include_self_loops),
            BibnetFormat::Pajek => export_pajek(b, include_self_loops),
            BibnetFormat::Graphml => export_graphml(b, include_self_loops),
        };
        write_out(out, into_c_string(text)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn bibnet_audit(
    a: *const BibnetIncidence,
    tolerance: f64,
    out: *mut BibnetAudit,
) -> BibnetStatus {
    guard(|| {
        let r = audit_conservation(&deref(a, "incidence")?.0, tolerance)
            .map_err(fail(BibnetStatus::InvalidArgument))?;
        write_out(
            out,
            BibnetAudit {
                incidence_mass: r.incidence_mass,
                network_mass: r.network_mass,
                self_mass: r.self_mass,
                collaboration_mass: r.collaboration_mass,
                expected: r.expected,
                column_violations: r.column_violations.len(),
                conserved: r.conserved,
            },
        )
    })
}

/// The `key=value` report block as a newly allocated string.
#[no_mangle]
pub unsafe extern "C" fn bibnet_audit_render(
    a: *const BibnetIncidence,
    tolerance: f64,
    out: *mut *mut c_char,
) -> BibnetStatus {
    guard(|| {
        let r = audit_conservation(&deref(a, "incidence")?.0, tolerance)
            .map_err(fail(BibnetStatus::InvalidArgument))?;
        write_out(out, into_c_string(r.render())?)
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bibnet_status_str(status: BibnetStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BibnetStatus::Ok => c"ok",
        BibnetStatus::NullPointer => c"null pointer",
        BibnetStatus::InvalidArgument => c"invalid argument",
        BibnetStatus::Parse => c"parse error",
        BibnetStatus::Counting => c"counting error",
        BibnetStatus::Aggregation => c"aggregation error",
        BibnetStatus::Projection => c"projection error",
        BibnetStatus::OutOfRange => c"index out of range",
        BibnetStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}
