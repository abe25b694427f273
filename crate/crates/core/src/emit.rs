//! Report serialization: JSON with 17 significant digits, CSV projections
//! of the report and a MANIFEST of SHA-256 content hashes.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pipeline::{InstrumentReport, Report, SeriesReport, ThresholdReport};

/// Shortest text that always carries 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

struct RealFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for RealFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_real(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON in which every real carries 17 significant digits and
/// non-finite reals become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, RealFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: Report = serde_json::from_str(&text)?;
    if report.schema != crate::pipeline::SCHEMA {
        return Err(Error::Config(format!(
            "unsupported report schema {}",
            report.schema
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Also write one interval CSV per (instrument, source, q).
    pub intervals: bool,
}

type Row = Vec<String>;

struct Table {
    header: &'static [&'static str],
    rows: Vec<Row>,
}

impl Table {
    fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// `1` becomes `1.0` so file names sort and read like thresholds.
fn q_label(q: f64) -> String {
    let s = format!("{q}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

fn each_threshold<'a>(
    report: &'a Report,
) -> impl Iterator<Item = (&'a InstrumentReport, &'a SeriesReport, &'a ThresholdReport)> {
    report
        .instruments
        .iter()
        .flat_map(|i| i.series().map(move |s| (i, s)))
        .flat_map(|(i, s)| s.thresholds.iter().map(move |t| (i, s, t)))
}

fn tables(report: &Report) -> BTreeMap<String, Table> {
    let mut out: BTreeMap<String, Table> = BTreeMap::new();

    let mut scaling = Table::new(&[
        "instrument",
        "source",
        "q_i",
        "q_j",
        "m",
        "n",
        "ks",
        "cv",
        "reject",
        "overlap",
    ]);
    let mut means = Table::new(&[
        "instrument",
        "source",
        "q",
        "subset",
        "tau0_scaled",
        "mean_scaled",
    ]);
    for i in &report.instruments {
        for s in i.series() {
            for p in s.scaling_matrix.iter().flatten() {
                let r = &p.result;
                scaling.rows.push(vec![
                    i.label.clone(),
                    s.source.to_string(),
                    fmt_real(p.q_i),
                    fmt_real(p.q_j),
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt_real(r.ks),
                    fmt_real(r.cv),
                    r.reject.to_string(),
                    r.overlap.to_string(),
                ]);
            }
            for p in s.conditional_means.iter().flat_map(|c| &c.points) {
                means.rows.push(vec![
                    i.label.clone(),
                    s.source.to_string(),
                    fmt_real(p.q),
                    p.subset.to_string(),
                    fmt_real(p.tau0_scaled),
                    fmt_real(p.mean_scaled),
                ]);
            }
        }
    }
    out.insert("scaling_matrix.csv".into(), scaling);
    out.insert("conditional_means.csv".into(), means);

    let mut fits = Table::new(&[
        "instrument",
        "source",
        "q",
        "n_intervals",
        "mean_interval",
        "tau_min",
        "a",
        "c",
        "gamma",
        "ks_stat",
        "n_truncated",
        "loglik",
        "p_ks",
        "p_ks_stderr",
        "p_cvm",
        "p_cvm_stderr",
        "n_boot",
    ]);
    let mut exponents = Table::new(&[
        "instrument",
        "source",
        "q",
        "method",
        "exponent",
        "stderr",
        "n_points",
        "s_lo",
        "s_hi",
    ]);
    let mut histograms = Table::new(&[
        "instrument",
        "source",
        "q",
        "statistic",
        "observed",
        "bin_lo",
        "bin_hi",
        "count",
    ]);
    for (i, s, t) in each_threshold(report) {
        let src = s.source.to_string();
        if let Some(f) = &t.fit {
            let p = &f.params;
            let (pk, pks, pc, pcs, nb) = match &t.gof {
                Some(g) => (
                    fmt_real(g.ks.p_value),
                    fmt_real(g.ks.mc_stderr),
                    fmt_real(g.cvm.p_value),
                    fmt_real(g.cvm.mc_stderr),
                    g.ks.n_boot.to_string(),
                ),
                None => Default::default(),
            };
            fits.rows.push(vec![
                i.label.clone(),
                src.clone(),
                fmt_real(t.q),
                t.n_intervals.to_string(),
                opt_real(t.mean_interval),
                fmt_real(p.tau_min),
                fmt_real(p.a),
                fmt_real(p.c),
                fmt_real(p.gamma),
                fmt_real(f.ks_stat),
                f.n_truncated.to_string(),
                fmt_real(f.loglik),
                pk,
                pks,
                pc,
                pcs,
                nb,
            ]);
        }
        for g in t.gof.iter().flat_map(|g| [&g.ks, &g.cvm]) {
            let name = format!("{:?}", g.statistic).to_lowercase();
            for (k, &count) in g.histogram.counts.iter().enumerate() {
                histograms.rows.push(vec![
                    i.label.clone(),
                    src.clone(),
                    fmt_real(t.q),
                    name.clone(),
                    fmt_real(g.observed),
                    fmt_real(g.histogram.edges[k]),
                    fmt_real(g.histogram.edges[k + 1]),
                    count.to_string(),
                ]);
            }
        }
        for h in &t.hazard {
            let table = out
                .entry(format!("hazard_{}_{}.csv", q_label(t.q), h.dt))
                .or_insert_with(|| {
                    Table::new(&[
                        "instrument",
                        "source",
                        "t",
                        "empirical",
                        "n_at_risk",
                        "empirical_flag",
                        "model",
                        "model_flag",
                    ])
                });
            for (k, e) in h.empirical.points.iter().enumerate() {
                let m = h.model.as_ref().map(|m| &m.points[k]);
                table.rows.push(vec![
                    i.label.clone(),
                    src.clone(),
                    fmt_real(e.t),
                    opt_real(e.w),
                    e.n_at_risk.map(|n| n.to_string()).unwrap_or_default(),
                    flag_text(e.flag),
                    opt_real(m.and_then(|m| m.w)),
                    flag_text(m.and_then(|m| m.flag)),
                ]);
            }
        }
        for fl in t.memory.iter().flat_map(|m| &m.fluctuations) {
            let table = out
                .entry(format!("fluctuation_{}.csv", fl.method))
                .or_insert_with(|| Table::new(&["instrument", "source", "q", "s", "f"]));
            for p in &fl.function.points {
                table.rows.push(vec![
                    i.label.clone(),
                    src.clone(),
                    fmt_real(t.q),
                    p.s.to_string(),
                    fmt_real(p.f),
                ]);
            }
            if let Some(fit) = &fl.fit {
                exponents.rows.push(vec![
                    i.label.clone(),
                    src.clone(),
                    fmt_real(t.q),
                    fl.method.clone(),
                    fmt_real(fit.exponent),
                    fmt_real(fit.stderr),
                    fit.n_points.to_string(),
                    fmt_real(fit.x_lo),
                    fmt_real(fit.x_hi),
                ]);
            }
        }
    }
    out.insert("fits.csv".into(), fits);
    out.insert("exponents.csv".into(), exponents);
    out.insert("gof_histograms.csv".into(), histograms);
    out
}

fn flag_text<T: Serialize>(flag: Option<T>) -> String {
    flag.and_then(|f| serde_json::to_value(f).ok())
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn csv_bytes(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Csv {
        path: PathBuf::new(),
        message: e.to_string(),
    };
    w.write_record(table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Csv {
        path: PathBuf::new(),
        message: e.to_string(),
    })
}

fn interval_files(report: &Report) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for (i, s, t) in each_threshold(report) {
        let source = s.source.to_string().replace(['(', ')', '=', ' '], "");
        let name = format!(
            "intervals/{}_{}_{}.csv",
            sanitize(&i.label),
            source,
            q_label(t.q)
        );
        files.push((name, t.series(s.source)?.csv_text().into_bytes()));
    }
    Ok(files)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes the report, its CSV projections and a MANIFEST into `dir`.
/// Returns the written paths relative to `dir`, MANIFEST last.
pub fn emit(report: &Report, dir: impl AsRef<Path>, options: EmitOptions) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files: Vec<(String, Vec<u8>)> =
        vec![("report.json".into(), to_json(report)?.into_bytes())];
    for (name, table) in tables(report) {
        if !table.rows.is_empty() {
            files.push((name, csv_bytes(&table)?));
        }
    }
    if options.intervals {
        files.extend(interval_files(report)?);
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));

    let mut manifest = String::new();
    let mut written = Vec::with_capacity(files.len() + 1);
    for (name, bytes) in &files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        manifest.push_str(&format!("{}  {name}\n", hex::encode(Sha256::digest(bytes))));
        written.push(PathBuf::from(name));
    }
    let path = dir.join("MANIFEST");
    std::fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    written.push(PathBuf::from("MANIFEST"));
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::AnalysisConfig;

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_real(f64::NAN), "");
        for x in [0.1, 1.0 / 3.0, 2446.0, 1e-300, -7.25e12] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
        let json = to_json(&serde_json::json!({"x": 0.1, "n": 3, "bad": f64::NAN})).unwrap();
        assert!(json.contains("1.0000000000000001e-1"));
        assert!(json.contains("\"n\": 3"));
        assert!(json.contains("null"));
    }

    #[test]
    fn empty_report_writes_json_and_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = Report::new(AnalysisConfig::default());
        let files = emit(&report, dir.path(), EmitOptions::default()).unwrap();
        assert_eq!(
            files,
            vec![PathBuf::from("report.json"), PathBuf::from("MANIFEST")]
        );
        let manifest = std::fs::read_to_string(dir.path().join("MANIFEST")).unwrap();
        assert_eq!(manifest.lines().count(), 1);
        let back = read_report(dir.path().join("report.json")).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn threshold_labels() {
        assert_eq!(q_label(1.0), "1.0");
        assert_eq!(q_label(1.2), "1.2");
        assert_eq!(q_label(2.25), "2.25");
    }

    proptest::proptest! {
        #[test]
        fn reals_round_trip_through_json(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let text = to_json(&vec![x]).unwrap();
            let back: Vec<f64> = serde_json::from_str(&text).unwrap();
            proptest::prop_assert_eq!(back[0].to_bits(), x.to_bits());
        }
    }
}
