//! CSV schemas for traces, spectra, dispersion curves, recovery data and
//! impedance tables. Header row, `.` decimal separator, shortest
//! round-trip float formatting.

use std::io::{Read, Write};

use crate::antenna::{EfficiencyCurve, ImpedanceTable};
use crate::error::{Error, Result};
use crate::qp::QpTrace;
use crate::spectrum::PowerSpectrum;
use crate::telegraph::TelegraphTrace;
use crate::transmon::DispersionCurve;

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::CsvParse {
        line,
        message: format!("bad float {field:?}: {e}"),
    })
}

fn read_columns<R: Read>(reader: R, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::CsvParse { line: 1, message: e.to_string() })?;
    let got: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    if got != expected {
        return Err(Error::CsvParse {
            line: 1,
            message: format!("expected header {expected:?}, got {got:?}"),
        });
    }
    let mut cols = vec![Vec::new(); expected.len()];
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::CsvParse { line, message: e.to_string() })?;
        if record.len() != expected.len() {
            return Err(Error::CsvParse {
                line,
                message: format!("expected {} fields, got {}", expected.len(), record.len()),
            });
        }
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            col.push(parse_f64(field, line)?);
        }
    }
    Ok(cols)
}

fn write_rows<W: Write>(writer: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header).map_err(io_err)?;
    for row in rows {
        wtr.write_record(row.iter().map(|v| format!("{v}"))).map_err(io_err)?;
    }
    wtr.flush()?;
    Ok(())
}

fn io_err(e: csv::Error) -> Error {
    Error::CsvParse { line: 0, message: e.to_string() }
}

pub fn write_trace<W: Write>(writer: W, trace: &TelegraphTrace) -> Result<()> {
    write_rows(
        writer,
        &["t_s", "parity"],
        trace
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| vec![k as f64 * trace.dt, v as f64]),
    )
}

pub fn read_trace<R: Read>(reader: R) -> Result<TelegraphTrace> {
    let cols = read_columns(reader, &["t_s", "parity"])?;
    let (ts, ps) = (&cols[0], &cols[1]);
    if ts.len() < 2 {
        return Err(Error::CsvParse { line: 2, message: "need at least two samples".into() });
    }
    let dt = ts[1] - ts[0];
    let mut values = Vec::with_capacity(ps.len());
    for (i, &p) in ps.iter().enumerate() {
        if p != 1.0 && p != -1.0 {
            return Err(Error::CsvParse {
                line: i + 2,
                message: format!("parity must be +-1, got {p}"),
            });
        }
        values.push(p as i8);
    }
    let trace = TelegraphTrace { dt, values, seed: 0, true_rate: None, fidelity: None };
    trace.validate()?;
    Ok(trace)
}

pub fn write_spectrum<W: Write>(writer: W, spectrum: &PowerSpectrum) -> Result<()> {
    write_rows(
        writer,
        &["f_hz", "s_pp_per_hz"],
        spectrum.freqs.iter().zip(&spectrum.psd).map(|(&f, &p)| vec![f, p]),
    )
}

pub fn read_spectrum<R: Read>(reader: R) -> Result<PowerSpectrum> {
    let cols = read_columns(reader, &["f_hz", "s_pp_per_hz"])?;
    PowerSpectrum::from_points(cols[0].iter().copied().zip(cols[1].iter().copied()).collect(), 1)
}

pub fn write_dispersion<W: Write>(writer: W, curve: &DispersionCurve) -> Result<()> {
    write_rows(
        writer,
        &["ng", "f01_even_ghz", "f01_odd_ghz"],
        curve
            .ng_grid
            .iter()
            .zip(&curve.f01_even)
            .zip(&curve.f01_odd)
            .map(|((&ng, &fe), &fo)| vec![ng, fe, fo]),
    )
}

pub fn write_qp_trace<W: Write>(writer: W, trace: &QpTrace) -> Result<()> {
    write_rows(
        writer,
        &["tau_qp_s", "x_qp"],
        trace.times.iter().zip(&trace.x_qp).map(|(&t, &x)| vec![t, x]),
    )
}

pub fn read_qp_trace<R: Read>(reader: R) -> Result<QpTrace> {
    let cols = read_columns(reader, &["tau_qp_s", "x_qp"])?;
    let trace = QpTrace { times: cols[0].clone(), x_qp: cols[1].clone() };
    trace.validate()?;
    Ok(trace)
}

/// Recovery data given as excess decay rate; converted by the caller.
pub fn read_gamma1_trace<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let cols = read_columns(reader, &["tau_qp_s", "delta_gamma1_per_s"])?;
    Ok((cols[0].clone(), cols[1].clone()))
}

pub fn write_impedance<W: Write>(writer: W, table: &ImpedanceTable) -> Result<()> {
    write_rows(
        writer,
        &["f_hz", "re_z_ohm", "im_z_ohm"],
        table
            .freqs
            .iter()
            .zip(&table.z_real)
            .zip(&table.z_imag)
            .map(|((&f, &re), &im)| vec![f, re, im]),
    )
}

pub fn read_impedance<R: Read>(reader: R, label: &str) -> Result<ImpedanceTable> {
    let cols = read_columns(reader, &["f_hz", "re_z_ohm", "im_z_ohm"])?;
    ImpedanceTable::new(cols[0].clone(), cols[1].clone(), cols[2].clone(), label)
}

pub fn write_efficiency<W: Write>(writer: W, curve: &EfficiencyCurve) -> Result<()> {
    write_rows(
        writer,
        &["f_hz", "e_c"],
        curve.freqs.iter().zip(&curve.e_c).map(|(&f, &e)| vec![f, e]),
    )
}

pub fn write_rate_vs_temperature<W: Write>(writer: W, rows: &[(f64, f64)]) -> Result<()> {
    write_rows(writer, &["t_star_k", "rate_hz"], rows.iter().map(|&(t, r)| vec![t, r]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telegraph::simulate_telegraph;

    #[test]
    fn trace_roundtrip_is_lossless() {
        let trace = simulate_telegraph(33.3, 1e-3, 0.5, 9).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.values, trace.values);
        assert!((back.dt - trace.dt).abs() < 1e-15);
    }

    #[test]
    fn spectrum_roundtrip_is_lossless() {
        let trace = simulate_telegraph(33.3, 1e-3, 0.5, 9).unwrap();
        let spec = crate::spectrum::estimate_psd(&trace, 250, 0.5).unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &spec).unwrap();
        let back = read_spectrum(buf.as_slice()).unwrap();
        assert_eq!(back.freqs, spec.freqs);
        assert_eq!(back.psd, spec.psd);
    }

    #[test]
    fn impedance_roundtrip_is_lossless() {
        let table = crate::antenna::synthetic::xmon_like();
        let mut buf = Vec::new();
        write_impedance(&mut buf, &table).unwrap();
        let back = read_impedance(buf.as_slice(), &table.source_label).unwrap();
        assert_eq!(back.freqs, table.freqs);
        assert_eq!(back.z_real, table.z_real);
        assert_eq!(back.z_imag, table.z_imag);
    }

    #[test]
    fn bad_header_names_the_problem() {
        let err = read_trace("time,parity\n0,1\n".as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("t_s"), "message: {msg}");
    }

    #[test]
    fn bad_parity_value_reports_line() {
        let err = read_trace("t_s,parity\n0,1\n0.001,2\n".as_bytes()).unwrap_err();
        match err {
            Error::CsvParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
