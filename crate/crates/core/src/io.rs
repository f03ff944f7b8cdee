//! CSV traces exchanged with external tools.
//!
//! | file      | header                   |
//! |-----------|--------------------------|
//! | IMU       | `t,ax,ay,az,gx,gy,gz`    |
//! | truth     | `t,pitch,pitch_rate`     |
//! | estimates | `t,pitch_est`            |
//!
//! Headers are mandatory. Numbers are written in shortest round-trip decimal
//! form, so a write followed by a read reproduces every value bit for bit.

use std::io::{Read, Write};

use thiserror::Error;

use crate::attitude::{ImuSample, Vec3};
use crate::estimate::EstimateSeries;
use crate::sim::GroundTruthSample;

pub const IMU_HEADER: [&str; 7] = ["t", "ax", "ay", "az", "gx", "gy", "gz"];
pub const TRUTH_HEADER: [&str; 3] = ["t", "pitch", "pitch_rate"];
pub const ESTIMATES_HEADER: [&str; 2] = ["t", "pitch_est"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line 1: expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("missing header line")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn read_rows<R: Read, const N: usize>(
    reader: R,
    header: [&str; N],
) -> Result<Vec<[f64; N]>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let first = match records.next() {
        None => return Err(CsvError::MissingHeader),
        Some(r) => r.map_err(|e| from_csv(e, 1))?,
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(CsvError::Header {
            expected: header.join(","),
            found: first.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| from_csv(e, 0))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != N {
            return Err(CsvError::Malformed {
                line,
                message: format!("expected {N} fields, found {}", rec.len()),
            });
        }
        let mut row = [0.0; N];
        for (i, (field, name)) in rec.iter().zip(header).enumerate() {
            row[i] = match field.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    return Err(CsvError::Malformed {
                        line,
                        message: format!("field `{name}`: `{field}` is not a finite number"),
                    })
                }
            };
        }
        rows.push(row);
    }
    Ok(rows)
}

fn from_csv(e: csv::Error, fallback_line: u64) -> CsvError {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CsvError::Io(io),
        kind => CsvError::Malformed {
            line,
            message: format!("{kind:?}"),
        },
    }
}

pub fn read_imu_csv<R: Read>(reader: R) -> Result<Vec<ImuSample>, CsvError> {
    Ok(read_rows(reader, IMU_HEADER)?
        .into_iter()
        .map(|[t, ax, ay, az, gx, gy, gz]| ImuSample {
            t,
            accel: Vec3::new(ax, ay, az),
            gyro: Vec3::new(gx, gy, gz),
        })
        .collect())
}

/// Truth rows carry no linear acceleration; it is read back as zero.
pub fn read_truth_csv<R: Read>(reader: R) -> Result<Vec<GroundTruthSample>, CsvError> {
    Ok(read_rows(reader, TRUTH_HEADER)?
        .into_iter()
        .map(|[t, pitch, pitch_rate]| GroundTruthSample {
            t,
            pitch,
            pitch_rate,
            linear_accel: Vec3::ZERO,
        })
        .collect())
}

pub fn read_estimates_csv<R: Read>(reader: R, estimator: &str) -> Result<EstimateSeries, CsvError> {
    let rows = read_rows(reader, ESTIMATES_HEADER)?;
    Ok(EstimateSeries {
        estimator: estimator.to_owned(),
        times: rows.iter().map(|r| r[0]).collect(),
        pitch: rows.iter().map(|r| r[1]).collect(),
    })
}

fn write_rows<W: Write, const N: usize>(
    writer: W,
    header: [&str; N],
    rows: impl Iterator<Item = [f64; N]>,
) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => CsvError::Io(io),
        kind => CsvError::Io(std::io::Error::other(format!("{kind:?}"))),
    };
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_imu_csv<W: Write>(writer: W, samples: &[ImuSample]) -> Result<(), CsvError> {
    write_rows(
        writer,
        IMU_HEADER,
        samples.iter().map(|s| {
            [
                s.t, s.accel.x, s.accel.y, s.accel.z, s.gyro.x, s.gyro.y, s.gyro.z,
            ]
        }),
    )
}

pub fn write_truth_csv<W: Write>(writer: W, truth: &[GroundTruthSample]) -> Result<(), CsvError> {
    write_rows(
        writer,
        TRUTH_HEADER,
        truth.iter().map(|s| [s.t, s.pitch, s.pitch_rate]),
    )
}

pub fn write_estimates_csv<W: Write>(writer: W, series: &EstimateSeries) -> Result<(), CsvError> {
    write_rows(
        writer,
        ESTIMATES_HEADER,
        series
            .times
            .iter()
            .zip(&series.pitch)
            .map(|(&t, &p)| [t, p]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_mandatory() {
        let err = read_truth_csv("0,0.1,0.2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CsvError::Header { .. }), "{err}");
        assert!(matches!(
            read_truth_csv("".as_bytes()),
            Err(CsvError::MissingHeader)
        ));
    }

    #[test]
    fn malformed_rows_report_line() {
        let text = "t,pitch_est\n0,0.1\n0.01,abc\n";
        match read_estimates_csv(text.as_bytes(), "x") {
            Err(CsvError::Malformed { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("pitch_est"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = "t,pitch_est\n0,0.1\n0.01,0.2\n0.02\n";
        match read_estimates_csv(text.as_bytes(), "x") {
            Err(CsvError::Malformed { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let text = "t,pitch_est\n0,NaN\n";
        assert!(matches!(
            read_estimates_csv(text.as_bytes(), "x"),
            Err(CsvError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn written_imu_has_expected_layout() {
        let s = ImuSample {
            t: 0.01,
            accel: Vec3::new(0.0, 0.0, 9.81),
            gyro: Vec3::new(0.0, -0.25, 0.0),
        };
        let mut buf = Vec::new();
        write_imu_csv(&mut buf, &[s]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,ax,ay,az,gx,gy,gz\n0.01,0,0,9.81,0,-0.25,0\n"
        );
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e3f64..1e3,
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
        ]
    }

    proptest! {
        #[test]
        fn imu_round_trip_is_exact(rows in prop::collection::vec(prop::array::uniform7(finite()), 0..20)) {
            let samples: Vec<ImuSample> = rows
                .iter()
                .map(|r| ImuSample {
                    t: r[0],
                    accel: Vec3::new(r[1], r[2], r[3]),
                    gyro: Vec3::new(r[4], r[5], r[6]),
                })
                .collect();
            let mut buf = Vec::new();
            write_imu_csv(&mut buf, &samples).unwrap();
            prop_assert_eq!(read_imu_csv(buf.as_slice()).unwrap(), samples);
        }

        #[test]
        fn readers_never_panic(data in prop::collection::vec(any::<u8>(), 0..256)) {
            let _ = read_imu_csv(data.as_slice());
            let _ = read_truth_csv(data.as_slice());
            let _ = read_estimates_csv(data.as_slice(), "x");
        }
    }
}
