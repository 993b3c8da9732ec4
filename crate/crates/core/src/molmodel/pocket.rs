//! Rigid binding site: a voxel score grid plus the protein atoms it was
//! built from, and its `.pkt` text form.

use std::fmt::Write as _;
use std::path::Path;
use std::{fs, io};

use thiserror::Error;

use super::{Element, Vec3};

/// Value sampled for points outside the grid box.
pub const OUTSIDE: f64 = -10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProteinAtom {
    pub element: Element,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pocket {
    pub id: String,
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
    /// x-fastest: `i + nx * (j + ny * k)`.
    pub values: Vec<f64>,
    pub protein_atoms: Vec<ProteinAtom>,
}

#[derive(Debug, Error)]
pub enum PocketError {
    #[error("spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("grid needs at least 2 nodes per axis, got {0:?}")]
    BadDims([usize; 3]),
    #[error("grid has {found} values, dims require {expected}")]
    ValueCount { expected: usize, found: usize },
    #[error("grid value {index} is not finite")]
    NonFinite { index: usize },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Pocket {
    pub fn new(
        id: impl Into<String>,
        origin: Vec3,
        spacing: f64,
        dims: [usize; 3],
        values: Vec<f64>,
        protein_atoms: Vec<ProteinAtom>,
    ) -> Result<Pocket, PocketError> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(PocketError::BadSpacing(spacing));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(PocketError::BadDims(dims));
        }
        let expected = dims[0] * dims[1] * dims[2];
        if values.len() != expected {
            return Err(PocketError::ValueCount {
                expected,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(PocketError::NonFinite { index });
        }
        Ok(Pocket {
            id: id.into(),
            origin,
            spacing,
            dims,
            values,
            protein_atoms,
        })
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.spacing
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// Box edge lengths.
    pub fn extent(&self) -> Vec3 {
        Vec3::new(
            (self.dims[0] - 1) as f64,
            (self.dims[1] - 1) as f64,
            (self.dims[2] - 1) as f64,
        ) * self.spacing
    }

    pub fn center(&self) -> Vec3 {
        self.origin + self.extent() / 2.0
    }

    /// Trilinear interpolation of the grid; [`OUTSIDE`] beyond the box.
    pub fn sample(&self, p: &Vec3) -> f64 {
        let mut cell = [0usize; 3];
        let mut t = [0.0f64; 3];
        for axis in 0..3 {
            let f = (p[axis] - self.origin[axis]) / self.spacing;
            let last = self.dims[axis] - 1;
            if !(f >= 0.0 && f <= last as f64) {
                return OUTSIDE;
            }
            let i = (f.floor() as usize).min(last - 1);
            cell[axis] = i;
            t[axis] = f - i as f64;
        }
        let [i, j, k] = cell;
        let [tx, ty, tz] = t;
        let lerp = |a: f64, b: f64, w: f64| a * (1.0 - w) + b * w;
        let c00 = lerp(self.value(i, j, k), self.value(i + 1, j, k), tx);
        let c10 = lerp(self.value(i, j + 1, k), self.value(i + 1, j + 1, k), tx);
        let c01 = lerp(self.value(i, j, k + 1), self.value(i + 1, j, k + 1), tx);
        let c11 = lerp(self.value(i, j + 1, k + 1), self.value(i + 1, j + 1, k + 1), tx);
        lerp(lerp(c00, c10, ty), lerp(c01, c11, ty), tz)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let o = self.origin;
        let _ = writeln!(out, "pocket {}", self.id);
        out.push_str("version 1\n");
        let _ = writeln!(out, "origin {} {} {}", o.x, o.y, o.z);
        let _ = writeln!(out, "spacing {}", self.spacing);
        let _ = writeln!(out, "dims {} {} {}", self.dims[0], self.dims[1], self.dims[2]);
        let _ = writeln!(out, "protein_atoms {}", self.protein_atoms.len());
        for a in &self.protein_atoms {
            let p = a.position;
            let _ = writeln!(out, "{} {} {} {}", a.element.symbol(), p.x, p.y, p.z);
        }
        out.push_str("grid\n");
        for row in self.values.chunks(self.dims[0]) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Pocket, PocketError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| -> Result<(usize, Vec<&str>), PocketError> {
            loop {
                match lines.next() {
                    Some((_, "")) => continue,
                    Some((n, l)) => {
                        let fields: Vec<&str> = l.split_whitespace().collect();
                        if fields[0] != what {
                            return Err(PocketError::Format {
                                line: n,
                                reason: format!("expected `{what}`, found `{}`", fields[0]),
                            });
                        }
                        return Ok((n, fields[1..].to_vec()));
                    }
                    None => {
                        return Err(PocketError::Format {
                            line: 0,
                            reason: format!("missing `{what}` line"),
                        })
                    }
                }
            }
        };
        fn nums<T: std::str::FromStr>(line: usize, fields: &[&str], count: usize) -> Result<Vec<T>, PocketError> {
            if fields.len() != count {
                return Err(PocketError::Format {
                    line,
                    reason: format!("expected {count} fields, found {}", fields.len()),
                });
            }
            fields
                .iter()
                .map(|f| {
                    f.parse::<T>().map_err(|_| PocketError::Format {
                        line,
                        reason: format!("cannot parse `{f}`"),
                    })
                })
                .collect()
        }

        let (_, id) = next("pocket")?;
        let id = id.join(" ");
        let (n, version) = next("version")?;
        if version != ["1"] {
            return Err(PocketError::Format {
                line: n,
                reason: format!("unsupported version {}", version.join(" ")),
            });
        }
        let (n, f) = next("origin")?;
        let o: Vec<f64> = nums(n, &f, 3)?;
        let (n, f) = next("spacing")?;
        let spacing: f64 = nums(n, &f, 1)?[0];
        let (n, f) = next("dims")?;
        let d: Vec<usize> = nums(n, &f, 3)?;
        let (n, f) = next("protein_atoms")?;
        let count: usize = nums(n, &f, 1)?[0];
        let mut protein_atoms = Vec::with_capacity(count);
        let mut rest = text.lines().enumerate().skip(n);
        for _ in 0..count {
            let (i, line) = rest.next().ok_or(PocketError::Format {
                line: 0,
                reason: "protein atom list is truncated".into(),
            })?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let element = Element::from_symbol(fields.first().copied().unwrap_or(""));
            let xyz: Vec<f64> = nums(i + 1, fields.get(1..).unwrap_or(&[]), 3)?;
            protein_atoms.push(ProteinAtom {
                element,
                position: Vec3::new(xyz[0], xyz[1], xyz[2]),
            });
        }
        match rest.next() {
            Some((_, "grid")) => {}
            other => {
                return Err(PocketError::Format {
                    line: other.map_or(0, |(i, _)| i + 1),
                    reason: "expected `grid`".into(),
                })
            }
        }
        let mut values = Vec::new();
        for (i, line) in rest {
            for f in line.split_whitespace() {
                values.push(f.parse::<f64>().map_err(|_| PocketError::Format {
                    line: i + 1,
                    reason: format!("cannot parse grid value `{f}`"),
                })?);
            }
        }
        Pocket::new(id, Vec3::new(o[0], o[1], o[2]), spacing, [d[0], d[1], d[2]], values, protein_atoms)
    }

    pub fn write(&self, path: &Path) -> Result<(), PocketError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Pocket, PocketError> {
        Pocket::from_text(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Pocket {
        let mut values = vec![0.0; 8];
        values[1] = 1.0;
        let atoms = vec![ProteinAtom {
            element: Element::O,
            position: Vec3::new(0.25, -1.0, 3.5),
        }];
        Pocket::new("cube", Vec3::zeros(), 1.0, [2, 2, 2], values, atoms).unwrap()
    }

    #[test]
    fn trilinear_on_a_single_cell() {
        let p = cube();
        assert_eq!(p.sample(&Vec3::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(p.sample(&Vec3::new(0.5, 0.0, 0.0)), 0.5);
        // weight of the (1,0,0) corner is x(1-y)(1-z)
        assert!((p.sample(&Vec3::new(0.5, 0.5, 0.5)) - 0.125).abs() < 1e-15);
        assert!((p.sample(&Vec3::new(0.8, 0.25, 0.5)) - 0.8 * 0.75 * 0.5).abs() < 1e-15);
        assert_eq!(p.sample(&Vec3::new(1.01, 0.0, 0.0)), OUTSIDE);
        assert_eq!(p.sample(&Vec3::new(f64::NAN, 0.0, 0.0)), OUTSIDE);
    }

    #[test]
    fn text_round_trip() {
        let mut p = cube();
        p.values[5] = -10.0;
        p.values[6] = 0.1 + 0.2;
        let back = Pocket::from_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Pocket::new("x", Vec3::zeros(), 1.0, [1, 2, 2], vec![0.0; 4], vec![]),
            Err(PocketError::BadDims(_))
        ));
        let text = cube().to_text().replace("dims 2 2 2", "dims 2 2 3");
        assert!(matches!(Pocket::from_text(&text), Err(PocketError::ValueCount { .. })));
        let text = cube().to_text().replace("version 1", "version 9");
        assert!(matches!(Pocket::from_text(&text), Err(PocketError::Format { line: 2, .. })));
    }
}
