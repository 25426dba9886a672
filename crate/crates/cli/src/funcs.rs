//! The test-function registry for the trace estimators: three built-ins
//! and user tables loaded from (x, f(x)) CSV with linear interpolation.

use std::path::Path;

use anyhow::{bail, Context, Result};
use diracsum_core::interval::NamedFunction;

pub const BUILTINS: &[(&str, &str)] = &[
    ("const1", "f(x) = 1, integral 1"),
    ("linear", "f(x) = x, integral 1/2"),
    ("square", "f(x) = x^2, integral 1/3"),
    ("user-table", "piecewise-linear interpolation of an (x, f(x)) CSV covering [0,1]"),
];

pub fn list() -> String {
    BUILTINS
        .iter()
        .map(|(name, desc)| format!("{name:12} {desc}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Resolves a function name; `table_path` backs the `user-table` name.
pub fn resolve(name: &str, table_path: Option<&Path>) -> Result<NamedFunction> {
    match name {
        "const1" => Ok(NamedFunction::const1()),
        "linear" => Ok(NamedFunction::linear()),
        "square" => Ok(NamedFunction::square()),
        "user-table" => {
            let path = table_path.context("user-table needs --table PATH")?;
            load_table(path)
        }
        other => bail!("unknown test function {other:?}; known: const1, linear, square, user-table"),
    }
}

/// Loads (x, f(x)) rows, sorts by x, and interpolates linearly. The table
/// must cover [0, 1]; support points outside the table range would have
/// no defined value.
pub fn load_table(path: &Path) -> Result<NamedFunction> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading table {}", path.display()))?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            bail!("{}:{}: expected two columns", path.display(), lineno + 1);
        }
        let x: f64 = parts[0]
            .parse()
            .with_context(|| format!("{}:{}: bad x", path.display(), lineno + 1))?;
        let y: f64 = parts[1]
            .parse()
            .with_context(|| format!("{}:{}: bad f(x)", path.display(), lineno + 1))?;
        rows.push((x, y));
    }
    if rows.len() < 2 {
        bail!("table {} needs at least two rows", path.display());
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
    if lo > 0.0 || hi < 1.0 {
        bail!(
            "table {} covers [{lo}, {hi}] but must cover [0, 1]",
            path.display()
        );
    }
    // trapezoid integral over [0,1] of the interpolant
    let eval = move |rows: &[(f64, f64)], x: f64| -> f64 {
        let idx = rows.partition_point(|&(rx, _)| rx <= x);
        if idx == 0 {
            return rows[0].1;
        }
        if idx == rows.len() {
            return rows[rows.len() - 1].1;
        }
        let (x0, y0) = rows[idx - 1];
        let (x1, y1) = rows[idx];
        if x1 == x0 {
            y0
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    };
    let mut integral = 0.0;
    let steps = 4096;
    for i in 0..steps {
        let a = i as f64 / steps as f64;
        let b = (i + 1) as f64 / steps as f64;
        integral += 0.5 * (eval(&rows, a) + eval(&rows, b)) * (b - a);
    }
    let rows_for_closure = rows.clone();
    Ok(NamedFunction {
        name: "user-table".into(),
        f: Box::new(move |x| eval(&rows_for_closure, x)),
        integral: Some(integral),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn builtins_evaluate() {
        let f = resolve("const1", None).unwrap();
        assert_eq!((f.f)(0.37), 1.0);
        let f = resolve("linear", None).unwrap();
        assert_eq!((f.f)(0.75), 0.75);
        let f = resolve("square", None).unwrap();
        assert_eq!((f.f)(0.5), 0.25);
    }

    #[test]
    fn table_interpolates_and_integrates() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "0, 0").unwrap();
        writeln!(file, "1, 2").unwrap();
        let f = load_table(file.path()).unwrap();
        assert!(((f.f)(0.5) - 1.0).abs() < 1e-12);
        assert!((f.integral.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn table_must_cover_unit_interval() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "0.2, 1").unwrap();
        writeln!(file, "1, 1").unwrap();
        match load_table(file.path()) {
            Err(err) => assert!(err.to_string().contains("must cover"), "{err}"),
            Ok(_) => panic!("partial table accepted"),
        }
    }
}
