//! JSON channel description.
//!
//! ```json
//! { "dim": 2, "z_cond": [[0.9, 0.1], [0.1, 0.9]], "x_dist": [0.8, 0.2], "label": "bsc" }
//! { "dim": 2, "kraus": [ [[[1,0],[0,0]], [[0,0],[1,0]]] ], "label": "identity" }
//! ```
//!
//! `z_cond[b][a]` is `p(b|a)`. Kraus entries are `[re, im]` pairs indexed
//! `kraus[k][row][col]`. Exactly one of the two forms must be present.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qkdkr_core::channels::{channel_from_kraus, ChannelModel, KrausSet};
use qkdkr_core::numerics::ComplexMatrix;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim: usize,
    z_cond: Option<Vec<Vec<f64>>>,
    x_dist: Option<Vec<f64>>,
    kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    label: Option<String>,
}

fn field_err(path: &Path, field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: field `{field}`: {msg}", path.display()))
}

pub fn read_channel_file(path: &Path) -> CliResult<ChannelModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_channel(&text, path)
}

pub fn parse_channel(text: &str, path: &Path) -> CliResult<ChannelModel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    let dim = file.dim;
    let label = file.label.unwrap_or_else(|| {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| String::from("file"))
    });
    let model = match (file.z_cond, file.x_dist, file.kraus) {
        (Some(z), Some(x), None) => {
            if z.len() != dim {
                return Err(field_err(path, "z_cond", format!("has {} rows, dim is {dim}", z.len())));
            }
            if let Some(b) = z.iter().position(|row| row.len() != dim) {
                return Err(field_err(path, &format!("z_cond[{b}]"), format!("has {} entries, dim is {dim}", z[b].len())));
            }
            if x.len() != dim {
                return Err(field_err(path, "x_dist", format!("has {} entries, dim is {dim}", x.len())));
            }
            ChannelModel::new(&z, x, label.clone()).map_err(|e| field_err(path, "z_cond/x_dist", e))?
        }
        (None, None, Some(k)) => {
            let mut ops = Vec::with_capacity(k.len());
            for (i, op) in k.iter().enumerate() {
                if op.len() != dim || op.iter().any(|row| row.len() != dim) {
                    return Err(field_err(path, &format!("kraus[{i}]"), format!("is not {dim}x{dim}")));
                }
                let data = op.iter().flatten().map(|[re, im]| Complex64::new(*re, *im)).collect();
                ops.push(ComplexMatrix::from_vec(dim, data).map_err(|e| field_err(path, "kraus", e))?);
            }
            let set = KrausSet::new(ops).map_err(|e| field_err(path, "kraus", e))?;
            channel_from_kraus(&set).map_err(|e| field_err(path, "kraus", e))?
        }
        (None, None, None) => {
            return Err(CliError::Input(format!(
                "{}: give either `z_cond` with `x_dist`, or `kraus`",
                path.display()
            )))
        }
        (z, x, Some(_)) if z.is_some() || x.is_some() => {
            return Err(CliError::Input(format!(
                "{}: `kraus` cannot be combined with `z_cond` or `x_dist`",
                path.display()
            )))
        }
        (z, _, _) => {
            let missing = if z.is_some() { "x_dist" } else { "z_cond" };
            return Err(field_err(path, missing, "missing; `z_cond` and `x_dist` go together"));
        }
    };
    Ok(model.with_label(label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> CliResult<ChannelModel> {
        parse_channel(s, Path::new("test.json"))
    }

    #[test]
    fn table_form() {
        let m = parse(r#"{"dim":2,"z_cond":[[0.9,0.2],[0.1,0.8]],"x_dist":[0.7,0.3],"label":"t"}"#).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.label(), "t");
        assert!((m.p(1, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn kraus_form() {
        let m = parse(r#"{"dim":2,"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#).unwrap();
        assert_eq!(m.p(0, 0), 1.0);
        assert_eq!(m.label(), "test");
    }

    #[test]
    fn rejects_both_and_neither() {
        let both = r#"{"dim":2,"z_cond":[[1,0],[0,1]],"x_dist":[1,0],"kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(parse(both).unwrap_err().to_string().contains("cannot be combined"));
        assert!(parse(r#"{"dim":2}"#).unwrap_err().to_string().contains("either"));
        assert!(parse(r#"{"dim":2,"z_cond":[[1,0],[0,1]]}"#).unwrap_err().to_string().contains("x_dist"));
    }

    #[test]
    fn diagnostics_name_location() {
        let e = parse("{\"dim\":2,\n\"z_cond\": [[1,0],[0,1]],\n\"x_dist\": [1,0,]}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = parse(r#"{"dim":2,"z_cond":[[1,0],[0]],"x_dist":[1,0]}"#).unwrap_err();
        assert!(e.to_string().contains("z_cond[1]"), "{e}");
        let e = parse(r#"{"dim":2,"z_cond":[[0.5,0],[0.2,1]],"x_dist":[1,0]}"#).unwrap_err();
        assert!(e.to_string().contains("z_cond"), "{e}");
        let e = parse(r#"{"dim":2,"kraus":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#).unwrap_err();
        assert!(e.to_string().contains("completeness"), "{e}");
        let e = parse(r#"{"dim":2,"zcond":[]}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{e}");
    }
}
