//! Writes clustering and invariant outputs into a directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gwnet_core::invariants::SizeCurve;
use gwnet_core::{Dendrogram, DissimilarityMatrix};

use crate::error::{Error, Result};
use crate::io::{create, write_curve_csv, write_labelled_matrix};

/// Writes `a,b,height,size` rows, one per merge.
pub fn write_merges_csv<W: Write>(writer: W, dendrogram: &Dendrogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["a", "b", "height", "size"])?;
    for m in &dendrogram.merges {
        w.write_record([m.a.to_string(), m.b.to_string(), m.height.to_string(), m.size.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Writes whichever of `dissimilarity.csv`, `dendrogram.nwk`, `merges.csv`
/// and `curve_<name>.csv` apply, creating `out_dir` if needed. Returns the
/// written paths.
pub fn emit_outputs(
    out_dir: &Path,
    dissimilarity: Option<&DissimilarityMatrix>,
    dendrogram: Option<&Dendrogram>,
    curves: &[(String, SizeCurve)],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    if let Some(d) = dissimilarity {
        let path = out_dir.join("dissimilarity.csv");
        write_labelled_matrix(create(&path)?, d.labels(), d.values())?;
        written.push(path);
    }
    if let Some(g) = dendrogram {
        let path = out_dir.join("dendrogram.nwk");
        fs::write(&path, g.to_newick() + "\n").map_err(|e| Error::io(&path, e))?;
        written.push(path);
        let path = out_dir.join("merges.csv");
        write_merges_csv(create(&path)?, g)?;
        written.push(path);
    }
    for (name, curve) in curves {
        let path = out_dir.join(format!("curve_{name}.csv"));
        write_curve_csv(create(&path)?, curve)?;
        written.push(path);
    }
    Ok(written)
}
