use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::recurrence::RecurrencePlot;

/// Binary PGM (P5) image of `rp`: recurrences black, origin at the bottom left.
///
/// Image row `r` shows plot row `n - 1 - r`; image column `c` is plot column `c`.
pub fn rp_raster(rp: &RecurrencePlot) -> Vec<u8> {
    let n = rp.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.reserve(n * n);
    for r in 0..n {
        let i = n - 1 - r;
        out.extend((0..n).map(|j| if rp.get(i, j) { 0u8 } else { 255u8 }));
    }
    out
}

pub fn export_rp_raster(rp: &RecurrencePlot, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rp.n() == 0 {
        return Err(Error::InvalidConfig("empty recurrence plot".into()));
    }
    fs::write(path, rp_raster(rp)).map_err(|e| Error::io(path, e))
}
