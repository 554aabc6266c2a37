//! Radial profile CSV: one row per grid node, shortest round-trip decimals.

use std::fmt::Write as _;

use nvsteady::finite_radius::FiniteRadiusDiagnostics;
use nvsteady::observables::ObservableProfile;
use nvsteady::RadialProfile;

pub const HEADER: &str = "r,phi,dphi,rho,P,PT,source,mass_cum,eta,x,y,alpha,beta";
const BASE_COLUMNS: usize = 8;
const DIAG_COLUMNS: usize = 5;

pub fn write_profile(profile: &RadialProfile, obs: &ObservableProfile, diag: Option<&FiniteRadiusDiagnostics>) -> String {
    let mut by_node: Vec<Option<[f64; DIAG_COLUMNS]>> = vec![None; profile.len()];
    if let Some(d) = diag {
        for (j, &i) in d.node_index.iter().enumerate() {
            by_node[i] = Some([d.eta[j], d.x[j], d.y[j], d.alpha[j], d.beta[j]]);
        }
    }
    let mut out = String::with_capacity(200 * (profile.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for i in 0..profile.len() {
        let row = [
            profile.grid[i],
            profile.phi[i],
            profile.dphi[i],
            obs.rho[i],
            obs.pressure[i],
            obs.pressure_t[i],
            obs.source[i],
            obs.mass_cumulative[i],
        ];
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        match by_node[i] {
            Some(d) => d.iter().for_each(|v| write!(out, ",{v:?}").unwrap()),
            None => out.push_str(",,,,,"),
        }
        out.push('\n');
    }
    out
}

/// A profile CSV read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub rho: Vec<f64>,
    pub pressure: Vec<f64>,
    pub pressure_t: Vec<f64>,
    pub source: Vec<f64>,
    pub mass_cum: Vec<f64>,
    /// `[eta, x, y, alpha, beta]` where present.
    pub diagnostics: Vec<Option<[f64; DIAG_COLUMNS]>>,
}

impl ProfileTable {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Parse a profile; errors carry the 1-based line number.
pub fn read_profile(text: &str) -> Result<ProfileTable, (usize, String)> {
    if !text.ends_with('\n') {
        return Err((text.lines().count().max(1), "last row is not newline-terminated".into()));
    }
    let lines: Vec<&str> = text[..text.len() - 1].split('\n').collect();
    if lines[0] != HEADER {
        return Err((1, format!("expected header `{HEADER}`, found `{}`", lines[0])));
    }
    let mut t = ProfileTable {
        r: Vec::new(),
        phi: Vec::new(),
        dphi: Vec::new(),
        rho: Vec::new(),
        pressure: Vec::new(),
        pressure_t: Vec::new(),
        source: Vec::new(),
        mass_cum: Vec::new(),
        diagnostics: Vec::new(),
    };
    for (n, line) in lines.iter().enumerate().skip(1) {
        let line_no = n + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != BASE_COLUMNS + DIAG_COLUMNS {
            return Err((line_no, format!("expected {} fields, found {}", BASE_COLUMNS + DIAG_COLUMNS, fields.len())));
        }
        let num = |s: &str| -> Result<f64, (usize, String)> {
            s.parse::<f64>().map_err(|_| (line_no, format!("not a number: `{s}`")))
        };
        let mut base = [0.0; BASE_COLUMNS];
        for (j, v) in base.iter_mut().enumerate() {
            *v = num(fields[j])?;
        }
        let diag = &fields[BASE_COLUMNS..];
        let d = if diag.iter().all(|s| s.is_empty()) {
            None
        } else {
            let mut d = [0.0; DIAG_COLUMNS];
            for (j, v) in d.iter_mut().enumerate() {
                *v = num(diag[j])?;
            }
            Some(d)
        };
        t.r.push(base[0]);
        t.phi.push(base[1]);
        t.dphi.push(base[2]);
        t.rho.push(base[3]);
        t.pressure.push(base[4]);
        t.pressure_t.push(base[5]);
        t.source.push(base[6]);
        t.mass_cum.push(base[7]);
        t.diagnostics.push(d);
    }
    if t.is_empty() {
        return Err((2, "no data rows".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_checked() {
        assert_eq!(read_profile("r,phi\n1,2\n").unwrap_err().0, 1);
        assert!(read_profile("").is_err());
    }

    #[test]
    fn rows_parse_with_and_without_diagnostics() {
        let text = format!("{HEADER}\n0.0,-1.0,0.0,1.0,0.5,0.5,0.0,0.0,,,,,\n0.1,-0.9,1e-3,1.0,0.5,0.5,0.0,1e-9,1.0,2.0,3.0,4.0,5.0\n");
        let t = read_profile(&text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.diagnostics[0], None);
        assert_eq!(t.diagnostics[1], Some([1.0, 2.0, 3.0, 4.0, 5.0]));
        assert_eq!(t.dphi[1], 1e-3);
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let text = format!("{HEADER}\n0.0,-1.0,0.0,1.0,0.5,0.5,0.0,0.0,,,,,\n0.1,x,0,0,0,0,0,0,,,,,\n");
        assert_eq!(read_profile(&text).unwrap_err().0, 3);
        let short = format!("{HEADER}\n0.0,1.0\n");
        assert_eq!(read_profile(&short).unwrap_err().0, 2);
        let unterminated = format!("{HEADER}\n0.0,-1.0,0.0,1.0,0.5,0.5,0.0,0.0,,,,,");
        assert!(read_profile(&unterminated).is_err());
        let blank = format!("{HEADER}\n\n0.0,-1.0,0.0,1.0,0.5,0.5,0.0,0.0,,,,,\n");
        assert_eq!(read_profile(&blank).unwrap_err().0, 2);
    }
}
