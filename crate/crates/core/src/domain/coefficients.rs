use std::fmt;

use crate::error::{Error, Result};

/// Nonlinear term shapes of the general template. Indices `m`, `k` refer to
/// the two components appearing in the product.
///
/// | type | term |
/// |------|------|
/// | 1 | `θm θk_x` |
/// | 2 | `(θm)^2 θk_x` |
/// | 3 | `θm_x θk_x` |
/// | 4 | `θm θk_xx` |
/// | 5 | `θm θk θk_x` |
pub const TERM_TYPES: usize = 5;

/// One nonzero nonlinear coefficient, 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub value: f64,
}

/// Dense coefficient tensors `g[n][l][m][k]` and dispersion `d[n]`.
///
/// Public accessors are 1-based; unset entries are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    n: usize,
    g: Vec<f64>,
    d: Vec<f64>,
}

impl CoefficientSet {
    pub fn zeros(n_components: usize) -> Result<Self> {
        if n_components == 0 {
            return Err(Error::param("n_components", "must be at least 1"));
        }
        let n = n_components;
        Ok(CoefficientSet { n, g: vec![0.0; n * TERM_TYPES * n * n], d: vec![0.0; n] })
    }

    /// Build from sparse records; out-of-range indices are rejected.
    pub fn from_terms(n_components: usize, terms: &[Term], d: &[(usize, f64)]) -> Result<Self> {
        let mut c = Self::zeros(n_components)?;
        for t in terms {
            c.set_g(t.n, t.l, t.m, t.k, t.value)?;
        }
        for &(n, v) in d {
            c.set_d(n, v)?;
        }
        Ok(c)
    }

    pub fn n_components(&self) -> usize {
        self.n
    }

    fn index(&self, n: usize, l: usize, m: usize, k: usize) -> Result<usize> {
        let ok = |i: usize, hi: usize| (1..=hi).contains(&i);
        if !(ok(n, self.n) && ok(l, TERM_TYPES) && ok(m, self.n) && ok(k, self.n)) {
            return Err(Error::param(
                "g",
                format!("index (n={n}, l={l}, m={m}, k={k}) outside 1..={} / type 1..=5", self.n),
            ));
        }
        Ok((((n - 1) * TERM_TYPES + (l - 1)) * self.n + (m - 1)) * self.n + (k - 1))
    }

    pub fn set_g(&mut self, n: usize, l: usize, m: usize, k: usize, value: f64) -> Result<()> {
        let i = self.index(n, l, m, k)?;
        self.g[i] = value;
        Ok(())
    }

    /// Entry `g^{n,l}_{m,k}`; zero for out-of-range indices.
    pub fn g(&self, n: usize, l: usize, m: usize, k: usize) -> f64 {
        self.index(n, l, m, k).map(|i| self.g[i]).unwrap_or(0.0)
    }

    pub fn set_d(&mut self, n: usize, value: f64) -> Result<()> {
        if !(1..=self.n).contains(&n) {
            return Err(Error::param("d", format!("index {n} outside 1..={}", self.n)));
        }
        self.d[n - 1] = value;
        Ok(())
    }

    pub fn d(&self, n: usize) -> f64 {
        if (1..=self.n).contains(&n) {
            self.d[n - 1]
        } else {
            0.0
        }
    }

    /// All nonzero `g` entries in index order.
    pub fn nonzero_terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for n in 1..=self.n {
            for l in 1..=TERM_TYPES {
                for m in 1..=self.n {
                    for k in 1..=self.n {
                        let value = self.g(n, l, m, k);
                        if value != 0.0 {
                            out.push(Term { n, l, m, k, value });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dispersion(&self) -> &[f64] {
        &self.d
    }

    pub fn max_abs_g(&self) -> f64 {
        self.g.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_d(&self) -> f64 {
        self.d.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.g.iter().chain(&self.d).all(|v| v.is_finite())
    }
}

/// Result of [`validate_coefficients`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientDiagnostics {
    pub valid: bool,
    pub issues: Vec<String>,
    /// Nonzero `g` entries per equation, equation 1 first.
    pub nonzero_g_per_equation: Vec<usize>,
    pub nonzero_g: usize,
    pub nonzero_d: usize,
}

impl fmt::Display for CoefficientDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            if self.nonzero_g == 0 && self.nonzero_d == 0 {
                return write!(f, "valid, 0 nonzero terms");
            }
            write!(f, "valid, {} nonzero g entries, {} nonzero d", self.nonzero_g, self.nonzero_d)
        } else {
            write!(f, "invalid: {}", self.issues.join("; "))
        }
    }
}

/// Check raw coefficient records before they are packed into a set.
pub fn validate_terms(n_components: usize, terms: &[Term], d: &[(usize, f64)]) -> CoefficientDiagnostics {
    let mut issues = Vec::new();
    let mut per_eq = vec![0; n_components];
    let in_range = |i: usize| (1..=n_components).contains(&i);
    for t in terms {
        if !(in_range(t.n) && in_range(t.m) && in_range(t.k) && (1..=TERM_TYPES).contains(&t.l)) {
            issues.push(format!("g index (n={}, l={}, m={}, k={}) out of range", t.n, t.l, t.m, t.k));
            continue;
        }
        if !t.value.is_finite() {
            issues.push(format!("g(n={}, l={}, m={}, k={}) is not finite", t.n, t.l, t.m, t.k));
        }
        if t.value != 0.0 {
            per_eq[t.n - 1] += 1;
        }
    }
    let mut nonzero_d = 0;
    for &(n, v) in d {
        if !in_range(n) {
            issues.push(format!("d index {n} out of range"));
            continue;
        }
        if !v.is_finite() {
            issues.push(format!("d({n}) is not finite"));
        }
        if v != 0.0 {
            nonzero_d += 1;
        }
    }
    CoefficientDiagnostics {
        valid: issues.is_empty(),
        issues,
        nonzero_g: per_eq.iter().sum(),
        nonzero_g_per_equation: per_eq,
        nonzero_d,
    }
}

/// Range and finiteness report plus nonzero counts.
pub fn validate_coefficients(c: &CoefficientSet) -> CoefficientDiagnostics {
    let d: Vec<(usize, f64)> = (1..=c.n).map(|n| (n, c.d(n))).collect();
    let mut terms = Vec::new();
    for n in 1..=c.n {
        for l in 1..=TERM_TYPES {
            for m in 1..=c.n {
                for k in 1..=c.n {
                    let value = c.g(n, l, m, k);
                    if value != 0.0 {
                        terms.push(Term { n, l, m, k, value });
                    }
                }
            }
        }
    }
    validate_terms(c.n, &terms, &d)
}

/// A named coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPreset {
    pub name: &'static str,
    pub coefficients: CoefficientSet,
    pub description: &'static str,
}

pub const PRESET_NAMES: [&str; 2] = ["kdv-scalar", "kdv-mkdv-3"];

fn term(n: usize, l: usize, m: usize, k: usize, value: f64) -> Term {
    Term { n, l, m, k, value }
}

pub fn preset_system(name: &str) -> Result<SystemPreset> {
    match name {
        "kdv-scalar" => Ok(SystemPreset {
            name: "kdv-scalar",
            coefficients: CoefficientSet::from_terms(1, &[term(1, 1, 1, 1, -1.5)], &[(1, -0.25)])?,
            description: "u_t - 1/4 u_xxx - 3/2 u u_x = 0",
        }),
        "kdv-mkdv-3" => {
            // Components (f, u, v) = (1, 2, 3).
            let terms = [
                term(1, 1, 2, 1, 1.5),
                term(1, 1, 1, 2, 1.5),
                term(1, 2, 1, 1, -0.75),
                term(2, 1, 2, 2, -1.5),
                term(2, 1, 3, 3, 3.0),
                term(2, 2, 1, 2, 0.75),
                term(2, 3, 1, 3, -1.5),
                term(2, 4, 3, 1, -1.5),
                term(3, 1, 2, 3, 1.5),
                term(3, 2, 1, 3, -0.75),
                term(3, 3, 1, 2, 1.5),
                term(3, 4, 1, 2, 0.75),
                term(3, 5, 3, 1, -1.5),
            ];
            Ok(SystemPreset {
                name: "kdv-mkdv-3",
                coefficients: CoefficientSet::from_terms(3, &terms, &[(1, 0.5), (2, -0.25), (3, 0.5)])?,
                description: "coupled KdV-MKdV system for (f, u, v): \
                    f_t + 1/2 f_xxx + 3/2 (uf)_x - 3/4 f_x f^2 = 0; \
                    u_t - 1/4 u_xxx - 3/2 u_x u + 3 v v_x + 3/4 u_x f^2 - 3/2 (f_x v)_x = 0; \
                    v_t + 1/2 v_xxx + 3/2 v_x u - 3/4 (v f^2)_x + 3/4 u_xx f + 3/2 u_x f_x = 0",
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kdv_scalar_entries() {
        let p = preset_system("kdv-scalar").unwrap();
        let c = &p.coefficients;
        assert_eq!(c.n_components(), 1);
        assert_eq!(c.g(1, 1, 1, 1), -1.5);
        assert_eq!(c.d(1), -0.25);
        assert_eq!(c.nonzero_terms().len(), 1);
    }

    #[test]
    fn coupled_preset_counts() {
        let c = preset_system("kdv-mkdv-3").unwrap().coefficients;
        let diag = validate_coefficients(&c);
        assert!(diag.valid);
        assert_eq!(diag.nonzero_g_per_equation, vec![3, 5, 5]);
        assert_eq!(diag.to_string(), "valid, 13 nonzero g entries, 3 nonzero d");
    }

    #[test]
    fn coupled_preset_selected_entries() {
        let c = preset_system("kdv-mkdv-3").unwrap().coefficients;
        assert_eq!(c.g(1, 1, 2, 1), 1.5);
        assert_eq!(c.g(2, 1, 3, 3), 3.0);
        assert_eq!(c.g(2, 4, 3, 1), -1.5);
        assert_eq!(c.g(3, 5, 3, 1), -1.5);
        assert_eq!(c.g(3, 5, 1, 3), 0.0);
        assert_eq!(c.dispersion(), &[0.5, -0.25, 0.5]);
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(preset_system("unknown"), Err(Error::UnknownPreset("unknown".into())));
    }

    #[test]
    fn presets_are_deterministic() {
        for name in PRESET_NAMES {
            assert_eq!(preset_system(name).unwrap(), preset_system(name).unwrap());
        }
    }

    #[test]
    fn all_zero_set_is_valid() {
        let c = CoefficientSet::zeros(2).unwrap();
        assert_eq!(validate_coefficients(&c).to_string(), "valid, 0 nonzero terms");
    }

    #[test]
    fn nan_entry_flagged() {
        let mut c = CoefficientSet::zeros(2).unwrap();
        c.set_g(2, 3, 1, 2, f64::NAN).unwrap();
        let diag = validate_coefficients(&c);
        assert!(!diag.valid);
        assert!(diag.to_string().starts_with("invalid"));
    }

    #[test]
    fn out_of_range_records() {
        let diag = validate_terms(2, &[term(3, 1, 1, 1, 1.0), term(1, 6, 1, 1, 1.0)], &[(0, 1.0)]);
        assert_eq!(diag.issues.len(), 3);
        assert!(CoefficientSet::zeros(2).unwrap().set_g(1, 0, 1, 1, 1.0).is_err());
    }
}
