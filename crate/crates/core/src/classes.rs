//! Exact eigenvalue data, conjugacy classes and instances, and the scalar
//! invariants `d_j`, `r_j`, the rigidity index and the trace/determinant check.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{d_of_jnf, r_of_jnf, Jnf, MultiplicityVector, Partition};

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"`. Decimal and exponent forms are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let ok = !t.is_empty()
        && t.split('/').count() <= 2
        && t.split('/').all(|part| {
            let digits = part.strip_prefix(['-', '+']).unwrap_or(part);
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        });
    if !ok {
        return Err(Error::validation(format!("`{s}` is not an exact rational of the form p/q")));
    }
    Rational::from_str(t).map_err(|e| Error::validation(format!("`{s}`: {e}")))
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// An element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    /// Shorthand for the real rational `numer/denom`.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::real(rat(numer, denom))
    }

    pub fn int(v: i64) -> Self {
        Self::frac(v, 1)
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    /// Representative with real part in `[0, 1)`; two values agree here iff
    /// they differ by a real integer.
    pub fn mod_integers(&self) -> Self {
        GaussianRational {
            re: &self.re - self.re.floor(),
            im: self.im.clone(),
        }
    }

    pub fn scale(&self, k: usize) -> Self {
        let k = Rational::from_integer(BigInt::from(k));
        GaussianRational {
            re: &self.re * &k,
            im: &self.im * &k,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Largest of `|re|` and `|im|`, used for search bounds.
    pub fn max_abs(&self) -> Rational {
        let (a, b) = (self.re.abs(), self.im.abs());
        if a > b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_rational(&self.im))
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{}i", format_rational(&self.re), format_rational(&self.im.abs()))
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GaussianRational", 2)?;
        st.serialize_field("re", &format_rational(&self.re))?;
        st.serialize_field("im", &format_rational(&self.im))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            re: String,
            #[serde(default)]
            im: Option<String>,
        }
        let raw = Raw::deserialize(d)?;
        let re = parse_rational(&raw.re).map_err(serde::de::Error::custom)?;
        let im = match raw.im {
            Some(s) => parse_rational(&s).map_err(serde::de::Error::custom)?,
            None => Rational::zero(),
        };
        Ok(GaussianRational { re, im })
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: GaussianRational) -> GaussianRational {
        &self + &o
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Mul<&Rational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, k: &Rational) -> GaussianRational {
        GaussianRational {
            re: &self.re * k,
            im: &self.im * k,
        }
    }
}

/// Additive classes hold the eigenvalues themselves; multiplicative classes
/// hold logarithms `q` with eigenvalue `exp(2 pi i q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Additive,
    Multiplicative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Additive => write!(f, "additive"),
            Mode::Multiplicative => write!(f, "multiplicative"),
        }
    }
}

impl Mode {
    /// Whether an exact sum of eigenvalue values satisfies the sum/product
    /// condition: zero, resp. a real integer.
    pub fn sum_is_trivial(self, sum: &GaussianRational) -> bool {
        match self {
            Mode::Additive => sum.is_zero(),
            Mode::Multiplicative => sum.is_real_integer(),
        }
    }
}

/// An eigenvalue together with the mode that interprets it.
#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub value: GaussianRational,
    pub mode: Mode,
}

impl Eigenvalue {
    pub fn new(value: GaussianRational, mode: Mode) -> Self {
        Eigenvalue { value, mode }
    }

    /// The complex number this eigenvalue stands for.
    pub fn numeric(&self) -> Complex64 {
        let z = self.value.to_complex();
        match self.mode {
            Mode::Additive => z,
            Mode::Multiplicative => (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * z).exp(),
        }
    }
}

impl PartialEq for Eigenvalue {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && match self.mode {
                Mode::Additive => self.value == other.value,
                Mode::Multiplicative => (&self.value - &other.value).is_real_integer(),
            }
    }
}

/// One conjugacy class: a JNF and one exact eigenvalue per slot.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSpec {
    mode: Mode,
    jnf: Jnf,
    eigenvalues: Vec<GaussianRational>,
}

impl ClassSpec {
    pub fn new(mode: Mode, jnf: Jnf, eigenvalues: Vec<GaussianRational>) -> Result<Self> {
        if jnf.slots().len() != eigenvalues.len() {
            return Err(Error::validation(format!(
                "{} eigenvalue slots but {} eigenvalues",
                jnf.slots().len(),
                eigenvalues.len()
            )));
        }
        let spec = ClassSpec { mode, jnf, eigenvalues };
        for a in 0..spec.eigenvalues.len() {
            for b in a + 1..spec.eigenvalues.len() {
                if spec.eigenvalue(a) == spec.eigenvalue(b) {
                    return Err(Error::validation(format!(
                        "eigenvalues {} and {} of one class coincide{}",
                        spec.eigenvalues[a],
                        spec.eigenvalues[b],
                        if mode == Mode::Multiplicative { " modulo integers" } else { "" }
                    )));
                }
            }
        }
        Ok(spec)
    }

    /// Diagonalizable class from `(eigenvalue, multiplicity)` pairs.
    pub fn diagonal(mode: Mode, entries: &[(GaussianRational, usize)]) -> Result<Self> {
        let jnf = Jnf::try_new(entries.iter().map(|(_, m)| Partition::ones(*m)).collect())?;
        Self::new(mode, jnf, entries.iter().map(|(v, _)| v.clone()).collect())
    }

    /// Diagonal class with distinct eigenvalues.
    pub fn distinct(mode: Mode, values: &[GaussianRational]) -> Result<Self> {
        let entries: Vec<_> = values.iter().map(|v| (v.clone(), 1)).collect();
        Self::diagonal(mode, &entries)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn jnf(&self) -> &Jnf {
        &self.jnf
    }

    pub fn eigenvalues(&self) -> &[GaussianRational] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, slot: usize) -> Eigenvalue {
        Eigenvalue::new(self.eigenvalues[slot].clone(), self.mode)
    }

    pub fn size(&self) -> usize {
        self.jnf.size()
    }

    /// Multiplicity of each slot's eigenvalue.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.jnf.multiplicities()
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.jnf.is_diagonal()
    }

    pub fn multiplicity_vector(&self) -> Option<MultiplicityVector> {
        self.jnf.multiplicity_vector()
    }

    /// Sum of eigenvalue values repeated with multiplicity.
    pub fn trace_sum(&self) -> GaussianRational {
        let mut sum = GaussianRational::zero();
        for (v, m) in self.eigenvalues.iter().zip(self.multiplicities()) {
            sum += &v.scale(m);
        }
        sum
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        ClassSpec::new(mode, self.jnf.clone(), self.eigenvalues.clone())
    }
}

/// `p + 1` classes of a common size `n` and mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    mode: Mode,
    n: usize,
    classes: Vec<ClassSpec>,
}

impl Instance {
    pub fn new(mode: Mode, classes: Vec<ClassSpec>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::validation(format!(
                "need at least two classes (p >= 1), got {}",
                classes.len()
            )));
        }
        let n = classes[0].size();
        if n == 0 {
            return Err(Error::validation("classes of size 0"));
        }
        for (j, c) in classes.iter().enumerate() {
            if c.size() != n {
                return Err(Error::validation(format!(
                    "class {} has size {} but class 1 has size {n}",
                    j + 1,
                    c.size()
                )));
            }
            if c.mode() != mode {
                return Err(Error::validation(format!(
                    "class {} is {} but the instance is {mode}",
                    j + 1,
                    c.mode()
                )));
            }
        }
        Ok(Instance { mode, n, classes })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of classes minus one.
    pub fn p(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn classes(&self) -> &[ClassSpec] {
        &self.classes
    }

    pub fn class(&self, j: usize) -> &ClassSpec {
        &self.classes[j]
    }

    pub fn all_diagonalizable(&self) -> bool {
        self.classes.iter().all(ClassSpec::is_diagonalizable)
    }

    pub fn trace_sum(&self) -> GaussianRational {
        let mut sum = GaussianRational::zero();
        for c in &self.classes {
            sum += &c.trace_sum();
        }
        sum
    }
}

/// Scalar invariants of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedQuantities {
    pub n: usize,
    pub d: Vec<usize>,
    pub r: Vec<usize>,
    pub kappa: i64,
    pub trace_sum: GaussianRational,
    pub trace_ok: bool,
    pub convention2: bool,
}

impl DerivedQuantities {
    /// `r_2 + ... + r_{p+1}`.
    pub fn r_tail_sum(&self) -> usize {
        self.r.iter().skip(1).sum()
    }

    pub fn d_sum(&self) -> usize {
        self.d.iter().sum()
    }
}

/// Whether class 1 is diagonal with `n` distinct eigenvalues.
pub fn convention2_holds(inst: &Instance) -> bool {
    inst.class(0).jnf() == &Jnf::distinct(inst.n())
}

/// Rigidity index `2n^2 - sum d_j` of a list of JNFs of common size `n`.
pub fn kappa_of(n: usize, d: &[usize]) -> i64 {
    2 * (n * n) as i64 - d.iter().sum::<usize>() as i64
}

pub fn validate_instance(inst: &Instance) -> Result<DerivedQuantities> {
    // re-check the structural invariants: an Instance is only built through
    // Instance::new, but serde and clones of old data pass through here too
    let rebuilt = Instance::new(inst.mode(), inst.classes().to_vec())?;
    for (j, c) in rebuilt.classes().iter().enumerate() {
        ClassSpec::new(c.mode(), c.jnf().clone(), c.eigenvalues().to_vec())
            .map_err(|e| Error::validation(format!("class {}: {e}", j + 1)))?;
    }
    let n = inst.n();
    let d: Vec<usize> = inst.classes().iter().map(|c| d_of_jnf(c.jnf())).collect();
    let r: Vec<usize> = inst.classes().iter().map(|c| r_of_jnf(c.jnf())).collect();
    let trace_sum = inst.trace_sum();
    Ok(DerivedQuantities {
        n,
        kappa: kappa_of(n, &d),
        d,
        r,
        trace_ok: inst.mode().sum_is_trivial(&trace_sum),
        trace_sum,
        convention2: convention2_holds(inst),
    })
}

/// Reinterprets additive eigenvalues `lambda` as multiplicative logs, i.e.
/// `sigma = exp(2 pi i lambda)`, keeping every JNF.
pub fn exponentiate_instance(inst: &Instance) -> Result<Instance> {
    if inst.mode() != Mode::Additive {
        return Err(Error::precondition("exponentiation needs an additive instance"));
    }
    let classes = inst
        .classes()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            c.with_mode(Mode::Multiplicative).map_err(|_| {
                Error::validation(format!(
                    "class {}: two eigenvalues differ by a non-zero integer and collide under exp(2 pi i .)",
                    j + 1
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(Mode::Multiplicative, classes)
}

/// `2 pi i`-periodicity aside, whether the instance has a class with two
/// eigenvalues at a non-zero integer distance.
pub fn has_integer_difference(inst: &Instance) -> bool {
    inst.classes().iter().any(|c| {
        let ev = c.eigenvalues();
        (0..ev.len()).any(|a| (a + 1..ev.len()).any(|b| (&ev[a] - &ev[b]).is_real_integer()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::frac(n, d)
    }

    fn hypergeometric_n2() -> Instance {
        let m = Mode::Additive;
        Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(0, 1), g(1, 3)]).unwrap(),
                ClassSpec::distinct(m, &[g(0, 1), g(-1, 2)]).unwrap(),
                ClassSpec::distinct(m, &[g(1, 4), g(-1, 12)]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        for bad in ["0.5", "1e3", "", "1/0", "a/b", "1/2/3", "/2", "NaN"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(format_rational(&rat(-3, 4)), "-3/4");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }

    #[test]
    fn generic_hypergeometric_quantities() {
        let dq = validate_instance(&hypergeometric_n2()).unwrap();
        assert_eq!(dq.d, vec![2, 2, 2]);
        assert_eq!(dq.r, vec![1, 1, 1]);
        assert_eq!(dq.kappa, 2);
        assert!(dq.trace_ok);
        assert!(dq.convention2);
    }

    #[test]
    fn case_a_quantities() {
        let m = Mode::Additive;
        let inst = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(1, 1), g(2, 1), g(3, 1), g(4, 1)]).unwrap(),
                ClassSpec::diagonal(m, &[(g(0, 1), 2), (g(1, 1), 2)]).unwrap(),
                ClassSpec::diagonal(m, &[(g(0, 1), 2), (g(-6, 1), 2)]).unwrap(),
            ],
        )
        .unwrap();
        let dq = validate_instance(&inst).unwrap();
        // 16 - 4 = 12 and 16 - 4 - 4 = 8
        assert_eq!(dq.d, vec![12, 8, 8]);
        assert_eq!(dq.kappa, 4);
        assert!(dq.trace_ok);
    }

    #[test]
    fn nonzero_trace_is_reported() {
        let m = Mode::Additive;
        let inst = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(0, 1), g(1, 1)]).unwrap(),
                ClassSpec::distinct(m, &[g(0, 1), g(-1, 2)]).unwrap(),
            ],
        )
        .unwrap();
        let dq = validate_instance(&inst).unwrap();
        assert_eq!(dq.trace_sum, g(1, 2));
        assert!(!dq.trace_ok);
    }

    #[test]
    fn construction_errors() {
        let m = Mode::Additive;
        assert!(ClassSpec::distinct(m, &[g(1, 2), g(2, 4)]).is_err());
        assert!(ClassSpec::distinct(Mode::Multiplicative, &[g(1, 2), g(3, 2)]).is_err());
        assert!(ClassSpec::distinct(Mode::Multiplicative, &[g(1, 2), g(1, 3)]).is_ok());
        let two = ClassSpec::distinct(m, &[g(0, 1), g(1, 1)]).unwrap();
        let three = ClassSpec::distinct(m, &[g(0, 1), g(1, 1), g(2, 1)]).unwrap();
        assert!(Instance::new(m, vec![two.clone(), three]).is_err());
        assert!(Instance::new(m, vec![two.clone()]).is_err());
        let mult = ClassSpec::distinct(Mode::Multiplicative, &[g(0, 1), g(1, 2)]).unwrap();
        assert!(Instance::new(m, vec![two, mult]).is_err());
    }

    #[test]
    fn multiplicative_equality_is_modulo_integers() {
        let a = Eigenvalue::new(g(1, 3), Mode::Multiplicative);
        let b = Eigenvalue::new(g(-2, 3), Mode::Multiplicative);
        assert_eq!(a, b);
        let c = Eigenvalue::new(GaussianRational::new(rat(1, 3), rat(1, 1)), Mode::Multiplicative);
        assert_ne!(a, c);
        assert!((Eigenvalue::new(g(1, 2), Mode::Multiplicative).numeric() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exponentiation() {
        let m = Mode::Additive;
        let ok = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(0, 1), g(1, 2)]).unwrap(),
                ClassSpec::distinct(m, &[g(0, 1), g(-1, 2)]).unwrap(),
            ],
        )
        .unwrap();
        let e = exponentiate_instance(&ok).unwrap();
        assert_eq!(e.mode(), Mode::Multiplicative);
        assert_eq!(e.class(0).eigenvalues(), &[g(0, 1), g(1, 2)]);
        let sigmas: Vec<Complex64> = (0..2).map(|k| e.class(0).eigenvalue(k).numeric()).collect();
        assert!((sigmas[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((sigmas[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        let clash = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(0, 1), g(1, 1)]).unwrap(),
                ClassSpec::distinct(m, &[g(0, 1), g(-1, 1)]).unwrap(),
            ],
        )
        .unwrap();
        assert!(has_integer_difference(&clash));
        assert!(matches!(exponentiate_instance(&clash), Err(Error::Validation(_))));
        assert!(exponentiate_instance(&e).is_err());
    }

    #[test]
    fn trace_ok_survives_exponentiation() {
        let inst = hypergeometric_n2();
        assert!(validate_instance(&inst).unwrap().trace_ok);
        let e = exponentiate_instance(&inst).unwrap();
        let dq = validate_instance(&e).unwrap();
        assert!(dq.trace_ok);
        assert_eq!(dq.trace_sum, GaussianRational::zero());
    }

    #[test]
    fn convention2_forces_r1() {
        let dq = validate_instance(&hypergeometric_n2()).unwrap();
        assert_eq!(dq.r[0], dq.n - 1);
    }

    #[test]
    fn kappa_invariant_under_corresponding_jnf() {
        use crate::partitions::corresponding_jnfs;
        let m = Mode::Additive;
        let base = vec![
            ClassSpec::distinct(m, &[g(1, 1), g(2, 1), g(3, 1), g(4, 1), g(5, 1), g(6, 1)]).unwrap(),
            ClassSpec::diagonal(m, &[(g(0, 1), 2), (g(1, 1), 2), (g(2, 1), 2)]).unwrap(),
            ClassSpec::diagonal(m, &[(g(0, 1), 4), (g(1, 1), 2)]).unwrap(),
        ];
        let k0 = validate_instance(&Instance::new(m, base.clone()).unwrap()).unwrap().kappa;
        assert_eq!(k0, 2);
        for j in 1..3 {
            let mv = base[j].multiplicity_vector().unwrap();
            for alt in corresponding_jnfs(&mv, 6).unwrap() {
                let values: Vec<_> = (0..alt.slots().len()).map(|k| g(10 * j as i64 + k as i64, 1)).collect();
                let mut classes = base.clone();
                classes[j] = ClassSpec::new(m, alt, values).unwrap();
                let k = validate_instance(&Instance::new(m, classes).unwrap()).unwrap().kappa;
                assert_eq!(k, k0);
            }
        }
    }
}
