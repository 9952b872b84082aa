//! Python module `pyphisigma`.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use phisigma::arith;
use phisigma::certificate::{self, SolutionCertificate};
use phisigma::exceptional::{self, factored_text};
use phisigma::family::{self, FamilyVector, IdentityReport};
use phisigma::irreducible;
use phisigma::search::{self as search_mod, SearchOptions};
use phisigma::zsigmondy;
use phisigma::{Error, Factorization, FieldSpec, Polynomial};

pyo3::create_exception!(pyphisigma, IntegrityError, pyo3::exceptions::PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Usage(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        Error::Resource(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Integrity(_) => IntegrityError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for phisigma::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// The finite field F_q, optionally with an explicit modulus for q = p^k.
#[pyclass(name = "Field", module = "pyphisigma", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyField(FieldSpec);

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (q, modulus = None))]
    fn new(q: u32, modulus: Option<&str>) -> PyResult<Self> {
        let base = FieldSpec::new(q).py()?;
        match modulus {
            None => Ok(PyField(base)),
            Some(_) if base.is_prime_field() => Err(PyValueError::new_err(format!("q = {q} is prime; no modulus needed"))),
            Some(m) => {
                let coeffs = phisigma::text::parse_modulus(m, base.p()).py()?;
                Ok(PyField(FieldSpec::with_modulus(base.p(), &coeffs).py()?))
            }
        }
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn modulus(&self) -> Option<String> {
        self.0.modulus_text()
    }

    /// Parses a polynomial in T over this field.
    fn poly(&self, text: &str) -> PyResult<PyPoly> {
        PyPoly::new(self, text)
    }

    fn __repr__(&self) -> String {
        match self.0.modulus_text() {
            Some(m) => format!("Field({}, modulus={m:?})", self.0.q()),
            None => format!("Field({})", self.0.q()),
        }
    }
}

/// A polynomial in F_q[T].
#[pyclass(name = "Poly", module = "pyphisigma", frozen, eq, hash, ord, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PyPoly(Polynomial);

impl PyPoly {
    fn factorization(&self) -> PyResult<Factorization> {
        let depth = (self.0.degree().unwrap_or(0) / 2).max(1);
        let table = irreducible::build_table(self.0.field(), depth).py()?;
        phisigma::factor(&self.0, &table).py()
    }

    fn same_field(&self, other: &PyPoly) -> PyResult<()> {
        if self.0.field() == other.0.field() {
            Ok(())
        } else {
            Err(PyValueError::new_err("polynomials live over different fields"))
        }
    }
}

#[pymethods]
impl PyPoly {
    #[new]
    fn new(field: &PyField, text: &str) -> PyResult<Self> {
        Ok(PyPoly(phisigma::parse_poly(text, &field.0).py()?))
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField(self.0.field().clone())
    }

    /// Degree, or None for the zero polynomial.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.0.degree()
    }

    fn is_monic(&self) -> bool {
        self.0.is_monic()
    }

    /// Units and zero are not irreducible; scalar multiples are ignored.
    fn is_irreducible(&self) -> PyResult<bool> {
        if self.0.degree().unwrap_or(0) == 0 {
            return Ok(false);
        }
        irreducible::is_irreducible(&self.0.monic()).py()
    }

    /// |F| = q^deg F.
    fn norm(&self) -> PyResult<BigUint> {
        self.0.norm().py()
    }

    /// Monic prime factors with exponents, ascending.
    fn factor(&self) -> PyResult<Vec<(PyPoly, u32)>> {
        Ok(self.factorization()?.factors().iter().map(|(p, e)| (PyPoly(p.clone()), *e)).collect())
    }

    fn phi(&self) -> PyResult<BigUint> {
        Ok(arith::phi(&self.factorization()?))
    }

    fn sigma(&self) -> PyResult<BigUint> {
        Ok(arith::sigma(&self.factorization()?))
    }

    fn sigma_nm(&self) -> PyResult<BigUint> {
        Ok(arith::sigma_nm(&self.factorization()?))
    }

    fn sigma_tilde(&self) -> PyResult<PyPoly> {
        Ok(PyPoly(arith::sigma_tilde(&self.factorization()?)))
    }

    fn phi_tilde(&self) -> PyResult<PyPoly> {
        Ok(PyPoly(arith::phi_tilde(&self.factorization()?)))
    }

    fn mobius(&self) -> PyResult<i32> {
        Ok(phisigma::mobius(&self.factorization()?))
    }

    fn __add__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.same_field(other)?;
        Ok(PyPoly(&self.0 + &other.0))
    }

    fn __sub__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.same_field(other)?;
        Ok(PyPoly(&self.0 - &other.0))
    }

    fn __mul__(&self, other: &PyPoly) -> PyResult<PyPoly> {
        self.same_field(other)?;
        Ok(PyPoly(&self.0 * &other.0))
    }

    fn __pow__(&self, e: u32, _modulo: Option<Py<PyAny>>) -> PyPoly {
        PyPoly(self.0.pow(e))
    }

    fn __divmod__(&self, other: &PyPoly) -> PyResult<(PyPoly, PyPoly)> {
        self.same_field(other)?;
        let (q, r) = self.0.divrem(&other.0).py()?;
        Ok((PyPoly(q), PyPoly(r)))
    }

    fn gcd(&self, other: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.gcd(&other.0).py()?))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({:?}, q={})", self.0.to_string(), self.0.field().q())
    }
}

fn field_of(q: u32, modulus: Option<&str>) -> PyResult<FieldSpec> {
    Ok(PyField::new(q, modulus)?.0)
}

/// Number of monic irreducibles of degree d over F_q.
#[pyfunction]
fn count_irreducibles(q: u32, d: usize) -> PyResult<u128> {
    irreducible::count_irreducibles(&FieldSpec::new(q).py()?, d).py()
}

/// Monic irreducibles of degree d in canonical order.
#[pyfunction]
#[pyo3(signature = (q, d, modulus = None))]
fn irreducibles(q: u32, d: usize, modulus: Option<&str>) -> PyResult<Vec<PyPoly>> {
    let table = irreducible::build_table(&field_of(q, modulus)?, d).py()?;
    Ok(table.of_degree(d).iter().cloned().map(PyPoly).collect())
}

/// All (F, G, value) with phi(F) = sigma(G), deg F <= max_deg_f, deg G <= max_deg_g.
#[pyfunction]
#[pyo3(signature = (q, max_deg_f, max_deg_g, jobs = None, budget = None, modulus = None))]
fn search(
    py: Python<'_>,
    q: u32,
    max_deg_f: usize,
    max_deg_g: usize,
    jobs: Option<usize>,
    budget: Option<u64>,
    modulus: Option<&str>,
) -> PyResult<Vec<(PyPoly, PyPoly, BigUint)>> {
    let field = field_of(q, modulus)?;
    let mut opts = SearchOptions::new(max_deg_f, max_deg_g);
    opts.jobs = jobs;
    if let Some(b) = budget {
        opts.budget = b;
    }
    let found = py.detach(|| search_mod::search_with(&field, &opts)).py()?;
    Ok(found.into_iter().map(|s| (PyPoly(s.f), PyPoly(s.g), s.value)).collect())
}

/// Decomposes a solution and returns its certificate as a JSON string.
#[pyfunction]
fn certify(f: &PyPoly, g: &PyPoly) -> PyResult<String> {
    Ok(certificate::decompose(&f.0, &g.0).py()?.to_json())
}

/// Failure messages for a JSON certificate; empty when it is valid.
#[pyfunction]
fn verify_certificate(json: &str) -> PyResult<Vec<String>> {
    let cert = SolutionCertificate::from_json(json).py()?;
    Ok(certificate::verify_certificate(&cert).failures)
}

/// The `index`-th member (F, G) of the family with vector v.
#[pyfunction]
#[pyo3(signature = (q, v, index = 0))]
fn family_member(q: u32, v: Vec<u32>, index: u128) -> PyResult<(PyPoly, PyPoly)> {
    let field = FieldSpec::new(q).py()?;
    let vector = FamilyVector::new(v).py()?;
    let top = vector.degrees().py()?[0];
    let table = irreducible::build_table(&field, top.clamp(1, 8)).py()?;
    let inst = family::instantiate(&vector, &table, index).py()?;
    Ok((PyPoly(inst.f().clone()), PyPoly(inst.g())))
}

/// (lhs, rhs) of the family identity, or None where it is not stated.
#[pyfunction]
#[pyo3(signature = (q, v, index = 0))]
fn family_identity(q: u32, v: Vec<u32>, index: u128) -> PyResult<Option<(BigUint, BigUint)>> {
    let field = FieldSpec::new(q).py()?;
    let vector = FamilyVector::new(v).py()?;
    let table = irreducible::build_table(&field, 4).py()?;
    let inst = family::instantiate(&vector, &table, index).py()?;
    Ok(match family::verify_identity(&inst) {
        IdentityReport::Checked { lhs, rhs, .. } => Some((lhs, rhs)),
        IdentityReport::NotApplicable(_) => None,
    })
}

/// Exceptional count profiles for q in {2, 3}, realized when `realize` is set.
#[pyfunction]
#[pyo3(signature = (q, realize = false))]
fn exceptional_profiles<'py>(py: Python<'py>, q: u32, realize: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = exceptional::DqSpec::new(q).py()?;
    let table = irreducible::build_table(&FieldSpec::new(q).py()?, spec.d_q()).py()?;
    let mut out = Vec::new();
    for p in exceptional::solve_profiles(q).py()? {
        let d = PyDict::new(py);
        d.set_item("f", p.f_counts().clone())?;
        d.set_item("g", p.g_counts().clone())?;
        d.set_item("heads", p.head_degrees())?;
        if let Some(t) = p.q3_coordinates() {
            d.set_item("tuple", t)?;
        }
        if realize {
            match exceptional::realize(&p, &table).py()? {
                Some(r) => {
                    d.set_item("F0", factored_text(&r.f0))?;
                    d.set_item("G0", factored_text(&r.g0))?;
                    d.set_item("F", factored_text(&r.f))?;
                    d.set_item("G", factored_text(&r.g))?;
                    d.set_item("value", r.value)?;
                }
                None => d.set_item("value", py.None())?,
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Head-pattern summary: n_max, excluded patterns, realizable patterns.
#[pyfunction]
fn corollary_summary<'py>(py: Python<'py>, q: u32) -> PyResult<Bound<'py, PyDict>> {
    let spec = exceptional::DqSpec::new(q).py()?;
    let table = irreducible::build_table(&FieldSpec::new(q).py()?, spec.d_q()).py()?;
    let s = exceptional::corollary_summary(q, &table).py()?;
    let d = PyDict::new(py);
    d.set_item("n_max", s.n_max)?;
    d.set_item("excluded", s.excluded)?;
    d.set_item("realizable", s.realizable.into_iter().collect::<Vec<_>>())?;
    d.set_item("largest_patterns_contain_one", s.largest_patterns_contain_one)?;
    Ok(d)
}

/// Primitive prime divisors of a^n - b^n and the exception tag, if any.
#[pyfunction]
#[pyo3(signature = (a, n, b = 1))]
fn primitive_primes(a: u64, n: u32, b: u64) -> PyResult<(Vec<u128>, Option<String>)> {
    let r = zsigmondy::primitive_prime_report(a, b, n).py()?;
    Ok((r.primitive_primes, r.exception.map(|e| e.to_string())))
}

/// Splits N = prod (a^{n_i} - 1) into the forced exponents and a residual.
#[pyfunction]
fn decompose_product(a: u64, n: BigUint) -> PyResult<(Vec<u32>, BigUint)> {
    let r = zsigmondy::decompose_product(a, &n).py()?;
    Ok((r.forced.entries(), r.residual))
}

#[pymodule]
fn pyphisigma(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyPoly>()?;
    m.add("IntegrityError", m.py().get_type::<IntegrityError>())?;
    m.add_function(wrap_pyfunction!(count_irreducibles, m)?)?;
    m.add_function(wrap_pyfunction!(irreducibles, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(family_member, m)?)?;
    m.add_function(wrap_pyfunction!(family_identity, m)?)?;
    m.add_function(wrap_pyfunction!(exceptional_profiles, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_summary, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_primes, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_product, m)?)?;
    Ok(())
}
