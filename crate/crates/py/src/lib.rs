//! Python bindings for `forcing_lab`.

use std::collections::BTreeSet;

use forcing_lab::algebra::{BooleanAlgebra, Element as CoreElement, Ultrafilter};
use forcing_lab::forcing::{forces as core_forces, hit_dense_sets_lazy, LazyCohenPoset};
use forcing_lab::lang::{ast_string, parse, parse_open};
use forcing_lab::names::{load_names, NameUniverse};
use forcing_lab::order::{complete, Completion as CoreCompletion, Poset};
use forcing_lab::quotient::{build_quotient, QuotientModel};
use forcing_lab::valuation::ValuationContext;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Powerset algebra on `atoms` atoms.
#[pyclass(name = "Algebra", module = "forcing_lab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Algebra {
    inner: BooleanAlgebra,
}

#[pyclass(name = "Element", module = "forcing_lab_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Element {
    value: CoreElement,
    algebra: BooleanAlgebra,
}

impl Element {
    fn wrap(&self, value: CoreElement) -> Element {
        Element { value, algebra: self.algebra.clone() }
    }

    fn check(&self, other: &Element) -> PyResult<()> {
        if self.algebra.atom_count() != other.algebra.atom_count() {
            return Err(PyValueError::new_err("elements of different algebras"));
        }
        Ok(())
    }
}

#[pymethods]
impl Algebra {
    #[new]
    fn new(atoms: usize) -> PyResult<Self> {
        Ok(Algebra { inner: BooleanAlgebra::new(atoms).map_err(value_error)? })
    }

    #[getter]
    fn atom_count(&self) -> usize {
        self.inner.atom_count()
    }

    fn zero(&self) -> Element {
        Element { value: self.inner.zero(), algebra: self.inner.clone() }
    }

    fn one(&self) -> Element {
        Element { value: self.inner.one(), algebra: self.inner.clone() }
    }

    /// Parses `0`, `1`, `aK`, `{a0,a1}` with `~ & | =>`.
    fn element(&self, text: &str) -> PyResult<Element> {
        let value = self.inner.parse_element(text).map_err(value_error)?;
        Ok(Element { value, algebra: self.inner.clone() })
    }

    fn elements(&self) -> Vec<Element> {
        self.inner.elements().map(|value| Element { value, algebra: self.inner.clone() }).collect()
    }

    /// Generating atoms of the ultrafilters (all principal).
    fn ultrafilters(&self) -> Vec<usize> {
        self.inner.ultrafilters().iter().map(|u| u.generator_atom()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Algebra({})", self.inner.atom_count())
    }
}

#[pymethods]
impl Element {
    fn __and__(&self, other: &Element) -> PyResult<Element> {
        self.check(other)?;
        Ok(self.wrap(self.value & other.value))
    }

    fn __or__(&self, other: &Element) -> PyResult<Element> {
        self.check(other)?;
        Ok(self.wrap(self.value | other.value))
    }

    fn __invert__(&self) -> Element {
        self.wrap(!self.value)
    }

    fn implies(&self, other: &Element) -> PyResult<Element> {
        self.check(other)?;
        Ok(self.wrap(self.value.implies(other.value)))
    }

    fn leq(&self, other: &Element) -> PyResult<bool> {
        self.check(other)?;
        Ok(self.value.leq(other.value))
    }

    fn atoms(&self) -> Vec<usize> {
        self.value.atoms().collect()
    }

    fn __hash__(&self) -> u64 {
        (u64::from(self.value.bits()) << 8) | self.algebra.atom_count() as u64
    }

    fn __str__(&self) -> String {
        self.algebra.format(self.value)
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.algebra.format(self.value))
    }
}

/// Canonical print of a formula.
#[pyfunction]
fn canonical(text: &str) -> PyResult<String> {
    Ok(parse(text).map_err(value_error)?.to_string())
}

/// S-expression syntax tree of a formula.
#[pyfunction]
fn ast(text: &str) -> PyResult<String> {
    Ok(ast_string(&parse(text).map_err(value_error)?))
}

/// A names file loaded over an algebra.
#[pyclass(name = "Universe", module = "forcing_lab_py", frozen)]
struct Universe {
    inner: NameUniverse,
}

#[pymethods]
impl Universe {
    #[new]
    fn new(algebra: &Algebra, text: &str) -> PyResult<Self> {
        Ok(Universe { inner: load_names(text, &algebra.inner).map_err(value_error)? })
    }

    fn labels(&self) -> Vec<String> {
        self.inner.ids().map(|x| self.inner.label(x).to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `[[formula]]`, with `env` binding free variables to name labels.
    #[pyo3(signature = (formula, env = None))]
    fn eval(&self, formula: &str, env: Option<Vec<(String, String)>>) -> PyResult<Element> {
        let env = env.unwrap_or_default();
        let bindings = env
            .iter()
            .map(|(v, n)| Ok((v.clone(), self.inner.lookup(n).map_err(value_error)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let free: BTreeSet<String> = env.into_iter().map(|(v, _)| v).collect();
        let f = parse_open(formula, &free).map_err(value_error)?;
        let mut ctx = ValuationContext::new(&self.inner);
        let value = ctx.val_formula(&f, &bindings).map_err(value_error)?;
        Ok(Element { value, algebra: self.inner.algebra().clone() })
    }

    /// Quotient by the ultrafilter generated by atom `atom`.
    fn quotient(&self, atom: usize) -> PyResult<Quotient> {
        let uf = Ultrafilter::principal(self.inner.algebra(), atom)
            .ok_or_else(|| PyValueError::new_err(format!("no atom a{atom}")))?;
        Ok(Quotient { inner: build_quotient(&self.inner, &uf).map_err(value_error)? })
    }
}

#[pyclass(name = "Quotient", module = "forcing_lab_py", frozen)]
struct Quotient {
    inner: QuotientModel,
}

#[pymethods]
impl Quotient {
    fn class_count(&self) -> usize {
        self.inner.class_count()
    }

    /// Member labels of each class; the first is the representative.
    fn classes(&self) -> Vec<Vec<String>> {
        (0..self.inner.class_count())
            .map(|c| self.inner.class_members(c).iter().map(|&x| self.inner.label(x).to_string()).collect())
            .collect()
    }

    /// Membership edges `(d, c)` between class indices.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    /// Collapsed hereditarily finite set of each class, as `{}`-nests.
    fn collapse(&self) -> PyResult<Vec<String>> {
        Ok(self.inner.mostowski_collapse().map_err(value_error)?.iter().map(|s| s.to_string()).collect())
    }

    fn truth(&self, formula: &str) -> PyResult<bool> {
        self.inner.truth(&parse(formula).map_err(value_error)?).map_err(value_error)
    }
}

/// Regular open completion of a poset given in `elem`/`le` text form.
#[pyclass(name = "Completion", module = "forcing_lab_py", frozen)]
struct Completion {
    inner: CoreCompletion,
}

#[pymethods]
impl Completion {
    #[new]
    fn new(poset_text: &str) -> PyResult<Self> {
        let poset = Poset::load(poset_text).map_err(value_error)?;
        Ok(Completion { inner: complete(&poset).map_err(value_error)? })
    }

    fn algebra(&self) -> Algebra {
        Algebra { inner: self.inner.target().clone() }
    }

    fn conditions(&self) -> Vec<String> {
        self.inner.source().ids().to_vec()
    }

    fn embed(&self, p: &str) -> PyResult<Element> {
        let i = self.inner.source().index_of(p).map_err(value_error)?;
        Ok(Element { value: self.inner.embed(i), algebra: self.inner.target().clone() })
    }

    /// Whether condition `p` forces the sentence over `universe`.
    fn forces(&self, p: &str, formula: &str, universe: &Universe) -> PyResult<bool> {
        let i = self.inner.source().index_of(p).map_err(value_error)?;
        let f = parse(formula).map_err(value_error)?;
        let mut ctx = ValuationContext::new(&universe.inner);
        core_forces(&self.inner, i, &f, &mut ctx).map_err(value_error)
    }
}

/// Hits point sets for `rows x cols` and all row-distinctness sets in the
/// lazy Cohen poset. Returns the union as text and its bit table, which is
/// wider than `cols` when distinctness needed a fresh column.
#[pyfunction]
#[pyo3(signature = (rows, cols, seed = 0))]
fn cohen(rows: usize, cols: usize, seed: u64) -> PyResult<(String, Vec<String>)> {
    let poset = LazyCohenPoset::new(rows);
    let family = poset.standard_family(cols);
    let f = hit_dense_sets_lazy(&poset, &family, seed).and_then(|c| c.union()).map_err(value_error)?;
    let width = cols.max(f.max_col().map_or(0, |c| c + 1));
    Ok((f.to_string(), f.table(rows, width)))
}

#[pymodule]
fn forcing_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Element>()?;
    m.add_class::<Universe>()?;
    m.add_class::<Quotient>()?;
    m.add_class::<Completion>()?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(ast, m)?)?;
    m.add_function(wrap_pyfunction!(cohen, m)?)?;
    Ok(())
}
