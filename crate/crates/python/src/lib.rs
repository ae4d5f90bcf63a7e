use pyo3::prelude::*;

#[pymodule]
fn _pdkit(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
