//! Python bindings. Build with `maturin develop` from this directory.

mod classes;
mod functions;

use atds_core::AtdsError;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;

create_exception!(atds, AtdsRuntimeError, PyException);

pub(crate) fn to_py(e: AtdsError) -> PyErr {
    match e {
        AtdsError::Io { .. } => PyOSError::new_err(e.to_string()),
        e if e.is_validation() => PyValueError::new_err(e.to_string()),
        AtdsError::EmptyManifest
        | AtdsError::DuplicateUttId(_)
        | AtdsError::InsufficientData { .. }
        | AtdsError::DimensionMismatch { .. }
        | AtdsError::LengthMismatch(..)
        | AtdsError::IndexOutOfRange { .. }
        | AtdsError::FingerprintMismatch(..)
        | AtdsError::ZeroVector
        | AtdsError::ZeroVariance
        | AtdsError::EmptyInput(_)
        | AtdsError::NonFinite(_)
        | AtdsError::MalformedInterval(_) => PyValueError::new_err(e.to_string()),
        e => AtdsRuntimeError::new_err(e.to_string()),
    }
}

pub(crate) trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for atds_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pymodule]
pub fn atds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AtdsRuntimeError", m.py().get_type::<AtdsRuntimeError>())?;
    m.add("DEFAULT_BASE_CODEPOINT", atds_core::tokenizer::DEFAULT_BASE_CODEPOINT)?;
    m.add("UNK_ID", atds_core::tokenizer::UNK_ID)?;
    classes::register(m)?;
    functions::register(m)?;
    Ok(())
}
