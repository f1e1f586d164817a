pub mod krylov;
pub mod sparse;

pub use krylov::{expmv_signed, lowest_eigenpairs, EigOptions, ExpmvOptions};
pub use sparse::{axpy, dot, norm, normalize, CsrMatrix, C64};
