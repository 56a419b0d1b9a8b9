//! Exact-arithmetic Geronimus transformations of orthogonal-polynomial
//! moment functionals.
//!
//! The crate builds monic orthogonal polynomials from exact rational moment
//! sequences, applies the single and double Geronimus transformations of the
//! underlying bilinear form, and verifies the structural consequences on the
//! associated Jacobi matrices:
//!
//! - single step: connection coefficients `A_n`, transformed polynomials
//!   `P_n* = P_n + A_n P_{n-1}`, the mass-point representation of the
//!   transformed form, and the Darboux factorization `J_mon = U L`,
//!   `J*_mon = L U` of the tridiagonal Jacobi matrix;
//! - double step: coefficients `B_n`, `C_n`, transformed polynomials
//!   `P_n** = P_n + B_n P_{n-1} + C_n P_{n-2}`, the Sobolev inner-product
//!   representation with a 2x2 mass matrix at the origin, and the
//!   pentadiagonal analogue `J_mon^2 = U L`, `J**_mon = L U`;
//! - Cholesky structure of the symmetric matrices `J*` and `J**` in
//!   arbitrary-precision binary floating point.
//!
//! All identities that are rational are checked exactly; only square-root
//! bearing quantities (`h_n`, `c_n*`, symmetric Cholesky factors) use the
//! [`scalar::BigFloat`] carrier.
//!
//! ```
//! use geronimus::moments::MomentFunctional;
//! use geronimus::ops::build_chain;
//! use geronimus::scalar::rat_int;
//! use geronimus::single::transform_single;
//!
//! // The normalized Laguerre family with parameter 1; lowering the
//! // parameter by one is a single Geronimus step with s_0* = 1, and the
//! // connection coefficients come out as A_n = n.
//! let base = MomentFunctional::laguerre(rat_int(1))?;
//! let (_, ops, sk) = build_chain(&base, 10)?;
//! let st = transform_single(&base, &ops, &sk, &rat_int(1), 10)?;
//! assert_eq!(st.a(4), &rat_int(4));
//! assert_eq!(st.p_star(1).to_string(), "t - 1");
//! # Ok::<(), geronimus::Error>(())
//! ```

pub mod double;
pub mod error;
pub mod export;
pub mod jacobi;
pub mod linalg;
pub mod moments;
pub mod ops;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod single;

pub use error::{Error, Result};
pub use scalar::{BigFloat, Rational};
