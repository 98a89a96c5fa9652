//! p-adic Gray-Hilbert space-filling curves and the scaled Gray-Hilbert
//! tree index built on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`digits`]: F_p^n digit vectors and the reflected p-ary Gray code.
//! - [`affine`]: the affine maps that reorient Gray-code pieces.
//! - [`curve`]: index ↔ cell ↔ coordinate mappings at depth k.
//! - [`index`]: the bucketed scaled tree, its partition and the static
//!   baseline.
//! - [`sparsity`]: capacity ratios and the local sparsity measure ρ.
//! - [`ingest`]: CSV loading, normalisation, iris and random clouds.
//!
//! ```
//! use padic_hilbert::{Curve, CurveIndex, Prime, ScaledTree, Variant};
//!
//! let p = Prime::new(3)?;
//! let curve = Curve::new(p, 2, Variant::Bubble)?;
//! let idx = CurveIndex::from_u64_limbs(&[4, 4], 2, p)?;
//! let cell = curve.index_to_cell(&idx)?;
//! assert_eq!(curve.cell_to_index(&cell)?, idx);
//! assert_eq!(curve.quantize(&[0.45, 0.45], 2)?, cell);
//!
//! let mut tree = ScaledTree::new(Prime::TWO, 3, 4, Variant::Ring)?;
//! tree.insert(0, &[0.1, 0.5, 0.9])?;
//! assert_eq!(tree.nearest(&[0.1, 0.5, 0.88])?, vec![0]);
//! # Ok::<(), padic_hilbert::Error>(())
//! ```

pub mod affine;
pub mod curve;
pub mod digits;
pub mod error;
pub mod exec;
pub mod index;
pub mod ingest;
pub mod sparsity;

pub use affine::{Permutation, Variant};
pub use curve::{CellWord, Curve, CurveIndex, CurveParams};
pub use digits::{DigitVec, Prime};
pub use error::{Error, Result};
pub use exec::Exec;
pub use index::ScaledTree;
pub use ingest::PointCloud;
pub use sparsity::SparsityReport;
