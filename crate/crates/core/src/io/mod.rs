//! Persistence, image ingestion and CSV export.

mod binary;
pub mod csv;
pub mod formats;
pub mod image;

pub use csv::{export_report, export_spectrum, read_spectrum};
pub use formats::{
    load_any, load_basis, load_coefficients, load_model, load_rank1, load_subspace, load_tensor,
    save_basis, save_coefficients, save_model, save_rank1, save_subspace, save_tensor, Stored,
};
pub use image::{export_image_grid, load_dataset, ImageManifest};
