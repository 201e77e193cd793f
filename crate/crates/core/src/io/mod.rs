//! On-disk formats: binary grid files, text scenes and grayscale images.

mod grid_file;
mod image_export;
mod scene;

pub use grid_file::{
    decode_grid, encode_grid, read_complex_grid, read_grid, read_real_grid, write_complex_grid,
    write_grid, write_real_grid, GridData, HEADER_LEN, MAGIC, VERSION,
};
pub use image_export::{export_grayscale, to_gray_levels, GrayMapping};
pub use scene::{format_scene_dense, parse_scene, read_scene, Shape, X_STRIPS_SCENE};
