//! Field files, synthetic ground truth, noise injection and glyph export.

mod format;
mod glyphs;
mod noise;
mod synthetic;

pub use format::{
    decode_field, encode_field, read_field, read_field_strict, write_field, FORMAT_VERSION, MAGIC,
    ORDERING_TAG,
};
pub use glyphs::{export_glyphs, glyph, glyphs, write_glyphs, Glyph, GLYPH_HEADER};
pub use noise::{add_noise, add_noise_with, NoiseModel};
pub use synthetic::{generate_synthetic, quarter_turn_z, Pattern, PatternKind, SyntheticSpec};
