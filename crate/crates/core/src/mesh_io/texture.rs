use std::path::Path;

use super::TextureImage;
use crate::error::{Error, Result};

/// Decodes a PNG or JPEG into 8-bit RGB. Alpha is dropped and grayscale is
/// expanded to three channels.
pub fn load_texture(path: &Path) -> Result<TextureImage> {
    let err = |message: String| Error::TextureLoad {
        path: path.to_path_buf(),
        message,
    };
    let reader = image::ImageReader::open(path)
        .map_err(|e| err(e.to_string()))?
        .with_guessed_format()
        .map_err(|e| err(e.to_string()))?;
    let rgb = reader.decode().map_err(|e| err(e.to_string()))?.to_rgb8();
    let (width, height) = rgb.dimensions();
    TextureImage::new(width, height, rgb.into_raw()).ok_or_else(|| err("empty image".into()))
}
