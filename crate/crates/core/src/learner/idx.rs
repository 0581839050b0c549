use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::Dataset;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic number 0x{found:08x}, expected 0x{expected:08x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated file: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("file has {actual} bytes, {expected} expected from its header")]
    TrailingData { expected: usize, actual: usize },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("{0}")]
    Invalid(String),
}

/// A parsed `u8` image tensor, `count x rows x cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32, IdxError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(IdxError::Truncated { expected: at + 4, actual: bytes.len() })
}

fn check_payload(bytes: &[u8], header: usize, items: usize) -> Result<(), IdxError> {
    let expected = items
        .checked_add(header)
        .ok_or_else(|| IdxError::Invalid("header dimensions overflow".into()))?;
    match bytes.len() {
        n if n < expected => Err(IdxError::Truncated { expected, actual: n }),
        n if n > expected => Err(IdxError::TrailingData { expected, actual: n }),
        _ => Ok(()),
    }
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), IdxError> {
    let found = be_u32(bytes, 0)?;
    if found == expected {
        Ok(())
    } else {
        Err(IdxError::BadMagic { expected, found })
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, IdxError> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let items = count
        .checked_mul(rows)
        .and_then(|x| x.checked_mul(cols))
        .ok_or_else(|| IdxError::Invalid("header dimensions overflow".into()))?;
    check_payload(bytes, 16, items)?;
    Ok(IdxImages { count, rows, cols, pixels: bytes[16..].to_vec() })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    check_payload(bytes, 8, count)?;
    Ok(bytes[8..].to_vec())
}

fn read(path: &Path) -> Result<Vec<u8>, IdxError> {
    fs::read(path).map_err(|source| IdxError::Io { path: path.to_path_buf(), source })
}

/// Loads an image/label file pair. Pixels are scaled by 1/255 and the class
/// count is one past the largest label.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset, IdxError> {
    let images = parse_idx_images(&read(images_path.as_ref())?)?;
    let labels = parse_idx_labels(&read(labels_path.as_ref())?)?;
    idx_to_dataset(&images, &labels)
}

pub fn idx_to_dataset(images: &IdxImages, labels: &[u8]) -> Result<Dataset, IdxError> {
    if images.count != labels.len() {
        return Err(IdxError::CountMismatch { images: images.count, labels: labels.len() });
    }
    let features = images.pixels.iter().map(|&p| f64::from(p) / 255.0).collect();
    let labels: Vec<usize> = labels.iter().map(|&y| usize::from(y)).collect();
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(features, images.rows * images.cols, labels, classes)
        .map_err(|e| IdxError::Invalid(e.to_string()))
}

/// Encodes an image tensor in IDX layout. Used for fixtures and round trips.
pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGE_MAGIC, images.count as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (IdxImages, Vec<u8>) {
        let images = IdxImages { count: 3, rows: 2, cols: 2, pixels: (0..12).map(|i| i * 20).collect() };
        (images, vec![4, 0, 9])
    }

    #[test]
    fn round_trip() {
        let (images, labels) = tiny();
        let img_bytes = encode_idx_images(&images);
        assert_eq!(&img_bytes[..4], &[0, 0, 8, 3]);
        assert_eq!(parse_idx_images(&img_bytes).unwrap(), images);
        assert_eq!(parse_idx_labels(&encode_idx_labels(&labels)).unwrap(), labels);
        let ds = idx_to_dataset(&images, &labels).unwrap();
        assert_eq!((ds.len(), ds.dim(), ds.num_classes()), (3, 4, 10));
        assert_eq!(ds.sample(2), &[160.0 / 255.0, 180.0 / 255.0, 200.0 / 255.0, 220.0 / 255.0]);
    }

    #[test]
    fn swapped_files_hit_bad_magic() {
        let (images, labels) = tiny();
        let err = parse_idx_labels(&encode_idx_images(&images)).unwrap_err();
        assert!(matches!(err, IdxError::BadMagic { expected: LABEL_MAGIC, found: IMAGE_MAGIC }));
        let err = parse_idx_images(&encode_idx_labels(&labels)).unwrap_err();
        assert!(matches!(err, IdxError::BadMagic { expected: IMAGE_MAGIC, found: LABEL_MAGIC }));
    }

    #[test]
    fn truncation_reports_sizes() {
        let (images, _) = tiny();
        let bytes = encode_idx_images(&images);
        let err = parse_idx_images(&bytes[..bytes.len() - 5]).unwrap_err();
        assert!(matches!(err, IdxError::Truncated { expected: 28, actual: 23 }), "{err:?}");
        assert!(err.to_string().contains("28") && err.to_string().contains("23"));
        assert!(matches!(parse_idx_images(&bytes[..10]), Err(IdxError::Truncated { .. })));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(parse_idx_images(&long), Err(IdxError::TrailingData { .. })));
    }

    #[test]
    fn count_mismatch() {
        let (images, _) = tiny();
        assert!(matches!(
            idx_to_dataset(&images, &[1, 2]),
            Err(IdxError::CountMismatch { images: 3, labels: 2 })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_idx("/nonexistent/a", "/nonexistent/b").unwrap_err();
        assert!(matches!(err, IdxError::Io { .. }));
    }
}
