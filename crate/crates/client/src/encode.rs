use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use sha2::{Digest, Sha256};

use super::ClientError;

/// A transport-ready image payload plus its content digest. The digest is
/// what request fingerprints use, so identical bytes at different paths
/// fingerprint the same.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedImage {
    pub media_type: String,
    pub base64: String,
    pub digest: String,
}

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];
const PNG_TAIL: [u8; 8] = [b'I', b'E', b'N', b'D', 0xAE, 0x42, 0x60, 0x82];

/// Base64-encode a PNG or JPEG file. The container is sniffed from the
/// bytes (never the extension) and cheap end-of-stream markers are
/// required, so truncated files are rejected as unreadable.
pub fn encode_image(path: &Path) -> Result<EncodedImage, ClientError> {
    let bytes = std::fs::read(path).map_err(|e| ClientError::UnreadableImage {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let media_type = match sniff(&bytes) {
        Sniff::Png => "image/png",
        Sniff::Jpeg => "image/jpeg",
        Sniff::Truncated(reason) => {
            return Err(ClientError::UnreadableImage {
                path: path.display().to_string(),
                reason: reason.to_string(),
            })
        }
        Sniff::Unknown => {
            return Err(ClientError::UnsupportedFormat { path: path.display().to_string() })
        }
    };
    Ok(EncodedImage {
        media_type: media_type.to_string(),
        base64: BASE64.encode(&bytes),
        digest: hex::encode(Sha256::digest(&bytes)),
    })
}

enum Sniff {
    Png,
    Jpeg,
    Truncated(&'static str),
    Unknown,
}

fn sniff(bytes: &[u8]) -> Sniff {
    if bytes.len() >= PNG_MAGIC.len() && bytes[..PNG_MAGIC.len()] == PNG_MAGIC {
        if bytes.len() >= 8 && bytes[bytes.len() - 8..] == PNG_TAIL {
            return Sniff::Png;
        }
        return Sniff::Truncated("PNG stream has no IEND trailer");
    }
    if bytes.len() >= 3 && bytes[..3] == [0xFF, 0xD8, 0xFF] {
        if bytes[bytes.len() - 2..] == [0xFF, 0xD9] {
            return Sniff::Jpeg;
        }
        return Sniff::Truncated("JPEG stream has no EOI marker");
    }
    if bytes.len() < 3 && !bytes.is_empty() && bytes[0] == 0x89 {
        return Sniff::Truncated("file shorter than a PNG signature");
    }
    Sniff::Unknown
}
