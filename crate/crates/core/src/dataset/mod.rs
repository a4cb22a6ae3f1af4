//! OpenPCDet-style dataset layout:
//! `<root>/{manifest.json, points/, labels/, features/}`.

mod features;
mod frame_io;
mod manifest;

pub use features::{load_features, write_features, FeatureMatrix, FMAT_HEADER_LEN, FMAT_MAGIC};
pub use frame_io::{
    decode_points, encode_points, format_labels, frame_id, is_valid_frame_id, labels_path,
    parse_labels, points_path, read_frame, read_labels, read_points, write_frame,
    BYTES_PER_POINT, FEATURES_DIR, LABELS_DIR, POINTS_DIR,
};
pub use manifest::{
    assign_split, read_manifest, write_manifest, DatasetManifest, SplitRole, FORMAT_VERSION,
    MANIFEST_FILE, MERGED_STREAM,
};
