use serde::Serialize;

use crate::model::ResolvedModel;
use crate::syntax::AstModel;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImportError {
    #[error("unsupported formatVersion {0}, expected {FORMAT_VERSION}")]
    Version(String),
    #[error("document does not match the model schema: {0}")]
    Schema(String),
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Document<'a> {
    format_version: u64,
    #[serde(flatten)]
    model: &'a AstModel,
}

/// Canonical JSON: `formatVersion` first, then the model fields in a fixed
/// order, arrays in source order. Spans are not included.
pub fn export_json(m: &ResolvedModel) -> String {
    export_json_ast(&m.ast)
}

pub fn export_json_ast(ast: &AstModel) -> String {
    let doc = Document {
        format_version: FORMAT_VERSION,
        model: ast,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
    text.push('\n');
    text
}

/// Rebuilds a model from [`export_json`] output. All spans are synthetic.
pub fn import_json(doc: &str) -> Result<AstModel, ImportError> {
    let mut value: serde_json::Value =
        serde_json::from_str(doc).map_err(|e| ImportError::Schema(e.to_string()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| ImportError::Schema("top level must be an object".into()))?;
    match obj.remove("formatVersion") {
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return Err(ImportError::Version(v.to_string())),
        None => return Err(ImportError::Version("missing".into())),
    }
    serde_json::from_value(value).map_err(|e| ImportError::Schema(e.to_string()))
}
