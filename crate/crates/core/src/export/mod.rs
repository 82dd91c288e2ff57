//! Serializers for models and summary tables.

mod dot;
mod json;
mod table;
mod xmi;

pub use dot::export_dot;
pub use json::{export_json, export_json_ast, import_json, ImportError, FORMAT_VERSION};
pub use table::{
    exception_table, handler_table, mode_service_table, mode_switch_table, render_table,
    SummaryTable, TableFormat,
};
pub use xmi::{export_xmi, XMI_NAMESPACE};
