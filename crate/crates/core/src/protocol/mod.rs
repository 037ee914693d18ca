//! Resource states `E⁽¹⁾` and `E(x)`, their PPT bounds, and the
//! Bell-measurement conversion protocol.

mod bounds;
mod filter;
mod pipeline;
mod resource;

pub use bounds::{cut_bounds, ppt_bound_cut, x0, CutBound, XMode};
pub use filter::{slocc_filter, slocc_filter_to_max_entangled, SloccFilter};
pub use pipeline::{convert_pipeline, convert_pipeline_with, ConversionPlan, Stage};
pub use resource::{
    build_e1, build_ex, post_selected_operator, protocol_convert_bipartite, protocol_convert_multipartite, CutCertificate,
    ProtocolOutcome, ResourceKind, ResourceState, SlotLayout, CERTIFICATE_TOL,
};
