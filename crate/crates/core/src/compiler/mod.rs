//! Gate compilation: closed-form constructions for the native gates and a
//! multi-start Nelder-Mead search over parameterized templates.

mod closed_form;
mod optimize;
mod target;
mod template;

pub use closed_form::{
    calibrate_iswap, closed_form_tolerance, idle_identity, refocus_pair, refocus_pair_on,
    zeeman_corrections, IdleIdentity, SynthesisResult,
};
pub use optimize::{nelder_mead, synthesize, Budget, Minimum, CONVERGENCE_INFIDELITY};
pub use target::{fidelity, TargetUnitary};
pub use template::{Param, ParamKind, Template, TemplateEvent};
