//! Evaluation metrics: ROC AUC, Kendall's W and Sobol total-order indices.

pub mod kendall;
pub mod report;
pub mod roc;
pub mod sobol;

pub use kendall::kendall_w;
pub use report::KvReport;
pub use roc::{average_ranks, multiclass_auc, roc_auc, RocResult};
pub use sobol::{sobol_total_order, SobolResult};
