//! Front-end pieces shared by the `unitfrac` binary: record formats, the
//! q-scan report and the enumerator/oracle cross-check.

pub mod crosscheck;
pub mod format;
pub mod scan;
