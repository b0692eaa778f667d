//! Library half of the command-line front end: the file format lives here so
//! integration tests can build and inspect fixtures without going through the
//! binary.

pub mod format;
