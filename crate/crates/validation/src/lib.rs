//! Holds the `acceptance` integration test target only.
