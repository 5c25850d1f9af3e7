pub mod cfg;
pub mod cli;
pub mod code;
pub mod dos;
pub mod error;
pub mod pipeline;
pub mod profile;
pub mod refactor;
pub mod roundtrip;
pub mod uschema;
