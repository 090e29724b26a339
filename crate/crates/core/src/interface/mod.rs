//! Machine- and human-facing surface: the line-delimited JSON protocol,
//! its TCP server, scenario replay and the command-line front end.

mod cli;
mod protocol;
mod scenario;
mod server;

pub use cli::{cli_main, cli_main_with, load_asset, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
pub use protocol::{
    Dispatcher, ErrorBody, Fault, Request, Response, INTERNAL, INVALID_PARAMS, INVALID_STATE, MAX_LINE_BYTES,
    METHODS, METHOD_NOT_FOUND, NOT_FOUND,
};
pub use scenario::{run_scenario, Scenario, ScenarioCommand, ScenarioOutcome};
pub use server::{serve_connection, Client, Server, ServerHandle};
