//! MCP stdio binding: exposes one session's `ask_user` as a tool.
//!
//! Speaks line-delimited JSON-RPC 2.0 on any reader/writer pair, so agent
//! frameworks that attach tools over the Model Context Protocol can use the
//! simulator without HTTP. The binding is deliberately single-session: an
//! MCP server is spawned per trial, bound to that trial's session.

use crate::session::{SimulatorError, SimulatorService};
use serde_json::{json, Value};
use std::io::{BufRead, Write};

/// Tool description shown to the agent for `ask_user`.
pub const ASK_USER_DESCRIPTION: &str = include_str!("../prompts/ask_user_description_v1.txt");

const PROTOCOL_VERSION: &str = "2024-11-05";

fn tool_listing() -> Value {
    json!({
        "tools": [{
            "name": "ask_user",
            "description": ASK_USER_DESCRIPTION.trim_end(),
            "inputSchema": {
                "type": "object",
                "properties": {
                    "question": {
                        "type": "string",
                        "description": "The clarifying question to ask the user"
                    },
                    "context": {
                        "type": "string",
                        "description": "Optional context explaining why you are asking"
                    }
                },
                "required": ["question"]
            }
        }]
    })
}

fn rpc_result(id: &Value, result: Value) -> Value {
    json!({ "jsonrpc": "2.0", "id": id, "result": result })
}

fn rpc_error(id: &Value, code: i64, message: &str) -> Value {
    json!({ "jsonrpc": "2.0", "id": id, "error": { "code": code, "message": message } })
}

/// Handles a single parsed request. Returns None for notifications.
fn handle(service: &SimulatorService, session_id: &str, request: &Value) -> Option<Value> {
    let id = request.get("id").cloned();
    let method = request.get("method").and_then(Value::as_str).unwrap_or("");

    if id.is_none() {
        // notification; nothing to send back
        return None;
    }
    let id = id.unwrap();

    match method {
        "initialize" => Some(rpc_result(
            &id,
            json!({
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": { "tools": {} },
                "serverInfo": {
                    "name": "underspec-simulator",
                    "version": env!("CARGO_PKG_VERSION")
                }
            }),
        )),
        "tools/list" => Some(rpc_result(&id, tool_listing())),
        "tools/call" => {
            let params = request.get("params").cloned().unwrap_or(Value::Null);
            let name = params.get("name").and_then(Value::as_str).unwrap_or("");
            if name != "ask_user" {
                return Some(rpc_error(&id, -32602, &format!("unknown tool {name:?}")));
            }
            let args = params.get("arguments").cloned().unwrap_or(json!({}));
            let question = args.get("question").and_then(Value::as_str).unwrap_or("");
            let context = args.get("context").and_then(Value::as_str).unwrap_or("");
            match service.ask(session_id, question, context) {
                Ok(answer) => Some(rpc_result(
                    &id,
                    json!({
                        "content": [{ "type": "text", "text": answer }],
                        "isError": false
                    }),
                )),
                // tool-level failures go in-band so the agent can react
                Err(e @ (SimulatorError::EmptyQuestion | SimulatorError::BlankAnswer(_))) => {
                    Some(rpc_result(
                        &id,
                        json!({
                            "content": [{ "type": "text", "text": e.to_string() }],
                            "isError": true
                        }),
                    ))
                }
                Err(e) => Some(rpc_error(&id, -32000, &e.to_string())),
            }
        }
        "ping" => Some(rpc_result(&id, json!({}))),
        other => Some(rpc_error(&id, -32601, &format!("method {other:?} not found"))),
    }
}

/// Serves JSON-RPC until the reader closes. One message per line.
pub fn run<R: BufRead, W: Write>(
    service: &SimulatorService,
    session_id: &str,
    reader: R,
    writer: &mut W,
) -> std::io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serde_json::from_str::<Value>(&line) {
            Ok(request) => handle(service, session_id, &request),
            Err(e) => Some(rpc_error(&Value::Null, -32700, &format!("parse error: {e}"))),
        };
        if let Some(reply) = reply {
            writeln!(writer, "{reply}")?;
            writer.flush()?;
        }
    }
    Ok(())
}

/// stdio entry point used by the CLI.
pub fn serve_stdio(service: &SimulatorService, session_id: &str) -> std::io::Result<()> {
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    run(service, session_id, stdin.lock(), &mut stdout)
}

// ---------------------------------------------------------------------------
