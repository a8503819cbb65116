use crate::error::Result;
use crate::token::{Bracket, Brackets, TokenId};

/// Pushdown decider for k-Dyck, the language of `S -> (_i S )_i S | ε`.
///
/// Push the type on open; on close pop only if the top has the same type.
/// Accepts iff no close mismatches or underflows and the stack ends empty.
pub fn recognize_stack_kdyck(tokens: &[TokenId], k: u32) -> Result<bool> {
    let brackets = Brackets::new(k)?.decode_all(tokens)?;
    let mut stack = Vec::with_capacity(tokens.len() / 2 + 1);
    for b in brackets {
        match b {
            Bracket::Open(kind) => stack.push(kind),
            Bracket::Close(kind) => {
                if stack.pop() != Some(kind) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(stack.is_empty())
}
