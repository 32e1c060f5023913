//! Transition systems, static oracles and replay.

pub mod constituency;
pub mod dep;

pub use constituency::{
    const_oracle, const_replay, const_replay_with_deps, max_promote_chain, read_const_actions, write_const_actions,
    ConstAction, ConstActionKind, ConstState, StackTree, DEFAULT_PROMOTE_CAP,
};
pub use dep::{dep_oracle, dep_replay, read_dep_actions, write_dep_actions, DepAction, DepActionKind, DepState};
