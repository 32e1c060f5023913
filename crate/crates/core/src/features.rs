//! The minimal feature templates read off parser states.
//!
//! Dependency states contribute three sentence positions: the heads of
//! the two topmost stack items and the first queue word. Constituency
//! states add the leftmost word of each of the two stack spans and eight
//! constituent labels. Absent positions and labels are `None`; the model
//! gives them learned vectors.

use crate::transition::{ConstState, DepState, StackTree};

pub const DEP_POSITIONS: usize = 3;
pub const CONST_POSITIONS: usize = 5;
pub const CONST_LABELS: usize = 8;

/// `[s1, s0, q0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepFeatures {
    pub positions: [Option<usize>; DEP_POSITIONS],
}

pub fn extract_dep(state: &DepState) -> DepFeatures {
    let q0 = (state.next() < state.len()).then_some(state.next());
    DepFeatures {
        positions: [state.stack_item(1), state.stack_item(0), q0],
    }
}

/// Which learned fill-in vector an empty position slot uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotFamily {
    Stack,
    Queue,
}

pub const DEP_SLOT_FAMILIES: [SlotFamily; DEP_POSITIONS] = [SlotFamily::Stack, SlotFamily::Stack, SlotFamily::Queue];

pub const CONST_SLOT_FAMILIES: [SlotFamily; CONST_POSITIONS] = [
    SlotFamily::Stack,
    SlotFamily::Stack,
    SlotFamily::Queue,
    SlotFamily::Stack,
    SlotFamily::Stack,
];

/// Positions `[s1, s0, q0, s1.left, s0.left]` and labels
/// `[s0.left, s0.right, s0.root, s0.head, s1.left, s1.right, s1.root, s1.head]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstFeatures<'a> {
    pub positions: [Option<usize>; CONST_POSITIONS],
    pub labels: [Option<&'a str>; CONST_LABELS],
}

fn tree_labels(t: Option<&StackTree>) -> [Option<&str>; 4] {
    match t {
        None => [None; 4],
        Some(t) => [
            t.left_adjoined_label(),
            t.right_adjoined_label(),
            t.label(),
            t.head_child_label(),
        ],
    }
}

pub fn extract_const(state: &ConstState) -> ConstFeatures<'_> {
    let s0 = state.stack_item(0);
    let s1 = state.stack_item(1);
    let q0 = (state.next() < state.len()).then_some(state.next());
    let [a, b, c, d] = tree_labels(s0);
    let [e, f, g, h] = tree_labels(s1);
    ConstFeatures {
        positions: [
            s1.map(StackTree::head_word),
            s0.map(StackTree::head_word),
            q0,
            s1.map(|t| t.span().0),
            s0.map(|t| t.span().0),
        ],
        labels: [a, b, c, d, e, f, g, h],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::{ConstAction, DepAction};

    fn pro(x: &str) -> ConstAction {
        ConstAction::Promote(x.into())
    }

    #[test]
    fn dep_positions() {
        let s = DepState::initial(3);
        assert_eq!(extract_dep(&s).positions, [None, None, Some(0)]);
        let s = s.apply(&DepAction::Shift).unwrap().apply(&DepAction::Shift).unwrap();
        assert_eq!(extract_dep(&s).positions, [Some(0), Some(1), Some(2)]);
        let s = s
            .apply(&DepAction::ReduceLeft("a".into()))
            .unwrap()
            .apply(&DepAction::Shift)
            .unwrap()
            .apply(&DepAction::ReduceRight("b".into()))
            .unwrap();
        assert!(s.is_terminal());
        assert_eq!(extract_dep(&s).positions, [None, Some(1), None]);
    }

    #[test]
    fn sample_state_after_step_seven() {
        use ConstAction::*;
        let mut s = ConstState::initial(3);
        for a in [Shift, pro("NP"), Shift, pro("VP"), Shift, pro("NP"), AdjRight] {
            s.advance(&a).unwrap();
        }
        let f = extract_const(&s);
        assert_eq!(f.positions, [Some(0), Some(1), None, Some(0), Some(1)]);
        assert_eq!(
            f.labels,
            [None, Some("NP"), Some("VP"), None, None, None, Some("NP"), None]
        );
    }

    #[test]
    fn bare_leaf_has_no_labels() {
        let s = ConstState::initial(2).apply(&ConstAction::Shift).unwrap();
        let f = extract_const(&s);
        assert_eq!(f.labels, [None; 8]);
        assert_eq!(f.positions, [None, Some(0), Some(1), None, Some(0)]);
    }

    #[test]
    fn unary_chain_head_label() {
        let mut s = ConstState::initial(1);
        for a in [ConstAction::Shift, pro("NP"), pro("NP")] {
            s.advance(&a).unwrap();
        }
        let f = extract_const(&s);
        assert_eq!(&f.labels[..4], &[None, None, Some("NP"), Some("NP")]);
    }

    #[test]
    fn left_adjoined_fills_left_slot_only() {
        use ConstAction::*;
        let mut s = ConstState::initial(2);
        for a in [Shift, pro("NP"), Shift, pro("VP"), AdjLeft] {
            s.advance(&a).unwrap();
        }
        let f = extract_const(&s);
        assert_eq!(&f.labels[..4], &[Some("NP"), None, Some("VP"), None]);
        assert_eq!(f.positions[1], Some(1));
        assert_eq!(f.positions[4], Some(0));
    }
}
