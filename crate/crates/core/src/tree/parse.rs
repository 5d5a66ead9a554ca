use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{LeafWeights, TreeError, TrivalentTree};
use crate::Level;

/// A tree file: edges plus optional leaf weights and level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeInput {
    pub tree: TrivalentTree,
    pub r: Option<LeafWeights>,
    pub level: Option<Level>,
}

/// Parses the `edge` lines of a tree file; `r` and `level` lines are
/// accepted but ignored.
pub fn parse_tree(text: &str) -> Result<TrivalentTree, TreeError> {
    parse_tree_input(text).map(|input| input.tree)
}

pub fn parse_tree_input(text: &str) -> Result<TreeInput, TreeError> {
    let mut edges = Vec::new();
    let mut weights = BTreeMap::new();
    let mut level = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: &str| TreeError::Syntax {
            line,
            message: message.to_string(),
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["edge", u, v] => edges.push((u.to_string(), v.to_string())),
            ["r", leaf, value] => {
                let value = value
                    .parse::<u64>()
                    .map_err(|_| syntax("leaf weight must be a nonnegative integer"))?;
                if weights.insert(leaf.to_string(), value).is_some() {
                    return Err(syntax("leaf weight given twice"));
                }
            }
            ["level", value] => {
                if level.is_some() {
                    return Err(syntax("level given twice"));
                }
                level = Some(value.parse::<Level>().map_err(|e| syntax(&e))?);
            }
            ["edge", ..] => return Err(syntax("expected `edge <u> <v>`")),
            ["r", ..] => return Err(syntax("expected `r <leaf> <value>`")),
            ["level", ..] => return Err(syntax("expected `level <L>`")),
            _ => return Err(syntax("unrecognized line")),
        }
    }
    let tree = TrivalentTree::from_edges(&edges)?;
    let r = if weights.is_empty() {
        None
    } else {
        Some(LeafWeights::from_map(&tree, &weights)?)
    };
    Ok(TreeInput { tree, r, level })
}

/// Canonical serialization: edges in canonical order, then leaf weights in
/// leaf label order, then the level.
pub fn write_tree_input(tree: &TrivalentTree, r: Option<&LeafWeights>, level: Option<Level>) -> String {
    let mut out = tree.to_string();
    if let Some(r) = r {
        for &leaf in tree.leaves() {
            writeln!(out, "r {} {}", tree.label(leaf), r.get(leaf)).unwrap();
        }
    }
    if let Some(level) = level {
        writeln!(out, "level {level}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_input_round_trip() {
        let text = "# caterpillar\nedge v u\nedge a u\nedge b u   # cherry\nedge c v\nedge d v\n\
                    r d 1\nr c 1\nr b 1\nr a 1\nlevel 4\n";
        let input = parse_tree_input(text).unwrap();
        assert_eq!(input.level, Some(Level::Finite(4)));
        let canonical = write_tree_input(&input.tree, input.r.as_ref(), input.level);
        assert_eq!(
            canonical,
            "edge a u\nedge b u\nedge c v\nedge d v\nedge u v\nr a 1\nr b 1\nr c 1\nr d 1\nlevel 4\n"
        );
        assert_eq!(parse_tree_input(&canonical).unwrap(), input);
    }

    #[test]
    fn infinite_level_and_errors() {
        let input = parse_tree_input("edge a x\nedge b x\nedge c x\nlevel inf\n").unwrap();
        assert_eq!(input.level, Some(Level::Infinite));
        assert!(input.r.is_none());

        let err = parse_tree_input("edge a x\nedge b x\nedge c x\nr a 1\n").unwrap_err();
        assert_eq!(err, TreeError::MissingLeafWeight("b".into()));
        let err = parse_tree_input("edge a x\nedge b x\nedge c x\nr x 1\n").unwrap_err();
        assert_eq!(err, TreeError::NotALeaf("x".into()));
        let err = parse_tree_input("edge a x\nbogus\n").unwrap_err();
        assert!(matches!(err, TreeError::Syntax { line: 2, .. }));
        let err = parse_tree_input("edge a x\nedge b x\nedge c x\nr a -1\n").unwrap_err();
        assert!(matches!(err, TreeError::Syntax { line: 4, .. }));
    }
}
