//! Text format: a header `n root treasure`, then one `node parent` line per
//! non-root node. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{Tree, TreeError};
use crate::NodeId;

impl Tree {
    pub fn to_text(&self) -> String {
        let mut out = format!("{} 0 {}\n", self.len(), self.treasure);
        for (v, p) in self.parents().iter().enumerate() {
            if let Some(p) = p {
                writeln!(out, "{v} {p}").unwrap();
            }
        }
        out
    }

    /// Parses the text format. If the declared root is not 0, labels 0 and
    /// root are swapped so the root becomes node 0.
    pub fn parse(text: &str) -> Result<Tree, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(TreeError::Empty)?;
        let h = numbers(hline, header, 3)?;
        let (n, root, treasure) = (h[0], h[1], h[2]);
        if n == 0 {
            return Err(TreeError::Empty);
        }
        for id in [root, treasure] {
            if id >= n {
                return Err(TreeError::OutOfRange(id));
            }
        }
        let swap = |x: NodeId| {
            if x == root {
                0
            } else if x == 0 {
                root
            } else {
                x
            }
        };
        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        let mut seen = vec![false; n];
        for (line, l) in lines {
            let e = numbers(line, l, 2)?;
            let (v, p) = (e[0], e[1]);
            if v >= n {
                return Err(TreeError::OutOfRange(v));
            }
            if p >= n {
                return Err(TreeError::OutOfRange(p));
            }
            if v == root {
                return Err(TreeError::Parse {
                    line,
                    msg: format!("root {root} given a parent"),
                });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(TreeError::Duplicate(v));
            }
            parent[swap(v)] = Some(swap(p));
        }
        Tree::from_parents(parent, swap(treasure))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Tree, TreeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TreeError::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        })?;
        Tree::parse(&text)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}

fn numbers(line: usize, l: &str, want: usize) -> Result<Vec<usize>, TreeError> {
    let v: Vec<usize> = l
        .split_whitespace()
        .map(|tok| tok.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| TreeError::Parse {
            line,
            msg: format!("{e} in {l:?}"),
        })?;
    if v.len() != want {
        return Err(TreeError::Parse {
            line,
            msg: format!("expected {want} integers, found {}", v.len()),
        });
    }
    Ok(v)
}
