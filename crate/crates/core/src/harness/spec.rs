//! Textual specifications of trees, noise levels and fault models.
//!
//! Trees are written `kind:key=value,...`:
//!
//! | kind          | keys                                           |
//! |---------------|------------------------------------------------|
//! | `complete`    | `b`, `d`, optional `root`, `td`, `place`       |
//! | `ary`         | `delta`, `d`: every internal node has `delta − 1` children |
//! | `regular`     | `delta`, `d`: root `delta` children, others `delta − 1`    |
//! | `heap`        | `root`, `b`, `n`                               |
//! | `path`        | `n`, optional `td`                             |
//! | `star`        | `leaves`, `treasure`                           |
//! | `random`      | `n`, `seed`                                    |
//! | `caterpillar` | `spine`, `degree`, `td`                        |
//! | `trimmed`     | `b`, `d`                                       |
//! | `apex`        | `b`, `d`                                       |
//! | `file`        | the path after the colon                       |
//!
//! `ary` and `regular` are shorthands that print as `complete`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rustc_hash::FxHashMap;

use crate::noise::{Adversary, FaultMode, NoiseLevel, NoiseModel};
use crate::tree::{
    apex_implicit, build_apex, build_caterpillar, build_heap_ary, build_path, build_random, build_star, build_trimmed_ary,
    CompleteAry, CompleteAryTree, Placement, Topology, Tree, TreeError,
};
use crate::NodeId;

/// A tree, explicit or computed from ids.
#[derive(Clone, Debug)]
pub enum Instance {
    Explicit(Tree),
    Implicit(CompleteAryTree),
}

impl Instance {
    pub fn topology(&self) -> &(dyn Topology + 'static) {
        match self {
            Instance::Explicit(t) => t,
            Instance::Implicit(t) => t,
        }
    }

    pub fn explicit(&self) -> Option<&Tree> {
        match self {
            Instance::Explicit(t) => Some(t),
            Instance::Implicit(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeSpec {
    Complete {
        branching: usize,
        depth: usize,
        root_children: usize,
        treasure_depth: usize,
        placement: Placement,
    },
    Heap {
        root_children: usize,
        branching: usize,
        n: usize,
    },
    Path {
        nodes: usize,
        treasure_depth: usize,
    },
    Star {
        leaves: usize,
        treasure: usize,
    },
    Random {
        n: usize,
        seed: u64,
    },
    Caterpillar {
        spine: usize,
        degree: usize,
        treasure_depth: usize,
    },
    Trimmed {
        branching: usize,
        depth: usize,
    },
    Apex {
        branching: usize,
        depth: usize,
    },
    File(PathBuf),
}

impl TreeSpec {
    /// Complete tree with every internal node of degree `delta` except the
    /// root, which has `delta − 1` children; the treasure is a leaf.
    pub fn ary(delta: usize, depth: usize) -> Self {
        Self::complete(delta - 1, delta - 1, depth)
    }

    /// Complete tree where every internal node, root included, has degree
    /// `delta`; the treasure is a leaf.
    pub fn regular(delta: usize, depth: usize) -> Self {
        Self::complete(delta - 1, delta, depth)
    }

    pub fn complete(branching: usize, root_children: usize, depth: usize) -> Self {
        TreeSpec::Complete {
            branching,
            depth,
            root_children,
            treasure_depth: depth,
            placement: Placement::Leftmost,
        }
    }

    /// Builds the tree. Complete trees larger than `budget` nodes come back
    /// implicit; every other kind must fit.
    pub fn build(&self, budget: u64) -> Result<Instance, TreeError> {
        let explicit = |t: Result<Tree, TreeError>| t.map(Instance::Explicit);
        match self {
            &TreeSpec::Complete {
                branching,
                depth,
                root_children,
                treasure_depth,
                placement,
            } => {
                let c = CompleteAry::new(branching, depth, treasure_depth)
                    .root_children(root_children)
                    .placement(placement);
                if c.node_count() <= budget as u128 {
                    explicit(c.build_with_budget(budget))
                } else {
                    Ok(Instance::Implicit(c.implicit()?))
                }
            }
            &TreeSpec::Heap {
                root_children,
                branching,
                n,
            } => explicit(build_heap_ary(root_children, branching, n)),
            &TreeSpec::Path { nodes, treasure_depth } => explicit(build_path(nodes, treasure_depth)),
            &TreeSpec::Star { leaves, treasure } => explicit(build_star(leaves, treasure)),
            &TreeSpec::Random { n, seed } => explicit(build_random(n, seed, None)),
            &TreeSpec::Caterpillar {
                spine,
                degree,
                treasure_depth,
            } => explicit(build_caterpillar(spine, degree, treasure_depth)),
            &TreeSpec::Trimmed { branching, depth } => explicit(build_trimmed_ary(branching, depth)),
            &TreeSpec::Apex { branching, depth } => {
                if CompleteAry::new(branching, depth, 0).node_count() <= budget as u128 {
                    explicit(build_apex(branching, depth))
                } else {
                    apex_implicit(branching, depth).map(Instance::Implicit)
                }
            }
            TreeSpec::File(p) => explicit(Tree::read_file(p)),
        }
    }

    /// Copy with one `key=value` parameter replaced.
    /// Changing `d` of a complete tree whose treasure is at full depth
    /// keeps it there.
    pub fn with_param(&self, key: &str, value: &str) -> Result<TreeSpec, String> {
        if let (TreeSpec::Complete { depth, treasure_depth, .. }, "d") = (self, key) {
            if depth == treasure_depth {
                return self.with_param("td", value)?.with_param_raw("d", value);
            }
        }
        self.with_param_raw(key, value)
    }

    fn with_param_raw(&self, key: &str, value: &str) -> Result<TreeSpec, String> {
        let text = self.to_string();
        let (kind, params) = text.split_once(':').unwrap_or((&text, ""));
        let mut map = parse_params(params)?;
        map.insert(key.to_string(), value.to_string());
        let params: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{kind}:{}", params.join(",")).parse()
    }
}

fn parse_params(s: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for kv in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got '{kv}'"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

struct Params {
    kind: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, String> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("{}: bad value '{v}' for '{key}'", self.kind)),
        }
    }

    fn need<T: FromStr>(&mut self, key: &str) -> Result<T, String> {
        self.take(key)?.ok_or_else(|| format!("{}: missing '{key}'", self.kind))
    }

    fn finish<T>(self, value: T) -> Result<T, String> {
        match self.map.keys().next() {
            Some(k) => Err(format!("{}: unknown parameter '{k}'", self.kind)),
            None => Ok(value),
        }
    }
}

impl FromStr for TreeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind == "file" {
            return Ok(TreeSpec::File(PathBuf::from(rest)));
        }
        let mut p = Params {
            kind: kind.to_string(),
            map: parse_params(rest)?,
        };
        let spec = match kind {
            "complete" | "ary" | "regular" => {
                let depth: usize = p.need("d")?;
                let (branching, root_children) = if kind == "complete" {
                    let b: usize = p.need("b")?;
                    (b, p.take("root")?.unwrap_or(b))
                } else {
                    let delta: usize = p.need("delta")?;
                    if delta < 3 {
                        return Err(format!("{kind}: delta must be at least 3"));
                    }
                    (delta - 1, if kind == "ary" { delta - 1 } else { delta })
                };
                let placement = match p.take::<String>("place")?.as_deref() {
                    None | Some("left") => Placement::Leftmost,
                    Some("right") => Placement::Rightmost,
                    Some(o) => return Err(format!("{kind}: unknown placement '{o}'")),
                };
                TreeSpec::Complete {
                    branching,
                    depth,
                    root_children,
                    treasure_depth: p.take("td")?.unwrap_or(depth),
                    placement,
                }
            }
            "heap" => TreeSpec::Heap {
                root_children: p.need("root")?,
                branching: p.need("b")?,
                n: p.need("n")?,
            },
            "path" => {
                let nodes: usize = p.need("n")?;
                TreeSpec::Path {
                    nodes,
                    treasure_depth: p.take("td")?.unwrap_or(nodes.saturating_sub(1)),
                }
            }
            "star" => TreeSpec::Star {
                leaves: p.need("leaves")?,
                treasure: p.need("treasure")?,
            },
            "random" => TreeSpec::Random {
                n: p.need("n")?,
                seed: p.take("seed")?.unwrap_or(0),
            },
            "caterpillar" => TreeSpec::Caterpillar {
                spine: p.need("spine")?,
                degree: p.need("degree")?,
                treasure_depth: p.need("td")?,
            },
            "trimmed" => TreeSpec::Trimmed {
                branching: p.need("b")?,
                depth: p.need("d")?,
            },
            "apex" => TreeSpec::Apex {
                branching: p.need("b")?,
                depth: p.need("d")?,
            },
            other => return Err(format!("unknown tree kind '{other}'")),
        };
        p.finish(spec)
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeSpec::Complete {
                branching,
                depth,
                root_children,
                treasure_depth,
                placement,
            } => {
                write!(f, "complete:b={branching},d={depth},root={root_children},td={treasure_depth}")?;
                if *placement == Placement::Rightmost {
                    f.write_str(",place=right")?;
                }
                Ok(())
            }
            TreeSpec::Heap {
                root_children,
                branching,
                n,
            } => write!(f, "heap:root={root_children},b={branching},n={n}"),
            TreeSpec::Path { nodes, treasure_depth } => write!(f, "path:n={nodes},td={treasure_depth}"),
            TreeSpec::Star { leaves, treasure } => write!(f, "star:leaves={leaves},treasure={treasure}"),
            TreeSpec::Random { n, seed } => write!(f, "random:n={n},seed={seed}"),
            TreeSpec::Caterpillar {
                spine,
                degree,
                treasure_depth,
            } => write!(f, "caterpillar:spine={spine},degree={degree},td={treasure_depth}"),
            TreeSpec::Trimmed { branching, depth } => write!(f, "trimmed:b={branching},d={depth}"),
            TreeSpec::Apex { branching, depth } => write!(f, "apex:b={branching},d={depth}"),
            TreeSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// How fault probabilities are assigned: a number, `inv-degree:c`,
/// `inv-sqrt-degree:c`, `star:eps=..,frac=..` or `file:path` (one value per
/// node, in id order).
#[derive(Clone, Debug, PartialEq)]
pub enum QSpec {
    Level(NoiseLevel),
    File(PathBuf),
}

impl QSpec {
    pub fn uniform(q: f64) -> Self {
        QSpec::Level(NoiseLevel::Uniform(q))
    }

    pub fn level(&self) -> Result<NoiseLevel, String> {
        match self {
            QSpec::Level(l) => Ok(l.clone()),
            QSpec::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                let qs = text
                    .lines()
                    .map(|l| l.split('#').next().unwrap().trim())
                    .filter(|l| !l.is_empty())
                    .map(|l| l.parse::<f64>().map_err(|_| format!("{}: bad probability '{l}'", p.display())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(NoiseLevel::PerNode(qs))
            }
        }
    }
}

impl FromStr for QSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad noise value '{v}'"));
        if let Ok(q) = s.parse::<f64>() {
            return Ok(QSpec::uniform(q));
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad noise spec '{s}'"))?;
        Ok(match kind {
            "uniform" => QSpec::uniform(num(rest)?),
            "inv-degree" => QSpec::Level(NoiseLevel::InvDegree(num(rest)?)),
            "inv-sqrt-degree" => QSpec::Level(NoiseLevel::InvSqrtDegree(num(rest)?)),
            "star" => {
                let mut p = Params {
                    kind: "star".into(),
                    map: parse_params(rest)?,
                };
                let level = NoiseLevel::StarCap {
                    eps: p.need("eps")?,
                    frac: p.take("frac")?.unwrap_or(1.0),
                };
                QSpec::Level(p.finish(level)?)
            }
            "file" => QSpec::File(PathBuf::from(rest)),
            other => return Err(format!("unknown noise kind '{other}'")),
        })
    }
}

impl fmt::Display for QSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSpec::Level(NoiseLevel::Uniform(q)) => write!(f, "{q}"),
            QSpec::Level(NoiseLevel::InvDegree(c)) => write!(f, "inv-degree:{c}"),
            QSpec::Level(NoiseLevel::InvSqrtDegree(c)) => write!(f, "inv-sqrt-degree:{c}"),
            QSpec::Level(NoiseLevel::StarCap { eps, frac }) => write!(f, "star:eps={eps},frac={frac}"),
            QSpec::Level(NoiseLevel::PerNode(v)) => write!(f, "per-node:{}", v.len()),
            QSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Fault model: `random`, `semiadv:root`, `semiadv:child=k`, or
/// `semiadv:<path>` to a file of `node target` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Random,
    PointToRoot,
    FixedChild(usize),
    MapFile(PathBuf),
}

impl ModelSpec {
    pub fn model(&self, level: NoiseLevel) -> Result<NoiseModel, String> {
        let adversary = match self {
            ModelSpec::Random => return Ok(NoiseModel::random(level)),
            ModelSpec::PointToRoot => Adversary::PointToRoot,
            ModelSpec::FixedChild(k) => Adversary::FixedChild(*k),
            ModelSpec::MapFile(p) => Adversary::Map(read_adversary_map(p)?),
        };
        Ok(NoiseModel {
            level,
            mode: FaultMode::SemiAdversarial(adversary),
        })
    }
}

fn read_adversary_map(p: &PathBuf) -> Result<FxHashMap<NodeId, NodeId>, String> {
    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    let mut map = FxHashMap::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<NodeId>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => {
                map.insert(u, v);
            }
            _ => return Err(format!("{}:{}: expected 'node target'", p.display(), i + 1)),
        }
    }
    Ok(map)
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "random" {
            return Ok(ModelSpec::Random);
        }
        let rest = s
            .strip_prefix("semiadv:")
            .ok_or_else(|| format!("unknown fault model '{s}'"))?;
        if rest == "root" {
            return Ok(ModelSpec::PointToRoot);
        }
        if let Some(k) = rest.strip_prefix("child=") {
            return k
                .parse()
                .map(ModelSpec::FixedChild)
                .map_err(|_| format!("bad child index '{k}'"));
        }
        if rest.is_empty() {
            return Err("semiadv needs 'root', 'child=k' or a map file".into());
        }
        Ok(ModelSpec::MapFile(PathBuf::from(rest)))
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Random => f.write_str("random"),
            ModelSpec::PointToRoot => f.write_str("semiadv:root"),
            ModelSpec::FixedChild(k) => write!(f, "semiadv:child={k}"),
            ModelSpec::MapFile(p) => write!(f, "semiadv:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_round_trips() {
        for s in [
            "complete:b=2,d=5,root=2,td=5",
            "complete:b=3,d=4,root=4,td=2,place=right",
            "heap:root=8,b=7,n=128",
            "path:n=3,td=2",
            "star:leaves=3,treasure=1",
            "random:n=40,seed=7",
            "caterpillar:spine=4,degree=4,td=3",
            "trimmed:b=3,d=5",
            "apex:b=2,d=4",
            "file:some/tree.txt",
        ] {
            assert_eq!(s.parse::<TreeSpec>().unwrap().to_string(), s);
        }
        assert_eq!("ary:delta=10,d=3".parse::<TreeSpec>().unwrap(), TreeSpec::ary(10, 3));
        assert_eq!("regular:delta=9,d=3".parse::<TreeSpec>().unwrap(), TreeSpec::regular(9, 3));
        assert!("complete:b=2".parse::<TreeSpec>().is_err());
        assert!("complete:b=2,d=3,x=1".parse::<TreeSpec>().is_err());
        assert!("blob:n=3".parse::<TreeSpec>().is_err());
    }

    #[test]
    fn with_param_replaces() {
        let t = TreeSpec::ary(5, 3).with_param("d", "6").unwrap();
        assert_eq!(t, TreeSpec::ary(5, 6));
        let t = TreeSpec::ary(5, 3).with_param("td", "1").unwrap().with_param("d", "6").unwrap();
        assert_eq!(t.to_string(), "complete:b=4,d=6,root=4,td=1");
    }

    #[test]
    fn big_complete_trees_are_implicit() {
        let t = TreeSpec::ary(16, 10).build(1_000_000).unwrap();
        assert!(t.explicit().is_none());
        assert_eq!(t.topology().treasure_depth(), 10);
        assert!(TreeSpec::ary(4, 3).build(1_000_000).unwrap().explicit().is_some());
    }

    #[test]
    fn noise_and_model_round_trips() {
        for s in ["0.1", "inv-degree:0.5", "inv-sqrt-degree:0.8", "star:eps=0.1,frac=0.8"] {
            assert_eq!(s.parse::<QSpec>().unwrap().to_string(), s);
        }
        for s in ["random", "semiadv:root", "semiadv:child=1", "semiadv:map.txt"] {
            assert_eq!(s.parse::<ModelSpec>().unwrap().to_string(), s);
        }
        assert!("semiadv:".parse::<ModelSpec>().is_err());
        assert!("chaos".parse::<ModelSpec>().is_err());
    }
}
