//! Command-line front end. Exit status 0 on success, 1 for unreadable or
//! malformed input and usage errors, 2 when an operation's precondition or
//! validation fails.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::canonical::canonical_code;
use crate::dot::to_dot;
use crate::explore::{enumerate_trees_with_limit, reachable, ExploreError, ReachLimits, DEFAULT_CANDIDATE_LIMIT};
use crate::invariant::{invariant_of, parse_coefficient, InvariantVector};
use crate::moves::{apply_move, enumerate_moves, Move, MoveLimits};
use crate::realize::{realize, RealizeError};
use crate::revolution::{tree_of_revolution_with, GeneratingCurve, RevolutionError, RevolutionOptions};
use crate::tree::{DoublePointTree, TreeError};

#[derive(Parser, Debug)]
#[command(
    name = "dptree",
    version,
    about = "Double point trees of immersed spheres without triple points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a tree against every structural rule
    Validate {
        tree: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print the invariant F of a tree
    Invariant {
        tree: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Negate every degree
    Negate {
        tree: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Connected sum at two vertices of delta 1
    Sum {
        tree1: String,
        vertex1: String,
        tree2: String,
        vertex2: String,
        /// Also print how the second tree's ids were renamed
        #[arg(long)]
        with_map: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// List every applicable move
    Moves {
        tree: String,
        #[arg(long, default_value_t = 8)]
        max_reattach_degree: usize,
    },
    /// Apply a move, or a JSON array of moves in order
    Apply {
        tree: String,
        /// Move JSON, inline or as a file path
        #[arg(name = "MOVE")]
        mv: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Search for a sequence of moves between two trees
    Reach {
        source: String,
        target: String,
        #[arg(long, default_value_t = 6)]
        max_steps: usize,
        #[arg(long, default_value_t = 11)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_reattach_degree: usize,
    },
    /// Enumerate all valid trees within bounds, one JSON object per line
    Enum {
        #[arg(long)]
        max_vertices: usize,
        #[arg(long)]
        delta_bound: i64,
        /// Refuse enumerations estimated to build more candidates than this
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_LIMIT)]
        limit: u64,
    },
    /// Build a tree with the given invariant
    Realize {
        /// Coefficient as index:value, repeatable
        #[arg(long = "coeff", value_name = "K:C", allow_hyphen_values = true, required = true)]
        coeff: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Tree of the surface of revolution of a generating curve
    FromCurve {
        curve: String,
        /// Use the opposite normal (negates all degrees)
        #[arg(long)]
        flip_orientation: bool,
        /// Override the curve's tolerance
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Graphviz rendering of a tree
    Dot { tree: String },
}

/// Failure with its exit status.
struct Failure {
    code: i32,
    message: String,
}

fn input(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn failed(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        if e.is_input_error() {
            input(e)
        } else {
            failed(e)
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, source: &str) -> Result<String, Failure> {
        if source == "-" {
            if self.stdin_used {
                return Err(input("standard input can be read only once"));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| input(format!("reading standard input: {e}")))?;
            Ok(s)
        } else {
            fs::read_to_string(source).map_err(|e| input(format!("reading {source}: {e}")))
        }
    }

    fn tree(&mut self, source: &str) -> Result<DoublePointTree, Failure> {
        let text = self.read(source)?;
        serde_json::from_str(&text).map_err(|e| input(format!("{source}: {e}")))
    }

    fn line(&mut self, s: &str) -> Result<(), Failure> {
        writeln!(self.stdout, "{s}").map_err(|e| input(format!("writing output: {e}")))
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        let s = serde_json::to_string(value).expect("serializable");
        self.line(&s)
    }

    fn emit_tree(&mut self, tree: &DoublePointTree, format: Format) -> Result<(), Failure> {
        match format {
            Format::Json => self.json(tree),
            Format::Dot => {
                let s = to_dot(tree);
                self.stdout
                    .write_all(s.as_bytes())
                    .map_err(|e| input(format!("writing output: {e}")))
            }
            Format::Pretty => self.line(pretty_tree(tree).trim_end()),
        }
    }
}

fn pretty_tree(tree: &DoublePointTree) -> String {
    let mut out = String::new();
    for (i, v) in tree.vertices().iter().enumerate() {
        out.push_str(&format!(
            "{}  delta {}  indegree {}\n",
            v.id,
            v.delta,
            tree.indegree_at(i)
        ));
    }
    for (i, e) in tree.edges().iter().enumerate() {
        let partner = tree.partner(i).map_or("-", |p| tree.edges()[p].id.as_str());
        out.push_str(&format!(
            "{}: {} -> {}  conjugate {}\n",
            e.id,
            tree.vertices()[e.tail].id,
            tree.vertices()[e.head].id,
            partner
        ));
    }
    out
}

/// Runs the command line `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let mut io = Io {
        stdin,
        stdin_used: false,
        stdout,
    };
    match dispatch(cli.command, &mut io, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { tree, format } => {
            let t = io.tree(&tree)?;
            let report = t.validate();
            match format {
                Format::Pretty => io.line(&report.to_string())?,
                _ => io.json(&report)?,
            }
            Ok(if report.ok { 0 } else { 2 })
        }
        Command::Invariant { tree, format } => {
            let f = invariant_of(&io.tree(&tree)?)?;
            match format {
                Format::Pretty => io.line(&f.to_string())?,
                _ => io.json(&f)?,
            }
            Ok(0)
        }
        Command::Negate { tree, format } => {
            let t = io.tree(&tree)?.negate()?;
            io.emit_tree(&t, format)?;
            Ok(0)
        }
        Command::Sum {
            tree1,
            vertex1,
            tree2,
            vertex2,
            with_map,
            format,
        } => {
            let t1 = io.tree(&tree1)?;
            let t2 = io.tree(&tree2)?;
            let sum = t1.connected_sum(&vertex1, &t2, &vertex2)?;
            if with_map && format == Format::Json {
                #[derive(Serialize)]
                struct WithMap<'a> {
                    tree: &'a DoublePointTree,
                    vertex_map: &'a std::collections::BTreeMap<String, String>,
                    edge_map: &'a std::collections::BTreeMap<String, String>,
                }
                io.json(&WithMap {
                    tree: &sum.tree,
                    vertex_map: &sum.vertex_map,
                    edge_map: &sum.edge_map,
                })?;
            } else {
                io.emit_tree(&sum.tree, format)?;
            }
            Ok(0)
        }
        Command::Moves {
            tree,
            max_reattach_degree,
        } => {
            let t = io.tree(&tree)?;
            t.require_valid()?;
            io.json(&enumerate_moves(&t, MoveLimits { max_reattach_degree }))?;
            Ok(0)
        }
        Command::Apply { tree, mv, format } => {
            let mut t = io.tree(&tree)?;
            let trimmed = mv.trim_start();
            let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
                mv.clone()
            } else {
                io.read(&mv)?
            };
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| input(format!("move: {e}")))?;
            let moves: Vec<Move> = if value.is_array() {
                serde_json::from_value(value)
            } else {
                serde_json::from_value(value).map(|m| vec![m])
            }
            .map_err(|e| input(format!("move: {e}")))?;
            for (i, m) in moves.iter().enumerate() {
                t = apply_move(&t, m).map_err(|e| {
                    let message = format!("move {i} ({}): {e}", m.kind_name());
                    if e.is_input_error() {
                        input(message)
                    } else {
                        failed(message)
                    }
                })?;
            }
            io.emit_tree(&t, format)?;
            Ok(0)
        }
        Command::Reach {
            source,
            target,
            max_steps,
            max_vertices,
            max_reattach_degree,
        } => {
            let s = io.tree(&source)?;
            let t = io.tree(&target)?;
            let limits = ReachLimits {
                max_steps,
                max_vertices,
                max_reattach_degree,
            };
            io.json(&reachable(&s, &t, limits)?)?;
            Ok(0)
        }
        Command::Enum {
            max_vertices,
            delta_bound,
            limit,
        } => {
            let trees = enumerate_trees_with_limit(max_vertices, delta_bound, limit).map_err(|e| match e {
                ExploreError::InvalidBound { .. } => input(e),
                _ => failed(e),
            })?;
            #[derive(Serialize)]
            struct Entry<'a> {
                code: String,
                tree: &'a DoublePointTree,
            }
            for (code, tree) in &trees {
                io.json(&Entry {
                    code: code.to_hex(),
                    tree,
                })?;
            }
            let _ = writeln!(stderr, "{} trees", trees.len());
            Ok(0)
        }
        Command::Realize { coeff, format } => {
            let pairs = coeff
                .iter()
                .flat_map(|c| c.split_whitespace())
                .map(parse_coefficient)
                .collect::<Result<Vec<_>, _>>()
                .map_err(input)?;
            let h = InvariantVector::from_pairs(pairs).map_err(input)?;
            let t = realize(&h).map_err(|e| match e {
                RealizeError::Tree(e) => Failure::from(e),
                e => failed(e),
            })?;
            io.emit_tree(&t, format)?;
            let _ = writeln!(stderr, "invariant: {}", invariant_of(&t)?);
            Ok(0)
        }
        Command::FromCurve {
            curve,
            flip_orientation,
            tol,
            format,
        } => {
            let text = io.read(&curve)?;
            let mut c: GeneratingCurve = serde_json::from_str(&text).map_err(|e| input(format!("{curve}: {e}")))?;
            if let Some(tol) = tol {
                c.tolerance = tol;
            }
            let t = tree_of_revolution_with(&c, RevolutionOptions { flip_orientation }).map_err(|e| match e {
                RevolutionError::InvalidCurve(_) => input(e),
                e => failed(e),
            })?;
            io.emit_tree(&t, format)?;
            Ok(0)
        }
        Command::Dot { tree } => {
            let t = io.tree(&tree)?;
            if let Ok(code) = canonical_code(&t) {
                let _ = writeln!(stderr, "code: {code}");
            }
            io.emit_tree(&t, Format::Dot)?;
            Ok(0)
        }
    }
}
