//! Limit sets of Kleinian groups by index search.
//!
//! Words of the group are never stored: every node of the `m`-ary word tree
//! is identified by an integer index, decoded on demand into its word
//! ([`codec`]), validated by running it through an indexed Cayley table
//! ([`group`]), and evaluated as a Möbius orbit ([`moebius`], [`render`]).
//! The stored-dictionary and random-walk baselines live in [`oracles`].

pub mod cli;
pub mod codec;
pub mod error;
pub mod group;
pub mod image;
pub mod moebius;
pub mod oracles;
pub mod render;

pub use codec::{decode_index, encode_word, node_counts, NodeCount, NodeIndex};
pub use error::{Error, Result};
pub use group::{
    builtin_group, check_word_run, digits_to_letters, letters_to_digits, validate_table, GroupSpec,
    IndexedCayleyTable, RunOutcome, Word,
};
pub use moebius::{ComplexPoint, GeneratorSet, Moebius};
pub use render::{
    collect_seed_points, plot, render_index_search, word_value, Canvas, RenderConfig, RenderMode,
    RenderStats, SeedPolicy, Viewport,
};

pub use num_complex::Complex64;
