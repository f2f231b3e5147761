use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the configured ceiling {ceiling}")]
    Capacity {
        what: &'static str,
        value: u64,
        ceiling: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vertex {0} is not in the graph")]
    MissingVertex(u64),

    #[error("duplicate element {0}")]
    DuplicateElement(u64),

    #[error("graph with {vertices} vertices exceeds the {engine} limit of {limit}")]
    Size {
        engine: &'static str,
        vertices: usize,
        limit: usize,
    },

    #[error("tractability budget exceeded: {0}")]
    Tractability(String),

    #[error("P+({b}) = {largest_prime} exceeds the smoothness bound s = {s}")]
    SmoothnessMismatch { b: u64, largest_prime: u64, s: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
