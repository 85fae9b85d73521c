//! Decision procedures for automorphisms of generalized Baumslag-Solitar
//! groups given by train track representatives on the Bass-Serre tree.

pub mod graph;
pub mod cover;
pub mod word;
pub mod matrix;
pub mod traintrack;
pub mod collapse;
pub mod samples;
pub mod nielsen;
pub mod pseudoperiodic;
pub mod lamination;
pub mod pipeline;

/// Data-parallel map over a slice; sequential when the `parallel` feature
/// is off or `parallel` is false.
pub fn par_map<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Default for the `parallel` switch of the search options.
pub const PARALLEL_DEFAULT: bool = cfg!(feature = "parallel");
