//! Memory diagnostics of recurrence-interval series.
//!
//! Short-term memory: distributions and means of intervals conditioned on
//! the rank of the preceding interval. Long-term memory: DFA and DMA
//! fluctuation functions and their log-log scaling exponents.

mod conditional;
mod fluctuation;

pub use conditional::{
    conditional_means, conditional_pdf, partition_by_preceding, partition_values, subset_values,
    ConditionalMeanPoint, ConditionalMeans, ConditionalPdf, Partition, PdfBin, BINS_PER_DECADE,
};
pub use fluctuation::{
    box_size_grid, dfa_fluctuation, dma_fluctuation, dma_offsets, fit_loglog, fit_scaling,
    fit_scaling_range, profile, FluctuationFunction, FluctuationPoint, Method, ScalingFit, MIN_BOX,
};
