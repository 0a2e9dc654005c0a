//! Spectral containers, block-diagonal linear algebra and Fourier transforms.

mod block;
mod fourier;
mod state;

pub use block::BlockOperator;
pub use fourier::{
    circular_convolution, dft_forward, dft_forward_real, dft_inverse, is_conjugate_symmetric,
    GridSpec,
};
pub use state::SpectralState;
