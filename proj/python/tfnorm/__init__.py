"""Short-time Fourier transforms, modulation space norms and phase-space operators."""

from ._tfnorm import (
    Error,
    GridMismatch,
    InvariantViolation,
    ParseError,
    PhaseField,
    PreconditionError,
    Grid,
    Signal,
    apply_op,
    certify,
    dft,
    gaussian,
    l2_norm,
    make_grid,
    moyal_defect,
    norm,
    read_phase,
    read_signal,
    reconstruct,
    reconstruction_defect,
    stft,
    stft_adjoint,
    toeplitz,
    twisted_conv,
    weight,
    wigner,
    window,
    window_projection,
    write_phase,
    write_signal,
)

__all__ = [name for name in dir() if not name.startswith("_")]
