"""Discrete 2-d image signatures, D4 symmetrization and texture classification.

Images are float arrays of shape (H, W) or (H, W, C) with values in [0, 1].
"""

from ._sig2d import (
    D4,
    DataError,
    Error,
    Forest,
    IoError,
    Kind,
    MarginError,
    ParameterError,
    PcaModel,
    Scheme,
    WindowError,
    apply_d4,
    compose,
    full_window,
    inverse,
    load_image,
    num_threads,
    pca_fit,
    sample_patches,
    save_ppm,
    set_num_threads,
    sig_first_12,
    sig_first_hat,
    sig_second,
    signature_vector,
    synth_textures,
    train_forest,
)

__all__ = [name for name in dir() if not name.startswith("_")]
