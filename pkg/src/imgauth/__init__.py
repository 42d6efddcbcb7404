"""imgauth: resampling-forgery authentication gating gallery face recognition.

The library half is numpy-style and side-effect free: image I/O, the
affine resampler, the periodicity detector, preprocessing/PCA features, and
the backpropagation network. The pipeline half wires those into the
verify-then-recognize flow exposed by the `imgauth` command-line tool.
"""

from .image_io import CropRect, GrayImage, PgmDecodeError, crop, load_pgm, save_pgm
from .resample import (
    AffineParams,
    Signal,
    SingularTransformError,
    apply_affine,
    kernel_weight,
    resample_signal_1d,
    synthesis_params,
)
from .detect import (
    AutoCovSequence,
    DetectorConfig,
    ForgeryVerdict,
    PeriodicityReport,
    Sinogram,
    autocovariance,
    derivative_n,
    detect_forgery,
    image_derivative_magnitude,
    periodicity_score,
    radon_transform,
    theoretical_derivative_variance,
)
from .preprocess import (
    PcaModel,
    average_filter,
    contrast_stretch,
    dct2,
    histogram_equalize,
    idct2,
    pca_fit,
    preprocess_to_vector,
    project_features,
    resize_bilinear,
)
from .network import (
    Network,
    Prediction,
    TrainConfig,
    TrainRecord,
    compute_gradients,
    forward,
    init_network,
    predict,
    train,
)
from .config import PipelineConfig, load_config, save_config
from .gallery import Gallery, load_gallery, write_gallery
from .modelio import ModelFormatError, RecognizerModel, load_model, model_from_bytes, model_to_bytes, save_model

__version__ = "0.1.0"
