"""scikit-learn style transformer facade over the fixed-point transform.

FixedPointFFT treats each row of a complex (n_frames, 128) matrix as one
frame and returns its fixed-point spectrum, so the simulator plugs into
sklearn pipelines and parameter-search tooling (get_params/set_params,
fit/transform, clone) without any adapter code.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .fixedpoint import (
    FixedFormat,
    OVERFLOW_SATURATE,
    ROUND_HALF_EVEN,
    quantize_array,
)
from .flowgraph import ScalingPolicy, default_plan, fft_fixed
from .metrics import sqnr_frames_db


class FixedPointFFT(BaseEstimator, TransformerMixin):
    """128-point fixed-point FFT as a stateless sklearn transformer.

    Parameters
    ----------
    word_length : int, default 12
        Total bits per real component.
    frac_bits : int or None, default None
        Fractional bits; None means word_length - 1 (one sign/integer bit).
    rounding : str, default "round-half-even"
    overflow : str, default "saturate"
    scaling : str, default "per-stage"
        Stage-halving policy; "none", "per-stage", or a stage list "1,3,5".
    output_order : str, default "bitrev"
        Bin order of the returned spectrum.
    compensate_gain : bool, default True
        Multiply outputs by 2**(number of halved stages) so they estimate
        the unscaled transform.

    Attributes (after fit)
    ----------------------
    fmt_ : FixedFormat
    plan_ : DecompositionPlan
    scaling_ : ScalingPolicy
    n_features_in_ : int
    """

    def __init__(self, word_length: int = 12, frac_bits: int | None = None,
                 rounding: str = ROUND_HALF_EVEN,
                 overflow: str = OVERFLOW_SATURATE,
                 scaling: str = "per-stage", output_order: str = "bitrev",
                 compensate_gain: bool = True):
        self.word_length = word_length
        self.frac_bits = frac_bits
        self.rounding = rounding
        self.overflow = overflow
        self.scaling = scaling
        self.output_order = output_order
        self.compensate_gain = compensate_gain

    def _validate(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 2:
            raise ValueError("expected a 2d array of frames")
        if X.shape[1] != 128:
            raise ValueError(f"expected 128 samples per frame, got {X.shape[1]}")
        return X

    def fit(self, X, y=None):
        X = self._validate(X)
        frac = self.word_length - 1 if self.frac_bits is None else self.frac_bits
        self.fmt_ = FixedFormat(self.word_length, frac, self.rounding,
                                self.overflow)
        self.plan_ = default_plan()
        self.scaling_ = ScalingPolicy.parse(self.scaling, self.plan_.n_stages)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "fmt_")
        X = self._validate(X)
        re = quantize_array(X.real, self.fmt_)
        im = quantize_array(X.imag, self.fmt_)
        result = fft_fixed(re, im, self.fmt_, plan=self.plan_,
                           scaling=self.scaling_,
                           output_order=self.output_order)
        out = result.to_complex(self.fmt_)
        if self.compensate_gain:
            out = out * float(2 ** result.stats.gain_log2)
        return out

    def score(self, X, y=None) -> float:
        """Mean SQNR (dB) of the fixed-point spectrum against float, higher
        is better; lets word-length choices plug into model selection."""
        check_is_fitted(self, "fmt_")
        X = self._validate(X)
        re = quantize_array(X.real, self.fmt_)
        im = quantize_array(X.imag, self.fmt_)
        db = sqnr_frames_db(re, im, self.fmt_, self.scaling_, self.plan_)
        return float(np.mean(db[np.isfinite(db)]))
