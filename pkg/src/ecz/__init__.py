"""Lossless slope-predictor codec with fixed 16-bit framing.

Residuals of a second-order (slope) predictor are packed into 16-bit words
whose header says how many residuals of which width follow. See
:mod:`ecz.codec` for the frame layouts and :mod:`ecz.engine` for the
multi-channel container.
"""

from .codec import (
    DEFAULT_WIDTH,
    FrameType,
    PendingEntry,
    PredictorState,
    WidthClass,
    classify_width,
    compute_error,
    decode_frame,
    encode_frame,
    pack_step,
    predict,
    reconstruct,
)
from .engine import (
    DEFAULT_RESYNC_INTERVAL,
    ChannelDecoder,
    ChannelEncoder,
    Container,
    MultiChannelEncoder,
    decode_container,
    demux,
    deserialize_container,
    encode_channels,
    resync_scan,
    serialize_container,
)
from .errors import (
    BadMagic,
    ContainerError,
    CorruptionError,
    EczError,
    InvalidHeader,
    RangeCorruption,
    SampleRangeError,
    TruncatedContainer,
    UnsupportedVersion,
)
from .kernels import BACKEND

__version__ = "0.1.0"
