"""meetcap: live translation captions with re-translation stabilization,
an integrated metrics suite, a meeting/game server, and deterministic
simulated ASR/MT backends for offline testing."""

from .types import (
    CaptionUpdate,
    PolicyConfig,
    TranscriptEvent,
    SUPPORTED_LANGUAGES,
    UnsupportedLanguageError,
)
from .backends import (
    DictionaryBackend,
    EndpointConfig,
    ExternalBackend,
    IdentityBackend,
    MTBackend,
    MTRequest,
    MTResult,
    TranslateError,
    TranslateRejected,
    TranslateTimeout,
    make_backend,
)
from .caption import CaptionPipeline, Captioner
from .metrics import (
    MetricsReport,
    StreamingEvaluator,
    TranscriptPair,
    UtteranceLog,
    corpus_bleu,
    edit_rate,
    evaluate_session,
)
from .replay import ReplayScript, Replayer, VirtualClock, load_script, synthesize
from .session import RoomManager
from .evalrun import RunSpec, run_evaluate

__version__ = "0.1.0"

__all__ = [
    "CaptionPipeline",
    "CaptionUpdate",
    "Captioner",
    "DictionaryBackend",
    "EndpointConfig",
    "ExternalBackend",
    "IdentityBackend",
    "MTBackend",
    "MTRequest",
    "MTResult",
    "MetricsReport",
    "PolicyConfig",
    "ReplayScript",
    "Replayer",
    "RoomManager",
    "RunSpec",
    "StreamingEvaluator",
    "SUPPORTED_LANGUAGES",
    "TranscriptEvent",
    "TranscriptPair",
    "TranslateError",
    "TranslateRejected",
    "TranslateTimeout",
    "UnsupportedLanguageError",
    "UtteranceLog",
    "VirtualClock",
    "corpus_bleu",
    "edit_rate",
    "evaluate_session",
    "load_script",
    "make_backend",
    "run_evaluate",
    "synthesize",
]
