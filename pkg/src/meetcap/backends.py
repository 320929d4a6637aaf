"""Pluggable MT backends.

The captioning layer only depends on the translate() contract: given the
full current utterance transcript and optionally the previous output as a
bias, return target-language tokens plus how much of the bias prefix was
honored. Real biased decoding lives inside external MT services; here the
deterministic mocks reproduce the two behaviors that matter for caption
stability: an identity backend (perfectly stable) and a dictionary backend
whose unbiased mode jitters synonym choices as the source grows, modeling
re-translation flicker.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import requests

from .text import lcp_len, tokenize
from .types import check_language


class TranslateError(Exception):
    """Base class for backend translation failures."""


class TranslateTimeout(TranslateError):
    """The backend did not answer within the configured timeout."""


class TranslateRejected(TranslateError):
    """The backend answered with an error response."""


@dataclass(frozen=True)
class MTRequest:
    source_lang: str
    target_lang: str
    source_text: str
    bias_text: Optional[str] = None

    def __post_init__(self):
        check_language(self.source_lang)
        check_language(self.target_lang)


@dataclass(frozen=True)
class MTResult:
    tokens: tuple
    honored_bias_prefix_len: int


def _check_bias_invariant(req: MTRequest, result: MTResult) -> MTResult:
    bias_tokens = tokenize(req.target_lang, req.bias_text or "")
    limit = min(len(result.tokens), len(bias_tokens))
    if result.honored_bias_prefix_len > limit:
        raise AssertionError("honored_bias_prefix_len exceeds bias/output length")
    if list(result.tokens[: result.honored_bias_prefix_len]) != bias_tokens[: result.honored_bias_prefix_len]:
        raise AssertionError("honored prefix does not match bias")
    return result


class MTBackend:
    """Interface: implementations must be deterministic (mocks) and safe
    for concurrent calls from independent sessions."""

    name = "base"

    def translate(self, req: MTRequest) -> MTResult:
        raise NotImplementedError


class IdentityBackend(MTBackend):
    """Pass-through backend: output tokens are the source tokens.

    Tokenizes with the target language's rules so en->zh still produces a
    per-character stream. Bias is trivially honored up to the common
    prefix. Supports fault injection for error-path tests.
    """

    name = "identity"

    def __init__(self, fault: Optional[Callable[[MTRequest], None]] = None):
        self._fault = fault

    def translate(self, req: MTRequest) -> MTResult:
        if self._fault is not None:
            self._fault(req)
        tokens = tuple(tokenize(req.target_lang, req.source_text))
        bias_tokens = tokenize(req.target_lang, req.bias_text or "")
        honored = lcp_len(tokens, bias_tokens)
        return _check_bias_invariant(req, MTResult(tokens, honored))


def _jitter_hash(text: str) -> int:
    # crc32 rather than hash(): stable across interpreter runs.
    return zlib.crc32(text.encode("utf-8"))


class DictionaryBackend(MTBackend):
    """Token-by-token dictionary translation with synonym jitter.

    lexicon maps "src-tgt" language pairs to {source token: [synonyms]}.
    Source tokens without an entry pass through unchanged.

    Unbiased mode picks synonym index hash(full source text) mod the
    synonym count, so the whole output can jitter between acceptable
    variants as the utterance grows. Biased mode first copies the longest
    bias prefix that is a valid mapping of the source prefix, then maps
    the remainder with synonym index 0, so earlier choices stick.
    """

    name = "dictionary"

    def __init__(
        self,
        lexicon: Dict[str, Dict[str, List[str]]],
        fault: Optional[Callable[[MTRequest], None]] = None,
    ):
        self.lexicon = lexicon
        self._fault = fault

    def _options(self, req: MTRequest, token: str) -> List[str]:
        pair = f"{req.source_lang}-{req.target_lang}"
        entry = self.lexicon.get(pair, {}).get(token)
        if not entry:
            return [token]
        return entry

    def translate(self, req: MTRequest) -> MTResult:
        if self._fault is not None:
            self._fault(req)
        source = tokenize(req.source_lang, req.source_text)
        bias = tokenize(req.target_lang, req.bias_text or "")

        out: List[str] = []
        honored = 0
        if req.bias_text:
            for i, tok in enumerate(source):
                if i >= len(bias):
                    break
                if bias[i] in self._options(req, tok):
                    out.append(bias[i])
                    honored += 1
                else:
                    break
            out.extend(self._options(req, tok)[0] for tok in source[honored:])
        else:
            h = _jitter_hash(req.source_text)
            out = [
                (opts := self._options(req, tok))[h % len(opts)] for tok in source
            ]
            honored = lcp_len(out, bias)
        return _check_bias_invariant(req, MTResult(tuple(out), honored))


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    timeout_ms: int = 2000
    api_key_env: str = "MEETCAP_MT_API_KEY"


class ExternalBackend(MTBackend):
    """Adapter for a remote HTTP translation API.

    Marshals the request as JSON, tokenizes the response text. External
    services ignore the bias, so the honored prefix is computed as a
    plain LCP against the bias text.
    """

    name = "external"

    def __init__(self, config: EndpointConfig):
        self.config = config

    def translate(self, req: MTRequest) -> MTResult:
        headers = {}
        key = os.environ.get(self.config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {
            "source_lang": req.source_lang,
            "target_lang": req.target_lang,
            "text": req.source_text,
        }
        try:
            resp = requests.post(
                self.config.url,
                json=payload,
                headers=headers,
                timeout=self.config.timeout_ms / 1000.0,
            )
        except requests.Timeout as e:
            raise TranslateTimeout(
                f"MT endpoint timed out after {self.config.timeout_ms} ms"
            ) from e
        except requests.RequestException as e:
            raise TranslateRejected(f"MT endpoint unreachable: {e}") from e
        if not 200 <= resp.status_code < 300:
            raise TranslateRejected(
                f"MT endpoint returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            translation = resp.json()["translation"]
        except (ValueError, KeyError) as e:
            raise TranslateRejected(f"malformed MT response: {resp.text[:200]}") from e
        tokens = tuple(tokenize(req.target_lang, translation))
        bias_tokens = tokenize(req.target_lang, req.bias_text or "")
        honored = lcp_len(tokens, bias_tokens)
        return _check_bias_invariant(req, MTResult(tokens, honored))


def make_backend(
    name: str,
    lexicon: Optional[Dict[str, Dict[str, List[str]]]] = None,
    endpoint: Optional[EndpointConfig] = None,
) -> MTBackend:
    """Construct a backend by name: identity, dictionary, or external."""
    if name == "identity":
        return IdentityBackend()
    if name == "dictionary":
        return DictionaryBackend(lexicon or {})
    if name == "external":
        if endpoint is None:
            raise ValueError("external backend requires an endpoint config")
        return ExternalBackend(endpoint)
    raise ValueError(f"unknown backend {name!r}")
