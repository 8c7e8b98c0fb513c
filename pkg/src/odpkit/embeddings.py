"""Text-to-vector providers behind one interface.

Two implementations: a bit-deterministic local feature-hashing embedder
(so the whole pipeline runs with no external service) and a client for
the common embeddings HTTP convention (POST JSON with ``input``/``model``,
response ``data[i].embedding`` index-aligned with the input). Vectors are
L2-normalized on the way out; an optional file cache keyed by provider,
model or dimension, and exact text persists vectors between runs.
"""
from __future__ import annotations

import base64
import hashlib
import math
import os
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

DEFAULT_DIMENSION = 512
DEFAULT_REMOTE_MODEL = "hkunlp/instructor-large"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


class EmbeddingError(Exception):
    """Base class for provider failures."""


class TransportError(EmbeddingError):
    """The embedding service could not be reached."""


class ServiceStatusError(EmbeddingError):
    """The embedding service answered with a non-success HTTP status."""

    def __init__(self, status_code: int, detail: str = "") -> None:
        super().__init__(f"embedding service returned HTTP {status_code}{detail and ': ' + detail}")
        self.status_code = status_code


class ResponseShapeError(EmbeddingError):
    """The service response did not follow the expected JSON shape."""


class DimensionMismatchError(EmbeddingError):
    """Vectors in one batch do not share a single dimension."""


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding vector contains non-finite values")
        norm = math.sqrt(sum(v * v for v in self.values))
        if norm != 0.0 and abs(norm - 1.0) > 1e-6:
            raise ValueError(f"embedding vector is not unit length (|v|={norm!r})")

    @property
    def dimension(self) -> int:
        return len(self.values)

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    @staticmethod
    def from_raw(values: Sequence[float]) -> EmbeddingVector:
        """Build a vector from arbitrary finite values, L2-normalizing
        (the all-zero vector stays zero)."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("embedding values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding vector contains non-finite values")
        norm = float(np.linalg.norm(arr))
        if norm > 0.0:
            arr = arr / norm
        return EmbeddingVector(tuple(float(v) for v in arr))


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "local-hash"  # local-hash | remote-http
    dimension: int = DEFAULT_DIMENSION
    endpoint: str | None = None
    model: str = DEFAULT_REMOTE_MODEL
    auth_token_env: str | None = None
    timeout: float = 30.0
    max_batch_size: int = 64
    cache_path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("local-hash", "remote-http"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "local-hash" and self.dimension < 2:
            raise ValueError("local provider dimension must be at least 2")
        if self.kind == "remote-http":
            if not self.endpoint or "://" not in self.endpoint:
                raise ValueError("remote provider requires a syntactically valid endpoint URL")

    @property
    def cache_key_scope(self) -> str:
        if self.kind == "local-hash":
            return f"local-hash|{self.dimension}"
        return f"remote-http|{self.model}"


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            tokens.append("".join(word))
            word = []
    if word:
        tokens.append("".join(word))
    return tokens


def local_hash_embed(text: str, dimension: int = DEFAULT_DIMENSION) -> EmbeddingVector:
    """Deterministic feature-hashing embedding.

    Features are word unigrams plus character trigrams of each token
    padded with '^'/'$'. Each distinct feature adds 1/(1+ln(count)) at
    bucket FNV1a64(feature) mod D, with the sign taken from bit 63 of
    the hash; the result is L2-normalized (all-zero for empty text).
    """
    if dimension < 2:
        raise ValueError("dimension must be at least 2")
    counts: dict[str, int] = {}
    for token in _tokenize(text):
        counts[token] = counts.get(token, 0) + 1
        padded = f"^{token}$"
        for i in range(len(padded) - 2):
            trigram = padded[i : i + 3]
            counts[trigram] = counts.get(trigram, 0) + 1
    vec = np.zeros(dimension, dtype=np.float64)
    for feature, count in counts.items():
        h = fnv1a_64(feature.encode("utf-8"))
        sign = -1.0 if (h >> 63) & 1 else 1.0
        vec[h % dimension] += sign / (1.0 + math.log(count))
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return EmbeddingVector(tuple(float(v) for v in vec))


class VectorCache:
    """Append-only vector store: one record per line holding the SHA-256
    of the cache key, the dimension, and base64 little-endian float32s.
    Writes are serialized; loads re-normalize (float32 storage is lossy)."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, EmbeddingVector] = {}
        if self.path.exists():
            self._load()

    @staticmethod
    def key_for(scope: str, text: str) -> str:
        return hashlib.sha256(f"{scope}\x00{text}".encode("utf-8")).hexdigest()

    def _load(self) -> None:
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            key, dim_text, payload = line.split(" ", 2)
            dimension = int(dim_text)
            raw = struct.unpack(f"<{dimension}f", base64.b64decode(payload))
            self._entries[key] = EmbeddingVector.from_raw(raw)

    def get(self, key: str) -> EmbeddingVector | None:
        return self._entries.get(key)

    def put(self, key: str, vector: EmbeddingVector) -> None:
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = vector
            payload = base64.b64encode(
                struct.pack(f"<{vector.dimension}f", *vector.values)
            ).decode("ascii")
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(f"{key} {vector.dimension} {payload}\n")


class EmbeddingProvider(Protocol):
    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


@dataclass
class LocalHashProvider:
    dimension: int = DEFAULT_DIMENSION
    cache: VectorCache | None = None

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        if len(texts) == 0:
            raise ValueError("embed_batch requires a non-empty list of texts")
        scope = f"local-hash|{self.dimension}"
        out: list[EmbeddingVector] = []
        for text in texts:
            if self.cache is not None:
                key = VectorCache.key_for(scope, text)
                hit = self.cache.get(key)
                if hit is not None:
                    out.append(hit)
                    continue
                vector = local_hash_embed(text, self.dimension)
                self.cache.put(key, vector)
            else:
                vector = local_hash_embed(text, self.dimension)
            out.append(vector)
        return out


@dataclass
class RemoteHttpProvider:
    """Client for the de-facto embeddings endpoint convention."""

    endpoint: str
    model: str = DEFAULT_REMOTE_MODEL
    auth_token_env: str | None = None
    timeout: float = 30.0
    max_batch_size: int = 64
    cache: VectorCache | None = None
    session: object | None = None  # anything with .post(url, json=, headers=, timeout=)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_token_env:
            token = os.environ.get(self.auth_token_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post(self, payload: dict) -> dict:
        session = self.session
        if session is None:
            import requests

            session = requests
        try:
            response = session.post(
                self.endpoint, json=payload, headers=self._headers(), timeout=self.timeout
            )
        except Exception as exc:  # connection refused, DNS, timeout, ...
            raise TransportError(f"embedding request failed: {exc}") from exc
        status = getattr(response, "status_code", 0)
        if not 200 <= status < 300:
            raise ServiceStatusError(status)
        try:
            return response.json()
        except Exception as exc:
            raise ResponseShapeError(f"response body is not JSON: {exc}") from exc

    def _embed_chunk(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        body = self._post({"input": list(texts), "model": self.model})
        data = body.get("data") if isinstance(body, dict) else None
        if not isinstance(data, list) or len(data) != len(texts):
            raise ResponseShapeError(
                f"expected 'data' array of {len(texts)} entries, got "
                f"{type(data).__name__ if data is not None else 'nothing'}"
            )
        vectors: list[EmbeddingVector] = []
        for index, item in enumerate(data):
            embedding = item.get("embedding") if isinstance(item, dict) else None
            if not isinstance(embedding, list) or not embedding:
                raise ResponseShapeError(f"entry {index} lacks an 'embedding' array")
            try:
                vectors.append(EmbeddingVector.from_raw(embedding))
            except ValueError as exc:
                raise ResponseShapeError(f"entry {index}: {exc}") from exc
        dims = {v.dimension for v in vectors}
        if len(dims) > 1:
            raise DimensionMismatchError(f"batch mixes dimensions {sorted(dims)}")
        return vectors

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        if len(texts) == 0:
            raise ValueError("embed_batch requires a non-empty list of texts")
        scope = f"remote-http|{self.model}"
        out: dict[int, EmbeddingVector] = {}
        missing: list[tuple[int, str]] = []
        for i, text in enumerate(texts):
            hit = None
            if self.cache is not None:
                hit = self.cache.get(VectorCache.key_for(scope, text))
            if hit is not None:
                out[i] = hit
            else:
                missing.append((i, text))

        for start in range(0, len(missing), self.max_batch_size):
            chunk = missing[start : start + self.max_batch_size]
            vectors = self._embed_chunk([text for _, text in chunk])
            for (i, text), vector in zip(chunk, vectors):
                out[i] = vector
                if self.cache is not None:
                    self.cache.put(VectorCache.key_for(scope, text), vector)

        results = [out[i] for i in range(len(texts))]
        dims = {v.dimension for v in results}
        if len(dims) > 1:
            raise DimensionMismatchError(f"batch mixes dimensions {sorted(dims)}")
        return results


def make_provider(config: ProviderConfig) -> EmbeddingProvider:
    cache = VectorCache(config.cache_path) if config.cache_path else None
    if config.kind == "local-hash":
        return LocalHashProvider(dimension=config.dimension, cache=cache)
    return RemoteHttpProvider(
        endpoint=config.endpoint or "",
        model=config.model,
        auth_token_env=config.auth_token_env,
        timeout=config.timeout,
        max_batch_size=config.max_batch_size,
        cache=cache,
    )


def embed_batch(texts: Sequence[str], config: ProviderConfig) -> list[EmbeddingVector]:
    """One vector per input text, same order, one shared dimension."""
    return make_provider(config).embed_batch(texts)
