"""Language-model clients: an OpenAI-compatible HTTP client and a fixture-replaying mock."""
from __future__ import annotations

import glob
import hashlib
import json
import logging
import os
import threading
import time
from typing import Protocol

from ..errors import ClientError

log = logging.getLogger(__name__)

ENV_ENDPOINT = "TEXT2PLAN_LLM_ENDPOINT"
ENV_KEY = "TEXT2PLAN_LLM_API_KEY"
ENV_MODEL = "TEXT2PLAN_LLM_MODEL"

Message = dict  # {"role": ..., "content": ...}


class LLMClient(Protocol):
    def send(self, messages: list[Message]) -> str: ...


def message_key(messages: list[Message]) -> str:
    """Stable hash of a message list (role and content only)."""
    canon = json.dumps([[m["role"], m["content"]] for m in messages], ensure_ascii=False,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class MockClient:
    """Replays canned responses keyed by ``message_key``. Safe for concurrent use."""

    def __init__(self, fixtures: dict[str, str] | None = None):
        self.fixtures = dict(fixtures or {})
        self.calls = 0
        self.history: list[str] = []
        self._lock = threading.Lock()

    @classmethod
    def from_dir(cls, path) -> "MockClient":
        fixtures = {}
        for fn in sorted(glob.glob(os.path.join(path, "*.json"))):
            with open(fn) as fh:
                rec = json.load(fh)
            if isinstance(rec, dict) and "key" in rec and "response" in rec:
                fixtures[rec["key"]] = rec["response"]
        return cls(fixtures)

    def add(self, messages: list[Message], response: str) -> str:
        key = message_key(messages)
        self.fixtures[key] = response
        return key

    def send(self, messages: list[Message]) -> str:
        key = message_key(messages)
        with self._lock:
            self.calls += 1
            self.history.append(key)
        try:
            return self.fixtures[key]
        except KeyError:
            raise ClientError(f"no fixture for message hash {key[:12]}") from None


def save_fixture(directory, messages: list[Message], response: str) -> str:
    os.makedirs(directory, exist_ok=True)
    key = message_key(messages)
    with open(os.path.join(directory, f"{key}.json"), "w") as fh:
        json.dump({"key": key, "messages": messages, "response": response}, fh, indent=1,
                  ensure_ascii=False)
        fh.write("\n")
    return key


class HTTPClient:
    """Chat-completions client for any OpenAI-compatible endpoint.

    Configuration comes from the constructor or the ``TEXT2PLAN_LLM_*``
    environment variables. Instances hold no per-request state, so concurrent
    ``send`` calls are fine.
    """

    def __init__(self, endpoint: str | None = None, api_key: str | None = None,
                 model: str | None = None, temperature: float = 0.7, retries: int = 2,
                 backoff: float = 2.0, timeout: float = 120.0, transport=None):
        import httpx

        self.endpoint = (endpoint or os.environ.get(ENV_ENDPOINT, "")).rstrip("/")
        if not self.endpoint:
            raise ClientError(f"no endpoint configured (set {ENV_ENDPOINT})")
        self.model = model or os.environ.get(ENV_MODEL, "gpt-4o")
        self.temperature = temperature
        self.retries = retries
        self.backoff = backoff
        key = api_key if api_key is not None else os.environ.get(ENV_KEY, "")
        headers = {"Authorization": f"Bearer {key}"} if key else {}
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def send(self, messages: list[Message]) -> str:
        import httpx

        body = {"model": self.model, "temperature": self.temperature, "messages": messages}
        last = None
        for attempt in range(self.retries + 1):
            try:
                resp = self._http.post(f"{self.endpoint}/chat/completions", json=body)
                if resp.status_code in (429, 500, 502, 503, 504):
                    raise ClientError(f"HTTP {resp.status_code}")
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (httpx.HTTPError, ClientError, KeyError, IndexError, ValueError) as exc:
                last = exc
                log.warning("LLM request failed (attempt %d): %s", attempt + 1, exc)
                if attempt < self.retries:
                    time.sleep(self.backoff * 2**attempt)
        raise ClientError(f"LLM request failed after {self.retries + 1} attempts: {last}")


def client_from_env(fixtures_dir=None, **kw) -> LLMClient:
    """Live client when an endpoint is configured, otherwise a mock over ``fixtures_dir``."""
    if os.environ.get(ENV_ENDPOINT):
        return HTTPClient(**kw)
    if fixtures_dir and os.path.isdir(fixtures_dir):
        return MockClient.from_dir(fixtures_dir)
    return MockClient()
