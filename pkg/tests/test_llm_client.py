import json
import threading

import httpx
import pytest

from text2plan.errors import ClientError
from text2plan.llm.client import HTTPClient, MockClient, client_from_env, message_key, save_fixture

MSGS = [{"role": "user", "content": "hello"}]


def test_message_key_stable():
    assert message_key(MSGS) == message_key([{"role": "user", "content": "hello", "extra": 1}])
    assert message_key(MSGS) != message_key([{"role": "system", "content": "hello"}])


def test_mock_roundtrip(tmp_path):
    save_fixture(tmp_path, MSGS, "hi there")
    (tmp_path / "manifest.json").write_text("{}")
    c = MockClient.from_dir(tmp_path)
    assert c.send(MSGS) == "hi there" and c.calls == 1
    with pytest.raises(ClientError):
        c.send([{"role": "user", "content": "other"}])


def test_mock_concurrent():
    c = MockClient()
    c.add(MSGS, "ok")
    threads = [threading.Thread(target=lambda: [c.send(MSGS) for _ in range(50)]) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.calls == 200


def test_http_client_with_mock_transport():
    seen = []

    def handler(request):
        seen.append(json.loads(request.content))
        return httpx.Response(200, json={"choices": [{"message": {"content": "layout"}}]})

    c = HTTPClient("http://llm.invalid/v1", api_key="k", model="m", transport=httpx.MockTransport(handler))
    assert c.send(MSGS) == "layout"
    assert seen[0]["model"] == "m" and seen[0]["messages"] == MSGS


def test_http_client_retries_then_fails():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(503)

    c = HTTPClient("http://llm.invalid/v1", transport=httpx.MockTransport(handler), retries=2, backoff=0.0)
    with pytest.raises(ClientError):
        c.send(MSGS)
    assert len(calls) == 3


def test_env_selection(monkeypatch, tmp_path):
    monkeypatch.delenv("TEXT2PLAN_LLM_ENDPOINT", raising=False)
    assert isinstance(client_from_env(tmp_path), MockClient)
    monkeypatch.setenv("TEXT2PLAN_LLM_ENDPOINT", "http://llm.invalid/v1")
    assert isinstance(client_from_env(tmp_path), HTTPClient)
    monkeypatch.delenv("TEXT2PLAN_LLM_ENDPOINT")
    with pytest.raises(ClientError):
        HTTPClient()
