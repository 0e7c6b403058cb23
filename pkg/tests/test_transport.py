import json

import pytest
import requests

from fundflow.errors import ReplayMiss, TransportError
from fundflow.transport import (
    LiveTransport,
    RecordTransport,
    ReplayTransport,
    TransportParams,
    query_key,
)

PARAMS = TransportParams(model="gpt-4o", temperature=0.0, max_tokens=1024)


def test_query_key_is_sha256_hex():
    key = query_key("hello", PARAMS)
    assert len(key) == 64 and set(key) <= set("0123456789abcdef")


def test_query_key_stable():
    assert query_key("hello", PARAMS, attempt=1) == query_key("hello", PARAMS, attempt=1)


@pytest.mark.parametrize(
    "other",
    [
        ("different prompt", PARAMS, 0),
        ("hello", TransportParams(model="gpt-4o-mini"), 0),
        ("hello", TransportParams(model="gpt-4o", temperature=0.5), 0),
        ("hello", TransportParams(model="gpt-4o", max_tokens=2048), 0),
        ("hello", PARAMS, 1),
    ],
)
def test_query_key_sensitive_to_every_field(other):
    prompt, params, attempt = other
    assert query_key(prompt, params, attempt) != query_key("hello", PARAMS, 0)


class EchoTransport:
    def __init__(self, params):
        self.params = params

    def query(self, prompt, attempt=0):
        return f"echo {prompt} / attempt {attempt} / ünïcode"


def test_record_then_replay_byte_identity(tmp_path):
    store = tmp_path / "store.jsonl"
    recorder = RecordTransport(EchoTransport(PARAMS), str(store))
    sent = [("alpha", 0), ("beta", 0), ("alpha", 1)]
    recorded = [recorder.query(p, a) for p, a in sent]

    lines = store.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    assert [json.loads(x)["key"] for x in lines] == [
        query_key(p, PARAMS, a) for p, a in sent
    ]

    replay = ReplayTransport(str(store), PARAMS)
    assert [replay.query(p, a) for p, a in sent] == recorded


def test_replay_miss_carries_key(tmp_path):
    store = tmp_path / "store.jsonl"
    store.write_text("", encoding="utf-8")
    replay = ReplayTransport(str(store), PARAMS)
    with pytest.raises(ReplayMiss) as exc_info:
        replay.query("never recorded")
    assert exc_info.value.key == query_key("never recorded", PARAMS, 0)


def test_replay_skips_blank_lines(tmp_path):
    store = tmp_path / "store.jsonl"
    key = query_key("p", PARAMS, 0)
    store.write_text(
        "\n" + json.dumps({"key": key, "model": "gpt-4o", "response": "r"}) + "\n\n",
        encoding="utf-8",
    )
    assert ReplayTransport(str(store), PARAMS).query("p") == "r"


def test_replay_differs_when_params_differ(tmp_path):
    store = tmp_path / "store.jsonl"
    RecordTransport(EchoTransport(PARAMS), str(store)).query("p")
    other = ReplayTransport(str(store), TransportParams(model="gpt-4o-mini"))
    with pytest.raises(ReplayMiss):
        other.query("p")


class FakeResponse:
    def __init__(self, payload, error=None):
        self._payload = payload
        self._error = error

    def raise_for_status(self):
        if self._error:
            raise self._error

    def json(self):
        return self._payload


def test_live_transport_success(monkeypatch):
    captured = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        captured.update(url=url, body=json, headers=headers, timeout=timeout)
        return FakeResponse({"choices": [{"message": {"content": "hello back"}}]})

    monkeypatch.setattr("fundflow.transport.requests.post", fake_post)
    monkeypatch.setenv("FAKE_API_KEY_VAR", "test-key-123")
    live = LiveTransport(PARAMS, "https://example.invalid/v1/chat", "FAKE_API_KEY_VAR")
    assert live.query("ping", attempt=3) == "hello back"
    assert captured["url"] == "https://example.invalid/v1/chat"
    assert captured["body"] == {
        "model": "gpt-4o",
        "messages": [{"role": "user", "content": "ping"}],
        "temperature": 0.0,
        "max_tokens": 1024,
    }
    assert captured["headers"]["Authorization"] == "Bearer test-key-123"
    assert captured["timeout"] == 120.0


def test_live_transport_requires_env_key(monkeypatch):
    calls = []
    monkeypatch.setattr(
        "fundflow.transport.requests.post", lambda *a, **k: calls.append(1)
    )
    monkeypatch.delenv("FAKE_API_KEY_VAR", raising=False)
    live = LiveTransport(PARAMS, "https://example.invalid", "FAKE_API_KEY_VAR")
    with pytest.raises(TransportError, match="FAKE_API_KEY_VAR"):
        live.query("ping")
    assert calls == []  # no request without a key


def test_live_transport_http_error(monkeypatch):
    def fake_post(url, **kwargs):
        return FakeResponse({}, error=requests.HTTPError("429 too many requests"))

    monkeypatch.setattr("fundflow.transport.requests.post", fake_post)
    monkeypatch.setenv("FAKE_API_KEY_VAR", "k")
    live = LiveTransport(PARAMS, "https://example.invalid", "FAKE_API_KEY_VAR")
    with pytest.raises(TransportError):
        live.query("ping")


def test_live_transport_connection_error(monkeypatch):
    def fake_post(url, **kwargs):
        raise requests.ConnectionError("refused")

    monkeypatch.setattr("fundflow.transport.requests.post", fake_post)
    monkeypatch.setenv("FAKE_API_KEY_VAR", "k")
    live = LiveTransport(PARAMS, "https://example.invalid", "FAKE_API_KEY_VAR")
    with pytest.raises(TransportError, match="refused"):
        live.query("ping")


def test_live_transport_unexpected_shape(monkeypatch):
    monkeypatch.setattr(
        "fundflow.transport.requests.post",
        lambda url, **kwargs: FakeResponse({"unexpected": True}),
    )
    monkeypatch.setenv("FAKE_API_KEY_VAR", "k")
    live = LiveTransport(PARAMS, "https://example.invalid", "FAKE_API_KEY_VAR")
    with pytest.raises(TransportError, match="shape"):
        live.query("ping")


def test_record_wraps_live_params(tmp_path):
    recorder = RecordTransport(EchoTransport(PARAMS), str(tmp_path / "s.jsonl"))
    assert recorder.params == PARAMS
