"""Remote usefulness classification through a chat-completion endpoint.

The wire shape is the minimal chat protocol: POST a JSON body with a
``messages`` array of ``{role, content}`` and read the first choice's
message text back. Any conforming server works, including the bundled
:class:`StubLlmServer` used by the tests.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional, Sequence

import requests

from .corpus import ClarificationRecord, UsefulnessLabel
from .errors import LlmAuthError, LlmHttpError, LlmTimeoutError, UnparseableLabelError
from .features import FeatureVector

SYSTEM_PROMPT = (
    "In a mixed-initiative conversational search system, a user's query might be "
    "ambiguous, and the system can ask a clarifying question to clarify the user's "
    "information need. In a real system, user satisfaction with the clarifying "
    "question is a very important task that should be considered. The prediction is "
    "a classification with three classes including: (1) Good, (2) Fair, and (3) Bad. "
    "In summary, this indicates that a Good clarifying question should accurately "
    "address and clarify different intents of the query. It should be fluent and "
    "grammatically correct. If a question fails in satisfying any of these factors "
    "but still is an acceptable clarifying question, it should be given a Fair "
    "label. Otherwise, a Bad label should be assigned to the question."
)

USER_TEMPLATE = (
    "Given the details about the satisfaction of a clarifying question, predict "
    "only the label for the following query, clarifying question, and the options "
    "for the clarification response: Query: `{}', clarifying question: `{}'."
)

_LABEL_RE = re.compile(r"\b(good|fair|bad)\b", re.IGNORECASE)


@dataclass(frozen=True)
class PromptPair:
    system: str
    user: str


def build_prompt(
    record: ClarificationRecord,
    enrich: bool = False,
    features: Optional[FeatureVector] = None,
) -> PromptPair:
    """Fill the two user-template slots with query and question verbatim.

    With ``enrich``, a trailing sentence serializes the four enrichment
    values (4 decimals) and the option list; the base template itself is
    never altered.
    """
    head, _, rest = USER_TEMPLATE.partition("{}")
    mid, _, tail = rest.partition("{}")
    user = head + record.query + mid + record.question + tail
    if enrich:
        if features is None:
            raise ValueError("enrich=True requires the record's FeatureVector")
        options = "; ".join(record.options) if record.options else "none"
        user += (
            " Additional features: "
            f"question_length={float(features.question_len_words):.4f}, "
            f"rouge_precision={features.rouge_precision:.4f}, "
            f"sentiment={features.polarity:.4f}, "
            f"subjectivity={features.subjectivity:.4f}, "
            f"options: {options}"
        )
    return PromptPair(system=SYSTEM_PROMPT, user=user)


def parse_label(response_text: str) -> UsefulnessLabel:
    """First whole-word good/fair/bad in the reply, case-insensitive."""
    m = _LABEL_RE.search(response_text)
    if m is None:
        raise UnparseableLabelError(f"no label word in reply: {response_text!r}")
    return UsefulnessLabel.from_text(m.group(1))


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    api_key: str = ""
    model_name: str = "gpt-4"
    timeout: float = 30.0
    max_retries: int = 3
    backoff_base: float = 0.5

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @classmethod
    def from_env(cls, **overrides) -> "EndpointConfig":
        endpoint = overrides.pop("base_url", None) or os.environ.get("CQJ_LLM_ENDPOINT")
        if not endpoint:
            raise ValueError("CQJ_LLM_ENDPOINT is not set and no base_url given")
        values = {
            "api_key": os.environ.get("CQJ_LLM_API_KEY", ""),
            "model_name": os.environ.get("CQJ_LLM_MODEL", "gpt-4"),
        }
        values.update(overrides)
        return cls(base_url=endpoint, **values)


def _post_once(prompt: PromptPair, config: EndpointConfig) -> requests.Response:
    headers = {"Content-Type": "application/json"}
    if config.api_key:
        headers["Authorization"] = f"Bearer {config.api_key}"
    body = {
        "model": config.model_name,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": prompt.user},
        ],
    }
    return requests.post(config.base_url, json=body, headers=headers, timeout=config.timeout)


def _extract_text(response: requests.Response) -> str:
    try:
        return response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise LlmHttpError(response.status_code, f"malformed response body: {exc}") from exc


def classify_remote(
    record: ClarificationRecord,
    enrich: bool,
    features: Optional[FeatureVector],
    config: EndpointConfig,
) -> tuple[UsefulnessLabel, str]:
    """One remote classification; returns the parsed label and raw reply.

    Retries 5xx, connection failures, and timeouts with exponential
    backoff; 401/403 fail immediately as auth errors, other 4xx as HTTP
    errors. The raw reply is preserved even when unparseable (it rides on
    the exception message).
    """
    prompt = build_prompt(record, enrich=enrich, features=features)
    last_status = 0
    for attempt in range(config.max_retries + 1):
        if attempt:
            time.sleep(config.backoff_base * (2 ** (attempt - 1)))
        try:
            response = _post_once(prompt, config)
        except requests.Timeout:
            last_status = -1
            continue
        except requests.ConnectionError:
            last_status = 0
            continue
        if response.status_code in (401, 403):
            raise LlmAuthError(f"endpoint rejected credentials (HTTP {response.status_code})")
        if 500 <= response.status_code < 600:
            last_status = response.status_code
            continue
        if response.status_code != 200:
            raise LlmHttpError(response.status_code, response.text[:200])
        text = _extract_text(response)
        return parse_label(text), text
    if last_status == -1:
        raise LlmTimeoutError(f"no reply after {config.max_retries + 1} attempts")
    raise LlmHttpError(last_status, f"retries exhausted after {config.max_retries + 1} attempts")


def classify_batch(
    records: Sequence[ClarificationRecord],
    enrich: bool,
    features: Optional[Sequence[FeatureVector]],
    config: EndpointConfig,
    max_in_flight: int = 4,
) -> list[dict]:
    """Classify many records, at most ``max_in_flight`` requests at once.

    Returns one dict per record, in input order:
    ``{id, label or None, raw or None, error or None}``.
    """
    if enrich and features is None:
        raise ValueError("enrich=True requires feature vectors")

    def one(index: int) -> dict:
        record = records[index]
        feats = features[index] if features is not None else None
        try:
            label, raw = classify_remote(record, enrich, feats, config)
            return {"id": record.id, "label": label.text, "raw": raw, "error": None}
        except UnparseableLabelError as exc:
            return {"id": record.id, "label": None, "raw": str(exc), "error": "unparseable"}

    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        return list(pool.map(one, range(len(records))))


class _StubHandler(BaseHTTPRequestHandler):
    def do_POST(self) -> None:  # noqa: N802 (fixed by http.server)
        length = int(self.headers.get("Content-Length", "0"))
        payload = json.loads(self.rfile.read(length) or b"{}")
        with self.server.lock:  # type: ignore[attr-defined]
            self.server.request_count += 1  # type: ignore[attr-defined]
            self.server.requests.append(payload)  # type: ignore[attr-defined]
        status, content = self.server.responder(payload)  # type: ignore[attr-defined]
        if isinstance(content, str):
            content = {"choices": [{"message": {"content": content}}]}
        body = json.dumps(content).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args) -> None:  # silence test output
        pass


class StubLlmServer:
    """In-process chat-completion endpoint for tests and offline demos.

    ``responder`` maps the parsed request payload to ``(status, content)``
    where a string content is wrapped into the standard choices envelope.
    Use as a context manager; ``base_url`` points at the live port.
    """

    def __init__(self, responder: Callable[[dict], tuple[int, object]] | None = None):
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self._server.responder = responder or (lambda payload: (200, "Good"))
        self._server.request_count = 0
        self._server.requests = []
        self._server.lock = threading.Lock()
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    @property
    def request_count(self) -> int:
        return self._server.request_count

    @property
    def requests(self) -> list[dict]:
        return list(self._server.requests)

    def __enter__(self) -> "StubLlmServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)
