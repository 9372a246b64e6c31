"""Prompt construction and an OpenAI-compatible chat completions client.

Prompts are built from versioned text templates shipped with the package;
a directory of override templates can be supplied for experiments. The
client is deliberately small: greedy decoding by default, bounded retries
for transient failures, bounded concurrency for batches, and a custom
transport hook so tests never touch a network.
"""

from __future__ import annotations

import string
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import httpx

from .model import ExampleRecord, table_shape
from .schema import SchemaDocument

_TEMPLATE_VERSION = "v1"

# substrings that mark a rejected request as a context-window overflow
_OVERFLOW_MARKERS = (
    "context length",
    "context window",
    "maximum context",
    "too many tokens",
)


class GenerationError(Exception):
    """Base class for generation failures."""


class EndpointError(GenerationError):
    """The endpoint could not produce a usable response."""


class ContextOverflowError(GenerationError):
    """The prompt plus requested tokens exceeded the model context."""


@dataclass(frozen=True)
class GenerationConfig:
    """Endpoint and decoding settings for one run."""

    endpoint_url: str
    model_name: str
    temperature: float = 0.0
    max_new_tokens: int = 4096
    max_context_tokens: int = 6144
    request_timeout_s: float = 120.0
    max_concurrent_requests: int = 4
    retry_limit: int = 3
    retry_backoff_s: float = 0.5
    guided_field: str = "guided_json"
    api_key: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.endpoint_url:
            raise ValueError("GenerationConfig: endpoint_url must be non-empty")
        if not self.model_name:
            raise ValueError("GenerationConfig: model_name must be non-empty")
        if self.temperature < 0:
            raise ValueError("GenerationConfig: temperature must be >= 0")
        if self.max_new_tokens <= 0 or self.max_context_tokens <= 0:
            raise ValueError("GenerationConfig: token limits must be positive")
        if self.request_timeout_s <= 0:
            raise ValueError("GenerationConfig: request_timeout_s must be positive")
        if self.max_concurrent_requests < 1:
            raise ValueError("GenerationConfig: max_concurrent_requests must be >= 1")
        if self.retry_limit < 0 or self.retry_backoff_s < 0:
            raise ValueError("GenerationConfig: retry settings must be non-negative")
        if not self.guided_field:
            raise ValueError("GenerationConfig: guided_field must be non-empty")


@dataclass(frozen=True)
class Exemplar:
    """A worked example shown to the model before the real passage."""

    input_text: str
    serialized_tables: str


@dataclass(frozen=True)
class PromptBundle:
    """A fully rendered prompt, ready to send."""

    system_text: str
    user_text: str
    table_outline: str
    one_shot: Optional[Exemplar] = None


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0
    total_tokens: int = 0


@dataclass(frozen=True)
class GenerationResult:
    """Raw model output. The text is kept verbatim, untrimmed."""

    raw_text: str
    usage: TokenUsage
    latency_s: float


def _load_template(name: str, template_dir: Optional[Union[str, Path]]) -> str:
    filename = f"{name}_{_TEMPLATE_VERSION}.txt"
    if template_dir is not None:
        return (Path(template_dir) / filename).read_text(encoding="utf-8")
    return (
        resources.files("tabeval").joinpath("templates").joinpath(filename)
        .read_text(encoding="utf-8")
    )


def table_outline(record: ExampleRecord) -> str:
    """Describe the expected tables: ids, headers, and row/column counts.

    The row count and the fixed first-column values come from the gold
    layout, matching how the extraction task is posed.
    """
    parts: list[str] = []
    for schema, gold in record.gold_tables:
        rows, cols = table_shape(gold)
        lines = [
            f'Table "{schema.table_id}" has {cols} columns and {rows} rows.',
            "Column headers: " + ", ".join(schema.column_headers) + ".",
        ]
        if schema.row_header_values is not None:
            lines.append(
                "First column values, one per row, in order: "
                + ", ".join(schema.row_header_values)
                + "."
            )
        parts.append("\n".join(lines))
    return "\n\n".join(parts)


def build_freeform_prompt(
    record: ExampleRecord,
    exemplar: Optional[Exemplar] = None,
    template_dir: Optional[Union[str, Path]] = None,
) -> PromptBundle:
    """Render the markdown-table prompt for one example."""
    outline = table_outline(record)
    exemplar_block = ""
    if exemplar is not None:
        exemplar_block = (
            "Example passage:\n"
            f"{exemplar.input_text}\n\n"
            "Example tables:\n"
            f"{exemplar.serialized_tables}\n\n"
        )
    user_text = string.Template(_load_template("freeform", template_dir)).substitute(
        table_outline=outline,
        exemplar_block=exemplar_block,
        input_text=record.input_text,
    )
    return PromptBundle(
        system_text=_load_template("system", template_dir).strip(),
        user_text=user_text,
        table_outline=outline,
        one_shot=exemplar,
    )


def build_guided_prompt(
    record: ExampleRecord,
    template_dir: Optional[Union[str, Path]] = None,
) -> PromptBundle:
    """Render the JSON-output prompt for one example."""
    outline = table_outline(record)
    user_text = string.Template(_load_template("guided", template_dir)).substitute(
        table_outline=outline,
        input_text=record.input_text,
    )
    return PromptBundle(
        system_text=_load_template("system", template_dir).strip(),
        user_text=user_text,
        table_outline=outline,
    )


def _looks_like_overflow(body_text: str) -> bool:
    lowered = body_text.casefold()
    return any(marker in lowered for marker in _OVERFLOW_MARKERS)


class LLMClient:
    """A pooled client for an OpenAI-compatible chat completions endpoint.

    A custom httpx transport can be injected for tests. The client may be
    used as a context manager; ``generate_many`` fans out over a thread
    pool bounded by ``max_concurrent_requests``.
    """

    def __init__(
        self,
        config: GenerationConfig,
        transport: Optional[httpx.BaseTransport] = None,
    ) -> None:
        self.config = config
        headers = {}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"
        self._http = httpx.Client(
            timeout=config.request_timeout_s,
            headers=headers,
            transport=transport,
        )

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "LLMClient":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def _url(self) -> str:
        base = self.config.endpoint_url.rstrip("/")
        if base.endswith("/chat/completions"):
            return base
        return base + "/chat/completions"

    def _payload(self, bundle: PromptBundle, guided: Optional[SchemaDocument]) -> dict:
        payload: dict = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": bundle.user_text},
            ],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_new_tokens,
        }
        if guided is not None:
            payload[self.config.guided_field] = guided.as_json()
        return payload

    def generate(
        self,
        bundle: PromptBundle,
        guided: Optional[SchemaDocument] = None,
    ) -> GenerationResult:
        """Send one request, retrying transient failures with backoff.

        Raises ContextOverflowError when the endpoint rejects the request
        for exceeding the model context, EndpointError for anything else
        that survives the retries.
        """
        payload = self._payload(bundle, guided)
        attempts = self.config.retry_limit + 1
        last_detail = "no attempt made"
        started = time.perf_counter()
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.config.retry_backoff_s * (2 ** (attempt - 1)))
            try:
                response = self._http.post(self._url, json=payload)
            except httpx.HTTPError as exc:
                last_detail = f"transport error: {exc}"
                continue
            if response.status_code == 400 and _looks_like_overflow(response.text):
                raise ContextOverflowError(
                    f"endpoint rejected the request as over the model context: "
                    f"{response.text[:500]}"
                )
            if response.status_code in (408, 429) or response.status_code >= 500:
                last_detail = f"status {response.status_code}: {response.text[:200]}"
                continue
            if response.status_code != 200:
                raise EndpointError(
                    f"status {response.status_code}: {response.text[:500]}"
                )
            return self._parse_response(response, time.perf_counter() - started)
        raise EndpointError(
            f"request failed after {attempts} attempt(s); last failure: {last_detail}"
        )

    @staticmethod
    def _parse_response(response: httpx.Response, latency: float) -> GenerationResult:
        try:
            data = response.json()
            choice = data["choices"][0]
            content = choice["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise EndpointError(f"malformed completion response: {exc}") from exc
        usage = data.get("usage") or {}
        return GenerationResult(
            raw_text=content if isinstance(content, str) else "",
            usage=TokenUsage(
                prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
                completion_tokens=int(usage.get("completion_tokens", 0) or 0),
                total_tokens=int(usage.get("total_tokens", 0) or 0),
            ),
            latency_s=latency,
        )

    def generate_many(
        self,
        items: Sequence[tuple[PromptBundle, Optional[SchemaDocument]]],
    ) -> list[Union[GenerationResult, GenerationError]]:
        """Generate for a batch, preserving order.

        Failures are returned in place rather than raised, so one bad
        example never hides the rest of the batch.
        """
        if not items:
            return []
        results: list[Union[GenerationResult, GenerationError]] = [
            EndpointError("not attempted")
        ] * len(items)

        def work(index: int) -> None:
            bundle, guided = items[index]
            try:
                results[index] = self.generate(bundle, guided)
            except GenerationError as exc:
                results[index] = exc

        workers = min(self.config.max_concurrent_requests, len(items))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(len(items))))
        return results


def generate(
    bundle: PromptBundle,
    config: GenerationConfig,
    guided: Optional[SchemaDocument] = None,
    transport: Optional[httpx.BaseTransport] = None,
) -> GenerationResult:
    """One-shot convenience wrapper around ``LLMClient.generate``."""
    with LLMClient(config, transport=transport) as client:
        return client.generate(bundle, guided)
