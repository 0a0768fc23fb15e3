"""Clients for the Wikidata and Wikipedia web APIs, plus an offline
fixture mode for tests and air-gapped runs.

Live mode talks to the public api.php endpoints (overridable through the
DESCRANK_WIKIDATA_API / DESCRANK_WIKIPEDIA_API environment variables or
constructor arguments), throttled to a global requests-per-second budget,
with bounded retries and exponential backoff on 429/5xx/timeouts and at
most `max_in_flight` concurrent requests.

Fixture mode reads entities.jsonl and intros.jsonl from a directory and
answers every call from memory; no network I/O ever happens.
"""

import os
import re
import threading
import time
from dataclasses import dataclass
from typing import Optional

import requests

from . import jsonl
from .errors import (
    DataError,
    MalformedResponseError,
    NotFoundError,
    TransportError,
)

WIKIDATA_API = "https://www.wikidata.org/w/api.php"
WIKIPEDIA_API = "https://en.wikipedia.org/w/api.php"

ENV_WIKIDATA_API = "DESCRANK_WIKIDATA_API"
ENV_WIKIPEDIA_API = "DESCRANK_WIKIPEDIA_API"

USER_AGENT = "descrank/0.1 (corpus builder)"

QID_RE = re.compile(r"^Q[1-9][0-9]*$")

_LABEL_BATCH = 50


@dataclass(frozen=True)
class EntityRecord:
    """A Wikidata item: English label/description, instance-of topic labels
    in claim order, and the English Wikipedia sitelink title if any."""

    qid: str
    label: str
    description: str
    instances: tuple[str, ...]
    sitelink_title: Optional[str]


@dataclass(frozen=True)
class ArticleIntro:
    """Lead paragraph of a Wikipedia article. When is_redirect is true the
    paragraph belongs to the redirect target, not the requested title."""

    title: str
    first_paragraph: str
    is_redirect: bool


class _RateLimiter:
    """Global minimum spacing between request starts."""

    def __init__(self, per_second: float, clock=time.monotonic, sleep=time.sleep):
        self._interval = 1.0 / per_second if per_second > 0 else 0.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if self._interval == 0.0:
            return
        with self._lock:
            now = self._clock()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if delay > 0:
            self._sleep(delay)


class WikiClient:
    """Fetch Wikidata entities and Wikipedia article intros.

    Pass fixture_dir to run offline against entities.jsonl / intros.jsonl;
    every other argument tunes the live HTTP behaviour.
    """

    def __init__(
        self,
        fixture_dir: Optional[str] = None,
        *,
        wikidata_api: Optional[str] = None,
        wikipedia_api: Optional[str] = None,
        rate_limit: float = 10.0,
        max_retries: int = 3,
        max_in_flight: int = 8,
        timeout: float = 30.0,
        backoff_base: float = 0.5,
        session=None,
        sleep=time.sleep,
    ):
        if max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {max_retries}")
        if max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
        self.max_retries = max_retries
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self.backoff_base = backoff_base
        self.wikidata_api = (
            wikidata_api or os.environ.get(ENV_WIKIDATA_API) or WIKIDATA_API
        )
        self.wikipedia_api = (
            wikipedia_api or os.environ.get(ENV_WIKIPEDIA_API) or WIKIPEDIA_API
        )
        self._sleep = sleep
        self._limiter = _RateLimiter(rate_limit, sleep=sleep)
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._entities: Optional[dict[str, EntityRecord]] = None
        self._intros: Optional[dict[str, ArticleIntro]] = None
        self._session = None
        self._owns_session = False
        if fixture_dir is not None:
            self._load_fixtures(fixture_dir)
        else:
            self._session = session or requests.Session()
            self._owns_session = session is None
            self._session.headers.setdefault("User-Agent", USER_AGENT)

    # -- fixture plumbing ---------------------------------------------------

    def _load_fixtures(self, fixture_dir: str) -> None:
        entities_path = os.path.join(fixture_dir, "entities.jsonl")
        intros_path = os.path.join(fixture_dir, "intros.jsonl")
        entities: dict[str, EntityRecord] = {}
        for lineno, rec in jsonl.read_records(entities_path):
            try:
                qid = rec["qid"]
                record = EntityRecord(
                    qid=qid,
                    label=rec.get("label", ""),
                    description=rec.get("description", ""),
                    instances=tuple(rec.get("instances", [])),
                    sitelink_title=rec.get("sitelink_title"),
                )
            except (KeyError, TypeError) as exc:
                raise DataError(f"{entities_path}:{lineno}: bad entity record: {exc}")
            if not QID_RE.match(qid):
                raise DataError(f"{entities_path}:{lineno}: bad qid {qid!r}")
            entities[qid] = record
        intros: dict[str, ArticleIntro] = {}
        for lineno, rec in jsonl.read_records(intros_path):
            try:
                intro = ArticleIntro(
                    title=rec["title"],
                    first_paragraph=rec.get("first_paragraph", ""),
                    is_redirect=bool(rec.get("is_redirect", False)),
                )
            except (KeyError, TypeError) as exc:
                raise DataError(f"{intros_path}:{lineno}: bad intro record: {exc}")
            intros[intro.title] = intro
        self._entities = entities
        self._intros = intros

    @property
    def fixture_mode(self) -> bool:
        return self._entities is not None

    @property
    def fixture_qids(self) -> Optional[list[str]]:
        """All entity ids available offline; None in live mode."""
        if self._entities is None:
            return None
        return sorted(self._entities)

    def close(self) -> None:
        if self._session is not None and self._owns_session:
            self._session.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    # -- transport ----------------------------------------------------------

    def _request(self, url: str, params: dict) -> dict:
        """One GET with rate limiting, concurrency capping, and bounded
        retries with exponential backoff on 429/5xx and network failures."""
        last_failure = None
        with self._gate:
            for attempt in range(self.max_retries):
                if attempt > 0:
                    self._sleep(self.backoff_base * 2 ** (attempt - 1))
                self._limiter.wait()
                try:
                    response = self._session.get(url, params=params, timeout=self.timeout)
                except requests.RequestException as exc:
                    last_failure = f"{type(exc).__name__}: {exc}"
                    continue
                status = response.status_code
                if status == 429 or status >= 500:
                    last_failure = f"HTTP {status}"
                    continue
                if status != 200:
                    raise TransportError(f"{url}: HTTP {status}")
                try:
                    payload = response.json()
                except ValueError as exc:
                    raise MalformedResponseError(
                        f"{url}: response is not JSON: {exc}"
                    ) from exc
                if not isinstance(payload, dict):
                    raise MalformedResponseError(f"{url}: expected a JSON object")
                return payload
        raise TransportError(
            f"{url}: giving up after {self.max_retries} attempts ({last_failure})"
        )

    # -- Wikidata -----------------------------------------------------------

    def fetch_entity(self, qid: str) -> EntityRecord:
        """Fetch one entity; instance-of values are resolved to their
        English labels (falling back to the raw id when unlabeled)."""
        if not QID_RE.match(qid or ""):
            raise NotFoundError(f"invalid entity id {qid!r}")
        if self._entities is not None:
            record = self._entities.get(qid)
            if record is None:
                raise NotFoundError(f"entity {qid} not in fixture")
            return record
        payload = self._request(
            self.wikidata_api,
            {
                "action": "wbgetentities",
                "ids": qid,
                "props": "labels|descriptions|claims|sitelinks",
                "languages": "en",
                "sitefilter": "enwiki",
                "format": "json",
            },
        )
        try:
            entity = payload["entities"][qid]
        except (KeyError, TypeError):
            raise MalformedResponseError(
                f"wbgetentities response lacks entity {qid}"
            ) from None
        if "missing" in entity:
            raise NotFoundError(f"entity {qid} does not exist")
        try:
            label = entity.get("labels", {}).get("en", {}).get("value", "")
            description = entity.get("descriptions", {}).get("en", {}).get("value", "")
            sitelink = entity.get("sitelinks", {}).get("enwiki", {}).get("title")
            claims = entity.get("claims", {}).get("P31", [])
            targets = []
            for claim in claims:
                value = claim.get("mainsnak", {}).get("datavalue", {}).get("value")
                if isinstance(value, dict) and "id" in value:
                    targets.append(value["id"])
        except (AttributeError, TypeError) as exc:
            raise MalformedResponseError(f"cannot parse entity {qid}: {exc}") from exc
        labels = self._resolve_labels(targets)
        return EntityRecord(
            qid=qid,
            label=label,
            description=description,
            instances=tuple(labels[t] for t in targets),
            sitelink_title=sitelink,
        )

    def _resolve_labels(self, qids: list[str]) -> dict[str, str]:
        """English labels for a list of item ids, one batched call per 50."""
        labels: dict[str, str] = {}
        unique = list(dict.fromkeys(qids))
        for start in range(0, len(unique), _LABEL_BATCH):
            chunk = unique[start : start + _LABEL_BATCH]
            payload = self._request(
                self.wikidata_api,
                {
                    "action": "wbgetentities",
                    "ids": "|".join(chunk),
                    "props": "labels",
                    "languages": "en",
                    "format": "json",
                },
            )
            entities = payload.get("entities", {})
            for target in chunk:
                entry = entities.get(target, {})
                labels[target] = (
                    entry.get("labels", {}).get("en", {}).get("value", target)
                )
        return labels

    # -- Wikipedia ----------------------------------------------------------

    def fetch_article_intro(self, title: str) -> ArticleIntro:
        """Fetch the lead paragraph of an article, following redirects and
        flagging them."""
        if not title or not title.strip():
            raise NotFoundError("empty article title")
        if self._intros is not None:
            intro = self._intros.get(title)
            if intro is None:
                raise NotFoundError(f"article {title!r} not in fixture")
            return intro
        payload = self._request(
            self.wikipedia_api,
            {
                "action": "query",
                "prop": "extracts",
                "exintro": 1,
                "explaintext": 1,
                "redirects": 1,
                "titles": title,
                "format": "json",
                "formatversion": 2,
            },
        )
        try:
            query = payload["query"]
            pages = query["pages"]
            page = pages[0]
        except (KeyError, TypeError, IndexError):
            raise MalformedResponseError(
                f"query response for {title!r} lacks pages"
            ) from None
        if page.get("missing") or page.get("invalid"):
            raise NotFoundError(f"article {title!r} does not exist")
        extract = page.get("extract", "")
        if not isinstance(extract, str):
            raise MalformedResponseError(f"extract for {title!r} is not text")
        first_paragraph = ""
        for chunk in extract.split("\n"):
            if chunk.strip():
                first_paragraph = chunk.strip()
                break
        return ArticleIntro(
            title=page.get("title", title),
            first_paragraph=first_paragraph,
            is_redirect=bool(query.get("redirects")),
        )
