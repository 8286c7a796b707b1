"""Client for OpenAlex-compatible works endpoints.

Fetches publication metadata for an institution query and a year range,
reconstructs abstracts from the API's inverted-index representation, and
returns a validated, deterministically ordered corpus.
"""
from __future__ import annotations

import logging
import os
import time

import requests

from .errors import TransportError
from .ingest import Corpus, Publication, build_corpus

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.openalex.org"
PER_PAGE = 200  # OpenAlex caps page size at 200
RETRYABLE_STATUSES = {429, 500, 502, 503, 504}

API_KEY_ENV = "OPENALEX_API_KEY"
MAILTO_ENV = "OPENALEX_MAILTO"


def reconstruct_abstract(inverted_index: dict | None) -> str:
    """Join tokens of an inverted index in position order.

    The result depends only on positions, never on key order.
    """
    if not inverted_index:
        return ""
    positioned = []
    for token, positions in inverted_index.items():
        for pos in positions:
            positioned.append((pos, token))
    positioned.sort()
    return " ".join(token for _, token in positioned)


def _short_id(value: str) -> str:
    # OpenAlex ids come as full URLs; keep the trailing entity id
    return value.rstrip("/").rsplit("/", 1)[-1]


def _parse_work(work: dict) -> Publication:
    pub_id = work.get("id")
    year = work.get("publication_year")
    title = work.get("title") or work.get("display_name")
    if not pub_id or not isinstance(year, int) or not title:
        raise ValueError("work record missing id, title, or publication_year")
    author_ids = []
    for authorship in work.get("authorships", []):
        author = (authorship or {}).get("author") or {}
        if author.get("id"):
            author_ids.append(_short_id(author["id"]))
    if not author_ids:
        raise ValueError("work record has no resolvable author ids")
    return Publication(
        pub_id=_short_id(pub_id),
        title=title,
        abstract=reconstruct_abstract(work.get("abstract_inverted_index")),
        year=year,
        author_ids=frozenset(author_ids),
    )


def _request_page(
    session: requests.Session,
    url: str,
    params: dict,
    max_retries: int,
    backoff_base: float,
) -> dict:
    last_status = None
    last_error: Exception | None = None
    for attempt in range(max_retries + 1):
        if attempt:
            time.sleep(backoff_base * 2 ** (attempt - 1))
        try:
            response = session.get(url, params=params, timeout=30)
        except requests.RequestException as exc:
            last_error = exc
            logger.warning("request failed (%s), attempt %d", exc, attempt + 1)
            continue
        last_status = response.status_code
        if response.status_code == 200:
            return response.json()
        if response.status_code not in RETRYABLE_STATUSES:
            break
        logger.warning("HTTP %d from %s, attempt %d", response.status_code, url, attempt + 1)
    detail = f"HTTP {last_status}" if last_status is not None else f"{last_error}"
    raise TransportError(f"request to {url} failed after retries: {detail}", status=last_status)


def fetch_openalex(
    institution_query: str,
    year_range: tuple[int, int],
    endpoint: str = DEFAULT_ENDPOINT,
    *,
    max_retries: int = 3,
    backoff_base: float = 1.0,
    session: requests.Session | None = None,
) -> Corpus:
    """Fetch all works matching an institution query within a year range.

    Pages with the cursor API until exhaustion. Malformed records are skipped
    with a warning and counted in the corpus provenance; transport failures
    surface as :class:`TransportError` after bounded retries with doubling
    backoff.
    """
    lo, hi = year_range
    if lo > hi:
        raise ValueError(f"year_range lower bound {lo} exceeds upper bound {hi}")
    own_session = session is None
    session = session or requests.Session()
    params = {
        "filter": (
            f"institutions.display_name.search:{institution_query},"
            f"from_publication_date:{lo}-01-01,to_publication_date:{hi}-12-31"
        ),
        "per-page": PER_PAGE,
        "cursor": "*",
    }
    mailto = os.environ.get(MAILTO_ENV)
    if mailto:
        params["mailto"] = mailto
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        params["api_key"] = api_key

    url = endpoint.rstrip("/") + "/works"
    publications: list[Publication] = []
    skipped = 0
    pages = 0
    try:
        while True:
            payload = _request_page(session, url, params, max_retries, backoff_base)
            pages += 1
            results = payload.get("results", [])
            for work in results:
                try:
                    publications.append(_parse_work(work))
                except (ValueError, TypeError) as exc:
                    skipped += 1
                    logger.warning("skipping malformed work record: %s", exc)
            cursor = (payload.get("meta") or {}).get("next_cursor")
            if not results or not cursor:
                break
            params["cursor"] = cursor
    finally:
        if own_session:
            session.close()

    # Cursor pagination can repeat a work when the index shifts mid-walk;
    # keep the first copy seen.
    unique: dict[str, Publication] = {}
    for pub in publications:
        if pub.pub_id in unique:
            logger.warning("dropping duplicate work %s", pub.pub_id)
            continue
        unique[pub.pub_id] = pub

    provenance = {
        "source": url,
        "institution_query": institution_query,
        "year_range": [lo, hi],
        "pages": pages,
        "skipped_records": skipped,
    }
    return build_corpus(list(unique.values()), provenance=provenance)
