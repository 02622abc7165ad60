"""Small JSON-over-HTTP query service: POST /query, GET /health."""

from __future__ import annotations

import json
import logging
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import __version__
from .errors import DataError, FuseragError, TransportError
from .pipeline import Pipeline

log = logging.getLogger(__name__)

MAX_BODY_BYTES = 64 * 1024


class QueryService:
    """Holds the (possibly not yet loaded) pipeline shared by request threads."""

    def __init__(self, pipeline: Pipeline | None = None):
        self._pipeline = pipeline
        self._ready = threading.Event()
        if pipeline is not None:
            self._ready.set()

    def attach(self, pipeline: Pipeline) -> None:
        self._pipeline = pipeline
        self._ready.set()

    @property
    def pipeline(self) -> Pipeline | None:
        return self._pipeline if self._ready.is_set() else None

    def health(self) -> tuple[int, dict]:
        p = self.pipeline
        if p is None:
            return HTTPStatus.SERVICE_UNAVAILABLE, {"status": "loading", "version": __version__}
        return HTTPStatus.OK, {
            "status": "ok",
            "version": __version__,
            "generator": p.adapter.generator_id,
            "fingerprints": p.fingerprints(),
            "index_entries": len(p.index),
            "graph_entities": len(p.graph.entities),
            "graph_edges": len(p.graph.relations),
        }

    def query(self, body: bytes) -> tuple[int, dict]:
        p = self.pipeline
        if p is None:
            return HTTPStatus.SERVICE_UNAVAILABLE, {"error": "artifacts not loaded"}
        try:
            payload = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, ValueError):
            return HTTPStatus.BAD_REQUEST, {"error": "body must be a JSON object"}
        if not isinstance(payload, dict) or not isinstance(payload.get("question"), str):
            return HTTPStatus.BAD_REQUEST, {"error": 'body must be {"question": string}'}
        question = payload["question"]
        if not question.strip():
            return HTTPStatus.BAD_REQUEST, {"error": "empty question"}
        try:
            result = p.run(question)
        except TransportError as exc:
            return HTTPStatus.BAD_GATEWAY, {"error": str(exc)}
        except DataError as exc:
            return HTTPStatus.BAD_REQUEST, {"error": str(exc)}
        except FuseragError as exc:
            return HTTPStatus.INTERNAL_SERVER_ERROR, {"error": str(exc)}
        return HTTPStatus.OK, result.to_dict()


class _Handler(BaseHTTPRequestHandler):
    service: QueryService  # set on the per-server subclass
    protocol_version = "HTTP/1.1"

    def _send(self, status: int, body: dict, close: bool = False) -> None:
        data = json.dumps(body, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        if close:
            # the unread body would otherwise be parsed as the next request
            self.send_header("Connection", "close")
            self.close_connection = True
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        if self.path == "/health":
            self._send(*self.service.health())
        else:
            self._send(HTTPStatus.NOT_FOUND, {"error": "not found"})

    def do_POST(self):
        if self.path != "/query":
            self._send(HTTPStatus.NOT_FOUND, {"error": "not found"}, close=True)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = -1
        if length < 0 or length > MAX_BODY_BYTES:
            self._send(HTTPStatus.BAD_REQUEST, {"error": "missing or oversized body"}, close=True)
            return
        self._send(*self.service.query(self.rfile.read(length)))

    def log_message(self, fmt, *args):
        log.info("%s %s", self.address_string(), fmt % args)


def make_server(service: QueryService, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server
