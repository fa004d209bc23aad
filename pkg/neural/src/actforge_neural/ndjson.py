"""Newline-delimited JSON serving over stdio or TCP.

One request per line, one response line per request; malformed lines are
answered with an error object instead of crashing the server. TCP accepts
multiple connections, each handled on its own thread with responses kept
in request order per connection.
"""

from __future__ import annotations

import json
import socketserver
import sys
import threading


def error_line(request_id, message: str) -> str:
    return json.dumps({"id": request_id, "error": message}, ensure_ascii=False)


def _respond(handler, line: str) -> str:
    line = line.strip()
    if not line:
        return ""
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        return error_line(-1, f"malformed request line: {exc}")
    try:
        return json.dumps(handler(request), ensure_ascii=False)
    except Exception as exc:  # answer, never crash the serving loop
        return error_line(request.get("id", -1), str(exc))


def serve_stdio(handler) -> None:
    for line in sys.stdin:
        response = _respond(handler, line)
        if response:
            sys.stdout.write(response + "\n")
            sys.stdout.flush()


def serve_tcp(handler, host: str, port: int, ready_event: threading.Event | None = None):
    lock = threading.Lock()

    class LineHandler(socketserver.StreamRequestHandler):
        def handle(self):
            for raw in self.rfile:
                with lock:  # the model handles one request at a time
                    response = _respond(handler, raw.decode("utf-8"))
                if response:
                    self.wfile.write((response + "\n").encode("utf-8"))
                    self.wfile.flush()

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    server = Server((host, port), LineHandler)
    if ready_event is not None:
        ready_event.set()
    server.serve_forever()
    return server
