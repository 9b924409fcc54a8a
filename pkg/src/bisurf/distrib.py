"""Coordinator/worker scanning over TCP: newline-delimited JSON messages,
lexicographic shard assignment, timeout-based reassignment, idempotent shard
completion, and a coordinator-owned checkpoint file.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
import time
from dataclasses import dataclass

from .search import (REGISTRY_VERSION, SearchHit, SearchSpace, Shard,
                     checkpoint_save, make_shards, scan)


class ShardTimeout(RuntimeError):
    pass


@dataclass
class _ShardState:
    shard: Shard
    assigned_at: float | None = None
    completed: bool = False


class Coordinator:
    """Single writer of the checkpoint; hands out shards, collects hits,
    reassigns shards whose workers went quiet."""

    def __init__(self, space: SearchSpace, nshards: int, host: str = "127.0.0.1",
                 port: int = 0, shard_timeout: float = 30.0,
                 checkpoint: str | None = None):
        self.space = space
        self.shard_timeout = shard_timeout
        self.checkpoint = checkpoint
        self._states = {s.id: _ShardState(s) for s in make_shards(space, nshards)}
        self._hits: dict[int, list[SearchHit]] = {}
        self._lock = threading.Lock()
        self._all_done = threading.Event()
        if not self._states:
            self._all_done.set()
        coordinator = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                for line in self.rfile:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        msg = json.loads(line)
                    except json.JSONDecodeError:
                        break
                    reply = coordinator._handle(msg)
                    self.wfile.write((json.dumps(reply, sort_keys=True) + "\n").encode())
                    self.wfile.flush()

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self.address = self._server.server_address
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    # -- protocol ------------------------------------------------------------

    def _handle(self, msg: dict) -> dict:
        mtype = msg.get("type")
        if mtype == "shard_request":
            if (msg.get("version") != REGISTRY_VERSION
                    or msg.get("space_hash") != self.space.space_hash()):
                return {"type": "error", "error": "VersionMismatch"}
            shard = self._next_shard()
            if shard is None:
                return {"type": "done"}
            return {"type": "shard", "id": shard.id, "p": self.space.p,
                    "lo": list(shard.lo), "hi": list(shard.hi)}
        if mtype == "hits":
            self._complete(msg["id"], msg.get("hits", []))
            return {"type": "ack"}
        return {"type": "error", "error": f"unknown message {mtype!r}"}

    def _next_shard(self) -> Shard | None:
        now = time.monotonic()
        with self._lock:
            for st in self._states.values():
                if st.completed:
                    continue
                if st.assigned_at is None:
                    st.assigned_at = now
                    return st.shard
            # reclaim timed-out assignments
            for st in self._states.values():
                if (not st.completed and st.assigned_at is not None
                        and now - st.assigned_at > self.shard_timeout):
                    st.assigned_at = now
                    return st.shard
        return None

    def _complete(self, shard_id: int, hits_json: list) -> None:
        with self._lock:
            st = self._states.get(shard_id)
            if st is None or st.completed:
                return  # idempotent: duplicate submissions are ignored
            st.completed = True
            self._hits[shard_id] = [
                SearchHit(tuple(h["params"]), h.get("diagnostics", {}),
                          h.get("shard", shard_id))
                for h in hits_json]
            if self.checkpoint:
                done = [i for i, s in self._states.items() if s.completed]
                allhits = [h for hs in self._hits.values() for h in hs]
                checkpoint_save(self.checkpoint, self.space, done, allhits)
            if all(s.completed for s in self._states.values()):
                self._all_done.set()

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "Coordinator":
        self._thread.start()
        return self

    def wait(self, timeout: float | None = None) -> bool:
        return self._all_done.wait(timeout)

    def result(self, timeout: float | None = None) -> list[SearchHit]:
        if not self.wait(timeout):
            pending = [i for i, s in self._states.items() if not s.completed]
            raise ShardTimeout(f"shards {pending} incomplete")
        hits = [h for hs in self._hits.values() for h in hs]
        hits.sort(key=lambda h: h.params)
        return hits

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()


class _Conn:
    def __init__(self, host: str, port: int):
        self.sock = socket.create_connection((host, port), timeout=60)
        self.rfile = self.sock.makefile("r")

    def rpc(self, msg: dict) -> dict:
        self.sock.sendall((json.dumps(msg, sort_keys=True) + "\n").encode())
        line = self.rfile.readline()
        if not line:
            raise ConnectionError("coordinator closed the connection")
        return json.loads(line)

    def close(self):
        try:
            self.rfile.close()
            self.sock.close()
        except OSError:
            pass


def work(space: SearchSpace, host: str, port: int,
         die_after_assignments: int | None = None) -> int:
    """Worker loop: request shards, scan, submit hits; returns the number of
    shards completed.  ``die_after_assignments`` aborts the process abruptly
    after that many assignments (used to exercise reassignment)."""
    conn = _Conn(host, port)
    done = 0
    assignments = 0
    try:
        while True:
            reply = conn.rpc({"type": "shard_request",
                              "version": REGISTRY_VERSION,
                              "space_hash": space.space_hash()})
            if reply.get("type") == "done":
                return done
            if reply.get("type") == "error":
                if reply.get("error") == "VersionMismatch":
                    raise VersionMismatchError()
                raise RuntimeError(reply.get("error"))
            assignments += 1
            if die_after_assignments is not None and assignments >= die_after_assignments:
                return done  # abandon the shard without submitting
            shard = Shard(reply["id"], tuple(reply["lo"]), tuple(reply["hi"]))
            hits = scan(space, shard)
            conn.rpc({"type": "hits", "id": shard.id,
                      "hits": [h.as_json() for h in hits]})
            done += 1
    finally:
        conn.close()


class VersionMismatchError(RuntimeError):
    def __init__(self):
        super().__init__("predicate registry or space hash mismatch")
