"""Wire-protocol client for external image-model bridges.

A bridge is either a spawned subprocess speaking the protocol over
stdin/stdout or a TCP endpoint speaking it over a socket. Exactly one request
is in flight at a time; the client enforces that with a lock.

Endpoint strings: ``tcp:HOST:PORT`` selects TCP, anything else is parsed with
shlex as a command line to spawn.
"""

from __future__ import annotations

import itertools
import select
import shlex
import socket
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from ..genotype import Individual, canonical_key, render_prompts
from ..objectives import EvaluationBatch
from .errors import EvaluatorError, EvaluatorTimeout, EvaluatorUnavailable, ProtocolError
from .protocol import (
    PROTOCOL_VERSION,
    BridgeHello,
    EvaluationRequest,
    EvaluationResponse,
    decode_hello,
    decode_response,
    encode_request,
)

__all__ = ["BridgeEvaluator", "open_channel", "parse_endpoint", "LineChannel"]

_MAX_LINE_BYTES = 64 * 1024 * 1024


@dataclass(frozen=True)
class _Endpoint:
    kind: str  # "tcp" or "command"
    command: Optional[tuple[str, ...]] = None
    host: Optional[str] = None
    port: Optional[int] = None


def parse_endpoint(endpoint: str | Sequence[str]) -> _Endpoint:
    """Parse an endpoint spec into a command or TCP address."""
    if not isinstance(endpoint, str):
        command = tuple(endpoint)
        if not command:
            raise ValueError("empty bridge command")
        return _Endpoint(kind="command", command=command)
    if endpoint.startswith("tcp:"):
        rest = endpoint[len("tcp:"):]
        host, sep, port_text = rest.rpartition(":")
        if not sep or not host or not port_text.isdigit():
            raise ValueError(f"malformed tcp endpoint {endpoint!r}, expected tcp:HOST:PORT")
        return _Endpoint(kind="tcp", host=host, port=int(port_text))
    command = tuple(shlex.split(endpoint))
    if not command:
        raise ValueError("empty bridge command")
    return _Endpoint(kind="command", command=command)


class LineChannel:
    """Blocking line-oriented transport with a read deadline."""

    def __init__(self, timeout: float) -> None:
        self.timeout = timeout
        self._buffer = bytearray()

    # Subclasses implement _read_chunk/_write_bytes/close.

    def _read_chunk(self, deadline: float) -> bytes:
        raise NotImplementedError

    def _write_bytes(self, payload: bytes) -> None:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError

    def write_line(self, line: str) -> None:
        try:
            self._write_bytes(line.encode("utf-8") + b"\n")
        except (BrokenPipeError, ConnectionResetError, OSError) as exc:
            raise EvaluatorUnavailable(f"bridge connection lost while writing: {exc}") from exc

    def read_line(self) -> str:
        deadline = time.monotonic() + self.timeout
        while True:
            newline = self._buffer.find(b"\n")
            if newline >= 0:
                raw = bytes(self._buffer[:newline])
                del self._buffer[: newline + 1]
                return raw.decode("utf-8", errors="replace")
            if len(self._buffer) > _MAX_LINE_BYTES:
                raise ProtocolError("bridge sent an implausibly long line")
            chunk = self._read_chunk(deadline)
            if not chunk:
                raise EvaluatorUnavailable("bridge closed the connection")
            self._buffer.extend(chunk)


class _PipeChannel(LineChannel):
    """Channel over a subprocess's stdio pipes."""

    def __init__(self, process: subprocess.Popen, timeout: float) -> None:
        super().__init__(timeout)
        self.process = process

    def _read_chunk(self, deadline: float) -> bytes:
        stdout = self.process.stdout
        assert stdout is not None
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise EvaluatorTimeout(f"no bridge response within {self.timeout}s")
            ready, _, _ = select.select([stdout], [], [], min(remaining, 0.25))
            if ready:
                chunk = stdout.read1(65536)
                if chunk == b"" and self.process.poll() is not None:
                    return b""
                return chunk
            if self.process.poll() is not None:
                # Drain anything the process flushed right before exiting.
                chunk = stdout.read1(65536)
                return chunk or b""

    def _write_bytes(self, payload: bytes) -> None:
        stdin = self.process.stdin
        assert stdin is not None
        stdin.write(payload)
        stdin.flush()

    def close(self) -> None:
        proc = self.process
        try:
            if proc.stdin is not None:
                proc.stdin.close()  # signals graceful shutdown
        except OSError:
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait(timeout=5)
        finally:
            if proc.stdout is not None:
                proc.stdout.close()


class _SocketChannel(LineChannel):
    def __init__(self, sock: socket.socket, timeout: float) -> None:
        super().__init__(timeout)
        self.sock = sock

    def _read_chunk(self, deadline: float) -> bytes:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise EvaluatorTimeout(f"no bridge response within {self.timeout}s")
        self.sock.settimeout(remaining)
        try:
            return self.sock.recv(65536)
        except socket.timeout as exc:
            raise EvaluatorTimeout(f"no bridge response within {self.timeout}s") from exc
        except OSError as exc:
            raise EvaluatorUnavailable(f"bridge connection lost: {exc}") from exc

    def _write_bytes(self, payload: bytes) -> None:
        self.sock.sendall(payload)

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


def open_channel(
    endpoint: str | Sequence[str], timeout: float = 60.0
) -> tuple[LineChannel, BridgeHello]:
    """Connect to a bridge endpoint and complete the handshake."""
    spec = parse_endpoint(endpoint)
    if spec.kind == "tcp":
        assert spec.host is not None and spec.port is not None
        try:
            sock = socket.create_connection((spec.host, spec.port), timeout=timeout)
        except OSError as exc:
            raise EvaluatorUnavailable(f"cannot connect to {spec.host}:{spec.port}: {exc}") from exc
        channel: LineChannel = _SocketChannel(sock, timeout)
    else:
        assert spec.command is not None
        try:
            process = subprocess.Popen(
                spec.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,  # bridge logs go to our stderr untouched
            )
        except OSError as exc:
            raise EvaluatorUnavailable(f"cannot spawn bridge {spec.command!r}: {exc}") from exc
        channel = _PipeChannel(process, timeout)
    try:
        hello_line = channel.read_line()
        hello = decode_hello(hello_line)
    except EvaluatorError:
        channel.close()
        raise
    if hello.protocol != PROTOCOL_VERSION:
        channel.close()
        raise ProtocolError(
            f"bridge speaks protocol {hello.protocol}, this client requires {PROTOCOL_VERSION}"
        )
    return channel, hello


class BridgeEvaluator:
    """Evaluator that forwards work to an external bridge process or socket."""

    def __init__(self, channel: LineChannel, hello: BridgeHello) -> None:
        self._channel = channel
        self.hello = hello
        self._ids = itertools.count(1)
        self._lock = threading.Lock()
        self._closed = False

    @classmethod
    def connect(cls, endpoint: str | Sequence[str], timeout: float = 60.0) -> "BridgeEvaluator":
        channel, hello = open_channel(endpoint, timeout)
        return cls(channel, hello)

    @property
    def mode(self) -> str:
        return self.hello.mode

    def request(self, request: EvaluationRequest) -> EvaluationResponse:
        """Send one request and read its response (id-checked)."""
        with self._lock:
            if self._closed:
                raise EvaluatorUnavailable("bridge client is closed")
            self._channel.write_line(encode_request(request))
            line = self._channel.read_line()
        response = decode_response(line)
        if response.request_id != request.request_id:
            raise ProtocolError(
                f"response id {response.request_id!r} does not match request id {request.request_id}"
            )
        return response

    def evaluate(
        self, ind: Individual, base_prompt: str, images: int, seed: int
    ) -> EvaluationBatch:
        prompts = render_prompts(ind, base_prompt)
        request = EvaluationRequest(
            request_id=next(self._ids),
            positive_prompt=prompts.positive_prompt,
            negative_prompt=prompts.negative_prompt,
            guidance_scale=ind.guidance,
            inference_steps=ind.inference_steps,
            image_count=images,
            seed=seed,
        )
        response = self.request(request)
        if response.error is not None:
            raise EvaluatorError(f"bridge reported an error: {response.error}")
        records = response.records or ()
        if len(records) != images:
            raise ProtocolError(f"expected {images} records, bridge sent {len(records)}")
        return EvaluationBatch(individual_key=canonical_key(ind), records=records)

    def close(self) -> None:
        with self._lock:
            if not self._closed:
                self._closed = True
                self._channel.close()

    def __enter__(self) -> "BridgeEvaluator":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
