"""Objectives computed by an external program.

The child process reads one phenotype per line on standard input, values
separated by whitespace, and answers each line with one fitness value on
standard output. It stays alive for the whole run.
"""

from __future__ import annotations

import subprocess
import threading

import numpy as np

from .core import EvoSchemeError


class ExternalProcessError(EvoSchemeError):
    pass


class ExternalProcess:
    """Batch-callable wrapper around a line-protocol child process."""

    def __init__(self, command, cwd=None):
        self.command = list(command)
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                          text=True, bufsize=1, cwd=cwd)
        except OSError as exc:
            raise ExternalProcessError(f"cannot start {self.command!r}: {exc}") from exc

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        payload = "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in X)
        with self._lock:
            if self._proc.poll() is not None:
                raise ExternalProcessError(f"{self.command!r} exited with code {self._proc.returncode}")
            try:
                self._proc.stdin.write(payload)
                self._proc.stdin.flush()
                lines = [self._proc.stdout.readline() for _ in range(len(X))]
            except BrokenPipeError as exc:
                raise ExternalProcessError(f"{self.command!r} closed its input") from exc
        try:
            return np.array([float(line) for line in lines])
        except ValueError as exc:
            raise ExternalProcessError(f"{self.command!r} replied with a non-numeric line: {exc}") from exc

    def close(self):
        if self._proc.poll() is None:
            self._proc.stdin.close()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
