"""Two-party message-level protocol simulation.

A party strategy is a generator. It yields a bit string (``"0110"``) to send
a message, or ``None`` to wait for the other party; the value sent back in
after ``None`` is the received message. Bob's generator *returns* his output.
Messages are nonempty blocks of bits; rounds are maximal runs of
consecutive same-direction messages.

Example, a one-way protocol::

    def alice(x):
        yield format(x, "03b")

    def bob():
        msg = yield None
        return int(msg, 2)

    outcome = run_protocol(alice(5), bob(), reference=5)
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Generator, Hashable, Iterable

import numpy as np

from .errors import NonTermination, ProtocolError
from .hashing import derive_seed

Strategy = Generator[Any, Any, Any]

DEFAULT_MESSAGE_CAP = 100_000


class Direction(str, enum.Enum):
    A_TO_B = "A>B"
    B_TO_A = "B>A"


@dataclass(frozen=True)
class Message:
    direction: Direction
    bits: str


def as_bitstring(bits) -> str:
    if isinstance(bits, str):
        return bits
    arr = np.asarray(bits, dtype=np.uint8)
    return (arr + 48).tobytes().decode("ascii")


def as_bitarray(bits: str) -> np.ndarray:
    return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - 48


@dataclass(frozen=True)
class Transcript:
    messages: tuple[Message, ...] = ()

    @property
    def bits_a_to_b(self) -> int:
        return sum(len(m.bits) for m in self.messages if m.direction is Direction.A_TO_B)

    @property
    def bits_b_to_a(self) -> int:
        return sum(len(m.bits) for m in self.messages if m.direction is Direction.B_TO_A)

    @property
    def total_bits(self) -> int:
        return sum(len(m.bits) for m in self.messages)

    @property
    def rounds(self) -> int:
        count, last = 0, None
        for m in self.messages:
            if m.direction is not last:
                count += 1
                last = m.direction
        return count

    def bits(self) -> str:
        """The concatenation of everything sent."""
        return "".join(m.bits for m in self.messages)

    def dump(self) -> str:
        return "".join(f"{m.direction.value}:{m.bits}\n" for m in self.messages)

    @classmethod
    def parse(cls, text: str) -> "Transcript":
        messages = []
        for line in text.splitlines():
            if not line.strip():
                continue
            head, _, bits = line.partition(":")
            if set(bits) - {"0", "1"} or not bits:
                raise ValueError(f"malformed transcript line {line!r}")
            messages.append(Message(Direction(head.strip()), bits.strip()))
        return cls(tuple(messages))


@dataclass(frozen=True)
class ProtocolOutcome:
    output: Any
    transcript: Transcript
    reference: Any = None

    @property
    def correct(self) -> bool:
        return self.output == self.reference

    def to_json(self) -> dict:
        t = self.transcript
        return {
            "output": _jsonable(self.output),
            "reference": _jsonable(self.reference),
            "correct": self.correct,
            "bits_a_to_b": t.bits_a_to_b,
            "bits_b_to_a": t.bits_b_to_a,
            "total_bits": t.total_bits,
            "rounds": t.rounds,
            "transcript": [[m.direction.value, m.bits] for m in t.messages],
        }


def _jsonable(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, tuple):
        return list(v)
    return v


_DONE = object()


def _advance(gen: Strategy, value=None):
    """Resume ``gen``; returns ``(pending, result)`` with pending ``_DONE`` on return."""
    try:
        return (gen.send(value) if value is not None else next(gen)), None
    except StopIteration as stop:
        return _DONE, stop.value


def run_protocol(alice: Strategy, bob: Strategy, *, reference: Any = None,
                 max_messages: int = DEFAULT_MESSAGE_CAP) -> ProtocolOutcome:
    """Drive two party generators until Bob returns his output.

    Raises :class:`NonTermination` once more than ``max_messages`` messages
    have been exchanged, and :class:`ProtocolError` when both parties try to
    talk (or both wait) at the same time.
    """
    messages: list[Message] = []
    pa, _ = _advance(alice)
    pb, output = _advance(bob)
    while pb is not _DONE:
        if len(messages) >= max_messages:
            raise NonTermination(f"protocol exceeded {max_messages} messages")
        if pa is not None and pa is not _DONE:
            if pb is not None:
                raise ProtocolError("both parties are sending")
            bits = as_bitstring(pa)
            if not bits:
                raise ProtocolError("empty message from Alice")
            messages.append(Message(Direction.A_TO_B, bits))
            pb, output = _advance(bob, bits)
            pa, _ = _advance(alice)
        elif pb is not None:
            if pa is _DONE:
                raise ProtocolError("Bob is sending to a finished Alice")
            bits = as_bitstring(pb)
            if not bits:
                raise ProtocolError("empty message from Bob")
            messages.append(Message(Direction.B_TO_A, bits))
            pa, _ = _advance(alice, bits)
            pb, output = _advance(bob)
        else:
            raise ProtocolError("both parties are waiting")
    alice.close()
    return ProtocolOutcome(output, Transcript(tuple(messages)), reference)


def replay(bob: Strategy, transcript: Transcript) -> Any:
    """Feed a logged transcript to Bob and return his output.

    Bob's own messages must match the log bit for bit.
    """
    pending, output = _advance(bob)
    for m in transcript.messages:
        if pending is _DONE:
            raise ProtocolError("Bob finished before the transcript ended")
        if m.direction is Direction.A_TO_B:
            if pending is not None:
                raise ProtocolError("Bob sent where the log has Alice sending")
            pending, output = _advance(bob, m.bits)
        else:
            if pending is None or as_bitstring(pending) != m.bits:
                raise ProtocolError("Bob's message differs from the log")
            pending, output = _advance(bob)
    if pending is not _DONE:
        raise ProtocolError("Bob did not finish at the end of the transcript")
    return output


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    x: Any
    y: Any
    outcome: ProtocolOutcome

    def row(self) -> tuple:
        t = self.outcome.transcript
        return (self.trial, _jsonable(self.x), _jsonable(self.y), t.bits_a_to_b,
                t.bits_b_to_a, t.rounds, int(self.outcome.correct))


ROW_FIELDS = ("trial", "x", "y", "bits_ab", "bits_ba", "rounds", "correct")


@dataclass
class ProtocolStats:
    trials: int
    mean_total_bits: float
    mean_bits_a_to_b: float
    mean_bits_b_to_a: float
    mean_rounds: float
    error_rate: float
    std_total_bits: float
    std_bits_a_to_b: float
    max_total_bits: int
    max_bits_per_input: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "max_bits_per_input"}
        return out

    def csv_header(self) -> str:
        return ",".join(self.to_json()) + "\n"

    def csv_row(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow([_fmt(v) for v in self.to_json().values()])
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def summarize(records: Iterable[TrialRecord]) -> ProtocolStats:
    """Means and spreads over trial records, summed in trial order."""
    records = list(records)
    if not records:
        raise ValueError("no trials to summarize")
    total = np.array([r.outcome.transcript.total_bits for r in records], dtype=np.float64)
    ab = np.array([r.outcome.transcript.bits_a_to_b for r in records], dtype=np.float64)
    ba = total - ab
    rounds = np.array([r.outcome.transcript.rounds for r in records], dtype=np.float64)
    wrong = sum(1 for r in records if not r.outcome.correct)
    per_input: dict[Hashable, int] = {}
    for r, bits in zip(records, total):
        key = (_jsonable(r.x), _jsonable(r.y))
        per_input[key] = max(per_input.get(key, 0), int(bits))
    n = len(records)
    return ProtocolStats(
        trials=n,
        mean_total_bits=math.fsum(total) / n,
        mean_bits_a_to_b=math.fsum(ab) / n,
        mean_bits_b_to_a=math.fsum(ba) / n,
        mean_rounds=math.fsum(rounds) / n,
        error_rate=wrong / n,
        std_total_bits=float(np.std(total)),
        std_bits_a_to_b=float(np.std(ab)),
        max_total_bits=int(total.max()),
        max_bits_per_input=per_input,
    )


def run_trials(runner: Callable[[int, int], TrialRecord], trials: int, master_seed: int,
               workers: int = 1) -> list[TrialRecord]:
    """Run ``runner(trial_index, trial_seed)`` for each trial, in trial order."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seeds = [derive_seed(master_seed, t) for t in range(trials)]
    if workers <= 1:
        return [runner(t, s) for t, s in enumerate(seeds)]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(runner, range(trials), seeds))


def expected_stats(runner: Callable[[int, int], TrialRecord], trials: int, master_seed: int,
                   workers: int = 1) -> ProtocolStats:
    return summarize(run_trials(runner, trials, master_seed, workers))
