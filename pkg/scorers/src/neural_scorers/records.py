"""Score records and the JSONL score-file format.

The file format is the external interface consumed by the privatization
pipeline's budgeting stage: one JSON object per line with "doc_id",
"invert" and "scores" (an ordered [word, score] list). The word sequence
must equal the pipeline's tokenization of the document, which is the
published `\\b\\w+\\b` lowercase convention reproduced here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

WORD_RE = re.compile(r"\b\w+\b")

METHODS = ("attention", "ig", "keybert", "yake")

# Whether the method's raw scores should be inverted before budget
# allocation: keyword-extraction scores where higher means more important
# must be flipped so that important words get less budget. Attention/IG
# records carry false by default; the pipeline config may override.
DEFAULT_INVERT = {"attention": False, "ig": False, "keybert": True, "yake": False}


def tokenize(text: str) -> list[str]:
    """Lowercased maximal word-character runs, in document order."""
    return [m.group(0).lower() for m in WORD_RE.finditer(text)]


def word_spans(text: str) -> list[tuple[str, int, int]]:
    """(lowercased word, start, end) character spans, in document order."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in WORD_RE.finditer(text)]


@dataclass
class ScoreRecord:
    doc_id: str
    method: str
    invert: bool
    scores: list[tuple[str, float]]  # one entry per word occurrence, in order

    def words(self) -> list[str]:
        return [w for w, _ in self.scores]

    def to_json(self) -> str:
        return json.dumps(
            {
                "doc_id": self.doc_id,
                "method": self.method,
                "invert": self.invert,
                "scores": [[w, s] for w, s in self.scores],
            },
            ensure_ascii=False,
            sort_keys=True,
        )


def write_score_file(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(record.to_json() + "\n")


def read_score_file(path) -> list[ScoreRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(
                ScoreRecord(
                    doc_id=str(obj["doc_id"]),
                    method=obj.get("method", ""),
                    invert=bool(obj["invert"]),
                    scores=[(str(w), float(s)) for w, s in obj["scores"]],
                )
            )
    return records
