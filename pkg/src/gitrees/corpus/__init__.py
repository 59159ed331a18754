"""Sample programs for the three languages.

Each ``.sexp`` file may start with header comments::

    ; tape: 3,1,2      initial input tape
    ; expect: OK 6     expected summary head (``OK <value>`` or ``ERR <kind>``)
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple

LANGUAGES = ("io", "aff", "comb")


@dataclass(frozen=True)
class CorpusProgram:
    name: str
    language: str
    path: Path
    source: str
    tape: Tuple[int, ...]
    expect: Optional[str]


def _header(source: str, key: str) -> Optional[str]:
    for line in source.splitlines():
        line = line.strip()
        if line.startswith(";") and line[1:].strip().startswith(key + ":"):
            return line[1:].strip()[len(key) + 1:].strip()
    return None


def load(language: str) -> List[CorpusProgram]:
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    root = Path(str(resources.files(__package__))) / language
    out = []
    for path in sorted(root.glob("*.sexp")):
        src = path.read_text(encoding="utf-8")
        tape = _header(src, "tape")
        out.append(CorpusProgram(
            name=path.stem, language=language, path=path, source=src,
            tape=tuple(int(x) for x in tape.split(",")) if tape else (),
            expect=_header(src, "expect"),
        ))
    return out
