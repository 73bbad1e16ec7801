"""Reader for the TOML subset used by configuration files.

Accepted grammar (EBNF)::

    document = { ws , [ table | keyval ] , ws , [ comment ] , newline } ;
    table    = "[" , ws , key , ws , "]" ;
    keyval   = key , ws , "=" , ws , value ;
    key      = bare_key | basic_string | literal_string ;
    bare_key = ( letter | digit | "_" | "-" ) , { letter | digit | "_" | "-" } ;
    value    = basic_string | literal_string | number | boolean | array ;
    array    = "[" , { wsnl } , [ value , { { wsnl } , "," , { wsnl } , value } , { wsnl } , [ "," ] ] , { wsnl } , "]" ;
    wsnl     = ws | newline | comment ;
    number   = [ "+" | "-" ] , ( integer | float | "inf" | "nan" ) ;
    boolean  = "true" | "false" ;
    comment  = "#" , { any char except newline } ;

Basic strings take the escapes ``\\" \\\\ \\n \\t``; literal strings are
taken verbatim. Dotted keys, inline tables, arrays of tables, dates and
multi-line strings are not part of the subset. Every value remembers the
line and column where it starts, so later validation can point at it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = ["TomlError", "Located", "Document", "loads"]


class TomlError(ValueError):
    """Syntax or semantic error with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int, path: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.path = path
        super().__init__(self.format())

    def format(self) -> str:
        where = f"{self.path}:" if self.path else ""
        return f"{where}{self.line}:{self.col}: {self.message}"


@dataclass
class Located:
    """A parsed value with its start position and, for strings, escape info."""

    value: object
    line: int
    col: int
    raw: bool = True  # string content maps 1:1 onto source columns

    def plain(self):
        if isinstance(self.value, list):
            return [v.plain() for v in self.value]
        return self.value


@dataclass
class Document:
    """Top-level keys plus named tables, each ``key -> Located``."""

    root: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    table_pos: dict = field(default_factory=dict)
    key_pos: dict = field(default_factory=dict)


_BARE = re.compile(r"[A-Za-z0-9_-]+")
_NUMBER = re.compile(r"[+-]?(?:inf|nan|(?:\d[\d_]*)?(?:\.\d[\d_]*)?(?:[eE][+-]?\d+)?)")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


class _Reader:
    def __init__(self, text: str, path: str | None):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1
        self.line_start = 0

    # -- low level --

    def col(self) -> int:
        return self.pos - self.line_start + 1

    def error(self, message: str, line: int | None = None, col: int | None = None):
        raise TomlError(message, line or self.line, col or self.col(), self.path)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self, n: int = 1):
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.line_start = self.pos + 1
            self.pos += 1

    def skip_ws(self):
        while self.peek() in (" ", "\t") and self.peek():
            self.advance()

    def skip_comment(self):
        if self.peek() == "#":
            while self.peek() and self.peek() != "\n":
                self.advance()

    def skip_wsnl(self):
        while True:
            self.skip_ws()
            self.skip_comment()
            if self.peek() == "\n":
                self.advance()
            elif self.peek() == "\r" and self.text[self.pos : self.pos + 2] == "\r\n":
                self.advance(2)
            else:
                return

    def end_of_line(self):
        self.skip_ws()
        self.skip_comment()
        c = self.peek()
        if c == "\r" and self.text[self.pos : self.pos + 2] == "\r\n":
            self.advance(2)
        elif c == "\n":
            self.advance()
        elif c:
            self.error(f"unexpected {c!r}; expected end of line")

    # -- grammar --

    def key(self) -> tuple[str, int, int]:
        line, col = self.line, self.col()
        c = self.peek()
        if c == '"':
            return self.basic_string().value, line, col
        if c == "'":
            return self.literal_string().value, line, col
        m = _BARE.match(self.text, self.pos)
        if not m:
            self.error("expected a key" if c else "expected a key, found end of input")
        self.advance(m.end() - self.pos)
        return m.group(), line, col

    def basic_string(self) -> Located:
        line, col = self.line, self.col()
        self.advance()
        out = []
        raw = True
        while True:
            c = self.peek()
            if not c or c == "\n":
                self.error("unterminated string", line, col)
            if c == '"':
                self.advance()
                return Located("".join(out), line, col, raw)
            if c == "\\":
                nxt = self.text[self.pos + 1 : self.pos + 2]
                if nxt not in _ESCAPES:
                    self.error(f"unsupported escape '\\{nxt}'")
                out.append(_ESCAPES[nxt])
                raw = False
                self.advance(2)
                continue
            out.append(c)
            self.advance()

    def literal_string(self) -> Located:
        line, col = self.line, self.col()
        self.advance()
        start = self.pos
        while self.peek() != "'":
            if not self.peek() or self.peek() == "\n":
                self.error("unterminated string", line, col)
            self.advance()
        value = self.text[start : self.pos]
        self.advance()
        return Located(value, line, col)

    def value(self) -> Located:
        line, col = self.line, self.col()
        c = self.peek()
        if c == '"':
            return self.basic_string()
        if c == "'":
            return self.literal_string()
        if c == "[":
            return self.array()
        for word, val in (("true", True), ("false", False)):
            if self.text.startswith(word, self.pos) and not _BARE.match(self.text, self.pos + len(word)):
                self.advance(len(word))
                return Located(val, line, col)
        m = _NUMBER.match(self.text, self.pos)
        lexeme = m.group() if m else ""
        if lexeme.lstrip("+-") and not _BARE.match(self.text, m.end()) and self.text[m.end() : m.end() + 1] != ".":
            self.advance(len(lexeme))
            body = lexeme.replace("_", "")
            try:
                if re.fullmatch(r"[+-]?\d+", body):
                    return Located(int(body), line, col)
                return Located(float(body), line, col)
            except ValueError:
                self.error(f"malformed number {lexeme!r}", line, col)
        if not c or c == "\n":
            self.error("expected a value")
        end = self.pos
        while end < len(self.text) and self.text[end] not in " \t\n,]#":
            end += 1
        self.error(f"invalid value {self.text[self.pos:end]!r} (strings must be quoted)")

    def array(self) -> Located:
        line, col = self.line, self.col()
        self.advance()
        items = []
        while True:
            self.skip_wsnl()
            if self.peek() == "]":
                self.advance()
                return Located(items, line, col)
            if not self.peek():
                self.error("unterminated array", line, col)
            items.append(self.value())
            self.skip_wsnl()
            c = self.peek()
            if c == ",":
                self.advance()
            elif c == "]":
                continue
            else:
                self.error("expected ',' or ']' in array" if c else "unterminated array")

    def document(self) -> Document:
        doc = Document()
        current = doc.root
        current_name = None
        while True:
            self.skip_wsnl()
            if not self.peek():
                return doc
            if self.peek() == "[":
                line, col = self.line, self.col()
                self.advance()
                self.skip_ws()
                if self.peek() == "[":
                    self.error("arrays of tables are not supported")
                name, _, _ = self.key()
                self.skip_ws()
                if self.peek() != "]":
                    self.error("expected ']' after table name")
                self.advance()
                if name in doc.tables:
                    self.error(f"duplicate table [{name}]", line, col)
                if name in doc.root:
                    self.error(f"table [{name}] clashes with top-level key", line, col)
                current = doc.tables[name] = {}
                current_name = name
                doc.table_pos[name] = (line, col)
                self.end_of_line()
                continue
            key, line, col = self.key()
            self.skip_ws()
            if self.peek() != "=":
                self.error(f"expected '=' after key {key!r}")
            self.advance()
            self.skip_ws()
            val = self.value()
            if key in current:
                self.error(f"duplicate key {key!r}", line, col)
            current[key] = val
            doc.key_pos[(current_name, key)] = (line, col)
            self.end_of_line()


def loads(text: str, path: str | None = None) -> Document:
    """Parse ``text``; raises :class:`TomlError` with a position on failure."""
    return _Reader(text, path).document()
