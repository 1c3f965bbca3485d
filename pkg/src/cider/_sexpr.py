"""Tiny cursor-based scanner shared by the concept and context-formula parsers."""

import re

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_WS_RE = re.compile(r"[ \t\r\n]+")


class ParseError(ValueError):
    """Malformed expression; carries the character offset of the problem."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        return ParseError(message, self.pos)

    def at_end(self):
        return self.pos >= len(self.text)

    def try_consume(self, literal):
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def require_ws(self):
        m = _WS_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected whitespace")
        self.pos = m.end()

    def read_name(self):
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def expect(self, literal):
        if not self.try_consume(literal):
            raise self.error(f"expected {literal!r}")

    def expect_end(self):
        if not self.at_end():
            raise self.error("unexpected trailing input")
