"""Reader for the Prolog subset: tokenizer and operator-precedence parser.

The operator table is fixed and closed. Variables sharing a name within one
term parse to the same Var; `_` is always fresh. Clauses end with `.`
followed by layout or end of input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Atom, Int, Struct, Var, make_list

# (priority, type); type in xfx/xfy/yfx
INFIX = {
    ":-": (1200, "xfx"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "is": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    "=<": (700, "xfx"),
    ">=": (700, "xfx"),
    "=>": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "mod": (400, "yfx"),
}

PREFIX = {
    ":-": (1200, "fx"),
    "-": (200, "fy"),
}

_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&")
_SOLO = set("!;")


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.col = col


# token kinds: atom var int punct end eof
@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int
    value: int = 0
    functor: bool = False  # atom immediately followed by '('


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i = 0
    n = len(text)
    line = 1
    bol = -1  # index before the first column of the current line

    def err(msg, at):
        raise ParseError(msg, line, at - bol)

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            bol = i
            i += 1
            continue
        if c.isspace():
            i += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        col = i - bol
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col, value=int(text[i:j])))
            i = j
            continue
        if c == "_" or c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if (c == "_" or c.isupper()) else "atom"
            tok = Token(kind, word, line, col)
            if kind == "atom" and j < n and text[j] == "(":
                tok.functor = True
            toks.append(tok)
            i = j
            continue
        if c == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    err("unterminated quoted atom", i)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    j += 1
                    break
                if text[j] == "\n":
                    line += 1
                    bol = j
                buf.append(text[j])
                j += 1
            tok = Token("atom", "".join(buf), line, col)
            if j < n and text[j] == "(":
                tok.functor = True
            toks.append(tok)
            i = j
            continue
        if c in "()[]|,":
            toks.append(Token("punct", c, line, col))
            i += 1
            continue
        if c in _SOLO:
            toks.append(Token("atom", c, line, col))
            i += 1
            continue
        if c == ".":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "" or nxt.isspace() or nxt == "%":
                toks.append(Token("end", ".", line, col))
                i += 1
                continue
            # fall through: part of a symbolic atom
        if c in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            tok = Token("atom", text[i:j], line, col)
            if j < n and text[j] == "(":
                tok.functor = True
            toks.append(tok)
            i = j
            continue
        err(f"unexpected character {c!r}", i)
    toks.append(Token("eof", "", line, n - bol))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.varmap: dict[str, Var] = {}
        self.varorder: list[str] = []

    def peek(self) -> Token:
        return self.toks[self.pos]

    def take(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect_punct(self, ch: str):
        t = self.take()
        if t.kind != "punct" or t.text != ch:
            self.error(f"expected {ch!r}, found {t.text!r}", t)

    def reset_vars(self):
        self.varmap.clear()
        self.varorder.clear()

    def _var(self, name: str) -> Var:
        if name == "_":
            return Var()
        v = self.varmap.get(name)
        if v is None:
            v = self.varmap[name] = Var()
            self.varorder.append(name)
        return v

    def _starts_term(self, tok: Token) -> bool:
        if tok.kind in ("int", "var", "atom"):
            return True
        return tok.kind == "punct" and tok.text in ("(", "[")

    def parse(self, max_p: int):
        left, left_p = self.primary(max_p)
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == ",":
                name = ","
            elif tok.kind == "atom":
                # the functor flag only matters in operand position:
                # in X=(...) the '=' is an operator before a parenthesized term
                name = tok.text
            else:
                break
            entry = INFIX.get(name)
            if entry is None:
                break
            p, typ = entry
            if p > max_p:
                break
            lmax = p if typ == "yfx" else p - 1
            if left_p > lmax:
                break
            self.take()
            rmax = p if typ == "xfy" else p - 1
            right, _ = self.parse(rmax)
            left = Struct(name, (left, right))
            left_p = p
        return left, left_p

    def primary(self, max_p: int):
        tok = self.take()
        if tok.kind == "int":
            return Int(tok.value), 0
        if tok.kind == "var":
            return self._var(tok.text), 0
        if tok.kind == "punct":
            if tok.text == "(":
                t, _ = self.parse(1200)
                self.expect_punct(")")
                return t, 0
            if tok.text == "[":
                return self._list(), 0
            self.error(f"unexpected {tok.text!r}", tok)
        if tok.kind == "atom":
            name = tok.text
            if tok.functor:
                self.expect_punct("(")
                args = [self.parse(999)[0]]
                while self.peek().kind == "punct" and self.peek().text == ",":
                    self.take()
                    args.append(self.parse(999)[0])
                self.expect_punct(")")
                return Struct(name, tuple(args)), 0
            entry = PREFIX.get(name)
            if entry is not None and entry[0] <= max_p and self._starts_term(self.peek()):
                p, typ = entry
                if name == "-" and self.peek().kind == "int":
                    return Int(-self.take().value), 0
                arg, _ = self.parse(p if typ == "fy" else p - 1)
                return Struct(name, (arg,)), p
            # a bare operator symbol in argument position is a plain atom
            return Atom(name), 0
        self.error("unexpected end of input", tok)

    def _list(self):
        if self.peek().kind == "punct" and self.peek().text == "]":
            self.take()
            return Atom("[]")
        items = [self.parse(999)[0]]
        tail = Atom("[]")
        while True:
            tok = self.take()
            if tok.kind == "punct" and tok.text == ",":
                items.append(self.parse(999)[0])
                continue
            if tok.kind == "punct" and tok.text == "|":
                tail = self.parse(999)[0]
                self.expect_punct("]")
                break
            if tok.kind == "punct" and tok.text == "]":
                break
            self.error(f"expected ',', '|' or ']', found {tok.text!r}", tok)
        return make_list(items, tail)


def parse_term(text: str):
    """Parse a single term; a trailing clause terminator is allowed."""
    term, _names = parse_term_with_names(text)
    return term


def parse_term_with_names(text: str):
    """Parse a single term; also return its named variables in source order."""
    p = _Parser(tokenize(text))
    term, _ = p.parse(1200)
    tok = p.take()
    if tok.kind == "end":
        tok = p.take()
    if tok.kind != "eof":
        p.error(f"unexpected {tok.text!r} after term", tok)
    return term, [(name, p.varmap[name]) for name in p.varorder]


@dataclass
class SourceClause:
    head: object
    body: object  # goal conjunction; the atom true for a fact
    origin: tuple[str, int] | None = None


def parse_program(text: str, source_name: str = "<string>") -> list[SourceClause]:
    """Parse a clause sequence. `H:-B` gives (H,B); a fact H gives (H,true)."""
    p = _Parser(tokenize(text))
    clauses: list[SourceClause] = []
    while p.peek().kind != "eof":
        p.reset_vars()
        start = p.peek()
        term, _ = p.parse(1200)
        tok = p.take()
        if tok.kind != "end":
            p.error(f"expected '.' to end clause, found {tok.text!r}", tok)
        origin = (source_name, start.line)
        if type(term) is Struct and term.name == ":-" and len(term.args) == 2:
            head, body = term.args
        elif type(term) is Struct and term.name == ":-" and len(term.args) == 1:
            raise ParseError("directives are not supported", start.line, start.col)
        else:
            head, body = term, Atom("true")
        if type(head) not in (Atom, Struct):
            raise ParseError("clause head must be an atom or compound", start.line, start.col)
        clauses.append(SourceClause(head, body, origin))
    return clauses
