"""Statement-level abstraction of Java source files.

A file is lexed, split into statements at ``;`` ``{`` ``}``, and each
statement is rewritten into a normalized one-line text: visibility
modifiers dropped, literals collapsed to ``L``, primitive type keywords
to ``T``, and every identifier that is not a method name or annotation
name replaced by ``V<k>`` numbered by first appearance within that
statement. The MD5 of each normalized line is the unit all later
comparisons (diffing, grouping, matching) work on.
"""

import enum
import hashlib
import logging
import re
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


class TokenKind(str, enum.Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    LITERAL = "literal"
    OPERATOR = "operator"
    SEPARATOR = "separator"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int  # 1-based line of the token's first character


# Reserved words of the Java lexicon. `true`, `false` and `null` are
# handled as literals, not keywords.
KEYWORDS = frozenset("""
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
""".split())

VISIBILITY_MODIFIERS = frozenset({"public", "protected", "private"})
PRIMITIVE_TYPES = frozenset(
    {"boolean", "byte", "char", "double", "float", "int", "long", "short"}
)
WORD_LITERALS = frozenset({"true", "false", "null"})

STATEMENT_BOUNDARIES = frozenset({";", "{", "}"})

_SEPARATORS = frozenset({"(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "...", "::"})

# Ordered alternatives; longest-match conflicts are resolved by listing
# the longer form first (text block before string, >>>= before >>>, ...).
_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\f\v]+)
    | (?P<nl>\n)
    | (?P<line_comment>//[^\n]*)
    | (?P<block_comment>/\*.*?\*/)
    | (?P<block_comment_open>/\*.*)
    | (?P<textblock>\"{3}.*?\"{3})
    | (?P<string>"(?:\\.|[^"\\\n])*")
    | (?P<char>'(?:\\.|[^'\\\n])*')
    | (?P<number>\.?\d(?:[eEpP][+-]|[\w.])*)
    | (?P<word>[A-Za-z_$][A-Za-z0-9_$]*)
    | (?P<punct>>>>=|>>>|<<=|>>=|\.\.\.|->|::|==|!=|<=|>=|&&|\|\||\+\+|--|
        \+=|-=|\*=|/=|&=|\|=|\^=|%=|<<|>>|[-+*/%&|^!~=<>?:;,.(){}\[\]@])
    """,
    re.VERBOSE | re.DOTALL,
)


def _classify_word(text: str) -> TokenKind:
    if text in WORD_LITERALS:
        return TokenKind.LITERAL
    if text in KEYWORDS:
        return TokenKind.KEYWORD
    return TokenKind.IDENTIFIER


def tokenize(source_text: str) -> list[Token]:
    """Lex Java-like source into tokens, dropping comments and whitespace.

    Lexing never fails: an unterminated string, character or block
    comment is closed at end of file (with a logged warning) and any
    character the lexicon does not know is passed through as a
    single-character operator token.
    """
    if source_text.startswith("﻿"):
        source_text = source_text[1:]
    tokens: list[Token] = []
    line = 1
    pos = 0
    length = len(source_text)
    while pos < length:
        m = _TOKEN_RE.match(source_text, pos)
        if m is None:
            ch = source_text[pos]
            if ch in "\"'":
                # Unterminated string/char literal: tolerate by treating
                # everything up to EOF as the literal.
                logger.warning("unterminated literal at line %d; closing at EOF", line)
                tokens.append(Token(TokenKind.LITERAL, source_text[pos:], line))
                break
            tokens.append(Token(TokenKind.OPERATOR, ch, line))
            pos += 1
            continue
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
        elif kind in ("ws", "line_comment"):
            pass
        elif kind in ("block_comment", "block_comment_open"):
            if kind == "block_comment_open":
                logger.warning("unterminated comment at line %d; closing at EOF", line)
            line += text.count("\n")
        elif kind in ("textblock", "string", "char", "number"):
            tokens.append(Token(TokenKind.LITERAL, text, line))
            line += text.count("\n")
        elif kind == "word":
            tokens.append(Token(_classify_word(text), text, line))
        else:  # punct
            tok_kind = (
                TokenKind.SEPARATOR if text in _SEPARATORS else TokenKind.OPERATOR
            )
            tokens.append(Token(tok_kind, text, line))
        pos = m.end()
    return tokens


def segment_statements(tokens: list[Token]) -> list[tuple[Token, ...]]:
    """Split a token stream into statements after every ``;`` ``{`` ``}``.

    The boundary token terminates its own group; a trailing run of
    tokens without a boundary forms a final group.
    """
    groups: list[tuple[Token, ...]] = []
    current: list[Token] = []
    for token in tokens:
        current.append(token)
        if token.kind is TokenKind.SEPARATOR and token.text in STATEMENT_BOUNDARIES:
            groups.append(tuple(current))
            current = []
    if current:
        groups.append(tuple(current))
    return groups


def normalize_statement(group: tuple[Token, ...]) -> str:
    """Rewrite one statement's tokens into its normalized text.

    Rules, applied per token:
      - visibility modifiers (public/protected/private) are dropped
      - literals become ``L``
      - primitive type keywords become ``T``
      - an identifier directly followed by ``(`` is a method name and is
        kept, as is an annotation name directly after ``@``
      - every other identifier becomes ``V<k>``, where k counts distinct
        names by first appearance and restarts at 0 for each statement
      - everything else is kept; tokens are joined with single spaces
    """
    parts: list[str] = []
    numbering: dict[str, int] = {}
    for i, token in enumerate(group):
        if token.kind is TokenKind.KEYWORD:
            if token.text in VISIBILITY_MODIFIERS:
                continue
            parts.append("T" if token.text in PRIMITIVE_TYPES else token.text)
        elif token.kind is TokenKind.LITERAL:
            parts.append("L")
        elif token.kind is TokenKind.IDENTIFIER:
            next_is_call = i + 1 < len(group) and group[i + 1].text == "("
            prev_is_at = i > 0 and group[i - 1].text == "@"
            if next_is_call or prev_is_at:
                parts.append(token.text)
            else:
                number = numbering.setdefault(token.text, len(numbering))
                parts.append(f"V{number}")
        else:
            parts.append(token.text)
    return " ".join(parts)


def raw_statement(group: tuple[Token, ...]) -> str:
    """Join a statement's tokens without abstraction (diagnostic mode)."""
    return " ".join(token.text for token in group)


def digest_of(normalized_text: str) -> str:
    """MD5 digest (hex) over the UTF-8 bytes of a normalized line."""
    return hashlib.md5(normalized_text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class NormalizedStatement:
    normalized_text: str
    digest: str
    line_span: tuple[int, int]  # inclusive 1-based original line range

    @classmethod
    def from_group(cls, group: tuple[Token, ...], normalize: bool = True):
        text = normalize_statement(group) if normalize else raw_statement(group)
        lines = [t.line for t in group]
        return cls(text, digest_of(text), (min(lines), max(lines)))


@dataclass(frozen=True)
class NormalizedFile:
    path: str
    statements: tuple[NormalizedStatement, ...]
    digests: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.digests) != len(self.statements):
            object.__setattr__(
                self, "digests", tuple(s.digest for s in self.statements)
            )


def abstract_file(source_text: str, path: str = "", normalize: bool = True) -> NormalizedFile:
    """Tokenize, segment, normalize and hash a whole source file.

    With ``normalize=False`` statements keep their raw token text (only
    comments and whitespace vanish); this exists to demonstrate what the
    abstraction buys and is exposed on the CLI as ``--no-normalize``.
    """
    tokens = tokenize(source_text)
    groups = segment_statements(tokens)
    statements = tuple(NormalizedStatement.from_group(g, normalize) for g in groups)
    return NormalizedFile(path, statements)
