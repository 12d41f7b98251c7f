"""Noun-phrase chunking and hyponym-hypernym pair extraction.

Input is pre-tagged text, one sentence per line, whitespace-separated
``surface_TAG`` tokens. Tags are mapped onto a coarse set (DET, ADJ, NOUN,
PROPN, CONJ, COMMA, OTHER); chunking finds maximal ``DET? ADJ* NOUN+``
spans left to right, and six lexical-syntactic patterns then pair listed
noun phrases with their governing noun phrase:

    1  such NP as NP, NP[,] and/or NP
    2  NP such as NP, NP[,] and/or NP
    3  NP, NP[,] or other NP
    4  NP, NP[,] and other NP
    5  NP[,] including NP, NP[,] and/or NP
    6  NP[,] especially NP, NP[,] and/or NP

Patterns 1, 2, 5 and 6 make the governing NP the hypernym of every listed
NP; patterns 3 and 4 make the trailing NP after "or other"/"and other" the
hypernym of every preceding listed NP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

__all__ = [
    "Token",
    "TaggedSentence",
    "NounPhrase",
    "PairOccurrence",
    "ExtractionStats",
    "MalformedLineError",
    "parse_sentence",
    "chunk_noun_phrases",
    "match_patterns",
    "extract_sentences",
    "extract_lines",
]

COARSE_TAGS = frozenset({"DET", "ADJ", "NOUN", "PROPN", "CONJ", "COMMA", "OTHER"})

# Penn Treebank and Universal Dependencies tags folded onto the coarse set.
_TAG_MAP = {
    "DT": "DET",
    "JJ": "ADJ",
    "JJR": "ADJ",
    "JJS": "ADJ",
    "NN": "NOUN",
    "NNS": "NOUN",
    "NNP": "PROPN",
    "NNPS": "PROPN",
    "CC": "CONJ",
    ",": "COMMA",
    "PUNCT-COMMA": "COMMA",
    "CCONJ": "CONJ",
}


class MalformedLineError(ValueError):
    """A corpus line that cannot be parsed into tagged tokens."""


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class NounPhrase:
    surface: str  # space-joined, lowercased, determiner stripped
    head: str  # final noun token

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("empty noun phrase")


@dataclass(frozen=True)
class PairOccurrence:
    hyponym: str
    hypernym: str
    pattern_id: int


@dataclass
class ExtractionStats:
    sentences: int = 0
    malformed_lines: int = 0
    pairs: int = 0


def coarse_tag(raw_tag: str, surface: str) -> str:
    tag = raw_tag.upper()
    if tag in COARSE_TAGS:
        return tag
    if tag in _TAG_MAP:
        return _TAG_MAP[tag]
    if surface == ",":
        return "COMMA"
    return "OTHER"


def parse_sentence(line: str) -> TaggedSentence:
    """Parse one ``surface_TAG`` line; surfaces are lowercased."""
    tokens = []
    for piece in line.split():
        if "_" not in piece:
            raise MalformedLineError(f"token without tag separator: {piece!r}")
        surface, raw_tag = piece.rsplit("_", 1)
        if not surface or not raw_tag:
            raise MalformedLineError(f"empty surface or tag: {piece!r}")
        surface = surface.lower()
        tokens.append(Token(surface, coarse_tag(raw_tag, surface)))
    if not tokens:
        raise MalformedLineError("empty sentence")
    return TaggedSentence(tuple(tokens))


def chunk_noun_phrases(sentence: TaggedSentence) -> list[tuple[NounPhrase, tuple[int, int]]]:
    """Maximal non-overlapping ``DET? ADJ* NOUN+`` chunks, left to right.

    Returns (phrase, (start, end)) with end exclusive; the span covers the
    determiner but the stored surface does not.
    """
    tokens = sentence.tokens
    n = len(tokens)
    out = []
    i = 0
    while i < n:
        j = i
        if tokens[j].tag == "DET":
            j += 1
        k = j
        while k < n and tokens[k].tag == "ADJ":
            k += 1
        m = k
        while m < n and tokens[m].tag in ("NOUN", "PROPN"):
            m += 1
        if m > k:
            words = [t.surface for t in tokens[j:m]]
            out.append((NounPhrase(" ".join(words), words[-1]), (i, m)))
            i = m
        else:
            i += 1
    return out


# Items the pattern matcher walks over: chunks, commas, and loose words.
_NP, _WORD, _COMMA = "np", "word", "comma"


def _build_items(sentence: TaggedSentence, chunks) -> list[tuple]:
    items: list[tuple] = []
    start_to_chunk = {span[0]: (np_, span) for np_, span in chunks}
    i = 0
    n = len(sentence.tokens)
    while i < n:
        if i in start_to_chunk:
            np_, span = start_to_chunk[i]
            items.append((_NP, np_, span[0]))
            i = span[1]
        else:
            tok = sentence.tokens[i]
            if tok.tag == "COMMA":
                items.append((_COMMA, None, i))
            else:
                items.append((_WORD, tok.surface, i))
            i += 1
    return items


def _is_np(item) -> bool:
    return item[0] == _NP


def _is_word(item, *surfaces) -> bool:
    return item[0] == _WORD and item[1] in surfaces


def _strip_leading(np_: NounPhrase, marker: str) -> Optional[NounPhrase]:
    # "such fruits" / "other pets": the marker word gets absorbed into the
    # chunk when tagged as an adjective; peel it off the stored surface.
    prefix = marker + " "
    if np_.surface.startswith(prefix):
        rest = np_.surface[len(prefix):]
        if rest:
            return NounPhrase(rest, np_.head)
    return None


def _parse_np_list(items, j):
    """Parse ``NP (, NP)* ([,] and/or NP)?`` starting at item ``j``.

    Stops before an and/or element introducing "other", which belongs to
    patterns 3/4. Returns (noun phrases, index past the list) or None.
    """
    n = len(items)
    if j >= n or not _is_np(items[j]):
        return None
    elems = [items[j][1]]
    j += 1
    while True:
        if j + 1 < n and items[j][0] == _COMMA and _is_np(items[j + 1]):
            elems.append(items[j + 1][1])
            j += 2
            continue
        jj = j
        if jj < n and items[jj][0] == _COMMA:
            jj += 1
        if jj < n and _is_word(items[jj], "and", "or"):
            nxt = jj + 1
            if nxt < n and _is_word(items[nxt], "other"):
                break
            if nxt < n and _is_np(items[nxt]):
                if _strip_leading(items[nxt][1], "other") is not None:
                    break
                elems.append(items[nxt][1])
                j = nxt + 1
        break
    return elems, j


def _emit(acc, position, pattern_id, hyponyms, hypernym: NounPhrase):
    for hypo in hyponyms:
        if hypo.surface != hypernym.surface:
            acc.append((position, pattern_id, PairOccurrence(hypo.surface, hypernym.surface, pattern_id)))


def _match_forward(items, acc) -> None:
    n = len(items)
    i = 0
    while i < n:
        item = items[i]
        consumed = None

        # Pattern 1: such NP as NP-list ("such" either loose or glued to the chunk).
        governing = None
        after = None
        if _is_word(item, "such") and i + 1 < n and _is_np(items[i + 1]):
            governing, after = items[i + 1][1], i + 2
        elif _is_np(item):
            stripped = _strip_leading(item[1], "such")
            if stripped is not None:
                governing, after = stripped, i + 1
        if governing is not None and after < n and _is_word(items[after], "as"):
            parsed = _parse_np_list(items, after + 1)
            if parsed:
                elems, end = parsed
                _emit(acc, i, 1, elems, governing)
                consumed = end

        # Patterns 2, 5, 6: NP [,] marker NP-list.
        if consumed is None and _is_np(item):
            j = i + 1
            if j < n and items[j][0] == _COMMA:
                j += 1
            if j < n and _is_word(items[j], "such") and j + 1 < n and _is_word(items[j + 1], "as"):
                parsed = _parse_np_list(items, j + 2)
                if parsed:
                    elems, end = parsed
                    _emit(acc, i, 2, elems, item[1])
                    consumed = end
            elif j < n and _is_word(items[j], "including", "especially"):
                parsed = _parse_np_list(items, j + 1)
                if parsed:
                    elems, end = parsed
                    _emit(acc, i, 5 if items[j][1] == "including" else 6, elems, item[1])
                    consumed = end

        i = consumed if consumed is not None else i + 1


def _match_backward(items, acc) -> None:
    # Patterns 3/4: NP (, NP)* [,] and/or other NP.
    n = len(items)
    i = 0
    while i < n:
        if not _is_word(items[i], "and", "or"):
            i += 1
            continue
        pattern_id = 4 if items[i][1] == "and" else 3
        hypernym = None
        end = None
        if i + 1 < n and _is_word(items[i + 1], "other") and i + 2 < n and _is_np(items[i + 2]):
            hypernym, end = items[i + 2][1], i + 3
        elif i + 1 < n and _is_np(items[i + 1]):
            hypernym = _strip_leading(items[i + 1][1], "other")
            end = i + 2
        if hypernym is None:
            i += 1
            continue
        # Walk back over [,] NP (, NP)* collecting the listed hyponyms.
        j = i - 1
        if j >= 0 and items[j][0] == _COMMA:
            j -= 1
        elems: list[NounPhrase] = []
        while j >= 0 and _is_np(items[j]):
            elems.append(items[j][1])
            if j - 2 >= 0 and items[j - 1][0] == _COMMA and _is_np(items[j - 2]):
                j -= 2
            else:
                break
        if elems:
            elems.reverse()
            _emit(acc, j, pattern_id, elems, hypernym)
            i = end
        else:
            i += 1


def match_patterns(sentence: TaggedSentence, chunks) -> list[PairOccurrence]:
    """All pattern firings over the chunked sentence, in positional order."""
    items = _build_items(sentence, chunks)
    acc: list[tuple[int, int, PairOccurrence]] = []
    _match_forward(items, acc)
    _match_backward(items, acc)
    acc.sort(key=lambda rec: (rec[0], rec[1]))
    return [rec[2] for rec in acc]


def extract_sentences(sentences: Iterable[TaggedSentence]) -> Iterator[PairOccurrence]:
    for sentence in sentences:
        yield from match_patterns(sentence, chunk_noun_phrases(sentence))


def extract_lines(lines: Iterable[str], stats: Optional[ExtractionStats] = None) -> Iterator[PairOccurrence]:
    """Stream pair occurrences from raw corpus lines.

    Blank lines are ignored; malformed lines are counted in ``stats`` and
    skipped, never fatal.
    """
    if stats is None:
        stats = ExtractionStats()
    for line in lines:
        if not line.strip():
            continue
        try:
            sentence = parse_sentence(line)
        except MalformedLineError:
            stats.malformed_lines += 1
            continue
        stats.sentences += 1
        for occ in match_patterns(sentence, chunk_noun_phrases(sentence)):
            stats.pairs += 1
            yield occ
