"""Phoneme inventory: binary feature vectors and IPA tokenization.

The inventory maps IPA symbols to binary articulatory feature vectors.
Consonants carry 15 features in the groups Class, Laryngeal, Manner and
Place; vowels carry a Persian-adapted 4-feature subset (high, low, back,
round). The table ships as JSON data rather than code so the feature
assignments can be swapped out without touching the distance machinery.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

FEATURE_GROUPS = ("Class", "Place", "Laryngeal", "Manner")
CONSONANT_FEATURE_COUNT = 15
VOWEL_FEATURE_COUNT = 4

#: The three vowels spoken in Persian but not written in Perso-Arabic script.
SHORT_VOWELS = ("æ", "e", "o")

#: The full six-vowel system every inventory must cover.
PERSIAN_VOWELS = ("æ", "e", "o", "ɒː", "iː", "uː")

DEFAULT_INVENTORY_RESOURCE = "default_inventory.json"


class InventoryError(ValueError):
    """An inventory document violates the feature-table contract."""


class TokenizeError(ValueError):
    """An IPA string contains a symbol the inventory does not know."""

    def __init__(self, text: str, position: int):
        self.text = text
        self.position = position
        self.symbol = text[position]
        super().__init__(
            f"unknown IPA symbol {self.symbol!r} at index {position} in {text!r}"
        )


@dataclass(frozen=True)
class FeatureDef:
    """A named binary consonant feature and the group it belongs to."""

    name: str
    group: str


@dataclass(frozen=True)
class FeatureTable:
    consonant_features: tuple[FeatureDef, ...]
    vowel_features: tuple[str, ...]

    def feature_count(self, phone_class: str) -> int:
        if phone_class == "consonant":
            return len(self.consonant_features)
        if phone_class == "vowel":
            return len(self.vowel_features)
        raise ValueError(f"unknown phone class {phone_class!r}")

    def feature_names(self, phone_class: str) -> tuple[str, ...]:
        if phone_class == "consonant":
            return tuple(f.name for f in self.consonant_features)
        return tuple(self.vowel_features)


@dataclass(frozen=True)
class Phoneme:
    symbol: str
    phone_class: str  # "consonant" | "vowel"
    features: tuple[int, ...]
    is_short_vowel: bool = False

    def __repr__(self) -> str:  # keeps test failures readable
        return f"/{self.symbol}/"


@dataclass(frozen=True)
class PhonemeSequence:
    """A tokenized IPA string; concatenating the symbols reproduces it."""

    phones: tuple[Phoneme, ...]
    source_text: str

    @classmethod
    def from_phones(cls, phones) -> "PhonemeSequence":
        phones = tuple(phones)
        return cls(phones, "".join(p.symbol for p in phones))

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(p.symbol for p in self.phones)

    def __len__(self) -> int:
        return len(self.phones)

    def __iter__(self):
        return iter(self.phones)

    def __getitem__(self, i):
        return self.phones[i]

    def __repr__(self) -> str:
        return f"[{' '.join(self.symbols)}]"


class PhonemeInventory:
    """Immutable symbol-to-phoneme map over one feature table.

    Safe to share across threads once loaded; nothing here mutates.
    """

    def __init__(self, table: FeatureTable, phonemes: dict[str, Phoneme]):
        self.table = table
        self.phonemes = dict(phonemes)
        self._max_symbol_len = max((len(s) for s in self.phonemes), default=0)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.phonemes

    def __getitem__(self, symbol: str) -> Phoneme:
        return self.phonemes[symbol]

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.phonemes)

    @property
    def consonants(self) -> tuple[Phoneme, ...]:
        return tuple(p for p in self.phonemes.values() if p.phone_class == "consonant")

    @property
    def vowels(self) -> tuple[Phoneme, ...]:
        return tuple(p for p in self.phonemes.values() if p.phone_class == "vowel")

    @property
    def short_vowels(self) -> tuple[Phoneme, ...]:
        return tuple(p for p in self.phonemes.values() if p.is_short_vowel)

    def feature_count(self, phone_class: str) -> int:
        return self.table.feature_count(phone_class)

    def sequence(self, phones) -> PhonemeSequence:
        return PhonemeSequence.from_phones(phones)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InventoryError(message)


def load_inventory(doc) -> PhonemeInventory:
    """Build a validated :class:`PhonemeInventory` from a parsed JSON document.

    Rejects malformed documents, wrong feature counts (15 consonant / 4
    vowel), duplicate or non-NFC symbols, misplaced short-vowel flags and
    missing Persian vowels; every diagnostic names the offending entry.
    """
    _require(isinstance(doc, dict), "malformed inventory document: expected an object")
    for key in ("consonant_features", "vowel_features", "phonemes"):
        _require(key in doc, f"malformed inventory document: missing key {key!r}")
        _require(isinstance(doc[key], list), f"malformed inventory document: {key!r} must be an array")

    cons_features = []
    for entry in doc["consonant_features"]:
        _require(
            isinstance(entry, dict) and isinstance(entry.get("name"), str),
            f"malformed consonant feature entry: {entry!r}",
        )
        group = entry.get("group")
        _require(
            group in FEATURE_GROUPS,
            f"consonant feature {entry.get('name')!r} has invalid group {group!r}",
        )
        cons_features.append(FeatureDef(entry["name"], group))
    names = [f.name for f in cons_features]
    _require(len(set(names)) == len(names), "duplicate consonant feature names")
    _require(
        len(cons_features) == CONSONANT_FEATURE_COUNT,
        f"consonant feature count must be {CONSONANT_FEATURE_COUNT}, got {len(cons_features)}",
    )

    vowel_features = []
    for entry in doc["vowel_features"]:
        _require(
            isinstance(entry, dict) and isinstance(entry.get("name"), str),
            f"malformed vowel feature entry: {entry!r}",
        )
        vowel_features.append(entry["name"])
    _require(len(set(vowel_features)) == len(vowel_features), "duplicate vowel feature names")
    _require(
        len(vowel_features) == VOWEL_FEATURE_COUNT,
        f"vowel feature count must be {VOWEL_FEATURE_COUNT}, got {len(vowel_features)}",
    )

    table = FeatureTable(tuple(cons_features), tuple(vowel_features))

    phonemes: dict[str, Phoneme] = {}
    for entry in doc["phonemes"]:
        _require(
            isinstance(entry, dict) and isinstance(entry.get("symbol"), str) and entry["symbol"],
            f"malformed phoneme entry: {entry!r}",
        )
        symbol = unicodedata.normalize("NFC", entry["symbol"])
        phone_class = entry.get("class")
        _require(
            phone_class in ("consonant", "vowel"),
            f"phoneme {symbol!r} has invalid class {phone_class!r}",
        )
        features = entry.get("features")
        expected = table.feature_count(phone_class)
        _require(
            isinstance(features, list) and len(features) == expected,
            f"phoneme {symbol!r}: feature vector length must be {expected}",
        )
        _require(
            all(v in (0, 1) for v in features),
            f"phoneme {symbol!r}: features must be 0 or 1",
        )
        short = bool(entry.get("short", False))
        if short:
            _require(phone_class == "vowel", f"phoneme {symbol!r}: only vowels may be short")
            _require(
                symbol in SHORT_VOWELS,
                f"phoneme {symbol!r}: short flag is reserved for {'/'.join(SHORT_VOWELS)}",
            )
        _require(symbol not in phonemes, f"duplicate phoneme symbol {symbol!r}")
        phonemes[symbol] = Phoneme(symbol, phone_class, tuple(features), short)

    for symbol in SHORT_VOWELS:
        _require(
            symbol in phonemes and phonemes[symbol].is_short_vowel,
            f"missing short vowel /{symbol}/",
        )
    for symbol in PERSIAN_VOWELS:
        _require(symbol in phonemes, f"missing Persian vowel /{symbol}/")

    return PhonemeInventory(table, phonemes)


def load_inventory_file(path: str | Path) -> PhonemeInventory:
    with open(path, encoding="utf-8") as f:
        return load_inventory(json.load(f))


def load_default_inventory() -> PhonemeInventory:
    """Load the feature table shipped with the package."""
    data = resources.files(__package__).joinpath("data", DEFAULT_INVENTORY_RESOURCE)
    return load_inventory(json.loads(data.read_text(encoding="utf-8")))


def tokenize_ipa(text: str, inventory: PhonemeInventory) -> PhonemeSequence:
    """Tokenize an IPA string by greedy longest match over inventory symbols.

    Input is NFC-normalized first so composed symbols match deterministically.
    Raises :class:`TokenizeError` carrying the index and offending code point
    when no registered symbol matches.
    """
    normalized = unicodedata.normalize("NFC", text)
    phones: list[Phoneme] = []
    i = 0
    max_len = inventory._max_symbol_len
    while i < len(normalized):
        for length in range(min(max_len, len(normalized) - i), 0, -1):
            candidate = normalized[i : i + length]
            if candidate in inventory.phonemes:
                phones.append(inventory.phonemes[candidate])
                i += length
                break
        else:
            raise TokenizeError(normalized, i)
    return PhonemeSequence(tuple(phones), normalized)


def feature_diff_count(a: Phoneme, b: Phoneme) -> int:
    """Number of binary features on which two same-class phonemes differ."""
    if a.phone_class != b.phone_class:
        raise ValueError(
            f"cannot compare features across classes: {a!r} is a {a.phone_class}, "
            f"{b!r} is a {b.phone_class}"
        )
    return sum(1 for x, y in zip(a.features, b.features) if x != y)
