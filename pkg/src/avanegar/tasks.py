"""Annotation tasks: construction, distractors, validation and scoring.

Three task classes exist. Disambiguation shows options that include the
correct transcription; completion shows a transcription with the short
vowels removed and asks the user to restore them; correction shows a
wrong form and asks the user to type the right one. Complexity ratings
fall into class A (truth among the options), B (completion with truth)
and C (no usable truth), and that classification is never sent to
clients.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable

from .distance import CostConfig, phone_distance, sequence_pwld
from .phonemes import (
    Phoneme,
    PhonemeInventory,
    PhonemeSequence,
    SHORT_VOWELS,
    tokenize_ipa,
)

if TYPE_CHECKING:
    from .store import AlignedLine

TASK_CLASSES = ("disambiguation", "completion", "correction")


class TaskInvariantError(ValueError):
    """A task violates the structural rules of its class."""


class DistractorError(ValueError):
    """The requested number of distinct distractors cannot be produced."""

    def __init__(self, requested: int, max_attainable: int):
        self.requested = requested
        self.max_attainable = max_attainable
        super().__init__(
            f"cannot produce {requested} distinct distractors; "
            f"at most {max_attainable} exist for this word"
        )


@dataclass(frozen=True)
class WordRef:
    line_id: str
    word_index: int


@dataclass(frozen=True)
class AudioSpan:
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class Task:
    id: str
    word_ref: WordRef
    audio_span: AudioSpan
    displayed: PhonemeSequence
    options: tuple[PhonemeSequence, ...]
    task_class: str
    truth: PhonemeSequence | None
    complexity: float

    def __post_init__(self):
        if self.task_class not in TASK_CLASSES:
            raise TaskInvariantError(f"unknown task class {self.task_class!r}")
        if len(set(o.symbols for o in self.options)) != len(self.options):
            raise TaskInvariantError(f"task {self.id}: options must be pairwise distinct")
        if self.task_class == "disambiguation":
            if self.truth is None or self.truth not in self.options:
                raise TaskInvariantError(
                    f"task {self.id}: disambiguation requires the truth among the options"
                )
            if len(self.options) < 2:
                raise TaskInvariantError(
                    f"task {self.id}: disambiguation requires at least 2 options"
                )
        elif self.task_class == "completion":
            if any(p.is_short_vowel for p in self.displayed):
                raise TaskInvariantError(
                    f"task {self.id}: completion skeleton must not contain short vowels"
                )
            if self.truth is not None and strip_short_vowels(self.truth) != self.displayed:
                raise TaskInvariantError(
                    f"task {self.id}: completion truth must differ from the skeleton "
                    f"only by short-vowel insertions"
                )
        elif self.task_class == "correction":
            if self.truth is not None and self.truth in self.options:
                raise TaskInvariantError(
                    f"task {self.id}: correction must not list the truth as an option"
                )


@dataclass(frozen=True)
class ScoredResponse:
    task_id: str
    given: PhonemeSequence
    is_exact: bool
    distance_to_truth: float | None
    selected_option_index: int | None = None


@dataclass(frozen=True)
class CompletionCheck:
    valid: bool
    position: int | None = None
    message: str = ""


def classify_task(task: Task) -> str:
    """Complexity class: A, B or C.

    A when an expert truth sits among the options, B for completion tasks
    with a truth, C when the truth is absent or not offered.
    """
    if task.truth is not None and task.truth in task.options:
        return "A"
    if task.truth is not None and task.task_class == "completion":
        return "B"
    return "C"


def strip_short_vowels(seq: PhonemeSequence) -> PhonemeSequence:
    """Remove the short vowels, keeping everything else in order."""
    return PhonemeSequence.from_phones(p for p in seq if not p.is_short_vowel)


def validate_completion(skeleton: PhonemeSequence, answer: PhonemeSequence) -> CompletionCheck:
    """Check that an answer adds only short vowels to the skeleton.

    Invalid answers are a return value, not an error; the check names the
    first answer position that breaks the skeleton.
    """
    if any(p.is_short_vowel for p in skeleton):
        raise ValueError("skeleton must not contain short vowels")
    k = 0
    for i, p in enumerate(answer):
        if p.is_short_vowel:
            continue
        if k >= len(skeleton) or p.symbol != skeleton[k].symbol:
            return CompletionCheck(
                False, i, f"position {i}: /{p.symbol}/ does not continue the skeleton"
            )
        k += 1
    if k < len(skeleton):
        return CompletionCheck(
            False,
            len(answer),
            f"answer ends before covering skeleton phone /{skeleton[k].symbol}/",
        )
    return CompletionCheck(True)


def _replace_at(seq: PhonemeSequence, index: int, phone: Phoneme) -> PhonemeSequence:
    phones = list(seq.phones)
    phones[index] = phone
    return PhonemeSequence.from_phones(phones)


def _short_vowel_variants(truth: PhonemeSequence, inventory: PhonemeInventory) -> list[PhonemeSequence]:
    """Every reassignment of the short-vowel slots other than the truth's own."""
    slots = [i for i, p in enumerate(truth) if p.is_short_vowel]
    if not slots:
        return []
    choices = [inventory[s] for s in SHORT_VOWELS]
    variants: list[PhonemeSequence] = []

    def assign(pos: int, seq: PhonemeSequence, changed: bool) -> None:
        if pos == len(slots):
            if changed:
                variants.append(seq)
            return
        slot = slots[pos]
        for phone in choices:
            assign(pos + 1, _replace_at(seq, slot, phone), changed or phone.symbol != truth[slot].symbol)

    assign(0, truth, False)
    return variants


def _nearest_consonant_variants(truth: PhonemeSequence, inventory: PhonemeInventory) -> list[PhonemeSequence]:
    """Single-consonant swaps to the closest distinct-sounding consonants.

    Zero-distance alternatives (alias symbols sharing a feature vector)
    are skipped; they would not change the pronunciation.
    """
    variants: list[PhonemeSequence] = []
    consonants = sorted(inventory.consonants, key=lambda p: p.symbol)
    for i, p in enumerate(truth):
        if p.phone_class != "consonant":
            continue
        scored = [
            (phone_distance(p, c, inventory), c.symbol, c)
            for c in consonants
            if phone_distance(p, c, inventory) > 0
        ]
        if not scored:
            continue
        best = min(d for d, _, _ in scored)
        for d, _, c in sorted(scored):
            if d == best:
                variants.append(_replace_at(truth, i, c))
    return variants


def generate_distractors(
    truth: PhonemeSequence,
    inventory: PhonemeInventory,
    k: int,
    seed: int | float | str,
) -> list[PhonemeSequence]:
    """Produce k plausible wrong transcriptions of a word, deterministically.

    Short-vowel alternations come first (they are the ambiguity the script
    hides); single nearest-consonant swaps fill in when a word offers no
    short vowels or not enough alternations.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    vowel_pool = _short_vowel_variants(truth, inventory)
    consonant_pool = _nearest_consonant_variants(truth, inventory)
    if k > len(vowel_pool) + len(consonant_pool):
        raise DistractorError(k, len(vowel_pool) + len(consonant_pool))
    rng = random.Random(f"distractors:{seed}")
    rng.shuffle(vowel_pool)
    rng.shuffle(consonant_pool)
    return (vowel_pool + consonant_pool)[:k]


def distractor_space_size(truth: PhonemeSequence, inventory: PhonemeInventory) -> int:
    return len(_short_vowel_variants(truth, inventory)) + len(
        _nearest_consonant_variants(truth, inventory)
    )


def score_response(
    task: Task,
    given: PhonemeSequence,
    inventory: PhonemeInventory,
    cfg: CostConfig = CostConfig(),
    selected_option_index: int | None = None,
) -> ScoredResponse:
    """Score an answer against the task's truth, if one exists.

    Clicked options and typed transcriptions go through the same distance,
    so the two entry paths are scored identically. Tasks without a truth
    keep the response unscored for later rating.
    """
    if task.truth is None:
        return ScoredResponse(task.id, given, False, None, selected_option_index)
    distance = sequence_pwld(task.truth, given, inventory, cfg).total_cost
    return ScoredResponse(task.id, given, distance == 0.0, distance, selected_option_index)


def task_complexity(task: Task, inventory: PhonemeInventory, cfg: CostConfig = CostConfig()) -> float:
    """Estimated correction effort: distance from the displayed form to the truth."""
    if task.truth is None:
        raise ValueError(f"task {task.id} has no ground truth to rate complexity against")
    return sequence_pwld(task.displayed, task.truth, inventory, cfg).total_cost


# --- serialization ----------------------------------------------------------

def task_to_doc(task: Task) -> dict:
    return {
        "id": task.id,
        "line_id": task.word_ref.line_id,
        "word_index": task.word_ref.word_index,
        "start_ms": task.audio_span.start_ms,
        "end_ms": task.audio_span.end_ms,
        "displayed": task.displayed.source_text,
        "options": [o.source_text for o in task.options],
        "task_class": task.task_class,
        "truth": task.truth.source_text if task.truth is not None else None,
        "complexity": task.complexity,
    }


def task_from_doc(doc: dict, inventory: PhonemeInventory) -> Task:
    return Task(
        id=doc["id"],
        word_ref=WordRef(doc["line_id"], doc["word_index"]),
        audio_span=AudioSpan(doc["start_ms"], doc["end_ms"]),
        displayed=tokenize_ipa(doc["displayed"], inventory),
        options=tuple(tokenize_ipa(o, inventory) for o in doc["options"]),
        task_class=doc["task_class"],
        truth=tokenize_ipa(doc["truth"], inventory) if doc.get("truth") else None,
        complexity=doc["complexity"],
    )


# --- corpus-driven generation -----------------------------------------------

@dataclass
class TaskPlan:
    """Counts and knobs for building tasks over an ingested corpus."""

    seed: int = 0
    rate: float = 0.5  # chance a candidate word becomes a task when counts are not given
    n_options: int = 3
    n_disambiguation: int | None = None
    n_correction: int | None = None
    n_completion: int = 0
    correction_rate: float = 0.1  # share of rate-sampled tasks turned into corrections


def _word_rng(seed: int, line_id: str, word_index: int) -> random.Random:
    # String seeding hashes via sha512 internally, so this stays stable
    # across interpreter runs regardless of PYTHONHASHSEED.
    return random.Random(f"task:{seed}:{line_id}:{word_index}")


def _make_task(
    kind: str,
    line,
    word,
    inventory: PhonemeInventory,
    cfg: CostConfig,
    plan: TaskPlan,
) -> Task:
    truth = tokenize_ipa(word.ipa_token, inventory)
    rng = _word_rng(plan.seed, line.line_id, word.index)
    task_id = f"{line.line_id}-w{word.index:02d}"
    ref = WordRef(line.line_id, word.index)
    span = AudioSpan(word.start_ms, word.end_ms)

    if kind == "disambiguation":
        distractors = generate_distractors(truth, inventory, plan.n_options - 1, rng.random())
        options = [truth, *distractors]
        rng.shuffle(options)
        displayed = rng.choice(options)
    elif kind == "correction":
        displayed = generate_distractors(truth, inventory, 1, rng.random())[0]
        options = []
    elif kind == "completion":
        displayed = strip_short_vowels(truth)
        options = []
    else:
        raise ValueError(f"unknown task kind {kind!r}")

    stub = Task(task_id, ref, span, displayed, tuple(options), kind, truth, 0.0)
    return replace(stub, complexity=task_complexity(stub, inventory, cfg))


def build_tasks(
    lines: Iterable["AlignedLine"],
    inventory: PhonemeInventory,
    cfg: CostConfig = CostConfig(),
    plan: TaskPlan = TaskPlan(),
) -> list[Task]:
    """Turn corpus words into tasks, deterministically for a fixed seed.

    With explicit counts the requested numbers of each class are sampled
    from the eligible words; otherwise each candidate word becomes a task
    with probability ``plan.rate``.
    """
    lines = sorted(lines, key=lambda l: l.line_id)
    words = [(line, word) for line in lines for word in line.words]

    def eligible(word, needed: int) -> bool:
        truth = tokenize_ipa(word.ipa_token, inventory)
        return distractor_space_size(truth, inventory) >= needed

    def completable(word) -> bool:
        truth = tokenize_ipa(word.ipa_token, inventory)
        stripped = strip_short_vowels(truth)
        return len(truth) >= 2 and len(stripped) < len(truth)

    tasks: list[Task] = []
    explicit = plan.n_disambiguation is not None or plan.n_correction is not None
    if explicit:
        rng = random.Random(f"plan:{plan.seed}")
        wanted = [
            ("disambiguation", plan.n_disambiguation or 0, lambda lw: eligible(lw[1], plan.n_options - 1)),
            ("correction", plan.n_correction or 0, lambda lw: eligible(lw[1], 1)),
            ("completion", plan.n_completion, lambda lw: completable(lw[1])),
        ]
        taken: set[tuple[str, int]] = set()
        for kind, count, ok in wanted:
            pool = [
                lw for lw in words
                if (lw[0].line_id, lw[1].index) not in taken and ok(lw)
            ]
            if count > len(pool):
                raise ValueError(
                    f"corpus offers only {len(pool)} candidate words for "
                    f"{count} {kind} tasks"
                )
            for line, word in rng.sample(pool, count):
                taken.add((line.line_id, word.index))
                tasks.append(_make_task(kind, line, word, inventory, cfg, plan))
    else:
        for line, word in words:
            rng = _word_rng(plan.seed, line.line_id, word.index)
            if not eligible(word, plan.n_options - 1) or rng.random() >= plan.rate:
                continue
            kind = "correction" if rng.random() < plan.correction_rate else "disambiguation"
            tasks.append(_make_task(kind, line, word, inventory, cfg, plan))

    tasks.sort(key=lambda t: t.id)
    return tasks
