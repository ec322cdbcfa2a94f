import random

import pytest

from pde.encoder import Phrase, SemanticFrame
from pde.ledger import Dictionary
from pde.numeric import parse_expr

NOUNS = ("p01", "p02", "s01", "y01", "o15", "abC15")
VERBS = ("a03", "a04", "a11")
COLORS = ("C01", "C02", "C03")
TIMES = ("t20", "t30")


@pytest.fixture(scope="session")
def bootstrap():
    return Dictionary.bootstrap()


@pytest.fixture(scope="session")
def view(bootstrap):
    return bootstrap.view()


def random_phrase(rng: random.Random) -> Phrase:
    head = rng.choice(NOUNS)
    modifiers = tuple(rng.choice(COLORS) for _ in range(rng.randrange(0, 3)))
    demonstrative = rng.choice((None, None, None, 1, 2))
    return Phrase(head, modifiers, demonstrative)


def random_expr_text(rng: random.Random, depth: int = 0) -> str:
    if depth >= 3 or rng.random() < 0.4:
        return str(rng.randrange(0, 1000))
    roll = rng.random()
    if roll < 0.12:
        return f"sqrt({random_expr_text(rng, depth + 1)})"
    if roll < 0.24:
        return f"log({random_expr_text(rng, depth + 1)})"
    if roll < 0.4:
        return f"({random_expr_text(rng, depth + 1)})"
    op = rng.choice("+-*/^")
    return f"{random_expr_text(rng, depth + 1)} {op} {random_expr_text(rng, depth + 1)}"


def random_frame(rng: random.Random) -> SemanticFrame:
    """A frame drawn from the bootstrap dictionary's codes, in the canonical
    shape family the encoder emits."""
    roll = rng.random()
    if roll < 0.08:
        return SemanticFrame(numeric=parse_expr(random_expr_text(rng)))
    emotions = tuple(
        ("e02", rng.choice((None, 1, 2, 3))) for _ in range(rng.randrange(0, 3))
    )
    background = "bG1" if rng.random() < 0.4 else None
    time = rng.choice(TIMES) if rng.random() < 0.4 else None
    colloquial = rng.random() < 0.15
    if roll < 0.18:
        return SemanticFrame(
            comparison=(random_phrase(rng), random_phrase(rng)),
            background=background,
            time=time,
            emotions=emotions,
            colloquial=colloquial,
        )
    verb = rng.choice(VERBS) if rng.random() < 0.8 else None
    frame = SemanticFrame(
        subject=random_phrase(rng) if rng.random() < 0.9 else None,
        verb=verb,
        object=random_phrase(rng) if verb and rng.random() < 0.5 else None,
        past=rng.random() < 0.3,
        negated=rng.random() < 0.3,
        colloquial=colloquial,
        relations=tuple(
            (rng.choice((1, 2)), random_phrase(rng)) for _ in range(rng.randrange(0, 3))
        ),
        background=background,
        time=time,
        emotions=emotions,
    )
    if frame.is_empty():
        return SemanticFrame(subject=Phrase("p02"), verb="a11")
    return frame
