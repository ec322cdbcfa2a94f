"""Render parsed blocks, phrases, and fragments to natural language.

Template words (articles, "not", "with", prepositions, attribute labels)
come from a data file so they can be re-skinned without code changes; every
content word is the surface form of exactly one code, resolved through a
dictionary view plus the per-language surface overlay. Rendering is
deterministic.

Article behavior is contextual: subjects take "the", marked objects take
"the", relation phrases take "a"/"an" inside a clause but "the" when
rendered standalone. Codes whose article policy is "none" (colors, actions,
times, emotions, backgrounds) never take an article.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from . import numeric
from .errors import PdeError
from .lexicon import Code
from .parser import Block, Clause, NounPhrase, parse_fragment


class ExpansionError(PdeError):
    pass


class UnresolvedCodeError(ExpansionError):
    def __init__(self, code: str):
        super().__init__(f"code {code!r} does not resolve in the dictionary")
        self.code = code


class MissingSurfaceFormError(ExpansionError):
    def __init__(self, code: str, form: str):
        super().__init__(f"code {code!r} has no {form} surface form")
        self.code = code
        self.form = form


@dataclass(frozen=True)
class SurfaceForms:
    """English word material for one code.

    Verb forms default to regular morphology when absent. The adjective slot
    exists for codes whose base is a noun but which also modify ("sadness" /
    "sad").
    """

    base: str
    present3sg: str | None = None
    past: str | None = None
    adjective: str | None = None
    article_policy: str = "indefinite"  # definite | indefinite | none

    @property
    def verb_present(self) -> str:
        return self.present3sg or self.base + "s"

    @property
    def verb_past(self) -> str:
        return self.past or self.base + "ed"


@dataclass(frozen=True)
class TemplateSet:
    attributes: Mapping[str, str]
    relations: Mapping[str, str]
    demonstratives: Mapping[str, str]
    intensity: Mapping[str, str]
    negation_present: str
    negation_past: str
    negation_bare: str
    comparison_link: str
    association_link: str
    definite_article: str
    indefinite_article: str
    indefinite_article_vowel: str

    @classmethod
    def from_mapping(cls, data: Mapping) -> "TemplateSet":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})


def _load_templates() -> TemplateSet:
    text = resources.files("pde").joinpath("data/templates_en.json").read_text("utf-8")
    return TemplateSet.from_mapping(json.loads(text))


def _load_overlay() -> dict:
    text = resources.files("pde").joinpath("data/surface_forms_en.json").read_text("utf-8")
    return json.loads(text)


DEFAULT_TEMPLATES = _load_templates()
_OVERLAY = _load_overlay()

# Categories whose words never take an article; everything else is articled.
_NO_ARTICLE_CATEGORIES = frozenset({"Color", "Action", "Time", "Emotion", "Background"})


@dataclass(frozen=True)
class OrderProfile:
    """Constituent order plus the attribute sentence templates."""

    clause_order: str = "SVO"  # or SOV
    attribute_templates: Mapping[str, str] | None = None
    templates: TemplateSet | None = None

    @property
    def template_set(self) -> TemplateSet:
        return self.templates or DEFAULT_TEMPLATES

    def attribute_template(self, slot: str) -> str:
        templates = self.attribute_templates or self.template_set.attributes
        return templates[slot]


ENGLISH_SVO = OrderProfile("SVO")
ENGLISH_SOV = OrderProfile("SOV")


def surface_for(raw: str, meaning: str, category: str) -> SurfaceForms:
    """Compose the per-language overlay entry over the ledger definition."""
    entry = _OVERLAY.get(raw, {})
    policy = entry.get("article_policy")
    if policy is None:
        policy = "none" if category in _NO_ARTICLE_CATEGORIES else "indefinite"
    return SurfaceForms(
        base=entry.get("base", meaning),
        present3sg=entry.get("present3sg"),
        past=entry.get("past"),
        adjective=entry.get("adjective"),
        article_policy=policy,
    )


def _surface(view, code: Code | str, on_missing: str) -> SurfaceForms | None:
    raw = code.raw if isinstance(code, Code) else code
    resolved = view.resolve(raw)
    if resolved is None:
        if on_missing == "bracket":
            return None
        raise UnresolvedCodeError(raw)
    return surface_for(raw, resolved.meaning, resolved.category)


def _word(view, code: Code | str, on_missing: str, *, prefer_adjective: bool = False) -> str:
    sf = _surface(view, code, on_missing)
    if sf is None:
        raw = code.raw if isinstance(code, Code) else code
        return f"[{raw}]"
    if prefer_adjective and sf.adjective:
        return sf.adjective
    return sf.base


def render_phrase(
    phrase: NounPhrase,
    view,
    article: str | None = None,
    templates: TemplateSet | None = None,
    on_missing: str = "error",
) -> str:
    """Render a noun phrase: modifiers before head, space separated.

    A modifier list ending in a noun-like code renders as an associated
    compound ("woman with a red square"), which carries its own articles;
    plain adjective modifiers render inline ("blue sky"). The requested
    article (definite/indefinite/None) is applied per the head's policy; a
    demonstrative replaces it.
    """
    t = templates or DEFAULT_TEMPLATES
    head_sf = _surface(view, phrase.head, on_missing)
    head_word = f"[{phrase.head.raw}]" if head_sf is None else head_sf.base
    mods = phrase.modifiers
    sub_head_sf = _surface(view, mods[-1], on_missing) if mods else None
    associated = sub_head_sf is not None and sub_head_sf.article_policy != "none"
    if associated:
        sub = render_phrase(
            NounPhrase(mods[-1], mods[:-1]), view, "indefinite", t, on_missing
        )
        core = f"{head_word} {t.association_link} {sub}"
        article = article or "indefinite"  # the compound template is articled
    else:
        words = [_word(view, m, on_missing, prefer_adjective=True) for m in mods]
        core = " ".join(words + [head_word])
    if phrase.demonstrative is not None:
        dem = t.demonstratives.get(str(phrase.demonstrative), f"[d{phrase.demonstrative}]")
        return f"{dem} {core}"
    if article and head_sf is not None and head_sf.article_policy != "none":
        if article == "definite" or head_sf.article_policy == "definite":
            return f"{t.definite_article} {core}"
        vowel = core[0].lower() in "aeiou"
        return f"{t.indefinite_article_vowel if vowel else t.indefinite_article} {core}"
    return core


def _verb_text(clause: Clause, view, t: TemplateSet, on_missing: str) -> str:
    assert clause.verb is not None
    sf = _surface(view, clause.verb, on_missing)
    if sf is None:
        return f"[{clause.verb.raw}]"
    if clause.negated:
        if clause.subject is not None:
            word = t.negation_past if clause.past else t.negation_present
            return f"{word} {sf.base}"
        return f"{t.negation_bare} {sf.base}"
    if clause.past:
        return sf.verb_past
    return sf.verb_present if clause.subject is not None else sf.base


def _relation_text(
    variant: int, phrase: NounPhrase, view, t: TemplateSet, article: str, on_missing: str
) -> str:
    preposition = t.relations.get(str(variant), f"[u{variant}]")
    return f"{preposition} {render_phrase(phrase, view, article, t, on_missing)}"


def _emotion_value(
    code: Code, level: int | None, view, t: TemplateSet, on_missing: str
) -> str:
    sf = _surface(view, code, on_missing)
    if sf is None:
        return f"[{code.raw}]"
    if level is None:
        return sf.base
    adverb = t.intensity.get(str(level), f"[i{level}]")
    if sf.adjective is None:
        if on_missing == "error":
            raise MissingSurfaceFormError(code.raw, "adjective")
        return f"{adverb} {sf.base}"
    return f"{adverb} {sf.adjective}"


def _capitalize(text: str) -> str:
    return text[0].upper() + text[1:] if text and text[0].isalpha() else text


def _constituents(clause: Clause, view, profile: OrderProfile, on_missing: str) -> list[str]:
    """Subject/verb/object in profile order, then relations."""
    t = profile.template_set
    subject = (
        render_phrase(clause.subject, view, "definite", t, on_missing)
        if clause.subject
        else None
    )
    verb = _verb_text(clause, view, t, on_missing) if clause.verb else None
    obj = (
        render_phrase(clause.object, view, "definite", t, on_missing)
        if clause.object
        else None
    )
    if profile.clause_order == "SOV":
        ordered = [subject, obj, verb]
    else:
        ordered = [subject, verb, obj]
    parts = [p for p in ordered if p]
    parts.extend(
        _relation_text(v, ph, view, t, "indefinite", on_missing)
        for v, ph in clause.relations
    )
    return parts


def _attribute_sentences(
    clause: Clause, view, profile: OrderProfile, on_missing: str
) -> list[str]:
    t = profile.template_set
    sentences = []
    if clause.background is not None:
        value = _word(view, clause.background, on_missing)
        sentences.append(profile.attribute_template("background").format(value=value))
    if clause.time is not None:
        value = _word(view, clause.time, on_missing)
        sentences.append(profile.attribute_template("time").format(value=value))
    if clause.emotions:
        values = [
            _emotion_value(code, level, view, t, on_missing)
            for code, level in clause.emotions
        ]
        sentences.append(
            profile.attribute_template("emotion").format(value=", ".join(values))
        )
    return sentences


def render_block(
    block: Block,
    view,
    profile: OrderProfile | None = None,
    on_missing: str = "error",
) -> str:
    """One sentence per clause, then one attribute sentence per populated slot."""
    profile = profile or ENGLISH_SVO
    t = profile.template_set
    sentences: list[str] = []
    for clause in block.clauses:
        if clause.numeric is not None:
            sentences.append(_capitalize(numeric.render_expr(clause.numeric) + "."))
        elif clause.comparison is not None:
            left, right = clause.comparison
            text = (
                f"{render_phrase(left, view, None, t, on_missing)}"
                f" {t.comparison_link} "
                f"{render_phrase(right, view, None, t, on_missing)}"
            )
            sentences.append(_capitalize(text + "."))
        else:
            parts = _constituents(clause, view, profile, on_missing)
            if parts:
                sentences.append(_capitalize(" ".join(parts) + "."))
        sentences.extend(_attribute_sentences(clause, view, profile, on_missing))
    return " ".join(sentences)


def render_fragment(
    source: str | Clause,
    view,
    profile: OrderProfile | None = None,
    on_missing: str = "bracket",
) -> str:
    """Render a snippet without sentence terminators.

    Clause-like fragments (a verb, a comparison, a demonstrative, an
    intensity) keep a leading capital; bare phrases and relation phrases stay
    lowercase. Relation phrases take the definite article standalone.
    """
    clause = parse_fragment(source) if isinstance(source, str) else source
    profile = profile or ENGLISH_SVO
    t = profile.template_set
    if clause.numeric is not None:
        return numeric.render_expr(clause.numeric)
    if clause.comparison is not None:
        left, right = clause.comparison
        text = (
            f"{render_phrase(left, view, None, t, on_missing)}"
            f" {t.comparison_link} "
            f"{render_phrase(right, view, None, t, on_missing)}"
        )
        return _capitalize(text)
    parts: list[str] = []
    if clause.subject is not None:
        article = "definite" if clause.verb is not None else None
        parts.append(render_phrase(clause.subject, view, article, t, on_missing))
    if clause.verb is not None:
        parts.append(_verb_text(clause, view, t, on_missing))
    if clause.object is not None:
        parts.append(render_phrase(clause.object, view, "definite", t, on_missing))
    parts.extend(
        _relation_text(v, ph, view, t, "definite", on_missing)
        for v, ph in clause.relations
    )
    for code, level in clause.emotions:
        parts.append(_emotion_value(code, level, view, t, on_missing))
    if clause.background is not None:
        parts.append(_word(view, clause.background, on_missing))
    if clause.time is not None:
        parts.append(_word(view, clause.time, on_missing))
    text = " ".join(parts)
    clause_like = (
        clause.verb is not None
        or clause.negated
        or (clause.subject is not None and clause.subject.demonstrative is not None)
        or any(level is not None for _, level in clause.emotions)
    )
    return _capitalize(text) if clause_like else text
