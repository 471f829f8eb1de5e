"""Component registry: built-ins plus anything registered at runtime."""

from __future__ import annotations

from typing import Callable, Type

from .components import Analyser, Selector
from .errors import UnknownComponent

_SELECTORS: dict[str, Type[Selector]] = {}
_ANALYSERS: dict[str, Type[Analyser]] = {}


def register_selector(cls: Type[Selector]) -> Type[Selector]:
    if not cls.name:
        raise ValueError("selector class needs a non-empty name")
    _SELECTORS[cls.name] = cls
    return cls


def register_analyser(cls: Type[Analyser]) -> Type[Analyser]:
    if not cls.name:
        raise ValueError("analyser class needs a non-empty name")
    _ANALYSERS[cls.name] = cls
    return cls


def _ensure_builtins() -> None:
    # Imported lazily: the built-in modules register themselves on import,
    # and importing them from module top level would be circular.
    from . import annotation, external, frames, scoring, selectors  # noqa: F401


def selector_names() -> set[str]:
    _ensure_builtins()
    return set(_SELECTORS)


def analyser_names() -> set[str]:
    _ensure_builtins()
    return set(_ANALYSERS)


def create_selector(name: str, config: dict) -> Selector:
    _ensure_builtins()
    if name not in _SELECTORS:
        raise UnknownComponent(f"unknown selector: {name!r}")
    return _SELECTORS[name](config)


def create_analyser(name: str, config: dict) -> Analyser:
    _ensure_builtins()
    if name not in _ANALYSERS:
        raise UnknownComponent(f"unknown analyser: {name!r}")
    return _ANALYSERS[name](config)


def make_component(name: str, config: dict) -> Callable:
    """Selector or analyser by name; selectors win on (unlikely) collisions."""
    _ensure_builtins()
    if name in _SELECTORS:
        return _SELECTORS[name](config)
    if name in _ANALYSERS:
        return _ANALYSERS[name](config)
    raise UnknownComponent(f"unknown component: {name!r}")
