"""Instruction-template registry, deterministic rendering, slot extraction.

The registry ships one template per task (6 pretraining, 10 downstream);
users may register extra variants per task and select among them by seeded
choice. Rendering joins multi-molecule slots with '.', writes the reaction
arrow literally as " >> ", and is byte-deterministic. A per-task regex
recovers the bound slot strings from rendered instructions.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .molgraph import GraphRecord

_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")
MOLECULE_SENTINEL = "<molecule>"


class TemplateError(ValueError):
    """Unknown task, missing placeholder, or unextractable instruction."""


@dataclass(frozen=True)
class TaskTemplate:
    """One instruction template with named placeholders."""

    task: str
    system_prompt: str
    instruction_pattern: str
    output_pattern: str
    molecule_slots: tuple[str, ...] = ()

    def placeholders(self, include_output: bool = True) -> tuple[str, ...]:
        names = _PLACEHOLDER_RE.findall(self.instruction_pattern)
        if include_output:
            names += _PLACEHOLDER_RE.findall(self.output_pattern)
        seen: list[str] = []
        for name in names:
            if name not in seen:
                seen.append(name)
        return tuple(seen)

    @classmethod
    def from_dict(cls, data: dict) -> "TaskTemplate":
        return cls(
            task=data["task"],
            system_prompt=data["system"],
            instruction_pattern=data["instruction"],
            output_pattern=data["output"],
            molecule_slots=tuple(data.get("molecule_slots", ())),
        )


@dataclass
class TemplateRegistry:
    """Task -> template variants; variant 0 is the shipped one."""

    _templates: dict[str, list[TaskTemplate]] = field(default_factory=dict)

    def register(self, template: TaskTemplate) -> None:
        self._templates.setdefault(template.task, []).append(template)

    def load_file(self, path: str | Path) -> None:
        for entry in json.loads(Path(path).read_text(encoding="utf-8")):
            self.register(TaskTemplate.from_dict(entry))

    @property
    def tasks(self) -> tuple[str, ...]:
        return tuple(self._templates)

    def get(self, task: str, variant: int = 0) -> TaskTemplate:
        try:
            return self._templates[task][variant]
        except KeyError:
            raise TemplateError(f"unknown task {task!r}") from None
        except IndexError:
            raise TemplateError(
                f"task {task!r} has no variant {variant} "
                f"({len(self._templates[task])} registered)"
            ) from None

    def choose(self, task: str, seed: int | str | None = None) -> TaskTemplate:
        """Seeded choice among a task's variants (variant 0 without a seed)."""
        variants = self._templates.get(task)
        if not variants:
            raise TemplateError(f"unknown task {task!r}")
        if seed is None or len(variants) == 1:
            return variants[0]
        return random.Random(seed).choice(variants)


_BUILTIN: TemplateRegistry | None = None


def builtin_registry() -> TemplateRegistry:
    """The shipped 16-task registry (loaded once)."""
    global _BUILTIN
    if _BUILTIN is None:
        registry = TemplateRegistry()
        data = json.loads(
            resources.files("rxnkit").joinpath("data/templates.json")
            .read_text(encoding="utf-8")
        )
        for entry in data:
            registry.register(TaskTemplate.from_dict(entry))
        _BUILTIN = registry
    return _BUILTIN


TASKS = tuple(t["task"] for t in json.loads(
    resources.files("rxnkit").joinpath("data/templates.json").read_text("utf-8")
))


def _format_value(value, sentinel: bool) -> str:
    if isinstance(value, GraphRecord):
        return MOLECULE_SENTINEL if sentinel else value.to_json()
    if isinstance(value, dict):
        return MOLECULE_SENTINEL if sentinel else json.dumps(
            value, separators=(",", ":")
        )
    if isinstance(value, (list, tuple)):
        return ".".join(_format_value(v, sentinel) for v in value)
    if sentinel:
        return MOLECULE_SENTINEL
    return str(value)


def render(
    task: str,
    bindings: dict,
    registry: TemplateRegistry | None = None,
    variant: int = 0,
    seed: int | str | None = None,
    sentinel_molecules: bool = False,
) -> dict:
    """Render a task's template with the given slot bindings.

    Lists join with '.'; graph records render as compact JSON (or as the
    molecule sentinel when ``sentinel_molecules`` is set, with the real
    strings returned under "molecules"). The "output" key is present only
    when every output placeholder is bound. Raises TemplateError for an
    unknown task or a missing placeholder.
    """
    registry = registry or builtin_registry()
    template = (
        registry.choose(task, seed) if seed is not None else registry.get(task, variant)
    )

    molecules: list[str] = []

    def fill(pattern: str) -> str:
        def substitute(match: re.Match) -> str:
            name = match.group(1)
            if name not in bindings:
                raise TemplateError(
                    f"task {task!r}: placeholder {name!r} is not bound"
                )
            value = bindings[name]
            use_sentinel = sentinel_molecules and name in template.molecule_slots
            if use_sentinel:
                # One sidecar entry per sentinel token emitted.
                items = value if isinstance(value, (list, tuple)) else [value]
                molecules.extend(_format_value(v, sentinel=False) for v in items)
            return _format_value(value, sentinel=use_sentinel)

        return _PLACEHOLDER_RE.sub(substitute, pattern)

    result = {
        "task": task,
        "system": template.system_prompt,
        "instruction": fill(template.instruction_pattern),
    }
    output_names = _PLACEHOLDER_RE.findall(template.output_pattern)
    if all(name in bindings for name in output_names):
        result["output"] = fill(template.output_pattern)
    if sentinel_molecules:
        result["molecules"] = molecules
    return result


def extraction_regex(template: TaskTemplate) -> re.Pattern:
    """Compile the instruction pattern into a slot-capturing regex."""
    parts = ["^"]
    pos = 0
    for match in _PLACEHOLDER_RE.finditer(template.instruction_pattern):
        parts.append(re.escape(template.instruction_pattern[pos : match.start()]))
        parts.append(f"(?P<{match.group(1)}>.+?)")
        pos = match.end()
    parts.append(re.escape(template.instruction_pattern[pos:]))
    parts.append("$")
    return re.compile("".join(parts), re.DOTALL)


def extract(
    task: str,
    instruction: str,
    registry: TemplateRegistry | None = None,
    variant: int = 0,
) -> dict[str, str]:
    """Recover the bound slot strings from a rendered instruction."""
    registry = registry or builtin_registry()
    template = registry.get(task, variant)
    match = extraction_regex(template).match(instruction)
    if match is None:
        raise TemplateError(
            f"instruction does not match the {task!r} template"
        )
    return match.groupdict()
