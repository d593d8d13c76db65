"""The dynamic hierarchical tag store.

Each entry is a path ``c ~> c1 ~> ... ~> .``: a generated tag followed by
its ancestors.  New entries go on the front, as in ``S, c ~> p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .syntax import TagId

Path = tuple[TagId, ...]


class StoreError(Exception):
    pass


@dataclass(frozen=True)
class Store:
    entries: tuple[Path, ...] = ()
    next_id: int = 0
    _heads: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_heads", {p[0]: p for p in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def tags(self) -> list[TagId]:
        return [p[0] for p in self.entries]

    def dump(self) -> str:
        lines = [render_path(p) for p in self.entries]
        lines.append(f"next_id: {self.next_id}")
        return "\n".join(lines)

    def inline(self) -> str:
        return " ;; ".join(render_path(p) for p in self.entries) or "."


EMPTY = Store()


def render_path(p: Path) -> str:
    return " -> ".join(f"#{c}" for c in p) + " -> ."


def path_contains(c: TagId, p: Path) -> bool:
    return c in p


def store_contains(c: TagId, S: Store) -> bool:
    if c in S._heads:
        return True
    return any(c in p for p in S.entries)


def path_of(c: TagId, S: Store) -> Optional[Path]:
    return S._heads.get(c)


def fresh_tag(S: Store) -> tuple[TagId, Store]:
    return S.next_id, Store(S.entries, S.next_id + 1)


def _bump(S: Store, c: TagId) -> int:
    return max(S.next_id, c + 1)


def store_extend_root(c: TagId, S: Store) -> Store:
    if store_contains(c, S):
        raise StoreError(f"tag #{c} is already in the store")
    return Store(((c,),) + S.entries, _bump(S, c))


def store_extend_child(c: TagId, parent: TagId, S: Store) -> Store:
    if store_contains(c, S):
        raise StoreError(f"tag #{c} is already in the store")
    p = path_of(parent, S)
    if p is None:
        raise StoreError(f"parent tag #{parent} heads no store entry")
    return Store(((c,) + p,) + S.entries, _bump(S, c))


def store_invariants_hold(S: Store) -> bool:
    heads = [p[0] for p in S.entries]
    if len(set(heads)) != len(heads):
        return False
    for p in S.entries:
        if len(set(p)) != len(p):
            return False
        if any(c not in S._heads for c in p):
            return False
        if any(c >= S.next_id for c in p):
            return False
    return True
