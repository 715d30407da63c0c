"""Binary decision trees mapping context labels to shared distributions."""

from __future__ import annotations

from dataclasses import dataclass

from ..frontend.labels import ContextLabel
from .questions import Question


@dataclass
class TreeNode:
    question: Question | None = None
    yes: "TreeNode | None" = None
    no: "TreeNode | None" = None
    leaf: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.question is None


@dataclass
class DecisionTree:
    """A tree for one (state index, stream); leaves hold distribution-pool ids."""

    state: int
    stream: str
    root: TreeNode

    def leaves(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.leaf)
            else:
                stack.extend((node.no, node.yes))
        return out

    def n_leaves(self) -> int:
        return len(self.leaves())


def tree_traverse(label: ContextLabel, tree: DecisionTree) -> int:
    node = tree.root
    while not node.is_leaf:
        node = node.yes if node.question.answer(label) else node.no
    return node.leaf
